#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "frrn/adam.hpp"
#include "frrn/discriminator.hpp"
#include "frrn/network.hpp"

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

/// Weights of the total objective
///   L = 20 L_rec + 0.1 L_adv + 100 L_style + 2 L_step.
struct LossWeights {
  double rec = 20.0;
  double adv = 0.1;
  double style = 100.0;
  double step = 2.0;

  void validate() const;
  friend bool operator==(const LossWeights&, const LossWeights&) = default;
};

/// The four generator terms. `step` is undefined when the step loss is
/// disabled.
struct LossBundle {
  Tensor rec;
  Tensor adv;
  Tensor style;
  Tensor step;
};

/// Mean absolute error over all elements.
Tensor rec_loss(const Tensor& restored, const Tensor& truth);

/// Sum over dilation modules of mean(|(I_i - I_gt) * M_i|).
Tensor step_loss(const InpaintTrajectory& trajectory, const Tensor& truth);

/// Frozen convolutional pyramid whose four taps sit at 1/2, 1/4, 1/8 and
/// 1/16 resolution (k=3 stride-2 convolutions, each followed by ReLU).
class StyleFeatureExtractor {
 public:
  static StyleFeatureExtractor random(std::uint64_t seed,
                                      std::array<int, 4> widths = {16, 32, 64, 64});

  std::vector<Tensor> features(const Tensor& image) const;

  /// "style.<i>.weight" / "style.<i>.bias"; none require grad.
  ParameterSet parameters() const;
  /// Replaces the weights with externally supplied tensors of the same
  /// names and shapes.
  void assign(const ParameterSet& weights);

 private:
  struct Tap {
    Tensor weight;
    Tensor bias;
  };
  std::vector<Tap> taps_;
};

/// Sum over taps of mean|G(f_gt) - G(f_rec)|.
Tensor style_loss(const Tensor& restored, const Tensor& truth,
                  const StyleFeatureExtractor& extractor);

/// -mean log sigmoid(real) - mean log(1 - sigmoid(fake)).
Tensor discriminator_loss_from_logits(const Tensor& real_logits, const Tensor& fake_logits);
/// Non-saturating generator objective -mean log sigmoid(fake).
Tensor generator_loss_from_logits(const Tensor& fake_logits);

struct AdversarialLosses {
  Tensor d_loss;  // restored image detached
  Tensor g_loss;
};

AdversarialLosses adv_losses(const Discriminator& disc, const Tensor& truth,
                             const Tensor& restored);

/// Weighted sum; a missing step term counts as zero.
Tensor total_loss(const LossBundle& parts, const LossWeights& weights);

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
