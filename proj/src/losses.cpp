#include "frrn/losses.hpp"

#include <map>
#include <stdexcept>
#include <string>

#include "frrn/init.hpp"
#include "frrn/ops.hpp"
#include "frrn/rng.hpp"

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

void LossWeights::validate() const {
  if (rec < 0 || adv < 0 || style < 0 || step < 0) {
    throw std::invalid_argument("loss weights must be nonnegative");
  }
}

Tensor rec_loss(const Tensor& restored, const Tensor& truth) {
  if (restored.shape() != truth.shape()) {
    throw std::invalid_argument("rec_loss: shape mismatch " + shape_to_string(restored.shape()) +
                                " vs " + shape_to_string(truth.shape()));
  }
  return mean(abs(sub(restored, truth)));
}

Tensor step_loss(const InpaintTrajectory& trajectory, const Tensor& truth) {
  if (trajectory.steps.empty()) {
    throw std::invalid_argument("step_loss: empty trajectory");
  }
  std::vector<Tensor> terms;
  for (const auto& step : trajectory.steps) {
    if (step.image.shape() != truth.shape()) {
      throw std::invalid_argument("step_loss: shape mismatch " +
                                  shape_to_string(step.image.shape()) + " vs " +
                                  shape_to_string(truth.shape()));
    }
    terms.push_back(mean(abs(mask_multiply(sub(step.image, truth), step.mask.valid_tensor()))));
  }
  return weighted_sum(terms, std::vector<Real>(terms.size(), Real(1)));
}

StyleFeatureExtractor StyleFeatureExtractor::random(std::uint64_t seed,
                                                    std::array<int, 4> widths) {
  StyleFeatureExtractor ext;
  Rng rng(seed);
  int in = 3;
  for (int w : widths) {
    Tap tap{glorot_uniform({w, in, 3, 3}, rng), Tensor({w}, Real(0))};
    tap.weight.set_requires_grad(false);
    ext.taps_.push_back(std::move(tap));
    in = w;
  }
  return ext;
}

std::vector<Tensor> StyleFeatureExtractor::features(const Tensor& image) const {
  std::vector<Tensor> out;
  Tensor x = image;
  for (const auto& tap : taps_) {
    x = leaky_relu(conv2d(x, tap.weight, tap.bias, 2, 1), Real(0));
    out.push_back(x);
  }
  return out;
}

ParameterSet StyleFeatureExtractor::parameters() const {
  ParameterSet out;
  for (std::size_t i = 0; i < taps_.size(); ++i) {
    out.emplace_back("style." + std::to_string(i) + ".weight", taps_[i].weight);
    out.emplace_back("style." + std::to_string(i) + ".bias", taps_[i].bias);
  }
  return out;
}

void StyleFeatureExtractor::assign(const ParameterSet& weights) {
  std::map<std::string, Tensor> by_name(weights.begin(), weights.end());
  for (auto& [name, tensor] : parameters()) {
    auto it = by_name.find(name);
    if (it == by_name.end()) {
      throw std::invalid_argument("style extractor: missing tensor '" + name + "'");
    }
    if (it->second.shape() != tensor.shape()) {
      throw std::invalid_argument("style extractor: tensor '" + name + "' has shape " +
                                  shape_to_string(it->second.shape()) + ", expected " +
                                  shape_to_string(tensor.shape()));
    }
    Tensor dst = tensor;
    auto src = it->second.values();
    std::copy(src.begin(), src.end(), dst.values().begin());
  }
}

Tensor style_loss(const Tensor& restored, const Tensor& truth,
                  const StyleFeatureExtractor& extractor) {
  if (restored.shape() != truth.shape()) {
    throw std::invalid_argument("style_loss: shape mismatch " +
                                shape_to_string(restored.shape()) + " vs " +
                                shape_to_string(truth.shape()));
  }
  const std::vector<Tensor> fr = extractor.features(restored);
  const std::vector<Tensor> ft = extractor.features(truth);
  std::vector<Tensor> terms;
  for (std::size_t i = 0; i < fr.size(); ++i) {
    terms.push_back(mean(abs(sub(gram(ft[i]), gram(fr[i])))));
  }
  return weighted_sum(terms, std::vector<Real>(terms.size(), Real(1)));
}

Tensor discriminator_loss_from_logits(const Tensor& real_logits, const Tensor& fake_logits) {
  // -log sigmoid(z) = softplus(-z), -log(1 - sigmoid(z)) = softplus(z)
  return add(mean(softplus(scale(real_logits, Real(-1)))), mean(softplus(fake_logits)));
}

Tensor generator_loss_from_logits(const Tensor& fake_logits) {
  return mean(softplus(scale(fake_logits, Real(-1))));
}

AdversarialLosses adv_losses(const Discriminator& disc, const Tensor& truth,
                             const Tensor& restored) {
  AdversarialLosses out;
  out.d_loss =
      discriminator_loss_from_logits(disc.forward(truth), disc.forward(restored.detach()));
  out.g_loss = generator_loss_from_logits(disc.forward(restored));
  return out;
}

Tensor total_loss(const LossBundle& parts, const LossWeights& weights) {
  std::vector<Tensor> terms{parts.rec, parts.adv, parts.style};
  std::vector<Real> w{static_cast<Real>(weights.rec), static_cast<Real>(weights.adv),
                      static_cast<Real>(weights.style)};
  if (parts.step.defined()) {
    terms.push_back(parts.step);
    w.push_back(static_cast<Real>(weights.step));
  }
  return weighted_sum(terms, w);
}

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
