#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "frrn/adam.hpp"
#include "frrn/tensor.hpp"

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

/// Power-iteration state for one weight, viewed as a [rows, numel/rows]
/// matrix. u and v persist across training steps.
class SpectralNorm {
 public:
  SpectralNorm() = default;
  SpectralNorm(const Tensor& weight, std::uint64_t seed);

  /// v <- normalize(W^T u), u <- normalize(W v), `iterations` times.
  void power_iteration(const Tensor& weight, int iterations = 1);
  /// u^T W v.
  double sigma(const Tensor& weight) const;
  /// weight / sigma, differentiable w.r.t. weight.
  Tensor normalized(const Tensor& weight) const;

  const Tensor& u() const { return u_; }
  const Tensor& v() const { return v_; }
  Tensor& u() { return u_; }
  Tensor& v() { return v_; }

 private:
  Tensor u_;
  Tensor v_;
};

struct DiscriminatorConfig {
  /// Output channels of the five k=4 stride-2 convolutions; the last is the
  /// patch logit channel.
  std::array<int, 5> widths{64, 128, 256, 512, 1};
  Real slope = Real(0.2);

  friend bool operator==(const DiscriminatorConfig&, const DiscriminatorConfig&) = default;
};

/// Patch discriminator with spectrally normalized convolutions.
class Discriminator {
 public:
  struct Layer {
    Tensor weight;  // [Cout, Cin, 4, 4]
    Tensor bias;    // [Cout]
    SpectralNorm norm;
  };

  static Discriminator create(const DiscriminatorConfig& config, std::uint64_t seed);

  /// Patch logits of shape [B, 1, H/32, W/32].
  Tensor forward(const Tensor& image) const;
  /// One power iteration per layer (call once per training step).
  void spectral_norm_update(int iterations = 1);

  const DiscriminatorConfig& config() const { return config_; }
  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  /// Learnable weights, "disc.<i>.weight" / "disc.<i>.bias".
  ParameterSet parameters() const;
  /// Power-iteration vectors, "disc.<i>.sn_u" / "disc.<i>.sn_v".
  ParameterSet buffers() const;

 private:
  DiscriminatorConfig config_;
  std::vector<Layer> layers_;
};

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
