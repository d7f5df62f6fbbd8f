#pragma once

#include <string>

#include "frrn/adam.hpp"
#include "frrn/mask.hpp"
#include "frrn/rng.hpp"
#include "frrn/tensor.hpp"

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

struct PConvOptions {
  bool instance_norm = true;
  bool activation = true;
  Real slope = Real(0.2);
  Real norm_epsilon = Real(1e-5);
};

/// Partial convolution with its optional instance norm and leaky activation.
/// The mask path depends only on kernel size, stride and padding.
struct PConvLayer {
  Tensor weight;  // [Cout, Cin, k, k]
  Tensor bias;    // [Cout]
  Tensor gamma;   // [Cout], undefined without instance norm
  Tensor beta;    // [Cout], undefined without instance norm
  int stride = 1;
  int padding = 0;
  bool activation = true;
  Real slope = Real(0.2);
  Real norm_epsilon = Real(1e-5);

  /// Kernel size must be 3 or 5; padding is k / 2.
  static PConvLayer create(int in_channels, int out_channels, int kernel, int stride, Rng& rng,
                           const PConvOptions& options = {});

  int kernel() const { return weight.dim(2); }
  int in_channels() const { return weight.dim(1); }
  int out_channels() const { return weight.dim(0); }
  bool has_instance_norm() const { return gamma.defined(); }

  void collect_parameters(const std::string& prefix, ParameterSet& out) const;
};

struct PConvOutput {
  Tensor features;
  BinaryMask mask;
};

/// Convolution over valid pixels only:
///   out = W . (x * m) * (area / valid_count) + b   where valid_count > 0
///   out = 0                                        elsewhere
/// valid_count counts mask pixels in the window and is shared by all input
/// channels; area counts in-image pixels under the window (k*k away from the
/// border). No normalization or activation is applied.
Tensor partial_conv(const Tensor& x, const BinaryMask& mask, const Tensor& weight,
                    const Tensor& bias, int stride, int padding);

/// partial_conv followed by the layer's instance norm and activation, plus
/// the updated mask.
PConvOutput pconv_forward(const Tensor& x, const BinaryMask& mask, const PConvLayer& layer);

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
