#pragma once

#include <span>
#include <vector>

#include "frrn/tensor.hpp"

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

// Elementwise arithmetic on same-shape tensors.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, Real factor);
Tensor abs(const Tensor& a);

// Reductions to a scalar.
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

Tensor leaky_relu(const Tensor& x, Real slope);
/// log(1 + exp(x)), evaluated without overflow.
Tensor softplus(const Tensor& x);

/// Cross-correlation with zero padding. `bias` may be undefined.
/// weight is [Cout, Cin, k, k].
Tensor conv2d(const Tensor& input, const Tensor& weight, const Tensor& bias, int stride,
              int padding);

/// Replicates every pixel into a factor x factor block.
Tensor upsample_nearest(const Tensor& x, int factor);

/// Normalizes each (batch, channel) plane to zero mean and unit (biased)
/// variance, then applies the per-channel affine transform.
Tensor instance_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, Real epsilon);

/// x * m with m of shape [B,1,H,W] broadcast over channels. m is treated as a
/// constant.
Tensor mask_multiply(const Tensor& x, const Tensor& m);

/// base + residual at positions where `holes` (shape [B,1,H,W], constant) is
/// nonzero; base copied unchanged elsewhere, whatever residual holds there.
Tensor masked_residual_add(const Tensor& base, const Tensor& residual, const Tensor& holes);

/// Per-sample Gram matrix F F^T / (C H W) of the C x HW flattening; output
/// shape [B, C, C].
Tensor gram(const Tensor& features);

/// weight / sigma with sigma = u^T W v, where W is the weight viewed as a
/// [rows, numel/rows] matrix. u and v are constants. Falls back to the
/// identity when sigma is not positive (an all-zero weight).
Tensor spectral_normalize(const Tensor& weight, std::span<const Real> u, std::span<const Real> v);

/// Sum of a list of scalars weighted by `weights`.
Tensor weighted_sum(const std::vector<Tensor>& scalars, const std::vector<Real>& weights);

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
