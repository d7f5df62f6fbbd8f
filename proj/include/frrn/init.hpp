#pragma once

#include "frrn/rng.hpp"
#include "frrn/tensor.hpp"

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

/// Uniform in +-sqrt(6 / (fan_in + fan_out)) for a [Cout, Cin, k, k] kernel.
Tensor glorot_uniform(const Shape& kernel_shape, Rng& rng);

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
