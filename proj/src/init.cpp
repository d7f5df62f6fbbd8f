#include "frrn/init.hpp"

#include <cmath>
#include <stdexcept>

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

Tensor glorot_uniform(const Shape& kernel_shape, Rng& rng) {
  if (kernel_shape.size() != 4) {
    throw std::invalid_argument("glorot_uniform expects a rank-4 kernel shape, got " +
                                shape_to_string(kernel_shape));
  }
  const double receptive = static_cast<double>(kernel_shape[2]) * kernel_shape[3];
  const double fan_in = kernel_shape[1] * receptive;
  const double fan_out = kernel_shape[0] * receptive;
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  Tensor t(kernel_shape, Real(0), true);
  for (Real& v : t.values()) {
    v = static_cast<Real>(rng.uniform(-limit, limit));
  }
  return t;
}

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
