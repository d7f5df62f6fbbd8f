#include "frrn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

void clear_grads(const ParameterSet& params) {
  for (const auto& [name, tensor] : params) {
    Tensor t = tensor;
    t.clear_grad();
  }
}

void adam_step(const ParameterSet& params, AdamState& state) {
  for (const auto& [name, tensor] : params) {
    if (!tensor.has_grad()) {
      throw std::invalid_argument("adam_step: parameter '" + name + "' has no gradient");
    }
  }
  if (state.m_.empty()) {
    for (const auto& [name, tensor] : params) {
      state.m_.emplace_back(tensor.numel(), Real(0));
      state.v_.emplace_back(tensor.numel(), Real(0));
    }
  } else if (state.m_.size() != params.size()) {
    throw std::invalid_argument("adam_step: parameter set changed size between steps");
  }

  const AdamOptions& o = state.options_;
  state.t_ += 1;
  const double t = static_cast<double>(state.t_);
  const double correction1 = 1.0 - std::pow(o.beta1, t);
  const double correction2 = 1.0 - std::pow(o.beta2, t);
  const auto b1 = static_cast<Real>(o.beta1);
  const auto b2 = static_cast<Real>(o.beta2);

  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor t = params[p].second;
    auto& m = state.m_[p];
    auto& v = state.v_[p];
    if (m.size() != t.numel()) {
      throw std::invalid_argument("adam_step: parameter '" + params[p].first +
                                  "' changed shape between steps");
    }
    auto w = t.values();
    auto g = t.grad();
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = b1 * m[i] + (Real(1) - b1) * g[i];
      v[i] = b2 * v[i] + (Real(1) - b2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      w[i] -= static_cast<Real>(o.learning_rate * m_hat / (std::sqrt(v_hat) + o.epsilon));
    }
    t.clear_grad();
  }
}

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
