#pragma once

#include <string>
#include <utility>
#include <vector>

#include "frrn/tensor.hpp"

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

/// Named learnable tensors. Names are unique within a set and double as
/// checkpoint keys.
using ParameterSet = std::vector<std::pair<std::string, Tensor>>;

void clear_grads(const ParameterSet& params);

struct AdamOptions {
  double learning_rate = 1e-4;
  double beta1 = 0.0;
  double beta2 = 0.9;
  double epsilon = 1e-8;
};

/// Moment estimates for one parameter set.
class AdamState {
 public:
  explicit AdamState(AdamOptions options = {}) : options_(options) {}

  const AdamOptions& options() const { return options_; }
  AdamOptions& options() { return options_; }
  long step_count() const { return t_; }
  const std::vector<Real>& first_moment(std::size_t i) const { return m_.at(i); }
  const std::vector<Real>& second_moment(std::size_t i) const { return v_.at(i); }

 private:
  AdamOptions options_;
  long t_ = 0;
  std::vector<std::vector<Real>> m_;
  std::vector<std::vector<Real>> v_;

  friend void adam_step(const ParameterSet& params, AdamState& state);
};

/// Bias-corrected Adam update applied in place; gradients are cleared
/// afterwards. Every parameter must carry a gradient.
void adam_step(const ParameterSet& params, AdamState& state);

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
