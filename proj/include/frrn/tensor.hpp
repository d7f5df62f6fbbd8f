#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "frrn/config.hpp"

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

using Shape = std::vector<int>;

std::size_t shape_numel(const Shape& shape);
std::string shape_to_string(const Shape& shape);

struct TensorImpl {
  Shape shape;
  std::vector<Real> data;
  // Empty until the first gradient contribution arrives.
  std::vector<Real> grad;
  bool requires_grad = false;
};

/// Shared handle to a dense row-major array. Copies alias the same storage;
/// use clone() or detach() for an independent copy.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, Real fill = 0, bool requires_grad = false);
  Tensor(Shape shape, std::vector<Real> values, bool requires_grad = false);

  static Tensor scalar(Real value);

  bool defined() const { return impl_ != nullptr; }
  const Shape& shape() const { return impl_->shape; }
  int rank() const { return static_cast<int>(impl_->shape.size()); }
  int dim(int axis) const { return impl_->shape.at(static_cast<std::size_t>(axis)); }
  std::size_t numel() const { return impl_->data.size(); }
  bool is_scalar() const { return impl_->data.size() == 1; }

  std::span<Real> values() { return impl_->data; }
  std::span<const Real> values() const { return impl_->data; }
  Real item() const;

  /// Element access for rank-4 tensors.
  Real at(int n, int c, int y, int x) const;
  Real& at(int n, int c, int y, int x);

  bool requires_grad() const { return impl_->requires_grad; }
  void set_requires_grad(bool flag);
  bool has_grad() const { return !impl_->grad.empty(); }
  std::span<const Real> grad() const { return impl_->grad; }
  /// Gradient buffer, zero-allocated on first use. Only valid when
  /// requires_grad() is true.
  std::span<Real> grad_accumulator() const;
  void clear_grad() const;

  /// Independent copy of the values that is never recorded on a tape.
  Tensor detach() const;
  /// Independent copy that keeps the requires_grad flag (gradient dropped).
  Tensor clone() const;

  bool same_storage(const Tensor& other) const { return impl_ == other.impl_; }
  const std::shared_ptr<TensorImpl>& impl() const { return impl_; }

 private:
  std::shared_ptr<TensorImpl> impl_;
};

/// Ordered record of differentiable operations. Records are appended as
/// operations execute, so the list is already in topological order and
/// backward() walks it once in reverse.
class Tape {
 public:
  using BackwardFn = std::function<void(std::span<const Real> grad_output)>;

  void record(std::string_view op, const Tensor& output, std::vector<Tensor> inputs,
              BackwardFn fn);
  std::size_t size() const { return records_.size(); }
  bool produced(const Tensor& t) const;
  void clear() { records_.clear(); }

 private:
  struct Record {
    std::string op;
    Tensor output;
    std::vector<Tensor> inputs;
    BackwardFn backward;
  };
  std::vector<Record> records_;

  friend void backward(const Tensor& loss, Tape& tape);
};

/// Makes `tape` the recording target of the current thread for the lifetime
/// of the scope. Scopes nest; passing nullptr disables recording.
class TapeScope {
 public:
  explicit TapeScope(Tape* tape);
  explicit TapeScope(Tape& tape) : TapeScope(&tape) {}
  ~TapeScope();
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape* previous_;
};

Tape* active_tape();

/// Reverse-mode sweep from a scalar loss. Leaf gradients accumulate across
/// calls; intermediate gradients on the tape are reset first.
void backward(const Tensor& loss, Tape& tape);

/// True when an operation over `inputs` has to be recorded.
bool should_record(std::span<const Tensor> inputs);

/// Registers `output` as produced from `inputs` when recording is required
/// and returns it. `fn` receives the gradient w.r.t. the output and must only
/// accumulate into inputs whose requires_grad() is true.
Tensor finish_op(std::string_view op, Tensor output, std::vector<Tensor> inputs,
                 Tape::BackwardFn fn);

/// Spatial dimensions of a rank-4 (batch, channel, height, width) tensor.
struct Dims4 {
  int n;
  int c;
  int h;
  int w;
  std::size_t plane() const { return static_cast<std::size_t>(h) * static_cast<std::size_t>(w); }
};

Dims4 dims4(const Tensor& t, std::string_view what);

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
