#include "frrn/tensor.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

namespace {
thread_local Tape* g_active_tape = nullptr;
}

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (int extent : shape) {
    if (extent < 0) {
      throw std::invalid_argument("negative extent in shape " + shape_to_string(shape));
    }
    n *= static_cast<std::size_t>(extent);
  }
  return n;
}

std::string shape_to_string(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    out << (i ? "," : "") << shape[i];
  }
  out << ']';
  return out.str();
}

Tensor::Tensor(Shape shape, Real fill, bool requires_grad)
    : impl_(std::make_shared<TensorImpl>()) {
  impl_->data.assign(shape_numel(shape), fill);
  impl_->shape = std::move(shape);
  impl_->requires_grad = requires_grad;
}

Tensor::Tensor(Shape shape, std::vector<Real> values, bool requires_grad)
    : impl_(std::make_shared<TensorImpl>()) {
  if (values.size() != shape_numel(shape)) {
    throw std::invalid_argument("tensor of shape " + shape_to_string(shape) + " needs " +
                                std::to_string(shape_numel(shape)) + " values, got " +
                                std::to_string(values.size()));
  }
  impl_->shape = std::move(shape);
  impl_->data = std::move(values);
  impl_->requires_grad = requires_grad;
}

Tensor Tensor::scalar(Real value) { return Tensor(Shape{}, value); }

Real Tensor::item() const {
  if (!is_scalar()) {
    throw std::logic_error("item() on tensor of shape " + shape_to_string(shape()));
  }
  return impl_->data[0];
}

Real Tensor::at(int n, int c, int y, int x) const {
  const auto& s = impl_->shape;
  return impl_->data[((static_cast<std::size_t>(n) * s[1] + c) * s[2] + y) * s[3] + x];
}

Real& Tensor::at(int n, int c, int y, int x) {
  const auto& s = impl_->shape;
  return impl_->data[((static_cast<std::size_t>(n) * s[1] + c) * s[2] + y) * s[3] + x];
}

void Tensor::set_requires_grad(bool flag) {
  impl_->requires_grad = flag;
  if (!flag) {
    impl_->grad.clear();
  }
}

std::span<Real> Tensor::grad_accumulator() const {
  if (!impl_->requires_grad) {
    throw std::logic_error("gradient requested for a tensor that does not require grad");
  }
  if (impl_->grad.empty()) {
    impl_->grad.assign(impl_->data.size(), Real(0));
  }
  return impl_->grad;
}

void Tensor::clear_grad() const { impl_->grad.clear(); }

Tensor Tensor::detach() const { return Tensor(impl_->shape, impl_->data, false); }

Tensor Tensor::clone() const { return Tensor(impl_->shape, impl_->data, impl_->requires_grad); }

void Tape::record(std::string_view op, const Tensor& output, std::vector<Tensor> inputs,
                  BackwardFn fn) {
  records_.push_back(Record{std::string(op), output, std::move(inputs), std::move(fn)});
}

bool Tape::produced(const Tensor& t) const {
  return std::any_of(records_.begin(), records_.end(),
                     [&](const Record& r) { return r.output.same_storage(t); });
}

TapeScope::TapeScope(Tape* tape) : previous_(g_active_tape) { g_active_tape = tape; }

TapeScope::~TapeScope() { g_active_tape = previous_; }

Tape* active_tape() { return g_active_tape; }

void backward(const Tensor& loss, Tape& tape) {
  if (!loss.defined() || !loss.is_scalar()) {
    throw std::invalid_argument("backward needs a scalar loss, got shape " +
                                (loss.defined() ? shape_to_string(loss.shape()) : "<undefined>"));
  }
  if (!tape.produced(loss)) {
    throw std::invalid_argument("loss was not produced on this tape");
  }
  for (auto& r : tape.records_) {
    r.output.clear_grad();
  }
  Tensor root = loss;
  root.grad_accumulator()[0] = Real(1);
  for (auto it = tape.records_.rbegin(); it != tape.records_.rend(); ++it) {
    if (it->output.has_grad()) {
      it->backward(it->output.grad());
    }
  }
}

bool should_record(std::span<const Tensor> inputs) {
  if (g_active_tape == nullptr) {
    return false;
  }
  return std::any_of(inputs.begin(), inputs.end(),
                     [](const Tensor& t) { return t.defined() && t.requires_grad(); });
}

Tensor finish_op(std::string_view op, Tensor output, std::vector<Tensor> inputs,
                 Tape::BackwardFn fn) {
  if (should_record(inputs)) {
    output.set_requires_grad(true);
    g_active_tape->record(op, output, std::move(inputs), std::move(fn));
  }
  return output;
}

Dims4 dims4(const Tensor& t, std::string_view what) {
  if (!t.defined() || t.rank() != 4) {
    throw std::invalid_argument(std::string(what) + " must be rank-4 (batch, channel, height, " +
                                "width), got " +
                                (t.defined() ? shape_to_string(t.shape()) : "<undefined>"));
  }
  return Dims4{t.dim(0), t.dim(1), t.dim(2), t.dim(3)};
}

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
