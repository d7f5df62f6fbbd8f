#include "frrn/discriminator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "frrn/init.hpp"
#include "frrn/ops.hpp"
#include "frrn/rng.hpp"

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

namespace {

constexpr int kKernel = 4;

struct MatrixView {
  std::size_t rows;
  std::size_t cols;
};

MatrixView as_matrix(const Tensor& w) {
  if (w.rank() < 1 || w.dim(0) < 1) {
    throw std::invalid_argument("spectral norm: weight must have a leading dimension");
  }
  const auto rows = static_cast<std::size_t>(w.dim(0));
  return {rows, w.numel() / rows};
}

// Writes x / |x| into `out`; leaves `out` unchanged when x vanishes.
void normalize_into(std::vector<double>& x, std::span<Real> out) {
  double norm = 0;
  for (double e : x) {
    norm += e * e;
  }
  norm = std::sqrt(norm);
  if (!(norm > 1e-30)) {
    return;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = static_cast<Real>(x[i] / norm);
  }
}

}  // namespace

SpectralNorm::SpectralNorm(const Tensor& weight, std::uint64_t seed) {
  const MatrixView m = as_matrix(weight);
  Rng rng(seed);
  std::vector<double> u(m.rows);
  for (double& e : u) {
    e = rng.normal();
  }
  u_ = Tensor({static_cast<int>(m.rows)}, Real(0));
  v_ = Tensor({static_cast<int>(m.cols)}, Real(0));
  u_.values()[0] = Real(1);
  v_.values()[0] = Real(1);
  normalize_into(u, u_.values());
  // v starts as normalize(W^T u) so sigma() is meaningful before any update
  std::vector<double> v(m.cols, 0.0);
  auto w = weight.values();
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) {
      v[c] += static_cast<double>(w[r * m.cols + c]) * u_.values()[r];
    }
  }
  normalize_into(v, v_.values());
}

void SpectralNorm::power_iteration(const Tensor& weight, int iterations) {
  const MatrixView m = as_matrix(weight);
  if (u_.numel() != m.rows || v_.numel() != m.cols) {
    throw std::invalid_argument("spectral norm: state does not match weight " +
                                shape_to_string(weight.shape()));
  }
  auto w = weight.values();
  std::vector<double> v(m.cols);
  std::vector<double> u(m.rows);
  for (int it = 0; it < iterations; ++it) {
    std::fill(v.begin(), v.end(), 0.0);
    auto us = u_.values();
    for (std::size_t r = 0; r < m.rows; ++r) {
      for (std::size_t c = 0; c < m.cols; ++c) {
        v[c] += static_cast<double>(w[r * m.cols + c]) * us[r];
      }
    }
    normalize_into(v, v_.values());
    auto vs = v_.values();
    for (std::size_t r = 0; r < m.rows; ++r) {
      double acc = 0;
      for (std::size_t c = 0; c < m.cols; ++c) {
        acc += static_cast<double>(w[r * m.cols + c]) * vs[c];
      }
      u[r] = acc;
    }
    normalize_into(u, u_.values());
  }
}

double SpectralNorm::sigma(const Tensor& weight) const {
  const MatrixView m = as_matrix(weight);
  auto w = weight.values();
  auto us = u_.values();
  auto vs = v_.values();
  double s = 0;
  for (std::size_t r = 0; r < m.rows; ++r) {
    double acc = 0;
    for (std::size_t c = 0; c < m.cols; ++c) {
      acc += static_cast<double>(w[r * m.cols + c]) * vs[c];
    }
    s += us[r] * acc;
  }
  return s;
}

Tensor SpectralNorm::normalized(const Tensor& weight) const {
  return spectral_normalize(weight, u_.values(), v_.values());
}

Discriminator Discriminator::create(const DiscriminatorConfig& config, std::uint64_t seed) {
  Discriminator d;
  d.config_ = config;
  Rng rng(seed);
  int in = 3;
  for (std::size_t i = 0; i < config.widths.size(); ++i) {
    const int out = config.widths[i];
    if (out < 1) {
      throw std::invalid_argument("discriminator widths must be positive");
    }
    Layer layer;
    layer.weight = glorot_uniform({out, in, kKernel, kKernel}, rng);
    layer.bias = Tensor({out}, Real(0), true);
    layer.norm = SpectralNorm(layer.weight, rng.next_u64());
    d.layers_.push_back(std::move(layer));
    in = out;
  }
  return d;
}

Tensor Discriminator::forward(const Tensor& image) const {
  Tensor x = image;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& l = layers_[i];
    x = conv2d(x, l.norm.normalized(l.weight), l.bias, 2, 1);
    if (i + 1 < layers_.size()) {
      x = leaky_relu(x, config_.slope);
    }
  }
  return x;
}

void Discriminator::spectral_norm_update(int iterations) {
  for (auto& l : layers_) {
    l.norm.power_iteration(l.weight, iterations);
  }
}

ParameterSet Discriminator::parameters() const {
  ParameterSet out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    out.emplace_back("disc." + std::to_string(i) + ".weight", layers_[i].weight);
    out.emplace_back("disc." + std::to_string(i) + ".bias", layers_[i].bias);
  }
  return out;
}

ParameterSet Discriminator::buffers() const {
  ParameterSet out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    out.emplace_back("disc." + std::to_string(i) + ".sn_u", layers_[i].norm.u());
    out.emplace_back("disc." + std::to_string(i) + ".sn_v", layers_[i].norm.v());
  }
  return out;
}

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
