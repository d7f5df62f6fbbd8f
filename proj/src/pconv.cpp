#include "frrn/pconv.hpp"

#include <stdexcept>

#include "frrn/init.hpp"
#include "frrn/ops.hpp"

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

namespace {

// Scales each window response by window_area / valid_count and adds the
// bias; zero where the window held no valid pixel. window_area is the number
// of in-image pixels under the window (k*k away from the border), so padding
// is neither valid nor hole for the renormalization.
Tensor renormalize(const Tensor& response, const std::vector<int>& counts,
                   const std::vector<int>& areas, const Tensor& bias) {
  const Dims4 d = dims4(response, "partial_conv response");
  const std::size_t plane = d.plane();
  std::vector<Real> ratio(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    ratio[i] = counts[i] > 0 ? static_cast<Real>(areas[i]) / static_cast<Real>(counts[i])
                             : Real(0);
  }
  Tensor out(response.shape());
  auto ys = response.values();
  auto os = out.values();
  for (int b = 0; b < d.n; ++b) {
    const Real* r = ratio.data() + b * plane;
    for (int c = 0; c < d.c; ++c) {
      const Real bc = bias.defined() ? bias.values()[c] : Real(0);
      const std::size_t off = (static_cast<std::size_t>(b) * d.c + c) * plane;
      for (std::size_t i = 0; i < plane; ++i) {
        os[off + i] = r[i] > 0 ? ys[off + i] * r[i] + bc : Real(0);
      }
    }
  }
  return finish_op("pconv_renormalize", out, {response, bias},
                   [response, bias, ratio = std::move(ratio), d,
                    plane](std::span<const Real> g) mutable {
                     for (int b = 0; b < d.n; ++b) {
                       const Real* r = ratio.data() + b * plane;
                       for (int c = 0; c < d.c; ++c) {
                         const std::size_t off = (static_cast<std::size_t>(b) * d.c + c) * plane;
                         if (response.requires_grad()) {
                           Real* gy = response.grad_accumulator().data() + off;
                           for (std::size_t i = 0; i < plane; ++i) {
                             gy[i] += g[off + i] * r[i];
                           }
                         }
                         if (bias.defined() && bias.requires_grad()) {
                           Real acc = 0;
                           for (std::size_t i = 0; i < plane; ++i) {
                             if (r[i] > 0) {
                               acc += g[off + i];
                             }
                           }
                           bias.grad_accumulator()[c] += acc;
                         }
                       }
                     }
                   });
}

}  // namespace

PConvLayer PConvLayer::create(int in_channels, int out_channels, int kernel, int stride, Rng& rng,
                              const PConvOptions& options) {
  if (kernel != 3 && kernel != 5) {
    throw std::invalid_argument("PConvLayer: kernel size must be 3 or 5, got " +
                                std::to_string(kernel));
  }
  if (in_channels < 1 || out_channels < 1 || stride < 1) {
    throw std::invalid_argument("PConvLayer: channels and stride must be positive");
  }
  PConvLayer layer;
  layer.weight = glorot_uniform({out_channels, in_channels, kernel, kernel}, rng);
  layer.bias = Tensor({out_channels}, Real(0), true);
  if (options.instance_norm) {
    layer.gamma = Tensor({out_channels}, Real(1), true);
    layer.beta = Tensor({out_channels}, Real(0), true);
  }
  layer.stride = stride;
  layer.padding = kernel / 2;
  layer.activation = options.activation;
  layer.slope = options.slope;
  layer.norm_epsilon = options.norm_epsilon;
  return layer;
}

void PConvLayer::collect_parameters(const std::string& prefix, ParameterSet& out) const {
  out.emplace_back(prefix + ".weight", weight);
  out.emplace_back(prefix + ".bias", bias);
  if (has_instance_norm()) {
    out.emplace_back(prefix + ".norm.gamma", gamma);
    out.emplace_back(prefix + ".norm.beta", beta);
  }
}

Tensor partial_conv(const Tensor& x, const BinaryMask& mask, const Tensor& weight,
                    const Tensor& bias, int stride, int padding) {
  const Dims4 d = dims4(x, "partial_conv input");
  if (mask.batch() != d.n || mask.height() != d.h || mask.width() != d.w) {
    throw std::invalid_argument(
        "partial_conv: mask [" + std::to_string(mask.batch()) + ",1," +
        std::to_string(mask.height()) + "," + std::to_string(mask.width()) +
        "] is not aligned with input " + shape_to_string(x.shape()));
  }
  const int k = dims4(weight, "partial_conv weight").h;
  const Tensor masked = mask_multiply(x, mask.valid_tensor());
  const Tensor response = conv2d(masked, weight, Tensor(), stride, padding);
  const BinaryMask full(1, d.h, d.w, true);
  const std::vector<int> plane_areas = window_valid_counts(full, k, stride, padding);
  std::vector<int> areas;
  areas.reserve(plane_areas.size() * static_cast<std::size_t>(d.n));
  for (int b = 0; b < d.n; ++b) {
    areas.insert(areas.end(), plane_areas.begin(), plane_areas.end());
  }
  return renormalize(response, window_valid_counts(mask, k, stride, padding), areas, bias);
}

PConvOutput pconv_forward(const Tensor& x, const BinaryMask& mask, const PConvLayer& layer) {
  Tensor y = partial_conv(x, mask, layer.weight, layer.bias, layer.stride, layer.padding);
  if (layer.has_instance_norm()) {
    y = instance_norm(y, layer.gamma, layer.beta, layer.norm_epsilon);
  }
  if (layer.activation) {
    y = leaky_relu(y, layer.slope);
  }
  return {y, mask_update(mask, layer.kernel(), layer.stride, layer.padding)};
}

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
