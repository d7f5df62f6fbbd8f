#include "frrn/frrb.hpp"

#include <stdexcept>

#include "frrn/init.hpp"
#include "frrn/ops.hpp"

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

namespace {

ProjectionHead make_head(int in_channels, Rng& rng) {
  return {glorot_uniform({kImageChannels, in_channels, 1, 1}, rng),
          Tensor({kImageChannels}, Real(0), true)};
}

Tensor project(const Tensor& features, const ProjectionHead& head) {
  return conv2d(features, head.weight, head.bias, 1, 0);
}

}  // namespace

void require_multiple_of_eight(int height, int width) {
  if (height % 8 != 0 || width % 8 != 0 || height <= 0 || width <= 0) {
    const int ph = (8 - height % 8) % 8;
    const int pw = (8 - width % 8) % 8;
    throw std::invalid_argument("input " + std::to_string(height) + "x" + std::to_string(width) +
                                " is not a multiple of 8; pad by " + std::to_string(ph) +
                                " rows and " + std::to_string(pw) + " columns");
  }
}

FrrbParams FrrbParams::create(const FrrbWidths& widths, bool full_res_enabled, Rng& rng) {
  FrrbParams p;
  p.full_res_enabled = full_res_enabled;
  if (full_res_enabled) {
    int in = kImageChannels;
    for (auto& layer : p.full) {
      layer = PConvLayer::create(in, widths.full, 5, 1, rng);
      in = widths.full;
    }
    p.full_head = make_head(widths.full, rng);
  }
  const auto& w = widths.low;
  p.down[0] = PConvLayer::create(kImageChannels, w[0], 3, 2, rng);
  p.down[1] = PConvLayer::create(w[0], w[1], 3, 2, rng);
  p.down[2] = PConvLayer::create(w[1], w[2], 3, 2, rng);
  p.up[0] = PConvLayer::create(w[2], w[1], 3, 1, rng);
  p.up[1] = PConvLayer::create(w[1], w[0], 3, 1, rng);
  p.up[2] = PConvLayer::create(w[0], w[0], 3, 1, rng);
  p.low_head = make_head(w[0], rng);
  return p;
}

void FrrbParams::collect_parameters(const std::string& prefix, ParameterSet& out) const {
  if (full_res_enabled) {
    for (std::size_t i = 0; i < full.size(); ++i) {
      full[i].collect_parameters(prefix + ".full." + std::to_string(i), out);
    }
    out.emplace_back(prefix + ".full.head.weight", full_head.weight);
    out.emplace_back(prefix + ".full.head.bias", full_head.bias);
  }
  for (std::size_t i = 0; i < down.size(); ++i) {
    down[i].collect_parameters(prefix + ".down." + std::to_string(i), out);
  }
  for (std::size_t i = 0; i < up.size(); ++i) {
    up[i].collect_parameters(prefix + ".up." + std::to_string(i), out);
  }
  out.emplace_back(prefix + ".low.head.weight", low_head.weight);
  out.emplace_back(prefix + ".low.head.bias", low_head.bias);
}

BranchOutputs frrb_branches(const Tensor& image, const BinaryMask& mask, const FrrbParams& params) {
  const Dims4 d = dims4(image, "frrb input");
  require_multiple_of_eight(d.h, d.w);
  if (d.c != kImageChannels) {
    throw std::invalid_argument("frrb input must have 3 channels, got " +
                                shape_to_string(image.shape()));
  }

  BranchOutputs out;
  if (params.full_res_enabled) {
    PConvOutput s{image, mask};
    for (const auto& layer : params.full) {
      s = pconv_forward(s.features, s.mask, layer);
    }
    out.full_residual = project(s.features, params.full_head);
    out.full_mask = std::move(s.mask);
  }

  PConvOutput s{image, mask};
  for (const auto& layer : params.down) {
    s = pconv_forward(s.features, s.mask, layer);
  }
  for (const auto& layer : params.up) {
    s = pconv_forward(s.features, s.mask, layer);
    s.features = upsample_nearest(s.features, 2);
    s.mask = mask_upsample(s.mask, 2);
  }
  out.low_residual = project(s.features, params.low_head);
  out.low_mask = std::move(s.mask);
  return out;
}

FrrbResult frrb_forward(const Tensor& previous, const BinaryMask& previous_mask,
                        const BinaryMask& original_mask, const FrrbParams& params,
                        bool fill_uncovered) {
  const Dims4 d = dims4(previous, "frrb input");
  if (original_mask.batch() != d.n || original_mask.height() != d.h ||
      original_mask.width() != d.w) {
    throw std::invalid_argument("frrb: original mask is not aligned with the image");
  }
  BranchOutputs branches = frrb_branches(previous, previous_mask, params);

  FrrbResult result;
  FrrbOutput& o = result.output;
  o.low_mask = std::move(branches.low_mask);
  if (params.full_res_enabled) {
    o.full_mask = std::move(branches.full_mask);
    o.mask = intersect(o.full_mask, o.low_mask);
  } else {
    o.mask = o.low_mask;
  }

  const Tensor support =
      fill_uncovered ? BinaryMask(d.n, d.h, d.w, true).valid_tensor() : o.mask.valid_tensor();
  if (params.full_res_enabled) {
    o.residual = scale(add(mask_multiply(branches.full_residual, support),
                           mask_multiply(branches.low_residual, support)),
                       Real(0.5));
  } else {
    o.residual = mask_multiply(branches.low_residual, support);
  }
  result.image = masked_residual_add(previous, o.residual, original_mask.hole_tensor());
  return result;
}

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
