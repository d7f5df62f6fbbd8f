#include "frrn/network.hpp"

#include <stdexcept>
#include <string>

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

void FrrnConfig::validate() const {
  if (blocks_per_dilation < 1) {
    throw std::invalid_argument("blocks_per_dilation must be >= 1");
  }
  if (num_dilation_modules < 1) {
    throw std::invalid_argument("num_dilation_modules must be >= 1");
  }
  if (widths.full < 1 || widths.low[0] < 1 || widths.low[1] < 1 || widths.low[2] < 1) {
    throw std::invalid_argument("branch widths must be positive");
  }
}

FrrnParams FrrnParams::create(const FrrnConfig& config, std::uint64_t seed) {
  config.validate();
  FrrnParams p;
  p.config = config;
  Rng rng(seed);
  p.modules.resize(static_cast<std::size_t>(config.num_dilation_modules));
  for (auto& module : p.modules) {
    for (int b = 0; b < config.blocks_per_dilation; ++b) {
      module.push_back(FrrbParams::create(config.widths, config.full_res_enabled, rng));
    }
  }
  return p;
}

ParameterSet FrrnParams::parameters() const {
  ParameterSet out;
  for (std::size_t m = 0; m < modules.size(); ++m) {
    for (std::size_t b = 0; b < modules[m].size(); ++b) {
      modules[m][b].collect_parameters(
          "gen.m" + std::to_string(m) + ".b" + std::to_string(b), out);
    }
  }
  return out;
}

ModuleResult dilation_module_forward(const Tensor& previous, const BinaryMask& previous_mask,
                                     const BinaryMask& original_mask,
                                     std::span<const FrrbParams> blocks,
                                     bool fill_uncovered_last) {
  if (blocks.empty()) {
    throw std::invalid_argument("dilation module needs at least one block");
  }
  ModuleResult result;
  Tensor image = previous;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const bool last = b + 1 == blocks.size();
    FrrbResult r = frrb_forward(image, previous_mask, original_mask, blocks[b],
                                last && fill_uncovered_last);
    image = r.image;
    if (last) {
      result.mask = r.output.mask;
    }
    result.blocks.push_back(std::move(r.output));
  }
  result.image = image;
  return result;
}

InpaintTrajectory frrn_forward(const Tensor& damaged, const BinaryMask& original_mask,
                               const FrrnParams& params) {
  const Dims4 d = dims4(damaged, "frrn input");
  require_multiple_of_eight(d.h, d.w);
  InpaintTrajectory traj;
  Tensor image = damaged;
  BinaryMask mask = original_mask;
  for (std::size_t m = 0; m < params.modules.size(); ++m) {
    const bool last = m + 1 == params.modules.size();
    ModuleResult r = dilation_module_forward(image, mask, original_mask, params.modules[m],
                                             last && params.config.fill_remaining_holes);
    image = r.image;
    mask = std::move(r.mask);
    traj.steps.push_back({image, mask});
  }
  traj.unfilled_pixels = mask.hole_count();
  return traj;
}

int required_modules(const BinaryMask& mask) {
  const HoleGeometry g = hole_geometry(mask);
  return (g.max_inradius + kDilationPerModule - 1) / kDilationPerModule;
}

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
