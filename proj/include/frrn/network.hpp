#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "frrn/frrb.hpp"

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

/// Pixels of hole inradius closed by one dilation module (one FRRB mask
/// update: three k=5 layers at 2 px each).
inline constexpr int kDilationPerModule = 6;

struct FrrnConfig {
  int blocks_per_dilation = 2;
  int num_dilation_modules = 8;
  FrrbWidths widths;
  bool use_step_loss = true;
  bool full_res_enabled = true;
  /// The last block leaves its residual uncropped so pixels deeper than the
  /// network can reach are still filled.
  bool fill_remaining_holes = true;

  int total_blocks() const { return blocks_per_dilation * num_dilation_modules; }
  void validate() const;

  friend bool operator==(const FrrnConfig&, const FrrnConfig&) = default;
};

/// Independent weights for every block of every dilation module.
struct FrrnParams {
  FrrnConfig config;
  std::vector<std::vector<FrrbParams>> modules;

  static FrrnParams create(const FrrnConfig& config, std::uint64_t seed);
  /// Names follow "gen.m<module>.b<block>.<layer>...".
  ParameterSet parameters() const;
};

struct TrajectoryStep {
  Tensor image;     // I_i
  BinaryMask mask;  // M_i
};

/// Output of every dilation module, in order.
struct InpaintTrajectory {
  std::vector<TrajectoryStep> steps;
  /// Hole pixels left in the final mask; nonzero means the final image holds
  /// values from an uncropped residual there.
  std::size_t unfilled_pixels = 0;

  const Tensor& final_image() const { return steps.back().image; }
  const BinaryMask& final_mask() const { return steps.back().mask; }
};

struct ModuleResult {
  Tensor image;
  BinaryMask mask;
  std::vector<FrrbOutput> blocks;
};

/// N blocks, one dilation: every block reads `previous_mask`; only the last
/// block's updated mask is kept. Each block adds its residual inside the
/// original hole.
ModuleResult dilation_module_forward(const Tensor& previous, const BinaryMask& previous_mask,
                                     const BinaryMask& original_mask,
                                     std::span<const FrrbParams> blocks,
                                     bool fill_uncovered_last = false);

InpaintTrajectory frrn_forward(const Tensor& damaged, const BinaryMask& original_mask,
                               const FrrnParams& params);

/// Dilation modules needed to close every hole: ceil(max_inradius / 6).
int required_modules(const BinaryMask& mask);

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
