#pragma once

#include <array>
#include <string>

#include "frrn/mask.hpp"
#include "frrn/pconv.hpp"

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

inline constexpr int kImageChannels = 3;

/// Channel widths of one block: the full-resolution branch width and the
/// three encoder widths of the low-resolution branch.
struct FrrbWidths {
  int full = 32;
  std::array<int, 3> low{64, 96, 128};

  friend bool operator==(const FrrbWidths&, const FrrbWidths&) = default;
};

/// 1x1 convolution mapping branch features back to image channels.
struct ProjectionHead {
  Tensor weight;  // [3, C, 1, 1]
  Tensor bias;    // [3]
};

/// Learnable weights of one full-resolution residual block.
///
/// full: three k=5 stride-1 partial convolutions (each dilates the valid set
///   by 2 px, 6 px in total) at input resolution.
/// down/up: three k=3 stride-2 partial convolutions followed by three k=3
///   stride-1 partial convolutions, each of the latter followed by nearest
///   x2 upsampling of features and mask. No skip connections.
struct FrrbParams {
  bool full_res_enabled = true;
  std::array<PConvLayer, 3> full;
  ProjectionHead full_head;
  std::array<PConvLayer, 3> down;
  std::array<PConvLayer, 3> up;
  ProjectionHead low_head;

  static FrrbParams create(const FrrbWidths& widths, bool full_res_enabled, Rng& rng);
  void collect_parameters(const std::string& prefix, ParameterSet& out) const;
};

struct BranchOutputs {
  Tensor full_residual;  // undefined when the full-resolution branch is off
  BinaryMask full_mask;
  Tensor low_residual;
  BinaryMask low_mask;
};

/// Runs both branches on (image, mask).
BranchOutputs frrb_branches(const Tensor& image, const BinaryMask& mask, const FrrbParams& params);

struct FrrbOutput {
  Tensor residual;        // R_i
  BinaryMask mask;        // M_i = M_if * M_il
  BinaryMask full_mask;   // M_if (empty when the branch is off)
  BinaryMask low_mask;    // M_il
};

struct FrrbResult {
  Tensor image;  // I_i
  FrrbOutput output;
};

/// One block:
///   M_i = M_if * M_il
///   R_i = (R_if * M_i + R_il * M_i) / 2       (R_il * M_i without the full branch)
///   I_i = I_{i-1} + R_i * (1 - M_0)
/// With `fill_uncovered`, the residual is not cropped by M_i so pixels still
/// outside M_i receive the raw branch average; the network uses this on its
/// last block when holes remain.
FrrbResult frrb_forward(const Tensor& previous, const BinaryMask& previous_mask,
                        const BinaryMask& original_mask, const FrrbParams& params,
                        bool fill_uncovered = false);

/// Throws unless the spatial extents are multiples of 8.
void require_multiple_of_eight(int height, int width);

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
