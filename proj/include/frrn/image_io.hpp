#pragma once

#include <filesystem>
#include <vector>

#include "frrn/mask.hpp"
#include "frrn/tensor.hpp"

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

/// Loads a PNG/PGM/PPM as a [1,3,H,W] tensor in [0,1]. Grayscale input is
/// replicated to three channels. When height and width are positive the
/// image is bilinearly resized to that resolution.
Tensor load_image(const std::filesystem::path& path, int height = 0, int width = 0);

/// Loads a single-channel mask: pixels > 127 are valid. Colour masks are
/// converted to gray first. Resizing, when requested, is nearest-neighbour
/// after thresholding.
BinaryMask load_mask(const std::filesystem::path& path, int height = 0, int width = 0);

/// Writes batch item `index` of a [B,3,H,W] tensor as an 8-bit image
/// (values clamped to [0,1], rounded). Format follows the extension.
void save_image(const Tensor& image, const std::filesystem::path& path, int index = 0);
/// Writes a mask as 0/255 gray.
void save_mask(const BinaryMask& mask, const std::filesystem::path& path, int index = 0);

/// Stacks [1,3,H,W] tensors into one batch.
Tensor stack_images(const std::vector<Tensor>& images);
BinaryMask stack_masks(const std::vector<BinaryMask>& masks);

/// Image files (.png, .pgm, .ppm, .pnm) in a directory, sorted by name.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

/// Damaged input I_0 = I_gt * M.
Tensor damage(const Tensor& truth, const BinaryMask& mask);

/// Procedural test image: smooth gradients, a few soft-edged shapes and a
/// low-frequency texture. Deterministic per seed.
Tensor synthetic_image(int height, int width, std::uint64_t seed);

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
