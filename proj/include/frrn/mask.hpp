#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "frrn/tensor.hpp"

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

/// Binary validity mask of shape (batch, 1, height, width): 1 marks a valid
/// (clean) pixel, 0 a hole.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int batch, int height, int width, bool valid = true);

  /// Thresholds a [B,1,H,W] tensor: values > 0.5 become valid.
  static BinaryMask from_tensor(const Tensor& t);

  int batch() const { return batch_; }
  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }

  bool valid(int n, int y, int x) const { return bits_[index(n, y, x)] != 0; }
  void set(int n, int y, int x, bool valid) { bits_[index(n, y, x)] = valid ? 1 : 0; }
  std::span<const std::uint8_t> bits() const { return bits_; }

  std::size_t valid_count() const;
  std::size_t hole_count() const { return size() - valid_count(); }
  bool all_valid() const { return valid_count() == size(); }

  /// [B,1,H,W] tensor with 1 at valid pixels.
  Tensor valid_tensor() const;
  /// [B,1,H,W] tensor with 1 at holes.
  Tensor hole_tensor() const;

  bool same_geometry(const BinaryMask& other) const {
    return batch_ == other.batch_ && height_ == other.height_ && width_ == other.width_;
  }
  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int n, int y, int x) const {
    return (static_cast<std::size_t>(n) * height_ + y) * width_ + x;
  }

  int batch_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Elementwise product (intersection of the valid sets).
BinaryMask intersect(const BinaryMask& a, const BinaryMask& b);

/// Output spatial extent of a k x k window sweep; same arithmetic as conv2d.
int window_output_extent(int extent, int kernel, int stride, int padding);

/// Number of valid pixels inside each zero-padded k x k window, laid out as
/// (batch, out_h, out_w).
std::vector<int> window_valid_counts(const BinaryMask& mask, int kernel, int stride, int padding);

/// Partial-convolution mask rule: an output is valid iff its window holds at
/// least one valid pixel. At stride 1 this dilates the valid set by the
/// square structuring element.
BinaryMask mask_update(const BinaryMask& mask, int kernel, int stride, int padding);

/// Max-pooling over factor x factor blocks.
BinaryMask mask_downsample(const BinaryMask& mask, int factor = 2);
/// Nearest-neighbour replication.
BinaryMask mask_upsample(const BinaryMask& mask, int factor = 2);

/// Chessboard distance from every pixel to the nearest valid pixel (0 on
/// valid pixels), per batch item. Pixels outside the image do not count as
/// valid. A plane without any valid pixel reports height + width everywhere.
std::vector<int> chessboard_distance(const BinaryMask& mask);

struct HoleGeometry {
  std::size_t hole_pixel_count = 0;
  /// Largest chessboard distance from a hole pixel to the valid set: the
  /// number of one-pixel dilations needed to close every hole.
  int max_inradius = 0;
};

HoleGeometry hole_geometry(const BinaryMask& mask);

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
