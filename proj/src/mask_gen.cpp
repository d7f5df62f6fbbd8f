#include "frrn/mask_gen.hpp"

#include <algorithm>
#include <cmath>

#include "frrn/errors.hpp"
#include "frrn/rng.hpp"

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

namespace {

constexpr int kMaxAttempts = 100;

struct Canvas {
  BinaryMask mask;
  std::size_t holes = 0;

  // Paints a filled disc as hole.
  void stamp(double cy, double cx, double radius) {
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - radius)));
    const int y1 = std::min(mask.height() - 1, static_cast<int>(std::ceil(cy + radius)));
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - radius)));
    const int x1 = std::min(mask.width() - 1, static_cast<int>(std::ceil(cx + radius)));
    const double r2 = radius * radius;
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double dy = y - cy;
        const double dx = x - cx;
        if (dy * dy + dx * dx <= r2 && mask.valid(0, y, x)) {
          mask.set(0, y, x, false);
          ++holes;
        }
      }
    }
  }
};

// One attempt; false when the hole ratio missed the bucket.
bool draw_attempt(int height, int width, double lo, double hi, MaskBucket bucket, Rng rng,
                  BinaryMask& out) {
  const double total = static_cast<double>(height) * width;
  const double target = rng.uniform(lo, hi);
  const int strokes = rng.uniform_int(1, 8);
  Canvas canvas{BinaryMask(1, height, width, true), 0};
  const long step_budget = 40L * (height + width);

  for (int s = 0; s < strokes; ++s) {
    // each stroke carries an equal share of the target area
    const double share = target * (s + 1) / strokes;
    const double radius = rng.uniform_int(5, 25) / 2.0;
    double y = rng.uniform(0, height);
    double x = rng.uniform(0, width);
    double heading = rng.uniform(0, 2 * M_PI);
    int segment_left = 0;
    for (long step = 0; step < step_budget; ++step) {
      canvas.stamp(y, x, radius);
      if (canvas.holes / total >= share) {
        break;
      }
      if (segment_left-- <= 0) {
        heading += rng.uniform(-M_PI / 2, M_PI / 2);
        segment_left = rng.uniform_int(4, 20);
      }
      y += std::sin(heading);
      x += std::cos(heading);
      // reflect off the borders so strokes stay on the canvas
      if (y < 0 || y > height - 1) {
        heading = -heading;
        y = std::clamp(y, 0.0, height - 1.0);
      }
      if (x < 0 || x > width - 1) {
        heading = M_PI - heading;
        x = std::clamp(x, 0.0, width - 1.0);
      }
    }
  }
  if (bucket_for_ratio(canvas.holes / total) != bucket) {
    return false;
  }
  out = std::move(canvas.mask);
  return true;
}

}  // namespace

BinaryMask gen_irregular_mask(int height, int width, MaskBucket bucket, std::uint64_t seed) {
  if (height <= 0 || width <= 0) {
    throw std::invalid_argument("gen_irregular_mask: extents must be positive");
  }
  const auto [lo, hi] = bucket_range(bucket);
  const Rng root(seed);
  BinaryMask out;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    if (draw_attempt(height, width, lo, hi, bucket, root.fork(attempt), out)) {
      return out;
    }
  }
  throw DataError("gen_irregular_mask: no " + std::string(bucket_label(bucket)) + " mask at " +
                  std::to_string(height) + "x" + std::to_string(width) + " after " +
                  std::to_string(kMaxAttempts) + " attempts");
}

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
