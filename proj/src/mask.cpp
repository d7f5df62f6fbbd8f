#include "frrn/mask.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

BinaryMask::BinaryMask(int batch, int height, int width, bool valid)
    : batch_(batch), height_(height), width_(width) {
  if (batch < 0 || height < 0 || width < 0) {
    throw std::invalid_argument("BinaryMask: negative extent");
  }
  bits_.assign(static_cast<std::size_t>(batch) * height * width, valid ? 1 : 0);
}

BinaryMask BinaryMask::from_tensor(const Tensor& t) {
  const Dims4 d = dims4(t, "mask tensor");
  if (d.c != 1) {
    throw std::invalid_argument("mask tensor must have one channel, got " +
                                shape_to_string(t.shape()));
  }
  BinaryMask m(d.n, d.h, d.w, false);
  auto vs = t.values();
  for (std::size_t i = 0; i < vs.size(); ++i) {
    m.bits_[i] = vs[i] > Real(0.5) ? 1 : 0;
  }
  return m;
}

std::size_t BinaryMask::valid_count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

Tensor BinaryMask::valid_tensor() const {
  Tensor t({batch_, 1, height_, width_});
  auto vs = t.values();
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    vs[i] = bits_[i] ? Real(1) : Real(0);
  }
  return t;
}

Tensor BinaryMask::hole_tensor() const {
  Tensor t({batch_, 1, height_, width_});
  auto vs = t.values();
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    vs[i] = bits_[i] ? Real(0) : Real(1);
  }
  return t;
}

BinaryMask intersect(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_geometry(b)) {
    throw std::invalid_argument("intersect: masks differ in shape");
  }
  BinaryMask out(a.batch(), a.height(), a.width(), false);
  for (int n = 0; n < a.batch(); ++n) {
    for (int y = 0; y < a.height(); ++y) {
      for (int x = 0; x < a.width(); ++x) {
        out.set(n, y, x, a.valid(n, y, x) && b.valid(n, y, x));
      }
    }
  }
  return out;
}

int window_output_extent(int extent, int kernel, int stride, int padding) {
  if (kernel < 1 || stride < 1 || padding < 0) {
    throw std::invalid_argument("window: kernel and stride must be positive, padding >= 0");
  }
  if (extent + 2 * padding < kernel) {
    throw std::invalid_argument("window: extent " + std::to_string(extent) +
                                " smaller than kernel " + std::to_string(kernel));
  }
  return (extent + 2 * padding - kernel) / stride + 1;
}

std::vector<int> window_valid_counts(const BinaryMask& mask, int kernel, int stride,
                                     int padding) {
  const int h = mask.height();
  const int w = mask.width();
  const int oh = window_output_extent(h, kernel, stride, padding);
  const int ow = window_output_extent(w, kernel, stride, padding);
  std::vector<int> counts(static_cast<std::size_t>(mask.batch()) * oh * ow);
  // summed-area table with a zero border row/column
  std::vector<int> sat(static_cast<std::size_t>(h + 1) * (w + 1));
  auto at = [&](int y, int x) -> int& { return sat[static_cast<std::size_t>(y) * (w + 1) + x]; };
  for (int n = 0; n < mask.batch(); ++n) {
    for (int y = 0; y < h; ++y) {
      int row = 0;
      for (int x = 0; x < w; ++x) {
        row += mask.valid(n, y, x) ? 1 : 0;
        at(y + 1, x + 1) = at(y, x + 1) + row;
      }
    }
    for (int oy = 0; oy < oh; ++oy) {
      const int y0 = std::clamp(oy * stride - padding, 0, h);
      const int y1 = std::clamp(oy * stride - padding + kernel, 0, h);
      for (int ox = 0; ox < ow; ++ox) {
        const int x0 = std::clamp(ox * stride - padding, 0, w);
        const int x1 = std::clamp(ox * stride - padding + kernel, 0, w);
        counts[(static_cast<std::size_t>(n) * oh + oy) * ow + ox] =
            at(y1, x1) - at(y0, x1) - at(y1, x0) + at(y0, x0);
      }
    }
  }
  return counts;
}

BinaryMask mask_update(const BinaryMask& mask, int kernel, int stride, int padding) {
  if (kernel % 2 == 0) {
    throw std::invalid_argument("mask_update: kernel size must be odd, got " +
                                std::to_string(kernel));
  }
  const int oh = window_output_extent(mask.height(), kernel, stride, padding);
  const int ow = window_output_extent(mask.width(), kernel, stride, padding);
  const std::vector<int> counts = window_valid_counts(mask, kernel, stride, padding);
  BinaryMask out(mask.batch(), oh, ow, false);
  for (int n = 0; n < mask.batch(); ++n) {
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        out.set(n, y, x, counts[(static_cast<std::size_t>(n) * oh + y) * ow + x] > 0);
      }
    }
  }
  return out;
}

BinaryMask mask_downsample(const BinaryMask& mask, int factor) {
  if (factor < 1 || mask.height() % factor != 0 || mask.width() % factor != 0) {
    throw std::invalid_argument("mask_downsample: " + std::to_string(mask.height()) + "x" +
                                std::to_string(mask.width()) + " not divisible by " +
                                std::to_string(factor));
  }
  BinaryMask out(mask.batch(), mask.height() / factor, mask.width() / factor, false);
  for (int n = 0; n < mask.batch(); ++n) {
    for (int y = 0; y < mask.height(); ++y) {
      for (int x = 0; x < mask.width(); ++x) {
        if (mask.valid(n, y, x)) {
          out.set(n, y / factor, x / factor, true);
        }
      }
    }
  }
  return out;
}

BinaryMask mask_upsample(const BinaryMask& mask, int factor) {
  if (factor < 1) {
    throw std::invalid_argument("mask_upsample: factor must be positive");
  }
  BinaryMask out(mask.batch(), mask.height() * factor, mask.width() * factor, false);
  for (int n = 0; n < out.batch(); ++n) {
    for (int y = 0; y < out.height(); ++y) {
      for (int x = 0; x < out.width(); ++x) {
        out.set(n, y, x, mask.valid(n, y / factor, x / factor));
      }
    }
  }
  return out;
}

std::vector<int> chessboard_distance(const BinaryMask& mask) {
  const int h = mask.height();
  const int w = mask.width();
  const int far = h + w;
  std::vector<int> dist(mask.size());
  for (int n = 0; n < mask.batch(); ++n) {
    int* d = dist.data() + static_cast<std::size_t>(n) * h * w;
    auto at = [&](int y, int x) -> int& { return d[static_cast<std::size_t>(y) * w + x]; };
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        at(y, x) = mask.valid(n, y, x) ? 0 : far;
      }
    }
    // forward pass: neighbours above and to the left
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        int best = at(y, x);
        if (y > 0) {
          best = std::min(best, at(y - 1, x) + 1);
          if (x > 0) best = std::min(best, at(y - 1, x - 1) + 1);
          if (x + 1 < w) best = std::min(best, at(y - 1, x + 1) + 1);
        }
        if (x > 0) best = std::min(best, at(y, x - 1) + 1);
        at(y, x) = std::min(best, far);
      }
    }
    // backward pass: neighbours below and to the right
    for (int y = h - 1; y >= 0; --y) {
      for (int x = w - 1; x >= 0; --x) {
        int best = at(y, x);
        if (y + 1 < h) {
          best = std::min(best, at(y + 1, x) + 1);
          if (x > 0) best = std::min(best, at(y + 1, x - 1) + 1);
          if (x + 1 < w) best = std::min(best, at(y + 1, x + 1) + 1);
        }
        if (x + 1 < w) best = std::min(best, at(y, x + 1) + 1);
        at(y, x) = std::min(best, far);
      }
    }
  }
  return dist;
}

HoleGeometry hole_geometry(const BinaryMask& mask) {
  HoleGeometry g;
  g.hole_pixel_count = mask.hole_count();
  if (g.hole_pixel_count == 0) {
    return g;
  }
  const std::vector<int> dist = chessboard_distance(mask);
  g.max_inradius = *std::max_element(dist.begin(), dist.end());
  return g;
}

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
