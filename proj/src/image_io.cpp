#include "frrn/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "frrn/errors.hpp"
#include "frrn/rng.hpp"

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

namespace fs = std::filesystem;

namespace {

cv::Mat read_any(const fs::path& path) {
  cv::Mat img = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (img.empty()) {
    throw DataError("cannot read image '" + path.string() + "'");
  }
  if (img.rows == 0 || img.cols == 0) {
    throw DataError("image '" + path.string() + "' has zero area");
  }
  return img;
}

// 8-bit or 16-bit to float in [0,1], keeping the channel count.
cv::Mat to_unit_float(const cv::Mat& img) {
  cv::Mat out;
  const double s = img.depth() == CV_16U ? 1.0 / 65535.0 : (img.depth() == CV_8U ? 1.0 / 255.0 : 1.0);
  img.convertTo(out, CV_32F, s);
  return out;
}

std::uint8_t to_byte(Real v) {
  const double c = std::clamp(static_cast<double>(v), 0.0, 1.0);
  return static_cast<std::uint8_t>(std::lround(c * 255.0));
}

void write(const cv::Mat& img, const fs::path& path) {
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  if (!cv::imwrite(path.string(), img)) {
    throw DataError("cannot write image '" + path.string() + "'");
  }
}

}  // namespace

Tensor load_image(const fs::path& path, int height, int width) {
  cv::Mat img = to_unit_float(read_any(path));
  cv::Mat rgb;
  switch (img.channels()) {
    case 1: cv::cvtColor(img, rgb, cv::COLOR_GRAY2RGB); break;
    case 3: cv::cvtColor(img, rgb, cv::COLOR_BGR2RGB); break;
    case 4: cv::cvtColor(img, rgb, cv::COLOR_BGRA2RGB); break;
    default:
      throw DataError("image '" + path.string() + "' has unsupported channel count " +
                      std::to_string(img.channels()));
  }
  if (height > 0 && width > 0 && (rgb.rows != height || rgb.cols != width)) {
    cv::Mat resized;
    cv::resize(rgb, resized, cv::Size(width, height), 0, 0, cv::INTER_LINEAR);
    rgb = resized;
  }
  Tensor t({1, 3, rgb.rows, rgb.cols});
  for (int y = 0; y < rgb.rows; ++y) {
    const auto* row = rgb.ptr<cv::Vec3f>(y);
    for (int x = 0; x < rgb.cols; ++x) {
      for (int c = 0; c < 3; ++c) {
        t.at(0, c, y, x) = static_cast<Real>(std::clamp(row[x][c], 0.0f, 1.0f));
      }
    }
  }
  return t;
}

BinaryMask load_mask(const fs::path& path, int height, int width) {
  cv::Mat img = read_any(path);
  if (img.depth() == CV_16U) {
    img.convertTo(img, CV_8U, 1.0 / 257.0);
  }
  cv::Mat gray;
  switch (img.channels()) {
    case 1: gray = img; break;
    case 3: cv::cvtColor(img, gray, cv::COLOR_BGR2GRAY); break;
    case 4: cv::cvtColor(img, gray, cv::COLOR_BGRA2GRAY); break;
    default:
      throw DataError("mask '" + path.string() + "' has unsupported channel count " +
                      std::to_string(img.channels()));
  }
  cv::Mat binary = gray > 127;
  if (height > 0 && width > 0 && (binary.rows != height || binary.cols != width)) {
    cv::Mat resized;
    cv::resize(binary, resized, cv::Size(width, height), 0, 0, cv::INTER_NEAREST);
    binary = resized;
  }
  BinaryMask m(1, binary.rows, binary.cols, false);
  for (int y = 0; y < binary.rows; ++y) {
    const auto* row = binary.ptr<std::uint8_t>(y);
    for (int x = 0; x < binary.cols; ++x) {
      m.set(0, y, x, row[x] != 0);
    }
  }
  return m;
}

void save_image(const Tensor& image, const fs::path& path, int index) {
  const Dims4 d = dims4(image, "save_image input");
  if (d.c != 3 || index < 0 || index >= d.n) {
    throw std::invalid_argument("save_image: expected [B,3,H,W] with valid index, got " +
                                shape_to_string(image.shape()));
  }
  cv::Mat img(d.h, d.w, CV_8UC3);
  for (int y = 0; y < d.h; ++y) {
    auto* row = img.ptr<cv::Vec3b>(y);
    for (int x = 0; x < d.w; ++x) {
      // OpenCV stores BGR
      row[x] = cv::Vec3b(to_byte(image.at(index, 2, y, x)), to_byte(image.at(index, 1, y, x)),
                         to_byte(image.at(index, 0, y, x)));
    }
  }
  write(img, path);
}

void save_mask(const BinaryMask& mask, const fs::path& path, int index) {
  cv::Mat img(mask.height(), mask.width(), CV_8UC1);
  for (int y = 0; y < mask.height(); ++y) {
    auto* row = img.ptr<std::uint8_t>(y);
    for (int x = 0; x < mask.width(); ++x) {
      row[x] = mask.valid(index, y, x) ? 255 : 0;
    }
  }
  write(img, path);
}

Tensor stack_images(const std::vector<Tensor>& images) {
  if (images.empty()) {
    throw std::invalid_argument("stack_images: empty list");
  }
  const Dims4 d = dims4(images.front(), "stack_images item");
  Tensor out({static_cast<int>(images.size()), d.c, d.h, d.w});
  auto dst = out.values();
  std::size_t offset = 0;
  for (const auto& img : images) {
    const Dims4 di = dims4(img, "stack_images item");
    if (di.n != 1 || di.c != d.c || di.h != d.h || di.w != d.w) {
      throw std::invalid_argument("stack_images: shape " + shape_to_string(img.shape()) +
                                  " differs from the first image");
    }
    std::copy(img.values().begin(), img.values().end(), dst.begin() + static_cast<long>(offset));
    offset += img.numel();
  }
  return out;
}

BinaryMask stack_masks(const std::vector<BinaryMask>& masks) {
  if (masks.empty()) {
    throw std::invalid_argument("stack_masks: empty list");
  }
  const BinaryMask& first = masks.front();
  BinaryMask out(static_cast<int>(masks.size()), first.height(), first.width(), false);
  for (std::size_t i = 0; i < masks.size(); ++i) {
    if (masks[i].batch() != 1 || masks[i].height() != first.height() ||
        masks[i].width() != first.width()) {
      throw std::invalid_argument("stack_masks: mask " + std::to_string(i) +
                                  " differs from the first mask");
    }
    for (int y = 0; y < first.height(); ++y) {
      for (int x = 0; x < first.width(); ++x) {
        out.set(static_cast<int>(i), y, x, masks[i].valid(0, y, x));
      }
    }
  }
  return out;
}

std::vector<fs::path> list_images(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw DataError("'" + dir.string() + "' is not a directory");
  }
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) {
      continue;
    }
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".png" || ext == ".pgm" || ext == ".ppm" || ext == ".pnm") {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Tensor damage(const Tensor& truth, const BinaryMask& mask) {
  const Dims4 d = dims4(truth, "damage input");
  if (mask.batch() != d.n || mask.height() != d.h || mask.width() != d.w) {
    throw std::invalid_argument("damage: mask not aligned with image " +
                                shape_to_string(truth.shape()));
  }
  Tensor out = truth.detach();
  for (int n = 0; n < d.n; ++n) {
    for (int y = 0; y < d.h; ++y) {
      for (int x = 0; x < d.w; ++x) {
        if (!mask.valid(n, y, x)) {
          for (int c = 0; c < d.c; ++c) {
            out.at(n, c, y, x) = Real(0);
          }
        }
      }
    }
  }
  return out;
}

Tensor synthetic_image(int height, int width, std::uint64_t seed) {
  if (height <= 0 || width <= 0) {
    throw std::invalid_argument("synthetic_image: extents must be positive");
  }
  Rng rng(seed);
  std::array<std::array<double, 3>, 4> corners{};
  for (auto& corner : corners) {
    for (double& v : corner) {
      v = rng.uniform(0.15, 0.85);
    }
  }
  struct Blob {
    double cy, cx, radius;
    std::array<double, 3> colour;
  };
  std::vector<Blob> blobs(3);
  for (auto& b : blobs) {
    b.cy = rng.uniform(0, height);
    b.cx = rng.uniform(0, width);
    b.radius = rng.uniform(0.1, 0.3) * std::min(height, width);
    for (double& v : b.colour) {
      v = rng.uniform(0.05, 0.95);
    }
  }
  const double fy = rng.uniform(1.0, 3.0) * 2 * M_PI / height;
  const double fx = rng.uniform(1.0, 3.0) * 2 * M_PI / width;
  const double phase = rng.uniform(0, 2 * M_PI);

  Tensor t({1, 3, height, width});
  for (int y = 0; y < height; ++y) {
    const double v = height > 1 ? static_cast<double>(y) / (height - 1) : 0.0;
    for (int x = 0; x < width; ++x) {
      const double u = width > 1 ? static_cast<double>(x) / (width - 1) : 0.0;
      const double texture = 0.05 * std::sin(fy * y + fx * x + phase);
      for (int c = 0; c < 3; ++c) {
        double value = (1 - v) * ((1 - u) * corners[0][c] + u * corners[1][c]) +
                       v * ((1 - u) * corners[2][c] + u * corners[3][c]);
        for (const auto& b : blobs) {
          const double r = std::hypot(y - b.cy, x - b.cx);
          // soft edge about two pixels wide
          const double alpha = 1.0 / (1.0 + std::exp((r - b.radius) / 1.0));
          value = (1 - alpha) * value + alpha * b.colour[c];
        }
        t.at(0, c, y, x) = static_cast<Real>(std::clamp(value + texture, 0.0, 1.0));
      }
    }
  }
  return t;
}

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
