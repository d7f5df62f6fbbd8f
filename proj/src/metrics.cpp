#include "frrn/metrics.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch " +
                                shape_to_string(a.shape()) + " vs " + shape_to_string(b.shape()));
  }
}

double psnr_from_mse(double mse) {
  if (mse == 0) {
    return std::numeric_limits<double>::infinity();
  }
  return 10.0 * std::log10(1.0 / mse);
}

std::string format_number(double v) {
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  std::ostringstream out;
  out.precision(6);
  out << std::fixed << v;
  return out.str();
}

}  // namespace

std::optional<MaskBucket> bucket_for_ratio(double ratio) {
  if (ratio >= 0.10 && ratio < 0.20) return MaskBucket::k10_20;
  if (ratio >= 0.20 && ratio < 0.30) return MaskBucket::k20_30;
  if (ratio >= 0.30 && ratio < 0.40) return MaskBucket::k30_40;
  if (ratio >= 0.40 && ratio <= 0.50) return MaskBucket::k40_50;
  return std::nullopt;
}

std::pair<double, double> bucket_range(MaskBucket bucket) {
  switch (bucket) {
    case MaskBucket::k10_20: return {0.10, 0.20};
    case MaskBucket::k20_30: return {0.20, 0.30};
    case MaskBucket::k30_40: return {0.30, 0.40};
    case MaskBucket::k40_50: return {0.40, 0.50};
  }
  throw std::logic_error("unknown bucket");
}

std::string_view bucket_label(MaskBucket bucket) {
  switch (bucket) {
    case MaskBucket::k10_20: return "10%-20%";
    case MaskBucket::k20_30: return "20%-30%";
    case MaskBucket::k30_40: return "30%-40%";
    case MaskBucket::k40_50: return "40%-50%";
  }
  throw std::logic_error("unknown bucket");
}

MaskBucket parse_bucket(std::string_view text) {
  std::string digits;
  for (char c : text) {
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
    } else if (!digits.empty()) {
      break;
    }
  }
  if (digits == "10") return MaskBucket::k10_20;
  if (digits == "20") return MaskBucket::k20_30;
  if (digits == "30") return MaskBucket::k30_40;
  if (digits == "40") return MaskBucket::k40_50;
  throw std::invalid_argument("unknown mask bucket '" + std::string(text) +
                              "' (expected 10-20, 20-30, 30-40 or 40-50)");
}

double hole_ratio(const BinaryMask& mask) {
  if (mask.size() == 0) {
    return 0;
  }
  return static_cast<double>(mask.hole_count()) / static_cast<double>(mask.size());
}

double psnr(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "psnr");
  auto as = a.values();
  auto bs = b.values();
  double acc = 0;
  for (std::size_t i = 0; i < as.size(); ++i) {
    const double d = static_cast<double>(as[i]) - bs[i];
    acc += d * d;
  }
  return psnr_from_mse(acc / static_cast<double>(as.size()));
}

double hole_psnr(const Tensor& a, const Tensor& b, const BinaryMask& mask) {
  require_same_shape(a, b, "hole_psnr");
  const Dims4 d = dims4(a, "hole_psnr input");
  if (mask.batch() != d.n || mask.height() != d.h || mask.width() != d.w) {
    throw std::invalid_argument("hole_psnr: mask not aligned with images");
  }
  double acc = 0;
  std::size_t count = 0;
  for (int n = 0; n < d.n; ++n) {
    for (int y = 0; y < d.h; ++y) {
      for (int x = 0; x < d.w; ++x) {
        if (mask.valid(n, y, x)) {
          continue;
        }
        for (int c = 0; c < d.c; ++c) {
          const double diff = static_cast<double>(a.at(n, c, y, x)) - b.at(n, c, y, x);
          acc += diff * diff;
          ++count;
        }
      }
    }
  }
  if (count == 0) {
    return std::numeric_limits<double>::infinity();
  }
  return psnr_from_mse(acc / static_cast<double>(count));
}

double ssim(const Tensor& a, const Tensor& b, int window, double sigma) {
  require_same_shape(a, b, "ssim");
  const Dims4 d = dims4(a, "ssim input");
  if (window < 1 || d.h < window || d.w < window) {
    throw std::invalid_argument("ssim: image " + std::to_string(d.h) + "x" + std::to_string(d.w) +
                                " is smaller than the " + std::to_string(window) + "x" +
                                std::to_string(window) + " window");
  }
  std::vector<double> kernel(static_cast<std::size_t>(window) * window);
  const double centre = (window - 1) / 2.0;
  double total = 0;
  for (int y = 0; y < window; ++y) {
    for (int x = 0; x < window; ++x) {
      const double r2 = (y - centre) * (y - centre) + (x - centre) * (x - centre);
      total += kernel[static_cast<std::size_t>(y) * window + x] =
          std::exp(-r2 / (2 * sigma * sigma));
    }
  }
  for (double& k : kernel) {
    k /= total;
  }
  constexpr double c1 = (0.01 * 1.0) * (0.01 * 1.0);
  constexpr double c2 = (0.03 * 1.0) * (0.03 * 1.0);
  const int oh = d.h - window + 1;
  const int ow = d.w - window + 1;
  double acc = 0;
  for (int n = 0; n < d.n; ++n) {
    for (int c = 0; c < d.c; ++c) {
      for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
          double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
          for (int ky = 0; ky < window; ++ky) {
            for (int kx = 0; kx < window; ++kx) {
              const double k = kernel[static_cast<std::size_t>(ky) * window + kx];
              const double x = a.at(n, c, oy + ky, ox + kx);
              const double y = b.at(n, c, oy + ky, ox + kx);
              mx += k * x;
              my += k * y;
              sxx += k * x * x;
              syy += k * y * y;
              sxy += k * x * y;
            }
          }
          const double vx = sxx - mx * mx;
          const double vy = syy - my * my;
          const double cov = sxy - mx * my;
          acc += ((2 * mx * my + c1) * (2 * cov + c2)) /
                 ((mx * mx + my * my + c1) * (vx + vy + c2));
        }
      }
    }
  }
  return acc / (static_cast<double>(d.n) * d.c * oh * ow);
}

double l1_percent(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "l1_percent");
  auto as = a.values();
  auto bs = b.values();
  double acc = 0;
  for (std::size_t i = 0; i < as.size(); ++i) {
    acc += std::abs(static_cast<double>(as[i]) - bs[i]);
  }
  return 100.0 * acc / static_cast<double>(as.size());
}

MetricReport evaluate_sample(const Tensor& restored, const Tensor& truth, const BinaryMask& mask) {
  MetricReport r;
  r.psnr = psnr(restored, truth);
  r.ssim = ssim(restored, truth);
  r.l1_percent = l1_percent(restored, truth);
  r.hole_ratio = hole_ratio(mask);
  r.bucket = bucket_for_ratio(r.hole_ratio);
  return r;
}

std::vector<BucketRow> aggregate_by_bucket(const std::vector<MetricReport>& reports) {
  std::vector<BucketRow> rows;
  for (MaskBucket bucket : kAllBuckets) {
    BucketRow row{bucket};
    for (const auto& r : reports) {
      if (r.bucket == bucket) {
        ++row.count;
        row.psnr += r.psnr;
        row.ssim += r.ssim;
        row.l1_percent += r.l1_percent;
      }
    }
    if (row.count > 0) {
      const double n = static_cast<double>(row.count);
      row.psnr /= n;
      row.ssim /= n;
      row.l1_percent /= n;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string format_bucket_csv(const std::vector<BucketRow>& rows) {
  std::ostringstream out;
  out << "bucket,count,psnr,ssim,l1_percent\n";
  for (const auto& row : rows) {
    out << bucket_label(row.bucket) << ',' << row.count;
    if (row.count == 0) {
      out << ",,,\n";
    } else {
      out << ',' << format_number(row.psnr) << ',' << format_number(row.ssim) << ','
          << format_number(row.l1_percent) << '\n';
    }
  }
  return out.str();
}

std::string format_report_record(const MetricReport& report) {
  nlohmann::json j;
  j["name"] = report.name;
  j["psnr"] = std::isinf(report.psnr) ? nlohmann::json("inf") : nlohmann::json(report.psnr);
  j["ssim"] = report.ssim;
  j["l1_percent"] = report.l1_percent;
  j["hole_ratio"] = report.hole_ratio;
  j["bucket"] = report.bucket ? nlohmann::json(std::string(bucket_label(*report.bucket)))
                              : nlohmann::json(nullptr);
  return j.dump();
}

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
