#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "frrn/mask.hpp"
#include "frrn/tensor.hpp"

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

/// Hole-ratio buckets used to group evaluation results.
enum class MaskBucket { k10_20, k20_30, k30_40, k40_50 };

inline constexpr std::array<MaskBucket, 4> kAllBuckets{MaskBucket::k10_20, MaskBucket::k20_30,
                                                       MaskBucket::k30_40, MaskBucket::k40_50};

/// Buckets are half-open [lo, hi) except the last, which is closed.
std::optional<MaskBucket> bucket_for_ratio(double hole_ratio);
/// Inclusive lower / exclusive upper hole ratio of a bucket.
std::pair<double, double> bucket_range(MaskBucket bucket);
/// "10%-20%" etc.
std::string_view bucket_label(MaskBucket bucket);
/// Accepts "10-20", "10%-20%", "20" (lower bound) ...
MaskBucket parse_bucket(std::string_view text);

double hole_ratio(const BinaryMask& mask);

/// 10 log10(1 / MSE); +infinity for identical inputs.
double psnr(const Tensor& a, const Tensor& b);
/// PSNR restricted to hole pixels of `mask` (all channels).
double hole_psnr(const Tensor& a, const Tensor& b, const BinaryMask& mask);

/// Mean SSIM over all valid window positions and channels, Gaussian window
/// (sigma 1.5), K1 = 0.01, K2 = 0.03, dynamic range 1.
double ssim(const Tensor& a, const Tensor& b, int window = 11, double sigma = 1.5);

/// 100 x mean absolute error.
double l1_percent(const Tensor& a, const Tensor& b);

struct MetricReport {
  std::string name;
  double psnr = 0;
  double ssim = 0;
  double l1_percent = 0;
  double hole_ratio = 0;
  std::optional<MaskBucket> bucket;
};

MetricReport evaluate_sample(const Tensor& restored, const Tensor& truth, const BinaryMask& mask);

struct BucketRow {
  MaskBucket bucket;
  std::size_t count = 0;
  double psnr = 0;
  double ssim = 0;
  double l1_percent = 0;
};

/// One row per bucket in bucket order; samples outside every bucket are
/// ignored.
std::vector<BucketRow> aggregate_by_bucket(const std::vector<MetricReport>& reports);

/// CSV with header "bucket,count,psnr,ssim,l1_percent"; empty buckets have
/// blank metric columns and an infinite PSNR prints as "inf".
std::string format_bucket_csv(const std::vector<BucketRow>& rows);
/// One JSON object per line.
std::string format_report_record(const MetricReport& report);

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
