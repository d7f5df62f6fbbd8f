#include <doctest.h>

#include <cmath>
#include <limits>

#include "frrn/image_io.hpp"
#include "frrn/metrics.hpp"
#include "oracles.hpp"

using namespace frrn;

TEST_CASE("psnr sentinel and constant offset") {
  const Tensor a = synthetic_image(32, 32, 1);
  CHECK(std::isinf(psnr(a, a)));
  Tensor b({1, 3, 32, 32}, Real(0.2));
  Tensor c({1, 3, 32, 32}, Real(0.3));
  CHECK(psnr(b, c) == doctest::Approx(20.0).epsilon(1e-5));
}

TEST_CASE("ssim is 1 for identical images and below 1 otherwise") {
  const Tensor a = synthetic_image(32, 32, 1);
  CHECK(ssim(a, a) == 1.0);
  Rng rng(2);
  Tensor noisy = a.clone();
  for (auto& v : noisy.values()) v += static_cast<Real>(rng.uniform(-0.1, 0.1));
  const double s = ssim(a, noisy);
  CHECK(s < 0.99);
  CHECK(s > 0.0);
  CHECK(ssim(noisy, a) == doctest::Approx(s));
  CHECK_THROWS_AS(ssim(Tensor({1, 3, 8, 8}), Tensor({1, 3, 8, 8})), std::invalid_argument);
}

TEST_CASE("ssim of a constant-offset pair matches the closed form") {
  // identical structure: only the luminance term differs
  const Tensor a({1, 1, 16, 16}, Real(0.4));
  const Tensor b({1, 1, 16, 16}, Real(0.6));
  const double c1 = 1e-4;
  const double expect = (2 * 0.4 * 0.6 + c1) / (0.16 + 0.36 + c1);
  CHECK(ssim(a, b) == doctest::Approx(expect).epsilon(1e-5));
}

TEST_CASE("l1 percent") {
  Rng rng(3);
  const Tensor a = oracle::random_tensor({1, 3, 8, 8}, rng, 0, 1);
  const Tensor b = oracle::random_tensor({1, 3, 8, 8}, rng, 0, 1);
  double acc = 0;
  for (std::size_t i = 0; i < a.numel(); ++i) acc += std::abs(a.values()[i] - b.values()[i]);
  CHECK(std::abs(l1_percent(a, b) - 100 * acc / a.numel()) <= 1e-6);
}

TEST_CASE("hole psnr only looks at holes") {
  const Tensor a({1, 3, 4, 4}, Real(0.5));
  Tensor b = a.clone();
  BinaryMask m(1, 4, 4, true);
  m.set(0, 1, 1, false);
  b.at(0, 0, 1, 1) = Real(0.6);
  b.at(0, 0, 2, 2) = Real(0.9);  // clean pixel, ignored
  // one of three hole values is off by 0.1
  CHECK(hole_psnr(a, b, m) == doctest::Approx(10 * std::log10(3 / 0.01)).epsilon(1e-4));
}

TEST_CASE("bucket boundaries") {
  CHECK_FALSE(bucket_for_ratio(0.05).has_value());
  CHECK(bucket_for_ratio(0.10) == MaskBucket::k10_20);
  CHECK(bucket_for_ratio(0.1999) == MaskBucket::k10_20);
  CHECK(bucket_for_ratio(0.20) == MaskBucket::k20_30);
  CHECK(bucket_for_ratio(0.25) == MaskBucket::k20_30);
  CHECK(bucket_for_ratio(0.50) == MaskBucket::k40_50);
  CHECK_FALSE(bucket_for_ratio(0.51).has_value());
  CHECK(bucket_label(MaskBucket::k20_30) == "20%-30%");
  CHECK(parse_bucket("30-40") == MaskBucket::k30_40);
  CHECK(parse_bucket("40%-50%") == MaskBucket::k40_50);
  CHECK_THROWS_AS(parse_bucket("5-10"), std::invalid_argument);
}

TEST_CASE("bucket table means match a per-sample recomputation") {
  std::vector<MetricReport> reports;
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    MetricReport r;
    r.psnr = rng.uniform(20, 30);
    r.ssim = rng.uniform(0.5, 1);
    r.l1_percent = rng.uniform(1, 5);
    r.hole_ratio = rng.uniform(0.1, 0.4);
    r.bucket = bucket_for_ratio(r.hole_ratio);
    reports.push_back(r);
  }
  const auto rows = aggregate_by_bucket(reports);
  REQUIRE(rows.size() == 4);
  for (const auto& row : rows) {
    double p = 0, s = 0, l = 0;
    std::size_t n = 0;
    for (const auto& r : reports)
      if (r.bucket == row.bucket) {
        p += r.psnr;
        s += r.ssim;
        l += r.l1_percent;
        ++n;
      }
    CHECK(row.count == n);
    if (n) {
      CHECK(row.psnr == doctest::Approx(p / n));
      CHECK(row.ssim == doctest::Approx(s / n));
      CHECK(row.l1_percent == doctest::Approx(l / n));
    }
  }
  CHECK(rows[3].count == 0);
  const std::string csv = format_bucket_csv(rows);
  CHECK(csv.rfind("bucket,count,psnr,ssim,l1_percent\n", 0) == 0);
  CHECK(csv.find("40%-50%,0,,,\n") != std::string::npos);
}

TEST_CASE("ground truth against itself") {
  const Tensor a = synthetic_image(64, 64, 9);
  BinaryMask m = oracle::square_hole(64, 64, 32, 32, 14);  // 27x27 hole, ~18%
  const MetricReport r = evaluate_sample(a, a, m);
  CHECK(std::isinf(r.psnr));
  CHECK(r.ssim == 1.0);
  CHECK(r.l1_percent == 0.0);
  CHECK(r.bucket == MaskBucket::k10_20);
  const std::string csv = format_bucket_csv(aggregate_by_bucket({r}));
  CHECK(csv.find("10%-20%,1,inf,1.000000,0.000000\n") != std::string::npos);
  CHECK(format_report_record(r).find("\"psnr\":\"inf\"") != std::string::npos);
}
