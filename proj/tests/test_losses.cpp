#include <doctest.h>

#include <Eigen/SVD>
#include <cmath>

#include "frrn/image_io.hpp"
#include "frrn/losses.hpp"
#include "frrn/ops.hpp"
#include "oracles.hpp"

using namespace frrn;

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double top_singular_value(const Tensor& w) {
  const int rows = w.dim(0);
  const int cols = static_cast<int>(w.numel()) / rows;
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = w.values()[static_cast<std::size_t>(r) * cols + c];
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

}  // namespace

TEST_CASE("rec loss is the mean absolute error") {
  const Tensor a({1, 1, 1, 4}, std::vector<Real>{0, 1, 2, 3});
  const Tensor b({1, 1, 1, 4}, std::vector<Real>{1, 1, 0, 3.5});
  CHECK(rec_loss(a, b).item() == doctest::Approx((1 + 0 + 2 + 0.5) / 4));
  CHECK_THROWS_AS(rec_loss(a, Tensor({1, 1, 1, 3})), std::invalid_argument);
}

TEST_CASE("step loss sums masked errors over modules") {
  Rng rng(41);
  const Tensor truth = oracle::random_tensor({1, 3, 8, 8}, rng, 0, 1);
  InpaintTrajectory t;
  double expect = 0;
  for (int i = 0; i < 3; ++i) {
    const Tensor img = oracle::random_tensor({1, 3, 8, 8}, rng, 0, 1);
    const BinaryMask m = oracle::random_mask(1, 8, 8, 0.5, rng);
    t.steps.push_back({img, m});
    double acc = 0;
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
          if (m.valid(0, y, x)) acc += std::abs(img.at(0, c, y, x) - truth.at(0, c, y, x));
    expect += acc / (3 * 64);
  }
  CHECK(step_loss(t, truth).item() == doctest::Approx(expect).epsilon(1e-5));
}

TEST_CASE("with all-ones masks each step term is the reconstruction loss") {
  Rng rng(42);
  const Tensor truth = oracle::random_tensor({2, 3, 8, 8}, rng, 0, 1);
  for (int i = 0; i < 5; ++i) {
    InpaintTrajectory t;
    const Tensor img = oracle::random_tensor({2, 3, 8, 8}, rng, 0, 1);
    t.steps.push_back({img, BinaryMask(2, 8, 8, true)});
    CHECK(std::abs(step_loss(t, truth).item() - rec_loss(img, truth).item()) <= 1e-7);
  }
}

TEST_CASE("style loss vanishes for identical images and is frozen") {
  const auto ex = StyleFeatureExtractor::random(3);
  const Tensor a = synthetic_image(32, 32, 1);
  const Tensor b = synthetic_image(32, 32, 2);
  CHECK(style_loss(a, a, ex).item() == 0.0f);
  CHECK(style_loss(a, b, ex).item() > 0.0f);
  const auto feats = ex.features(a);
  REQUIRE(feats.size() == 4);
  CHECK(feats[0].shape() == Shape{1, 16, 16, 16});
  CHECK(feats[3].shape() == Shape{1, 64, 2, 2});
  for (const auto& [name, t] : ex.parameters()) CHECK_FALSE(t.requires_grad());
}

TEST_CASE("style extractor weights can be replaced") {
  auto ex = StyleFeatureExtractor::random(3, {2, 2, 2, 2});
  ParameterSet w = ex.parameters();
  for (auto& [name, t] : w) t = Tensor(t.shape(), Real(0));
  ex.assign(w);
  const auto feats = ex.features(synthetic_image(16, 16, 1));
  for (Real v : feats[0].values()) CHECK(v == 0.0f);
  ParameterSet bad = ex.parameters();
  bad[0].second = Tensor({1});
  CHECK_THROWS(ex.assign(bad));
}

TEST_CASE("adversarial losses follow the logistic formulas") {
  const Tensor real({1, 1, 1, 2}, std::vector<Real>{0.3f, -1.2f});
  const Tensor fake({1, 1, 1, 2}, std::vector<Real>{2.0f, -0.5f});
  const double d = -(std::log(sigmoid(0.3)) + std::log(sigmoid(-1.2))) / 2 -
                   (std::log(1 - sigmoid(2.0)) + std::log(1 - sigmoid(-0.5))) / 2;
  const double g = -(std::log(sigmoid(2.0)) + std::log(sigmoid(-0.5))) / 2;
  CHECK(discriminator_loss_from_logits(real, fake).item() == doctest::Approx(d).epsilon(1e-6));
  CHECK(generator_loss_from_logits(fake).item() == doctest::Approx(g).epsilon(1e-6));
}

TEST_CASE("d_loss does not reach the restored image") {
  DiscriminatorConfig cfg;
  cfg.widths = {2, 2, 2, 2, 1};
  const Discriminator d = Discriminator::create(cfg, 1);
  Tensor restored = synthetic_image(32, 32, 3);
  restored.set_requires_grad(true);
  Tape tape;
  TapeScope scope(tape);
  const AdversarialLosses l = adv_losses(d, synthetic_image(32, 32, 4), restored);
  backward(l.d_loss, tape);
  CHECK_FALSE(restored.has_grad());
  backward(l.g_loss, tape);
  CHECK(restored.has_grad());
}

TEST_CASE("total loss weights and the optional step term") {
  LossBundle parts{Tensor::scalar(1), Tensor::scalar(2), Tensor::scalar(3), Tensor::scalar(4)};
  CHECK(total_loss(parts, LossWeights{}).item() == doctest::Approx(20 + 0.2 + 300 + 8));
  parts.step = Tensor();
  CHECK(total_loss(parts, LossWeights{}).item() == doctest::Approx(20 + 0.2 + 300));
  CHECK_THROWS_AS((LossWeights{-1, 0, 0, 0}.validate()), std::invalid_argument);
}

TEST_CASE("discriminator emits one logit per 32x32 patch") {
  DiscriminatorConfig cfg;
  cfg.widths = {4, 4, 4, 4, 1};
  const Discriminator d = Discriminator::create(cfg, 2);
  CHECK(d.forward(Tensor({2, 3, 64, 96})).shape() == Shape{2, 1, 2, 3});
  CHECK(d.parameters().size() == 10);
  CHECK(d.buffers().size() == 10);
  CHECK(d.buffers()[0].first == "disc.0.sn_u");
}

TEST_CASE("power iteration converges to the top singular value") {
  Rng rng(43);
  const Tensor w = oracle::random_tensor({16, 8, 3, 3}, rng);
  SpectralNorm sn(w, 5);
  sn.power_iteration(w, 100);
  const double ref = top_singular_value(w);
  CHECK(sn.sigma(w) == doctest::Approx(ref).epsilon(1e-4));
  CHECK(top_singular_value(sn.normalized(w)) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("spectral norm of an all-zero weight is the identity") {
  const Tensor w({3, 2}, Real(0));
  SpectralNorm sn(w, 1);
  sn.power_iteration(w, 3);
  const Tensor n = sn.normalized(w);
  for (Real v : n.values()) CHECK(v == 0.0f);
}

TEST_CASE("spectral_norm_update moves u towards the top singular vector") {
  DiscriminatorConfig cfg;
  cfg.widths = {4, 4, 4, 4, 1};
  Discriminator d = Discriminator::create(cfg, 3);
  const Tensor u0 = d.layers()[1].norm.u().clone();
  d.spectral_norm_update(30);
  const auto& layer = d.layers()[1];
  CHECK_FALSE(std::equal(u0.values().begin(), u0.values().end(), layer.norm.u().values().begin()));
  CHECK(layer.norm.sigma(layer.weight) == doctest::Approx(top_singular_value(layer.weight)).epsilon(1e-3));
}
