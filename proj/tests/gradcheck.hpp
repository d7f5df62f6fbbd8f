// Central finite-difference checks for every differentiable op, layer and
// loss. Meant for the 64-bit build (FRRN_DOUBLE).
#pragma once

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "frrn/discriminator.hpp"
#include "frrn/frrb.hpp"
#include "frrn/image_io.hpp"
#include "frrn/losses.hpp"
#include "frrn/network.hpp"
#include "frrn/ops.hpp"
#include "frrn/pconv.hpp"
#include "oracles.hpp"

namespace gradcheck {

using namespace frrn;

struct Case {
  std::string name;
  std::vector<Tensor> leaves;
  std::function<Tensor()> loss;
  double step = 1e-6;
};

struct Result {
  std::string name;
  int probes = 0;
  int failures = 0;
  double worst = 0;  // largest relative error seen
  std::string worst_detail;
  int kinks = 0;  // probes redrawn because the stencil straddled a kink
};

inline constexpr double kTolerance = 1e-6;

// Relative error with a floor on the denominator. A central difference
// carries roundoff of about eps * |f| / h, so derivatives smaller than that
// (e.g. a bias feeding an instance norm, exactly zero) cannot be resolved;
// for those the floor turns the test into |a - n| < noise.
inline double relative_error(double a, double n, double noise) {
  const double scale = std::max({std::abs(a), std::abs(n), noise / kTolerance});
  return std::abs(a - n) / scale;
}

// Leaky ReLU makes the networks piecewise smooth. When a kink lies within
// one step of the probe the central difference averages two slopes and says
// nothing about the gradient. The two one-sided differences then disagree far
// beyond what curvature explains; such probes are redrawn. This uses forward
// evaluations only, so a wrong backward pass cannot trigger it.
inline constexpr double kKinkTolerance = 1e-3;
inline constexpr int kMaxKinksPerProbe = 10;

inline bool straddles_kink(double up, double centre, double down, double step, double noise) {
  const double fwd = (up - centre) / step;
  const double bwd = (centre - down) / step;
  const double scale = std::max({std::abs(fwd), std::abs(bwd), 2 * noise / kTolerance});
  return std::abs(fwd - bwd) > kKinkTolerance * scale;
}

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

inline Result check(const Case& c, int probes, Rng& rng) {
  for (const auto& leaf : c.leaves) leaf.clear_grad();
  std::vector<std::vector<Real>> analytic;
  {
    Tape tape;
    TapeScope scope(tape);
    const Tensor loss = c.loss();
    backward(loss, tape);
    for (const auto& leaf : c.leaves) {
      auto g = leaf.grad();
      analytic.emplace_back(g.begin(), g.end());
      if (analytic.back().empty()) analytic.back().assign(leaf.numel(), Real(0));
    }
  }
  for (const auto& leaf : c.leaves) leaf.clear_grad();

  Result r;
  r.name = c.name;
  TapeScope no_grad(nullptr);
  const double centre = c.loss().item();
  for (int p = 0; p < probes; ++p) {
    const std::size_t li = static_cast<std::size_t>(p) % c.leaves.size();
    Tensor leaf = c.leaves[li];
    std::size_t idx = 0;
    double up = 0, down = 0, noise = 0;
    for (int attempt = 0;; ++attempt) {
      idx = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(leaf.numel()) - 1));
      const Real saved = leaf.values()[idx];
      leaf.values()[idx] = saved + c.step;
      up = c.loss().item();
      leaf.values()[idx] = saved - c.step;
      down = c.loss().item();
      leaf.values()[idx] = saved;
      noise = 8 * std::numeric_limits<double>::epsilon() * (std::abs(up) + std::abs(down)) /
              (2 * c.step);
      if (attempt == kMaxKinksPerProbe || !straddles_kink(up, centre, down, c.step, noise)) break;
      ++r.kinks;
    }
    const double numeric = (up - down) / (2 * c.step);
    const double err = relative_error(analytic[li][idx], numeric, noise);
    ++r.probes;
    if (err >= kTolerance) ++r.failures;
    if (err >= r.worst) {
      r.worst = err;
      r.worst_detail = "leaf " + std::to_string(li) + "[" + std::to_string(idx) + "] analytic " +
                       fmt(analytic[li][idx]) + " numeric " + fmt(numeric);
    }
  }
  return r;
}

// Reduces a tensor to a scalar through fixed random weights so every output
// element contributes with a different sign and magnitude.
inline Tensor project(const Tensor& out, std::uint64_t seed) {
  Rng rng(seed);
  const Tensor r = oracle::random_tensor(out.shape(), rng);
  return sum(mul(out, r));
}

inline Tensor leaf(const Shape& shape, Rng& rng, double lo = -1, double hi = 1) {
  Tensor t = oracle::random_tensor(shape, rng, lo, hi);
  t.set_requires_grad(true);
  return t;
}

inline std::vector<Tensor> leaves_of(const ParameterSet& params) {
  std::vector<Tensor> out;
  for (const auto& p : params) out.push_back(p.second);
  return out;
}

inline FrrbWidths tiny_widths() {
  FrrbWidths w;
  w.full = 3;
  w.low = {3, 4, 5};
  return w;
}

inline FrrnConfig tiny_network(int modules, int blocks) {
  FrrnConfig cfg;
  cfg.num_dilation_modules = modules;
  cfg.blocks_per_dilation = blocks;
  cfg.widths = tiny_widths();
  return cfg;
}

// A 16x16 hole mask with a centred 6x6 hole and a few random holes.
inline BinaryMask test_mask(int batch, int size, Rng& rng) {
  BinaryMask m = oracle::random_mask(batch, size, size, 0.15, rng);
  for (int n = 0; n < batch; ++n)
    for (int y = size / 2 - 3; y < size / 2 + 3; ++y)
      for (int x = size / 2 - 3; x < size / 2 + 3; ++x) m.set(n, y, x, false);
  return m;
}

inline std::vector<Case> layer_cases(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Case> cases;

  {
    Tensor x = leaf({2, 3, 7, 6}, rng), w = leaf({4, 3, 3, 3}, rng), b = leaf({4}, rng);
    cases.push_back({"conv2d k3 s1 p1", {x, w, b}, [=] { return project(conv2d(x, w, b, 1, 1), 1); }});
  }
  {
    Tensor x = leaf({1, 2, 8, 8}, rng), w = leaf({3, 2, 4, 4}, rng), b = leaf({3}, rng);
    cases.push_back({"conv2d k4 s2 p1", {x, w, b}, [=] { return project(conv2d(x, w, b, 2, 1), 2); }});
  }
  {
    Tensor x = leaf({2, 2, 9, 9}, rng), w = leaf({3, 2, 5, 5}, rng), b = leaf({3}, rng);
    const BinaryMask m = oracle::random_mask(2, 9, 9, 0.5, rng);
    cases.push_back({"partial_conv k5 s1", {x, w, b},
                     [=] { return project(partial_conv(x, m, w, b, 1, 2), 3); }});
  }
  {
    Tensor x = leaf({1, 3, 10, 10}, rng), w = leaf({2, 3, 3, 3}, rng), b = leaf({2}, rng);
    const BinaryMask m = oracle::random_mask(1, 10, 10, 0.6, rng);
    cases.push_back({"partial_conv k3 s2", {x, w, b},
                     [=] { return project(partial_conv(x, m, w, b, 2, 1), 4); }});
  }
  {
    PConvLayer layer = PConvLayer::create(3, 4, 5, 1, rng);
    for (auto& v : layer.bias.values()) v = static_cast<Real>(rng.uniform(-0.5, 0.5));
    Tensor x = leaf({1, 3, 8, 8}, rng);
    const BinaryMask m = oracle::random_mask(1, 8, 8, 0.4, rng);
    ParameterSet ps;
    layer.collect_parameters("l", ps);
    std::vector<Tensor> ls = leaves_of(ps);
    ls.push_back(x);
    cases.push_back({"pconv layer (norm + leaky)", ls,
                     [=] { return project(pconv_forward(x, m, layer).features, 5); }});
  }
  {
    Tensor x = leaf({2, 3, 5, 4}, rng), g = leaf({3}, rng, 0.5, 1.5), b = leaf({3}, rng);
    cases.push_back({"instance_norm", {x, g, b},
                     [=] { return project(instance_norm(x, g, b, Real(1e-5)), 6); }});
  }
  {
    Tensor x = leaf({1, 2, 5, 5}, rng);
    cases.push_back({"leaky_relu", {x}, [=] { return project(leaky_relu(x, Real(0.2)), 7); }});
  }
  {
    Tensor x = leaf({1, 2, 5, 5}, rng, -4, 4);
    cases.push_back({"softplus", {x}, [=] { return project(softplus(x), 8); }});
  }
  {
    Tensor x = leaf({2, 2, 3, 4}, rng);
    cases.push_back({"upsample_nearest", {x}, [=] { return project(upsample_nearest(x, 2), 9); }});
  }
  {
    Tensor x = leaf({2, 3, 4, 4}, rng);
    const Tensor m = oracle::random_mask(2, 4, 4, 0.5, rng).valid_tensor();
    cases.push_back({"mask_multiply", {x}, [=] { return project(mask_multiply(x, m), 10); }});
  }
  {
    Tensor base = leaf({1, 3, 6, 6}, rng), res = leaf({1, 3, 6, 6}, rng);
    const Tensor holes = oracle::random_mask(1, 6, 6, 0.5, rng).hole_tensor();
    cases.push_back({"masked_residual_add", {base, res},
                     [=] { return project(masked_residual_add(base, res, holes), 11); }});
  }
  {
    Tensor f = leaf({2, 4, 3, 5}, rng);
    cases.push_back({"gram", {f}, [=] { return project(gram(f), 12); }});
  }
  {
    Tensor w = leaf({5, 3, 2, 2}, rng);
    SpectralNorm sn(w.detach(), 99);
    sn.power_iteration(w.detach(), 3);
    const std::vector<Real> u(sn.u().values().begin(), sn.u().values().end());
    const std::vector<Real> v(sn.v().values().begin(), sn.v().values().end());
    cases.push_back({"spectral_normalize", {w},
                     [=] { return project(spectral_normalize(w, u, v), 13); }});
  }
  {
    Tensor a = leaf({3, 4}, rng), b = leaf({3, 4}, rng, 0.1, 1.0);
    cases.push_back({"elementwise add/sub/mul/scale/abs/sum/mean", {a, b}, [=] {
                       const Tensor t = abs(sub(mul(add(a, b), b), scale(a, Real(0.3))));
                       return add(sum(t), scale(mean(mul(a, a)), Real(2)));
                     }});
  }
  {
    Tensor a = Tensor::scalar(Real(0.7)), b = Tensor::scalar(Real(-1.3)), c = Tensor::scalar(Real(2.1));
    for (Tensor* t : {&a, &b, &c}) t->set_requires_grad(true);
    cases.push_back({"weighted_sum", {a, b, c}, [=] {
                       return weighted_sum({a, b, c}, {Real(20), Real(0.1), Real(-3)});
                     }});
  }
  {
    const FrrbParams p = FrrbParams::create(tiny_widths(), true, rng);
    Tensor img = leaf({1, 3, 16, 16}, rng, 0, 1);
    const BinaryMask m = test_mask(1, 16, rng);
    std::vector<Tensor> ls = leaves_of([&] { ParameterSet s; p.collect_parameters("b", s); return s; }());
    ls.push_back(img);
    cases.push_back({"frrb (both branches)", ls,
                     [=] { return project(frrb_forward(img, m, m, p).image, 14); }});
  }
  {
    const FrrbParams p = FrrbParams::create(tiny_widths(), false, rng);
    Tensor img = leaf({1, 3, 16, 16}, rng, 0, 1);
    const BinaryMask m = test_mask(1, 16, rng);
    ParameterSet s;
    p.collect_parameters("b", s);
    std::vector<Tensor> ls = leaves_of(s);
    ls.push_back(img);
    cases.push_back({"frrb (low-resolution branch only)", ls,
                     [=] { return project(frrb_forward(img, m, m, p, true).image, 15); }});
  }
  {
    const FrrnParams p = FrrnParams::create(tiny_network(2, 2), 7);
    Tensor img = leaf({1, 3, 16, 16}, rng, 0, 1);
    const BinaryMask m = test_mask(1, 16, rng);
    std::vector<Tensor> ls = leaves_of(p.parameters());
    ls.push_back(img);
    cases.push_back({"frrn forward (2 modules x 2 blocks)", ls,
                     [=] { return project(frrn_forward(img, m, p).final_image(), 16); }});
  }
  {
    DiscriminatorConfig cfg;
    cfg.widths = {3, 4, 4, 5, 1};
    Discriminator d = Discriminator::create(cfg, 11);
    d.spectral_norm_update(2);
    Tensor img = leaf({2, 3, 32, 32}, rng, 0, 1);
    std::vector<Tensor> ls = leaves_of(d.parameters());
    ls.push_back(img);
    cases.push_back({"discriminator", ls, [=] { return project(d.forward(img), 17); }});
  }
  return cases;
}

inline std::vector<Case> loss_cases(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Case> cases;
  {
    Tensor a = leaf({2, 3, 6, 6}, rng, 0, 1);
    const Tensor b = oracle::random_tensor({2, 3, 6, 6}, rng, 0, 1);
    cases.push_back({"rec_loss", {a}, [=] { return rec_loss(a, b); }});
  }
  {
    const FrrnParams p = FrrnParams::create(tiny_network(2, 1), 21);
    const Tensor truth = oracle::random_tensor({1, 3, 16, 16}, rng, 0, 1);
    const BinaryMask m = test_mask(1, 16, rng);
    const Tensor damaged = damage(truth, m);
    cases.push_back({"step_loss", leaves_of(p.parameters()),
                     [=] { return step_loss(frrn_forward(damaged, m, p), truth); }});
  }
  {
    const auto ex = StyleFeatureExtractor::random(5, {3, 4, 4, 5});
    Tensor a = leaf({1, 3, 32, 32}, rng, 0, 1);
    const Tensor b = oracle::random_tensor({1, 3, 32, 32}, rng, 0, 1);
    cases.push_back({"style_loss", {a}, [=] { return style_loss(a, b, ex); }});
  }
  {
    Tensor real = leaf({2, 1, 2, 2}, rng, -3, 3), fake = leaf({2, 1, 2, 2}, rng, -3, 3);
    cases.push_back({"discriminator_loss", {real, fake},
                     [=] { return discriminator_loss_from_logits(real, fake); }});
  }
  {
    Tensor fake = leaf({2, 1, 2, 2}, rng, -3, 3);
    cases.push_back({"generator_loss", {fake}, [=] { return generator_loss_from_logits(fake); }});
  }
  {
    DiscriminatorConfig cfg;
    cfg.widths = {3, 4, 4, 5, 1};
    const Discriminator d = Discriminator::create(cfg, 12);
    const Tensor truth = oracle::random_tensor({1, 3, 32, 32}, rng, 0, 1);
    Tensor restored = leaf({1, 3, 32, 32}, rng, 0, 1);
    std::vector<Tensor> ls = leaves_of(d.parameters());
    cases.push_back({"adversarial d_loss", ls, [=] { return adv_losses(d, truth, restored).d_loss; }});
    ls.push_back(restored);
    cases.push_back({"adversarial g_loss", ls, [=] { return adv_losses(d, truth, restored).g_loss; }});
  }
  {
    Tensor rec = Tensor::scalar(Real(0.3)), adv = Tensor::scalar(Real(0.7)),
           sty = Tensor::scalar(Real(0.01)), stp = Tensor::scalar(Real(0.2));
    for (Tensor* t : {&rec, &adv, &sty, &stp}) t->set_requires_grad(true);
    cases.push_back({"total_loss", {rec, adv, sty, stp},
                     [=] { return total_loss(LossBundle{rec, adv, sty, stp}, LossWeights{}); }});
  }
  return cases;
}

}  // namespace gradcheck
