#include "frrn/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

namespace {

using RowMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                shape_to_string(a.shape()) + " vs " + shape_to_string(b.shape()));
  }
}

void require_plane_mask(const Dims4& x, const Tensor& m, const char* op) {
  const Dims4 md = dims4(m, op);
  if (md.c != 1 || md.n != x.n || md.h != x.h || md.w != x.w) {
    throw std::invalid_argument(std::string(op) + ": mask shape " + shape_to_string(m.shape()) +
                                " does not match [" + std::to_string(x.n) + ",1," +
                                std::to_string(x.h) + "," + std::to_string(x.w) + "]");
  }
  if (m.requires_grad()) {
    throw std::invalid_argument(std::string(op) + ": mask must be a constant");
  }
}

// Unfolds one sample [C,H,W] into a [C*k*k, Ho*Wo] column matrix.
void im2col(const Real* image, int channels, int height, int width, int kernel, int stride,
            int padding, int out_h, int out_w, Real* col) {
  const std::size_t out_plane = static_cast<std::size_t>(out_h) * out_w;
  for (int c = 0; c < channels; ++c) {
    const Real* plane = image + static_cast<std::size_t>(c) * height * width;
    for (int ky = 0; ky < kernel; ++ky) {
      for (int kx = 0; kx < kernel; ++kx) {
        Real* row = col + (static_cast<std::size_t>(c) * kernel * kernel + ky * kernel + kx) *
                              out_plane;
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * stride - padding + ky;
          Real* dst = row + static_cast<std::size_t>(oy) * out_w;
          if (iy < 0 || iy >= height) {
            std::fill(dst, dst + out_w, Real(0));
            continue;
          }
          const Real* src = plane + static_cast<std::size_t>(iy) * width;
          for (int ox = 0; ox < out_w; ++ox) {
            const int ix = ox * stride - padding + kx;
            dst[ox] = (ix >= 0 && ix < width) ? src[ix] : Real(0);
          }
        }
      }
    }
  }
}

// Adjoint of im2col: scatters column gradients back into the image gradient.
void col2im_add(const Real* col, int channels, int height, int width, int kernel, int stride,
                int padding, int out_h, int out_w, Real* image) {
  const std::size_t out_plane = static_cast<std::size_t>(out_h) * out_w;
  for (int c = 0; c < channels; ++c) {
    Real* plane = image + static_cast<std::size_t>(c) * height * width;
    for (int ky = 0; ky < kernel; ++ky) {
      for (int kx = 0; kx < kernel; ++kx) {
        const Real* row =
            col + (static_cast<std::size_t>(c) * kernel * kernel + ky * kernel + kx) * out_plane;
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * stride - padding + ky;
          if (iy < 0 || iy >= height) {
            continue;
          }
          const Real* src = row + static_cast<std::size_t>(oy) * out_w;
          Real* dst = plane + static_cast<std::size_t>(iy) * width;
          for (int ox = 0; ox < out_w; ++ox) {
            const int ix = ox * stride - padding + kx;
            if (ix >= 0 && ix < width) {
              dst[ix] += src[ox];
            }
          }
        }
      }
    }
  }
}

template <typename Forward, typename Derivative>
Tensor unary_map(const Tensor& x, const char* op, Forward f, Derivative df) {
  Tensor out(x.shape());
  auto xs = x.values();
  auto ys = out.values();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ys[i] = f(xs[i]);
  }
  return finish_op(op, out, {x}, [x, df](std::span<const Real> g) mutable {
    auto gx = x.grad_accumulator();
    auto xs = x.values();
    for (std::size_t i = 0; i < gx.size(); ++i) {
      gx[i] += g[i] * df(xs[i]);
    }
  });
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  Tensor out(a.shape());
  auto as = a.values();
  auto bs = b.values();
  auto os = out.values();
  for (std::size_t i = 0; i < os.size(); ++i) {
    os[i] = as[i] + bs[i];
  }
  return finish_op("add", out, {a, b}, [a, b](std::span<const Real> g) mutable {
    for (const Tensor* t : {&a, &b}) {
      if (t->requires_grad()) {
        auto gt = t->grad_accumulator();
        for (std::size_t i = 0; i < gt.size(); ++i) {
          gt[i] += g[i];
        }
      }
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  Tensor out(a.shape());
  auto as = a.values();
  auto bs = b.values();
  auto os = out.values();
  for (std::size_t i = 0; i < os.size(); ++i) {
    os[i] = as[i] - bs[i];
  }
  return finish_op("sub", out, {a, b}, [a, b](std::span<const Real> g) mutable {
    if (a.requires_grad()) {
      auto ga = a.grad_accumulator();
      for (std::size_t i = 0; i < ga.size(); ++i) {
        ga[i] += g[i];
      }
    }
    if (b.requires_grad()) {
      auto gb = b.grad_accumulator();
      for (std::size_t i = 0; i < gb.size(); ++i) {
        gb[i] -= g[i];
      }
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  Tensor out(a.shape());
  auto as = a.values();
  auto bs = b.values();
  auto os = out.values();
  for (std::size_t i = 0; i < os.size(); ++i) {
    os[i] = as[i] * bs[i];
  }
  return finish_op("mul", out, {a, b}, [a, b](std::span<const Real> g) mutable {
    auto as = a.values();
    auto bs = b.values();
    if (a.requires_grad()) {
      auto ga = a.grad_accumulator();
      for (std::size_t i = 0; i < ga.size(); ++i) {
        ga[i] += g[i] * bs[i];
      }
    }
    if (b.requires_grad()) {
      auto gb = b.grad_accumulator();
      for (std::size_t i = 0; i < gb.size(); ++i) {
        gb[i] += g[i] * as[i];
      }
    }
  });
}

Tensor scale(const Tensor& a, Real factor) {
  return unary_map(
      a, "scale", [factor](Real v) { return v * factor; }, [factor](Real) { return factor; });
}

Tensor abs(const Tensor& a) {
  return unary_map(
      a, "abs", [](Real v) { return std::abs(v); },
      [](Real v) { return v > 0 ? Real(1) : (v < 0 ? Real(-1) : Real(0)); });
}

Tensor sum(const Tensor& a) {
  double total = 0;
  for (Real v : a.values()) {
    total += v;
  }
  Tensor out = Tensor::scalar(static_cast<Real>(total));
  return finish_op("sum", out, {a}, [a](std::span<const Real> g) mutable {
    for (Real& v : a.grad_accumulator()) {
      v += g[0];
    }
  });
}

Tensor mean(const Tensor& a) {
  if (a.numel() == 0) {
    throw std::invalid_argument("mean of an empty tensor");
  }
  double total = 0;
  for (Real v : a.values()) {
    total += v;
  }
  const double n = static_cast<double>(a.numel());
  Tensor out = Tensor::scalar(static_cast<Real>(total / n));
  return finish_op("mean", out, {a}, [a, n](std::span<const Real> g) mutable {
    const Real share = static_cast<Real>(g[0] / n);
    for (Real& v : a.grad_accumulator()) {
      v += share;
    }
  });
}

Tensor leaky_relu(const Tensor& x, Real slope) {
  return unary_map(
      x, "leaky_relu", [slope](Real v) { return v > 0 ? v : v * slope; },
      [slope](Real v) { return v > 0 ? Real(1) : slope; });
}

Tensor softplus(const Tensor& x) {
  return unary_map(
      x, "softplus",
      [](Real v) { return std::max(v, Real(0)) + std::log1p(std::exp(-std::abs(v))); },
      [](Real v) {
        // logistic function, split by sign for stability
        if (v >= 0) {
          return Real(1) / (Real(1) + std::exp(-v));
        }
        const Real e = std::exp(v);
        return e / (Real(1) + e);
      });
}

Tensor conv2d(const Tensor& input, const Tensor& weight, const Tensor& bias, int stride,
              int padding) {
  const Dims4 in = dims4(input, "conv2d input");
  const Dims4 wd = dims4(weight, "conv2d weight");
  if (wd.c != in.c) {
    throw std::invalid_argument("conv2d: input channels " + std::to_string(in.c) +
                                " != weight input channels " + std::to_string(wd.c));
  }
  if (wd.h != wd.w) {
    throw std::invalid_argument("conv2d: kernel must be square, got " +
                                shape_to_string(weight.shape()));
  }
  if (stride < 1 || padding < 0) {
    throw std::invalid_argument("conv2d: stride must be >= 1 and padding >= 0");
  }
  if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != wd.n)) {
    throw std::invalid_argument("conv2d: bias shape " + shape_to_string(bias.shape()) +
                                " does not match output channels " + std::to_string(wd.n));
  }
  const int k = wd.h;
  const int out_h = (in.h + 2 * padding - k) / stride + 1;
  const int out_w = (in.w + 2 * padding - k) / stride + 1;
  if (in.h + 2 * padding < k || out_h < 1) {
    throw std::invalid_argument("conv2d: height " + std::to_string(in.h) +
                                " too small for kernel " + std::to_string(k));
  }
  if (in.w + 2 * padding < k || out_w < 1) {
    throw std::invalid_argument("conv2d: width " + std::to_string(in.w) +
                                " too small for kernel " + std::to_string(k));
  }

  const int cols = in.c * k * k;
  const std::size_t out_plane = static_cast<std::size_t>(out_h) * out_w;
  const std::size_t in_sample = static_cast<std::size_t>(in.c) * in.plane();
  const std::size_t out_sample = static_cast<std::size_t>(wd.n) * out_plane;

  Tensor out({in.n, wd.n, out_h, out_w});
  std::vector<Real> col(static_cast<std::size_t>(cols) * out_plane);
  ConstMatrixMap w(weight.values().data(), wd.n, cols);
  for (int b = 0; b < in.n; ++b) {
    im2col(input.values().data() + b * in_sample, in.c, in.h, in.w, k, stride, padding, out_h,
           out_w, col.data());
    MatrixMap y(out.values().data() + b * out_sample, wd.n, static_cast<Eigen::Index>(out_plane));
    y.noalias() = w * ConstMatrixMap(col.data(), cols, static_cast<Eigen::Index>(out_plane));
    if (bias.defined()) {
      for (int o = 0; o < wd.n; ++o) {
        y.row(o).array() += bias.values()[o];
      }
    }
  }

  return finish_op(
      "conv2d", out, {input, weight, bias},
      [input, weight, bias, in, wd, k, stride, padding, out_h, out_w, cols, out_plane, in_sample,
       out_sample](std::span<const Real> g) mutable {
        std::vector<Real> col(static_cast<std::size_t>(cols) * out_plane);
        ConstMatrixMap w(weight.values().data(), wd.n, cols);
        for (int b = 0; b < in.n; ++b) {
          ConstMatrixMap gy(g.data() + b * out_sample, wd.n,
                            static_cast<Eigen::Index>(out_plane));
          if (weight.requires_grad()) {
            im2col(input.values().data() + b * in_sample, in.c, in.h, in.w, k, stride, padding,
                   out_h, out_w, col.data());
            MatrixMap gw(weight.grad_accumulator().data(), wd.n, cols);
            gw.noalias() +=
                gy * ConstMatrixMap(col.data(), cols, static_cast<Eigen::Index>(out_plane))
                         .transpose();
          }
          if (input.requires_grad()) {
            MatrixMap gcol(col.data(), cols, static_cast<Eigen::Index>(out_plane));
            gcol.noalias() = w.transpose() * gy;
            col2im_add(col.data(), in.c, in.h, in.w, k, stride, padding, out_h, out_w,
                       input.grad_accumulator().data() + b * in_sample);
          }
          if (bias.defined() && bias.requires_grad()) {
            auto gb = bias.grad_accumulator();
            for (int o = 0; o < wd.n; ++o) {
              gb[o] += gy.row(o).sum();
            }
          }
        }
      });
}

Tensor upsample_nearest(const Tensor& x, int factor) {
  const Dims4 d = dims4(x, "upsample_nearest input");
  if (factor < 1) {
    throw std::invalid_argument("upsample_nearest: factor must be positive");
  }
  const int oh = d.h * factor;
  const int ow = d.w * factor;
  Tensor out({d.n, d.c, oh, ow});
  auto xs = x.values();
  auto ys = out.values();
  const std::size_t planes = static_cast<std::size_t>(d.n) * d.c;
  for (std::size_t p = 0; p < planes; ++p) {
    const Real* src = xs.data() + p * d.plane();
    Real* dst = ys.data() + p * static_cast<std::size_t>(oh) * ow;
    for (int y = 0; y < oh; ++y) {
      for (int xx = 0; xx < ow; ++xx) {
        dst[static_cast<std::size_t>(y) * ow + xx] =
            src[static_cast<std::size_t>(y / factor) * d.w + xx / factor];
      }
    }
  }
  return finish_op("upsample_nearest", out, {x},
                   [x, d, factor, oh, ow, planes](std::span<const Real> g) mutable {
                     auto gx = x.grad_accumulator();
                     for (std::size_t p = 0; p < planes; ++p) {
                       const Real* src = g.data() + p * static_cast<std::size_t>(oh) * ow;
                       Real* dst = gx.data() + p * d.plane();
                       for (int y = 0; y < oh; ++y) {
                         for (int xx = 0; xx < ow; ++xx) {
                           dst[static_cast<std::size_t>(y / factor) * d.w + xx / factor] +=
                               src[static_cast<std::size_t>(y) * ow + xx];
                         }
                       }
                     }
                   });
}

Tensor instance_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, Real epsilon) {
  const Dims4 d = dims4(x, "instance_norm input");
  if (!(epsilon > 0)) {
    throw std::invalid_argument("instance_norm: epsilon must be positive");
  }
  if (d.plane() == 0) {
    throw std::invalid_argument("instance_norm: empty spatial slice");
  }
  for (const Tensor* p : {&gamma, &beta}) {
    if (p->rank() != 1 || p->dim(0) != d.c) {
      throw std::invalid_argument("instance_norm: affine parameter shape " +
                                  shape_to_string(p->shape()) + " does not match channels " +
                                  std::to_string(d.c));
    }
  }
  const std::size_t n = d.plane();
  const std::size_t planes = static_cast<std::size_t>(d.n) * d.c;
  Tensor out(x.shape());
  // normalized values and inverse deviations are kept for the backward pass
  auto xhat = std::make_shared<std::vector<Real>>(x.numel());
  auto inv_std = std::make_shared<std::vector<Real>>(planes);
  auto xs = x.values();
  auto ys = out.values();
  for (std::size_t p = 0; p < planes; ++p) {
    const int c = static_cast<int>(p % d.c);
    const Real* src = xs.data() + p * n;
    double mu = 0;
    for (std::size_t i = 0; i < n; ++i) {
      mu += src[i];
    }
    mu /= static_cast<double>(n);
    double var = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dv = src[i] - mu;
      var += dv * dv;
    }
    var /= static_cast<double>(n);
    const double is = 1.0 / std::sqrt(var + epsilon);
    (*inv_std)[p] = static_cast<Real>(is);
    const Real gm = gamma.values()[c];
    const Real bt = beta.values()[c];
    for (std::size_t i = 0; i < n; ++i) {
      const Real h = static_cast<Real>((src[i] - mu) * is);
      (*xhat)[p * n + i] = h;
      ys[p * n + i] = gm * h + bt;
    }
  }
  return finish_op(
      "instance_norm", out, {x, gamma, beta},
      [x, gamma, beta, d, n, planes, xhat, inv_std](std::span<const Real> g) mutable {
        for (std::size_t p = 0; p < planes; ++p) {
          const int c = static_cast<int>(p % d.c);
          const Real* gy = g.data() + p * n;
          const Real* h = xhat->data() + p * n;
          double sum_g = 0;
          double sum_gh = 0;
          for (std::size_t i = 0; i < n; ++i) {
            sum_g += gy[i];
            sum_gh += static_cast<double>(gy[i]) * h[i];
          }
          if (gamma.requires_grad()) {
            gamma.grad_accumulator()[c] += static_cast<Real>(sum_gh);
          }
          if (beta.requires_grad()) {
            beta.grad_accumulator()[c] += static_cast<Real>(sum_g);
          }
          if (x.requires_grad()) {
            const double gm = gamma.values()[c];
            const double is = (*inv_std)[p];
            const double nn = static_cast<double>(n);
            Real* gx = x.grad_accumulator().data() + p * n;
            for (std::size_t i = 0; i < n; ++i) {
              gx[i] += static_cast<Real>(gm * is / nn *
                                         (nn * gy[i] - sum_g - h[i] * sum_gh));
            }
          }
        }
      });
}

Tensor mask_multiply(const Tensor& x, const Tensor& m) {
  const Dims4 d = dims4(x, "mask_multiply input");
  require_plane_mask(d, m, "mask_multiply");
  Tensor out(x.shape());
  auto xs = x.values();
  auto ms = m.values();
  auto ys = out.values();
  const std::size_t plane = d.plane();
  for (int b = 0; b < d.n; ++b) {
    const Real* mp = ms.data() + b * plane;
    for (int c = 0; c < d.c; ++c) {
      const std::size_t base = (static_cast<std::size_t>(b) * d.c + c) * plane;
      for (std::size_t i = 0; i < plane; ++i) {
        ys[base + i] = xs[base + i] * mp[i];
      }
    }
  }
  return finish_op("mask_multiply", out, {x}, [x, m, d, plane](std::span<const Real> g) mutable {
    auto gx = x.grad_accumulator();
    auto ms = m.values();
    for (int b = 0; b < d.n; ++b) {
      const Real* mp = ms.data() + b * plane;
      for (int c = 0; c < d.c; ++c) {
        const std::size_t base = (static_cast<std::size_t>(b) * d.c + c) * plane;
        for (std::size_t i = 0; i < plane; ++i) {
          gx[base + i] += g[base + i] * mp[i];
        }
      }
    }
  });
}

Tensor masked_residual_add(const Tensor& base, const Tensor& residual, const Tensor& holes) {
  require_same_shape(base, residual, "masked_residual_add");
  const Dims4 d = dims4(base, "masked_residual_add base");
  require_plane_mask(d, holes, "masked_residual_add");
  Tensor out(base.shape());
  auto bs = base.values();
  auto rs = residual.values();
  auto hs = holes.values();
  auto ys = out.values();
  const std::size_t plane = d.plane();
  for (int b = 0; b < d.n; ++b) {
    for (int c = 0; c < d.c; ++c) {
      const std::size_t off = (static_cast<std::size_t>(b) * d.c + c) * plane;
      for (std::size_t i = 0; i < plane; ++i) {
        ys[off + i] = hs[b * plane + i] != 0 ? bs[off + i] + rs[off + i] : bs[off + i];
      }
    }
  }
  return finish_op("masked_residual_add", out, {base, residual},
                   [base, residual, holes, d, plane](std::span<const Real> g) mutable {
                     if (base.requires_grad()) {
                       auto gb = base.grad_accumulator();
                       for (std::size_t i = 0; i < gb.size(); ++i) {
                         gb[i] += g[i];
                       }
                     }
                     if (residual.requires_grad()) {
                       auto gr = residual.grad_accumulator();
                       auto hs = holes.values();
                       for (int b = 0; b < d.n; ++b) {
                         for (int c = 0; c < d.c; ++c) {
                           const std::size_t off = (static_cast<std::size_t>(b) * d.c + c) * plane;
                           for (std::size_t i = 0; i < plane; ++i) {
                             if (hs[b * plane + i] != 0) {
                               gr[off + i] += g[off + i];
                             }
                           }
                         }
                       }
                     }
                   });
}

Tensor gram(const Tensor& features) {
  const Dims4 d = dims4(features, "gram input");
  if (d.plane() == 0) {
    throw std::invalid_argument("gram: empty spatial extent");
  }
  const auto hw = static_cast<Eigen::Index>(d.plane());
  const Real norm = Real(1) / static_cast<Real>(static_cast<double>(d.c) * d.h * d.w);
  Tensor out({d.n, d.c, d.c});
  const std::size_t in_sample = static_cast<std::size_t>(d.c) * d.plane();
  const std::size_t out_sample = static_cast<std::size_t>(d.c) * d.c;
  for (int b = 0; b < d.n; ++b) {
    ConstMatrixMap f(features.values().data() + b * in_sample, d.c, hw);
    MatrixMap gm(out.values().data() + b * out_sample, d.c, d.c);
    gm.noalias() = norm * (f * f.transpose());
  }
  return finish_op("gram", out, {features},
                   [features, d, hw, norm, in_sample, out_sample](std::span<const Real> g) mutable {
                     for (int b = 0; b < d.n; ++b) {
                       ConstMatrixMap f(features.values().data() + b * in_sample, d.c, hw);
                       ConstMatrixMap gg(g.data() + b * out_sample, d.c, d.c);
                       MatrixMap gf(features.grad_accumulator().data() + b * in_sample, d.c, hw);
                       gf.noalias() += norm * ((gg + gg.transpose()) * f);
                     }
                   });
}

Tensor spectral_normalize(const Tensor& weight, std::span<const Real> u,
                          std::span<const Real> v) {
  if (weight.rank() < 1) {
    throw std::invalid_argument("spectral_normalize: weight must have rank >= 1");
  }
  const auto rows = static_cast<Eigen::Index>(weight.dim(0));
  const auto cols = static_cast<Eigen::Index>(weight.numel() / static_cast<std::size_t>(rows));
  if (static_cast<Eigen::Index>(u.size()) != rows || static_cast<Eigen::Index>(v.size()) != cols) {
    throw std::invalid_argument("spectral_normalize: u/v sizes (" + std::to_string(u.size()) +
                                ", " + std::to_string(v.size()) + ") do not match weight " +
                                shape_to_string(weight.shape()));
  }
  using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
  ConstMatrixMap w(weight.values().data(), rows, cols);
  const Vec uv = Eigen::Map<const Vec>(u.data(), rows);
  const Vec vv = Eigen::Map<const Vec>(v.data(), cols);
  const Real sigma = uv.dot(w * vv);
  Tensor out(weight.shape());
  if (!(sigma > 0)) {
    std::copy(weight.values().begin(), weight.values().end(), out.values().begin());
    return finish_op("spectral_normalize", out, {weight}, [weight](std::span<const Real> g) mutable {
      auto gw = weight.grad_accumulator();
      for (std::size_t i = 0; i < gw.size(); ++i) {
        gw[i] += g[i];
      }
    });
  }
  MatrixMap(out.values().data(), rows, cols) = w / sigma;
  return finish_op("spectral_normalize", out, {weight},
                   [weight, uv, vv, rows, cols, sigma](std::span<const Real> g) mutable {
                     ConstMatrixMap w(weight.values().data(), rows, cols);
                     ConstMatrixMap gm(g.data(), rows, cols);
                     MatrixMap gw(weight.grad_accumulator().data(), rows, cols);
                     // d(W / (u^T W v)) = G / sigma - <G, W> / sigma^2 * u v^T
                     const Real inner = (gm.array() * w.array()).sum();
                     gw.noalias() += gm / sigma;
                     gw.noalias() -= (inner / (sigma * sigma)) * (uv * vv.transpose());
                   });
}

Tensor weighted_sum(const std::vector<Tensor>& scalars, const std::vector<Real>& weights) {
  if (scalars.size() != weights.size()) {
    throw std::invalid_argument("weighted_sum: " + std::to_string(scalars.size()) +
                                " terms but " + std::to_string(weights.size()) + " weights");
  }
  double total = 0;
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    if (!scalars[i].is_scalar()) {
      throw std::invalid_argument("weighted_sum: term " + std::to_string(i) + " is not a scalar");
    }
    total += static_cast<double>(weights[i]) * scalars[i].item();
  }
  Tensor out = Tensor::scalar(static_cast<Real>(total));
  return finish_op("weighted_sum", out, scalars,
                   [scalars, weights](std::span<const Real> g) mutable {
                     for (std::size_t i = 0; i < scalars.size(); ++i) {
                       if (scalars[i].requires_grad()) {
                         scalars[i].grad_accumulator()[0] += g[0] * weights[i];
                       }
                     }
                   });
}

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
