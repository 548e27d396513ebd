// Copyright 2026 The SPADE Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "ops_internal.hpp"
#include "spade/nn/ops.hpp"

namespace spade::nn {

using detail::make_result;
using detail::NodePtr;
using detail::require;

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

void require_nchw(const Tensor& x, const char* op) {
  require(x.rank() == 4, std::string(op) + ": expected [N, C, H, W], got " +
                             to_string(x.shape()));
}

struct ConvGeometry {
  std::int64_t n, cin, h, w, cout, cg, coutg, kh, kw, ho, wo;
  int stride, pad, groups;
  std::int64_t patch() const { return cg * kh * kw; }
  std::int64_t pixels() const { return ho * wo; }
  bool pointwise() const { return kh == 1 && kw == 1 && stride == 1 && pad == 0; }
};

// cols[(c * kh + i) * kw + j][oh * wo + ow] for channels [c0, c0 + cg).
void im2col(const double* x, const ConvGeometry& g, std::int64_t c0, double* cols) {
  for (std::int64_t c = 0; c < g.cg; ++c) {
    const double* plane = x + (c0 + c) * g.h * g.w;
    for (std::int64_t i = 0; i < g.kh; ++i) {
      for (std::int64_t j = 0; j < g.kw; ++j) {
        double* row = cols + ((c * g.kh + i) * g.kw + j) * g.pixels();
        for (std::int64_t oh = 0; oh < g.ho; ++oh) {
          const std::int64_t ih = oh * g.stride - g.pad + i;
          double* dst = row + oh * g.wo;
          if (ih < 0 || ih >= g.h) {
            std::fill_n(dst, g.wo, 0.0);
            continue;
          }
          const double* src = plane + ih * g.w;
          for (std::int64_t ow = 0; ow < g.wo; ++ow) {
            const std::int64_t iw = ow * g.stride - g.pad + j;
            dst[ow] = (iw >= 0 && iw < g.w) ? src[iw] : 0.0;
          }
        }
      }
    }
  }
}

void col2im(const double* cols, const ConvGeometry& g, std::int64_t c0, double* dx) {
  for (std::int64_t c = 0; c < g.cg; ++c) {
    double* plane = dx + (c0 + c) * g.h * g.w;
    for (std::int64_t i = 0; i < g.kh; ++i) {
      for (std::int64_t j = 0; j < g.kw; ++j) {
        const double* row = cols + ((c * g.kh + i) * g.kw + j) * g.pixels();
        for (std::int64_t oh = 0; oh < g.ho; ++oh) {
          const std::int64_t ih = oh * g.stride - g.pad + i;
          if (ih < 0 || ih >= g.h) continue;
          const double* src = row + oh * g.wo;
          double* dst = plane + ih * g.w;
          for (std::int64_t ow = 0; ow < g.wo; ++ow) {
            const std::int64_t iw = ow * g.stride - g.pad + j;
            if (iw >= 0 && iw < g.w) dst[iw] += src[ow];
          }
        }
      }
    }
  }
}

}  // namespace

Tensor conv2d(const Tensor& x, const Tensor& weight, const Tensor& bias,
              const Conv2dOptions& options) {
  require_nchw(x, "conv2d");
  require(weight.rank() == 4, "conv2d: weight must be [Cout, Cin/groups, kh, kw], got " +
                                  to_string(weight.shape()));
  ConvGeometry g{};
  g.n = x.dim(0);
  g.cin = x.dim(1);
  g.h = x.dim(2);
  g.w = x.dim(3);
  g.cout = weight.dim(0);
  g.kh = weight.dim(2);
  g.kw = weight.dim(3);
  g.stride = options.stride;
  g.pad = options.padding;
  g.groups = options.groups;
  require(g.groups >= 1 && g.cin % g.groups == 0 && g.cout % g.groups == 0,
          "conv2d: groups do not divide channels");
  g.cg = g.cin / g.groups;
  g.coutg = g.cout / g.groups;
  require(weight.dim(1) == g.cg, "conv2d: input " + to_string(x.shape()) +
                                     " incompatible with weight " + to_string(weight.shape()));
  require(g.stride >= 1 && g.pad >= 0, "conv2d: invalid stride/padding");
  g.ho = (g.h + 2 * g.pad - g.kh) / g.stride + 1;
  g.wo = (g.w + 2 * g.pad - g.kw) / g.stride + 1;
  require(g.ho > 0 && g.wo > 0, "conv2d: kernel larger than padded input " + to_string(x.shape()));
  if (bias.defined()) {
    require(bias.numel() == g.cout, "conv2d: bias " + to_string(bias.shape()) +
                                        " for " + std::to_string(g.cout) + " outputs");
  }

  std::vector<double> out(static_cast<std::size_t>(g.n * g.cout * g.pixels()));
  std::vector<double> cols(g.pointwise() ? 0 : static_cast<std::size_t>(g.patch() * g.pixels()));
  const double* xd = x.data().data();
  const double* wd = weight.data().data();
  for (std::int64_t n = 0; n < g.n; ++n) {
    const double* xn = xd + n * g.cin * g.h * g.w;
    for (std::int64_t gi = 0; gi < g.groups; ++gi) {
      const double* src = xn + gi * g.cg * g.h * g.w;
      if (!g.pointwise()) {
        im2col(xn, g, gi * g.cg, cols.data());
        src = cols.data();
      }
      MutMap(out.data() + (n * g.cout + gi * g.coutg) * g.pixels(), g.coutg, g.pixels())
          .noalias() = ConstMap(wd + gi * g.coutg * g.patch(), g.coutg, g.patch()) *
                       ConstMap(src, g.patch(), g.pixels());
    }
    if (bias.defined()) {
      for (std::int64_t co = 0; co < g.cout; ++co) {
        double* o = out.data() + (n * g.cout + co) * g.pixels();
        const double b = bias.data()[co];
        for (std::int64_t p = 0; p < g.pixels(); ++p) o[p] += b;
      }
    }
  }

  NodePtr nx = x.node(), nw = weight.node();
  NodePtr nb = bias.defined() ? bias.node() : nullptr;
  std::vector<NodePtr> inputs{nx, nw};
  if (nb) inputs.push_back(nb);
  return make_result({g.n, g.cout, g.ho, g.wo}, std::move(out), inputs, [nx, nw, nb, g](Node& self) {
    std::vector<double> cols(g.pointwise() ? 0 : static_cast<std::size_t>(g.patch() * g.pixels()));
    std::vector<double> dcols(cols.size());
    double* gw = nw->requires_grad ? nw->ensure_grad().data() : nullptr;
    double* gx = nx->requires_grad ? nx->ensure_grad().data() : nullptr;
    for (std::int64_t n = 0; n < g.n; ++n) {
      const double* xn = nx->data.data() + n * g.cin * g.h * g.w;
      for (std::int64_t gi = 0; gi < g.groups; ++gi) {
        ConstMap G(self.grad.data() + (n * g.cout + gi * g.coutg) * g.pixels(), g.coutg,
                   g.pixels());
        ConstMap W(nw->data.data() + gi * g.coutg * g.patch(), g.coutg, g.patch());
        if (gw) {
          const double* src = xn + gi * g.cg * g.h * g.w;
          if (!g.pointwise()) {
            im2col(xn, g, gi * g.cg, cols.data());
            src = cols.data();
          }
          MutMap(gw + gi * g.coutg * g.patch(), g.coutg, g.patch()).noalias() +=
              G * ConstMap(src, g.patch(), g.pixels()).transpose();
        }
        if (gx) {
          double* xg = gx + n * g.cin * g.h * g.w;
          if (g.pointwise()) {
            MutMap(xg + gi * g.cg * g.h * g.w, g.patch(), g.pixels()).noalias() +=
                W.transpose() * G;
          } else {
            MutMap(dcols.data(), g.patch(), g.pixels()).noalias() = W.transpose() * G;
            col2im(dcols.data(), g, gi * g.cg, xg);
          }
        }
      }
    }
    if (nb && nb->requires_grad) {
      auto& gb = nb->ensure_grad();
      for (std::int64_t n = 0; n < g.n; ++n) {
        for (std::int64_t co = 0; co < g.cout; ++co) {
          const double* src = self.grad.data() + (n * g.cout + co) * g.pixels();
          double acc = 0.0;
          for (std::int64_t p = 0; p < g.pixels(); ++p) acc += src[p];
          gb[co] += acc;
        }
      }
    }
  });
}

Tensor batch_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  Tensor& running_mean, Tensor& running_var, bool training,
                  double momentum, double eps) {
  require_nchw(x, "batch_norm");
  const std::int64_t n = x.dim(0), c = x.dim(1), hw = x.dim(2) * x.dim(3);
  require(gamma.numel() == c && beta.numel() == c && running_mean.numel() == c &&
              running_var.numel() == c,
          "batch_norm: parameters do not match " + std::to_string(c) + " channels");
  const std::int64_t m = n * hw;
  require(!training || m > 1, "batch_norm: training needs more than one value per channel");
  const auto& in = x.data();
  std::vector<double> mu(c), inv_std(c);
  for (std::int64_t ch = 0; ch < c; ++ch) {
    double mean = 0.0, var = 0.0;
    if (training) {
      for (std::int64_t b = 0; b < n; ++b) {
        const double* p = in.data() + (b * c + ch) * hw;
        for (std::int64_t i = 0; i < hw; ++i) mean += p[i];
      }
      mean /= static_cast<double>(m);
      for (std::int64_t b = 0; b < n; ++b) {
        const double* p = in.data() + (b * c + ch) * hw;
        for (std::int64_t i = 0; i < hw; ++i) var += (p[i] - mean) * (p[i] - mean);
      }
      var /= static_cast<double>(m);
      auto& rm = running_mean.mutable_data();
      auto& rv = running_var.mutable_data();
      rm[ch] = (1.0 - momentum) * rm[ch] + momentum * mean;
      rv[ch] = (1.0 - momentum) * rv[ch] +
               momentum * var * static_cast<double>(m) / static_cast<double>(m - 1);
    } else {
      mean = running_mean.data()[ch];
      var = running_var.data()[ch];
    }
    mu[ch] = mean;
    inv_std[ch] = 1.0 / std::sqrt(var + eps);
  }
  std::vector<double> out(in.size()), xhat(in.size());
  for (std::int64_t b = 0; b < n; ++b) {
    for (std::int64_t ch = 0; ch < c; ++ch) {
      const std::int64_t base = (b * c + ch) * hw;
      const double gm = gamma.data()[ch], bt = beta.data()[ch];
      for (std::int64_t i = 0; i < hw; ++i) {
        const double h = (in[base + i] - mu[ch]) * inv_std[ch];
        xhat[base + i] = h;
        out[base + i] = gm * h + bt;
      }
    }
  }
  NodePtr nx = x.node(), ng = gamma.node(), nbt = beta.node();
  return make_result(x.shape(), std::move(out), {nx, ng, nbt},
                     [nx, ng, nbt, xhat = std::move(xhat), inv_std, training, n, c, hw,
                      m](Node& self) {
                       const auto& g = self.grad;
                       for (std::int64_t ch = 0; ch < c; ++ch) {
                         double sg = 0.0, sgh = 0.0;
                         for (std::int64_t b = 0; b < n; ++b) {
                           const std::int64_t base = (b * c + ch) * hw;
                           for (std::int64_t i = 0; i < hw; ++i) {
                             sg += g[base + i];
                             sgh += g[base + i] * xhat[base + i];
                           }
                         }
                         if (ng->requires_grad) ng->ensure_grad()[ch] += sgh;
                         if (nbt->requires_grad) nbt->ensure_grad()[ch] += sg;
                         if (!nx->requires_grad) continue;
                         auto& gx = nx->ensure_grad();
                         const double k = ng->data[ch] * inv_std[ch];
                         const double inv_m = 1.0 / static_cast<double>(m);
                         for (std::int64_t b = 0; b < n; ++b) {
                           const std::int64_t base = (b * c + ch) * hw;
                           for (std::int64_t i = 0; i < hw; ++i) {
                             if (training) {
                               gx[base + i] +=
                                   k * (g[base + i] - inv_m * sg - xhat[base + i] * inv_m * sgh);
                             } else {
                               gx[base + i] += k * g[base + i];
                             }
                           }
                         }
                       }
                     });
}

namespace {

Tensor pool2d(const Tensor& x, int kernel, bool take_max) {
  require_nchw(x, take_max ? "max_pool2d" : "avg_pool2d");
  require(kernel >= 1, "pool2d: kernel must be >= 1");
  const std::int64_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  const std::int64_t ho = h / kernel, wo = w / kernel;
  require(ho > 0 && wo > 0, "pool2d: input " + to_string(x.shape()) + " smaller than kernel");
  std::vector<double> out(static_cast<std::size_t>(n * c * ho * wo));
  std::vector<std::int64_t> arg(take_max ? out.size() : 0);
  const auto& in = x.data();
  const double inv = 1.0 / static_cast<double>(kernel * kernel);
  for (std::int64_t plane = 0; plane < n * c; ++plane) {
    const double* src = in.data() + plane * h * w;
    for (std::int64_t i = 0; i < ho; ++i) {
      for (std::int64_t j = 0; j < wo; ++j) {
        const std::size_t o = static_cast<std::size_t>((plane * ho + i) * wo + j);
        double acc = 0.0;
        double best = -std::numeric_limits<double>::infinity();
        std::int64_t best_at = -1;
        for (int a = 0; a < kernel; ++a) {
          for (int b = 0; b < kernel; ++b) {
            const std::int64_t at = (i * kernel + a) * w + j * kernel + b;
            acc += src[at];
            if (best_at < 0 || src[at] > best) {
              best = src[at];
              best_at = at;
            }
          }
        }
        if (take_max) {
          out[o] = best;
          arg[o] = plane * h * w + best_at;
        } else {
          out[o] = acc * inv;
        }
      }
    }
  }
  NodePtr nx = x.node();
  return make_result({n, c, ho, wo}, std::move(out), {nx},
                     [nx, arg = std::move(arg), take_max, kernel, n, c, h, w, ho, wo,
                      inv](Node& self) {
                       auto& gx = nx->ensure_grad();
                       if (take_max) {
                         for (std::size_t o = 0; o < arg.size(); ++o) gx[arg[o]] += self.grad[o];
                         return;
                       }
                       for (std::int64_t plane = 0; plane < n * c; ++plane) {
                         for (std::int64_t i = 0; i < ho; ++i) {
                           for (std::int64_t j = 0; j < wo; ++j) {
                             const double g = self.grad[(plane * ho + i) * wo + j] * inv;
                             for (int a = 0; a < kernel; ++a) {
                               for (int b = 0; b < kernel; ++b) {
                                 gx[plane * h * w + (i * kernel + a) * w + j * kernel + b] += g;
                               }
                             }
                           }
                         }
                       }
                     });
}

struct Axis {
  std::vector<std::int64_t> lo, hi;
  std::vector<double> frac;
};

Axis resize_axis(std::int64_t in, std::int64_t out) {
  Axis a;
  a.lo.resize(out);
  a.hi.resize(out);
  a.frac.resize(out);
  const double ratio = static_cast<double>(in) / static_cast<double>(out);
  for (std::int64_t o = 0; o < out; ++o) {
    double src = (static_cast<double>(o) + 0.5) * ratio - 0.5;
    if (src < 0.0) src = 0.0;
    std::int64_t lo = static_cast<std::int64_t>(std::floor(src));
    if (lo > in - 1) lo = in - 1;
    a.lo[o] = lo;
    a.hi[o] = std::min(lo + 1, in - 1);
    a.frac[o] = src - static_cast<double>(lo);
  }
  return a;
}

}  // namespace

Tensor avg_pool2d(const Tensor& x, int kernel) { return pool2d(x, kernel, false); }
Tensor max_pool2d(const Tensor& x, int kernel) { return pool2d(x, kernel, true); }

Tensor resize_bilinear(const Tensor& x, std::int64_t out_h, std::int64_t out_w) {
  require_nchw(x, "resize_bilinear");
  require(out_h > 0 && out_w > 0, "resize_bilinear: empty output size");
  const std::int64_t planes = x.dim(0) * x.dim(1), h = x.dim(2), w = x.dim(3);
  const Axis ay = resize_axis(h, out_h), ax = resize_axis(w, out_w);
  std::vector<double> out(static_cast<std::size_t>(planes * out_h * out_w));
  const auto& in = x.data();
  for (std::int64_t p = 0; p < planes; ++p) {
    const double* src = in.data() + p * h * w;
    double* dst = out.data() + p * out_h * out_w;
    for (std::int64_t i = 0; i < out_h; ++i) {
      const double fy = ay.frac[i];
      const double* r0 = src + ay.lo[i] * w;
      const double* r1 = src + ay.hi[i] * w;
      for (std::int64_t j = 0; j < out_w; ++j) {
        const double fx = ax.frac[j];
        const double top = (1.0 - fx) * r0[ax.lo[j]] + fx * r0[ax.hi[j]];
        const double bot = (1.0 - fx) * r1[ax.lo[j]] + fx * r1[ax.hi[j]];
        dst[i * out_w + j] = (1.0 - fy) * top + fy * bot;
      }
    }
  }
  NodePtr nx = x.node();
  return make_result({x.dim(0), x.dim(1), out_h, out_w}, std::move(out), {nx},
                     [nx, ay, ax, planes, h, w, out_h, out_w](Node& self) {
                       auto& gx = nx->ensure_grad();
                       for (std::int64_t p = 0; p < planes; ++p) {
                         double* dst = gx.data() + p * h * w;
                         const double* g = self.grad.data() + p * out_h * out_w;
                         for (std::int64_t i = 0; i < out_h; ++i) {
                           const double fy = ay.frac[i];
                           for (std::int64_t j = 0; j < out_w; ++j) {
                             const double fx = ax.frac[j];
                             const double v = g[i * out_w + j];
                             dst[ay.lo[i] * w + ax.lo[j]] += (1 - fy) * (1 - fx) * v;
                             dst[ay.lo[i] * w + ax.hi[j]] += (1 - fy) * fx * v;
                             dst[ay.hi[i] * w + ax.lo[j]] += fy * (1 - fx) * v;
                             dst[ay.hi[i] * w + ax.hi[j]] += fy * fx * v;
                           }
                         }
                       }
                     });
}

Tensor upsample2x(const Tensor& x) {
  require_nchw(x, "upsample2x");
  return resize_bilinear(x, 2 * x.dim(2), 2 * x.dim(3));
}

Tensor upsample_onto(const Tensor& x, std::int64_t out_h, std::int64_t out_w) {
  require_nchw(x, "upsample_onto");
  const auto fits = [](std::int64_t small, std::int64_t big) { return (big + 1) / 2 == small; };
  require(fits(x.dim(2), out_h) && fits(x.dim(3), out_w),
          "upsample_onto: " + to_string(x.shape()) + " cannot be upsampled onto " +
              std::to_string(out_h) + "x" + std::to_string(out_w));
  return resize_bilinear(x, out_h, out_w);
}

Tensor bilinear_sample(const Tensor& x, const Tensor& loc) {
  require_nchw(x, "bilinear_sample");
  require(loc.rank() == 3 && loc.dim(2) == 2,
          "bilinear_sample: locations must be [N, L, 2], got " + to_string(loc.shape()));
  const std::int64_t nx_batch = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  const std::int64_t n = loc.dim(0), l = loc.dim(1);
  require(nx_batch == 1 || nx_batch == n,
          "bilinear_sample: feature batch " + to_string(x.shape()) +
              " incompatible with locations " + to_string(loc.shape()));
  std::vector<double> out(static_cast<std::size_t>(n * c * l));
  const auto& in = x.data();
  const auto& pos = loc.data();
  for (std::int64_t b = 0; b < n; ++b) {
    const double* feat = in.data() + (nx_batch == 1 ? 0 : b) * c * h * w;
    for (std::int64_t k = 0; k < l; ++k) {
      const double r = std::clamp(pos[(b * l + k) * 2], 0.0, static_cast<double>(h - 1));
      const double q = std::clamp(pos[(b * l + k) * 2 + 1], 0.0, static_cast<double>(w - 1));
      const std::int64_t r0 = static_cast<std::int64_t>(std::floor(r));
      const std::int64_t q0 = static_cast<std::int64_t>(std::floor(q));
      const std::int64_t r1 = std::min(r0 + 1, h - 1), q1 = std::min(q0 + 1, w - 1);
      const double fr = r - r0, fq = q - q0;
      for (std::int64_t ch = 0; ch < c; ++ch) {
        const double* p = feat + ch * h * w;
        out[(b * c + ch) * l + k] = (1 - fr) * ((1 - fq) * p[r0 * w + q0] + fq * p[r0 * w + q1]) +
                                    fr * ((1 - fq) * p[r1 * w + q0] + fq * p[r1 * w + q1]);
      }
    }
  }
  NodePtr nfeat = x.node(), nloc = loc.node();
  return make_result({n, c, l}, std::move(out), {nfeat, nloc},
                     [nfeat, nloc, nx_batch, c, h, w, n, l](Node& self) {
                       double* gfeat = nfeat->requires_grad ? nfeat->ensure_grad().data() : nullptr;
                       double* gloc = nloc->requires_grad ? nloc->ensure_grad().data() : nullptr;
                       const auto& pos = nloc->data;
                       for (std::int64_t b = 0; b < n; ++b) {
                         const std::int64_t fb = (nx_batch == 1 ? 0 : b) * c * h * w;
                         const double* feat = nfeat->data.data() + fb;
                         for (std::int64_t k = 0; k < l; ++k) {
                           const double rr = pos[(b * l + k) * 2], qq = pos[(b * l + k) * 2 + 1];
                           const double r = std::clamp(rr, 0.0, static_cast<double>(h - 1));
                           const double q = std::clamp(qq, 0.0, static_cast<double>(w - 1));
                           const bool free_r = rr > 0.0 && rr < static_cast<double>(h - 1);
                           const bool free_q = qq > 0.0 && qq < static_cast<double>(w - 1);
                           const std::int64_t r0 = static_cast<std::int64_t>(std::floor(r));
                           const std::int64_t q0 = static_cast<std::int64_t>(std::floor(q));
                           const std::int64_t r1 = std::min(r0 + 1, h - 1), q1 = std::min(q0 + 1, w - 1);
                           const double fr = r - r0, fq = q - q0;
                           double dr = 0.0, dq = 0.0;
                           for (std::int64_t ch = 0; ch < c; ++ch) {
                             const double g = self.grad[(b * c + ch) * l + k];
                             if (g == 0.0) continue;
                             const double* p = feat + ch * h * w;
                             const double v00 = p[r0 * w + q0], v01 = p[r0 * w + q1];
                             const double v10 = p[r1 * w + q0], v11 = p[r1 * w + q1];
                             if (gfeat) {
                               double* gp = gfeat + fb + ch * h * w;
                               gp[r0 * w + q0] += g * (1 - fr) * (1 - fq);
                               gp[r0 * w + q1] += g * (1 - fr) * fq;
                               gp[r1 * w + q0] += g * fr * (1 - fq);
                               gp[r1 * w + q1] += g * fr * fq;
                             }
                             dr += g * ((1 - fq) * (v10 - v00) + fq * (v11 - v01));
                             dq += g * ((1 - fr) * (v01 - v00) + fr * (v11 - v10));
                           }
                           if (gloc) {
                             if (free_r) gloc[(b * l + k) * 2] += dr;
                             if (free_q) gloc[(b * l + k) * 2 + 1] += dq;
                           }
                         }
                       }
                     });
}

}  // namespace spade::nn
