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

#include "spade/nn/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "ops_internal.hpp"

namespace spade::nn {

using detail::contiguous_strides;
using detail::for_each_offset2;
using detail::make_result;
using detail::NodePtr;
using detail::require;

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

// ---------------------------------------------------------------- binary

struct Broadcast {
  Shape out;
  std::vector<std::int64_t> sa, sb;
  bool same = false;
};

Broadcast broadcast(const Tensor& a, const Tensor& b, const char* op) {
  const Shape& x = a.shape();
  const Shape& y = b.shape();
  require(x.size() == y.size(), std::string(op) + ": rank mismatch " +
                                    to_string(x) + " vs " + to_string(y));
  Broadcast bc;
  bc.same = x == y;
  bc.out.resize(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) {
    require(x[d] == y[d] || x[d] == 1 || y[d] == 1,
            std::string(op) + ": cannot broadcast " + to_string(x) + " with " +
                to_string(y));
    bc.out[d] = std::max(x[d], y[d]);
  }
  bc.sa = contiguous_strides(x);
  bc.sb = contiguous_strides(y);
  for (std::size_t d = 0; d < x.size(); ++d) {
    if (x[d] == 1 && bc.out[d] != 1) bc.sa[d] = 0;
    if (y[d] == 1 && bc.out[d] != 1) bc.sb[d] = 0;
  }
  return bc;
}

// fwd(a, b) -> y; da(a, b, y) and db(a, b, y) give local partials.
template <class Fwd, class Da, class Db>
Tensor binary(const Tensor& a, const Tensor& b, const char* name, Fwd fwd,
              Da da, Db db) {
  Broadcast bc = broadcast(a, b, name);
  const auto& xa = a.data();
  const auto& xb = b.data();
  std::vector<double> out(static_cast<std::size_t>(numel(bc.out)));
  if (bc.same) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(xa[i], xb[i]);
  } else {
    for_each_offset2(bc.out, bc.sa, bc.sb, [&](std::int64_t i, std::int64_t ia, std::int64_t ib) {
      out[i] = fwd(xa[ia], xb[ib]);
    });
  }
  NodePtr na = a.node(), nb = b.node();
  Shape shape = bc.out;
  return make_result(std::move(shape), std::move(out), {na, nb},
                     [na, nb, bc, da, db](Node& self) {
                       const auto& g = self.grad;
                       const auto& y = self.data;
                       const auto& va = na->data;
                       const auto& vb = nb->data;
                       std::vector<double>* ga = na->requires_grad ? &na->ensure_grad() : nullptr;
                       std::vector<double>* gb = nb->requires_grad ? &nb->ensure_grad() : nullptr;
                       auto step = [&](std::int64_t i, std::int64_t ia, std::int64_t ib) {
                         if (ga) (*ga)[ia] += g[i] * da(va[ia], vb[ib], y[i]);
                         if (gb) (*gb)[ib] += g[i] * db(va[ia], vb[ib], y[i]);
                       };
                       if (bc.same) {
                         for (std::size_t i = 0; i < g.size(); ++i) step(i, i, i);
                       } else {
                         for_each_offset2(bc.out, bc.sa, bc.sb, step);
                       }
                     });
}

template <class Fwd, class Df>
Tensor unary(const Tensor& x, Fwd fwd, Df df) {
  const auto& in = x.data();
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = fwd(in[i]);
  NodePtr nx = x.node();
  return make_result(x.shape(), std::move(out), {nx}, [nx, df](Node& self) {
    auto& gx = nx->ensure_grad();
    for (std::size_t i = 0; i < gx.size(); ++i) {
      gx[i] += self.grad[i] * df(nx->data[i], self.data[i]);
    }
  });
}

double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

int normalize_axis(int axis, int rank, const char* op) {
  if (axis < 0) axis += rank;
  require(axis >= 0 && axis < rank,
          std::string(op) + ": axis out of range for rank " + std::to_string(rank));
  return axis;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return binary(
      a, b, "add", [](double x, double y) { return x + y; },
      [](double, double, double) { return 1.0; },
      [](double, double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary(
      a, b, "sub", [](double x, double y) { return x - y; },
      [](double, double, double) { return 1.0; },
      [](double, double, double) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary(
      a, b, "mul", [](double x, double y) { return x * y; },
      [](double, double y, double) { return y; },
      [](double x, double, double) { return x; });
}

Tensor div(const Tensor& a, const Tensor& b) {
  return binary(
      a, b, "div", [](double x, double y) { return x / y; },
      [](double, double y, double) { return 1.0 / y; },
      [](double, double y, double out) { return -out / y; });
}

Tensor scale(const Tensor& a, double factor) {
  return unary(
      a, [factor](double x) { return x * factor; },
      [factor](double, double) { return factor; });
}

Tensor add_scalar(const Tensor& a, double value) {
  return unary(
      a, [value](double x) { return x + value; },
      [](double, double) { return 1.0; });
}

Tensor relu(const Tensor& x) {
  return unary(
      x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor gelu(const Tensor& x) {
  return unary(
      x, [](double v) { return 0.5 * v * (1.0 + std::erf(v * M_SQRT1_2)); },
      [](double v, double) {
        const double cdf = 0.5 * (1.0 + std::erf(v * M_SQRT1_2));
        const double pdf = std::exp(-0.5 * v * v) * (0.5 * M_2_SQRTPI * M_SQRT1_2);
        return cdf + v * pdf;
      });
}

Tensor sigmoid(const Tensor& x) {
  return unary(
      x, [](double v) { return stable_sigmoid(v); },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor& x) {
  return unary(
      x, [](double v) { return std::tanh(v); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor softplus(const Tensor& x) {
  return unary(
      x,
      [](double v) { return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v)); },
      [](double v, double) { return stable_sigmoid(v); });
}

Tensor exp(const Tensor& x) {
  return unary(
      x, [](double v) { return std::exp(v); },
      [](double, double y) { return y; });
}

Tensor log(const Tensor& x) {
  for (double v : x.data()) {
    if (!(v > 0.0)) throw DomainError("log of non-positive value " + std::to_string(v));
  }
  return unary(
      x, [](double v) { return std::log(v); },
      [](double v, double) { return 1.0 / v; });
}

Tensor sqrt(const Tensor& x) {
  return unary(
      x, [](double v) { return std::sqrt(v); },
      [](double, double y) { return y > 0.0 ? 0.5 / y : 0.0; });
}

Tensor abs(const Tensor& x) {
  return unary(
      x, [](double v) { return std::fabs(v); },
      [](double v, double) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

Tensor square(const Tensor& x) {
  return unary(
      x, [](double v) { return v * v; },
      [](double v, double) { return 2.0 * v; });
}

// ----------------------------------------------------------------- shape

Tensor reshape(const Tensor& x, Shape shape) {
  // one -1 entry is inferred
  std::int64_t known = 1;
  int free_axis = -1;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (shape[i] == -1 && free_axis < 0) {
      free_axis = static_cast<int>(i);
    } else {
      known *= shape[i];
    }
  }
  if (free_axis >= 0 && known > 0 && x.numel() % known == 0) shape[free_axis] = x.numel() / known;
  require(numel(shape) == x.numel(),
          "reshape: " + to_string(x.shape()) + " to " + to_string(shape));
  NodePtr nx = x.node();
  return make_result(std::move(shape), x.data(), {nx}, [nx](Node& self) {
    auto& gx = nx->ensure_grad();
    for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += self.grad[i];
  });
}

Tensor permute(const Tensor& x, const std::vector<int>& order) {
  const int rank = x.rank();
  require(static_cast<int>(order.size()) == rank,
          "permute: order size does not match rank of " + to_string(x.shape()));
  std::vector<bool> seen(rank, false);
  for (int d : order) {
    require(d >= 0 && d < rank && !seen[d], "permute: invalid axis order");
    seen[d] = true;
  }
  const auto src = contiguous_strides(x.shape());
  Shape out_shape(rank);
  std::vector<std::int64_t> read(rank);
  for (int d = 0; d < rank; ++d) {
    out_shape[d] = x.shape()[order[d]];
    read[d] = src[order[d]];
  }
  const std::vector<std::int64_t> unit(rank, 0);
  std::vector<double> out(x.data().size());
  const auto& in = x.data();
  for_each_offset2(out_shape, read, unit, [&](std::int64_t i, std::int64_t o, std::int64_t) {
    out[i] = in[o];
  });
  NodePtr nx = x.node();
  return make_result(out_shape, std::move(out), {nx}, [nx, out_shape, read, unit](Node& self) {
    auto& gx = nx->ensure_grad();
    for_each_offset2(out_shape, read, unit, [&](std::int64_t i, std::int64_t o, std::int64_t) {
      gx[o] += self.grad[i];
    });
  });
}

Tensor narrow(const Tensor& x, int axis, std::int64_t start, std::int64_t length) {
  axis = normalize_axis(axis, x.rank(), "narrow");
  const std::int64_t extent = x.shape()[axis];
  require(start >= 0 && length >= 0 && start + length <= extent,
          "narrow: range [" + std::to_string(start) + ", " +
              std::to_string(start + length) + ") outside axis of size " +
              std::to_string(extent));
  std::int64_t outer = 1, inner = 1;
  for (int d = 0; d < axis; ++d) outer *= x.shape()[d];
  for (int d = axis + 1; d < x.rank(); ++d) inner *= x.shape()[d];
  Shape shape = x.shape();
  shape[axis] = length;
  std::vector<double> out(static_cast<std::size_t>(outer * length * inner));
  const auto& in = x.data();
  for (std::int64_t o = 0; o < outer; ++o) {
    std::copy_n(in.begin() + (o * extent + start) * inner, length * inner,
                out.begin() + o * length * inner);
  }
  NodePtr nx = x.node();
  return make_result(shape, std::move(out), {nx},
                     [nx, outer, inner, extent, start, length](Node& self) {
                       auto& gx = nx->ensure_grad();
                       for (std::int64_t o = 0; o < outer; ++o) {
                         const double* g = self.grad.data() + o * length * inner;
                         double* dst = gx.data() + (o * extent + start) * inner;
                         for (std::int64_t k = 0; k < length * inner; ++k) dst[k] += g[k];
                       }
                     });
}

Tensor concat(const std::vector<Tensor>& parts, int axis) {
  require(!parts.empty(), "concat: no inputs");
  const int rank = parts[0].rank();
  axis = normalize_axis(axis, rank, "concat");
  Shape shape = parts[0].shape();
  std::int64_t total = 0;
  for (const auto& p : parts) {
    require(p.rank() == rank, "concat: rank mismatch " + to_string(shape) +
                                  " vs " + to_string(p.shape()));
    for (int d = 0; d < rank; ++d) {
      if (d == axis) continue;
      require(p.shape()[d] == shape[d], "concat: " + to_string(shape) +
                                            " vs " + to_string(p.shape()));
    }
    total += p.shape()[axis];
  }
  shape[axis] = total;
  std::int64_t outer = 1, inner = 1;
  for (int d = 0; d < axis; ++d) outer *= shape[d];
  for (int d = axis + 1; d < rank; ++d) inner *= shape[d];
  std::vector<double> out(static_cast<std::size_t>(numel(shape)));
  std::vector<NodePtr> nodes;
  std::vector<std::int64_t> widths;
  std::int64_t at = 0;
  for (const auto& p : parts) {
    const std::int64_t w = p.shape()[axis];
    for (std::int64_t o = 0; o < outer; ++o) {
      std::copy_n(p.data().begin() + o * w * inner, w * inner,
                  out.begin() + (o * total + at) * inner);
    }
    at += w;
    nodes.push_back(p.node());
    widths.push_back(w);
  }
  return make_result(shape, std::move(out), nodes,
                     [nodes, widths, outer, inner, total](Node& self) {
                       std::int64_t at = 0;
                       for (std::size_t k = 0; k < nodes.size(); ++k) {
                         const std::int64_t w = widths[k];
                         if (nodes[k]->requires_grad) {
                           auto& g = nodes[k]->ensure_grad();
                           for (std::int64_t o = 0; o < outer; ++o) {
                             const double* src = self.grad.data() + (o * total + at) * inner;
                             double* dst = g.data() + o * w * inner;
                             for (std::int64_t i = 0; i < w * inner; ++i) dst[i] += src[i];
                           }
                         }
                         at += w;
                       }
                     });
}

// ------------------------------------------------------------ reductions

Tensor sum(const Tensor& x) {
  double acc = 0.0;
  for (double v : x.data()) acc += v;
  NodePtr nx = x.node();
  return make_result({1}, {acc}, {nx}, [nx](Node& self) {
    auto& gx = nx->ensure_grad();
    for (double& g : gx) g += self.grad[0];
  });
}

Tensor mean(const Tensor& x) {
  require(x.numel() > 0, "mean of empty tensor");
  return scale(sum(x), 1.0 / static_cast<double>(x.numel()));
}

namespace {

struct Reduction {
  Shape out_shape;
  std::vector<std::int64_t> in_strides;   // contiguous strides of x
  std::vector<std::int64_t> out_strides;  // 0 on reduced axes
  std::int64_t group = 1;                 // elements folded into each output
};

Reduction plan_reduction(const Tensor& x, const std::vector<int>& axes, const char* op) {
  Reduction r;
  r.out_shape = x.shape();
  std::vector<bool> reduced(x.rank(), false);
  for (int a : axes) {
    a = normalize_axis(a, x.rank(), op);
    if (!reduced[a]) r.group *= x.shape()[a];
    reduced[a] = true;
    r.out_shape[a] = 1;
  }
  r.in_strides = contiguous_strides(x.shape());
  r.out_strides = contiguous_strides(r.out_shape);
  for (int d = 0; d < x.rank(); ++d) {
    if (reduced[d]) r.out_strides[d] = 0;
  }
  return r;
}

}  // namespace

Tensor sum_axes(const Tensor& x, const std::vector<int>& axes) {
  Reduction r = plan_reduction(x, axes, "sum_axes");
  std::vector<double> out(static_cast<std::size_t>(numel(r.out_shape)), 0.0);
  const auto& in = x.data();
  for_each_offset2(x.shape(), r.in_strides, r.out_strides,
                   [&](std::int64_t, std::int64_t i, std::int64_t o) { out[o] += in[i]; });
  NodePtr nx = x.node();
  return make_result(r.out_shape, std::move(out), {nx}, [nx, r](Node& self) {
    auto& gx = nx->ensure_grad();
    for_each_offset2(nx->shape, r.in_strides, r.out_strides,
                     [&](std::int64_t, std::int64_t i, std::int64_t o) { gx[i] += self.grad[o]; });
  });
}

Tensor mean_axes(const Tensor& x, const std::vector<int>& axes) {
  Reduction r = plan_reduction(x, axes, "mean_axes");
  return scale(sum_axes(x, axes), 1.0 / static_cast<double>(r.group));
}

Tensor max_axes(const Tensor& x, const std::vector<int>& axes) {
  Reduction r = plan_reduction(x, axes, "max_axes");
  const std::size_t n_out = static_cast<std::size_t>(numel(r.out_shape));
  std::vector<double> out(n_out, -std::numeric_limits<double>::infinity());
  std::vector<std::int64_t> arg(n_out, -1);
  const auto& in = x.data();
  for_each_offset2(x.shape(), r.in_strides, r.out_strides,
                   [&](std::int64_t, std::int64_t i, std::int64_t o) {
                     if (arg[o] < 0 || in[i] > out[o]) {
                       out[o] = in[i];
                       arg[o] = i;
                     }
                   });
  NodePtr nx = x.node();
  return make_result(r.out_shape, std::move(out), {nx}, [nx, arg](Node& self) {
    auto& gx = nx->ensure_grad();
    for (std::size_t o = 0; o < arg.size(); ++o) gx[arg[o]] += self.grad[o];
  });
}

// -------------------------------------------------------- linear algebra

Tensor matmul(const Tensor& a, const Tensor& b) {
  require((a.rank() == 3 && b.rank() == 3) || (a.rank() == 2 && b.rank() == 2),
          "matmul: expected two rank-3 or two rank-2 operands, got " +
              to_string(a.shape()) + " and " + to_string(b.shape()));
  const bool flat = a.rank() == 2;
  const std::int64_t ba = flat ? 1 : a.dim(0), bb = flat ? 1 : b.dim(0);
  const std::int64_t m = a.dim(-2), k = a.dim(-1), k2 = b.dim(-2), n = b.dim(-1);
  require(k == k2 && (ba == bb || ba == 1 || bb == 1),
          "matmul: " + to_string(a.shape()) + " x " + to_string(b.shape()));
  const std::int64_t batch = std::max(ba, bb);
  Shape shape = flat ? Shape{m, n} : Shape{batch, m, n};
  std::vector<double> out(static_cast<std::size_t>(batch * m * n));
  for (std::int64_t i = 0; i < batch; ++i) {
    ConstMap A(a.data().data() + (ba == 1 ? 0 : i) * m * k, m, k);
    ConstMap B(b.data().data() + (bb == 1 ? 0 : i) * k * n, k, n);
    MutMap(out.data() + i * m * n, m, n).noalias() = A * B;
  }
  NodePtr na = a.node(), nb = b.node();
  return make_result(shape, std::move(out), {na, nb},
                     [na, nb, ba, bb, batch, m, k, n](Node& self) {
                       for (std::int64_t i = 0; i < batch; ++i) {
                         ConstMap G(self.grad.data() + i * m * n, m, n);
                         const std::int64_t ia = (ba == 1 ? 0 : i), ib = (bb == 1 ? 0 : i);
                         if (na->requires_grad) {
                           ConstMap B(nb->data.data() + ib * k * n, k, n);
                           MutMap(na->ensure_grad().data() + ia * m * k, m, k).noalias() +=
                               G * B.transpose();
                         }
                         if (nb->requires_grad) {
                           ConstMap A(na->data.data() + ia * m * k, m, k);
                           MutMap(nb->ensure_grad().data() + ib * k * n, k, n).noalias() +=
                               A.transpose() * G;
                         }
                       }
                     });
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  require(w.rank() == 2 && x.rank() >= 1 && x.dim(-1) == w.dim(0),
          "linear: input " + to_string(x.shape()) + " with weight " + to_string(w.shape()));
  const std::int64_t in = w.dim(0), outc = w.dim(1);
  if (b.defined()) {
    require(b.rank() == 1 && b.dim(0) == outc,
            "linear: bias " + to_string(b.shape()) + " for weight " + to_string(w.shape()));
  }
  const std::int64_t rows = x.numel() / in;
  Shape shape = x.shape();
  shape.back() = outc;
  std::vector<double> out(static_cast<std::size_t>(rows * outc));
  MutMap Y(out.data(), rows, outc);
  Y.noalias() = ConstMap(x.data().data(), rows, in) * ConstMap(w.data().data(), in, outc);
  if (b.defined()) {
    Y.rowwise() += Eigen::Map<const Eigen::RowVectorXd>(b.data().data(), outc);
  }
  NodePtr nx = x.node(), nw = w.node();
  NodePtr nb = b.defined() ? b.node() : nullptr;
  std::vector<NodePtr> inputs{nx, nw};
  if (nb) inputs.push_back(nb);
  return make_result(shape, std::move(out), inputs, [nx, nw, nb, rows, in, outc](Node& self) {
    ConstMap G(self.grad.data(), rows, outc);
    if (nx->requires_grad) {
      MutMap(nx->ensure_grad().data(), rows, in).noalias() +=
          G * ConstMap(nw->data.data(), in, outc).transpose();
    }
    if (nw->requires_grad) {
      MutMap(nw->ensure_grad().data(), in, outc).noalias() +=
          ConstMap(nx->data.data(), rows, in).transpose() * G;
    }
    if (nb && nb->requires_grad) {
      Eigen::Map<Eigen::RowVectorXd>(nb->ensure_grad().data(), outc) += G.colwise().sum();
    }
  });
}

Tensor softmax(const Tensor& x) {
  require(x.rank() >= 1, "softmax of a scalar");
  const std::int64_t d = x.dim(-1);
  const std::int64_t rows = x.numel() / d;
  std::vector<double> out(x.data().size());
  const auto& in = x.data();
  for (std::int64_t r = 0; r < rows; ++r) {
    const double* src = in.data() + r * d;
    double* dst = out.data() + r * d;
    const double mx = *std::max_element(src, src + d);
    double z = 0.0;
    for (std::int64_t j = 0; j < d; ++j) {
      dst[j] = std::exp(src[j] - mx);
      z += dst[j];
    }
    for (std::int64_t j = 0; j < d; ++j) dst[j] /= z;
  }
  NodePtr nx = x.node();
  return make_result(x.shape(), std::move(out), {nx}, [nx, rows, d](Node& self) {
    auto& gx = nx->ensure_grad();
    for (std::int64_t r = 0; r < rows; ++r) {
      const double* y = self.data.data() + r * d;
      const double* g = self.grad.data() + r * d;
      double dot = 0.0;
      for (std::int64_t j = 0; j < d; ++j) dot += g[j] * y[j];
      for (std::int64_t j = 0; j < d; ++j) gx[r * d + j] += y[j] * (g[j] - dot);
    }
  });
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
  const std::int64_t d = x.dim(-1);
  require(gamma.numel() == d && beta.numel() == d,
          "layer_norm: input " + to_string(x.shape()) + " with gamma " +
              to_string(gamma.shape()));
  const std::int64_t rows = x.numel() / d;
  std::vector<double> out(x.data().size());
  std::vector<double> xhat(x.data().size());
  std::vector<double> inv_std(static_cast<std::size_t>(rows));
  const auto& in = x.data();
  for (std::int64_t r = 0; r < rows; ++r) {
    const double* src = in.data() + r * d;
    double mu = 0.0;
    for (std::int64_t j = 0; j < d; ++j) mu += src[j];
    mu /= static_cast<double>(d);
    double var = 0.0;
    for (std::int64_t j = 0; j < d; ++j) var += (src[j] - mu) * (src[j] - mu);
    var /= static_cast<double>(d);
    const double is = 1.0 / std::sqrt(var + eps);
    inv_std[r] = is;
    for (std::int64_t j = 0; j < d; ++j) {
      const double h = (src[j] - mu) * is;
      xhat[r * d + j] = h;
      out[r * d + j] = h * gamma.data()[j] + beta.data()[j];
    }
  }
  NodePtr nx = x.node(), ng = gamma.node(), nb = beta.node();
  return make_result(x.shape(), std::move(out), {nx, ng, nb},
                     [nx, ng, nb, xhat = std::move(xhat), inv_std = std::move(inv_std), rows,
                      d](Node& self) {
                       const auto& g = self.grad;
                       const auto& gm = ng->data;
                       if (ng->requires_grad || nb->requires_grad) {
                         auto* gg = ng->requires_grad ? &ng->ensure_grad() : nullptr;
                         auto* gb = nb->requires_grad ? &nb->ensure_grad() : nullptr;
                         for (std::int64_t r = 0; r < rows; ++r) {
                           for (std::int64_t j = 0; j < d; ++j) {
                             if (gg) (*gg)[j] += g[r * d + j] * xhat[r * d + j];
                             if (gb) (*gb)[j] += g[r * d + j];
                           }
                         }
                       }
                       if (!nx->requires_grad) return;
                       auto& gx = nx->ensure_grad();
                       const double inv_d = 1.0 / static_cast<double>(d);
                       for (std::int64_t r = 0; r < rows; ++r) {
                         double s1 = 0.0, s2 = 0.0;
                         for (std::int64_t j = 0; j < d; ++j) {
                           const double dh = g[r * d + j] * gm[j];
                           s1 += dh;
                           s2 += dh * xhat[r * d + j];
                         }
                         for (std::int64_t j = 0; j < d; ++j) {
                           const double dh = g[r * d + j] * gm[j];
                           gx[r * d + j] +=
                               inv_std[r] * (dh - inv_d * s1 - xhat[r * d + j] * inv_d * s2);
                         }
                       }
                     });
}

}  // namespace spade::nn
