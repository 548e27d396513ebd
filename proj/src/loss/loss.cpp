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

#include "spade/loss/loss.hpp"

#include <string>
#include <vector>

#include "spade/core/error.hpp"
#include "spade/nn/ops.hpp"

namespace spade::loss {
namespace {

using nn::Shape;

void check_inputs(const Tensor& pred, const Tensor& target, const Tensor& mask, const char* what) {
  if (pred.rank() < 2 || pred.shape() != target.shape() || pred.shape() != mask.shape()) {
    throw ShapeError(std::string(what) + ": prediction " + nn::to_string(pred.shape()) +
                     ", target " + nn::to_string(target.shape()) + " and mask " +
                     nn::to_string(mask.shape()) + " must agree");
  }
}

double mask_count(const Tensor& mask) {
  double n = 0;
  for (double m : mask.data()) n += m;
  return n;
}

std::int64_t frames(const Tensor& t) {
  return t.rank() == 4 ? t.dim(0) : 1;
}

Tensor frame(const Tensor& t, std::int64_t i) {
  return t.rank() == 4 ? nn::narrow(t, 0, i, 1) : t;
}

// Applies a single-frame loss to each frame and averages.
template <class F>
Tensor per_frame(const Tensor& pred, const Tensor& target, const Tensor& mask, F&& fn) {
  const std::int64_t n = frames(pred);
  if (n == 1) return fn(pred, target.detach(), mask.detach());
  Tensor acc;
  for (std::int64_t i = 0; i < n; ++i) {
    Tensor li = fn(frame(pred, i), frame(target, i).detach(), frame(mask, i).detach());
    acc = acc.defined() ? nn::add(acc, li) : li;
  }
  return nn::scale(acc, 1.0 / static_cast<double>(n));
}

Tensor rmse_frame(const Tensor& pred, const Tensor& target, const Tensor& mask) {
  const double n = mask_count(mask);
  if (n <= 0) throw DomainError("rmse loss: no valid pixels");
  const Tensor r = nn::mul(nn::sub(pred, target), mask);
  return nn::sqrt(nn::scale(nn::sum(nn::square(r)), 1.0 / n));
}

Tensor silog_frame(const Tensor& pred, const Tensor& target, const Tensor& mask,
                   SilogParams params) {
  const double n = mask_count(mask);
  if (n <= 0) throw DomainError("silog loss: no valid pixels");
  for (double v : pred.data()) {
    if (!(v > 0.0)) throw DomainError("silog loss: non-positive prediction");
  }
  std::vector<double> safe(target.data());
  const auto& m = mask.data();
  for (std::size_t i = 0; i < safe.size(); ++i) {
    if (m[i] == 0.0) {
      safe[i] = 1.0;
    } else if (!(safe[i] > 0.0)) {
      throw DomainError("silog loss: non-positive target at index " + std::to_string(i));
    }
  }
  const Tensor log_target = nn::log(Tensor::from(target.shape(), std::move(safe)));
  const Tensor g = nn::mul(nn::sub(nn::log(pred), log_target), mask);
  const Tensor mean_sq = nn::scale(nn::sum(nn::square(g)), 1.0 / n);
  const Tensor mean_g = nn::scale(nn::sum(g), 1.0 / n);
  const Tensor inner = nn::sub(mean_sq, nn::scale(nn::square(mean_g), params.lambda));
  return nn::scale(nn::sqrt(nn::relu(inner)), params.beta);
}

// Masked 2x2 average pooling on a [.., H, W] tensor viewed as [1, 1, H, W].
void pool_masked(Tensor& r, Tensor& mask) {
  const Shape shape = r.shape();
  const auto h = shape[shape.size() - 2], w = shape[shape.size() - 1];
  const Tensor r4 = nn::reshape(r, {1, 1, h, w});
  const Tensor m4 = nn::reshape(mask, {1, 1, h, w});
  const Tensor weight = nn::avg_pool2d(m4, 2);
  std::vector<double> inv(weight.data().size()), keep(weight.data().size());
  for (std::size_t i = 0; i < inv.size(); ++i) {
    const double wv = weight.data()[i];
    inv[i] = wv > 0 ? 1.0 / wv : 0.0;
    keep[i] = wv > 0 ? 1.0 : 0.0;
  }
  r = nn::mul(nn::avg_pool2d(nn::mul(r4, m4), 2), Tensor::from(weight.shape(), std::move(inv)));
  mask = Tensor::from(weight.shape(), std::move(keep));
}

Tensor grad_frame(const Tensor& pred, const Tensor& target, const Tensor& mask, int scales) {
  if (scales < 1) throw ConfigError("gradient loss: scale count must be >= 1");
  if (mask_count(mask) <= 0) throw DomainError("gradient loss: no valid pixels");
  const Shape shape = pred.shape();
  const auto h0 = shape[shape.size() - 2], w0 = shape[shape.size() - 1];
  Tensor r = nn::reshape(nn::sub(target, pred), {1, 1, h0, w0});
  Tensor m = nn::reshape(mask, {1, 1, h0, w0});
  Tensor acc;
  int used = 0;
  for (int k = 0; k < scales; ++k) {
    if (k > 0) pool_masked(r, m);
    const auto h = r.dim(2), w = r.dim(3);
    if (h < 2 || w < 2) break;
    const double count = mask_count(m);
    if (count <= 0) break;
    const Tensor mx = nn::mul(nn::narrow(m, 3, 1, w - 1), nn::narrow(m, 3, 0, w - 1));
    const Tensor my = nn::mul(nn::narrow(m, 2, 1, h - 1), nn::narrow(m, 2, 0, h - 1));
    const Tensor dx = nn::mul(nn::sub(nn::narrow(r, 3, 1, w - 1), nn::narrow(r, 3, 0, w - 1)), mx);
    const Tensor dy = nn::mul(nn::sub(nn::narrow(r, 2, 1, h - 1), nn::narrow(r, 2, 0, h - 1)), my);
    const Tensor term =
        nn::scale(nn::add(nn::sum(nn::abs(dx)), nn::sum(nn::abs(dy))), 1.0 / count);
    acc = acc.defined() ? nn::add(acc, term) : term;
    ++used;
  }
  if (used == 0) throw DomainError("gradient loss: image smaller than 2x2");
  return nn::scale(acc, 1.0 / used);
}

}  // namespace

Tensor loss_rmse(const Tensor& pred, const Tensor& target, const Tensor& mask) {
  check_inputs(pred, target, mask, "rmse loss");
  return per_frame(pred, target, mask, rmse_frame);
}

Tensor loss_silog(const Tensor& pred, const Tensor& target, const Tensor& mask,
                  SilogParams params) {
  check_inputs(pred, target, mask, "silog loss");
  return per_frame(pred, target, mask, [&](const Tensor& p, const Tensor& t, const Tensor& m) {
    return silog_frame(p, t, m, params);
  });
}

Tensor loss_grad(const Tensor& pred, const Tensor& target, const Tensor& mask, int scales) {
  check_inputs(pred, target, mask, "gradient loss");
  return per_frame(pred, target, mask, [&](const Tensor& p, const Tensor& t, const Tensor& m) {
    return grad_frame(p, t, m, scales);
  });
}

LossTerms loss_terms(const Tensor& pred, const Tensor& target, const Tensor& mask,
                     LossWeights weights) {
  LossTerms out;
  out.rmse = loss_rmse(pred, target, mask);
  out.silog = loss_silog(pred, target, mask);
  out.grad = loss_grad(pred, target, mask);
  out.total = nn::add(nn::add(nn::scale(out.rmse, weights.rmse), nn::scale(out.silog, weights.silog)),
                      nn::scale(out.grad, weights.grad));
  return out;
}

LossReport loss_total(const Tensor& pred, const Tensor& target, const Tensor& mask,
                      LossWeights weights) {
  const LossTerms t = loss_terms(pred, target, mask, weights);
  LossReport r;
  r.rmse_loss = t.rmse.item();
  r.silog_loss = t.silog.item();
  r.grad_loss = t.grad.item();
  r.total = t.total.item();
  r.valid_pixel_count = static_cast<std::size_t>(mask_count(mask));
  return r;
}

}  // namespace spade::loss
