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

#include "spade/pipeline/train.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "spade/core/error.hpp"
#include "spade/core/io.hpp"
#include "spade/core/rng.hpp"
#include "spade/loss/loss.hpp"
#include "spade/nn/checkpoint.hpp"
#include "spade/nn/optim.hpp"
#include "spade/pipeline/frame.hpp"
#include "spade/pipeline/parallel.hpp"

namespace spade::pipeline {
namespace {

struct Target {
  nn::Tensor inverse, mask;
};

Target make_target(const std::vector<const DepthRaster*>& gts) {
  const int w = gts[0]->width(), h = gts[0]->height();
  const std::size_t px = static_cast<std::size_t>(w) * h;
  std::vector<double> t(px * gts.size(), 0.0), m(px * gts.size(), 0.0);
  for (std::size_t b = 0; b < gts.size(); ++b) {
    for (std::size_t i = 0; i < px; ++i) {
      if (!gts[b]->mask()[i]) continue;
      t[b * px + i] = 1.0 / gts[b]->values()[i];
      m[b * px + i] = 1.0;
    }
  }
  const nn::Shape shape{static_cast<std::int64_t>(gts.size()), 1, h, w};
  return {nn::Tensor::from(shape, std::move(t)), nn::Tensor::from(shape, std::move(m))};
}

// Point set for one training step: a log-uniform count in
// [min_points, max_points], then the keep-fraction subsample.
SparsePointSet step_points(const RunConfig& cfg, const SparsePointSet& all, std::uint64_t seed) {
  Rng rng(seed);
  const auto& s = cfg.schedule;
  const int hi = std::min<int>(s.max_points, static_cast<int>(all.size()));
  const int lo = std::min(s.min_points, hi);
  const double t = rng.uniform();
  const int count = static_cast<int>(std::lround(std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))));
  const auto picked = sim::subsample(all, static_cast<std::size_t>(std::clamp(count, lo, hi)), rng.fork());
  auto kept = sim::subsample_fraction(picked, s.keep_fraction, rng.fork());
  if (kept.size() < 2 && picked.size() >= 2) kept = sim::subsample(picked, 2, rng.fork());
  return kept;
}

struct ValStats {
  double loss = 0, mae = 0, ga_mae = 0;
};

ValStats validate(SpadeModel& model, const RunConfig& cfg, const std::vector<Frame>& frames) {
  ValStats st;
  if (frames.empty()) return st;
  model.set_training(false);
  std::vector<double> loss(frames.size()), mae(frames.size()), ga(frames.size());
  std::vector<char> ok(frames.size(), 0);
  parallel_for(static_cast<int>(frames.size()), [&](int i) {
    const auto& f = frames[static_cast<std::size_t>(i)];
    try {
      const FrameResult r = run_frame(model, f.relative, f.guide, f.points, cfg.jbu, &f.gt, cfg.range_cap);
      if (!r.refined_metrics || !r.ga_metrics) return;
      const Target tg = make_target({&f.gt});
      const auto shape = tg.inverse.shape();
      std::vector<double> pred(r.correction.size());
      for (std::size_t k = 0; k < pred.size(); ++k) {
        pred[k] = r.aligned.mask()[k] ? r.aligned.values()[k] * r.correction[k] : 1.0;
      }
      std::vector<double> mask(tg.mask.data());
      for (std::size_t k = 0; k < mask.size(); ++k) {
        if (!r.aligned.mask()[k]) mask[k] = 0.0;
      }
      nn::NoGradGuard no_grad;
      loss[static_cast<std::size_t>(i)] =
          loss::loss_total(nn::Tensor::from(shape, std::move(pred)), tg.inverse,
                           nn::Tensor::from(shape, std::move(mask)))
              .total;
      mae[static_cast<std::size_t>(i)] = r.refined_metrics->mae;
      ga[static_cast<std::size_t>(i)] = r.ga_metrics->mae;
      ok[static_cast<std::size_t>(i)] = 1;
    } catch (const align::AlignmentError&) {
    }
  });
  double n = 0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (!ok[i]) continue;
    st.loss += loss[i];
    st.mae += mae[i];
    st.ga_mae += ga[i];
    n += 1;
  }
  if (n > 0) {
    st.loss /= n;
    st.mae /= n;
    st.ga_mae /= n;
  }
  model.set_training(true);
  return st;
}

}  // namespace

std::uint64_t model_seed(const RunConfig& cfg) { return frame_seed(cfg.seed, Split::kTrain, -1); }

std::unique_ptr<SpadeModel> make_model(const RunConfig& cfg) {
  return std::make_unique<SpadeModel>(cfg.network, model_seed(cfg));
}

json to_json(const EpochLog& e) {
  return {{"epoch", e.epoch},     {"lr", e.lr},           {"train_loss", e.train_loss},
          {"val_loss", e.val_loss}, {"val_mae", e.val_mae}, {"val_ga_mae", e.val_ga_mae},
          {"skipped_frames", e.skipped_frames}};
}

json checkpoint_metadata(const RunConfig& cfg, const std::vector<EpochLog>& log) {
  json epochs = json::array();
  for (const auto& e : log) epochs.push_back(to_json(e));
  return {{"config", to_json(cfg)}, {"config_hash", config_hash(cfg)}, {"seed", cfg.seed},
          {"epochs", epochs}};
}

TrainResult train(const RunConfig& cfg, const TrainOptions& options) {
  cfg.validate();
  TrainResult out;
  out.model = make_model(cfg);
  SpadeModel& model = *out.model;
  model.set_training(true);

  const std::vector<Frame> frames = make_split(cfg, Split::kTrain);
  const std::vector<Frame> val = make_split(cfg, Split::kVal);

  const auto& o = cfg.optimizer;
  nn::AdamW opt(model.parameters(), {o.lr, o.beta1, o.beta2, o.eps, o.weight_decay});
  std::vector<std::uint8_t> last_good = nn::encode_checkpoint(model);

  const int n = static_cast<int>(frames.size());
  const int batch = cfg.schedule.batch;
  for (int epoch = 1; epoch <= cfg.schedule.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    EpochLog log;
    log.epoch = epoch;
    log.lr = epoch <= o.decay_after_epoch ? o.lr : o.lr_late;
    opt.set_lr(log.lr);

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle(frame_seed(cfg.seed, Split::kTrain, 1000000 + epoch));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);

    double loss_sum = 0;
    int steps = 0;
    for (int b0 = 0; b0 < n; b0 += batch) {
      const int bn = std::min(batch, n - b0);
      std::vector<std::optional<Prepared>> prep(static_cast<std::size_t>(bn));
      parallel_for(bn, [&](int k) {
        const int idx = order[static_cast<std::size_t>(b0 + k)];
        const auto& f = frames[static_cast<std::size_t>(idx)];
        const auto seed = frame_seed(cfg.seed ^ static_cast<std::uint64_t>(epoch), Split::kTrain, idx);
        try {
          prep[static_cast<std::size_t>(k)] = prepare(f.relative, step_points(cfg, f.points, seed), cfg.jbu);
        } catch (const align::AlignmentError&) {
        }
      });
      std::vector<const Prepared*> ps;
      std::vector<const Image*> guides;
      std::vector<const DepthRaster*> gts;
      for (int k = 0; k < bn; ++k) {
        const auto& p = prep[static_cast<std::size_t>(k)];
        if (!p) {
          ++log.skipped_frames;
          continue;
        }
        const auto& f = frames[static_cast<std::size_t>(order[static_cast<std::size_t>(b0 + k)])];
        ps.push_back(&*p);
        guides.push_back(&f.guide);
        gts.push_back(&f.gt);
      }
      if (ps.empty()) continue;

      const BatchInputs in = make_inputs(ps, guides);
      Target tg = make_target(gts);
      // Pixels stage 1 masked out have no prediction.
      auto& m = tg.mask.mutable_data();
      const std::size_t px = m.size() / ps.size();
      for (std::size_t b = 0; b < ps.size(); ++b) {
        for (std::size_t i = 0; i < px; ++i) {
          if (!ps[b]->ga.aligned.mask()[i]) m[b * px + i] = 0.0;
        }
      }

      opt.zero_grad();
      const nn::Tensor corr = model.forward(in.aligned, in.eps, in.guide);
      // Masked-out pixels are fed a neutral prediction of 1.
      const nn::Tensor pred = nn::add(nn::mul(nn::mul(in.aligned, corr), tg.mask),
                                      nn::add_scalar(nn::scale(tg.mask, -1.0), 1.0));
      const nn::Tensor total = loss::loss_terms(pred, tg.inverse, tg.mask).total;
      const double value = total.item();
      if (!std::isfinite(value)) {
        if (options.rescue_path) write_file(*options.rescue_path, last_good);
        throw NumericError("training diverged at epoch " + std::to_string(epoch) + ", step " +
                           std::to_string(steps + 1) + " (loss " + std::to_string(value) + ")");
      }
      total.backward();
      opt.step();
      loss_sum += value;
      ++steps;
    }
    last_good = nn::encode_checkpoint(model);
    log.train_loss = steps > 0 ? loss_sum / steps : 0.0;
    const ValStats vs = validate(model, cfg, val);
    log.val_loss = vs.loss;
    log.val_mae = vs.mae;
    log.val_ga_mae = vs.ga_mae;
    log.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.log.push_back(log);
    if (options.on_epoch) options.on_epoch(log);
  }
  model.set_training(false);
  return out;
}

}  // namespace spade::pipeline
