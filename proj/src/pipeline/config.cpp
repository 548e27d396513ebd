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

#include "spade/pipeline/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <set>
#include <thread>

#include "spade/core/error.hpp"
#include "spade/core/io.hpp"

namespace spade::pipeline {
namespace {

// Reads fields of one JSON object and rejects keys nobody asked for.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected a JSON object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }

  template <class F>
  void object(const char* key, F&& fn) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    Reader sub(j_.at(key), where_ + "." + key);
    fn(sub);
    sub.finish();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(where_ + ": unknown key '" + it.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

sim::PatternSpec pattern_from_json(const json& j, sim::PatternSpec base) {
  Reader r(j, "pattern");
  std::string kind = sim::to_string(base.kind);
  r.get("kind", kind);
  base.kind = sim::parse_pattern_kind(kind);
  r.get("count", base.count);
  r.get("grid_rows", base.grid_rows);
  r.get("grid_cols", base.grid_cols);
  r.get("sonar_row", base.sonar_row);
  r.get("sonar_jitter", base.sonar_jitter);
  r.get("dvl_fraction", base.dvl_fraction);
  r.get("laser_baseline", base.laser_baseline);
  r.get("laser_max_range", base.laser_max_range);
  r.get("seed", base.seed);
  r.finish();
  base.validate();
  return base;
}

json to_json(const sim::PatternSpec& p) {
  return {{"kind", sim::to_string(p.kind)}, {"count", p.count},
          {"grid_rows", p.grid_rows},       {"grid_cols", p.grid_cols},
          {"sonar_row", p.sonar_row},       {"sonar_jitter", p.sonar_jitter},
          {"dvl_fraction", p.dvl_fraction}, {"laser_baseline", p.laser_baseline},
          {"laser_max_range", p.laser_max_range}, {"seed", p.seed}};
}

void RunConfig::validate() const {
  network.validate();
  jbu.validate();
  pattern.validate();
  const auto& o = optimizer;
  require(o.lr > 0 && o.lr_late > 0, "optimizer: learning rates must be > 0");
  require(o.beta1 >= 0 && o.beta1 < 1 && o.beta2 >= 0 && o.beta2 < 1,
          "optimizer: betas must be in [0, 1)");
  require(o.eps > 0 && o.weight_decay >= 0, "optimizer: eps > 0 and weight_decay >= 0 required");
  const auto& s = schedule;
  require(s.epochs >= 1, "schedule: epochs must be >= 1");
  require(o.decay_after_epoch >= 0 && o.decay_after_epoch <= s.epochs,
          "optimizer: decay_after_epoch must lie within the epoch count");
  require(s.batch >= 1, "schedule: batch must be >= 1");
  require(s.keep_fraction > 0 && s.keep_fraction <= 1, "schedule: keep_fraction must be in (0, 1]");
  require(s.min_points >= 1 && s.min_points <= s.max_points,
          "schedule: need 1 <= min_points <= max_points");
  const auto& d = data;
  require(d.train_frames >= 1 && d.val_frames >= 0 && d.test_frames >= 0,
          "data: frame counts must be non-negative (train >= 1)");
  require(d.min_depth_lo > 0 && d.min_depth_lo <= d.min_depth_hi, "data: bad min depth range");
  require(d.max_depth_lo >= d.min_depth_hi && d.max_depth_lo <= d.max_depth_hi,
          "data: max depth range must lie above the min depth range");
  require(d.max_depth_hi <= range_cap, "data: max depth exceeds range_cap");
  require(d.bias_amplitude >= 0 && d.bias_amplitude <= 0.5, "data: bias_amplitude must be in [0, 0.5]");
  require(d.bias_wavelength > 0 && d.noise_sigma >= 0, "data: bad bias wavelength or noise");
  require(d.s_lo > 0 && d.s_lo <= d.s_hi && d.t_lo <= d.t_hi, "data: bad affine ranges");
  require(d.points >= 2, "data: points must be >= 2");
  require(range_cap > 0, "range_cap must be > 0");
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  Reader r(j, "config");
  r.object("network", [&](Reader& n) {
    auto& net = c.network;
    n.get("input_height", net.input_height);
    n.get("input_width", net.input_width);
    n.get("widths", net.widths);
    n.get("conv_blocks", net.conv_blocks);
    n.get("transformer_blocks", net.transformer_blocks);
    n.get("heads", net.heads);
    n.get("grid_downsample", net.grid_downsample);
    n.get("embed_channels", net.embed_channels);
    n.get("fused_channels", net.fused_channels);
    n.get("decoder_channels", net.decoder_channels);
  });
  r.object("jbu", [&](Reader& n) {
    n.get("window_radius", c.jbu.window_radius);
    n.get("sigma_spatial", c.jbu.sigma_spatial);
    n.get("sigma_range", c.jbu.sigma_range);
  });
  r.object("optimizer", [&](Reader& n) {
    auto& o = c.optimizer;
    n.get("lr", o.lr);
    n.get("lr_late", o.lr_late);
    n.get("decay_after_epoch", o.decay_after_epoch);
    n.get("beta1", o.beta1);
    n.get("beta2", o.beta2);
    n.get("eps", o.eps);
    n.get("weight_decay", o.weight_decay);
  });
  r.object("schedule", [&](Reader& n) {
    auto& s = c.schedule;
    n.get("epochs", s.epochs);
    n.get("batch", s.batch);
    n.get("keep_fraction", s.keep_fraction);
    n.get("min_points", s.min_points);
    n.get("max_points", s.max_points);
  });
  r.object("data", [&](Reader& n) {
    auto& d = c.data;
    n.get("train_frames", d.train_frames);
    n.get("val_frames", d.val_frames);
    n.get("test_frames", d.test_frames);
    n.get("min_depth_lo", d.min_depth_lo);
    n.get("min_depth_hi", d.min_depth_hi);
    n.get("max_depth_lo", d.max_depth_lo);
    n.get("max_depth_hi", d.max_depth_hi);
    n.get("bias_amplitude", d.bias_amplitude);
    n.get("bias_wavelength", d.bias_wavelength);
    n.get("noise_sigma", d.noise_sigma);
    n.get("s_lo", d.s_lo);
    n.get("s_hi", d.s_hi);
    n.get("t_lo", d.t_lo);
    n.get("t_hi", d.t_hi);
    n.get("points", d.points);
  });
  json pattern;
  r.get("pattern", pattern);
  if (!pattern.is_null()) c.pattern = pattern_from_json(pattern);
  r.get("range_cap", c.range_cap);
  r.get("seed", c.seed);
  r.finish();
  c.validate();
  return c;
}

json to_json(const RunConfig& c) {
  const auto& n = c.network;
  const auto& o = c.optimizer;
  const auto& s = c.schedule;
  const auto& d = c.data;
  json j;
  j["network"] = {{"input_height", n.input_height},
                  {"input_width", n.input_width},
                  {"widths", n.widths},
                  {"conv_blocks", n.conv_blocks},
                  {"transformer_blocks", n.transformer_blocks},
                  {"heads", n.heads},
                  {"grid_downsample", n.grid_downsample},
                  {"embed_channels", n.embed_channels},
                  {"fused_channels", n.fused_channels},
                  {"decoder_channels", n.decoder_channels}};
  j["jbu"] = {{"window_radius", c.jbu.window_radius},
              {"sigma_spatial", c.jbu.sigma_spatial},
              {"sigma_range", c.jbu.sigma_range}};
  j["optimizer"] = {{"lr", o.lr},       {"lr_late", o.lr_late}, {"decay_after_epoch", o.decay_after_epoch},
                    {"beta1", o.beta1}, {"beta2", o.beta2},     {"eps", o.eps},
                    {"weight_decay", o.weight_decay}};
  j["schedule"] = {{"epochs", s.epochs},
                   {"batch", s.batch},
                   {"keep_fraction", s.keep_fraction},
                   {"min_points", s.min_points},
                   {"max_points", s.max_points}};
  j["data"] = {{"train_frames", d.train_frames},     {"val_frames", d.val_frames},
               {"test_frames", d.test_frames},       {"min_depth_lo", d.min_depth_lo},
               {"min_depth_hi", d.min_depth_hi},     {"max_depth_lo", d.max_depth_lo},
               {"max_depth_hi", d.max_depth_hi},     {"bias_amplitude", d.bias_amplitude},
               {"bias_wavelength", d.bias_wavelength}, {"noise_sigma", d.noise_sigma},
               {"s_lo", d.s_lo},                     {"s_hi", d.s_hi},
               {"t_lo", d.t_lo},                     {"t_hi", d.t_hi},
               {"points", d.points}};
  j["pattern"] = to_json(c.pattern);
  j["range_cap"] = c.range_cap;
  j["seed"] = c.seed;
  return j;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : to_json(cfg).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void SweepSpec::validate() const {
  require(!counts.empty() && !patterns.empty() && !caps.empty(), "sweep: lists must be non-empty");
  for (int c : counts) require(c >= 1, "sweep: counts must be >= 1");
  for (double c : caps) require(c > 0, "sweep: caps must be > 0");
}

SweepSpec sweep_spec_from_json(const json& j) {
  SweepSpec s;
  Reader r(j, "sweep");
  std::vector<std::string> names;
  r.get("counts", s.counts);
  r.get("patterns", names);
  r.get("caps", s.caps);
  r.finish();
  if (j.contains("patterns")) {
    s.patterns.clear();
    for (const auto& n : names) s.patterns.push_back(sim::parse_pattern_kind(n));
  }
  s.validate();
  return s;
}

json to_json(const SweepSpec& s) {
  json patterns = json::array();
  for (auto p : s.patterns) patterns.push_back(sim::to_string(p));
  return {{"counts", s.counts}, {"patterns", patterns}, {"caps", s.caps}};
}

int worker_count() {
  if (const char* env = std::getenv("SPADE_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<int>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace spade::pipeline
