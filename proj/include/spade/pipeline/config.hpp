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

#ifndef SPADE_PIPELINE_CONFIG_HPP_
#define SPADE_PIPELINE_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spade/densify/densify.hpp"
#include "spade/nn/refinement.hpp"
#include "spade/sim/sensor.hpp"

namespace spade::pipeline {

using json = nlohmann::json;

struct OptimizerConfig {
  double lr = 2e-4;
  double lr_late = 5e-5;
  int decay_after_epoch = 6;  // epochs 1..decay_after_epoch use lr
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-2;
};

struct ScheduleConfig {
  int epochs = 10;
  int batch = 8;
  double keep_fraction = 0.9;  // per-step point subsampling
  int min_points = 10;         // per-step point count is drawn in
  int max_points = 250;        // [min_points, max_points] before subsampling
};

/// Synthetic corpus. Frames of each split are derived from (seed, split,
/// index) only, so any frame can be regenerated in isolation.
struct DataConfig {
  int train_frames = 200;
  int val_frames = 20;
  int test_frames = 20;
  double min_depth_lo = 0.8, min_depth_hi = 2.0;
  double max_depth_lo = 4.0, max_depth_hi = 9.0;
  double bias_amplitude = 0.2;
  double bias_wavelength = 32.0;
  double noise_sigma = 0.0;
  double s_lo = 0.5, s_hi = 2.0;
  double t_lo = -0.1, t_hi = 0.1;
  int points = 250;  // feature_like points per frame
};

struct RunConfig {
  nn::CcdtConfig network;
  densify::JbuParams jbu;
  OptimizerConfig optimizer;
  ScheduleConfig schedule;
  DataConfig data;
  sim::PatternSpec pattern;  // evaluation pattern
  double range_cap = 10.0;
  std::uint64_t seed = 7;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Unknown keys are rejected; missing keys keep their defaults.
RunConfig run_config_from_json(const json& j);
json to_json(const RunConfig& cfg);
RunConfig load_run_config(const std::filesystem::path& path);
/// FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

struct SweepSpec {
  std::vector<int> counts{200, 100, 50, 10};
  std::vector<sim::PatternKind> patterns{sim::PatternKind::kFeatureLike};
  std::vector<double> caps{10.0};

  void validate() const;
};

SweepSpec sweep_spec_from_json(const json& j);
json to_json(const SweepSpec& spec);

sim::PatternSpec pattern_from_json(const json& j, sim::PatternSpec base = {});
json to_json(const sim::PatternSpec& spec);

/// Worker count: SPADE_THREADS if set and positive, else hardware
/// concurrency (at least 1).
int worker_count();

}  // namespace spade::pipeline

#endif  // SPADE_PIPELINE_CONFIG_HPP_
