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

#ifndef SPADE_PIPELINE_TRAIN_HPP_
#define SPADE_PIPELINE_TRAIN_HPP_

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "spade/pipeline/config.hpp"
#include "spade/pipeline/dataset.hpp"
#include "spade/pipeline/model.hpp"

namespace spade::pipeline {

struct EpochLog {
  int epoch = 0;
  double lr = 0;
  double train_loss = 0;      // mean total loss over steps
  double val_loss = 0;        // mean total loss over validation frames
  double val_mae = 0;         // refined, metric
  double val_ga_mae = 0;      // stage 1 only
  std::size_t skipped_frames = 0;  // alignment failures during the epoch
  double seconds = 0;
};

struct TrainResult {
  std::unique_ptr<SpadeModel> model;
  std::vector<EpochLog> log;
};

struct TrainOptions {
  /// Where to leave the last good weights if training diverges.
  std::optional<std::filesystem::path> rescue_path;
  std::function<void(const EpochLog&)> on_epoch;
};

/// Model seed derived from the run seed.
std::uint64_t model_seed(const RunConfig& cfg);

/// Untrained model whose correction is exactly neutral.
std::unique_ptr<SpadeModel> make_model(const RunConfig& cfg);

/// Optimises the model on the synthetic train split. Deterministic in the
/// config. Throws NumericError when the loss stops being finite.
TrainResult train(const RunConfig& cfg, const TrainOptions& options = {});

/// JSON metadata stored in checkpoints.
json checkpoint_metadata(const RunConfig& cfg, const std::vector<EpochLog>& log);
json to_json(const EpochLog& e);

}  // namespace spade::pipeline

#endif  // SPADE_PIPELINE_TRAIN_HPP_
