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

#ifndef SPADE_PIPELINE_PARALLEL_HPP_
#define SPADE_PIPELINE_PARALLEL_HPP_

#include <functional>

namespace spade::pipeline {

/// Runs fn(0..n-1) on up to worker_count() threads. Each index runs
/// exactly once; results must be written to per-index slots so the outcome
/// does not depend on scheduling. The first exception is rethrown.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace spade::pipeline

#endif  // SPADE_PIPELINE_PARALLEL_HPP_
