// Copyright 2026 The trisplat Authors
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "trisplat/lifecycle.hpp"
#include "trisplat/losses.hpp"
#include "trisplat/optimizer.hpp"

namespace trisplat {

struct LearningRates {
  double position = 1.6e-4;
  double position_final = 1.6e-6;  // exponential decay target at total_iters
  double position_scale = 1.0;     // multiplies both position rates
  double sh_dc = 2.5e-3;
  double sh_rest = 1.25e-4;
  double opacity = 5e-2;

  // Rates for iteration `iter` of `total`.
  GroupRates at(int iter, int total) const;
  void validate() const;
};

struct TrainConfig {
  int total_iters = 30000;
  LearningRates lr;
  AdamConfig adam;
  int aa_scale = 2;
  LossWeights loss;
  TrainSchedule schedule;
  std::uint64_t seed = 0;
  int eval_interval = 1000;        // 0: evaluate only at the end
  int checkpoint_interval = 0;     // 0: only the final checkpoint
  int threads = 0;                 // 0: hardware concurrency
  bool deterministic = false;
  bool use_normal_prior = false;
  double near_plane = 0.01;

  void validate() const;
};

using KeyValues = std::map<std::string, std::string>;

// Flat "key = value" lines; '#' starts a comment. Throws UsageError with
// the origin and line number on malformed input.
KeyValues parse_key_values(std::string_view text, const std::string& origin);
KeyValues read_config_file(const std::filesystem::path& path);

// Applies overrides in place. Setting total_iters rescales every schedule
// landmark first, so explicit schedule keys in the same map win. Unknown
// keys and unparsable values throw UsageError.
void apply_config(TrainConfig& config, const KeyValues& values);

// Every field as key=value, one per line, in a fixed order.
std::string format_config(const TrainConfig& config);

}  // namespace trisplat
