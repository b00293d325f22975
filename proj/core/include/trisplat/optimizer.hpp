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

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "trisplat/grad.hpp"
#include "trisplat/scene.hpp"

namespace trisplat {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-15;

  void validate() const;
};

enum ParamGroup : int {
  kGroupPosition = 0,
  kGroupShDc = 1,
  kGroupShRest = 2,
  kGroupOpacity = 3,
  kGroupCount = 4,
};

// Scalars per vertex in each group.
inline constexpr std::array<int, kGroupCount> kGroupWidth = {3, 3, kShCoeffCount - 3, 1};

struct GroupRates {
  std::array<double, kGroupCount> lr{};
};

// Adam with one moment pair per scalar parameter. All groups share a step
// counter; moments of vertices appended after the last resize start at zero.
struct AdamState {
  std::uint64_t steps = 0;
  std::array<std::vector<double>, kGroupCount> m;
  std::array<std::vector<double>, kGroupCount> v;

  std::size_t vertex_count() const { return m[0].size() / kGroupWidth[0]; }
  void resize(std::size_t vertices);
  // Reorders moments after compact(); map[old] = new or -1.
  void remap(std::span<const std::int64_t> vertex_map, std::size_t new_count);
};

class Adam {
 public:
  explicit Adam(AdamConfig config = {});

  AdamState& state() { return state_; }
  const AdamState& state() const { return state_; }

  // One update of all active vertices. Scalars whose gradient is exactly
  // zero are skipped entirely, so invisible vertices do not drift on stale
  // momentum.
  void step(VertexSet& vertices, const GradientBuffer& grads, const GroupRates& rates);

 private:
  AdamConfig config_;
  AdamState state_;
};

}  // namespace trisplat
