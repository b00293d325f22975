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

#include "trisplat/optimizer.hpp"

#include <cmath>

#include "trisplat/error.hpp"

namespace trisplat {

void AdamConfig::validate() const {
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) {
    throw UsageError("adam moment decays must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw UsageError("adam epsilon must be positive");
}

void AdamState::resize(std::size_t vertices) {
  for (int g = 0; g < kGroupCount; ++g) {
    m[g].resize(vertices * kGroupWidth[g], 0.0);
    v[g].resize(vertices * kGroupWidth[g], 0.0);
  }
}

void AdamState::remap(std::span<const std::int64_t> vertex_map, std::size_t new_count) {
  for (int g = 0; g < kGroupCount; ++g) {
    const std::size_t w = kGroupWidth[g];
    std::vector<double> nm(new_count * w, 0.0), nv(new_count * w, 0.0);
    for (std::size_t i = 0; i < vertex_map.size(); ++i) {
      const std::int64_t j = vertex_map[i];
      if (j < 0 || (i + 1) * w > m[g].size()) continue;
      for (std::size_t k = 0; k < w; ++k) {
        nm[j * w + k] = m[g][i * w + k];
        nv[j * w + k] = v[g][i * w + k];
      }
    }
    m[g] = std::move(nm);
    v[g] = std::move(nv);
  }
}

Adam::Adam(AdamConfig config) : config_(config) { config_.validate(); }

void Adam::step(VertexSet& vertices, const GradientBuffer& grads,
                const GroupRates& rates) {
  const std::size_t n = vertices.size();
  if (grads.d_positions.size() != n) {
    throw UsageError("gradient buffer does not match the vertex count");
  }
  state_.resize(n);
  ++state_.steps;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state_.steps));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state_.steps));

  auto update = [&](int g, std::size_t slot, double grad, double& param) {
    if (grad == 0.0) return;  // untouched scalars keep their moments
    double& m = state_.m[g][slot];
    double& v = state_.v[g][slot];
    m = b1 * m + (1.0 - b1) * grad;
    v = b2 * v + (1.0 - b2) * grad * grad;
    if (rates.lr[g] == 0.0) return;
    param -= rates.lr[g] * (m / c1) / (std::sqrt(v / c2) + config_.epsilon);
  };

  for (std::size_t i = 0; i < n; ++i) {
    if (!vertices.active[i]) continue;
    for (int k = 0; k < 3; ++k) {
      update(kGroupPosition, 3 * i + k, grads.d_positions[i][k], vertices.positions[i][k]);
    }
    for (int k = 0; k < 3; ++k) {
      update(kGroupShDc, 3 * i + k, grads.d_sh[i][k], vertices.sh[i][k]);
    }
    const std::size_t rest = kGroupWidth[kGroupShRest];
    for (std::size_t k = 0; k < rest; ++k) {
      update(kGroupShRest, rest * i + k, grads.d_sh[i][3 + k], vertices.sh[i][3 + k]);
    }
    update(kGroupOpacity, i, grads.d_opacity_logit[i], vertices.opacity_logit[i]);
  }
}

}  // namespace trisplat
