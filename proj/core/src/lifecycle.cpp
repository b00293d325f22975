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

#include "trisplat/lifecycle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>
#include <vector>

#include "trisplat/error.hpp"

namespace trisplat {

TrainSchedule TrainSchedule::for_total(int total) {
  TrainSchedule s;
  const double f = static_cast<double>(total) / 30000.0;
  auto scale = [&](int v) { return static_cast<int>(std::lround(v * f)); };
  s.total_iters = total;
  s.floor_start_iter = scale(5000);
  s.floor_end_iter = scale(27000);
  s.hard_prune_iter = scale(5000);
  s.prune_interval = std::max(1, scale(500));
  s.densify_interval = std::max(1, scale(500));
  s.densify_start = scale(500);
  s.densify_end = scale(18000);
  s.final_opaque_iters = scale(500);
  return s;
}

void TrainSchedule::validate() const {
  if (total_iters < 0) throw UsageError("total_iters must be >= 0");
  if (!(sigma_start >= 1e-4 && sigma_start <= 1.0 && sigma_end >= 1e-4 &&
        sigma_end <= sigma_start)) {
    throw UsageError("sigma schedule must decrease within [1e-4, 1]");
  }
  if (anneal_floor && !(floor_start_iter <= floor_end_iter &&
                        floor_end_iter <= total_iters)) {
    throw UsageError("need floor_start_iter <= floor_end_iter <= total_iters");
  }
  if (!(floor_end >= 0.0 && floor_end < 1.0)) {
    throw UsageError("floor_end must lie in [0, 1)");
  }
  if (!(hard_prune_threshold > 0.0 && hard_prune_threshold < 1.0)) {
    throw UsageError("hard_prune_threshold must lie in (0, 1)");
  }
  if (!(tau_prune > 0.0 && tau_prune < 1.0)) {
    throw UsageError("tau_prune must lie in (0, 1)");
  }
  if (prune_interval <= 0 || densify_interval <= 0) {
    throw UsageError("prune and densify intervals must be positive");
  }
  if (!(densify_rate >= 0.0 && densify_rate <= 1.0)) {
    throw UsageError("densify_rate must lie in [0, 1]");
  }
  if (final_opaque_iters < 0) throw UsageError("final_opaque_iters must be >= 0");
}

double sigma_at(const TrainSchedule& s, int iter) {
  if (s.total_iters <= 0) return s.sigma_end;
  const double t = std::clamp(static_cast<double>(iter) / s.total_iters, 0.0, 1.0);
  if (t >= 1.0) return s.sigma_end;
  const double log_sigma =
      std::log(s.sigma_start) + t * (std::log(s.sigma_end) - std::log(s.sigma_start));
  return std::clamp(std::exp(log_sigma), s.sigma_end, s.sigma_start);
}

double floor_at(const TrainSchedule& s, int iter) {
  if (!s.anneal_floor || iter < s.floor_start_iter) return 0.0;
  if (iter >= s.floor_end_iter) return s.floor_end;
  const double t = static_cast<double>(iter - s.floor_start_iter) /
                   static_cast<double>(s.floor_end_iter - s.floor_start_iter);
  return t * s.floor_end;
}

namespace {

double triangle_mapped_opacity(const Scene& scene, std::size_t m, double floor) {
  const TriangleIndices& idx = scene.triangles.indices[m];
  const auto& logit = scene.vertices.opacity_logit;
  return triangle_opacity(map_opacity(logit[idx[0]], floor),
                          map_opacity(logit[idx[1]], floor),
                          map_opacity(logit[idx[2]], floor))
      .value;
}

}  // namespace

std::size_t prune_orphan_vertices(Scene& scene) {
  const std::vector<std::uint32_t> degree = vertex_degrees(scene);
  std::size_t removed = 0;
  for (std::size_t i = 0; i < degree.size(); ++i) {
    if (scene.vertices.active[i] && degree[i] == 0) {
      scene.vertices.active[i] = 0;
      ++removed;
    }
  }
  return removed;
}

PruneReport hard_prune(Scene& scene, double floor, double threshold) {
  PruneReport r;
  r.triangles_before = scene.triangles.active_count();
  for (std::size_t m = 0; m < scene.triangles.size(); ++m) {
    if (!scene.triangles.active[m]) continue;
    if (triangle_mapped_opacity(scene, m, floor) < threshold) {
      scene.triangles.active[m] = 0;
      ++r.triangles_removed;
    }
  }
  r.vertices_removed = prune_orphan_vertices(scene);
  return r;
}

PruneReport blend_weight_prune(Scene& scene, std::span<const double> max_weights,
                               double tau) {
  if (max_weights.size() != scene.triangles.size()) {
    throw UsageError("blend weight vector length " +
                     std::to_string(max_weights.size()) +
                     " does not match triangle count " +
                     std::to_string(scene.triangles.size()));
  }
  PruneReport r;
  r.triangles_before = scene.triangles.active_count();
  for (std::size_t m = 0; m < scene.triangles.size(); ++m) {
    if (!scene.triangles.active[m]) continue;
    if (max_weights[m] < tau) {
      scene.triangles.active[m] = 0;
      ++r.triangles_removed;
    }
  }
  r.vertices_removed = prune_orphan_vertices(scene);
  return r;
}

DensifyReport subdivide(Scene& scene, std::span<const std::uint32_t> selected) {
  DensifyReport r;
  VertexSet& v = scene.vertices;
  TriangleSet& t = scene.triangles;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoints;
  auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
    const auto key = std::minmax(a, b);
    const auto it = midpoints.find(key);
    if (it != midpoints.end()) return it->second;
    ShCoeffs sh;
    for (int i = 0; i < kShCoeffCount; ++i) sh[i] = 0.5 * (v.sh[a][i] + v.sh[b][i]);
    const std::uint32_t id =
        v.add(0.5 * (v.positions[a] + v.positions[b]), sh,
              0.5 * (v.opacity_logit[a] + v.opacity_logit[b]));
    midpoints.emplace(key, id);
    ++r.vertices_added;
    return id;
  };
  for (std::uint32_t m : selected) {
    if (m >= t.size() || !t.active[m]) continue;
    const TriangleIndices tri = t.indices[m];
    const std::uint32_t ab = midpoint(tri[0], tri[1]);
    const std::uint32_t bc = midpoint(tri[1], tri[2]);
    const std::uint32_t ca = midpoint(tri[2], tri[0]);
    t.active[m] = 0;
    t.add({tri[0], ab, ca});
    t.add({ab, tri[1], bc});
    t.add({ca, bc, tri[2]});
    t.add({ab, bc, ca});
    ++r.selected;
    r.triangles_added += 4;
  }
  return r;
}

DensifyReport densify(Scene& scene, double rate, double floor,
                      std::size_t max_triangles, std::mt19937_64& rng) {
  if (rate <= 0.0) return {};
  std::vector<std::pair<double, std::uint32_t>> picked;
  for (std::size_t m = 0; m < scene.triangles.size(); ++m) {
    if (!scene.triangles.active[m]) continue;
    const double o = triangle_mapped_opacity(scene, m, floor);
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (u < std::min(1.0, rate * o)) {
      picked.emplace_back(o, static_cast<std::uint32_t>(m));
    }
  }
  // Each subdivision adds a net three triangles.
  const std::size_t active = scene.triangles.active_count();
  const std::size_t room = max_triangles > active ? (max_triangles - active) / 3 : 0;
  if (picked.size() > room) {
    std::stable_sort(picked.begin(), picked.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    picked.resize(room);
    std::sort(picked.begin(), picked.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
  }
  std::vector<std::uint32_t> ids;
  ids.reserve(picked.size());
  for (const auto& [o, m] : picked) ids.push_back(m);
  return subdivide(scene, ids);
}

std::string format_report(const char* event, int iter, const PruneReport& r,
                          const Scene& scene) {
  std::ostringstream os;
  os << "event=" << event << " iter=" << iter
     << " triangles_removed=" << r.triangles_removed
     << " triangles_before=" << r.triangles_before
     << " removed_fraction=" << r.removed_fraction()
     << " vertices_removed=" << r.vertices_removed
     << " triangles=" << scene.triangles.active_count()
     << " vertices=" << scene.vertices.active_count();
  return os.str();
}

std::string format_report(const char* event, int iter, const DensifyReport& r,
                          const Scene& scene) {
  std::ostringstream os;
  os << "event=" << event << " iter=" << iter << " selected=" << r.selected
     << " triangles_added=" << r.triangles_added
     << " vertices_added=" << r.vertices_added
     << " triangles=" << scene.triangles.active_count()
     << " vertices=" << scene.vertices.active_count();
  return os.str();
}

}  // namespace trisplat
