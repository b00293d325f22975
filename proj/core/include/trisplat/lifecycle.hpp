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

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>

#include "trisplat/scene.hpp"

namespace trisplat {

// Annealing, pruning and densification schedule. Defaults describe a
// 30k-iteration run; for_total() rescales the iteration landmarks.
struct TrainSchedule {
  int total_iters = 30000;
  double sigma_start = 1.0;
  double sigma_end = 1e-4;

  bool anneal_floor = true;  // false: opacity stays free (floor 0) throughout
  int floor_start_iter = 5000;
  int floor_end_iter = 27000;
  double floor_end = 0.995;

  bool hard_prune = true;
  int hard_prune_iter = 5000;
  double hard_prune_threshold = 0.2;

  bool blend_prune = true;
  double tau_prune = 0.01;
  int prune_interval = 500;

  int densify_interval = 500;
  int densify_start = 500;
  int densify_end = 18000;
  double densify_rate = 0.05;
  std::size_t max_triangles = 4'000'000;

  // Trailing iterations trained with every opacity snapped to 1.
  int final_opaque_iters = 500;

  // Defaults with every landmark scaled to `total` iterations.
  static TrainSchedule for_total(int total);

  void validate() const;
};

// Log-linear from sigma_start at 0 to sigma_end at total_iters.
double sigma_at(const TrainSchedule& s, int iter);

// 0 before floor_start_iter, then linear up to floor_end at floor_end_iter,
// constant afterwards.
double floor_at(const TrainSchedule& s, int iter);

struct PruneReport {
  std::size_t triangles_before = 0;
  std::size_t triangles_removed = 0;
  std::size_t vertices_removed = 0;

  double removed_fraction() const {
    return triangles_before == 0
               ? 0.0
               : static_cast<double>(triangles_removed) / triangles_before;
  }
};

// Deactivates every triangle whose mapped opacity (at `floor`) is strictly
// below `threshold`, then orphaned vertices.
PruneReport hard_prune(Scene& scene, double floor, double threshold);

// Deactivates triangles whose maximum blend weight over all training views
// is below tau. max_weights is indexed by triangle and must match the
// triangle count.
PruneReport blend_weight_prune(Scene& scene, std::span<const double> max_weights,
                               double tau);

// Deactivates vertices referenced by no active triangle; returns the count.
std::size_t prune_orphan_vertices(Scene& scene);

struct DensifyReport {
  std::size_t selected = 0;
  std::size_t triangles_added = 0;
  std::size_t vertices_added = 0;
};

// Bernoulli selection with p = rate * o_T, then midpoint subdivision of each
// selected triangle into four. Midpoints are shared per undirected edge
// within one call and take the mean position, SH and opacity logit of their
// endpoints. Parents are tombstoned; children are appended.
DensifyReport densify(Scene& scene, double rate, double floor,
                      std::size_t max_triangles, std::mt19937_64& rng);

// Subdivides exactly the listed triangles (no sampling).
DensifyReport subdivide(Scene& scene, std::span<const std::uint32_t> triangles);

std::string format_report(const char* event, int iter, const PruneReport& r,
                          const Scene& scene);
std::string format_report(const char* event, int iter, const DensifyReport& r,
                          const Scene& scene);

}  // namespace trisplat
