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
#include <vector>

#include "trisplat/types.hpp"

namespace trisplat {

// Shared per-vertex parameter store. Inactive entries are tombstones that
// survive until the next compact().
struct VertexSet {
  std::vector<Vec3> positions;
  std::vector<ShCoeffs> sh;
  std::vector<double> opacity_logit;
  std::vector<std::uint8_t> active;

  std::size_t size() const { return positions.size(); }
  std::size_t active_count() const;

  // Appends an active vertex and returns its index.
  std::uint32_t add(const Vec3& position, const ShCoeffs& coeffs, double logit);
  void reserve(std::size_t n);
};

// Index triplets into a VertexSet.
struct TriangleSet {
  std::vector<TriangleIndices> indices;
  std::vector<std::uint8_t> active;

  std::size_t size() const { return indices.size(); }
  std::size_t active_count() const;

  std::uint32_t add(const TriangleIndices& tri);
};

struct Scene {
  VertexSet vertices;
  TriangleSet triangles;
};

// Shared window smoothness, valid range [1e-4, 1].
class Smoothness {
 public:
  static constexpr double kMin = 1e-4;
  static constexpr double kMax = 1.0;

  explicit Smoothness(double sigma);
  double value() const { return sigma_; }

 private:
  double sigma_;
};

// Lower bound of the opacity mapping, valid range [0, 1).
class OpacityFloor {
 public:
  explicit OpacityFloor(double floor = 0.0);
  double value() const { return floor_; }

 private:
  double floor_;
};

// floor + (1 - floor) * logistic(logit).
double map_opacity(double logit, double floor);
// d map_opacity / d logit.
double map_opacity_derivative(double logit, double floor);

struct TriangleOpacity {
  double value;
  int argmin;  // 0, 1 or 2: first minimizer, receives the gradient
};

TriangleOpacity triangle_opacity(double oi, double oj, double ok);

// Barycentric blend of three colors. Throws UsageError when lambda is off
// the simplex by more than 1e-6.
Vec3 interpolate_color(const Vec3& ci, const Vec3& cj, const Vec3& ck,
                       const Vec3& lambda);

// Number of active parameters per vertex excluding opacity (positions + SH).
inline constexpr int kParamsPerVertex = 3 + kShCoeffCount;

// Checks array sizes, finiteness and referential integrity. Throws
// InvariantError naming the first violation.
void validate(const Scene& scene);

// Per-vertex count of active triangles referencing it.
std::vector<std::uint32_t> vertex_degrees(const Scene& scene);

struct CompactionMap {
  // old index -> new index, or -1 when the entry was dropped.
  std::vector<std::int64_t> vertex;
  std::vector<std::int64_t> triangle;
};

// Drops tombstoned vertices and triangles and reindexes triangle indices.
CompactionMap compact(Scene& scene);

}  // namespace trisplat
