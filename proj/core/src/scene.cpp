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

#include "trisplat/scene.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trisplat/error.hpp"

namespace trisplat {

std::size_t VertexSet::active_count() const {
  return static_cast<std::size_t>(std::count(active.begin(), active.end(), 1));
}

std::uint32_t VertexSet::add(const Vec3& position, const ShCoeffs& coeffs,
                             double logit) {
  positions.push_back(position);
  sh.push_back(coeffs);
  opacity_logit.push_back(logit);
  active.push_back(1);
  return static_cast<std::uint32_t>(positions.size() - 1);
}

void VertexSet::reserve(std::size_t n) {
  positions.reserve(n);
  sh.reserve(n);
  opacity_logit.reserve(n);
  active.reserve(n);
}

std::size_t TriangleSet::active_count() const {
  return static_cast<std::size_t>(std::count(active.begin(), active.end(), 1));
}

std::uint32_t TriangleSet::add(const TriangleIndices& tri) {
  indices.push_back(tri);
  active.push_back(1);
  return static_cast<std::uint32_t>(indices.size() - 1);
}

Smoothness::Smoothness(double sigma) : sigma_(sigma) {
  if (!(sigma >= kMin * (1.0 - 1e-12) && sigma <= kMax * (1.0 + 1e-12))) {
    throw UsageError("smoothness sigma " + std::to_string(sigma) +
                     " outside [1e-4, 1]");
  }
}

OpacityFloor::OpacityFloor(double floor) : floor_(floor) {
  if (!(floor >= 0.0 && floor < 1.0)) {
    throw UsageError("opacity floor " + std::to_string(floor) +
                     " outside [0, 1)");
  }
}

namespace {

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

double map_opacity(double logit, double floor) {
  return floor + (1.0 - floor) * logistic(logit);
}

double map_opacity_derivative(double logit, double floor) {
  const double s = logistic(logit);
  return (1.0 - floor) * s * (1.0 - s);
}

TriangleOpacity triangle_opacity(double oi, double oj, double ok) {
  TriangleOpacity out{oi, 0};
  if (oj < out.value) out = {oj, 1};
  if (ok < out.value) out = {ok, 2};
  return out;
}

Vec3 interpolate_color(const Vec3& ci, const Vec3& cj, const Vec3& ck,
                       const Vec3& lambda) {
  constexpr double kTol = 1e-6;
  if (lambda.minCoeff() < -kTol || std::abs(lambda.sum() - 1.0) > kTol) {
    throw UsageError("barycentric weights are not on the simplex");
  }
  return lambda[0] * ci + lambda[1] * cj + lambda[2] * ck;
}

void validate(const Scene& scene) {
  const VertexSet& v = scene.vertices;
  const TriangleSet& t = scene.triangles;
  const std::size_t n = v.size();
  if (v.sh.size() != n || v.opacity_logit.size() != n || v.active.size() != n) {
    throw InvariantError("vertex arrays have inconsistent lengths");
  }
  if (t.active.size() != t.indices.size()) {
    throw InvariantError("triangle arrays have inconsistent lengths");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!v.positions[i].allFinite()) {
      throw InvariantError("vertex " + std::to_string(i) +
                           " has a non-finite position");
    }
  }
  for (std::size_t m = 0; m < t.size(); ++m) {
    if (!t.active[m]) continue;
    const TriangleIndices& tri = t.indices[m];
    for (int k = 0; k < 3; ++k) {
      if (tri[k] >= n) {
        throw InvariantError("triangle " + std::to_string(m) +
                             " references vertex " + std::to_string(tri[k]) +
                             " out of range");
      }
      if (!v.active[tri[k]]) {
        throw InvariantError("triangle " + std::to_string(m) +
                             " references inactive vertex " +
                             std::to_string(tri[k]));
      }
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw InvariantError("triangle " + std::to_string(m) +
                           " repeats a vertex index");
    }
  }
}

std::vector<std::uint32_t> vertex_degrees(const Scene& scene) {
  std::vector<std::uint32_t> degree(scene.vertices.size(), 0);
  const TriangleSet& t = scene.triangles;
  for (std::size_t m = 0; m < t.size(); ++m) {
    if (!t.active[m]) continue;
    for (std::uint32_t idx : t.indices[m]) ++degree[idx];
  }
  return degree;
}

CompactionMap compact(Scene& scene) {
  VertexSet& v = scene.vertices;
  TriangleSet& t = scene.triangles;
  CompactionMap map;
  map.vertex.assign(v.size(), -1);
  map.triangle.assign(t.size(), -1);

  std::size_t next = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v.active[i]) continue;
    map.vertex[i] = static_cast<std::int64_t>(next);
    if (next != i) {
      v.positions[next] = v.positions[i];
      v.sh[next] = v.sh[i];
      v.opacity_logit[next] = v.opacity_logit[i];
    }
    v.active[next] = 1;
    ++next;
  }
  v.positions.resize(next);
  v.sh.resize(next);
  v.opacity_logit.resize(next);
  v.active.resize(next);

  next = 0;
  for (std::size_t m = 0; m < t.size(); ++m) {
    if (!t.active[m]) continue;
    TriangleIndices tri = t.indices[m];
    for (auto& idx : tri) {
      const std::int64_t mapped = map.vertex[idx];
      if (mapped < 0) {
        throw InvariantError("active triangle " + std::to_string(m) +
                             " references a dropped vertex");
      }
      idx = static_cast<std::uint32_t>(mapped);
    }
    map.triangle[m] = static_cast<std::int64_t>(next);
    t.indices[next] = tri;
    t.active[next] = 1;
    ++next;
  }
  t.indices.resize(next);
  t.active.resize(next);
  return map;
}

}  // namespace trisplat
