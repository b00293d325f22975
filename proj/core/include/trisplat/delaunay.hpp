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
#include <optional>
#include <span>
#include <vector>

#include "trisplat/scene.hpp"
#include "trisplat/types.hpp"

namespace trisplat {

struct Tetrahedralization {
  std::vector<Vec3> points;
  std::vector<std::array<std::uint32_t, 4>> tets;
};

// 3D Delaunay tetrahedralization by incremental Bowyer-Watson insertion
// inside an enclosing super-tetrahedron. Points are jittered by uniform
// noise of magnitude 1e-9 * bbox diagonal (seeded) to break degeneracies;
// predicates are exact. Returned tets index the original points and have
// positive orientation. Throws DataError for fewer than four points or an
// all-coplanar cloud.
Tetrahedralization delaunay3d(std::span<const Vec3> points,
                              std::uint64_t jitter_seed);

// Every distinct vertex triple of the tetrahedra, sorted ascending.
std::vector<TriangleIndices> extract_unique_faces(
    std::span<const std::array<std::uint32_t, 4>> tets);

// Initial opacity of every vertex (mapped with floor 0).
inline constexpr double kInitialOpacity = 0.1;

// Vertex attributes for the given points: DC band reproduces the point
// color (mid-gray without colors), higher bands zero, opacity 0.1.
VertexSet init_attributes(std::span<const Vec3> points,
                          std::span<const Vec3> colors);

// Keeps one point per occupied voxel of the given edge length (the first
// encountered); returns kept indices.
std::vector<std::uint32_t> voxel_decimate(std::span<const Vec3> points,
                                          double voxel_size);

// Delaunay -> unique faces -> attributes; unreferenced points are dropped.
Scene build_initial_scene(std::span<const Vec3> points,
                          std::span<const Vec3> colors, std::uint64_t seed);

}  // namespace trisplat
