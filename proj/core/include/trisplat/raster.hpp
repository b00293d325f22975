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

#include "trisplat/camera.hpp"
#include "trisplat/geom2d.hpp"
#include "trisplat/image.hpp"
#include "trisplat/scene.hpp"
#include "trisplat/types.hpp"

namespace trisplat {

inline constexpr int kTileSize = 16;
// Compositing stops once transmittance drops below this value.
inline constexpr double kTransmittanceCutoff = 1e-4;

struct RenderSettings {
  double sigma = 1.0;
  double opacity_floor = 0.0;
  // Post-training regime: every triangle has opacity exactly 1.
  bool force_opaque = false;
  Vec3 background = Vec3::Zero();
  double near_plane = kDefaultNearPlane;
  int threads = 1;
  // Also accumulate per-pixel geometric normals.
  bool with_normals = false;
};

// Per-view state of one visible triangle.
struct TriangleSetup {
  std::uint32_t id = 0;  // index into Scene::triangles
  ProjectedTriangle proj;
  Vec3 view_dir;                      // camera center -> 3D incenter, unit
  ShBasis basis{};                    // SH basis at view_dir
  std::array<Vec3, 3> color_raw;      // unclamped vertex colors
  std::array<Vec3, 3> color;          // clamped to [0, 1]
  double opacity = 1.0;
  int opacity_argmin = 0;
  Vec3 normal;  // unit world-space normal facing the camera
};

// Projection, culling and 16x16 tile binning for one view.
struct FrameSetup {
  int width = 0;
  int height = 0;
  int tiles_x = 0;
  int tiles_y = 0;
  std::size_t scene_triangles = 0;
  std::vector<TriangleSetup> triangles;
  // Per tile: indices into `triangles`, ascending (depth, triangle id).
  std::vector<std::vector<std::uint32_t>> tile_lists;
};

FrameSetup prepare_frame(const Scene& scene, const Camera& cam,
                         const RenderSettings& settings);

struct RenderOutput {
  Image color;          // H x W x 3
  Image transmittance;  // H x W x 1, residual after compositing
  // Scene triangle index with the largest blend weight T*o*I, or -1.
  std::vector<std::int32_t> winner_id;
  // Per scene triangle: max over pixels with I > 0 of T*o.
  std::vector<double> per_triangle_max_weight;
  // H x W x 3 weighted sum of normals (unnormalized); only with_normals.
  Image normals;
};

struct Contribution {
  Vec3 color;
  double opacity = 0.0;
  double window = 0.0;
};

struct CompositeResult {
  Vec3 color;
  double transmittance = 1.0;
  // Blend weight T_n * o_n * I_n of each consumed contribution.
  std::vector<double> weights;
};

// Front-to-back compositing of depth-ordered contributions over `background`.
CompositeResult composite_pixel(std::span<const Contribution> contributions,
                                const Vec3& background);

RenderOutput render_frame(const FrameSetup& setup,
                          const RenderSettings& settings);
RenderOutput render(const Scene& scene, const Camera& cam,
                    const RenderSettings& settings);

// Renders at aa_scale times the camera resolution and box-averages back
// down. winner_id comes from the top-left subsample of each block.
RenderOutput render_aa(const Scene& scene, const Camera& cam,
                       const RenderSettings& settings, int aa_scale);

// Weighted per-pixel normals from the same compositing weights as the color,
// renormalized where the accumulated length exceeds 1e-6, zero elsewhere.
Image render_normals(const Scene& scene, const Camera& cam,
                     const RenderSettings& settings, int aa_scale = 1);
Image normalize_normals(const Image& accumulated);

// Opaque fast path: per-pixel depth test (nearest triangle depth wins, ties
// to the lower id) with no sorting; color = o*I*c + (1 - o*I)*background.
struct DepthTestOutput {
  Image color;
  std::vector<std::int32_t> winner_id;
};
DepthTestOutput render_depth_test(const Scene& scene, const Camera& cam,
                                  const RenderSettings& settings);

// Max-reduces per_triangle_max_weight of a view into `accum` (resized to
// fit).
void accumulate_max_weights(const RenderOutput& out, std::vector<double>& accum);

}  // namespace trisplat
