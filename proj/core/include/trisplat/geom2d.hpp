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
#include <optional>

#include <Eigen/Core>

#include "trisplat/camera.hpp"
#include "trisplat/types.hpp"

namespace trisplat {

inline constexpr double kDefaultNearPlane = 0.01;
// Projected triangles with |area| below this (px^2) are culled.
inline constexpr double kMinProjectedArea = 1e-8;
// Perimeter below which the incenter is undefined (px).
inline constexpr double kMinPerimeter = 1e-9;

// Half-open pixel rectangle [x0, x1) x [y0, y1). Empty when x0 >= x1.
struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  bool empty() const { return x0 >= x1 || y0 >= y1; }
};

struct ProjectedVertex {
  Vec2 q;
  double z = 0.0;
  bool behind_camera = false;
};

ProjectedVertex project_vertex(const Vec3& v, const Camera& cam,
                               double near = kDefaultNearPlane);

// d q / d v for a vertex in front of the camera.
Eigen::Matrix<double, 2, 3> projection_jacobian(const Vec3& v,
                                                const Camera& cam);

// Image-space triangle with its edge half-planes. Edge k runs from q[k] to
// q[(k + 1) % 3]; L_k(p) = normal[k] . p + offset[k] is the signed distance
// to that edge's line, positive on the outside. edge_value evaluates it as
// a cross product relative to q[k], which is exactly zero for representable
// points on the edge.
struct ProjectedTriangle {
  std::array<Vec2, 3> q;
  double depth = 0.0;
  std::array<Vec2, 3> edge_normals;
  std::array<double, 3> edge_offsets{};
  std::array<double, 3> edge_lengths{};
  Vec2 incenter;
  double incenter_sdf = 0.0;  // -inradius
  double signed_area = 0.0;   // half the cross product; sign = orientation
  double orientation = 1.0;   // +1 or -1
  PixelRect bbox;             // pixels whose centers fall in the bounding box
};

// Builds the half-plane form. Returns nullopt for degenerate triangles.
// bbox is clipped to a width x height image.
std::optional<ProjectedTriangle> make_projected_triangle(
    const std::array<Vec2, 3>& q, double depth, int width, int height);

struct SdfValue {
  double value;
  int edge;  // first edge attaining the maximum
};

double edge_value(const ProjectedTriangle& tri, int k, const Vec2& p);
SdfValue triangle_sdf_argmax(const ProjectedTriangle& tri, const Vec2& p);
double triangle_sdf(const ProjectedTriangle& tri, const Vec2& p);

struct Incenter {
  Vec2 point;
  double sdf;  // equals -inradius
};

// Side-length weighted incenter. Throws UsageError for a degenerate
// triangle (perimeter < 1e-9 px).
Incenter incenter(const std::array<Vec2, 3>& q);

// ReLU(phi(p) / phi(s))^sigma: 1 at the incenter, 0 on and outside the
// boundary.
double window(const ProjectedTriangle& tri, const Vec2& p, double sigma);

// Signed-area barycentric coordinates. Throws UsageError for a degenerate
// triangle.
Vec3 barycentric(const std::array<Vec2, 3>& q, const Vec2& p);

// --- derivatives used by the backward pass ---

// Gradient of L_edge(p) with respect to the edge endpoints q[edge] (d_from)
// and q[(edge + 1) % 3] (d_to). The orientation is held fixed.
void edge_distance_gradient(const ProjectedTriangle& tri, int edge,
                            const Vec2& p, Vec2& d_from, Vec2& d_to);

// Gradient of phi(s) = -2|area| / perimeter with respect to q[0..2].
std::array<Vec2, 3> incenter_sdf_gradient(const ProjectedTriangle& tri);

// result[k][j] = d lambda_k / d q_j.
std::array<std::array<Vec2, 3>, 3> barycentric_gradient(
    const ProjectedTriangle& tri, const Vec2& p);

// Incenter of a triangle in 3D and its vector-Jacobian product: returns
// d(g . incenter)/d{a, b, c}.
Vec3 incenter3d(const Vec3& a, const Vec3& b, const Vec3& c);
std::array<Vec3, 3> incenter3d_vjp(const Vec3& a, const Vec3& b, const Vec3& c,
                                   const Vec3& g);

}  // namespace trisplat
