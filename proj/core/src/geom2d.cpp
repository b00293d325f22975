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

#include "trisplat/geom2d.hpp"

#include <algorithm>
#include <cmath>

#include "trisplat/error.hpp"

namespace trisplat {

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// d cross2(a, b) / d a and / d b.
Vec2 cross2_da(const Vec2& b) { return Vec2(b.y(), -b.x()); }
Vec2 cross2_db(const Vec2& a) { return Vec2(-a.y(), a.x()); }

}  // namespace

ProjectedVertex project_vertex(const Vec3& v, const Camera& cam, double near) {
  const Vec3 x = cam.rotation * v + cam.translation;
  ProjectedVertex out;
  out.z = x.z();
  if (!(x.z() > near)) {
    out.behind_camera = true;
    out.q = Vec2::Zero();
    return out;
  }
  out.q = Vec2(cam.fx * x.x() / x.z() + cam.cx, cam.fy * x.y() / x.z() + cam.cy);
  return out;
}

Eigen::Matrix<double, 2, 3> projection_jacobian(const Vec3& v,
                                                const Camera& cam) {
  const Vec3 x = cam.rotation * v + cam.translation;
  const double iz = 1.0 / x.z();
  Eigen::Matrix<double, 2, 3> d_cam;
  d_cam << cam.fx * iz, 0.0, -cam.fx * x.x() * iz * iz,
           0.0, cam.fy * iz, -cam.fy * x.y() * iz * iz;
  return d_cam * cam.rotation;
}

std::optional<ProjectedTriangle> make_projected_triangle(
    const std::array<Vec2, 3>& q, double depth, int width, int height) {
  ProjectedTriangle tri;
  tri.q = q;
  tri.depth = depth;
  const double area2 = cross2(q[1] - q[0], q[2] - q[0]);
  tri.signed_area = 0.5 * area2;
  if (!std::isfinite(area2) || std::abs(tri.signed_area) < kMinProjectedArea) {
    return std::nullopt;
  }
  const double perimeter =
      (q[1] - q[0]).norm() + (q[2] - q[1]).norm() + (q[0] - q[2]).norm();
  if (perimeter < kMinPerimeter) return std::nullopt;
  tri.orientation = area2 > 0.0 ? 1.0 : -1.0;

  for (int k = 0; k < 3; ++k) {
    const Vec2 e = q[(k + 1) % 3] - q[k];
    tri.edge_lengths[k] = e.norm();
    const Vec2 n = tri.orientation * Vec2(e.y(), -e.x()) / tri.edge_lengths[k];
    tri.edge_normals[k] = n;
    tri.edge_offsets[k] = -n.dot(q[k]);
  }
  const Incenter inc = incenter(q);
  tri.incenter = inc.point;
  tri.incenter_sdf = inc.sdf;

  const double min_x = std::min({q[0].x(), q[1].x(), q[2].x()});
  const double max_x = std::max({q[0].x(), q[1].x(), q[2].x()});
  const double min_y = std::min({q[0].y(), q[1].y(), q[2].y()});
  const double max_y = std::max({q[0].y(), q[1].y(), q[2].y()});
  // Pixel u has its center at u + 0.5.
  auto lo = [](double v, int limit) {
    return static_cast<int>(std::clamp(std::ceil(v - 0.5), 0.0, double(limit)));
  };
  auto hi = [](double v, int limit) {
    return static_cast<int>(
        std::clamp(std::floor(v - 0.5) + 1.0, 0.0, double(limit)));
  };
  tri.bbox = {lo(min_x, width), lo(min_y, height), hi(max_x, width),
              hi(max_y, height)};
  return tri;
}

double edge_value(const ProjectedTriangle& tri, int k, const Vec2& p) {
  const Vec2& a = tri.q[k];
  const Vec2 e = tri.q[(k + 1) % 3] - a;
  return -tri.orientation * cross2(e, p - a) / tri.edge_lengths[k];
}

SdfValue triangle_sdf_argmax(const ProjectedTriangle& tri, const Vec2& p) {
  SdfValue out{edge_value(tri, 0, p), 0};
  for (int k = 1; k < 3; ++k) {
    const double l = edge_value(tri, k, p);
    if (l > out.value) out = {l, k};
  }
  return out;
}

double triangle_sdf(const ProjectedTriangle& tri, const Vec2& p) {
  return triangle_sdf_argmax(tri, p).value;
}

Incenter incenter(const std::array<Vec2, 3>& q) {
  const double a = (q[1] - q[2]).norm();  // opposite q[0]
  const double b = (q[2] - q[0]).norm();  // opposite q[1]
  const double c = (q[0] - q[1]).norm();  // opposite q[2]
  const double perimeter = a + b + c;
  if (!(perimeter >= kMinPerimeter)) {
    throw UsageError("degenerate triangle has no incenter");
  }
  const double area2 = std::abs(cross2(q[1] - q[0], q[2] - q[0]));
  return {(a * q[0] + b * q[1] + c * q[2]) / perimeter, -area2 / perimeter};
}

double window(const ProjectedTriangle& tri, const Vec2& p, double sigma) {
  const double phi = triangle_sdf(tri, p);
  if (!(phi < 0.0)) return 0.0;
  const double ratio = std::min(phi / tri.incenter_sdf, 1.0);
  return std::pow(ratio, sigma);
}

Vec3 barycentric(const std::array<Vec2, 3>& q, const Vec2& p) {
  const double area2 = cross2(q[1] - q[0], q[2] - q[0]);
  if (!(std::abs(area2) >= 2.0 * kMinProjectedArea)) {
    throw UsageError("barycentric coordinates of a degenerate triangle");
  }
  Vec3 lambda;
  for (int k = 0; k < 3; ++k) {
    lambda[k] = cross2(q[(k + 1) % 3] - p, q[(k + 2) % 3] - p) / area2;
  }
  return lambda;
}

void edge_distance_gradient(const ProjectedTriangle& tri, int edge,
                            const Vec2& p, Vec2& d_from, Vec2& d_to) {
  const Vec2& qa = tri.q[edge];
  const Vec2& qb = tri.q[(edge + 1) % 3];
  const Vec2 e = qb - qa;
  const Vec2 w = p - qa;
  const double len = e.norm();
  const double num = e.y() * w.x() - e.x() * w.y();
  const double s = tri.orientation;
  const Vec2 d_e = s * (Vec2(-w.y(), w.x()) / len - num * e / (len * len * len));
  d_to = d_e;
  d_from = -d_e - tri.edge_normals[edge];
}

std::array<Vec2, 3> incenter_sdf_gradient(const ProjectedTriangle& tri) {
  const auto& q = tri.q;
  const Vec2 e01 = q[1] - q[0];
  const Vec2 e12 = q[2] - q[1];
  const Vec2 e20 = q[0] - q[2];
  const double l01 = e01.norm(), l12 = e12.norm(), l20 = e20.norm();
  const double perimeter = l01 + l12 + l20;
  const Vec2 u01 = e01 / l01, u12 = e12 / l12, u20 = e20 / l20;
  std::array<Vec2, 3> d_perim = {-u01 + u20, u01 - u12, u12 - u20};

  const Vec2 e02 = q[2] - q[0];
  const double area2 = cross2(e01, e02);
  const Vec2 da_d1 = cross2_da(e02);
  const Vec2 da_d2 = cross2_db(e01);
  std::array<Vec2, 3> d_area2 = {-(da_d1 + da_d2), da_d1, da_d2};

  // phi_s = -|area2| / P
  const double abs_area2 = std::abs(area2);
  const double s = tri.orientation;
  std::array<Vec2, 3> g;
  for (int k = 0; k < 3; ++k) {
    g[k] = -s * d_area2[k] / perimeter +
           abs_area2 * d_perim[k] / (perimeter * perimeter);
  }
  return g;
}

std::array<std::array<Vec2, 3>, 3> barycentric_gradient(
    const ProjectedTriangle& tri, const Vec2& p) {
  const auto& q = tri.q;
  const Vec2 e01 = q[1] - q[0];
  const Vec2 e02 = q[2] - q[0];
  const double area2 = cross2(e01, e02);
  const Vec2 da_d1 = cross2_da(e02);
  const Vec2 da_d2 = cross2_db(e01);
  const std::array<Vec2, 3> d_area2 = {-(da_d1 + da_d2), da_d1, da_d2};

  std::array<std::array<Vec2, 3>, 3> g;
  for (int k = 0; k < 3; ++k) {
    const int j1 = (k + 1) % 3;
    const int j2 = (k + 2) % 3;
    const Vec2 w1 = q[j1] - p;
    const Vec2 w2 = q[j2] - p;
    const double lambda = cross2(w1, w2) / area2;
    std::array<Vec2, 3> d_num;
    d_num[k] = Vec2::Zero();
    d_num[j1] = cross2_da(w2);
    d_num[j2] = cross2_db(w1);
    for (int j = 0; j < 3; ++j) {
      g[k][j] = (d_num[j] - lambda * d_area2[j]) / area2;
    }
  }
  return g;
}

Vec3 incenter3d(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double la = (b - c).norm();
  const double lb = (c - a).norm();
  const double lc = (a - b).norm();
  const double perimeter = la + lb + lc;
  if (!(perimeter > 0.0)) return a;
  return (la * a + lb * b + lc * c) / perimeter;
}

std::array<Vec3, 3> incenter3d_vjp(const Vec3& a, const Vec3& b, const Vec3& c,
                                   const Vec3& g) {
  const double la = (b - c).norm();
  const double lb = (c - a).norm();
  const double lc = (a - b).norm();
  const double perimeter = la + lb + lc;
  std::array<Vec3, 3> out = {Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  if (!(perimeter > 0.0) || la == 0.0 || lb == 0.0 || lc == 0.0) return out;
  const Vec3 inc = (la * a + lb * b + lc * c) / perimeter;
  const Vec3 g_num = g / perimeter;
  const double g_perim = -g.dot(inc) / perimeter;
  out[0] += la * g_num;
  out[1] += lb * g_num;
  out[2] += lc * g_num;
  const double g_la = g_num.dot(a) + g_perim;
  const double g_lb = g_num.dot(b) + g_perim;
  const double g_lc = g_num.dot(c) + g_perim;
  const Vec3 ua = (b - c) / la;
  const Vec3 ub = (c - a) / lb;
  const Vec3 uc = (a - b) / lc;
  out[1] += g_la * ua;
  out[2] -= g_la * ua;
  out[2] += g_lb * ub;
  out[0] -= g_lb * ub;
  out[0] += g_lc * uc;
  out[1] -= g_lc * uc;
  return out;
}

}  // namespace trisplat
