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

#include "reference_renderer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "trisplat/sh.hpp"

namespace tstest {

using trisplat::Vec2;
using trisplat::Vec3;

namespace {

struct RefTri {
  std::uint32_t id;
  double depth;
  std::array<Vec2, 3> q;
  double area;  // signed
  double inradius;
  std::array<Vec3, 3> color;
  double opacity;
};

double logistic_floor(double x, double floor) {
  return floor + (1.0 - floor) / (1.0 + std::exp(-x));
}

// Signed distances of p to the three edge lines, positive outside.
std::array<double, 3> edge_distances(const RefTri& t, const Vec2& p) {
  std::array<double, 3> L;
  const double s = t.area > 0 ? 1.0 : -1.0;
  for (int k = 0; k < 3; ++k) {
    const Vec2 a = t.q[k];
    const Vec2 d = t.q[(k + 1) % 3] - a;
    const Vec2 r = p - a;
    L[k] = -s * (d.x() * r.y() - d.y() * r.x()) / d.norm();
  }
  return L;
}

}  // namespace

ReferenceOutput reference_render(const trisplat::Scene& scene,
                                 const trisplat::Camera& cam,
                                 const trisplat::RenderSettings& settings) {
  const auto& V = scene.vertices;
  const auto& T = scene.triangles;
  const Vec3 center = -cam.rotation.transpose() * cam.translation;

  std::vector<RefTri> tris;
  for (std::size_t m = 0; m < T.size(); ++m) {
    if (!T.active[m]) continue;
    RefTri t;
    t.id = static_cast<std::uint32_t>(m);
    bool behind = false;
    std::array<Vec3, 3> P;
    for (int k = 0; k < 3; ++k) {
      P[k] = V.positions[T.indices[m][k]];
      const Vec3 c = cam.rotation * P[k] + cam.translation;
      if (c.z() <= settings.near_plane) behind = true;
      t.q[k] = Vec2(cam.fx * c.x() / c.z() + cam.cx, cam.fy * c.y() / c.z() + cam.cy);
    }
    if (behind) continue;
    const Vec2 e1 = t.q[1] - t.q[0], e2 = t.q[2] - t.q[0];
    t.area = 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
    if (std::abs(t.area) < 1e-8) continue;
    const double perim =
        (t.q[1] - t.q[0]).norm() + (t.q[2] - t.q[1]).norm() + (t.q[0] - t.q[2]).norm();
    t.inradius = 2.0 * std::abs(t.area) / perim;

    const double la = (P[1] - P[2]).norm(), lb = (P[2] - P[0]).norm(),
                 lc = (P[0] - P[1]).norm();
    const Vec3 inc = (la * P[0] + lb * P[1] + lc * P[2]) / (la + lb + lc);
    t.depth = (cam.rotation * inc + cam.translation).z();
    const Vec3 dir = (inc - center).normalized();

    std::array<double, 3> o;
    for (int k = 0; k < 3; ++k) {
      const auto v = T.indices[m][k];
      t.color[k] = trisplat::vertex_color(V.sh[v], dir);
      o[k] = settings.force_opaque ? 1.0
                                   : logistic_floor(V.opacity_logit[v], settings.opacity_floor);
    }
    t.opacity = std::min({o[0], o[1], o[2]});
    tris.push_back(t);
  }
  std::sort(tris.begin(), tris.end(), [](const RefTri& a, const RefTri& b) {
    return a.depth != b.depth ? a.depth < b.depth : a.id < b.id;
  });

  const int W = cam.width, H = cam.height;
  ReferenceOutput out;
  out.color = trisplat::Image(W, H, 3);
  out.transmittance = trisplat::Image(W, H, 1);
  out.winner_id.assign(static_cast<std::size_t>(W) * H, -1);
  out.per_triangle_max_weight.assign(T.size(), 0.0);
  out.kink_distance.assign(static_cast<std::size_t>(W) * H,
                           std::numeric_limits<double>::infinity());

  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const Vec2 p(x + 0.5, y + 0.5);
      const std::size_t pix = static_cast<std::size_t>(y) * W + x;
      double& kink = out.kink_distance[pix];
      double trans = 1.0;
      Vec3 color = Vec3::Zero();
      double best = -1.0;
      bool stopped = false;
      for (const RefTri& t : tris) {
        std::array<double, 3> L = edge_distances(t, p);
        std::array<double, 3> sorted = L;
        std::sort(sorted.begin(), sorted.end());
        const double phi = sorted[2];
        kink = std::min(kink, std::abs(phi));
        if (phi < 0.0) kink = std::min(kink, sorted[2] - sorted[1]);
        if (stopped || !(phi < 0.0)) continue;

        const double ratio = std::min(1.0, phi / -t.inradius);
        const double I = std::pow(ratio, settings.sigma);
        const double alpha = t.opacity * I;
        const double w = trans * alpha;

        // Barycentric weights from sub-triangle areas.
        Vec3 lambda;
        for (int k = 0; k < 3; ++k) {
          const Vec2 a = t.q[(k + 1) % 3] - p, b = t.q[(k + 2) % 3] - p;
          lambda[k] = 0.5 * (a.x() * b.y() - a.y() * b.x()) / t.area;
        }
        color += w * (lambda[0] * t.color[0] + lambda[1] * t.color[1] +
                      lambda[2] * t.color[2]);
        if (w > best) {
          best = w;
          out.winner_id[pix] = static_cast<std::int32_t>(t.id);
        }
        out.per_triangle_max_weight[t.id] =
            std::max(out.per_triangle_max_weight[t.id], trans * t.opacity);
        trans *= 1.0 - alpha;
        const double cutoff = trisplat::kTransmittanceCutoff;
        if (trans > 0.5 * cutoff && trans < 2.0 * cutoff) kink = 0.0;
        if (trans < cutoff) stopped = true;
      }
      color += trans * settings.background;
      for (int c = 0; c < 3; ++c) out.color.at(x, y, c) = color[c];
      out.transmittance.at(x, y) = trans;
    }
  }
  return out;
}

}  // namespace tstest
