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

#include "trisplat/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pixel_kernel.hpp"
#include "trisplat/error.hpp"
#include "trisplat/parallel.hpp"
#include "trisplat/sh.hpp"

namespace trisplat {

FrameSetup prepare_frame(const Scene& scene, const Camera& cam,
                         const RenderSettings& settings) {
  FrameSetup setup;
  setup.width = cam.width;
  setup.height = cam.height;
  setup.tiles_x = (cam.width + kTileSize - 1) / kTileSize;
  setup.tiles_y = (cam.height + kTileSize - 1) / kTileSize;
  setup.scene_triangles = scene.triangles.size();
  setup.tile_lists.resize(static_cast<std::size_t>(setup.tiles_x) * setup.tiles_y);

  const VertexSet& verts = scene.vertices;
  const TriangleSet& tris = scene.triangles;
  const Vec3 center = cam.center();

  for (std::size_t m = 0; m < tris.size(); ++m) {
    if (!tris.active[m]) continue;
    const TriangleIndices& idx = tris.indices[m];
    std::array<Vec2, 3> q;
    bool culled = false;
    for (int k = 0; k < 3; ++k) {
      const ProjectedVertex pv =
          project_vertex(verts.positions[idx[k]], cam, settings.near_plane);
      if (pv.behind_camera) {
        culled = true;
        break;
      }
      q[k] = pv.q;
    }
    if (culled) continue;

    const Vec3& a = verts.positions[idx[0]];
    const Vec3& b = verts.positions[idx[1]];
    const Vec3& c = verts.positions[idx[2]];
    const Vec3 inc = incenter3d(a, b, c);
    const double depth = (cam.rotation * inc + cam.translation).z();
    auto proj = make_projected_triangle(q, depth, cam.width, cam.height);
    if (!proj || proj->bbox.empty()) continue;

    TriangleSetup t;
    t.id = static_cast<std::uint32_t>(m);
    t.proj = *proj;
    const Vec3 ray = inc - center;
    const double ray_len = ray.norm();
    t.view_dir = ray_len > 0.0 ? Vec3(ray / ray_len) : Vec3(0.0, 0.0, 1.0);
    t.basis = sh_basis(t.view_dir);
    std::array<double, 3> o;
    for (int k = 0; k < 3; ++k) {
      t.color_raw[k] = sh_color_unclamped(verts.sh[idx[k]], t.basis);
      t.color[k] = t.color_raw[k].cwiseMax(0.0).cwiseMin(1.0);
      o[k] = settings.force_opaque
                 ? 1.0
                 : map_opacity(verts.opacity_logit[idx[k]], settings.opacity_floor);
    }
    const TriangleOpacity to = triangle_opacity(o[0], o[1], o[2]);
    t.opacity = to.value;
    t.opacity_argmin = to.argmin;
    const Vec3 m_vec = (b - a).cross(c - a);
    const double m_len = m_vec.norm();
    t.normal = m_len > 0.0 ? Vec3(m_vec / m_len) : Vec3::Zero();
    if (t.normal.dot(ray) > 0.0) t.normal = -t.normal;
    setup.triangles.push_back(t);
  }

  std::vector<std::uint32_t> order(setup.triangles.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t i, std::uint32_t j) {
    const TriangleSetup& a = setup.triangles[i];
    const TriangleSetup& b = setup.triangles[j];
    if (a.proj.depth != b.proj.depth) return a.proj.depth < b.proj.depth;
    return a.id < b.id;
  });
  for (std::uint32_t local : order) {
    const PixelRect& r = setup.triangles[local].proj.bbox;
    const int tx0 = r.x0 / kTileSize, tx1 = (r.x1 - 1) / kTileSize;
    const int ty0 = r.y0 / kTileSize, ty1 = (r.y1 - 1) / kTileSize;
    for (int ty = ty0; ty <= ty1; ++ty) {
      for (int tx = tx0; tx <= tx1; ++tx) {
        setup.tile_lists[static_cast<std::size_t>(ty) * setup.tiles_x + tx]
            .push_back(local);
      }
    }
  }
  return setup;
}

CompositeResult composite_pixel(std::span<const Contribution> contributions,
                                const Vec3& background) {
  CompositeResult out;
  out.color = Vec3::Zero();
  double T = 1.0;
  for (const Contribution& c : contributions) {
    const double alpha = c.opacity * c.window;
    const double w = T * alpha;
    out.color += w * c.color;
    out.weights.push_back(w);
    T *= (1.0 - alpha);
    if (T < kTransmittanceCutoff) break;
  }
  out.color += T * background;
  out.transmittance = T;
  return out;
}

RenderOutput render_frame(const FrameSetup& setup,
                          const RenderSettings& settings) {
  const int W = setup.width, H = setup.height;
  RenderOutput out;
  out.color = Image(W, H, 3);
  out.transmittance = Image(W, H, 1);
  out.winner_id.assign(static_cast<std::size_t>(W) * H, -1);
  if (settings.with_normals) out.normals = Image(W, H, 3);

  const int threads = resolve_threads(settings.threads);
  const std::size_t n_local = setup.triangles.size();
  std::vector<std::vector<double>> max_weight(
      threads, std::vector<double>(n_local, 0.0));

  parallel_for(setup.tile_lists.size(), threads, [&](std::size_t tile, int worker) {
    const int tx = static_cast<int>(tile % setup.tiles_x);
    const int ty = static_cast<int>(tile / setup.tiles_x);
    const auto& list = setup.tile_lists[tile];
    std::vector<detail::Fragment> frags;
    std::vector<double>& mw = max_weight[worker];
    const int x_end = std::min(W, (tx + 1) * kTileSize);
    const int y_end = std::min(H, (ty + 1) * kTileSize);
    for (int y = ty * kTileSize; y < y_end; ++y) {
      for (int x = tx * kTileSize; x < x_end; ++x) {
        const Vec2 p(x + 0.5, y + 0.5);
        const double T_final =
            detail::gather_fragments(setup, list, p, settings.sigma, frags);
        Vec3 color = Vec3::Zero();
        Vec3 normal = Vec3::Zero();
        double best_w = -1.0;
        std::int32_t winner = -1;
        for (const detail::Fragment& f : frags) {
          const TriangleSetup& tri = setup.triangles[f.local];
          const double w = f.transmittance * f.alpha;
          color += w * f.color;
          if (settings.with_normals) normal += w * tri.normal;
          if (w > best_w) {
            best_w = w;
            winner = static_cast<std::int32_t>(tri.id);
          }
          mw[f.local] = std::max(mw[f.local], f.transmittance * tri.opacity);
        }
        color += T_final * settings.background;
        double* dst = out.color.pixel(x, y);
        dst[0] = color[0];
        dst[1] = color[1];
        dst[2] = color[2];
        out.transmittance.at(x, y) = T_final;
        out.winner_id[static_cast<std::size_t>(y) * W + x] = winner;
        if (settings.with_normals) {
          double* nd = out.normals.pixel(x, y);
          nd[0] = normal[0];
          nd[1] = normal[1];
          nd[2] = normal[2];
        }
      }
    }
  });

  out.per_triangle_max_weight.assign(setup.scene_triangles, 0.0);
  for (std::size_t local = 0; local < n_local; ++local) {
    double best = 0.0;
    for (int w = 0; w < threads; ++w) best = std::max(best, max_weight[w][local]);
    out.per_triangle_max_weight[setup.triangles[local].id] = best;
  }
  return out;
}

RenderOutput render(const Scene& scene, const Camera& cam,
                    const RenderSettings& settings) {
  return render_frame(prepare_frame(scene, cam, settings), settings);
}

RenderOutput render_aa(const Scene& scene, const Camera& cam,
                       const RenderSettings& settings, int aa_scale) {
  if (aa_scale < 1) throw UsageError("aa_scale must be >= 1");
  if (aa_scale == 1) return render(scene, cam, settings);
  const Camera hi_cam = cam.scaled(aa_scale);
  RenderOutput hi = render(scene, hi_cam, settings);
  RenderOutput out;
  out.color = downsample_box(hi.color, aa_scale);
  out.transmittance = downsample_box(hi.transmittance, aa_scale);
  if (settings.with_normals) out.normals = downsample_box(hi.normals, aa_scale);
  out.winner_id.assign(static_cast<std::size_t>(cam.width) * cam.height, -1);
  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) {
      out.winner_id[static_cast<std::size_t>(y) * cam.width + x] =
          hi.winner_id[static_cast<std::size_t>(y * aa_scale) * hi_cam.width +
                       x * aa_scale];
    }
  }
  out.per_triangle_max_weight = std::move(hi.per_triangle_max_weight);
  return out;
}

Image normalize_normals(const Image& accumulated) {
  Image out(accumulated.width, accumulated.height, 3);
  for (std::size_t i = 0; i < accumulated.pixel_count(); ++i) {
    const double* n = accumulated.data.data() + 3 * i;
    const double len = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    if (len <= 1e-6) continue;
    for (int c = 0; c < 3; ++c) out.data[3 * i + c] = n[c] / len;
  }
  return out;
}

Image render_normals(const Scene& scene, const Camera& cam,
                     const RenderSettings& settings, int aa_scale) {
  RenderSettings s = settings;
  s.with_normals = true;
  return normalize_normals(render_aa(scene, cam, s, aa_scale).normals);
}

DepthTestOutput render_depth_test(const Scene& scene, const Camera& cam,
                                  const RenderSettings& settings) {
  const int W = cam.width, H = cam.height;
  DepthTestOutput out;
  out.color = Image(W, H, 3);
  out.winner_id.assign(static_cast<std::size_t>(W) * H, -1);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      double* dst = out.color.pixel(x, y);
      for (int c = 0; c < 3; ++c) dst[c] = settings.background[c];
    }
  }
  std::vector<double> zbuf(static_cast<std::size_t>(W) * H,
                           std::numeric_limits<double>::infinity());

  // Projection and coloring are shared with the compositor; only the
  // visibility resolution differs.
  RenderSettings s = settings;
  const FrameSetup setup = prepare_frame(scene, cam, s);
  for (const TriangleSetup& tri : setup.triangles) {
    const ProjectedTriangle& pt = tri.proj;
    for (int y = pt.bbox.y0; y < pt.bbox.y1; ++y) {
      for (int x = pt.bbox.x0; x < pt.bbox.x1; ++x) {
        const Vec2 p(x + 0.5, y + 0.5);
        const std::size_t pix = static_cast<std::size_t>(y) * W + x;
        if (pt.depth > zbuf[pix]) continue;
        if (pt.depth == zbuf[pix] && out.winner_id[pix] >= 0 &&
            static_cast<std::uint32_t>(out.winner_id[pix]) < tri.id) {
          continue;
        }
        const double I = window(pt, p, settings.sigma);
        if (!(I > 0.0)) continue;
        const Vec3 lambda = barycentric(pt.q, p);
        const Vec3 c = lambda[0] * tri.color[0] + lambda[1] * tri.color[1] +
                       lambda[2] * tri.color[2];
        const double a = tri.opacity * I;
        const Vec3 result = a * c + (1.0 - a) * settings.background;
        zbuf[pix] = pt.depth;
        out.winner_id[pix] = static_cast<std::int32_t>(tri.id);
        double* dst = out.color.pixel(x, y);
        for (int k = 0; k < 3; ++k) dst[k] = result[k];
      }
    }
  }
  return out;
}

void accumulate_max_weights(const RenderOutput& out, std::vector<double>& accum) {
  if (accum.size() < out.per_triangle_max_weight.size()) {
    accum.resize(out.per_triangle_max_weight.size(), 0.0);
  }
  for (std::size_t i = 0; i < out.per_triangle_max_weight.size(); ++i) {
    accum[i] = std::max(accum[i], out.per_triangle_max_weight[i]);
  }
}

}  // namespace trisplat
