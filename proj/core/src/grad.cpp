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

#include "trisplat/grad.hpp"

#include <cmath>

#include "pixel_kernel.hpp"
#include "trisplat/error.hpp"
#include "trisplat/geom2d.hpp"
#include "trisplat/parallel.hpp"
#include "trisplat/sh.hpp"

namespace trisplat {

void GradientBuffer::resize(std::size_t n) {
  d_positions.assign(n, Vec3::Zero());
  d_sh.assign(n, ShCoeffs{});
  d_opacity_logit.assign(n, 0.0);
  d_sigma = 0.0;
}

void GradientBuffer::zero() { resize(d_positions.size()); }

bool GradientBuffer::all_finite() const {
  if (!std::isfinite(d_sigma)) return false;
  for (const Vec3& g : d_positions) {
    if (!g.allFinite()) return false;
  }
  for (const ShCoeffs& g : d_sh) {
    for (double v : g) {
      if (!std::isfinite(v)) return false;
    }
  }
  for (double v : d_opacity_logit) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

namespace {

// Image-space gradient of one triangle in one view.
struct ScreenGrad {
  std::array<Vec2, 3> d_q = {Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
  double d_phi_s = 0.0;
  double d_opacity = 0.0;
  std::array<Vec3, 3> d_color = {Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  Vec3 d_normal = Vec3::Zero();

  void add(const ScreenGrad& o) {
    for (int k = 0; k < 3; ++k) {
      d_q[k] += o.d_q[k];
      d_color[k] += o.d_color[k];
    }
    d_phi_s += o.d_phi_s;
    d_opacity += o.d_opacity;
    d_normal += o.d_normal;
  }
};

struct WorkerGrad {
  std::vector<ScreenGrad> tris;
  double d_sigma = 0.0;
};

}  // namespace

void backward(const Scene& scene, const Camera& cam,
              const RenderSettings& settings, const FrameSetup& setup,
              const Image& d_color, const Image* d_normals,
              GradientBuffer& grads) {
  const int W = setup.width, H = setup.height;
  if (d_color.width != W || d_color.height != H || d_color.channels != 3) {
    throw UsageError("color gradient does not match the frame");
  }
  if (d_normals && (d_normals->width != W || d_normals->height != H ||
                    d_normals->channels != 3)) {
    throw UsageError("normal gradient does not match the frame");
  }
  if (grads.d_positions.size() != scene.vertices.size()) {
    throw UsageError("gradient buffer is not sized to the vertex set");
  }

  const int threads = resolve_threads(settings.threads);
  const std::size_t n_local = setup.triangles.size();
  std::vector<WorkerGrad> workers(threads);
  for (auto& w : workers) w.tris.resize(n_local);
  const double sigma = settings.sigma;

  parallel_for(setup.tile_lists.size(), threads, [&](std::size_t tile, int worker) {
    const int tx = static_cast<int>(tile % setup.tiles_x);
    const int ty = static_cast<int>(tile / setup.tiles_x);
    const auto& list = setup.tile_lists[tile];
    if (list.empty()) return;
    WorkerGrad& wg = workers[worker];
    std::vector<detail::Fragment> frags;
    const int x_end = std::min(W, (tx + 1) * kTileSize);
    const int y_end = std::min(H, (ty + 1) * kTileSize);
    for (int y = ty * kTileSize; y < y_end; ++y) {
      for (int x = tx * kTileSize; x < x_end; ++x) {
        const double* gc = d_color.pixel(x, y);
        const Vec3 g_color(gc[0], gc[1], gc[2]);
        Vec3 g_normal = Vec3::Zero();
        if (d_normals) {
          const double* gn = d_normals->pixel(x, y);
          g_normal = Vec3(gn[0], gn[1], gn[2]);
        }
        if (g_color.isZero(0.0) && g_normal.isZero(0.0)) continue;

        const Vec2 p(x + 0.5, y + 0.5);
        const double T_final =
            detail::gather_fragments(setup, list, p, sigma, frags);
        if (frags.empty()) continue;

        // Reverse sweep. behind / behind_n hold what is seen directly
        // behind the current fragment: B_{n} = a_{n+1} c_{n+1} + (1 - a_{n+1}) B_{n+1},
        // starting from the background.
        (void)T_final;
        Vec3 behind = settings.background;
        Vec3 behind_n = Vec3::Zero();
        for (std::size_t i = frags.size(); i-- > 0;) {
          const detail::Fragment& f = frags[i];
          const TriangleSetup& tri = setup.triangles[f.local];
          ScreenGrad& sg = wg.tris[f.local];
          const double T = f.transmittance;

          // Color interpolation.
          const Vec3 d_frag_color = (T * f.alpha) * g_color;
          for (int k = 0; k < 3; ++k) sg.d_color[k] += f.lambda[k] * d_frag_color;
          Vec3 d_lambda;
          for (int k = 0; k < 3; ++k) d_lambda[k] = tri.color[k].dot(d_frag_color);

          double d_alpha = T * g_color.dot(f.color - behind);
          if (d_normals) {
            sg.d_normal += (T * f.alpha) * g_normal;
            d_alpha += T * g_normal.dot(tri.normal - behind_n);
            behind_n = f.alpha * tri.normal + (1.0 - f.alpha) * behind_n;
          }
          behind = f.alpha * f.color + (1.0 - f.alpha) * behind;

          // alpha = o * I
          sg.d_opacity += f.window * d_alpha;
          const double d_window = tri.opacity * d_alpha;
          // I = ratio^sigma
          if (f.window > 0.0) {
            wg.d_sigma += d_window * f.window * std::log(f.ratio);
            if (!f.ratio_clamped) {
              const double d_ratio = d_window * sigma * f.window / f.ratio;
              const ProjectedTriangle& pt = tri.proj;
              // ratio = phi(p) / phi(s)
              const double d_phi = d_ratio / pt.incenter_sdf;
              sg.d_phi_s -= d_ratio * f.ratio / pt.incenter_sdf;
              Vec2 d_from, d_to;
              edge_distance_gradient(pt, f.edge, p, d_from, d_to);
              sg.d_q[f.edge] += d_phi * d_from;
              sg.d_q[(f.edge + 1) % 3] += d_phi * d_to;
            }
          }

          if (!d_lambda.isZero(0.0)) {
            const auto d_lq = barycentric_gradient(tri.proj, p);
            for (int k = 0; k < 3; ++k) {
              for (int j = 0; j < 3; ++j) sg.d_q[j] += d_lambda[k] * d_lq[k][j];
            }
          }
        }
      }
    }
  });

  // Deterministic merge in worker order.
  std::vector<ScreenGrad> merged(n_local);
  double d_sigma = 0.0;
  for (const WorkerGrad& w : workers) {
    for (std::size_t i = 0; i < n_local; ++i) merged[i].add(w.tris[i]);
    d_sigma += w.d_sigma;
  }
  grads.d_sigma += d_sigma;

  const VertexSet& verts = scene.vertices;
  const Vec3 center = cam.center();
  for (std::size_t local = 0; local < n_local; ++local) {
    const TriangleSetup& tri = setup.triangles[local];
    ScreenGrad sg = merged[local];
    const TriangleIndices& idx = scene.triangles.indices[tri.id];

    const auto d_phi_s_dq = incenter_sdf_gradient(tri.proj);
    for (int k = 0; k < 3; ++k) sg.d_q[k] += sg.d_phi_s * d_phi_s_dq[k];

    const Vec3& a = verts.positions[idx[0]];
    const Vec3& b = verts.positions[idx[1]];
    const Vec3& c = verts.positions[idx[2]];

    for (int k = 0; k < 3; ++k) {
      const Vec3& v = verts.positions[idx[k]];
      grads.d_positions[idx[k]] += projection_jacobian(v, cam).transpose() * sg.d_q[k];
    }

    // Colors: SH coefficients directly, positions through the view direction.
    const auto d_basis = sh_basis_gradient(tri.view_dir);
    Vec3 d_dir = Vec3::Zero();
    for (int k = 0; k < 3; ++k) {
      Vec3 dc = sg.d_color[k];
      for (int ch = 0; ch < 3; ++ch) {
        const double raw = tri.color_raw[k][ch];
        if (raw < 0.0 || raw > 1.0) dc[ch] = 0.0;
      }
      if (dc.isZero(0.0)) continue;
      const ShCoeffs& coeffs = verts.sh[idx[k]];
      ShCoeffs& g = grads.d_sh[idx[k]];
      for (int bi = 0; bi < kShBasisSize; ++bi) {
        const double proj = coeffs[bi * 3] * dc[0] + coeffs[bi * 3 + 1] * dc[1] +
                            coeffs[bi * 3 + 2] * dc[2];
        g[bi * 3 + 0] += tri.basis[bi] * dc[0];
        g[bi * 3 + 1] += tri.basis[bi] * dc[1];
        g[bi * 3 + 2] += tri.basis[bi] * dc[2];
        if (bi > 0) d_dir += proj * d_basis[bi];
      }
    }
    const Vec3 inc = incenter3d(a, b, c);
    const Vec3 ray = inc - center;
    const double ray_len = ray.norm();
    if (!d_dir.isZero(0.0) && ray_len > 0.0) {
      const Vec3 d_ray = (d_dir - tri.view_dir * tri.view_dir.dot(d_dir)) / ray_len;
      const auto d_abc = incenter3d_vjp(a, b, c, d_ray);
      for (int k = 0; k < 3; ++k) grads.d_positions[idx[k]] += d_abc[k];
    }

    // Geometric normal n = +-(b - a) x (c - a) / |...|.
    if (!sg.d_normal.isZero(0.0)) {
      const Vec3 e1 = b - a, e2 = c - a;
      const Vec3 m = e1.cross(e2);
      const double len = m.norm();
      if (len > 0.0) {
        const Vec3 m_hat = m / len;
        const double flip = tri.normal.dot(m_hat) < 0.0 ? -1.0 : 1.0;
        const Vec3 g_hat = flip * sg.d_normal;
        const Vec3 d_m = (g_hat - m_hat * m_hat.dot(g_hat)) / len;
        const Vec3 d_e1 = e2.cross(d_m);
        const Vec3 d_e2 = d_m.cross(e1);
        grads.d_positions[idx[0]] -= d_e1 + d_e2;
        grads.d_positions[idx[1]] += d_e1;
        grads.d_positions[idx[2]] += d_e2;
      }
    }

    // Min-opacity routes to the first minimizer only.
    if (!settings.force_opaque && sg.d_opacity != 0.0) {
      const std::uint32_t v = idx[tri.opacity_argmin];
      grads.d_opacity_logit[v] +=
          sg.d_opacity * map_opacity_derivative(verts.opacity_logit[v],
                                                settings.opacity_floor);
    }
  }
}

}  // namespace trisplat
