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

#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "reference_renderer.hpp"
#include "trisplat/geom2d.hpp"
#include "trisplat/grad.hpp"
#include "trisplat/sh.hpp"

namespace tstest {

using trisplat::Vec2;
using trisplat::Vec3;

trisplat::Camera axis_camera(int size, double focal) {
  trisplat::Camera cam;
  cam.fx = cam.fy = focal > 0.0 ? focal : size;
  cam.cx = cam.cy = size / 2.0;
  cam.width = cam.height = size;
  return cam;
}

namespace {

double projected_area(const std::array<Vec3, 3>& p, const trisplat::Camera& cam) {
  std::array<Vec2, 3> q;
  for (int k = 0; k < 3; ++k) q[k] = trisplat::project_vertex(p[k], cam).q;
  const Vec2 a = q[1] - q[0], b = q[2] - q[0];
  return 0.5 * std::abs(a.x() * b.y() - a.y() * b.x());
}

bool well_separated(const trisplat::Scene& s, const trisplat::Camera& cam,
                    const RandomSceneOptions& opts) {
  std::vector<double> depths;
  for (std::size_t m = 0; m < s.triangles.size(); ++m) {
    const auto& t = s.triangles.indices[m];
    const Vec3 inc = trisplat::incenter3d(s.vertices.positions[t[0]],
                                          s.vertices.positions[t[1]],
                                          s.vertices.positions[t[2]]);
    depths.push_back((cam.rotation * inc + cam.translation).z());
    std::array<double, 3> o;
    for (int k = 0; k < 3; ++k) o[k] = s.vertices.opacity_logit[t[k]];
    std::sort(o.begin(), o.end());
    if (o[1] - o[0] < opts.min_logit_gap) return false;
  }
  std::sort(depths.begin(), depths.end());
  for (std::size_t i = 1; i < depths.size(); ++i) {
    if (depths[i] - depths[i - 1] < opts.min_depth_gap) return false;
  }
  return true;
}

}  // namespace

trisplat::Scene random_scene(std::mt19937_64& rng, const RandomSceneOptions& opts) {
  const trisplat::Camera cam = axis_camera(opts.image_size);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  for (int attempt = 0; attempt < 1000; ++attempt) {
    trisplat::Scene s;
    const int pool = opts.shared ? std::max(3, opts.triangles + 2) : 3 * opts.triangles;
    for (int i = 0; i < pool; ++i) {
      const double z = 2.0 + 3.0 * u01(rng);
      const Vec3 p((u01(rng) - 0.5) * z * 0.9, (u01(rng) - 0.5) * z * 0.9, z);
      trisplat::ShCoeffs sh = trisplat::sh_from_rgb(
          Vec3(0.25 + 0.5 * u01(rng), 0.25 + 0.5 * u01(rng), 0.25 + 0.5 * u01(rng)));
      for (int b = 1; b < trisplat::kShBasisSize; ++b) {
        for (int c = 0; c < 3; ++c) sh[b * 3 + c] = opts.sh_rest_scale * gauss(rng);
      }
      const double logit = u01(rng) < opts.saturated_fraction ? 5.0 + 2.0 * u01(rng)
                                                               : -2.0 + 4.0 * u01(rng);
      s.vertices.add(p, sh, logit);
    }
    std::uniform_int_distribution<int> pick(0, pool - 1);
    for (int t = 0; t < opts.triangles; ++t) {
      for (int tries = 0; tries < 200; ++tries) {
        trisplat::TriangleIndices idx;
        if (opts.shared) {
          idx = {static_cast<std::uint32_t>(pick(rng)), static_cast<std::uint32_t>(pick(rng)),
                 static_cast<std::uint32_t>(pick(rng))};
          if (idx[0] == idx[1] || idx[1] == idx[2] || idx[0] == idx[2]) continue;
        } else {
          idx = {static_cast<std::uint32_t>(3 * t), static_cast<std::uint32_t>(3 * t + 1),
                 static_cast<std::uint32_t>(3 * t + 2)};
        }
        const std::array<Vec3, 3> p = {s.vertices.positions[idx[0]],
                                       s.vertices.positions[idx[1]],
                                       s.vertices.positions[idx[2]]};
        if (projected_area(p, cam) < opts.min_area_px) {
          if (!opts.shared) break;
          continue;
        }
        s.triangles.add(idx);
        break;
      }
    }
    if (static_cast<int>(s.triangles.size()) == opts.triangles && well_separated(s, cam, opts)) {
      return s;
    }
  }
  throw std::runtime_error("random_scene: could not satisfy constraints");
}

std::array<Vec2, 3> random_triangle2d(std::mt19937_64& rng, double extent, double min_area) {
  std::uniform_real_distribution<double> u(0.0, extent);
  for (;;) {
    std::array<Vec2, 3> q = {Vec2(u(rng), u(rng)), Vec2(u(rng), u(rng)), Vec2(u(rng), u(rng))};
    const Vec2 a = q[1] - q[0], b = q[2] - q[0];
    if (0.5 * std::abs(a.x() * b.y() - a.y() * b.x()) >= min_area) return q;
  }
}

int FdSummary::probes() const {
  int n = 0;
  for (const auto& [k, v] : classes) n += v[0];
  return n;
}

int FdSummary::failed() const {
  int n = 0;
  for (const auto& [k, v] : classes) n += v[1];
  return n;
}

void FdSummary::merge(const FdSummary& other) {
  for (const auto& [k, v] : other.classes) {
    classes[k][0] += v[0];
    classes[k][1] += v[1];
  }
  for (const auto& f : other.failures) {
    if (failures.size() < 20) failures.push_back(f);
  }
  excluded_pixels += other.excluded_pixels;
  worst_rel = std::max(worst_rel, other.worst_rel);
}

FdSummary gradient_check(const trisplat::Scene& base, const trisplat::Camera& cam,
                         const trisplat::RenderSettings& settings, std::mt19937_64& rng,
                         const FdOptions& opts) {
  FdSummary summary;
  const ReferenceOutput ref = reference_render(base, cam, settings);
  std::uniform_real_distribution<double> uw(-1.0, 1.0);
  trisplat::Image weights(cam.width, cam.height, 3);
  for (std::size_t i = 0; i < weights.pixel_count(); ++i) {
    const bool excluded = ref.kink_distance[i] < opts.kink_exclusion_px;
    if (excluded) ++summary.excluded_pixels;
    for (int c = 0; c < 3; ++c) weights.data[3 * i + c] = excluded ? 0.0 : uw(rng);
  }

  auto loss = [&](const trisplat::Scene& s, const trisplat::RenderSettings& rs) {
    const trisplat::RenderOutput out = trisplat::render(s, cam, rs);
    double acc = 0.0;
    for (std::size_t i = 0; i < out.color.data.size(); ++i) {
      acc += weights.data[i] * out.color.data[i];
    }
    return acc;
  };

  const trisplat::FrameSetup setup = trisplat::prepare_frame(base, cam, settings);
  trisplat::GradientBuffer grads;
  grads.resize(base.vertices.size());
  trisplat::backward(base, cam, settings, setup, weights, nullptr, grads);

  auto check = [&](const std::string& cls, const std::string& what, double analytic,
                   double numeric) {
    auto& c = summary.classes[cls];
    ++c[0];
    const double diff = std::abs(analytic - numeric);
    const double scale = std::max(std::abs(analytic), std::abs(numeric));
    const double rel = scale > 0.0 ? diff / scale : 0.0;
    if (diff > opts.abs_tol) summary.worst_rel = std::max(summary.worst_rel, rel);
    if (diff <= opts.abs_tol || rel <= opts.rel_tol) return;
    ++c[1];
    if (summary.failures.size() < 20) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%s %s: analytic %.9g numeric %.9g", cls.c_str(),
                    what.c_str(), analytic, numeric);
      summary.failures.emplace_back(buf);
    }
  };

  auto central = [&](const std::function<void(trisplat::Scene&, double)>& perturb,
                     double eps) {
    trisplat::Scene plus = base, minus = base;
    perturb(plus, eps);
    perturb(minus, -eps);
    return (loss(plus, settings) - loss(minus, settings)) / (2.0 * eps);
  };

  for (std::size_t v = 0; v < base.vertices.size(); ++v) {
    const std::string tag = "v" + std::to_string(v);
    for (int a = 0; a < 3; ++a) {
      const double fd = central(
          [&](trisplat::Scene& s, double e) { s.vertices.positions[v][a] += e; },
          opts.eps_position);
      check("position", tag + "[" + std::to_string(a) + "]", grads.d_positions[v][a], fd);
    }
    for (int j = 0; j < trisplat::kShCoeffCount; ++j) {
      const int band_index = j / 3;
      std::string cls;
      if (band_index == 0) cls = "sh_dc";
      else if (band_index >= 9) cls = "sh_band3";
      else cls = "sh_band12";
      const double fd = central([&](trisplat::Scene& s, double e) { s.vertices.sh[v][j] += e; },
                                opts.eps_sh);
      check(cls, tag + " sh" + std::to_string(j), grads.d_sh[v][j], fd);
    }
    if (!settings.force_opaque) {
      const double o = trisplat::map_opacity(base.vertices.opacity_logit[v], settings.opacity_floor);
      const double fd = central(
          [&](trisplat::Scene& s, double e) { s.vertices.opacity_logit[v] += e; },
          opts.eps_logit);
      check(o > 0.99 ? "logit_saturated" : "logit", tag + " logit", grads.d_opacity_logit[v], fd);
    }
  }

  const double es = opts.eps_sigma_rel * settings.sigma;
  trisplat::RenderSettings sp = settings, sm = settings;
  sp.sigma += es;
  sm.sigma -= es;
  check("sigma", "sigma", grads.d_sigma, (loss(base, sp) - loss(base, sm)) / (2.0 * es));
  return summary;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("trisplat_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace tstest
