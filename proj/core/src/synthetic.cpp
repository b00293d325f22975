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

#include "trisplat/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "trisplat/error.hpp"
#include "trisplat/geom2d.hpp"
#include "trisplat/raster.hpp"
#include "trisplat/sh.hpp"

namespace trisplat {

namespace {

namespace fs = std::filesystem;

struct Builder {
  Scene scene;
  std::vector<int> labels;
  std::vector<std::pair<Vec3, double>> keep_out;  // bounding spheres of solids
  std::mt19937_64 rng;

  explicit Builder(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  }

  static double f32(double v) { return static_cast<double>(static_cast<float>(v)); }

  std::uint32_t vertex(const Vec3& p, const Vec3& rgb) {
    ShCoeffs sh = sh_from_rgb(rgb);
    for (double& c : sh) c = f32(c);
    return scene.vertices.add(Vec3(f32(p.x()), f32(p.y()), f32(p.z())), sh, 20.0);
  }

  Vec3 random_color() { return Vec3(uniform(0.1, 0.9), uniform(0.1, 0.9), uniform(0.1, 0.9)); }

  void triangle(std::uint32_t a, std::uint32_t b, std::uint32_t c, int label) {
    scene.triangles.add({a, b, c});
    labels.push_back(label);
  }
};

// Octahedron with every face split into four; midpoints pushed onto the
// circumscribed sphere so all vertices are in convex position.
void add_octahedron(Builder& b, const Vec3& center, double radius, int label) {
  const Vec3 dirs[6] = {Vec3::UnitX(), -Vec3::UnitX(), Vec3::UnitY(),
                        -Vec3::UnitY(), Vec3::UnitZ(), -Vec3::UnitZ()};
  std::uint32_t corner[6];
  for (int i = 0; i < 6; ++i) corner[i] = b.vertex(center + radius * dirs[i], b.random_color());
  b.keep_out.emplace_back(center, radius);
  std::map<std::pair<int, int>, std::uint32_t> mid;
  auto midpoint = [&](int i, int j) {
    const auto key = std::minmax(i, j);
    if (auto it = mid.find(key); it != mid.end()) return it->second;
    const Vec3 d = (dirs[i] + dirs[j]).normalized();
    const std::uint32_t id = b.vertex(center + radius * d, b.random_color());
    mid.emplace(key, id);
    return id;
  };
  const int faces[8][3] = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                           {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
  for (const auto& f : faces) {
    const std::uint32_t ab = midpoint(f[0], f[1]);
    const std::uint32_t bc = midpoint(f[1], f[2]);
    const std::uint32_t ca = midpoint(f[2], f[0]);
    b.triangle(corner[f[0]], ab, ca, label);
    b.triangle(ab, corner[f[1]], bc, label);
    b.triangle(ca, bc, corner[f[2]], label);
    b.triangle(ab, bc, ca, label);
  }
}

// Cube whose faces are low pyramids over their centers (24 triangles).
void add_tetrakis_cube(Builder& b, const Vec3& center, double half, int label) {
  b.keep_out.emplace_back(center, 1.25 * std::sqrt(3.0) * half);
  std::uint32_t corner[8];
  for (int i = 0; i < 8; ++i) {
    const Vec3 s((i & 1) ? 1 : -1, (i & 2) ? 1 : -1, (i & 4) ? 1 : -1);
    corner[i] = b.vertex(center + half * s, b.random_color());
  }
  // Corner loops of each face, counter-clockwise seen from outside.
  const int faces[6][4] = {{1, 3, 7, 5}, {0, 4, 6, 2}, {2, 6, 7, 3},
                           {0, 1, 5, 4}, {4, 5, 7, 6}, {0, 2, 3, 1}};
  const Vec3 normals[6] = {Vec3::UnitX(), -Vec3::UnitX(), Vec3::UnitY(),
                           -Vec3::UnitY(), Vec3::UnitZ(), -Vec3::UnitZ()};
  for (int f = 0; f < 6; ++f) {
    const std::uint32_t apex =
        b.vertex(center + half * 1.25 * normals[f], b.random_color());
    for (int k = 0; k < 4; ++k) {
      b.triangle(corner[faces[f][k]], corner[faces[f][(k + 1) % 4]], apex, label);
    }
  }
}

void add_triangle_cloud(Builder& b, int count, double extent) {
  for (int i = 0; i < count; ++i) {
    const Vec3 c(b.uniform(-extent, extent), b.uniform(-extent, extent), b.uniform(-extent, extent));
    std::uint32_t ids[3];
    for (auto& id : ids) {
      const Vec3 off(b.uniform(-0.3, 0.3), b.uniform(-0.3, 0.3), b.uniform(-0.3, 0.3));
      id = b.vertex(c + off, b.random_color());
    }
    b.triangle(ids[0], ids[1], ids[2], 0);
  }
}

// Checkerboard on a subdivided unit quad in the z = 0 plane.
void add_textured_quad(Builder& b, int cells, double half) {
  std::vector<std::uint32_t> grid((cells + 1) * (cells + 1));
  for (int y = 0; y <= cells; ++y) {
    for (int x = 0; x <= cells; ++x) {
      const bool dark = ((x + y) & 1) != 0;
      const Vec3 rgb = dark ? Vec3(0.15, 0.2, 0.35) : Vec3(0.9, 0.8, 0.3);
      grid[y * (cells + 1) + x] = b.vertex(
          Vec3(-half + 2 * half * x / cells, -half + 2 * half * y / cells, 0.0), rgb);
    }
  }
  for (int y = 0; y < cells; ++y) {
    for (int x = 0; x < cells; ++x) {
      const std::uint32_t a = grid[y * (cells + 1) + x], c = grid[y * (cells + 1) + x + 1];
      const std::uint32_t d = grid[(y + 1) * (cells + 1) + x], e = grid[(y + 1) * (cells + 1) + x + 1];
      b.triangle(a, c, e, 0);
      b.triangle(a, e, d, 0);
    }
  }
}

// Fibonacci lattice on the sphere around `axis`; views look at the origin.
std::vector<Camera> orbit_cameras(int n, double radius, double focal, int w, int h,
                                  const Vec3& axis, bool hemisphere) {
  const Vec3 a = axis.normalized();
  const Vec3 u = (std::abs(a.z()) < 0.9 ? a.cross(Vec3::UnitZ()) : a.cross(Vec3::UnitY())).normalized();
  const Vec3 v = a.cross(u);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Camera> cams;
  for (int i = 0; i < n; ++i) {
    const double t = hemisphere ? 1.0 - (i + 0.5) / n * 0.8 : 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - t * t));
    const Vec3 d = t * a + r * std::cos(golden * i) * u + r * std::sin(golden * i) * v;
    Vec3 up = Vec3::UnitZ();
    if (d.cross(up).norm() < 0.2) up = Vec3::UnitY();
    cams.push_back(Camera::look_at(radius * d, Vec3::Zero(), up, focal, focal, w, h));
  }
  return cams;
}

bool covers(const Scene& s, std::uint32_t tri, const Camera& cam, const Vec2& p) {
  std::array<Vec2, 3> q;
  for (int k = 0; k < 3; ++k) {
    const ProjectedVertex pv = project_vertex(s.vertices.positions[s.triangles.indices[tri][k]], cam);
    if (pv.behind_camera) return false;
    q[k] = pv.q;
  }
  auto cross = [](const Vec2& a, const Vec2& b, const Vec2& c) {
    return (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
  };
  const double d0 = cross(q[0], q[1], p), d1 = cross(q[1], q[2], p), d2 = cross(q[2], q[0], p);
  return (d0 > 0 && d1 > 0 && d2 > 0) || (d0 < 0 && d1 < 0 && d2 < 0);
}

// Pixel-center coverage by the projection of one object's triangles.
std::vector<std::uint8_t> object_coverage(const Scene& s, const std::vector<int>& labels,
                                          int object, const Camera& cam) {
  std::vector<std::uint8_t> cov(static_cast<std::size_t>(cam.width) * cam.height, 0);
  for (std::uint32_t m = 0; m < s.triangles.size(); ++m) {
    if (labels[m] != object) continue;
    for (int y = 0; y < cam.height; ++y) {
      for (int x = 0; x < cam.width; ++x) {
        auto& c = cov[static_cast<std::size_t>(y) * cam.width + x];
        if (!c && covers(s, m, cam, Vec2(x + 0.5, y + 0.5))) c = 1;
      }
    }
  }
  return cov;
}

Image quantize(const Image& img) {
  Image out = img;
  for (double& v : out.data) v = std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0;
  return out;
}

std::string view_name(int i) {
  std::ostringstream s;
  s << "views/" << std::setw(3) << std::setfill('0') << i << ".png";
  return s.str();
}

std::string mask_name(int i) {
  std::ostringstream s;
  s << "masks/view_" << std::setw(3) << std::setfill('0') << i << ".png";
  return s.str();
}

}  // namespace

std::vector<std::string> synthetic_presets() {
  return {"two-objects", "colored-triangle-cloud", "textured-quad"};
}

SyntheticFixture make_synthetic(const SyntheticOptions& opt) {
  SyntheticFixture fx;
  fx.preset = opt.preset;
  Builder b(opt.seed);
  int views = 20, width = 128, height = 128;
  double radius = 4.0, focal = 110.0;
  Vec3 axis = Vec3::UnitZ();
  bool hemisphere = false;
  int test_every = 5;
  int default_free = 0;
  Vec3 background = Vec3::Zero();
  if (opt.preset == "two-objects") {
    add_octahedron(b, Vec3(-0.9, 0.0, 0.0), 0.6, 0);
    add_tetrakis_cube(b, Vec3(0.9, 0.0, 0.0), 0.4, 1);
    fx.object_names = {"octahedron", "cube"};
    axis = Vec3::UnitX();
    background = Vec3::Constant(0.85);
    default_free = 48;
  } else if (opt.preset == "colored-triangle-cloud") {
    add_triangle_cloud(b, 24, 0.7);
    fx.object_names = {"cloud"};
    views = 10;
    width = height = 64;
    focal = 70.0;
  } else if (opt.preset == "textured-quad") {
    add_textured_quad(b, 6, 0.8);
    fx.object_names = {"quad"};
    views = 12;
    width = height = 96;
    focal = 90.0;
    radius = 3.0;
    hemisphere = true;
  } else {
    std::string list;
    for (const std::string& p : synthetic_presets()) list += (list.empty() ? "" : ", ") + p;
    throw UsageError("unknown preset '" + opt.preset + "' (available: " + list + ")");
  }
  if (opt.views > 0) views = opt.views;
  if (opt.width > 0) {
    focal *= static_cast<double>(opt.width) / width;
    width = opt.width;
  }
  if (opt.height > 0) height = opt.height;
  fx.ground_truth = b.scene;
  fx.labels = b.labels;

  SceneDataset& ds = fx.dataset;
  ds.background = background;
  ds.cameras = orbit_cameras(views, radius, focal, width, height, axis, hemisphere);
  RenderSettings rs;
  rs.sigma = Smoothness::kMin;
  rs.force_opaque = true;
  rs.background = ds.background;
  rs.threads = opt.threads;
  for (int i = 0; i < views; ++i) {
    ds.image_paths.push_back(view_name(i));
    ds.normal_paths.emplace_back();
    ds.images.push_back(quantize(render_aa(fx.ground_truth, ds.cameras[i], rs, opt.aa_scale).color));
    if (i % test_every == test_every - 1) ds.test_views.push_back(i);
  }

  // Sparse points: jittered ground-truth vertices with their colors.
  double extent = 0.0;
  for (const Vec3& p : fx.ground_truth.vertices.positions) extent = std::max(extent, p.norm());
  std::normal_distribution<double> noise(0.0, opt.point_jitter * extent);
  for (std::size_t i = 0; i < fx.ground_truth.vertices.size(); ++i) {
    const Vec3& p = fx.ground_truth.vertices.positions[i];
    ds.points.push_back(p + Vec3(noise(b.rng), noise(b.rng), noise(b.rng)));
    ds.point_colors.push_back(sh_dc_color(fx.ground_truth.vertices.sh[i]));
  }
  // Stray reconstruction points in free space, outside every solid.
  const int free_points = opt.free_points >= 0 ? opt.free_points : default_free;
  Vec3 lo = fx.ground_truth.vertices.positions[0], hi = lo;
  for (const Vec3& p : fx.ground_truth.vertices.positions) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec3 mid = 0.5 * (lo + hi), half_size = 0.65 * (hi - lo);
  for (int k = 0, tries = 0; k < free_points && tries < 100000; ++tries) {
    const Vec3 p = mid + Vec3(b.uniform(-1, 1) * half_size.x(), b.uniform(-1, 1) * half_size.y(),
                              b.uniform(-1, 1) * half_size.z());
    bool inside = false;
    for (const auto& [c, r] : b.keep_out) inside |= (p - c).norm() < 1.05 * r;
    if (inside) continue;
    ds.points.push_back(p);
    ds.point_colors.push_back(b.random_color());
    ++k;
  }

  if (opt.preset == "two-objects") {
    // Views where object 0 is never hidden by object 1, picked greedily by
    // how many new object-0 triangles win a masked pixel.
    std::vector<std::vector<std::uint8_t>> cover(views), seen(views);
    const std::size_t n_tris = fx.ground_truth.triangles.size();
    for (int v = 0; v < views; ++v) {
      cover[v] = object_coverage(fx.ground_truth, fx.labels, 0, ds.cameras[v]);
      const RenderOutput out = render(fx.ground_truth, ds.cameras[v], rs);
      seen[v].assign(n_tris, 0);
      bool clean = true;
      for (std::size_t p = 0; p < cover[v].size() && clean; ++p) {
        if (!cover[v][p]) continue;
        const int w = out.winner_id[p];
        if (w < 0 || fx.labels[w] != 0) clean = false;
        else seen[v][w] = 1;
      }
      if (!clean) seen[v].clear();
    }
    std::vector<std::uint8_t> got(n_tris, 0);
    while (fx.mask_views.size() < 5) {
      int best = -1, best_gain = -1;
      for (int v = 0; v < views; ++v) {
        if (seen[v].empty() ||
            std::find(fx.mask_views.begin(), fx.mask_views.end(), v) != fx.mask_views.end()) {
          continue;
        }
        int gain = 0;
        for (std::size_t m = 0; m < n_tris; ++m) gain += seen[v][m] && !got[m];
        if (gain > best_gain) best = v, best_gain = gain;
      }
      if (best < 0) break;
      fx.mask_views.push_back(best);
      for (std::size_t m = 0; m < n_tris; ++m) got[m] |= seen[best][m];
    }
    std::sort(fx.mask_views.begin(), fx.mask_views.end());
    for (int v : fx.mask_views) fx.masks.push_back(Mask{width, height, cover[v]});
  }
  return fx;
}

void write_synthetic(const SyntheticFixture& fx, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / "views", ec);
  if (!fx.masks.empty()) fs::create_directories(dir / "masks", ec);
  if (ec) throw DataError("cannot create " + dir.string() + ": " + ec.message());
  for (std::size_t i = 0; i < fx.dataset.images.size(); ++i) {
    write_image(fx.dataset.images[i], dir / fx.dataset.image_paths[i]);
  }
  for (std::size_t k = 0; k < fx.masks.size(); ++k) {
    write_mask(fx.masks[k], dir / mask_name(fx.mask_views[k]));
  }
  write_manifest(fx.dataset, dir / "manifest.json");
  export_ply(fx.ground_truth, dir / "ground_truth.ply", PlyColorMode::kShDc);

  nlohmann::json j;
  j["preset"] = fx.preset;
  j["objects"] = fx.object_names;
  j["triangle_object"] = fx.labels;
  j["mask_views"] = fx.mask_views;
  std::vector<std::string> masks;
  for (int v : fx.mask_views) masks.push_back(mask_name(v));
  j["masks"] = masks;
  std::ofstream out(dir / "labels.json");
  if (!out) throw DataError("cannot write " + (dir / "labels.json").string());
  out << j.dump(1) << "\n";
}

SyntheticLabels read_labels(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    nlohmann::json j;
    in >> j;
    SyntheticLabels l;
    l.object_names = j.at("objects").get<std::vector<std::string>>();
    l.labels = j.at("triangle_object").get<std::vector<int>>();
    l.mask_views = j.at("mask_views").get<std::vector<int>>();
    return l;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace trisplat
