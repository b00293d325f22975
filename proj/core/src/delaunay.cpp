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

#include "trisplat/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <unordered_map>

#include "trisplat/error.hpp"
#include "trisplat/predicates.hpp"
#include "trisplat/sh.hpp"

namespace trisplat {

namespace {

using predicates::insphere;
using predicates::orient3d;

struct Tet {
  std::array<int, 4> v;
  std::array<int, 4> nbr;  // nbr[i] shares the face opposite v[i]
  bool alive = true;
};

std::uint64_t spread_bits(std::uint64_t x) {
  x &= 0x1fffff;
  x = (x | x << 32) & 0x1f00000000ffffULL;
  x = (x | x << 16) & 0x1f0000ff0000ffULL;
  x = (x | x << 8) & 0x100f00f00f00f00fULL;
  x = (x | x << 4) & 0x10c30c30c30c30c3ULL;
  x = (x | x << 2) & 0x1249249249249249ULL;
  return x;
}

class BowyerWatson {
 public:
  explicit BowyerWatson(std::vector<Vec3> pts) : pts_(std::move(pts)) {}

  void run(std::span<const std::uint32_t> order) {
    init_super();
    int hint = 0;
    for (std::uint32_t idx : order) hint = insert(static_cast<int>(idx), hint);
  }

  std::vector<std::array<std::uint32_t, 4>> result(std::size_t n_real) const {
    std::vector<std::array<std::uint32_t, 4>> out;
    for (const Tet& t : tets_) {
      if (!t.alive) continue;
      bool real = true;
      for (int v : t.v) real &= static_cast<std::size_t>(v) < n_real;
      if (!real) continue;
      out.push_back({static_cast<std::uint32_t>(t.v[0]), static_cast<std::uint32_t>(t.v[1]),
                     static_cast<std::uint32_t>(t.v[2]), static_cast<std::uint32_t>(t.v[3])});
    }
    return out;
  }

 private:
  const Vec3& P(int i) const { return pts_[i]; }

  int orient(const Tet& t) const {
    return orient3d(P(t.v[0]), P(t.v[1]), P(t.v[2]), P(t.v[3]));
  }

  void init_super() {
    Vec3 lo = pts_[0], hi = pts_[0];
    for (const Vec3& p : pts_) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const Vec3 c = 0.5 * (lo + hi);
    const double r = std::max((hi - lo).norm(), 1e-6);
    const double s = 1e3 * r;
    const int base = static_cast<int>(pts_.size());
    pts_.push_back(c + s * Vec3(1, 1, 1));
    pts_.push_back(c + s * Vec3(1, -1, -1));
    pts_.push_back(c + s * Vec3(-1, 1, -1));
    pts_.push_back(c + s * Vec3(-1, -1, 1));
    Tet t;
    t.v = {base, base + 1, base + 2, base + 3};
    t.nbr = {-1, -1, -1, -1};
    if (orient(t) < 0) std::swap(t.v[0], t.v[1]);
    tets_.push_back(t);
  }

  // Returns a tet containing p (closed), walking from `start`.
  int locate(const Vec3& p, int start) {
    int cur = start;
    if (cur < 0 || cur >= static_cast<int>(tets_.size()) || !tets_[cur].alive) {
      cur = first_alive();
    }
    std::size_t steps = 0;
    while (true) {
      const Tet& t = tets_[cur];
      const int offset = static_cast<int>(walk_rng_() & 3u);
      int next = -1;
      for (int k = 0; k < 4; ++k) {
        const int i = (k + offset) & 3;
        std::array<int, 4> v = t.v;
        v[i] = -1;
        const Vec3& a = v[0] < 0 ? p : P(v[0]);
        const Vec3& b = v[1] < 0 ? p : P(v[1]);
        const Vec3& c = v[2] < 0 ? p : P(v[2]);
        const Vec3& d = v[3] < 0 ? p : P(v[3]);
        if (orient3d(a, b, c, d) < 0) {
          next = t.nbr[i];
          break;
        }
      }
      if (next < 0) return cur;
      cur = next;
      if (++steps > 4 * tets_.size() + 64) {
        // Fall back to exhaustive search; only reachable with broken input.
        for (std::size_t i = 0; i < tets_.size(); ++i) {
          if (tets_[i].alive && contains(tets_[i], p)) return static_cast<int>(i);
        }
        throw DataError("delaunay: point location failed");
      }
    }
  }

  bool contains(const Tet& t, const Vec3& p) const {
    for (int i = 0; i < 4; ++i) {
      std::array<Vec3, 4> q = {P(t.v[0]), P(t.v[1]), P(t.v[2]), P(t.v[3])};
      q[i] = p;
      if (orient3d(q[0], q[1], q[2], q[3]) < 0) return false;
    }
    return true;
  }

  int first_alive() const {
    for (std::size_t i = 0; i < tets_.size(); ++i) {
      if (tets_[i].alive) return static_cast<int>(i);
    }
    throw DataError("delaunay: empty triangulation");
  }

  bool in_sphere(const Tet& t, const Vec3& p) const {
    return insphere(P(t.v[0]), P(t.v[1]), P(t.v[2]), P(t.v[3]), p) > 0;
  }

  int new_tet(const Tet& t) {
    if (!free_.empty()) {
      const int id = free_.back();
      free_.pop_back();
      tets_[id] = t;
      return id;
    }
    tets_.push_back(t);
    return static_cast<int>(tets_.size() - 1);
  }

  int insert(int pi, int hint) {
    const Vec3& p = P(pi);
    const int seed = locate(p, hint);

    // Cavity: tets whose circumsphere strictly contains p.
    cavity_.clear();
    stack_.clear();
    ++stamp_;
    mark_.resize(tets_.size(), 0);
    stack_.push_back(seed);
    mark_[seed] = stamp_;
    while (!stack_.empty()) {
      const int t = stack_.back();
      stack_.pop_back();
      cavity_.push_back(t);
      for (int n : tets_[t].nbr) {
        if (n < 0 || mark_[n] == stamp_) continue;
        if (in_sphere(tets_[n], p)) {
          mark_[n] = stamp_;
          stack_.push_back(n);
        }
      }
    }

    struct Boundary {
      Tet tet;
      int outside;
      int opposite;  // index of p in the new tet
      int outside_face;
    };
    std::vector<Boundary> boundary;
    for (int t : cavity_) {
      const Tet& ct = tets_[t];
      for (int i = 0; i < 4; ++i) {
        const int n = ct.nbr[i];
        if (n >= 0 && mark_[n] == stamp_) continue;
        Boundary b;
        b.tet.v = ct.v;
        b.tet.v[i] = pi;
        b.tet.nbr = {-1, -1, -1, -1};
        b.tet.nbr[i] = n;
        b.outside = n;
        b.opposite = i;
        b.outside_face = -1;
        if (n >= 0) {
          for (int j = 0; j < 4; ++j) {
            if (tets_[n].nbr[j] == t) b.outside_face = j;
          }
        }
        boundary.push_back(b);
      }
    }
    for (int t : cavity_) {
      tets_[t].alive = false;
      free_.push_back(t);
    }

    std::vector<int> ids(boundary.size());
    for (std::size_t k = 0; k < boundary.size(); ++k) {
      ids[k] = new_tet(boundary[k].tet);
      if (boundary[k].outside >= 0) {
        tets_[boundary[k].outside].nbr[boundary[k].outside_face] = ids[k];
      }
    }
    if (mark_.size() < tets_.size()) mark_.resize(tets_.size(), 0);

    // Glue the new tets to each other across faces containing p. Such a
    // face is identified by its two vertices other than p.
    std::unordered_map<std::uint64_t, std::pair<int, int>> open;
    open.reserve(boundary.size() * 3);
    for (std::size_t k = 0; k < boundary.size(); ++k) {
      const int id = ids[k];
      for (int j = 0; j < 4; ++j) {
        if (j == boundary[k].opposite) continue;
        int e[2];
        int c = 0;
        for (int m = 0; m < 4; ++m) {
          if (m == j || m == boundary[k].opposite) continue;
          e[c++] = tets_[id].v[m];
        }
        const std::uint64_t key =
            (static_cast<std::uint64_t>(std::min(e[0], e[1])) << 32) |
            static_cast<std::uint32_t>(std::max(e[0], e[1]));
        auto it = open.find(key);
        if (it == open.end()) {
          open.emplace(key, std::make_pair(id, j));
        } else {
          tets_[id].nbr[j] = it->second.first;
          tets_[it->second.first].nbr[it->second.second] = id;
          open.erase(it);
        }
      }
    }
    return ids.empty() ? seed : ids.front();
  }

  std::vector<Vec3> pts_;
  std::vector<Tet> tets_;
  std::vector<int> free_;
  std::vector<int> cavity_, stack_;
  std::vector<std::uint32_t> mark_;
  std::uint32_t stamp_ = 0;
  std::minstd_rand walk_rng_{12345};
};

bool all_coplanar(std::span<const Vec3> pts) {
  const std::size_t n = pts.size();
  std::size_t j = 1;
  while (j < n && pts[j] == pts[0]) ++j;
  if (j == n) return true;
  std::size_t k = j + 1;
  for (; k < n; ++k) {
    if ((pts[j] - pts[0]).cross(pts[k] - pts[0]).squaredNorm() > 0.0) break;
  }
  if (k >= n) return true;
  for (std::size_t m = 0; m < n; ++m) {
    if (orient3d(pts[0], pts[j], pts[k], pts[m]) != 0) return false;
  }
  return true;
}

}  // namespace

Tetrahedralization delaunay3d(std::span<const Vec3> points,
                              std::uint64_t jitter_seed) {
  if (points.size() < 4) {
    throw DataError("delaunay initialization needs at least 4 points, got " +
                    std::to_string(points.size()));
  }
  for (const Vec3& p : points) {
    if (!p.allFinite()) throw DataError("delaunay initialization: non-finite point");
  }
  if (all_coplanar(points)) {
    throw DataError("delaunay initialization failed: all points are coplanar");
  }

  Vec3 lo = points[0], hi = points[0];
  for (const Vec3& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double diag = (hi - lo).norm();
  std::mt19937_64 rng(jitter_seed);
  auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
  std::vector<Vec3> jittered(points.begin(), points.end());
  const double mag = 1e-9 * diag;
  for (Vec3& p : jittered) p += mag * Vec3(uniform(), uniform(), uniform());

  // Morton order keeps consecutive insertions spatially close.
  const Vec3 extent = (hi - lo).cwiseMax(1e-300);
  std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec3 u = ((jittered[i] - lo).cwiseQuotient(extent)).cwiseMax(0.0).cwiseMin(1.0);
    const auto cell = [](double v) {
      return static_cast<std::uint64_t>(v * 2097151.0);
    };
    keyed[i] = {spread_bits(cell(u.x())) | spread_bits(cell(u.y())) << 1 |
                    spread_bits(cell(u.z())) << 2,
                static_cast<std::uint32_t>(i)};
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::uint32_t> order(points.size());
  for (std::size_t i = 0; i < keyed.size(); ++i) order[i] = keyed[i].second;

  BowyerWatson bw(jittered);
  bw.run(order);
  Tetrahedralization out;
  out.points.assign(points.begin(), points.end());
  out.tets = bw.result(points.size());
  std::sort(out.tets.begin(), out.tets.end());
  if (out.tets.empty()) {
    throw DataError("delaunay initialization failed: no tetrahedra produced");
  }
  return out;
}

std::vector<TriangleIndices> extract_unique_faces(
    std::span<const std::array<std::uint32_t, 4>> tets) {
  std::vector<TriangleIndices> faces;
  faces.reserve(tets.size() * 4);
  for (const auto& t : tets) {
    for (int i = 0; i < 4; ++i) {
      TriangleIndices f;
      int c = 0;
      for (int j = 0; j < 4; ++j) {
        if (j != i) f[c++] = t[j];
      }
      std::sort(f.begin(), f.end());
      faces.push_back(f);
    }
  }
  std::sort(faces.begin(), faces.end());
  faces.erase(std::unique(faces.begin(), faces.end()), faces.end());
  return faces;
}

VertexSet init_attributes(std::span<const Vec3> points,
                          std::span<const Vec3> colors) {
  if (!colors.empty() && colors.size() != points.size()) {
    throw DataError("point colors do not match the point count");
  }
  VertexSet v;
  v.reserve(points.size());
  const double logit = std::log(kInitialOpacity / (1.0 - kInitialOpacity));
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec3 rgb = colors.empty() ? Vec3::Constant(0.5) : colors[i];
    v.add(points[i], sh_from_rgb(rgb), logit);
  }
  return v;
}

std::vector<std::uint32_t> voxel_decimate(std::span<const Vec3> points,
                                          double voxel_size) {
  if (!(voxel_size > 0.0)) throw UsageError("voxel size must be positive");
  std::map<std::array<std::int64_t, 3>, std::uint32_t> cells;
  std::vector<std::uint32_t> kept;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::array<std::int64_t, 3> key = {
        static_cast<std::int64_t>(std::floor(points[i].x() / voxel_size)),
        static_cast<std::int64_t>(std::floor(points[i].y() / voxel_size)),
        static_cast<std::int64_t>(std::floor(points[i].z() / voxel_size))};
    if (cells.emplace(key, static_cast<std::uint32_t>(i)).second) {
      kept.push_back(static_cast<std::uint32_t>(i));
    }
  }
  return kept;
}

Scene build_initial_scene(std::span<const Vec3> points,
                          std::span<const Vec3> colors, std::uint64_t seed) {
  const Tetrahedralization tet = delaunay3d(points, seed);
  Scene scene;
  scene.vertices = init_attributes(points, colors);
  for (const TriangleIndices& f : extract_unique_faces(tet.tets)) {
    scene.triangles.add(f);
  }
  const std::vector<std::uint32_t> degree = vertex_degrees(scene);
  for (std::size_t i = 0; i < degree.size(); ++i) {
    if (degree[i] == 0) scene.vertices.active[i] = 0;
  }
  compact(scene);
  return scene;
}

}  // namespace trisplat
