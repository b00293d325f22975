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

#include "trisplat/extract.hpp"

#include <algorithm>

#include "trisplat/error.hpp"
#include "trisplat/lifecycle.hpp"
#include "trisplat/parallel.hpp"
#include "trisplat/raster.hpp"

namespace trisplat {

std::vector<std::uint32_t> collect_triangles(const Scene& scene,
                                             std::span<const Camera> cameras,
                                             std::span<const Mask> masks,
                                             const ExtractOptions& options) {
  if (cameras.size() != masks.size()) {
    throw UsageError("got " + std::to_string(masks.size()) + " masks for " +
                     std::to_string(cameras.size()) + " cameras");
  }
  if (options.min_views < 1) throw UsageError("min_views must be >= 1");
  for (std::size_t v = 0; v < cameras.size(); ++v) {
    if (masks[v].width != cameras[v].width || masks[v].height != cameras[v].height) {
      throw DataError("mask " + std::to_string(v) + " is " + std::to_string(masks[v].width) +
                      "x" + std::to_string(masks[v].height) + " but its camera is " +
                      std::to_string(cameras[v].width) + "x" +
                      std::to_string(cameras[v].height));
    }
  }
  RenderSettings settings;
  settings.sigma = Smoothness::kMin;
  settings.force_opaque = true;

  const std::size_t n_tris = scene.triangles.size();
  std::vector<std::vector<std::uint8_t>> hit(cameras.size());
  parallel_for(cameras.size(), options.threads, [&](std::size_t v, int) {
    const RenderOutput out = render(scene, cameras[v], settings);
    hit[v].assign(n_tris, 0);
    for (std::size_t p = 0; p < out.winner_id.size(); ++p) {
      if (masks[v].data[p] && out.winner_id[p] >= 0) hit[v][out.winner_id[p]] = 1;
    }
  });
  std::vector<int> views(n_tris, 0);
  for (const auto& h : hit) {
    for (std::size_t m = 0; m < n_tris; ++m) views[m] += h[m];
  }
  std::vector<std::uint32_t> ids;
  for (std::size_t m = 0; m < n_tris; ++m) {
    if (views[m] >= options.min_views) ids.push_back(static_cast<std::uint32_t>(m));
  }
  return ids;
}

Scene split_scene(const Scene& scene, std::span<const std::uint32_t> ids, SplitMode mode) {
  Scene out = scene;
  std::vector<std::uint8_t> listed(scene.triangles.size(), 0);
  for (std::uint32_t id : ids) {
    if (id >= listed.size()) {
      throw UsageError("triangle id " + std::to_string(id) + " out of range");
    }
    listed[id] = 1;
  }
  for (std::size_t m = 0; m < listed.size(); ++m) {
    const bool keep = mode == SplitMode::kExtract ? listed[m] != 0 : listed[m] == 0;
    if (!keep) out.triangles.active[m] = 0;
  }
  prune_orphan_vertices(out);
  compact(out);
  return out;
}

}  // namespace trisplat
