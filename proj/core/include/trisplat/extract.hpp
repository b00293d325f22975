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

#include <cstdint>
#include <span>
#include <vector>

#include "trisplat/camera.hpp"
#include "trisplat/io.hpp"
#include "trisplat/scene.hpp"

namespace trisplat {

struct ExtractOptions {
  int min_views = 1;  // a triangle must win masked pixels in this many views
  int threads = 1;
};

// Union over views of the winning triangle at every mask-true pixel,
// rendered at sigma 1e-4 with opacity forced to one. Sorted ascending.
std::vector<std::uint32_t> collect_triangles(const Scene& scene,
                                             std::span<const Camera> cameras,
                                             std::span<const Mask> masks,
                                             const ExtractOptions& options = {});

enum class SplitMode { kExtract, kRemove };

// kExtract keeps the listed triangles, kRemove the rest. The result is
// compacted and contains only referenced vertices.
Scene split_scene(const Scene& scene, std::span<const std::uint32_t> ids, SplitMode mode);

}  // namespace trisplat
