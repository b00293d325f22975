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
#include <filesystem>
#include <string>
#include <vector>

#include "trisplat/io.hpp"
#include "trisplat/scene.hpp"

namespace trisplat {

struct SyntheticOptions {
  std::string preset = "two-objects";
  std::uint64_t seed = 0;
  int width = 0;   // 0: preset default
  int height = 0;
  int views = 0;   // 0: preset default
  int aa_scale = 2;
  double point_jitter = 0.02;  // init point noise, relative to scene radius
  int free_points = -1;        // stray points off the surfaces; -1: preset default
  int threads = 1;
};

struct SyntheticFixture {
  std::string preset;
  SceneDataset dataset;          // images quantized to 8 bits
  Scene ground_truth;            // positions and DC colors are float-exact
  std::vector<int> labels;       // object id per ground-truth triangle
  std::vector<std::string> object_names;
  std::vector<int> mask_views;   // views with masks of object 0
  std::vector<Mask> masks;
};

std::vector<std::string> synthetic_presets();

// Throws UsageError listing the presets for an unknown name.
SyntheticFixture make_synthetic(const SyntheticOptions& options);

// manifest.json, views/*.png, masks/view_*.png, labels.json, ground_truth.ply
void write_synthetic(const SyntheticFixture& fixture, const std::filesystem::path& dir);

struct SyntheticLabels {
  std::vector<std::string> object_names;
  std::vector<int> labels;
  std::vector<int> mask_views;
};
SyntheticLabels read_labels(const std::filesystem::path& path);

}  // namespace trisplat
