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

#include "trisplat/camera.hpp"
#include "trisplat/image.hpp"
#include "trisplat/optimizer.hpp"
#include "trisplat/scene.hpp"

namespace trisplat {

// Cameras, images and the sparse point cloud of one capture.
struct SceneDataset {
  std::vector<Camera> cameras;
  std::vector<std::string> image_paths;
  std::vector<Image> images;               // H x W x 3 in [0, 1]
  std::vector<std::string> normal_paths;   // empty entries: no prior
  std::vector<Vec3> points;
  std::vector<Vec3> point_colors;          // empty or one per point
  std::vector<int> test_views;             // held-out camera indices
  Vec3 background = Vec3::Zero();

  std::size_t size() const { return cameras.size(); }
  std::vector<int> train_views() const;
  // Throws DataError on count or dimension mismatches.
  void validate() const;
};

// Every 8th image (index 0, 8, ...) is held out.
std::vector<int> every_nth_split(std::size_t count, int n = 8);

// COLMAP text export: cameras.txt, images.txt, points3D.txt. When
// load_images is set, image files are resolved relative to dir/images.
SceneDataset parse_colmap_text(const std::filesystem::path& dir,
                               bool load_images = true);

// JSON scene manifest; relative paths resolve against its directory.
SceneDataset read_manifest(const std::filesystem::path& path, bool load_images = true);
void write_manifest(const SceneDataset& data, const std::filesystem::path& path);

// Directory with manifest.json, or a COLMAP directory (optionally under
// sparse/0), or a manifest file itself.
SceneDataset load_dataset(const std::filesystem::path& path, bool load_images = true);

// 8-bit PNG (gray, gray+alpha, RGB, RGBA) or binary PPM/PGM. Bytes map
// linearly to [0, 1]; alpha is dropped.
Image read_image(const std::filesystem::path& path);
// Single-channel mask: true where the first channel byte exceeds 127.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;
};
Mask read_mask(const std::filesystem::path& path);
void write_mask(const Mask& mask, const std::filesystem::path& path);
// PNG or PPM chosen by extension; values clamped and rounded to 8 bits.
void write_image(const Image& img, const std::filesystem::path& path);

enum class PlyColorMode { kVertexColor, kShDc };

// Binary little-endian PLY with the DC-band color of each vertex clamped to
// [0, 1] and quantized. kShDc additionally stores the raw DC coefficients
// as float properties f_dc_0..2.
void export_ply(const Scene& scene, const std::filesystem::path& path,
                PlyColorMode mode = PlyColorMode::kVertexColor);

struct PlyMesh {
  std::vector<Vec3> positions;
  std::vector<Vec3> colors;  // [0, 1]
  std::vector<Vec3> sh_dc;   // present when the file carries f_dc_*
  std::vector<TriangleIndices> faces;
};
PlyMesh import_ply(const std::filesystem::path& path);
// Scene with DC colors from the mesh and opacity logit 0.
Scene scene_from_ply(const PlyMesh& mesh);

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::int64_t iteration = 0;
  double sigma = 1.0;
  double floor = 0.0;
  double loss_sum = 0.0;  // training loss accumulated since the last log row
  std::uint64_t loss_count = 0;
  Scene scene;
  AdamState adam;
  std::string rng_state;
  std::vector<std::uint32_t> view_order;
  std::uint64_t view_cursor = 0;
  std::vector<double> max_weights;
  std::uint64_t window_iters = 0;
  std::vector<std::uint8_t> protected_tris;
  std::string config;  // flat key=value text
};

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace trisplat
