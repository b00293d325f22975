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

#include <array>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "trisplat/camera.hpp"
#include "trisplat/raster.hpp"
#include "trisplat/scene.hpp"

namespace tstest {

// Camera at the origin looking down +z with a square image.
trisplat::Camera axis_camera(int size, double focal = 0.0);

struct RandomSceneOptions {
  int triangles = 5;
  int image_size = 32;
  double sh_rest_scale = 0.02;     // std-dev of bands 1-3
  double saturated_fraction = 0.0; // vertices with logits in [5, 7]
  bool shared = true;              // draw triangles from a small vertex pool
  double min_area_px = 4.0;
  double min_depth_gap = 1e-3;  // between sorted incenter depths
  double min_logit_gap = 1e-2;  // between a triangle's two smallest logits
};

// Triangles in front of axis_camera(image_size), colors safely inside
// (0, 1) so clamping never activates.
trisplat::Scene random_scene(std::mt19937_64& rng, const RandomSceneOptions& opts);

// Random 2D triangle with |area| >= min_area inside [0, extent]^2.
std::array<trisplat::Vec2, 3> random_triangle2d(std::mt19937_64& rng, double extent,
                                                double min_area = 1.0);

struct FdOptions {
  double eps_position = 1e-6;
  double eps_sh = 1e-6;
  double eps_logit = 1e-6;
  double eps_sigma_rel = 1e-6;
  double rel_tol = 1e-3;
  double abs_tol = 1e-6;
  double kink_exclusion_px = 1e-2;
};

struct FdSummary {
  // class name -> (probes, failures)
  std::map<std::string, std::array<int, 2>> classes;
  std::vector<std::string> failures;  // first few, human readable
  int excluded_pixels = 0;
  double worst_rel = 0.0;

  int probes() const;
  int failed() const;
  void merge(const FdSummary& other);
};

// Central-difference check of every vertex parameter and of sigma for the
// loss sum(w * color) with random pixel weights w. Pixels within
// kink_exclusion_px of an SDF kink (per the reference renderer) get w = 0.
FdSummary gradient_check(const trisplat::Scene& scene, const trisplat::Camera& cam,
                         const trisplat::RenderSettings& settings, std::mt19937_64& rng,
                         const FdOptions& opts = {});

// Scratch directory under the system temp dir, wiped on construction.
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace tstest
