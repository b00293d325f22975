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

#include <vector>

#include "trisplat/camera.hpp"
#include "trisplat/image.hpp"
#include "trisplat/raster.hpp"
#include "trisplat/scene.hpp"

namespace trisplat {

// Gradients of a scalar loss with respect to every vertex parameter.
// Contributions from all triangles sharing a vertex are summed.
struct GradientBuffer {
  std::vector<Vec3> d_positions;
  std::vector<ShCoeffs> d_sh;
  std::vector<double> d_opacity_logit;
  // Accumulated for gradient checking; the trainer never applies it.
  double d_sigma = 0.0;

  void resize(std::size_t vertex_count);
  void zero();
  bool all_finite() const;
};

// Reverse pass of render_frame. d_color is dL/d(color image) at the setup
// resolution; d_normals (optional) is dL/d(accumulated normal image).
// Gradients are added to `grads`, which must be sized to the vertex count.
// The per-pixel fragment lists are recomputed from the tile bins.
void backward(const Scene& scene, const Camera& cam,
              const RenderSettings& settings, const FrameSetup& setup,
              const Image& d_color, const Image* d_normals,
              GradientBuffer& grads);

}  // namespace trisplat
