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

// Per-pixel fragment walk shared by the forward renderer and the backward
// pass, so both see exactly the same contributions in the same order.

#include <cstdint>
#include <span>
#include <vector>

#include "trisplat/raster.hpp"

namespace trisplat::detail {

struct Fragment {
  std::uint32_t local = 0;  // index into FrameSetup::triangles
  int edge = 0;             // edge attaining phi(p)
  double phi = 0.0;
  double ratio = 0.0;       // phi(p) / phi(s), clamped to <= 1
  bool ratio_clamped = false;
  double window = 0.0;
  double alpha = 0.0;
  double transmittance = 1.0;  // before this fragment
  Vec3 lambda;
  Vec3 color;
};

inline double cross2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Walks `list` front to back at pixel center p, appending every fragment
// with I > 0 until transmittance falls below the cutoff. Returns the final
// transmittance.
inline double gather_fragments(const FrameSetup& setup,
                               std::span<const std::uint32_t> list,
                               const Vec2& p, double sigma,
                               std::vector<Fragment>& out) {
  out.clear();
  double T = 1.0;
  for (std::uint32_t local : list) {
    const TriangleSetup& tri = setup.triangles[local];
    const ProjectedTriangle& pt = tri.proj;
    const SdfValue sdf = triangle_sdf_argmax(pt, p);
    if (!(sdf.value < 0.0)) continue;
    Fragment f;
    f.local = local;
    f.edge = sdf.edge;
    f.phi = sdf.value;
    f.ratio = sdf.value / pt.incenter_sdf;
    if (f.ratio >= 1.0) {
      f.ratio = 1.0;
      f.ratio_clamped = true;
    }
    f.window = std::pow(f.ratio, sigma);
    f.alpha = tri.opacity * f.window;
    f.transmittance = T;
    const double inv_area2 = 1.0 / (2.0 * pt.signed_area);
    for (int k = 0; k < 3; ++k) {
      f.lambda[k] =
          cross2(pt.q[(k + 1) % 3] - p, pt.q[(k + 2) % 3] - p) * inv_area2;
    }
    f.color = f.lambda[0] * tri.color[0] + f.lambda[1] * tri.color[1] +
              f.lambda[2] * tri.color[2];
    out.push_back(f);
    T *= (1.0 - f.alpha);
    if (T < kTransmittanceCutoff) break;
  }
  return T;
}

}  // namespace trisplat::detail
