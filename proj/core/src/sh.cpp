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

#include "trisplat/sh.hpp"

#include <cmath>

#include "trisplat/error.hpp"

namespace trisplat {

using namespace sh;

ShBasis eval_sh_basis(const Vec3& dir) {
  if (!dir.allFinite() || std::abs(dir.norm() - 1.0) > 1e-6) {
    throw UsageError("spherical harmonics need a unit direction");
  }
  return sh_basis(dir);
}

ShBasis sh_basis(const Vec3& dir) {
  const double x = dir.x(), y = dir.y(), z = dir.z();
  const double xx = x * x, yy = y * y, zz = z * z;
  ShBasis b;
  b[0] = kC0;
  b[1] = -kC1 * y;
  b[2] = kC1 * z;
  b[3] = -kC1 * x;
  b[4] = kC2[0] * x * y;
  b[5] = kC2[1] * y * z;
  b[6] = kC2[2] * (2.0 * zz - xx - yy);
  b[7] = kC2[3] * x * z;
  b[8] = kC2[4] * (xx - yy);
  b[9] = kC3[0] * y * (3.0 * xx - yy);
  b[10] = kC3[1] * x * y * z;
  b[11] = kC3[2] * y * (4.0 * zz - xx - yy);
  b[12] = kC3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * yy);
  b[13] = kC3[4] * x * (4.0 * zz - xx - yy);
  b[14] = kC3[5] * z * (xx - yy);
  b[15] = kC3[6] * x * (xx - 3.0 * yy);
  return b;
}

std::array<Vec3, kShBasisSize> sh_basis_gradient(const Vec3& dir) {
  const double x = dir.x(), y = dir.y(), z = dir.z();
  const double xx = x * x, yy = y * y, zz = z * z;
  std::array<Vec3, kShBasisSize> g;
  g[0] = Vec3::Zero();
  g[1] = Vec3(0.0, -kC1, 0.0);
  g[2] = Vec3(0.0, 0.0, kC1);
  g[3] = Vec3(-kC1, 0.0, 0.0);
  g[4] = kC2[0] * Vec3(y, x, 0.0);
  g[5] = kC2[1] * Vec3(0.0, z, y);
  g[6] = kC2[2] * Vec3(-2.0 * x, -2.0 * y, 4.0 * z);
  g[7] = kC2[3] * Vec3(z, 0.0, x);
  g[8] = kC2[4] * Vec3(2.0 * x, -2.0 * y, 0.0);
  g[9] = kC3[0] * Vec3(6.0 * x * y, 3.0 * xx - 3.0 * yy, 0.0);
  g[10] = kC3[1] * Vec3(y * z, x * z, x * y);
  g[11] = kC3[2] * Vec3(-2.0 * x * y, 4.0 * zz - xx - 3.0 * yy, 8.0 * y * z);
  g[12] = kC3[3] * Vec3(-6.0 * x * z, -6.0 * y * z, 6.0 * zz - 3.0 * xx - 3.0 * yy);
  g[13] = kC3[4] * Vec3(4.0 * zz - 3.0 * xx - yy, -2.0 * x * y, 8.0 * x * z);
  g[14] = kC3[5] * Vec3(2.0 * x * z, -2.0 * y * z, xx - yy);
  g[15] = kC3[6] * Vec3(3.0 * xx - 3.0 * yy, -6.0 * x * y, 0.0);
  return g;
}

Vec3 sh_color_unclamped(const ShCoeffs& coeffs, const ShBasis& basis) {
  Vec3 c = Vec3::Constant(kColorOffset);
  for (int b = 0; b < kShBasisSize; ++b) {
    c[0] += basis[b] * coeffs[b * 3 + 0];
    c[1] += basis[b] * coeffs[b * 3 + 1];
    c[2] += basis[b] * coeffs[b * 3 + 2];
  }
  return c;
}

Vec3 vertex_color(const ShCoeffs& coeffs, const Vec3& dir) {
  return sh_color_unclamped(coeffs, eval_sh_basis(dir))
      .cwiseMax(0.0)
      .cwiseMin(1.0);
}

ShCoeffs sh_from_rgb(const Vec3& rgb) {
  ShCoeffs coeffs{};
  for (int c = 0; c < 3; ++c) coeffs[c] = (rgb[c] - kColorOffset) / kC0;
  return coeffs;
}

Vec3 sh_dc_color(const ShCoeffs& coeffs) {
  return Vec3(kColorOffset + kC0 * coeffs[0], kColorOffset + kC0 * coeffs[1],
              kColorOffset + kC0 * coeffs[2]);
}

}  // namespace trisplat
