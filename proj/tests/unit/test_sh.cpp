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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "trisplat/error.hpp"
#include "trisplat/sh.hpp"

using namespace trisplat;

namespace {

Vec3 random_dir(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  return Vec3(g(rng), g(rng), g(rng)).normalized();
}

}  // namespace

TEST(ShBasis, ConstantBand) {
  const ShBasis b = eval_sh_basis(Vec3(0, 0, 1));
  EXPECT_NEAR(b[0], 0.2820947918, 1e-10);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) EXPECT_DOUBLE_EQ(eval_sh_basis(random_dir(rng))[0], sh::kC0);
}

TEST(ShBasis, OddParityFlipsBandOneZ) {
  const ShBasis up = eval_sh_basis(Vec3(0, 0, 1));
  const ShBasis down = eval_sh_basis(Vec3(0, 0, -1));
  EXPECT_NE(up[2], 0.0);
  EXPECT_DOUBLE_EQ(up[2], -down[2]);
  // Every odd band flips, every even band is unchanged.
  std::mt19937_64 rng(2);
  const Vec3 d = random_dir(rng);
  const ShBasis a = eval_sh_basis(d), b = eval_sh_basis(-d);
  for (int i = 0; i < kShBasisSize; ++i) {
    const int band = i == 0 ? 0 : i < 4 ? 1 : i < 9 ? 2 : 3;
    EXPECT_NEAR(a[i], band % 2 ? -b[i] : b[i], 1e-14) << i;
  }
}

TEST(ShBasis, RejectsNonUnit) {
  EXPECT_THROW(eval_sh_basis(Vec3(0, 0, 2)), UsageError);
  EXPECT_THROW(eval_sh_basis(Vec3(0, 0, 1 + 1e-5)), UsageError);
  EXPECT_NO_THROW(eval_sh_basis(Vec3(0, 0, 1 + 1e-7)));
}

// Quadrature over a spherical Fibonacci lattice of 1e6 equal-area points.
TEST(ShBasis, Orthonormal) {
  const int n = 1000000;
  std::array<std::array<double, kShBasisSize>, kShBasisSize> gram{};
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(1.0 - z * z);
    const double phi = golden * i;
    const ShBasis b = sh_basis(Vec3(r * std::cos(phi), r * std::sin(phi), z));
    for (int a = 0; a < kShBasisSize; ++a) {
      for (int c = a; c < kShBasisSize; ++c) gram[a][c] += b[a] * b[c];
    }
  }
  const double w = 4.0 * std::numbers::pi / n;
  for (int a = 0; a < kShBasisSize; ++a) {
    for (int c = a; c < kShBasisSize; ++c) {
      EXPECT_NEAR(gram[a][c] * w, a == c ? 1.0 : 0.0, 1e-3) << a << "," << c;
    }
  }
}

TEST(ShBasis, GradientMatchesDifference) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    const Vec3 d = random_dir(rng);
    const auto g = sh_basis_gradient(d);
    for (int a = 0; a < 3; ++a) {
      Vec3 p = d, m = d;
      p[a] += 1e-6;
      m[a] -= 1e-6;
      const ShBasis bp = sh_basis(p), bm = sh_basis(m);
      for (int i = 0; i < kShBasisSize; ++i) {
        EXPECT_NEAR(g[i][a], (bp[i] - bm[i]) / 2e-6, 1e-7);
      }
    }
  }
}

TEST(VertexColor, Examples) {
  std::mt19937_64 rng(4);
  const ShCoeffs zero{};
  EXPECT_EQ(vertex_color(zero, random_dir(rng)), Vec3(0.5, 0.5, 0.5));

  ShCoeffs red{};
  red[0] = 0.5 / 0.2820947918;
  for (int i = 0; i < 5; ++i) {
    const Vec3 c = vertex_color(red, random_dir(rng));
    EXPECT_NEAR(c[0], 1.0, 1e-9);
    EXPECT_DOUBLE_EQ(c[1], 0.5);
    EXPECT_DOUBLE_EQ(c[2], 0.5);
  }
}

TEST(VertexColor, BandZeroIsViewIndependent) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ShCoeffs c{};
  for (int i = 0; i < 3; ++i) c[i] = u(rng);
  const Vec3 ref = vertex_color(c, Vec3(0, 0, 1));
  for (int i = 0; i < 100; ++i) EXPECT_EQ(vertex_color(c, random_dir(rng)), ref);
}

TEST(VertexColor, LinearBeforeClamp) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ShCoeffs c1{}, c2{}, mix{};
  const double a = 0.7, b = -1.3;
  for (int i = 0; i < kShCoeffCount; ++i) {
    c1[i] = u(rng);
    c2[i] = u(rng);
    mix[i] = a * c1[i] + b * c2[i];
  }
  const ShBasis basis = sh_basis(random_dir(rng));
  const Vec3 off = Vec3::Constant(sh::kColorOffset);
  const Vec3 lhs = sh_color_unclamped(mix, basis) - off;
  const Vec3 rhs = a * (sh_color_unclamped(c1, basis) - off) + b * (sh_color_unclamped(c2, basis) - off);
  EXPECT_NEAR((lhs - rhs).norm(), 0.0, 1e-12);
}

TEST(VertexColor, ClampsToUnitRange) {
  ShCoeffs big{};
  big[0] = 10.0;
  big[1] = -10.0;
  const Vec3 c = vertex_color(big, Vec3(1, 0, 0));
  EXPECT_EQ(c, Vec3(1.0, 0.0, 0.5));
}

TEST(ShFromRgb, RoundTrip) {
  const Vec3 rgb(1.0, 0.0, 0.25);
  const ShCoeffs c = sh_from_rgb(rgb);
  EXPECT_NEAR((sh_dc_color(c) - rgb).norm(), 0.0, 1e-15);
  for (int i = 3; i < kShCoeffCount; ++i) EXPECT_EQ(c[i], 0.0);
}
