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

#include "trisplat/types.hpp"

namespace trisplat {

// Real spherical harmonics up to degree 3, ordered by band l = 0..3 and
// m = -l..l, orthonormal over the unit sphere, with the Condon-Shortley
// phase folded into the constants (the convention used by 3D Gaussian
// splatting implementations). Colors use a +0.5 offset so that all-zero
// coefficients render mid-gray.
namespace sh {

inline constexpr double kC0 = 0.28209479177387814;
inline constexpr double kC1 = 0.4886025119029199;
inline constexpr std::array<double, 5> kC2 = {
    1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
    -1.0925484305920792, 0.5462742152960396};
inline constexpr std::array<double, 7> kC3 = {
    -0.5900435899266435, 2.890611442640554, -0.4570457994644658,
    0.3731763325901154,  -0.4570457994644658, 1.445305721320277,
    -0.5900435899266435};

inline constexpr double kColorOffset = 0.5;

}  // namespace sh

// Throws UsageError unless |dir| = 1 within 1e-6.
ShBasis eval_sh_basis(const Vec3& dir);

// Unchecked evaluation; dir is assumed unit length.
ShBasis sh_basis(const Vec3& dir);

// Partial derivatives of each basis polynomial with respect to the direction
// components, treating x, y, z as independent.
std::array<Vec3, kShBasisSize> sh_basis_gradient(const Vec3& dir);

// 0.5 + sum_b basis[b] * coeffs[b], before clamping.
Vec3 sh_color_unclamped(const ShCoeffs& coeffs, const ShBasis& basis);

// Clamped view-dependent color for a unit direction.
Vec3 vertex_color(const ShCoeffs& coeffs, const Vec3& dir);

// Coefficients with only the DC band set, rendering `rgb` from every
// direction.
ShCoeffs sh_from_rgb(const Vec3& rgb);

// View-independent part of the color, 0.5 + C0 * dc, unclamped.
Vec3 sh_dc_color(const ShCoeffs& coeffs);

}  // namespace trisplat
