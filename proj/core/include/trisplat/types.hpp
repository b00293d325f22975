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
#include <cstdint>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace trisplat {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Degree-3 real spherical harmonics: 16 basis functions, one RGB triple each.
inline constexpr int kShBasisSize = 16;
inline constexpr int kShCoeffCount = kShBasisSize * 3;

// Coefficients stored basis-major: coeff(b, channel) = values[b * 3 + channel].
using ShCoeffs = std::array<double, kShCoeffCount>;
using ShBasis = std::array<double, kShBasisSize>;

using TriangleIndices = std::array<std::uint32_t, 3>;

}  // namespace trisplat
