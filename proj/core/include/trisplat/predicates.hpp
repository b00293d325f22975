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

#include "trisplat/types.hpp"

namespace trisplat::predicates {

// Sign-exact geometric predicates. A floating-point evaluation is accepted
// when it clears a forward error bound; otherwise the determinant is
// recomputed in exact rational arithmetic.

// Positive when d lies below the plane through a, b, c (a, b, c appear
// counterclockwise seen from above), negative above, zero if coplanar.
int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

// For a positively oriented (a, b, c, d): positive when e lies strictly
// inside their circumsphere, negative outside, zero on it.
int insphere(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
             const Vec3& e);

}  // namespace trisplat::predicates
