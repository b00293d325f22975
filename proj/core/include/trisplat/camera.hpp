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

namespace trisplat {

// Pinhole camera. rotation/translation map world to camera coordinates:
// x_cam = rotation * x_world + translation. The camera looks down +z and
// pixel (u, v) covers [u, u+1) x [v, v+1), so its center is (u+0.5, v+0.5).
struct Camera {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  int width = 0;
  int height = 0;

  // Camera center in world coordinates, -R^T t.
  Vec3 center() const;

  // Same view with intrinsics and image size multiplied by factor.
  Camera scaled(int factor) const;

  // Throws UsageError unless R is a proper rotation within 1e-6 and the
  // image size and focal lengths are positive.
  void validate() const;

  // Camera at `eye` looking at `target` with the given image-up hint.
  static Camera look_at(const Vec3& eye, const Vec3& target, const Vec3& up,
                        double fx, double fy, int width, int height);
};

// Unit quaternion (w, x, y, z) to rotation matrix.
Mat3 quaternion_to_rotation(double qw, double qx, double qy, double qz);

}  // namespace trisplat
