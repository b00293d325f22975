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

#include "trisplat/camera.hpp"

#include <cmath>

#include <Eigen/Geometry>

#include "trisplat/error.hpp"

namespace trisplat {

Vec3 Camera::center() const { return -rotation.transpose() * translation; }

Camera Camera::scaled(int factor) const {
  Camera out = *this;
  const double s = static_cast<double>(factor);
  out.fx *= s;
  out.fy *= s;
  out.cx *= s;
  out.cy *= s;
  out.width *= factor;
  out.height *= factor;
  return out;
}

void Camera::validate() const {
  if (width <= 0 || height <= 0) throw UsageError("camera has an empty image");
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw UsageError("camera focal lengths must be positive");
  }
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw UsageError("camera pose is not finite");
  }
  if (std::abs(rotation.determinant() - 1.0) >= 1e-6) {
    throw UsageError("camera rotation determinant is not 1");
  }
  if (((rotation.transpose() * rotation) - Mat3::Identity())
          .cwiseAbs()
          .maxCoeff() >= 1e-6) {
    throw UsageError("camera rotation is not orthonormal");
  }
}

Camera Camera::look_at(const Vec3& eye, const Vec3& target, const Vec3& up,
                       double fx, double fy, int width, int height) {
  const Vec3 forward = (target - eye).normalized();
  // Camera axes: x right, y down (image rows), z forward.
  Vec3 right = forward.cross(up);
  if (right.norm() < 1e-12) right = forward.unitOrthogonal();
  right.normalize();
  const Vec3 down = forward.cross(right);
  Camera cam;
  cam.rotation.row(0) = right.transpose();
  cam.rotation.row(1) = down.transpose();
  cam.rotation.row(2) = forward.transpose();
  cam.translation = -cam.rotation * eye;
  cam.fx = fx;
  cam.fy = fy;
  cam.cx = 0.5 * width;
  cam.cy = 0.5 * height;
  cam.width = width;
  cam.height = height;
  return cam;
}

Mat3 quaternion_to_rotation(double qw, double qx, double qy, double qz) {
  Eigen::Quaterniond q(qw, qx, qy, qz);
  if (q.norm() < 1e-12) throw DataError("zero-length quaternion");
  q.normalize();
  return q.toRotationMatrix();
}

}  // namespace trisplat
