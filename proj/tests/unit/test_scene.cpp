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
#include <limits>

#include "trisplat/camera.hpp"
#include "trisplat/error.hpp"
#include "trisplat/scene.hpp"

using namespace trisplat;

TEST(MapOpacity, Examples) {
  EXPECT_DOUBLE_EQ(map_opacity(0.0, 0.0), 0.5);
  EXPECT_DOUBLE_EQ(map_opacity(0.0, 0.2), 0.6);
  EXPECT_NEAR(map_opacity(60.0, 0.2), 1.0, 1e-15);
  EXPECT_EQ(map_opacity(std::numeric_limits<double>::infinity(), 0.2), 1.0);
}

TEST(MapOpacity, MonotoneAndAboveFloor) {
  for (double floor : {0.0, 0.1, 0.5, 0.9}) {
    double prev = -1.0;
    for (double x = -30.0; x <= 30.0; x += 0.25) {
      const double o = map_opacity(x, floor);
      EXPECT_GE(o, floor);
      EXPECT_LE(o, 1.0);
      EXPECT_GE(o, prev);
      prev = o;
    }
  }
  for (double x : {-3.0, 0.0, 2.0}) {
    EXPECT_LT(map_opacity(x, 0.1), map_opacity(x, 0.3));
  }
}

TEST(MapOpacity, DerivativeMatchesDifference) {
  for (double floor : {0.0, 0.4}) {
    for (double x : {-4.0, -0.3, 0.0, 1.7, 6.0}) {
      const double h = 1e-6;
      const double fd = (map_opacity(x + h, floor) - map_opacity(x - h, floor)) / (2 * h);
      EXPECT_NEAR(map_opacity_derivative(x, floor), fd, 1e-8);
    }
  }
}

TEST(TriangleOpacity, Examples) {
  auto a = triangle_opacity(0.3, 0.7, 0.5);
  EXPECT_DOUBLE_EQ(a.value, 0.3);
  EXPECT_EQ(a.argmin, 0);
  auto b = triangle_opacity(1.0, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(b.value, 1.0);
  EXPECT_EQ(b.argmin, 0);
  auto c = triangle_opacity(0.5, 0.2, 0.2);
  EXPECT_DOUBLE_EQ(c.value, 0.2);
  EXPECT_EQ(c.argmin, 1);
}

TEST(TriangleOpacity, NonArgminPerturbationIsInvisible) {
  const auto base = triangle_opacity(0.4, 0.6, 0.8);
  EXPECT_EQ(triangle_opacity(0.4, 0.6 + 0.1, 0.8).value, base.value);
  EXPECT_EQ(triangle_opacity(0.4, 0.6, 0.8 - 0.3).value, base.value);
}

TEST(InterpolateColor, Examples) {
  const Vec3 r(1, 0, 0), g(0, 1, 0), b(0, 0, 1);
  EXPECT_EQ(interpolate_color(r, g, b, Vec3(1, 0, 0)), r);
  const Vec3 c = interpolate_color(r, g, b, Vec3(1.0 / 3, 1.0 / 3, 1.0 / 3));
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(c[i], 1.0 / 3, 1e-15);
  const Vec3 m = interpolate_color(r, g, b, Vec3(0.5, 0.5, 0));
  EXPECT_DOUBLE_EQ(m[0], 0.5);
  EXPECT_DOUBLE_EQ(m[1], 0.5);
  EXPECT_DOUBLE_EQ(m[2], 0.0);
}

TEST(InterpolateColor, RejectsOffSimplex) {
  const Vec3 r(1, 0, 0);
  EXPECT_THROW(interpolate_color(r, r, r, Vec3(0.6, 0.6, 0.0)), UsageError);
  EXPECT_THROW(interpolate_color(r, r, r, Vec3(1.2, -0.2, 0.0)), UsageError);
  EXPECT_NO_THROW(interpolate_color(r, r, r, Vec3(0.5, 0.5, 5e-7)));
}

TEST(Scene, ParameterCount) {
  EXPECT_EQ(kShBasisSize, 16);
  EXPECT_EQ(kParamsPerVertex, 51);
}

TEST(Scalars, Ranges) {
  EXPECT_NO_THROW(Smoothness(1.0));
  EXPECT_NO_THROW(Smoothness(1e-4));
  EXPECT_THROW(Smoothness(2.0), UsageError);
  EXPECT_THROW(Smoothness(1e-5), UsageError);
  EXPECT_NO_THROW(OpacityFloor(0.0));
  EXPECT_THROW(OpacityFloor(1.0), UsageError);
  EXPECT_THROW(OpacityFloor(-0.1), UsageError);
}

namespace {

Scene two_triangles() {
  Scene s;
  for (int i = 0; i < 5; ++i) s.vertices.add(Vec3(i, i * i, 1.0), ShCoeffs{}, 0.0);
  s.triangles.add({0, 1, 2});
  s.triangles.add({1, 3, 4});
  return s;
}

}  // namespace

TEST(Validate, CatchesViolations) {
  Scene s = two_triangles();
  EXPECT_NO_THROW(validate(s));

  Scene bad_index = s;
  bad_index.triangles.indices[0][2] = 9;
  EXPECT_THROW(validate(bad_index), InvariantError);

  Scene repeated = s;
  repeated.triangles.indices[1] = {3, 3, 4};
  EXPECT_THROW(validate(repeated), InvariantError);

  Scene dead_vertex = s;
  dead_vertex.vertices.active[4] = 0;
  EXPECT_THROW(validate(dead_vertex), InvariantError);

  Scene nan_pos = s;
  nan_pos.vertices.positions[0].x() = std::nan("");
  EXPECT_THROW(validate(nan_pos), InvariantError);

  // A tombstoned triangle may still point at a tombstoned vertex.
  Scene tomb = s;
  tomb.triangles.active[1] = 0;
  tomb.vertices.active[4] = 0;
  EXPECT_NO_THROW(validate(tomb));
}

TEST(Compact, Reindexes) {
  Scene s = two_triangles();
  s.triangles.active[0] = 0;
  s.vertices.active[0] = 0;
  s.vertices.active[2] = 0;
  const CompactionMap map = compact(s);
  ASSERT_EQ(s.vertices.size(), 3u);
  ASSERT_EQ(s.triangles.size(), 1u);
  EXPECT_EQ(map.vertex[0], -1);
  EXPECT_EQ(map.vertex[1], 0);
  EXPECT_EQ(map.vertex[3], 1);
  EXPECT_EQ(map.triangle[0], -1);
  EXPECT_EQ(map.triangle[1], 0);
  EXPECT_EQ(s.triangles.indices[0], (TriangleIndices{0, 1, 2}));
  EXPECT_EQ(s.vertices.positions[2], Vec3(4, 16, 1));
  EXPECT_NO_THROW(validate(s));
}

TEST(VertexDegrees, CountsActiveOnly) {
  Scene s = two_triangles();
  s.triangles.active[1] = 0;
  const auto deg = vertex_degrees(s);
  EXPECT_EQ(deg, (std::vector<std::uint32_t>{1, 1, 1, 0, 0}));
}

TEST(Camera, Validation) {
  Camera cam;
  cam.width = cam.height = 8;
  EXPECT_NO_THROW(cam.validate());
  cam.rotation(0, 0) = -1.0;  // reflection, det = -1
  EXPECT_THROW(cam.validate(), UsageError);
  cam.rotation = Mat3::Identity() * 1.01;
  EXPECT_THROW(cam.validate(), UsageError);
}

TEST(Camera, LookAtAndCenter) {
  const Vec3 eye(1, 2, 3);
  const Camera cam = Camera::look_at(eye, Vec3::Zero(), Vec3(0, 1, 0), 50, 50, 64, 48);
  EXPECT_NO_THROW(cam.validate());
  EXPECT_NEAR((cam.center() - eye).norm(), 0.0, 1e-12);
  const Vec3 target_cam = cam.rotation * Vec3::Zero() + cam.translation;
  EXPECT_NEAR(target_cam.x(), 0.0, 1e-12);
  EXPECT_NEAR(target_cam.y(), 0.0, 1e-12);
  EXPECT_NEAR(target_cam.z(), eye.norm(), 1e-12);
  const Camera hi = cam.scaled(2);
  EXPECT_EQ(hi.width, 128);
  EXPECT_EQ(hi.height, 96);
  EXPECT_DOUBLE_EQ(hi.fx, 100.0);
  EXPECT_DOUBLE_EQ(hi.cx, 2 * cam.cx);
}
