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

#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "trisplat/error.hpp"
#include "trisplat/io.hpp"
#include "trisplat/sh.hpp"

using namespace trisplat;
namespace fs = std::filesystem;

namespace {

const fs::path kColmapDir = fs::path(TRISPLAT_TEST_DATA_DIR) / "colmap_small";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

// Copy of the COLMAP fixture with one file replaced.
fs::path colmap_variant(const std::string& name, const std::string& file, const std::string& text) {
  const fs::path dir = tstest::scratch_dir(name);
  for (const char* f : {"cameras.txt", "images.txt", "points3D.txt"}) {
    fs::copy_file(kColmapDir / "sparse/0" / f, dir / f);
  }
  spit(dir / file, text);
  return dir;
}

Checkpoint random_checkpoint(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  tstest::RandomSceneOptions opts;
  opts.triangles = 12;
  opts.sh_rest_scale = 0.3;
  Checkpoint c;
  c.scene = tstest::random_scene(rng, opts);
  c.scene.triangles.active[3] = 0;
  c.iteration = 1234;
  c.sigma = 0.0123456789;
  c.floor = 0.3141592653589793;
  c.loss_sum = 12.75;
  c.loss_count = 17;
  c.adam.resize(c.scene.vertices.size());
  c.adam.steps = 1234;
  std::normal_distribution<double> g(0.0, 1.0);
  for (int k = 0; k < kGroupCount; ++k) {
    for (double& v : c.adam.m[k]) v = g(rng);
    for (double& v : c.adam.v[k]) v = std::abs(g(rng)) * 1e-7;
  }
  std::ostringstream rs;
  rs << rng;
  c.rng_state = rs.str();
  c.view_order = {3, 1, 0, 2};
  c.view_cursor = 2;
  c.max_weights.assign(c.scene.triangles.size(), 0.25);
  c.window_iters = 9;
  c.protected_tris.assign(c.scene.triangles.size(), 0);
  c.protected_tris[1] = 1;
  c.config = "total_iters=5000\nseed=7\n";
  return c;
}

void expect_same(const Checkpoint& a, const Checkpoint& b) {
  EXPECT_EQ(a.iteration, b.iteration);
  EXPECT_EQ(a.sigma, b.sigma);
  EXPECT_EQ(a.floor, b.floor);
  EXPECT_EQ(a.loss_sum, b.loss_sum);
  EXPECT_EQ(a.loss_count, b.loss_count);
  EXPECT_EQ(a.scene.vertices.positions, b.scene.vertices.positions);
  EXPECT_EQ(a.scene.vertices.sh, b.scene.vertices.sh);
  EXPECT_EQ(a.scene.vertices.opacity_logit, b.scene.vertices.opacity_logit);
  EXPECT_EQ(a.scene.vertices.active, b.scene.vertices.active);
  EXPECT_EQ(a.scene.triangles.indices, b.scene.triangles.indices);
  EXPECT_EQ(a.scene.triangles.active, b.scene.triangles.active);
  EXPECT_EQ(a.adam.steps, b.adam.steps);
  EXPECT_EQ(a.adam.m, b.adam.m);
  EXPECT_EQ(a.adam.v, b.adam.v);
  EXPECT_EQ(a.rng_state, b.rng_state);
  EXPECT_EQ(a.view_order, b.view_order);
  EXPECT_EQ(a.view_cursor, b.view_cursor);
  EXPECT_EQ(a.max_weights, b.max_weights);
  EXPECT_EQ(a.window_iters, b.window_iters);
  EXPECT_EQ(a.protected_tris, b.protected_tris);
  EXPECT_EQ(a.config, b.config);
}

}  // namespace

TEST(Colmap, FixtureCounts) {
  const SceneDataset d = parse_colmap_text(kColmapDir / "sparse/0", false);
  EXPECT_EQ(d.cameras.size(), 3u);
  EXPECT_EQ(d.points.size(), 10u);
  EXPECT_EQ(d.point_colors.size(), 10u);
  EXPECT_EQ(d.image_paths.size(), 3u);
  EXPECT_TRUE(d.images.empty());
  EXPECT_EQ(d.points[1], Vec3(0.5, 0.0, 0.1));
  EXPECT_NEAR((d.point_colors[0] - Vec3(1, 0, 0)).norm(), 0.0, 1e-15);
  EXPECT_EQ(d.test_views, (std::vector<int>{0}));
}

TEST(Colmap, Intrinsics) {
  const SceneDataset d = parse_colmap_text(kColmapDir / "sparse/0", false);
  EXPECT_EQ(d.cameras[0].fx, 20.0);
  EXPECT_EQ(d.cameras[0].fy, 20.0);
  EXPECT_EQ(d.cameras[0].cx, 8.0);
  EXPECT_EQ(d.cameras[1].fy, 22.0);
  EXPECT_EQ(d.cameras[1].width, 16);
  EXPECT_EQ(d.cameras[1].height, 12);
  EXPECT_EQ(d.cameras[1].translation, Vec3(0.1, -0.2, 4));
}

TEST(Colmap, QuaternionConversion) {
  const SceneDataset d = parse_colmap_text(kColmapDir / "sparse/0", false);
  EXPECT_NEAR((d.cameras[0].rotation - Mat3::Identity()).norm(), 0.0, 1e-15);
  // 90 degrees about y: x -> -z, z -> x.
  const Mat3& R = d.cameras[1].rotation;
  EXPECT_NEAR((R.col(0) - Vec3(0, 0, -1)).norm(), 0.0, 1e-6);
  EXPECT_NEAR((R.col(1) - Vec3(0, 1, 0)).norm(), 0.0, 1e-6);
  EXPECT_NEAR((R.col(2) - Vec3(1, 0, 0)).norm(), 0.0, 1e-6);
  EXPECT_NEAR(R.determinant(), 1.0, 1e-12);
}

TEST(Colmap, LoadsImagesFromParentDirectory) {
  const SceneDataset d = load_dataset(kColmapDir);
  ASSERT_EQ(d.images.size(), 3u);
  EXPECT_EQ(d.images[1].width, 16);
  EXPECT_EQ(d.images[1].height, 12);
  EXPECT_EQ(d.images[1].at(10, 5, 1), 1.0);
  EXPECT_NO_THROW(d.validate());
}

TEST(Colmap, UnsupportedModelIsNamed) {
  const fs::path dir = colmap_variant("colmap_model", "cameras.txt",
                                      "1 OPENCV 16 12 20 20 8 6 0.1 0.01 0 0\n");
  try {
    parse_colmap_text(dir, false);
    FAIL() << "expected an error";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("unsupported camera model OPENCV"), std::string::npos);
  }
}

TEST(Colmap, MalformedLineReportsLineNumber) {
  const fs::path dir = colmap_variant("colmap_malformed", "points3D.txt",
                                      "# header\n1 0 0 0 255 0 0 0.5\n2 0.5 zero 0.1 0 255 0 0.4\n");
  try {
    parse_colmap_text(dir, false);
    FAIL() << "expected an error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_NE(e.file().find("points3D.txt"), std::string::npos);
  }
}

TEST(Colmap, TruncatedAndMiscountedFiles) {
  const std::string full = slurp(kColmapDir / "sparse/0/images.txt");
  const fs::path dir = colmap_variant("colmap_trunc", "images.txt", full.substr(0, full.size() / 2));
  EXPECT_THROW(parse_colmap_text(dir, false), DataError);

  const fs::path dir2 = colmap_variant("colmap_count", "cameras.txt",
                                       "# Number of cameras: 5\n1 SIMPLE_PINHOLE 16 12 20 8 6\n");
  EXPECT_THROW(parse_colmap_text(dir2, false), DataError);
  EXPECT_THROW(parse_colmap_text(tstest::scratch_dir("colmap_missing"), false), DataError);
}

TEST(Images, PngAndPpmRoundTrip) {
  const fs::path dir = tstest::scratch_dir("images");
  std::mt19937_64 rng(70);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Image img(13, 7, 3);
  for (double& v : img.data) v = u(rng);
  for (const char* name : {"a.png", "a.ppm"}) {
    write_image(img, dir / name);
    const Image back = read_image(dir / name);
    ASSERT_EQ(back.width, 13);
    ASSERT_EQ(back.height, 7);
    ASSERT_EQ(back.channels, 3);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
      EXPECT_LE(std::abs(back.data[i] - img.data[i]), 0.5 / 255 + 1e-12);
    }
  }
}

TEST(Images, BytesMapLinearly) {
  const fs::path dir = tstest::scratch_dir("images_linear");
  // Binary PPM written by hand: bytes 0, 128, 255.
  spit(dir / "p.ppm", std::string("P6\n1 1\n255\n") + '\x00' + '\x80' + '\xff');
  const Image img = read_image(dir / "p.ppm");
  EXPECT_EQ(img.data[0], 0.0);
  EXPECT_EQ(img.data[1], 128.0 / 255.0);
  EXPECT_EQ(img.data[2], 1.0);
  EXPECT_THROW(read_image(dir / "missing.png"), DataError);
}

TEST(Masks, RoundTrip) {
  const fs::path dir = tstest::scratch_dir("masks");
  Mask m{5, 4, std::vector<std::uint8_t>(20, 0)};
  m.data[3] = m.data[7] = m.data[19] = 1;
  write_mask(m, dir / "m.png");
  const Mask back = read_mask(dir / "m.png");
  EXPECT_EQ(back.width, 5);
  EXPECT_EQ(back.height, 4);
  EXPECT_EQ(back.data, m.data);
}

TEST(Ply, HeaderCounts) {
  const fs::path dir = tstest::scratch_dir("ply_header");
  Scene s;
  s.triangles.add({s.vertices.add(Vec3(0, 0, 0), {}, 0), s.vertices.add(Vec3(1, 0, 0), {}, 0),
                   s.vertices.add(Vec3(0, 1, 0), {}, 0)});
  export_ply(s, dir / "t.ply");
  const std::string text = slurp(dir / "t.ply");
  EXPECT_EQ(text.rfind("ply\nformat binary_little_endian 1.0\n", 0), 0u);
  EXPECT_NE(text.find("element vertex 3\n"), std::string::npos);
  EXPECT_NE(text.find("element face 1\n"), std::string::npos);
  EXPECT_EQ(text.find("opacity"), std::string::npos);
}

TEST(Ply, RedVertexBytes) {
  const fs::path dir = tstest::scratch_dir("ply_red");
  Scene s;
  const ShCoeffs red = sh_from_rgb(Vec3(1, 0, 0));
  s.triangles.add({s.vertices.add(Vec3(0, 0, 0), red, 0), s.vertices.add(Vec3(1, 0, 0), red, 0),
                   s.vertices.add(Vec3(0, 1, 0), red, 0)});
  export_ply(s, dir / "r.ply");
  const std::string data = slurp(dir / "r.ply");
  const std::size_t body = data.find("end_header\n") + 11;
  // First vertex: 3 floats then 3 bytes.
  EXPECT_EQ(static_cast<unsigned char>(data[body + 12]), 255);
  EXPECT_EQ(static_cast<unsigned char>(data[body + 13]), 0);
  EXPECT_EQ(static_cast<unsigned char>(data[body + 14]), 0);
}

TEST(Ply, RoundTripAndDeterminism) {
  const fs::path dir = tstest::scratch_dir("ply_roundtrip");
  std::mt19937_64 rng(71);
  tstest::RandomSceneOptions opts;
  opts.triangles = 20;
  Scene s = tstest::random_scene(rng, opts);
  // Float-representable positions so the round trip is exact.
  for (auto& p : s.vertices.positions) {
    const Eigen::Vector3f f(static_cast<float>(p.x()), static_cast<float>(p.y()), static_cast<float>(p.z()));
    p = f.cast<double>();
  }
  export_ply(s, dir / "a.ply");
  export_ply(s, dir / "b.ply");
  EXPECT_EQ(slurp(dir / "a.ply"), slurp(dir / "b.ply"));

  const PlyMesh m = import_ply(dir / "a.ply");
  ASSERT_EQ(m.positions.size(), s.vertices.size());
  ASSERT_EQ(m.faces.size(), s.triangles.size());
  for (std::size_t i = 0; i < m.positions.size(); ++i) {
    EXPECT_EQ(m.positions[i], s.vertices.positions[i]);
    const Vec3 c = sh_dc_color(s.vertices.sh[i]).cwiseMax(0.0).cwiseMin(1.0);
    EXPECT_LE((m.colors[i] - c).cwiseAbs().maxCoeff(), 1.0 / 255);
  }
  EXPECT_EQ(m.faces, s.triangles.indices);
  EXPECT_TRUE(m.sh_dc.empty());

  export_ply(s, dir / "dc.ply", PlyColorMode::kShDc);
  const PlyMesh dc = import_ply(dir / "dc.ply");
  ASSERT_EQ(dc.sh_dc.size(), s.vertices.size());
  for (std::size_t i = 0; i < dc.sh_dc.size(); ++i) {
    for (int c = 0; c < 3; ++c) EXPECT_EQ(dc.sh_dc[i][c], static_cast<float>(s.vertices.sh[i][c]));
  }
  const Scene back = scene_from_ply(dc);
  EXPECT_NO_THROW(validate(back));
  EXPECT_EQ(back.triangles.indices, s.triangles.indices);
}

TEST(Ply, ExportCompactsTombstones) {
  const fs::path dir = tstest::scratch_dir("ply_compact");
  std::mt19937_64 rng(72);
  tstest::RandomSceneOptions opts;
  opts.triangles = 6;
  opts.shared = false;
  Scene s = tstest::random_scene(rng, opts);
  s.triangles.active[2] = 0;
  for (int k = 6; k < 9; ++k) s.vertices.active[k] = 0;
  export_ply(s, dir / "c.ply");
  const PlyMesh m = import_ply(dir / "c.ply");
  EXPECT_EQ(m.faces.size(), 5u);
  EXPECT_EQ(m.positions.size(), 15u);
}

TEST(Ply, RejectsGarbage) {
  const fs::path dir = tstest::scratch_dir("ply_bad");
  spit(dir / "x.ply", "ply\nformat ascii 1.0\nelement vertex 1\nend_header\n0 0 0\n");
  EXPECT_THROW(import_ply(dir / "x.ply"), DataError);
  spit(dir / "y.ply", "not a ply");
  EXPECT_THROW(import_ply(dir / "y.ply"), DataError);
}

TEST(Checkpoint, BitExactRoundTrip) {
  const fs::path dir = tstest::scratch_dir("ckpt");
  const Checkpoint c = random_checkpoint(73);
  save_checkpoint(c, dir / "a.tsp");
  const Checkpoint back = load_checkpoint(dir / "a.tsp");
  expect_same(c, back);
  save_checkpoint(back, dir / "b.tsp");
  EXPECT_EQ(slurp(dir / "a.tsp"), slurp(dir / "b.tsp"));
  EXPECT_EQ(slurp(dir / "a.tsp").substr(0, 4), "TSP2");
}

TEST(Checkpoint, VersionMismatch) {
  const fs::path dir = tstest::scratch_dir("ckpt_version");
  save_checkpoint(random_checkpoint(74), dir / "a.tsp");
  std::string data = slurp(dir / "a.tsp");
  const std::uint32_t v = kCheckpointVersion + 1;
  std::memcpy(data.data() + 4, &v, 4);
  spit(dir / "b.tsp", data);
  try {
    load_checkpoint(dir / "b.tsp");
    FAIL() << "expected an error";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos);
  }
  spit(dir / "c.tsp", data.substr(0, data.size() - 10));
  data = slurp(dir / "a.tsp");
  spit(dir / "c.tsp", data.substr(0, data.size() - 10));
  EXPECT_THROW(load_checkpoint(dir / "c.tsp"), DataError);
  spit(dir / "d.tsp", "XXXX" + data.substr(4));
  EXPECT_THROW(load_checkpoint(dir / "d.tsp"), DataError);
}

TEST(Manifest, RoundTrip) {
  const fs::path dir = tstest::scratch_dir("manifest");
  SceneDataset d;
  for (int i = 0; i < 3; ++i) {
    Camera cam = Camera::look_at(Vec3(0, 0, -4) + Vec3(i, 0, 0), Vec3::Zero(), Vec3(0, -1, 0), 30,
                                 31, 20, 10);
    cam.cx = 10.25;
    d.cameras.push_back(cam);
    Image img(20, 10, 3, 0.2 * i);
    write_image(img, dir / ("v" + std::to_string(i) + ".png"));
    d.image_paths.push_back((dir / ("v" + std::to_string(i) + ".png")).string());
    d.normal_paths.push_back("");
  }
  d.points = {Vec3(0, 0, 0), Vec3(0.5, 0.25, -0.125)};
  d.point_colors = {Vec3(1, 0, 0), Vec3(0, 0.5, 1)};
  d.test_views = {1};
  d.background = Vec3(0.85, 0.85, 0.85);
  write_manifest(d, dir / "manifest.json");
  const SceneDataset back = load_dataset(dir);
  ASSERT_EQ(back.cameras.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(back.cameras[i].fx, d.cameras[i].fx);
    EXPECT_EQ(back.cameras[i].cx, 10.25);
    EXPECT_NEAR((back.cameras[i].rotation - d.cameras[i].rotation).norm(), 0.0, 1e-15);
    EXPECT_EQ(back.cameras[i].translation, d.cameras[i].translation);
    EXPECT_NEAR(back.images[i].data[0], 0.2 * i, 0.5 / 255);
  }
  EXPECT_EQ(back.points, d.points);
  EXPECT_EQ(back.point_colors, d.point_colors);
  EXPECT_EQ(back.test_views, d.test_views);
  EXPECT_EQ(back.background, d.background);
  EXPECT_EQ(back.train_views(), (std::vector<int>{0, 2}));
}

TEST(Manifest, Errors) {
  const fs::path dir = tstest::scratch_dir("manifest_bad");
  spit(dir / "manifest.json", "{ \"format\": \"trisplat-scene\", \"version\": 1, ");
  EXPECT_THROW(load_dataset(dir), DataError);
  spit(dir / "manifest.json", R"({"format": "trisplat-scene", "version": 1, "views": [
    {"image": "missing.png", "width": 4, "height": 4, "fx": 1, "fy": 1, "cx": 2, "cy": 2,
     "rotation": [1,0,0,0,1,0,0,0,1], "translation": [0,0,0]}]})");
  EXPECT_THROW(load_dataset(dir), DataError);
  EXPECT_NO_THROW(load_dataset(dir, false));
  EXPECT_THROW(load_dataset(dir / "nope"), DataError);
}

TEST(Split, EveryEighth) {
  EXPECT_EQ(every_nth_split(20), (std::vector<int>{0, 8, 16}));
  EXPECT_EQ(every_nth_split(3), (std::vector<int>{0}));
}
