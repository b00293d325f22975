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

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <sstream>
#include <string>

#include "trisplat/error.hpp"
#include "trisplat/io.hpp"

namespace trisplat {

namespace {

namespace fs = std::filesystem;

struct Line {
  int number;
  std::string text;
};

struct TextFile {
  std::vector<Line> lines;          // non-comment lines, blanks kept
  std::optional<std::size_t> declared;  // count from a "# Number of ..." header
};

TextFile read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  TextFile f;
  static const std::regex count_re(R"(#\s*Number of [A-Za-z0-9 ]+:\s*([0-9]+))");
  std::string s;
  int n = 0;
  while (std::getline(in, s)) {
    ++n;
    if (!s.empty() && s.back() == '\r') s.pop_back();
    const auto first = s.find_first_not_of(" \t");
    if (first != std::string::npos && s[first] == '#') {
      std::smatch m;
      if (std::regex_search(s, m, count_re)) f.declared = std::stoull(m[1].str());
      continue;
    }
    f.lines.push_back({n, s});
  }
  return f;
}

bool blank(const std::string& s) {
  return s.find_first_not_of(" \t") == std::string::npos;
}

template <typename T>
T field(std::istringstream& in, const fs::path& path, int line, const char* what) {
  T v{};
  if (!(in >> v)) throw ParseError(path.string(), line, std::string("expected ") + what);
  return v;
}

void check_count(const TextFile& f, std::size_t parsed, const fs::path& path) {
  if (f.declared && *f.declared != parsed) {
    throw DataError(path.string() + ": header declares " + std::to_string(*f.declared) +
                    " entries but " + std::to_string(parsed) + " were parsed");
  }
}

fs::path find_image_root(const fs::path& dir) {
  for (const fs::path& c : {dir / "images", dir.parent_path() / "images",
                            dir.parent_path().parent_path() / "images"}) {
    if (fs::is_directory(c)) return c;
  }
  return dir / "images";
}

}  // namespace

std::vector<int> SceneDataset::train_views() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < cameras.size(); ++i) {
    if (std::find(test_views.begin(), test_views.end(), static_cast<int>(i)) ==
        test_views.end()) {
      out.push_back(static_cast<int>(i));
    }
  }
  return out;
}

void SceneDataset::validate() const {
  if (cameras.empty()) throw DataError("dataset has no cameras");
  if (image_paths.size() != cameras.size()) {
    throw DataError("dataset image path count does not match camera count");
  }
  if (!images.empty() && images.size() != cameras.size()) {
    throw DataError("dataset image count does not match camera count");
  }
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i].width != cameras[i].width || images[i].height != cameras[i].height) {
      throw DataError("image " + image_paths[i] + " is " + std::to_string(images[i].width) +
                      "x" + std::to_string(images[i].height) + " but its camera expects " +
                      std::to_string(cameras[i].width) + "x" +
                      std::to_string(cameras[i].height));
    }
  }
  if (!point_colors.empty() && point_colors.size() != points.size()) {
    throw DataError("point color count does not match point count");
  }
  for (int v : test_views) {
    if (v < 0 || static_cast<std::size_t>(v) >= cameras.size()) {
      throw DataError("held-out view index out of range: " + std::to_string(v));
    }
  }
  for (const Camera& c : cameras) {
    try {
      c.validate();
    } catch (const Error& e) {
      throw DataError(std::string("invalid camera: ") + e.what());
    }
  }
}

std::vector<int> every_nth_split(std::size_t count, int n) {
  std::vector<int> out;
  for (std::size_t i = 0; i < count; i += static_cast<std::size_t>(n)) {
    out.push_back(static_cast<int>(i));
  }
  return out;
}

SceneDataset parse_colmap_text(const fs::path& dir, bool load_images) {
  struct Intrinsics {
    std::string model;
    int width, height;
    double fx, fy, cx, cy;
  };
  std::map<long long, Intrinsics> intrinsics;

  const fs::path cam_path = dir / "cameras.txt";
  const TextFile cams = read_text(cam_path);
  for (const Line& l : cams.lines) {
    if (blank(l.text)) continue;
    std::istringstream in(l.text);
    const auto id = field<long long>(in, cam_path, l.number, "camera id");
    Intrinsics k;
    k.model = field<std::string>(in, cam_path, l.number, "camera model");
    k.width = field<int>(in, cam_path, l.number, "width");
    k.height = field<int>(in, cam_path, l.number, "height");
    if (k.model == "SIMPLE_PINHOLE") {
      k.fx = k.fy = field<double>(in, cam_path, l.number, "focal length");
    } else if (k.model == "PINHOLE") {
      k.fx = field<double>(in, cam_path, l.number, "fx");
      k.fy = field<double>(in, cam_path, l.number, "fy");
    } else {
      throw DataError(cam_path.string() + ":" + std::to_string(l.number) +
                      ": unsupported camera model " + k.model +
                      " (supported: SIMPLE_PINHOLE, PINHOLE)");
    }
    k.cx = field<double>(in, cam_path, l.number, "cx");
    k.cy = field<double>(in, cam_path, l.number, "cy");
    if (k.width <= 0 || k.height <= 0) {
      throw ParseError(cam_path.string(), l.number, "non-positive image size");
    }
    intrinsics[id] = k;
  }
  check_count(cams, intrinsics.size(), cam_path);

  struct ImageEntry {
    std::string name;
    Camera cam;
  };
  std::vector<ImageEntry> entries;
  const fs::path img_path = dir / "images.txt";
  const TextFile imgs = read_text(img_path);
  for (std::size_t i = 0; i < imgs.lines.size(); ++i) {
    const Line& l = imgs.lines[i];
    if (blank(l.text)) continue;
    std::istringstream in(l.text);
    field<long long>(in, img_path, l.number, "image id");
    double q[4], t[3];
    for (double& v : q) v = field<double>(in, img_path, l.number, "quaternion component");
    for (double& v : t) v = field<double>(in, img_path, l.number, "translation component");
    const auto cam_id = field<long long>(in, img_path, l.number, "camera id");
    const auto name = field<std::string>(in, img_path, l.number, "image name");
    const auto it = intrinsics.find(cam_id);
    if (it == intrinsics.end()) {
      throw ParseError(img_path.string(), l.number,
                       "unknown camera id " + std::to_string(cam_id));
    }
    ImageEntry e;
    e.name = name;
    const Intrinsics& k = it->second;
    e.cam.fx = k.fx;
    e.cam.fy = k.fy;
    e.cam.cx = k.cx;
    e.cam.cy = k.cy;
    e.cam.width = k.width;
    e.cam.height = k.height;
    try {
      e.cam.rotation = quaternion_to_rotation(q[0], q[1], q[2], q[3]);
    } catch (const DataError& err) {
      throw ParseError(img_path.string(), l.number, err.what());
    }
    e.cam.translation = Vec3(t[0], t[1], t[2]);
    entries.push_back(std::move(e));
    ++i;  // the following line lists 2D observations; it may be blank
  }
  check_count(imgs, entries.size(), img_path);
  std::sort(entries.begin(), entries.end(),
            [](const ImageEntry& a, const ImageEntry& b) { return a.name < b.name; });

  SceneDataset data;
  const fs::path root = find_image_root(dir);
  for (ImageEntry& e : entries) {
    data.cameras.push_back(e.cam);
    data.image_paths.push_back((root / e.name).string());
    data.normal_paths.emplace_back();
  }

  const fs::path pts_path = dir / "points3D.txt";
  const TextFile pts = read_text(pts_path);
  for (const Line& l : pts.lines) {
    if (blank(l.text)) continue;
    std::istringstream in(l.text);
    field<long long>(in, pts_path, l.number, "point id");
    Vec3 p, c;
    for (int k = 0; k < 3; ++k) p[k] = field<double>(in, pts_path, l.number, "coordinate");
    for (int k = 0; k < 3; ++k) {
      const int v = field<int>(in, pts_path, l.number, "color channel");
      if (v < 0 || v > 255) throw ParseError(pts_path.string(), l.number, "color out of range");
      c[k] = v / 255.0;
    }
    data.points.push_back(p);
    data.point_colors.push_back(c);
  }
  check_count(pts, data.points.size(), pts_path);

  data.test_views = every_nth_split(data.cameras.size());
  if (load_images) {
    for (const std::string& p : data.image_paths) data.images.push_back(read_image(p));
  }
  data.validate();
  return data;
}

SceneDataset load_dataset(const fs::path& path, bool load_images) {
  if (!fs::exists(path)) throw DataError("dataset not found: " + path.string());
  if (fs::is_regular_file(path)) return read_manifest(path, load_images);
  if (fs::exists(path / "manifest.json")) return read_manifest(path / "manifest.json", load_images);
  if (fs::exists(path / "cameras.txt")) return parse_colmap_text(path, load_images);
  if (fs::exists(path / "sparse" / "0" / "cameras.txt")) {
    return parse_colmap_text(path / "sparse" / "0", load_images);
  }
  throw DataError("no manifest.json or COLMAP text model under " + path.string());
}

}  // namespace trisplat
