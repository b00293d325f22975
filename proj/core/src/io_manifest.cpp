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
#include <json.hpp>

#include "trisplat/error.hpp"
#include "trisplat/io.hpp"

namespace trisplat {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kManifestFormat = "trisplat-scene";
constexpr int kManifestVersion = 1;

Vec3 vec3(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) throw DataError(what + " must be a 3-element array");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

std::string resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return p;
  const fs::path path(p);
  return path.is_absolute() ? p : (base / path).lexically_normal().string();
}

}  // namespace

SceneDataset read_manifest(const fs::path& path, bool load_images) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  const fs::path base = path.parent_path();
  SceneDataset data;
  try {
    if (j.value("format", std::string()) != kManifestFormat) {
      throw DataError("not a trisplat scene manifest (format field)");
    }
    const int version = j.value("version", 0);
    if (version != kManifestVersion) {
      throw DataError("unsupported manifest version " + std::to_string(version));
    }
    if (j.contains("background")) data.background = vec3(j["background"], "background");
    const json& views = j.at("views");
    for (std::size_t i = 0; i < views.size(); ++i) {
      const json& v = views[i];
      Camera c;
      c.width = v.at("width").get<int>();
      c.height = v.at("height").get<int>();
      c.fx = v.at("fx").get<double>();
      c.fy = v.at("fy").get<double>();
      c.cx = v.at("cx").get<double>();
      c.cy = v.at("cy").get<double>();
      const json& r = v.at("rotation");
      if (!r.is_array() || r.size() != 9) throw DataError("rotation must have 9 entries");
      for (int k = 0; k < 9; ++k) c.rotation(k / 3, k % 3) = r[k].get<double>();
      c.translation = vec3(v.at("translation"), "translation");
      data.cameras.push_back(c);
      data.image_paths.push_back(resolve(base, v.at("image").get<std::string>()));
      data.normal_paths.push_back(resolve(base, v.value("normal_prior", std::string())));
      const std::string split = v.value("split", std::string("train"));
      if (split == "test") {
        data.test_views.push_back(static_cast<int>(i));
      } else if (split != "train") {
        throw DataError("view " + std::to_string(i) + ": unknown split '" + split + "'");
      }
    }
    if (j.contains("points")) {
      for (const json& p : j["points"]) data.points.push_back(vec3(p, "point"));
    }
    if (j.contains("point_colors")) {
      for (const json& p : j["point_colors"]) data.point_colors.push_back(vec3(p, "point color"));
    }
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  } catch (const ParseError&) {
    throw;
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  if (load_images) {
    for (const std::string& p : data.image_paths) data.images.push_back(read_image(p));
  }
  data.validate();
  return data;
}

void write_manifest(const SceneDataset& data, const fs::path& path) {
  json j;
  j["format"] = kManifestFormat;
  j["version"] = kManifestVersion;
  j["background"] = to_json(data.background);
  const fs::path base = path.parent_path();
  json views = json::array();
  for (std::size_t i = 0; i < data.cameras.size(); ++i) {
    const Camera& c = data.cameras[i];
    json v;
    fs::path img(data.image_paths[i]);
    v["image"] = img.is_absolute() ? img.lexically_relative(base).string() : img.string();
    v["width"] = c.width;
    v["height"] = c.height;
    v["fx"] = c.fx;
    v["fy"] = c.fy;
    v["cx"] = c.cx;
    v["cy"] = c.cy;
    json r = json::array();
    for (int k = 0; k < 9; ++k) r.push_back(c.rotation(k / 3, k % 3));
    v["rotation"] = r;
    v["translation"] = to_json(c.translation);
    if (i < data.normal_paths.size() && !data.normal_paths[i].empty()) {
      v["normal_prior"] = data.normal_paths[i];
    }
    const bool test = std::find(data.test_views.begin(), data.test_views.end(),
                                static_cast<int>(i)) != data.test_views.end();
    v["split"] = test ? "test" : "train";
    views.push_back(v);
  }
  j["views"] = views;
  json pts = json::array();
  for (const Vec3& p : data.points) pts.push_back(to_json(p));
  j["points"] = pts;
  if (!data.point_colors.empty()) {
    json cols = json::array();
    for (const Vec3& p : data.point_colors) cols.push_back(to_json(p));
    j["point_colors"] = cols;
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write manifest " + path.string());
  out << j.dump(1) << "\n";
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace trisplat
