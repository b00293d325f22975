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

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "trisplat/error.hpp"
#include "trisplat/io.hpp"
#include "trisplat/sh.hpp"

namespace trisplat {

namespace {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little,
              "PLY writer assumes a little-endian host");

template <typename T>
void put(std::string& buf, T v) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  buf.append(bytes, sizeof(T));
}

std::uint8_t to_byte(double v) {
  if (!(v > 0.0)) return 0;
  if (v >= 1.0) return 255;
  return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

int type_size(const std::string& t) {
  if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
  if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
  if (t == "int" || t == "uint" || t == "float" || t == "int32" || t == "uint32" ||
      t == "float32") {
    return 4;
  }
  if (t == "double" || t == "float64") return 8;
  return 0;
}

double read_scalar(const char* p, const std::string& t) {
  auto get = [p]<typename T>(T) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    return static_cast<double>(v);
  };
  if (t == "char" || t == "int8") return get(std::int8_t{});
  if (t == "uchar" || t == "uint8") return get(std::uint8_t{});
  if (t == "short" || t == "int16") return get(std::int16_t{});
  if (t == "ushort" || t == "uint16") return get(std::uint16_t{});
  if (t == "int" || t == "int32") return get(std::int32_t{});
  if (t == "uint" || t == "uint32") return get(std::uint32_t{});
  if (t == "float" || t == "float32") return get(float{});
  return get(double{});
}

struct Property {
  std::string name;
  std::string type;
  std::string count_type;  // non-empty for list properties
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> props;
};

}  // namespace

void export_ply(const Scene& input, const fs::path& path, PlyColorMode mode) {
  Scene scene = input;
  compact(scene);
  const VertexSet& v = scene.vertices;
  std::ostringstream header;
  header << "ply\nformat binary_little_endian 1.0\ncomment trisplat mesh\n"
         << "element vertex " << v.size() << "\n"
         << "property float x\nproperty float y\nproperty float z\n"
         << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  if (mode == PlyColorMode::kShDc) {
    header << "property float f_dc_0\nproperty float f_dc_1\nproperty float f_dc_2\n";
  }
  header << "element face " << scene.triangles.size() << "\n"
         << "property list uchar int vertex_indices\nend_header\n";
  std::string buf = header.str();
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (int k = 0; k < 3; ++k) put(buf, static_cast<float>(v.positions[i][k]));
    const Vec3 c = sh_dc_color(v.sh[i]);
    for (int k = 0; k < 3; ++k) put(buf, to_byte(c[k]));
    if (mode == PlyColorMode::kShDc) {
      for (int k = 0; k < 3; ++k) put(buf, static_cast<float>(v.sh[i][k]));
    }
  }
  for (const TriangleIndices& t : scene.triangles.indices) {
    put(buf, std::uint8_t{3});
    for (int k = 0; k < 3; ++k) put(buf, static_cast<std::int32_t>(t[k]));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write PLY " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw DataError("write failed: " + path.string());
}

PlyMesh import_ply(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open PLY " + path.string());
  std::string line;
  int line_no = 0;
  auto next_line = [&]() {
    if (!std::getline(in, line)) throw ParseError(path.string(), line_no, "truncated header");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };
  next_line();
  if (line != "ply") throw ParseError(path.string(), line_no, "missing 'ply' magic");
  std::vector<Element> elements;
  while (true) {
    next_line();
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "end_header") break;
    if (kw == "comment" || kw == "obj_info" || kw.empty()) continue;
    if (kw == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt != "binary_little_endian") {
        throw ParseError(path.string(), line_no, "unsupported PLY format " + fmt);
      }
    } else if (kw == "element") {
      Element e;
      if (!(ls >> e.name >> e.count)) throw ParseError(path.string(), line_no, "bad element line");
      elements.push_back(e);
    } else if (kw == "property") {
      if (elements.empty()) throw ParseError(path.string(), line_no, "property before element");
      Property p;
      std::string t;
      ls >> t;
      if (t == "list") {
        ls >> p.count_type >> p.type;
      } else {
        p.type = t;
      }
      if (!(ls >> p.name) || type_size(p.type) == 0 ||
          (!p.count_type.empty() && type_size(p.count_type) == 0)) {
        throw ParseError(path.string(), line_no, "bad property line");
      }
      elements.back().props.push_back(p);
    } else {
      throw ParseError(path.string(), line_no, "unknown header keyword " + kw);
    }
  }

  PlyMesh mesh;
  std::vector<char> rec;
  auto read_bytes = [&](std::size_t n) {
    rec.resize(n);
    in.read(rec.data(), static_cast<std::streamsize>(n));
    if (in.gcount() != static_cast<std::streamsize>(n)) {
      throw DataError(path.string() + ": truncated PLY body");
    }
    return rec.data();
  };
  for (const Element& e : elements) {
    const bool is_vertex = e.name == "vertex";
    const bool is_face = e.name == "face";
    bool has_dc = false;
    for (const Property& p : e.props) has_dc |= p.name == "f_dc_0";
    for (std::size_t i = 0; i < e.count; ++i) {
      Vec3 pos = Vec3::Zero(), col = Vec3::Constant(0.5), dc = Vec3::Zero();
      for (const Property& p : e.props) {
        if (!p.count_type.empty()) {
          const int n = static_cast<int>(read_scalar(read_bytes(type_size(p.count_type)), p.count_type));
          const int sz = type_size(p.type);
          const char* data = read_bytes(static_cast<std::size_t>(n) * sz);
          if (is_face && (p.name == "vertex_indices" || p.name == "vertex_index")) {
            if (n != 3) throw DataError(path.string() + ": only triangle faces are supported");
            TriangleIndices t;
            for (int k = 0; k < 3; ++k) {
              const double idx = read_scalar(data + k * sz, p.type);
              if (idx < 0) throw DataError(path.string() + ": negative vertex index");
              t[k] = static_cast<std::uint32_t>(idx);
            }
            mesh.faces.push_back(t);
          }
          continue;
        }
        const double val = read_scalar(read_bytes(type_size(p.type)), p.type);
        if (!is_vertex) continue;
        const bool byte_color = type_size(p.type) == 1;
        if (p.name == "x") pos.x() = val;
        else if (p.name == "y") pos.y() = val;
        else if (p.name == "z") pos.z() = val;
        else if (p.name == "red") col.x() = byte_color ? val / 255.0 : val;
        else if (p.name == "green") col.y() = byte_color ? val / 255.0 : val;
        else if (p.name == "blue") col.z() = byte_color ? val / 255.0 : val;
        else if (p.name == "f_dc_0") dc.x() = val;
        else if (p.name == "f_dc_1") dc.y() = val;
        else if (p.name == "f_dc_2") dc.z() = val;
      }
      if (is_vertex) {
        mesh.positions.push_back(pos);
        mesh.colors.push_back(col);
        if (has_dc) mesh.sh_dc.push_back(dc);
      }
    }
  }
  for (const TriangleIndices& t : mesh.faces) {
    for (std::uint32_t idx : t) {
      if (idx >= mesh.positions.size()) {
        throw DataError(path.string() + ": face references vertex " + std::to_string(idx) +
                        " of " + std::to_string(mesh.positions.size()));
      }
    }
  }
  return mesh;
}

Scene scene_from_ply(const PlyMesh& mesh) {
  Scene s;
  s.vertices.reserve(mesh.positions.size());
  for (std::size_t i = 0; i < mesh.positions.size(); ++i) {
    ShCoeffs sh = sh_from_rgb(mesh.colors[i]);
    if (!mesh.sh_dc.empty()) {
      for (int k = 0; k < 3; ++k) sh[k] = mesh.sh_dc[i][k];
    }
    s.vertices.add(mesh.positions[i], sh, 0.0);
  }
  for (const TriangleIndices& t : mesh.faces) s.triangles.add(t);
  return s;
}

}  // namespace trisplat
