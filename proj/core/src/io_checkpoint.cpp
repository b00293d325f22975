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

#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "trisplat/error.hpp"
#include "trisplat/io.hpp"

namespace trisplat {

namespace {

namespace fs = std::filesystem;

constexpr char kMagic[4] = {'T', 'S', 'P', '2'};

static_assert(sizeof(Vec3) == 3 * sizeof(double));

class Writer {
 public:
  template <typename T>
  void pod(const T& v) {
    const char* p = reinterpret_cast<const char*>(&v);
    buf_.append(p, sizeof(T));
  }
  template <typename T>
  void array(const std::vector<T>& v) {
    pod<std::uint64_t>(v.size());
    buf_.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(T));
  }
  void string(const std::string& s) {
    pod<std::uint64_t>(s.size());
    buf_.append(s);
  }
  std::string take() { return std::move(buf_); }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(const std::string& data, std::string context)
      : data_(data), context_(std::move(context)) {}

  template <typename T>
  T pod() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  template <typename T>
  std::vector<T> array() {
    const auto n = pod<std::uint64_t>();
    if (n > (data_.size() - pos_) / sizeof(T)) fail("array length exceeds section");
    std::vector<T> v(n);
    std::memcpy(static_cast<void*>(v.data()), data_.data() + pos_, n * sizeof(T));
    pos_ += n * sizeof(T);
    return v;
  }
  std::string string() {
    const auto n = pod<std::uint64_t>();
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  void expect_end() const {
    if (pos_ != data_.size()) fail("trailing bytes in section");
  }

 private:
  void need(std::size_t n) const {
    if (n > data_.size() - pos_) fail("section truncated");
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw DataError(context_ + ": " + what);
  }

  const std::string& data_;
  std::string context_;
  std::size_t pos_ = 0;
};

using Sections = std::map<std::string, std::string>;

std::string pack_meta(const Checkpoint& c) {
  Writer w;
  w.pod(c.iteration);
  w.pod(c.sigma);
  w.pod(c.floor);
  w.pod(c.view_cursor);
  w.pod(c.loss_sum);
  w.pod(c.loss_count);
  return w.take();
}

std::string pack_vertices(const VertexSet& v) {
  Writer w;
  w.array(v.positions);
  w.array(v.sh);
  w.array(v.opacity_logit);
  w.array(v.active);
  return w.take();
}

std::string pack_triangles(const TriangleSet& t) {
  Writer w;
  w.array(t.indices);
  w.array(t.active);
  return w.take();
}

std::string pack_adam(const AdamState& a) {
  Writer w;
  w.pod(a.steps);
  for (int g = 0; g < kGroupCount; ++g) {
    w.array(a.m[g]);
    w.array(a.v[g]);
  }
  return w.take();
}

std::string pack_train(const Checkpoint& c) {
  Writer w;
  w.string(c.rng_state);
  w.array(c.view_order);
  w.array(c.max_weights);
  w.pod(c.window_iters);
  w.array(c.protected_tris);
  return w.take();
}

std::string pack_config(const Checkpoint& c) {
  Writer w;
  w.string(c.config);
  return w.take();
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const fs::path& path) {
  const std::vector<std::pair<std::string, std::string>> sections = {
      {"META", pack_meta(ckpt)},          {"VERT", pack_vertices(ckpt.scene.vertices)},
      {"TRIS", pack_triangles(ckpt.scene.triangles)}, {"ADAM", pack_adam(ckpt.adam)},
      {"TRAN", pack_train(ckpt)},         {"CONF", pack_config(ckpt)}};
  Writer w;
  for (char c : kMagic) w.pod(c);
  w.pod(kCheckpointVersion);
  w.pod(static_cast<std::uint32_t>(sections.size()));
  std::string out = w.take();
  for (const auto& [tag, payload] : sections) {
    out.append(tag);
    Writer len;
    len.pod<std::uint64_t>(payload.size());
    out.append(len.take());
    out.append(payload);
  }
  // Write to a sibling file and rename so an interrupted save never leaves
  // a truncated checkpoint behind.
  const fs::path tmp = fs::path(path.string() + ".tmp");
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw DataError("cannot write checkpoint " + tmp.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw DataError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw DataError("cannot move checkpoint into place at " + path.string() + ": " + ec.message());
}

Checkpoint load_checkpoint(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  const std::string data = ss.str();
  Reader head(data, path.string());
  char magic[4];
  for (char& c : magic) c = head.pod<char>();
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw DataError(path.string() + ": not a trisplat checkpoint (bad magic)");
  }
  const auto version = head.pod<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw DataError(path.string() + ": checkpoint version " + std::to_string(version) +
                    " is not supported (expected " + std::to_string(kCheckpointVersion) + ")");
  }
  const auto count = head.pod<std::uint32_t>();
  Sections sections;
  std::size_t pos = 12;
  for (std::uint32_t s = 0; s < count; ++s) {
    if (data.size() - pos < 12) throw DataError(path.string() + ": truncated section table");
    const std::string tag = data.substr(pos, 4);
    std::uint64_t len;
    std::memcpy(&len, data.data() + pos + 4, 8);
    pos += 12;
    if (len > data.size() - pos) throw DataError(path.string() + ": section " + tag + " truncated");
    sections[tag] = data.substr(pos, len);
    pos += len;
  }
  if (pos != data.size()) throw DataError(path.string() + ": trailing bytes after sections");
  auto section = [&](const char* tag) -> const std::string& {
    const auto it = sections.find(tag);
    if (it == sections.end()) throw DataError(path.string() + ": missing section " + tag);
    return it->second;
  };

  Checkpoint c;
  {
    Reader r(section("META"), path.string() + " [META]");
    c.iteration = r.pod<std::int64_t>();
    c.sigma = r.pod<double>();
    c.floor = r.pod<double>();
    c.view_cursor = r.pod<std::uint64_t>();
    c.loss_sum = r.pod<double>();
    c.loss_count = r.pod<std::uint64_t>();
    r.expect_end();
  }
  {
    Reader r(section("VERT"), path.string() + " [VERT]");
    c.scene.vertices.positions = r.array<Vec3>();
    c.scene.vertices.sh = r.array<ShCoeffs>();
    c.scene.vertices.opacity_logit = r.array<double>();
    c.scene.vertices.active = r.array<std::uint8_t>();
    r.expect_end();
  }
  {
    Reader r(section("TRIS"), path.string() + " [TRIS]");
    c.scene.triangles.indices = r.array<TriangleIndices>();
    c.scene.triangles.active = r.array<std::uint8_t>();
    r.expect_end();
  }
  {
    Reader r(section("ADAM"), path.string() + " [ADAM]");
    c.adam.steps = r.pod<std::uint64_t>();
    for (int g = 0; g < kGroupCount; ++g) {
      c.adam.m[g] = r.array<double>();
      c.adam.v[g] = r.array<double>();
    }
    r.expect_end();
  }
  {
    Reader r(section("TRAN"), path.string() + " [TRAN]");
    c.rng_state = r.string();
    c.view_order = r.array<std::uint32_t>();
    c.max_weights = r.array<double>();
    c.window_iters = r.pod<std::uint64_t>();
    c.protected_tris = r.array<std::uint8_t>();
    r.expect_end();
  }
  {
    Reader r(section("CONF"), path.string() + " [CONF]");
    c.config = r.string();
    r.expect_end();
  }
  try {
    validate(c.scene);
  } catch (const InvariantError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return c;
}

}  // namespace trisplat
