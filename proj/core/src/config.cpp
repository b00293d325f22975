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

#include "trisplat/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "trisplat/error.hpp"

namespace trisplat {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) {
    throw UsageError("config key '" + key + "': expected a number, got '" + v + "'");
  }
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw UsageError("config key '" + key + "': expected an integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw UsageError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

struct Field {
  const char* key;
  std::function<void(TrainConfig&, const std::string&)> set;
  std::function<std::string(const TrainConfig&)> get;
};

#define TS_DOUBLE(name, member)                                                  \
  Field {                                                                        \
    name, [](TrainConfig& c, const std::string& v) { c.member = to_double(name, v); }, \
        [](const TrainConfig& c) { return fmt(c.member); }                       \
  }
#define TS_INT(name, member)                                                     \
  Field {                                                                        \
    name,                                                                        \
        [](TrainConfig& c, const std::string& v) {                               \
          c.member = static_cast<decltype(c.member)>(to_int(name, v));           \
        },                                                                       \
        [](const TrainConfig& c) { return std::to_string(c.member); }            \
  }
#define TS_BOOL(name, member)                                                    \
  Field {                                                                        \
    name, [](TrainConfig& c, const std::string& v) { c.member = to_bool(name, v); }, \
        [](const TrainConfig& c) { return std::string(c.member ? "true" : "false"); } \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      TS_INT("total_iters", total_iters),
      TS_INT("seed", seed),
      TS_INT("threads", threads),
      TS_BOOL("deterministic", deterministic),
      TS_INT("aa_scale", aa_scale),
      TS_INT("eval_interval", eval_interval),
      TS_INT("checkpoint_interval", checkpoint_interval),
      TS_BOOL("use_normal_prior", use_normal_prior),
      TS_DOUBLE("near_plane", near_plane),
      TS_DOUBLE("lr_position", lr.position),
      TS_DOUBLE("lr_position_final", lr.position_final),
      TS_DOUBLE("lr_position_scale", lr.position_scale),
      TS_DOUBLE("lr_sh_dc", lr.sh_dc),
      TS_DOUBLE("lr_sh_rest", lr.sh_rest),
      TS_DOUBLE("lr_opacity", lr.opacity),
      TS_DOUBLE("adam_beta1", adam.beta1),
      TS_DOUBLE("adam_beta2", adam.beta2),
      TS_DOUBLE("adam_epsilon", adam.epsilon),
      TS_DOUBLE("lambda_dssim", loss.lambda),
      TS_DOUBLE("beta_opacity", loss.beta1),
      TS_DOUBLE("beta_normal", loss.beta2),
      TS_DOUBLE("sigma_start", schedule.sigma_start),
      TS_DOUBLE("sigma_end", schedule.sigma_end),
      TS_BOOL("anneal_floor", schedule.anneal_floor),
      TS_INT("floor_start_iter", schedule.floor_start_iter),
      TS_INT("floor_end_iter", schedule.floor_end_iter),
      TS_DOUBLE("floor_end", schedule.floor_end),
      TS_BOOL("hard_prune", schedule.hard_prune),
      TS_INT("hard_prune_iter", schedule.hard_prune_iter),
      TS_DOUBLE("hard_prune_threshold", schedule.hard_prune_threshold),
      TS_BOOL("blend_prune", schedule.blend_prune),
      TS_DOUBLE("tau_prune", schedule.tau_prune),
      TS_INT("prune_interval", schedule.prune_interval),
      TS_INT("densify_interval", schedule.densify_interval),
      TS_INT("densify_start", schedule.densify_start),
      TS_INT("densify_end", schedule.densify_end),
      TS_DOUBLE("densify_rate", schedule.densify_rate),
      TS_INT("max_triangles", schedule.max_triangles),
      TS_INT("final_opaque_iters", schedule.final_opaque_iters),
  };
  return f;
}

#undef TS_DOUBLE
#undef TS_INT
#undef TS_BOOL

}  // namespace

GroupRates LearningRates::at(int iter, int total) const {
  GroupRates r;
  const double t = total > 0 ? std::clamp(static_cast<double>(iter) / total, 0.0, 1.0) : 1.0;
  r.lr[kGroupPosition] =
      position_scale * std::exp((1.0 - t) * std::log(position) + t * std::log(position_final));
  r.lr[kGroupShDc] = sh_dc;
  r.lr[kGroupShRest] = sh_rest;
  r.lr[kGroupOpacity] = opacity;
  return r;
}

void LearningRates::validate() const {
  if (!(position > 0 && position_final > 0 && position_scale > 0 && sh_dc > 0 &&
        sh_rest > 0 && opacity > 0)) {
    throw UsageError("all learning rates must be positive");
  }
}

void TrainConfig::validate() const {
  if (total_iters < 0) throw UsageError("total_iters must be >= 0");
  if (schedule.total_iters != total_iters) {
    throw UsageError("schedule length does not match total_iters");
  }
  lr.validate();
  adam.validate();
  loss.validate();
  schedule.validate();
  if (aa_scale < 1 || aa_scale > 8) throw UsageError("aa_scale must lie in [1, 8]");
  if (eval_interval < 0 || checkpoint_interval < 0) {
    throw UsageError("eval and checkpoint intervals must be >= 0");
  }
  if (!(near_plane > 0.0)) throw UsageError("near_plane must be positive");
}

KeyValues parse_key_values(std::string_view text, const std::string& origin) {
  KeyValues out;
  std::size_t start = 0;
  int line_no = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw UsageError(origin + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw UsageError(origin + ":" + std::to_string(line_no) + ": empty key");
    out[key] = value;
  }
  return out;
}

KeyValues read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return parse_key_values(s.str(), path.string());
}

void apply_config(TrainConfig& config, const KeyValues& values) {
  if (const auto it = values.find("total_iters"); it != values.end()) {
    const long long total = to_int("total_iters", it->second);
    if (total < 0) throw UsageError("total_iters must be >= 0");
    const TrainSchedule old = config.schedule;
    config.total_iters = static_cast<int>(total);
    config.schedule = TrainSchedule::for_total(config.total_iters);
    // Non-landmark settings carry over.
    config.schedule.sigma_start = old.sigma_start;
    config.schedule.sigma_end = old.sigma_end;
    config.schedule.anneal_floor = old.anneal_floor;
    config.schedule.floor_end = old.floor_end;
    config.schedule.hard_prune = old.hard_prune;
    config.schedule.hard_prune_threshold = old.hard_prune_threshold;
    config.schedule.blend_prune = old.blend_prune;
    config.schedule.tau_prune = old.tau_prune;
    config.schedule.densify_rate = old.densify_rate;
    config.schedule.max_triangles = old.max_triangles;
  }
  for (const auto& [key, value] : values) {
    if (key == "total_iters") continue;
    bool found = false;
    for (const Field& f : fields()) {
      if (key == f.key) {
        f.set(config, value);
        found = true;
        break;
      }
    }
    if (!found) throw UsageError("unknown config key '" + key + "'");
  }
  config.schedule.total_iters = config.total_iters;
}

std::string format_config(const TrainConfig& config) {
  std::string out;
  for (const Field& f : fields()) {
    out += f.key;
    out += '=';
    out += f.get(config);
    out += '\n';
  }
  return out;
}

}  // namespace trisplat
