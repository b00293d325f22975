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

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "trisplat/config.hpp"
#include "trisplat/error.hpp"
#include "trisplat/extract.hpp"
#include "trisplat/io.hpp"
#include "trisplat/raster.hpp"
#include "trisplat/synthetic.hpp"
#include "trisplat/trainer.hpp"

namespace fs = std::filesystem;
using namespace trisplat;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

struct Shared {
  std::string config;
  std::optional<std::uint64_t> seed;
  bool deterministic = false;
  std::optional<int> threads;
  std::vector<std::string> overrides;
};

// File values first, then --set pairs, then the dedicated flags.
TrainConfig build_config(const Shared& sh, KeyValues extra, const std::string& base = {}) {
  KeyValues kv;
  if (!base.empty()) kv = parse_key_values(base, "checkpoint config");
  if (!sh.config.empty()) {
    for (const auto& [k, v] : read_config_file(sh.config)) kv[k] = v;
  }
  for (const std::string& o : sh.overrides) {
    for (const auto& [k, v] : parse_key_values(o, "--set")) kv[k] = v;
  }
  for (const auto& [k, v] : extra) kv[k] = v;
  if (sh.seed) kv["seed"] = std::to_string(*sh.seed);
  if (sh.threads) kv["threads"] = std::to_string(*sh.threads);
  if (sh.deterministic) kv["deterministic"] = "true";
  TrainConfig c;
  apply_config(c, kv);
  if (c.deterministic && c.threads <= 0) c.threads = 1;
  c.validate();
  return c;
}

void add_shared(CLI::App* app, Shared& sh) {
  app->add_option("--config", sh.config, "flat key=value config file (default: none)")
      ->check(CLI::ExistingFile);
  app->add_option("--seed", sh.seed, "random seed (default: 0)");
  app->add_flag("--deterministic", sh.deterministic,
                "fixed worker count (1 unless --threads is given) for reproducible runs");
  app->add_option("--threads", sh.threads, "worker threads, 0 = all cores (default: 0)")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--set", sh.overrides, "config override key=value (repeatable)");
}

std::vector<int> pick_views(const SceneDataset& data, const std::string& split) {
  if (split == "test") {
    return data.test_views.empty() ? data.train_views() : data.test_views;
  }
  if (split == "train") return data.train_views();
  std::vector<int> all(data.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return all;
}

Camera parse_pose(const std::string& text, int width, int height, double focal) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UsageError("--pose: '" + item + "' is not a number");
    }
  }
  if (v.size() != 6 && v.size() != 9) {
    throw UsageError("--pose expects eye x,y,z, target x,y,z and optionally up x,y,z");
  }
  const Vec3 up = v.size() == 9 ? Vec3(v[6], v[7], v[8]) : Vec3::UnitZ();
  return Camera::look_at(Vec3(v[0], v[1], v[2]), Vec3(v[3], v[4], v[5]), up, focal, focal,
                         width, height);
}

std::optional<fs::path> find_mask(const fs::path& dir, int view, const std::string& image) {
  char name[32];
  std::snprintf(name, sizeof(name), "view_%03d", view);
  const std::string stem = fs::path(image).stem().string();
  for (const std::string& base : {std::string(name), stem}) {
    for (const char* ext : {".png", ".pgm", ".ppm"}) {
      const fs::path p = dir / (base + ext);
      if (fs::exists(p)) return p;
    }
  }
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("trisplat");
  logger->set_pattern("[%H:%M:%S.%e] [%l] %v");
  spdlog::set_default_logger(logger);

  CLI::App app{"trisplat: differentiable opaque triangle splatting"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "trisplat 0.3.0");
  Shared sh;

  // train
  auto* train_cmd = app.add_subcommand("train", "optimize a triangle scene from a dataset");
  std::string data_path, out_dir, resume_path;
  std::optional<int> iters, aa_scale;
  train_cmd->add_option("--data", data_path, "manifest.json, its directory or a COLMAP text model")
      ->required();
  train_cmd->add_option("--out", out_dir, "output directory")->required();
  train_cmd->add_option("--iters", iters, "total iterations (default: 30000)")
      ->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--aa-scale", aa_scale, "supersampling factor (default: 2)");
  train_cmd->add_option("--resume", resume_path, "continue from a checkpoint")
      ->check(CLI::ExistingFile);
  add_shared(train_cmd, sh);

  // render
  auto* render_cmd = app.add_subcommand("render", "render a checkpoint");
  std::string ckpt_path, image_out, pose;
  std::optional<int> camera_index;
  int width = 128, height = 128;
  double focal = 110.0;
  render_cmd->add_option("--checkpoint", ckpt_path, "checkpoint file")->required()->check(CLI::ExistingFile);
  render_cmd->add_option("--data", data_path, "dataset providing cameras (with --camera-index)");
  auto* cam_opt = render_cmd->add_option("--camera-index", camera_index, "camera of --data");
  auto* pose_opt = render_cmd->add_option("--pose", pose, "look-at pose ex,ey,ez,tx,ty,tz[,ux,uy,uz]");
  cam_opt->excludes(pose_opt);
  render_cmd->add_option("--width", width, "image width for --pose (default: 128)");
  render_cmd->add_option("--height", height, "image height for --pose (default: 128)");
  render_cmd->add_option("--focal", focal, "focal length in pixels for --pose (default: 110)");
  render_cmd->add_option("--aa-scale", aa_scale, "supersampling factor (default: checkpoint config)");
  render_cmd->add_option("--out", image_out, "output image (.png or .ppm)")->required();
  add_shared(render_cmd, sh);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "PSNR/SSIM of a checkpoint on dataset views");
  std::string split = "test", table_out;
  eval_cmd->add_option("--checkpoint", ckpt_path, "checkpoint file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--data", data_path, "dataset")->required();
  eval_cmd->add_option("--split", split, "test, train or all (default: test)")
      ->check(CLI::IsMember({"test", "train", "all"}));
  eval_cmd->add_option("--out", table_out, "write the table as CSV");
  add_shared(eval_cmd, sh);

  // export-ply
  auto* ply_cmd = app.add_subcommand("export-ply", "write a checkpoint's mesh as PLY");
  std::string ply_out, color_mode = "vertex-color";
  ply_cmd->add_option("--checkpoint", ckpt_path, "checkpoint file")->required()->check(CLI::ExistingFile);
  ply_cmd->add_option("--out", ply_out, "output .ply")->required();
  ply_cmd->add_option("--mode", color_mode, "vertex-color or sh-dc (default: vertex-color)")
      ->check(CLI::IsMember({"vertex-color", "sh-dc"}));
  add_shared(ply_cmd, sh);

  // extract
  auto* ext_cmd = app.add_subcommand("extract", "extract or remove a masked object");
  std::string masks_dir, split_mode = "extract", ids_out;
  int min_views = 1;
  ext_cmd->add_option("--checkpoint", ckpt_path, "checkpoint file")->required()->check(CLI::ExistingFile);
  ext_cmd->add_option("--data", data_path, "dataset providing cameras")->required();
  ext_cmd->add_option("--masks", masks_dir, "directory of view_NNN.png or <image stem>.png masks")
      ->required()->check(CLI::ExistingDirectory);
  ext_cmd->add_option("--mode", split_mode, "extract or remove (default: extract)")
      ->check(CLI::IsMember({"extract", "remove"}));
  ext_cmd->add_option("--min-views", min_views, "views a triangle must win (default: 1)");
  ext_cmd->add_option("--out", ply_out, "output .ply")->required();
  ext_cmd->add_option("--ids-out", ids_out, "write the collected triangle ids, one per line");
  add_shared(ext_cmd, sh);

  // make-synthetic
  auto* syn_cmd = app.add_subcommand("make-synthetic", "generate a synthetic fixture");
  SyntheticOptions syn;
  std::string presets;
  for (const std::string& p : synthetic_presets()) presets += (presets.empty() ? "" : ", ") + p;
  syn_cmd->add_option("--preset", syn.preset, "one of: " + presets + " (default: two-objects)");
  syn_cmd->add_option("--out", out_dir, "output directory")->required();
  syn_cmd->add_option("--width", syn.width, "image width (default: preset)");
  syn_cmd->add_option("--height", syn.height, "image height (default: preset)");
  syn_cmd->add_option("--views", syn.views, "number of views (default: preset)");
  add_shared(syn_cmd, sh);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*train_cmd) {
      KeyValues extra;
      if (iters) extra["total_iters"] = std::to_string(*iters);
      if (aa_scale) extra["aa_scale"] = std::to_string(*aa_scale);
      std::optional<Checkpoint> resume;
      std::string base;
      if (!resume_path.empty()) {
        resume = load_checkpoint(resume_path);
        base = resume->config;
      }
      const TrainConfig config = build_config(sh, extra, base);
      const SceneDataset data = load_dataset(data_path);
      spdlog::info("event=start views={} test_views={} points={} iters={} threads={}",
                   data.size(), data.test_views.size(), data.points.size(), config.total_iters,
                   config.threads);
      TrainOutputs outputs{out_dir, true};
      const TrainResult r = train(data, config, outputs, resume ? &*resume : nullptr);
      spdlog::info("event=done psnr={:.3f} ssim={:.4f} verts={} tris={}", r.final_eval.mean_psnr,
                   r.final_eval.mean_ssim, r.final_eval.n_verts, r.final_eval.n_tris);
      std::ofstream(fs::path(out_dir) / "config.txt") << format_config(config);
      return kOk;
    }

    if (*render_cmd || *eval_cmd || *ply_cmd || *ext_cmd) {
      const Checkpoint ckpt = load_checkpoint(ckpt_path);
      KeyValues extra;
      if (aa_scale) extra["aa_scale"] = std::to_string(*aa_scale);
      const TrainConfig config = build_config(sh, extra, ckpt.config);
      const int iter = static_cast<int>(ckpt.iteration);

      if (*ply_cmd) {
        export_ply(ckpt.scene, ply_out,
                   color_mode == "sh-dc" ? PlyColorMode::kShDc : PlyColorMode::kVertexColor);
        return kOk;
      }

      if (*render_cmd) {
        Camera cam;
        Vec3 background = Vec3::Zero();
        if (camera_index) {
          if (data_path.empty()) throw UsageError("--camera-index needs --data");
          const SceneDataset data = load_dataset(data_path, false);
          if (*camera_index < 0 || static_cast<std::size_t>(*camera_index) >= data.size()) {
            throw UsageError("camera index " + std::to_string(*camera_index) + " out of range [0, " +
                             std::to_string(data.size()) + ")");
          }
          cam = data.cameras[*camera_index];
          background = data.background;
        } else if (!pose.empty()) {
          cam = parse_pose(pose, width, height, focal);
        } else {
          throw UsageError("render needs --camera-index or --pose");
        }
        const RenderSettings rs = eval_render_settings(config, iter, background);
        write_image(render_aa(ckpt.scene, cam, rs, config.aa_scale).color, image_out);
        return kOk;
      }

      const SceneDataset data = load_dataset(data_path, eval_cmd->parsed());
      if (*eval_cmd) {
        const std::vector<int> views = pick_views(data, split);
        const EvalTable t = evaluate(ckpt.scene, data, views,
                                     eval_render_settings(config, iter, data.background),
                                     config.aa_scale);
        const std::string table = format_eval_table(t);
        std::cout << table;
        if (!table_out.empty()) {
          std::ofstream out(table_out);
          if (!(out << table)) throw DataError("cannot write " + table_out);
        }
        return kOk;
      }

      // extract
      std::vector<Camera> cams;
      std::vector<Mask> masks;
      for (std::size_t i = 0; i < data.size(); ++i) {
        const auto p = find_mask(masks_dir, static_cast<int>(i), data.image_paths[i]);
        if (!p) continue;
        cams.push_back(data.cameras[i]);
        masks.push_back(read_mask(*p));
      }
      if (masks.empty()) throw DataError("no masks matching dataset views in " + masks_dir);
      ExtractOptions eo;
      eo.min_views = min_views;
      eo.threads = config.threads;
      const std::vector<std::uint32_t> ids = collect_triangles(ckpt.scene, cams, masks, eo);
      const Scene out = split_scene(ckpt.scene, ids,
                                    split_mode == "remove" ? SplitMode::kRemove : SplitMode::kExtract);
      export_ply(out, ply_out);
      if (!ids_out.empty()) {
        std::ofstream f(ids_out);
        for (std::uint32_t id : ids) f << id << "\n";
        if (!f) throw DataError("cannot write " + ids_out);
      }
      spdlog::info("event=extract masks={} collected={} kept_triangles={} kept_vertices={}",
                   masks.size(), ids.size(), out.triangles.size(), out.vertices.size());
      return kOk;
    }

    if (*syn_cmd) {
      if (sh.seed) syn.seed = *sh.seed;
      if (sh.threads) syn.threads = *sh.threads;
      const SyntheticFixture fx = make_synthetic(syn);
      write_synthetic(fx, out_dir);
      spdlog::info("event=make_synthetic preset={} views={} triangles={} out={}", fx.preset,
                   fx.dataset.size(), fx.ground_truth.triangles.size(), out_dir);
      return kOk;
    }
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    return kUsage;
  } catch (const NumericalError& e) {
    spdlog::error("numerical failure: {}", e.what());
    return kNumerical;
  } catch (const InvariantError& e) {
    spdlog::error("invariant violated: {}", e.what());
    return kNumerical;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kData;
  }
  return kUsage;
}
