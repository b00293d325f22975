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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "trisplat/config.hpp"
#include "trisplat/io.hpp"
#include "trisplat/lifecycle.hpp"
#include "trisplat/optimizer.hpp"
#include "trisplat/raster.hpp"
#include "trisplat/scene.hpp"

namespace trisplat {

// Logit whose mapped opacity is exactly 1.0 in double precision.
inline constexpr double kOpaqueLogit = 40.0;

struct MetricsRow {
  int iter = 0;
  double loss = 0.0;  // mean training loss since the previous row
  double psnr = 0.0;  // held-out mean
  double ssim = 0.0;
  std::size_t n_verts = 0;
  std::size_t n_tris = 0;
  double sigma = 0.0;
  double floor = 0.0;
};

struct EvalRow {
  int view = 0;
  double psnr = 0.0;
  double ssim = 0.0;
};

struct EvalTable {
  std::vector<EvalRow> rows;
  double mean_psnr = 0.0;
  double mean_ssim = 0.0;
  std::size_t n_verts = 0;
  std::size_t n_tris = 0;
};

// Settings for evaluation renders after `iter` completed iterations:
// final-schedule sigma, the floor at `iter`, opacity forced to one in the
// final phase and once training has finished.
RenderSettings eval_render_settings(const TrainConfig& config, int iter,
                                    const Vec3& background);

EvalTable evaluate(const Scene& scene, const SceneDataset& data, std::span<const int> views,
                   const RenderSettings& settings, int aa_scale);

void write_metrics_csv(std::span<const MetricsRow> rows, const std::filesystem::path& path);
std::string format_eval_table(const EvalTable& table);

class Trainer {
 public:
  Trainer(const SceneDataset& data, TrainConfig config);

  // Delaunay initialization from the dataset's sparse points.
  void init_from_points();
  void init_from_scene(Scene scene);
  void restore(const Checkpoint& ckpt);
  Checkpoint checkpoint() const;

  int iteration() const { return iter_; }
  bool done() const { return iter_ >= config_.total_iters; }
  const Scene& scene() const { return scene_; }
  const TrainConfig& config() const { return config_; }
  const std::vector<MetricsRow>& metrics() const { return metrics_; }
  const std::optional<PruneReport>& hard_prune_report() const { return hard_prune_report_; }

  // One optimization iteration plus any lifecycle event it triggers.
  // Returns the training loss. Throws NumericalError on non-finite values.
  double step();

  RenderSettings eval_settings() const;
  EvalTable evaluate_now() const;
  MetricsRow log_row();

  // Snaps every opacity to exactly one when the schedule anneals the floor.
  void finalize();

  std::function<void(const std::string&)> log = nullptr;

 private:
  bool final_phase(int iter) const;
  RenderSettings train_settings(int iter) const;
  int next_view();
  void after_structure_change(const CompactionMap& map);
  void run_lifecycle();
  void emit(const std::string& line) const;
  const Image& normal_prior(int view);

  const SceneDataset& data_;
  TrainConfig config_;
  Scene scene_;
  Adam adam_;
  std::mt19937_64 rng_;
  int iter_ = 0;
  std::vector<std::uint32_t> view_order_;
  std::size_t view_cursor_ = 0;
  std::vector<double> max_weights_;
  std::vector<std::uint8_t> protected_;
  std::uint64_t window_iters_ = 0;  // iterations folded into max_weights_
  double loss_sum_ = 0.0;
  std::uint64_t loss_count_ = 0;
  std::vector<MetricsRow> metrics_;
  std::optional<PruneReport> hard_prune_report_;
  std::vector<std::optional<Image>> priors_;
};

struct TrainOutputs {
  std::filesystem::path dir;  // empty: write nothing
  bool write_ply = true;
};

struct TrainResult {
  Scene scene;
  std::vector<MetricsRow> metrics;
  EvalTable final_eval;
  std::optional<PruneReport> hard_prune;
};

// Full run from the sparse points (or from `resume`). With an output
// directory this writes metrics.csv, final.tsp, final.ply and periodic
// checkpoints; on a numerical failure a crash.tsp dump is written first.
TrainResult train(const SceneDataset& data, const TrainConfig& config,
                  const TrainOutputs& outputs = {}, const Checkpoint* resume = nullptr,
                  std::function<void(const std::string&)> log = nullptr);

}  // namespace trisplat
