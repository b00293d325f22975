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

#include "trisplat/trainer.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "trisplat/delaunay.hpp"
#include "trisplat/error.hpp"
#include "trisplat/grad.hpp"
#include "trisplat/losses.hpp"

namespace trisplat {

namespace fs = std::filesystem;

EvalTable evaluate(const Scene& scene, const SceneDataset& data, std::span<const int> views,
                   const RenderSettings& settings, int aa_scale) {
  if (data.images.size() != data.cameras.size()) {
    throw DataError("evaluation needs loaded images");
  }
  EvalTable t;
  for (int v : views) {
    const RenderOutput out = render_aa(scene, data.cameras[v], settings, aa_scale);
    EvalRow row;
    row.view = v;
    row.psnr = psnr(out.color, data.images[v]);
    row.ssim = ssim(out.color, data.images[v]);
    t.rows.push_back(row);
    t.mean_psnr += row.psnr;
    t.mean_ssim += row.ssim;
  }
  if (!t.rows.empty()) {
    t.mean_psnr /= t.rows.size();
    t.mean_ssim /= t.rows.size();
  }
  t.n_verts = scene.vertices.active_count();
  t.n_tris = scene.triangles.active_count();
  return t;
}

void write_metrics_csv(std::span<const MetricsRow> rows, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "iter,loss,psnr,ssim,n_verts,n_tris,sigma,floor\n";
  char buf[256];
  for (const MetricsRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.9g,%.6f,%.6f,%zu,%zu,%.6g,%.6g\n", r.iter, r.loss,
                  r.psnr, r.ssim, r.n_verts, r.n_tris, r.sigma, r.floor);
    out << buf;
  }
  if (!out) throw DataError("write failed: " + path.string());
}

std::string format_eval_table(const EvalTable& t) {
  std::ostringstream os;
  char buf[128];
  os << "view,psnr,ssim\n";
  for (const EvalRow& r : t.rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.4f,%.5f\n", r.view, r.psnr, r.ssim);
    os << buf;
  }
  std::snprintf(buf, sizeof(buf), "mean,%.4f,%.5f\n", t.mean_psnr, t.mean_ssim);
  os << buf << "n_verts," << t.n_verts << "\nn_tris," << t.n_tris << "\n";
  return os.str();
}

Trainer::Trainer(const SceneDataset& data, TrainConfig config)
    : data_(data), config_(std::move(config)), adam_(config_.adam), rng_(config_.seed) {
  config_.schedule.total_iters = config_.total_iters;
  config_.validate();
  if (config_.deterministic && config_.threads <= 0) config_.threads = 1;
  data_.validate();
  if (data_.images.size() != data_.cameras.size()) {
    throw DataError("training needs one loaded image per camera");
  }
  if (data_.train_views().empty()) throw DataError("dataset has no training views");
  priors_.resize(data_.size());
}

void Trainer::init_from_points() {
  if (data_.points.size() < 4) {
    throw DataError("initialization needs at least 4 sparse points, dataset has " +
                    std::to_string(data_.points.size()));
  }
  init_from_scene(build_initial_scene(data_.points, data_.point_colors, config_.seed));
}

void Trainer::init_from_scene(Scene scene) {
  scene_ = std::move(scene);
  validate(scene_);
  adam_.state() = AdamState{};
  adam_.state().resize(scene_.vertices.size());
  max_weights_.assign(scene_.triangles.size(), 0.0);
  protected_.assign(scene_.triangles.size(), 0);
  window_iters_ = 0;
  iter_ = 0;
  emit("event=init triangles=" + std::to_string(scene_.triangles.active_count()) +
       " vertices=" + std::to_string(scene_.vertices.active_count()));
}

void Trainer::restore(const Checkpoint& c) {
  scene_ = c.scene;
  adam_.state() = c.adam;
  std::istringstream rs(c.rng_state);
  rs >> rng_;
  if (!rs) throw DataError("checkpoint holds an invalid RNG state");
  iter_ = static_cast<int>(c.iteration);
  view_order_ = c.view_order;
  view_cursor_ = c.view_cursor;
  max_weights_ = c.max_weights;
  window_iters_ = c.window_iters;
  protected_ = c.protected_tris;
  loss_sum_ = c.loss_sum;
  loss_count_ = c.loss_count;
  max_weights_.resize(scene_.triangles.size(), 0.0);
  protected_.resize(scene_.triangles.size(), 0);
  for (std::uint32_t v : view_order_) {
    if (v >= data_.size()) throw DataError("checkpoint view order does not fit the dataset");
  }
}

Checkpoint Trainer::checkpoint() const {
  Checkpoint c;
  c.iteration = iter_;
  c.sigma = sigma_at(config_.schedule, iter_);
  c.floor = floor_at(config_.schedule, iter_);
  c.loss_sum = loss_sum_;
  c.loss_count = loss_count_;
  c.scene = scene_;
  c.adam = adam_.state();
  std::ostringstream rs;
  rs << rng_;
  c.rng_state = rs.str();
  c.view_order = view_order_;
  c.view_cursor = view_cursor_;
  c.max_weights = max_weights_;
  c.window_iters = window_iters_;
  c.protected_tris = protected_;
  c.config = format_config(config_);
  return c;
}

namespace {

bool in_final_phase(const TrainConfig& c, int iter) {
  const TrainSchedule& s = c.schedule;
  return s.anneal_floor && s.final_opaque_iters > 0 &&
         iter >= c.total_iters - s.final_opaque_iters;
}

RenderSettings settings_at(const TrainConfig& c, int iter, const Vec3& background) {
  RenderSettings rs;
  rs.sigma = sigma_at(c.schedule, iter);
  rs.opacity_floor = floor_at(c.schedule, iter);
  rs.force_opaque = in_final_phase(c, iter);
  rs.background = background;
  rs.near_plane = c.near_plane;
  rs.threads = c.threads;
  return rs;
}

}  // namespace

RenderSettings eval_render_settings(const TrainConfig& config, int iter,
                                    const Vec3& background) {
  RenderSettings rs = settings_at(config, iter, background);
  rs.sigma = config.schedule.sigma_end;
  if (iter >= config.total_iters && config.schedule.anneal_floor) rs.force_opaque = true;
  return rs;
}

bool Trainer::final_phase(int iter) const { return in_final_phase(config_, iter); }

RenderSettings Trainer::train_settings(int iter) const {
  return settings_at(config_, iter, data_.background);
}

RenderSettings Trainer::eval_settings() const {
  return eval_render_settings(config_, iter_, data_.background);
}

int Trainer::next_view() {
  if (view_cursor_ >= view_order_.size()) {
    const std::vector<int> train = data_.train_views();
    view_order_.assign(train.begin(), train.end());
    std::shuffle(view_order_.begin(), view_order_.end(), rng_);
    view_cursor_ = 0;
  }
  return static_cast<int>(view_order_[view_cursor_++]);
}

const Image& Trainer::normal_prior(int view) {
  if (!priors_[view]) {
    priors_[view] = prior_normals_to_world(read_image(data_.normal_paths[view]),
                                           data_.cameras[view]);
  }
  return *priors_[view];
}

void Trainer::emit(const std::string& line) const {
  if (log) {
    log(line);
  } else {
    spdlog::info("{}", line);
  }
}

double Trainer::step() {
  if (done()) throw UsageError("training already finished");
  const int it = iter_;
  const int aa = config_.aa_scale;
  RenderSettings rs = train_settings(it);
  const int view = next_view();
  const Camera& cam = data_.cameras[view];
  const Camera hi = cam.scaled(aa);
  const bool normals = config_.use_normal_prior && config_.loss.beta2 > 0.0 &&
                       !data_.normal_paths[view].empty();
  rs.with_normals = normals;

  const FrameSetup setup = prepare_frame(scene_, hi, rs);
  const RenderOutput out = render_frame(setup, rs);
  const Image pred = aa > 1 ? downsample_box(out.color, aa) : out.color;
  PhotometricLoss pl = loss_backward(pred, data_.images[view], config_.loss);
  double total = pl.total;
  const Image d_color = aa > 1 ? downsample_box_adjoint(pl.grad, aa) : pl.grad;

  Image d_normals;
  if (normals) {
    const Image acc = aa > 1 ? downsample_box(out.normals, aa) : out.normals;
    NormalLossResult nl = normal_loss_backward(acc, normal_prior(view), {});
    total += config_.loss.beta2 * nl.value;
    for (double& g : nl.grad.data) g *= config_.loss.beta2;
    d_normals = aa > 1 ? downsample_box_adjoint(nl.grad, aa) : nl.grad;
  }

  GradientBuffer grads;
  grads.resize(scene_.vertices.size());
  backward(scene_, hi, rs, setup, d_color, normals ? &d_normals : nullptr, grads);

  if (!rs.force_opaque && config_.loss.beta1 > 0.0) {
    const std::size_t n = scene_.vertices.active_count();
    double sum = 0.0;
    for (std::size_t i = 0; i < scene_.vertices.size(); ++i) {
      if (!scene_.vertices.active[i]) continue;
      const double logit = scene_.vertices.opacity_logit[i];
      sum += map_opacity(logit, rs.opacity_floor);
      grads.d_opacity_logit[i] +=
          config_.loss.beta1 / n * map_opacity_derivative(logit, rs.opacity_floor);
    }
    total += config_.loss.beta1 * sum / n;
  }

  if (!std::isfinite(total) || !grads.all_finite()) {
    throw NumericalError("non-finite loss or gradient at iteration " + std::to_string(it) +
                         " (view " + std::to_string(view) + ")");
  }
  adam_.step(scene_.vertices, grads, config_.lr.at(it, config_.total_iters));
  for (const Vec3& p : scene_.vertices.positions) {
    if (!p.allFinite()) {
      throw NumericalError("non-finite vertex position after iteration " + std::to_string(it));
    }
  }
  accumulate_max_weights(out, max_weights_);
  ++window_iters_;
  loss_sum_ += total;
  ++loss_count_;
  ++iter_;
  run_lifecycle();
  if ((config_.eval_interval > 0 && iter_ % config_.eval_interval == 0) || done()) log_row();
  return total;
}

void Trainer::run_lifecycle() {
  const TrainSchedule& s = config_.schedule;
  const int n = iter_;
  bool changed = false;
  if (s.hard_prune && n == s.hard_prune_iter) {
    const PruneReport r = hard_prune(scene_, floor_at(s, n), s.hard_prune_threshold);
    hard_prune_report_ = r;
    emit(format_report("hard_prune", n, r, scene_));
    changed = true;
  }
  // The weight window must span every training view at least once.
  const std::size_t epoch = view_order_.size();
  if (s.blend_prune && n % s.prune_interval == 0 && window_iters_ >= epoch) {
    std::vector<double> w = max_weights_;
    w.resize(scene_.triangles.size(), 0.0);
    for (std::size_t m = 0; m < protected_.size() && m < w.size(); ++m) {
      if (protected_[m]) w[m] = 1.0;
    }
    const PruneReport r = blend_weight_prune(scene_, w, s.tau_prune);
    if (r.triangles_removed > 0) emit(format_report("blend_prune", n, r, scene_));
    std::fill(max_weights_.begin(), max_weights_.end(), 0.0);
    std::fill(protected_.begin(), protected_.end(), 0);
    window_iters_ = 0;
    changed |= r.triangles_removed > 0;
  }
  if (s.densify_rate > 0.0 && n % s.densify_interval == 0 && n >= s.densify_start &&
      n <= s.densify_end) {
    const DensifyReport r = densify(scene_, s.densify_rate, floor_at(s, n), s.max_triangles, rng_);
    if (r.selected > 0 || r.triangles_added > 0) {
      emit(format_report("densify", n, r, scene_));
      changed = true;
    }
  }
  if (!changed) return;
  if (scene_.triangles.active_count() == 0) {
    throw NumericalError("scene is empty after pruning at iteration " + std::to_string(n));
  }
  max_weights_.resize(scene_.triangles.size(), 0.0);
  protected_.resize(scene_.triangles.size(), 1);
  after_structure_change(compact(scene_));
}

void Trainer::after_structure_change(const CompactionMap& map) {
  adam_.state().remap(map.vertex, scene_.vertices.size());
  std::vector<double> w(scene_.triangles.size(), 0.0);
  std::vector<std::uint8_t> p(scene_.triangles.size(), 0);
  for (std::size_t i = 0; i < map.triangle.size(); ++i) {
    const std::int64_t j = map.triangle[i];
    if (j < 0) continue;
    w[j] = max_weights_[i];
    p[j] = protected_[i];
  }
  max_weights_ = std::move(w);
  protected_ = std::move(p);
}

EvalTable Trainer::evaluate_now() const {
  std::vector<int> views = data_.test_views;
  if (views.empty()) views = data_.train_views();
  return evaluate(scene_, data_, views, eval_settings(), config_.aa_scale);
}

MetricsRow Trainer::log_row() {
  const EvalTable t = evaluate_now();
  MetricsRow r;
  r.iter = iter_;
  r.loss = loss_count_ > 0 ? loss_sum_ / static_cast<double>(loss_count_) : 0.0;
  r.psnr = t.mean_psnr;
  r.ssim = t.mean_ssim;
  r.n_verts = t.n_verts;
  r.n_tris = t.n_tris;
  r.sigma = sigma_at(config_.schedule, iter_);
  r.floor = floor_at(config_.schedule, iter_);
  loss_sum_ = 0.0;
  loss_count_ = 0;
  metrics_.push_back(r);
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "event=eval iter=%d loss=%.6g psnr=%.3f ssim=%.4f verts=%zu tris=%zu sigma=%.4g "
                "floor=%.4g",
                r.iter, r.loss, r.psnr, r.ssim, r.n_verts, r.n_tris, r.sigma, r.floor);
  emit(buf);
  return r;
}

void Trainer::finalize() {
  if (config_.schedule.anneal_floor) {
    for (double& l : scene_.vertices.opacity_logit) l = kOpaqueLogit;
  }
  const CompactionMap map = compact(scene_);
  after_structure_change(map);
}

TrainResult train(const SceneDataset& data, const TrainConfig& config,
                  const TrainOutputs& outputs, const Checkpoint* resume,
                  std::function<void(const std::string&)> log) {
  Trainer t(data, config);
  t.log = std::move(log);
  if (resume) {
    t.restore(*resume);
  } else {
    t.init_from_points();
  }
  const bool write = !outputs.dir.empty();
  if (write) {
    std::error_code ec;
    fs::create_directories(outputs.dir, ec);
    if (ec) throw DataError("cannot create " + outputs.dir.string() + ": " + ec.message());
  }
  try {
    while (!t.done()) {
      t.step();
      if (write && config.checkpoint_interval > 0 &&
          t.iteration() % config.checkpoint_interval == 0 && !t.done()) {
        char name[64];
        std::snprintf(name, sizeof(name), "ckpt_%06d.tsp", t.iteration());
        save_checkpoint(t.checkpoint(), outputs.dir / name);
      }
    }
  } catch (const NumericalError&) {
    if (write) save_checkpoint(t.checkpoint(), outputs.dir / "crash.tsp");
    throw;
  }
  t.finalize();
  TrainResult result;
  result.final_eval = t.evaluate_now();
  result.scene = t.scene();
  result.metrics = t.metrics();
  result.hard_prune = t.hard_prune_report();
  if (write) {
    write_metrics_csv(result.metrics, outputs.dir / "metrics.csv");
    save_checkpoint(t.checkpoint(), outputs.dir / "final.tsp");
    if (outputs.write_ply) export_ply(result.scene, outputs.dir / "final.ply");
  }
  return result;
}

}  // namespace trisplat
