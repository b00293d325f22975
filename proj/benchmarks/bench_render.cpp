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

#include <benchmark/benchmark.h>

#include <random>

#include "trisplat/grad.hpp"
#include "trisplat/raster.hpp"
#include "trisplat/sh.hpp"

using namespace trisplat;

namespace {

Scene random_soup(int triangles, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0), c(0.1, 0.9);
  Scene s;
  for (int t = 0; t < triangles; ++t) {
    const Vec3 center(u(rng), u(rng), 4.0 + u(rng));
    TriangleIndices idx;
    for (int k = 0; k < 3; ++k) {
      const Vec3 p = center + 0.15 * Vec3(u(rng), u(rng), u(rng));
      idx[k] = s.vertices.add(p, sh_from_rgb(Vec3(c(rng), c(rng), c(rng))), 2.0 * u(rng));
    }
    s.triangles.add(idx);
  }
  return s;
}

Camera bench_camera(int size) {
  return Camera::look_at(Vec3::Zero(), Vec3(0, 0, 1), Vec3(0, -1, 0), size, size, size, size);
}

void BM_RenderForward(benchmark::State& state) {
  const Scene s = random_soup(static_cast<int>(state.range(0)), 1);
  const Camera cam = bench_camera(256);
  RenderSettings rs;
  rs.sigma = 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(render(s, cam, rs));
  state.SetItemsProcessed(state.iterations() * 256 * 256);
}
BENCHMARK(BM_RenderForward)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_RenderBackward(benchmark::State& state) {
  const Scene s = random_soup(static_cast<int>(state.range(0)), 2);
  const Camera cam = bench_camera(256);
  RenderSettings rs;
  rs.sigma = 0.1;
  const FrameSetup setup = prepare_frame(s, cam, rs);
  const Image d_color(256, 256, 3, 1e-3);
  GradientBuffer g;
  g.resize(s.vertices.size());
  for (auto _ : state) {
    g.zero();
    backward(s, cam, rs, setup, d_color, nullptr, g);
  }
  state.SetItemsProcessed(state.iterations() * 256 * 256);
}
BENCHMARK(BM_RenderBackward)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_DepthTest(benchmark::State& state) {
  const Scene s = random_soup(static_cast<int>(state.range(0)), 3);
  const Camera cam = bench_camera(256);
  RenderSettings rs;
  rs.sigma = Smoothness::kMin;
  rs.force_opaque = true;
  for (auto _ : state) benchmark::DoNotOptimize(render_depth_test(s, cam, rs));
}
BENCHMARK(BM_DepthTest)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
