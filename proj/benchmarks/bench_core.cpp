/* Copyright 2026 The youngbsde Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Throughput of the hot paths: p-variation, dyadic sewing, fBs sampling,
// Euler-Maruyama, the backward regression scheme and the FD solver.

#include <benchmark/benchmark.h>

#include <cmath>

#include "ybsde/bsde.hpp"
#include "ybsde/common.hpp"
#include "ybsde/driver.hpp"
#include "ybsde/forward.hpp"
#include "ybsde/paths.hpp"
#include "ybsde/pde.hpp"
#include "ybsde/sewing.hpp"

namespace {

using namespace ybsde;

SamplePath brownian(std::size_t steps, std::uint64_t seed) {
  const TimeGrid grid = TimeGrid::uniform(1.0, steps);
  std::vector<double> w(grid.size(), 0.0);
  for (std::size_t j = 0; j < steps; ++j) w[j + 1] = w[j] + std::sqrt(grid.dt(j)) * driving_normal(seed, 0, j, 0);
  return SamplePath::scalar(grid, std::move(w));
}

std::vector<double> axis(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

void BM_PVariation(benchmark::State& state) {
  const SamplePath path = brownian(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(p_variation(path, 2.5));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PVariation)->RangeMultiplier(2)->Range(256, 4096)->Complexity(benchmark::oNSquared);

void BM_Sew(benchmark::State& state) {
  const TimeGrid fine = TimeGrid::uniform(1.0, std::size_t{1} << 12);
  const SamplePath x = brownian(fine.steps(), 2);
  const Driver eta = make_analytic_1d(
      1.0, [](double t, double xx) { return std::sin(xx) * std::pow(t, 0.8); }, {0.8, 1.0, 0.0, 2.5});
  const Germ germ = young_germ(SamplePath::constant(fine, 1.0), x, eta);
  const std::vector<double> base{0.0, 1.0};
  const int levels = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sew(germ, base, levels, 0.0).total());
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << levels));
}
BENCHMARK(BM_Sew)->DenseRange(8, 14, 2);

void BM_FbsSample(benchmark::State& state) {
  const FbsSampler sampler({0.8, 0.5, 1}, TimeGrid::uniform(1.0, static_cast<std::size_t>(state.range(0))),
                           {axis(-4.0, 4.0, 65)});
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(++seed));
}
BENCHMARK(BM_FbsSample)->Arg(64)->Arg(256);

void BM_EulerMaruyama(benchmark::State& state) {
  set_thread_count(1);
  const SdeSpec spec = SdeSpec::brownian({0.0, 0.0});
  const TimeGrid grid = TimeGrid::uniform(1.0, 100);
  const auto paths = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(euler_maruyama(spec, grid, paths, 3).states().data());
  state.SetItemsProcessed(state.iterations() * state.range(0) * 100);
}
BENCHMARK(BM_EulerMaruyama)->Arg(1000)->Arg(10000);

void BM_BackwardSolve(benchmark::State& state) {
  set_thread_count(1);
  const SdeSpec fwd = SdeSpec::brownian({0.0});
  const auto ens = euler_maruyama(fwd, TimeGrid::uniform(1.0, 50), static_cast<std::size_t>(state.range(0)), 4);
  BsdeSpec spec;
  spec.forward = fwd;
  spec.field = fbs_generate({0.8, 0.5, 1}, TimeGrid::uniform(1.0, 100), {axis(-6.0, 6.0, 49)}, 5);
  spec.generator = [](double, std::span<const double>, std::span<const double> y, std::span<const double>,
                      std::span<double> out) { out[0] = 0.2 * std::sin(y[0]); };
  spec.coupling = [](double, std::span<const double>, std::span<const double> y, std::span<double> out) {
    out[0] = std::sin(y[0]);
  };
  spec.terminal = [](const PathView& p, std::size_t i, std::span<double> out) { out[0] = std::cos(p.at(i)[0]); };
  for (auto _ : state) benchmark::DoNotOptimize(backward_solve(spec, ens, RegressionBasis{}).y0().mean);
}
BENCHMARK(BM_BackwardSolve)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_FdSolve(benchmark::State& state) {
  PdeSpec spec;
  spec.n = 3.0;
  spec.h = [](std::span<const double> x) { return std::cos(x[0]); };
  spec.diffusion = [](std::span<const double>, std::span<double> out) { out[0] = 1.0; };
  spec.coupling = [](double u, std::span<double> out) { out[0] = std::sin(u); };
  spec.field = make_analytic_1d(
      1.0, [](double t, double x) { return std::sin(x) * t; }, {}, [](double, double x) { return std::sin(x); });
  const auto cells = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fd_dirichlet_solve(spec, {200, cells, 0.5}).u.back());
}
BENCHMARK(BM_FdSolve)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
