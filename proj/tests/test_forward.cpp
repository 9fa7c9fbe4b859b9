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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "ybsde/common.hpp"
#include "ybsde/forward.hpp"
#include "ybsde/stats.hpp"

using namespace ybsde;

TEST_CASE("degenerate diffusions") {
  const TimeGrid grid = TimeGrid::uniform(1.0, 10);
  const auto still = euler_maruyama(SdeSpec::constant({0.5, -1.0}, {0.0, 0.0}, {0, 0, 0, 0}), grid, 4, 1);
  for (std::size_t p = 0; p < 4; ++p) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(still.state(p, i)[0] == 0.5);
      CHECK(still.state(p, i)[1] == -1.0);
    }
  }
  const auto ramp = euler_maruyama(SdeSpec::constant({0.0}, {1.0}, {0.0}), grid, 3, 1);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(ramp.state(2, i)[0] == doctest::Approx(grid[i]).epsilon(1e-15));
}

TEST_CASE("spec validation") {
  SdeSpec s = SdeSpec::brownian({0.0});
  s.x0 = {0.0, 1.0};
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  SdeSpec bounded = SdeSpec::constant({0.0}, {2.0}, {1.0});
  bounded.bound = 1.5;
  CHECK_THROWS_WITH_AS(euler_maruyama(bounded, TimeGrid::uniform(1.0, 4), 2, 1), doctest::Contains("declared bound"),
                       NumericalError);
  CHECK(SdeSpec::brownian({0.0}).hash() != SdeSpec::brownian({1.0}).hash());
}

TEST_CASE("Brownian increments and terminal variance") {
  const TimeGrid grid = TimeGrid::uniform(1.0, 20);
  const auto ens = euler_maruyama(SdeSpec::brownian({0.0}), grid, 10000, 2);
  std::vector<double> sq(ens.n_paths()), dw(ens.n_paths()), dw2(ens.n_paths());
  for (std::size_t p = 0; p < ens.n_paths(); ++p) {
    sq[p] = ens.state(p, grid.steps())[0] * ens.state(p, grid.steps())[0];
    dw[p] = ens.increment(p, 7)[0];
    dw2[p] = dw[p] * dw[p];
  }
  const MeanSe v = mean_se(sq), m = mean_se(dw), q = mean_se(dw2);
  CHECK(std::abs(v.mean - 1.0) <= 3.0 * v.se);
  CHECK(std::abs(m.mean) <= 5.0 * m.se);
  CHECK(std::abs(q.mean - grid.dt(7)) <= 5.0 * q.se);
  const SamplePath w = ens.brownian(3);
  CHECK(w(grid.steps()) == doctest::Approx(ens.state(3, grid.steps())[0]).epsilon(1e-14));
}

TEST_CASE("ensembles do not depend on the thread count") {
  SdeSpec s;
  s.d = 2;
  s.x0 = {0.1, -0.2};
  s.drift = [](double t, std::span<const double> x, std::span<double> out) {
    out[0] = std::sin(x[1]) + t;
    out[1] = -x[0];
  };
  s.diffusion = [](double, std::span<const double> x, std::span<double> out) {
    out[0] = 1.0;
    out[1] = 0.3 * std::cos(x[0]);
    out[2] = 0.0;
    out[3] = 0.8;
  };
  const TimeGrid grid = TimeGrid::uniform(1.0, 50);
  const std::size_t saved = thread_count();
  set_thread_count(1);
  const auto a = euler_maruyama(s, grid, 300, 99);
  set_thread_count(4);
  const auto b = euler_maruyama(s, grid, 300, 99);
  set_thread_count(saved);
  CHECK(a.states() == b.states());
  CHECK(a.increments() == b.increments());
  std::vector<double> x(grid.size() * 2), dw(grid.steps() * 2);
  simulate_path(s, grid, 99, 123, x, dw);
  const auto p = a.path(123);
  CHECK(std::equal(x.begin(), x.end(), p.values().begin()));
  CHECK(driving_normal(99, 123, 4, 1) == driving_normal(99, 123, 4, 1));
  CHECK(driving_normal(99, 123, 4, 1) != driving_normal(99, 124, 4, 1));
}

TEST_CASE("exit time examples") {
  const TimeGrid grid = TimeGrid::uniform(1.0, 1000);
  const SamplePath ramp = SamplePath::from_function(grid, [](double t) { return t; });
  const ExitInfo e = exit_time(ramp, 0.5);
  CHECK(e.exited);
  CHECK(e.index == 501);
  CHECK(e.time == doctest::Approx(0.501));
  const ExitInfo never = exit_time(ramp, 2.0);
  CHECK_FALSE(never.exited);
  CHECK(never.time == 1.0);
  CHECK(never.index == 1000);
  // The starting point does not count as an exit.
  const SamplePath start_out = SamplePath::from_function(grid, [](double t) { return t < 0.2 ? 3.0 : 0.0; });
  CHECK(exit_time(start_out, 1.0).index == 1);
  const SamplePath planar(TimeGrid::uniform(1.0, 2), 2, {0.0, 0.0, 0.6, 0.6, 0.8, 0.0});
  CHECK(exit_time(planar, 0.7).index == 1);
}

TEST_CASE("exit times are nondecreasing in n") {
  const auto ens = euler_maruyama(SdeSpec::brownian({0.0}), TimeGrid::uniform(1.0, 100), 500, 5);
  for (std::size_t p = 0; p < ens.n_paths(); ++p) {
    double previous = 0.0;
    for (double n : {0.25, 0.5, 1.0, 1.5, 2.0, 3.0}) {
      const double t = exit_time(ens, p, n).time;
      CHECK(t >= previous);
      previous = t;
    }
  }
}

TEST_CASE("exit probability of Brownian motion against the series") {
  const std::size_t steps = 500, paths = 100000;
  const TimeGrid grid = TimeGrid::uniform(1.0, steps);
  const SdeSpec bm = SdeSpec::brownian({0.0});
  const std::vector<double> levels{1.0, 2.0, 3.0};
  std::vector<std::vector<double>> hits(levels.size(), std::vector<double>(paths));
  parallel_for(paths, [&](std::size_t p) {
    std::vector<double> x(grid.size()), dw(steps);
    simulate_path(bm, grid, 6, p, x, dw);
    for (std::size_t k = 0; k < levels.size(); ++k) hits[k][p] = exit_time(x, 1, grid, levels[k]).exited ? 1.0 : 0.0;
  });
  std::vector<double> ln2, lp;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const MeanSe m = mean_se(hits[k]);
    const double ref = oracle::bm_grid_exit_probability(levels[k], 1.0, grid.dt(0));
    MESSAGE("n = " << levels[k] << ": " << m.mean << " vs " << ref << " (SE " << m.se << ")");
    CHECK(std::abs(m.mean - ref) <= 3.0 * m.se);
  }
}

TEST_CASE("Gaussian decay of exit probabilities") {
  const TimeGrid grid = TimeGrid::uniform(1.0, 100);
  const auto ens = euler_maruyama(SdeSpec::brownian({0.0}), grid, 40000, 8);
  std::vector<double> n2, logp;
  for (double n : {1.0, 1.5, 2.0, 2.5, 3.0}) {
    double hits = 0.0;
    for (std::size_t p = 0; p < ens.n_paths(); ++p) hits += exit_time(ens, p, n).exited ? 1.0 : 0.0;
    REQUIRE(hits > 0.0);
    n2.push_back(n * n);
    logp.push_back(std::log(hits / static_cast<double>(ens.n_paths())));
  }
  const auto fit = oracle::least_squares(n2, logp);
  CHECK(fit.slope < 0.0);
  CHECK(fit.r2 >= 0.9);
}

TEST_CASE("reflection examples") {
  const std::vector<double> small{0.1, -0.05, 0.2, -0.1};
  const auto r = reflect_1d(small, 0.0, 1.0, 0.5);
  double free = 0.5;
  for (std::size_t j = 0; j < small.size(); ++j) {
    free += small[j];
    CHECK(r.x[j + 1] == doctest::Approx(free));
    CHECK(r.local_time[j + 1] == 0.0);
  }
  const std::vector<double> down(10, -0.01);
  const auto d = reflect_1d(down, 0.0, 1.0, 0.0);
  for (std::size_t j = 0; j <= 10; ++j) {
    CHECK(d.x[j] == 0.0);
    CHECK(d.local_time[j] == doctest::Approx(0.01 * j));
    CHECK(d.lower_push[j] == doctest::Approx(0.01 * j));
    CHECK(d.upper_push[j] == 0.0);
  }
  CHECK_THROWS_AS(reflect_1d(small, 0.0, 1.0, 1.5), InvalidArgument);
  CHECK_THROWS_AS(reflect_1d(small, 1.0, 1.0, 1.0), InvalidArgument);
}

TEST_CASE("reflected path constraints") {
  const auto w = oracle::brownian(2000, 4.0, 9);
  std::vector<double> inc(2000);
  for (std::size_t j = 0; j < inc.size(); ++j) inc[j] = w[j + 1] - w[j];
  const auto r = reflect_1d(inc, -0.5, 0.5, 0.0);
  double x = 0.0;
  for (std::size_t j = 0; j < inc.size(); ++j) {
    CHECK(r.x[j + 1] >= -0.5);
    CHECK(r.x[j + 1] <= 0.5);
    CHECK(r.local_time[j + 1] >= r.local_time[j]);
    if (r.local_time[j + 1] > r.local_time[j]) CHECK((r.x[j + 1] == -0.5 || r.x[j + 1] == 0.5));
    x += inc[j];
    CHECK(r.x[j + 1] == doctest::Approx(x + r.lower_push[j + 1] - r.upper_push[j + 1]).epsilon(1e-12));
  }
}

TEST_CASE("doubly reflected Brownian motion approaches the uniform law") {
  // Relaxation time of the reflected motion on [0, 1] is 2 / pi^2; T = 2 is
  // ten of them. Clipping leaves an atom of mass O(sqrt(dt)) at each wall,
  // so dt is kept small.
  const std::size_t paths = 10000, steps = 20000;
  const double horizon = 2.0, dt = horizon / steps;
  std::vector<double> final_x(paths);
  parallel_for(paths, [&](std::size_t p) {
    std::mt19937_64 gen(1000 + p);
    std::normal_distribution<double> z(0.0, std::sqrt(dt));
    std::vector<double> inc(steps);
    for (auto& v : inc) v = z(gen);
    final_x[p] = reflect_1d(inc, 0.0, 1.0, 0.5).x.back();
  });
  std::vector<double> counts(10, 0.0);
  for (double x : final_x) counts[std::min<std::size_t>(9, static_cast<std::size_t>(x * 10.0))] += 1.0;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - 1000.0) * (c - 1000.0) / 1000.0;
  MESSAGE("chi-square " << chi2);
  // 99th percentile of chi-square with 9 degrees of freedom.
  CHECK(chi2 <= 21.666);
}

TEST_CASE("ensemble files") {
  const auto ens = euler_maruyama(SdeSpec::brownian({0.0, 1.0}), TimeGrid::uniform(1.0, 8), 5, 17);
  const auto dir = std::filesystem::temp_directory_path() / "ybsde_forward_test";
  std::filesystem::create_directories(dir);
  save_ensemble(ens, (dir / "ens").string());
  const auto back = load_ensemble((dir / "ens.json").string());
  CHECK(back.seed() == 17);
  CHECK(back.spec_hash() == ens.spec_hash());
  CHECK(back.grid() == ens.grid());
  CHECK(back.states() == ens.states());
  CHECK(back.increments() == ens.increments());
  save_paths_csv(ens, (dir / "paths.csv").string(), {0, 3});
  std::ifstream in(dir / "paths.csv");
  std::string header;
  std::getline(in, header);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  CHECK(header == "path,t,x1,x2");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 18);
  std::filesystem::remove_all(dir);
}
