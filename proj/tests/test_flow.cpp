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

#include "doctest.h"
#include "oracles.hpp"
#include "ybsde/common.hpp"
#include "ybsde/flow.hpp"

using namespace ybsde;

namespace {

SamplePath brownian_path(const TimeGrid& grid, std::uint64_t seed) {
  return SamplePath::scalar(grid, oracle::brownian(grid.steps(), grid.horizon(), seed));
}

std::vector<double> axis(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

const RegularityParams kSmooth{1.0, 1.0, 0.0, 2.5};

Driver time_field() { return make_analytic_1d(2.0, [](double t, double) { return t; }, kSmooth); }

// Constant coefficient: M channels of N x N.
FlowCoefficient constant_alpha(const TimeGrid& grid, std::vector<double> mats, std::size_t n) {
  const std::size_t dim = mats.size();
  std::vector<double> v;
  for (std::size_t i = 0; i < grid.size(); ++i) v.insert(v.end(), mats.begin(), mats.end());
  return {SamplePath(grid, dim, v), n};
}

}  // namespace

TEST_CASE("zero coefficient gives the identity flow") {
  const TimeGrid grid = TimeGrid::uniform(1.0, 16);
  const SamplePath x = brownian_path(grid, 1);
  const auto f = solve_linear_yode(constant_alpha(grid, {0, 0, 0, 0}, 2), x, *time_field(), 3);
  CHECK(f.base() == 3);
  for (std::size_t s = 3; s < grid.size(); ++s) CHECK(f.at(s).isApprox(Eigen::MatrixXd::Identity(2, 2)));
  CHECK_THROWS_AS(f.at(2), InvalidArgument);
  const auto inv = inverse_flow(f);
  for (std::size_t s = 3; s < grid.size(); ++s) CHECK(inv.at(s).isApprox(Eigen::MatrixXd::Identity(2, 2)));
  const auto e = exp_formula_1d(SamplePath::constant(grid, 0.0), x, time_field(), {}, 4);
  for (double v : e) CHECK(v == 1.0);
}

TEST_CASE("scalar flow with eta = t is the exponential") {
  const TimeGrid grid = TimeGrid::uniform(2.0, std::size_t{1} << 13);
  const SamplePath x = SamplePath::constant(grid, 0.0);
  const auto f = solve_linear_yode(constant_alpha(grid, {1.0}, 1), x, *time_field(), grid.find(0.5));
  CHECK(std::abs(f.at(grid.find(1.5))(0, 0) - std::exp(1.0)) <= 1e-3);
  const auto inv = inverse_flow(f);
  CHECK(inv.at(grid.find(1.5))(0, 0) == doctest::Approx(1.0 / f.at(grid.find(1.5))(0, 0)).epsilon(1e-14));

  const TimeGrid coarse = TimeGrid::uniform(2.0, 8);
  const auto e = exp_formula_1d(SamplePath::constant(coarse, -0.7), SamplePath::constant(coarse, 0.0), time_field(),
                                {0.5, 2.0}, 3);
  REQUIRE(e.size() == 7);
  for (std::size_t k = 0; k < e.size(); ++k) CHECK(e[k] == doctest::Approx(std::exp(-0.7 * 0.25 * k)).epsilon(1e-13));
}

TEST_CASE("matrix flow with eta = t is the matrix exponential") {
  const std::vector<double> a{0.3, -0.8, 0.5, 0.1, /* second channel */ 0.2, 0.0, -0.4, 0.6};
  const TimeGrid grid = TimeGrid::uniform(1.0, std::size_t{1} << 14);
  const Driver eta = stack({make_analytic_1d(1.0, [](double t, double) { return t; }, kSmooth),
                            make_analytic_1d(1.0, [](double t, double) { return 0.5 * t; }, kSmooth)});
  const auto f = solve_linear_yode(constant_alpha(grid, a, 2), SamplePath::constant(grid, 0.0), *eta);
  // G' = (A1^T + A2^T / 2) G.
  std::vector<double> gen(4);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) gen[r * 2 + c] = a[c * 2 + r] + 0.5 * a[4 + c * 2 + r];
  }
  const auto ref = oracle::expm(gen, 2);
  const Eigen::MatrixXd& end = f.at(grid.steps());
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) CHECK(std::abs(end(r, c) - ref[r * 2 + c]) <= 1e-4);
  }
}

TEST_CASE("inverse of a well-conditioned rough flow") {
  const TimeGrid grid = TimeGrid::uniform(1.0, 40);
  const Driver eta = fbs_generate({0.8, 0.5, 1}, TimeGrid::uniform(1.0, 80), {axis(-4.0, 4.0, 17)}, 5);
  const SamplePath x = brownian_path(grid, 6);
  const auto alpha = constant_alpha(grid, {0.4, 1.2, -0.9, 0.3, 0.0, 0.5, -0.2, 0.1, 0.7}, 3);
  const auto f = solve_linear_yode(alpha, x, *eta, 0, 2);
  const auto inv = inverse_flow(f);
  for (std::size_t s = 0; s < grid.size(); ++s) {
    CHECK((f.at(s) * inv.at(s) - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("singular flow is rejected with its grid index") {
  const TimeGrid grid = TimeGrid::uniform(1.0, 4);
  std::vector<Eigen::MatrixXd> steps(4, Eigen::MatrixXd::Identity(2, 2));
  steps[2](1, 1) = 0.0;
  const auto f = flow_from_steps(grid, steps, 0);
  CHECK_THROWS_WITH_AS(inverse_flow(f), doctest::Contains("3"), NumericalError);
}

TEST_CASE("non-finite flow names the first bad step") {
  const TimeGrid grid = TimeGrid::uniform(1.0, 4);
  const Driver eta = make_analytic_1d(
      1.0, [](double t, double) { return t > 0.6 ? std::numeric_limits<double>::infinity() : t; }, kSmooth);
  CHECK_THROWS_AS(solve_linear_yode(constant_alpha(grid, {1.0}, 1), SamplePath::constant(grid, 0.0), *eta),
                  NumericalError);
}

TEST_CASE("cocycle of the Euler flow") {
  const TimeGrid grid = TimeGrid::uniform(1.0, 24);
  const Driver eta = fbs_generate({0.7, 0.6, 1}, TimeGrid::uniform(1.0, 48), {axis(-4.0, 4.0, 17)}, 9);
  const SamplePath x = brownian_path(grid, 10);
  const auto alpha = constant_alpha(grid, {0.5, -1.0, 0.8, 0.2}, 2);
  const auto f0 = solve_linear_yode(alpha, x, *eta, 0, 1);
  const auto f8 = solve_linear_yode(alpha, x, *eta, 8, 1);
  for (std::size_t u = 8; u < grid.size(); ++u) {
    const Eigen::MatrixXd lhs = f8.at(u) * f0.at(8);
    CHECK((lhs - f0.at(u)).cwiseAbs().maxCoeff() <= 1e-12 * f0.at(u).cwiseAbs().maxCoeff());
  }
}

TEST_CASE("inverse flow agrees with the inverse equation under refinement") {
  const TimeGrid grid = TimeGrid::uniform(1.0, 16);
  const Driver eta = fbs_generate({0.8, 0.5, 1}, TimeGrid::uniform(1.0, 1024), {axis(-4.0, 4.0, 33)}, 11);
  const SamplePath x = brownian_path(grid, 12);
  const auto alpha = constant_alpha(grid, {0.6, -0.4, 0.3, 0.5}, 2);
  std::vector<double> gap;
  for (int level = 0; level <= 4; ++level) {
    const auto inv = inverse_flow(solve_linear_yode(alpha, x, *eta, 0, level));
    const auto direct = solve_inverse_yode(alpha, x, *eta, 0, level);
    double worst = 0.0;
    for (std::size_t s = 0; s < grid.size(); ++s) worst = std::max(worst, (inv.at(s) - direct.at(s)).cwiseAbs().maxCoeff());
    gap.push_back(worst);
  }
  for (std::size_t l = 0; l + 1 < gap.size(); ++l) {
    MESSAGE("inverse gap " << gap[l] << " -> " << gap[l + 1]);
    CHECK(gap[l] / gap[l + 1] >= std::pow(2.0, 0.3));
  }
}

TEST_CASE("log of the scalar flow converges to the sewing integral") {
  const TimeGrid grid = TimeGrid::uniform(1.0, 16);
  const Driver eta = fbs_generate({0.8, 0.5, 1}, TimeGrid::uniform(1.0, 1024), {axis(-4.0, 4.0, 33)}, 13);
  const SamplePath x = brownian_path(grid, 14);
  const SamplePath alpha = SamplePath::from_function(grid, [](double t) { return 1.0 - t; });
  const auto exact = exp_formula_1d(alpha, x, eta, {}, 12);
  double previous = std::numeric_limits<double>::infinity();
  for (int level = 0; level <= 4; ++level) {
    const auto f = solve_linear_yode({alpha, 1}, x, *eta, 0, level);
    double worst = 0.0;
    for (std::size_t s = 0; s < grid.size(); ++s) worst = std::max(worst, std::abs(std::log(f.at(s)(0, 0)) - std::log(exact[s])));
    CHECK(worst < previous);
    previous = worst;
  }
}
