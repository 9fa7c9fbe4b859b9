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

// Acceptance battery: one line per criterion, exit status = number of
// failures. Tolerances are fixed here and never adapted to the outcome.
//
//   ybsde_acceptance            run every criterion
//   ybsde_acceptance 3 7        run criteria 3 and 7 only

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "ybsde/bsde.hpp"
#include "ybsde/common.hpp"
#include "ybsde/driver.hpp"
#include "ybsde/flow.hpp"
#include "ybsde/forward.hpp"
#include "ybsde/paths.hpp"
#include "ybsde/pde.hpp"
#include "ybsde/sewing.hpp"

namespace {

using namespace ybsde;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

template <typename... Args>
std::string fmtn(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

std::vector<double> axis(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

SamplePath brownian_path(const TimeGrid& grid, std::uint64_t seed) {
  return SamplePath::scalar(grid, oracle::brownian(grid.steps(), grid.horizon(), seed));
}

// 1. Dyadic Cauchy increments of the rough Young integral decay at rate >= delta - 0.15.
Outcome sewing_convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  const TimeGrid fine = TimeGrid::uniform(1.0, std::size_t{1} << 15);
  const SamplePath x = brownian_path(fine, 101);
  const double p = 2.5;
  const Driver eta = make_analytic_1d(
      1.0, [](double t, double xx) { return std::sin(xx) * std::pow(t, 0.8); }, {0.8, 1.0, 0.0, p});
  const std::vector<double> base{0.0, 1.0};
  const auto res = sew(young_germ(SamplePath::constant(fine, 1.0), x, eta), base, 15, 0.0);
  std::vector<double> lx, ly;
  for (int l = 6; l <= 14; ++l) {
    lx.push_back(-l * std::log(2.0));
    ly.push_back(std::log(res.cauchy[static_cast<std::size_t>(l)]));
  }
  const auto fit = oracle::least_squares(lx, ly);
  // Pinned at 0.3. Taken literally, 0.8 + 0.5 / 2.5 - 1 is 0, so the pinned
  // value is the stricter of the two.
  const double delta = 0.3;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {fit.slope >= delta - 0.15 && secs < 10.0,
          fmtn("slope %.3f (need >= %.3f), %.2f s (need < 10 s)", fit.slope, delta - 0.15, secs)};
}

// 2. Smooth drivers: nonlinear Young integral equals the Riemann integral.
Outcome smooth_reduction() {
  const TimeGrid grid = TimeGrid::uniform(1.0, 256);
  const SamplePath w = brownian_path(grid, 202);
  const SamplePath ramp = SamplePath::from_function(grid, [](double r) { return r; });
  const SamplePath wave = SamplePath::from_function(grid, [](double r) { return std::sin(2.0 * std::numbers::pi * r); });
  struct Case {
    std::string name;
    Driver eta;
    SamplePath y, x;
    std::function<double(double, double, double)> integrand;  // (r, y_r, x_r) -> y d_t eta
  };
  const RegularityParams smooth{1.0, 1.0, 0.0, 2.5};
  std::vector<Case> cases;
  cases.push_back({"t x, x = r", make_analytic_1d(1.0, [](double t, double x) { return t * x; }, smooth),
                   SamplePath::constant(grid, 1.0), ramp, [](double, double y, double x) { return y * x; }});
  cases.push_back({"sin(x) t^2, Brownian x",
                   make_analytic_1d(1.0, [](double t, double x) { return std::sin(x) * t * t; }, smooth),
                   SamplePath::constant(grid, 1.0), w,
                   [](double r, double y, double x) { return y * std::sin(x) * 2.0 * r; }});
  cases.push_back({"cos(x) sin(3t) + t, y = 1 + r",
                   make_analytic_1d(1.0, [](double t, double x) { return std::cos(x) * std::sin(3.0 * t) + t; }, smooth),
                   SamplePath::from_function(grid, [](double r) { return 1.0 + r; }), wave,
                   [](double r, double y, double x) { return y * (3.0 * std::cos(x) * std::cos(3.0 * r) + 1.0); }});
  std::vector<double> cosw(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) cosw[i] = std::cos(w(i));
  cases.push_back({"exp(-x^2) t^3, y = cos(W)",
                   make_analytic_1d(1.0, [](double t, double x) { return std::exp(-x * x) * t * t * t; }, smooth),
                   SamplePath::scalar(grid, cosw), w,
                   [](double r, double y, double x) { return y * std::exp(-x * x) * 3.0 * r * r; }});
  cases.push_back({"x e^t, x = W",
                   make_analytic_1d(1.0, [](double t, double x) { return x * std::exp(t); }, smooth),
                   SamplePath::from_function(grid, [](double r) { return 2.0 - r * r; }), w,
                   [](double r, double y, double x) { return y * x * std::exp(r); }});
  double worst = 0.0;
  std::string detail;
  for (const auto& c : cases) {
    const auto res = nonlinear_young_integral(c.y, c.x, c.eta, {}, 14, 0.0);
    double quad = 0.0;
    for (std::size_t i = 0; i < grid.steps(); ++i) {
      quad += oracle::integrate(
          [&](double r) { return c.integrand(r, c.y.interpolate(r), c.x.interpolate(r)); }, grid[i], grid[i + 1], 1);
    }
    const double err = std::abs(res.total() - quad);
    worst = std::max(worst, err);
    if (res.level_used != 14) return {false, c.name + ": stopped before level 14"};
  }
  return {worst <= 1e-6, fmtn("5 cases, worst |Young - Riemann| = %.2e (need <= 1e-6)", worst)};
}

// Two-channel fBs driver for the flow battery.
Driver rough_pair(std::size_t time_nodes, std::uint64_t seed) {
  const HurstParams hp{0.8, 0.5, 1};
  const FbsSampler sampler(hp, TimeGrid::uniform(1.0, time_nodes - 1), {axis(-4.0, 4.0, 33)});
  return stack({sampler.sample(seed), sampler.sample(seed + 1)});
}

// 3. Cocycle and inverse of the Euler flow.
Outcome flow_cocycle() {
  const TimeGrid grid = TimeGrid::uniform(1.0, 64);
  const Driver eta = rough_pair(129, 303);
  const SamplePath x = brownian_path(grid, 304);
  // alpha^i(t) = A_i + t B_i, two channels of 2 x 2.
  const double a[2][4] = {{0.6, -0.3, 0.2, 0.4}, {-0.5, 0.7, 0.1, -0.2}};
  const double b[2][4] = {{0.2, 0.1, -0.4, 0.3}, {0.3, -0.1, 0.5, 0.2}};
  std::vector<double> vals;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (int c = 0; c < 2; ++c) {
      for (int k = 0; k < 4; ++k) vals.push_back(a[c][k] + grid[i] * b[c][k]);
    }
  }
  const FlowCoefficient alpha{SamplePath(grid, 8, vals), 2};
  std::vector<FlowMatrix> flows;
  for (std::size_t t = 0; t < grid.size(); ++t) flows.push_back(solve_linear_yode(alpha, x, *eta, t, 0));
  double worst = 0.0, worst_inv = 0.0;
  for (std::size_t t = 0; t < grid.size(); ++t) {
    for (std::size_t s = t; s < grid.size(); ++s) {
      for (std::size_t u = s; u < grid.size(); ++u) {
        const Eigen::MatrixXd lhs = flows[s].at(u) * flows[t].at(s);
        const Eigen::MatrixXd& rhs = flows[t].at(u);
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff() / rhs.cwiseAbs().maxCoeff());
      }
    }
    const FlowMatrix inv = inverse_flow(flows[t]);
    for (std::size_t s = t; s < grid.size(); ++s) {
      const Eigen::MatrixXd prod = flows[t].at(s) * inv.at(s);
      worst_inv = std::max(worst_inv, (prod - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-12 && worst_inv <= 1e-10,
          fmtn("cocycle rel. error %.2e (need <= 1e-12), |G G^-1 - I| %.2e (need <= 1e-10)", worst, worst_inv)};
}

// 4. Euler flow against the exponential of the sewing integral, N = 1.
Outcome exponential_formula() {
  const TimeGrid base = TimeGrid::uniform(1.0, 32);
  const FbsSampler sampler({0.8, 0.5, 1}, TimeGrid::uniform(1.0, 1024), {axis(-4.0, 4.0, 33)});
  const Driver eta = sampler.sample(404);
  const SamplePath x = brownian_path(base, 405);
  const SamplePath alpha = SamplePath::constant(base, 1.0);
  const auto exact = exp_formula_1d(alpha, x, eta, {}, 12);
  const FlowCoefficient coeff{alpha, 1};
  std::vector<double> disc;
  for (int level = 0; level <= 4; ++level) {
    const FlowMatrix flow = solve_linear_yode(coeff, x, *eta, 0, level);
    double worst = 0.0;
    for (std::size_t i = 0; i < base.size(); ++i) worst = std::max(worst, std::abs(flow.at(i)(0, 0) - exact[i]));
    disc.push_back(worst);
  }
  bool ok = true;
  std::string ratios;
  for (std::size_t l = 0; l + 1 < disc.size(); ++l) {
    const double r = disc[l] / disc[l + 1];
    ok = ok && r >= std::pow(2.0, 0.3);
    ratios += fmt(" %.2f", r);
  }
  return {ok, "discrepancy ratios" + ratios + " (need each >= 1.23)"};
}

Driver rough_driver(const HurstParams& hp, std::uint64_t seed, double half_width) {
  return fbs_generate(hp, TimeGrid::uniform(1.0, 100), {axis(-half_width, half_width, 49)}, seed);
}

// 5. Linear BSDE: backward scheme against the flow representation.
Outcome linear_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const HurstParams hp{0.8, 0.5, 1};
  const RegularityParams rp = fbs_regularity(hp, 0.01);
  const bool region = rp.lambda + rp.beta < 2.0;
  LinearBsdeSpec lin;
  lin.field = rough_driver(hp, 505, 6.0);
  lin.n = 1;
  lin.alpha = [](double, std::span<const double>, std::span<double> out) { out[0] = 1.0; };
  lin.terminal = [](const PathView& p, std::size_t i, std::span<double> out) { out[0] = std::cos(p.at(i)[0]); };
  const SdeSpec fwd = SdeSpec::brownian({0.0});
  const PathEnsemble ens = euler_maruyama(fwd, TimeGrid::uniform(1.0, 50), 10000, 506);
  const RegressionBasis basis;
  const BsdeSolution sol = backward_solve(lin.to_bsde(fwd), ens, basis);
  const LinearEstimate est = linear_closed_form(lin, ens, basis);
  const MeanSe a = sol.y0(), b = est.y0[0];
  const double combined = std::sqrt(a.se * a.se + b.se * b.se);
  const double gap = std::abs(a.mean - b.mean);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {region && gap <= 3.0 * combined && secs < 60.0,
          fmtn("Y0 backward %.5f, closed form %.5f, |gap| %.2e vs 3 SE %.2e, lambda+beta %.2f, %.1f s", a.mean,
               b.mean, gap, 3.0 * combined, rp.lambda + rp.beta, secs)};
}

// 6. Comparison with a shifted terminal value and nonlinear coupling.
Outcome comparison() {
  const SdeSpec fwd = SdeSpec::brownian({0.0});
  const PathEnsemble ens = euler_maruyama(fwd, TimeGrid::uniform(1.0, 50), 10000, 606);
  BsdeSpec b;
  b.forward = fwd;
  b.field = rough_driver({0.8, 0.5, 1}, 607, 6.0);
  b.n = 1;
  b.generator = [](double, std::span<const double>, std::span<const double> y, std::span<const double>,
                   std::span<double> out) { out[0] = 0.2 * std::sin(y[0]); };
  b.coupling = [](double, std::span<const double>, std::span<const double> y, std::span<double> out) {
    out[0] = std::sin(y[0]);
  };
  b.terminal = [](const PathView& p, std::size_t i, std::span<double> out) { out[0] = std::cos(p.at(i)[0]); };
  BsdeSpec a = b;
  a.terminal = [](const PathView& p, std::size_t i, std::span<double> out) {
    out[0] = std::cos(p.at(i)[0]) + 0.1;
  };
  const auto rep = comparison_experiment(a, b, ens, RegressionBasis{}, PicardOptions{}, 1e-2);
  return {rep.fraction_ordered >= 0.99 && rep.y0_difference.mean > 3.0 * rep.y0_difference.se,
          fmtn("fraction %.4f (need >= 0.99), Y_A(0) - Y_B(0) = %.4f, 3 SE = %.2e", rep.fraction_ordered,
               rep.y0_difference.mean, 3.0 * rep.y0_difference.se)};
}

// 7. Exit probabilities and the localization sweep.
Outcome localization() {
  const std::size_t n_paths = 100000, steps = 1000;
  const TimeGrid grid = TimeGrid::uniform(1.0, steps);
  const SdeSpec bm = SdeSpec::brownian({0.0});
  std::vector<double> sup(n_paths);
  parallel_for(n_paths, [&](std::size_t p) {
    std::vector<double> x(grid.size()), dw(grid.steps());
    simulate_path(bm, grid, 707, p, x, dw);
    double m = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) m = std::max(m, std::abs(x[i]));
    sup[p] = m;
  });
  const std::vector<double> levels{1.0, 1.5, 2.0, 2.5, 3.0};
  std::vector<double> n2, logp;
  bool within = true;
  std::string detail;
  for (double n : levels) {
    double hits = 0;
    for (double s : sup) hits += s > n ? 1.0 : 0.0;
    const double prob = hits / static_cast<double>(n_paths);
    const double se = std::sqrt(prob * (1.0 - prob) / static_cast<double>(n_paths));
    const double ref = oracle::bm_grid_exit_probability(n, 1.0, grid.dt(0));
    within = within && std::abs(prob - ref) <= 3.0 * se;
    detail += fmtn(" n=%.1f: %.5f/%.5f", n, prob, ref);
    n2.push_back(n * n);
    logp.push_back(std::log(prob));
  }
  const auto fit = oracle::least_squares(n2, logp);

  // Running-maximum terminal with a driver unbounded in x and a generator
  // that is only locally Lipschitz in x.
  const PathEnsemble ens = euler_maruyama(bm, TimeGrid::uniform(1.0, 100), 10000, 708);
  BsdeSpec spec;
  spec.forward = bm;
  spec.field = make_analytic_1d(1.0, [](double t, double x) { return x * std::pow(t, 0.8); }, {0.8, 1.0, 1.0, 2.5});
  spec.n = 1;
  spec.generator = [](double, std::span<const double> x, std::span<const double> y, std::span<const double>,
                      std::span<double> out) { out[0] = std::sqrt(std::abs(x[0])) * std::sin(y[0]); };
  spec.coupling = [](double, std::span<const double>, std::span<const double> y, std::span<double> out) {
    out[0] = 0.5 * std::sin(y[0]);
  };
  const auto running_max = [](const PathView& p, std::size_t i, std::span<double> out) {
    double m = p.at(0)[0];
    for (std::size_t j = 1; j <= i; ++j) m = std::max(m, p.at(j)[0]);
    out[0] = m;
  };
  spec.terminal = running_max;
  spec.state_features = running_max;
  spec.feature_dim = 1;
  const auto rows = localization_sweep(spec, ens, {1.0, 2.0, 3.0, 4.0}, RegressionBasis{});
  bool decreasing = true;
  std::string diffs;
  for (std::size_t r = 0; r + 1 < rows.size(); ++r) {
    diffs += fmt(" %.2e", rows[r].next_difference);
    if (r > 0) decreasing = decreasing && rows[r].next_difference < rows[r - 1].next_difference;
  }
  const bool ok = fit.slope < 0.0 && fit.r2 >= 0.9 && within && decreasing;
  return {ok, fmtn("(a) slope %.3f, R2 %.4f, series match %s;", fit.slope, fit.r2, within ? "yes" : "no") + detail +
                  " (b) |Y^{n+1}_0 - Y^n_0|:" + diffs};
}

// 8. Covariance and Hoelder exponents of the sampled sheet.
Outcome fbs_statistics() {
  const HurstParams hp{0.7, 0.4, 1};
  const FbsSampler sampler(hp, TimeGrid::uniform(1.0, 32), {axis(-1.0, 1.0, 33)});
  struct Pair {
    double t, x, s, y;
  };
  const std::vector<Pair> pairs{{1.0, 1.0, 1.0, 1.0}, {0.5, 0.5, 0.25, -0.5}, {0.75, 0.25, 0.5, 0.75}};
  const std::size_t seeds = 10000;
  std::vector<std::vector<double>> prod(pairs.size(), std::vector<double>(seeds));
  // Squared increments by lag: time lags at x = 1, space lags at t = 1.
  const std::vector<int> lags{1, 2, 4, 8};
  std::vector<std::vector<double>> dt2(lags.size(), std::vector<double>(seeds)), dx2 = dt2;
  parallel_for(seeds, [&](std::size_t k) {
    const auto f = sampler.sample(1000 + k);
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      prod[q][k] = (*f)(pairs[q].t, pairs[q].x) * (*f)(pairs[q].s, pairs[q].y);
    }
    for (std::size_t l = 0; l < lags.size(); ++l) {
      const double h = lags[l] / 32.0;
      double st = 0.0, sx = 0.0;
      int nt = 0, nx = 0;
      for (int i = 0; i + lags[l] <= 32; ++i) {
        const double t = i / 32.0;
        st += std::pow((*f)(t + h, 1.0) - (*f)(t, 1.0), 2);
        ++nt;
      }
      for (int i = 0; i + lags[l] <= 32; ++i) {
        const double x = -1.0 + 2.0 * i / 32.0, hx = 2.0 * lags[l] / 32.0;
        sx += std::pow((*f)(1.0, x + hx) - (*f)(1.0, x), 2);
        ++nx;
      }
      dt2[l][k] = st / nt;
      dx2[l][k] = sx / nx;
    }
  });
  bool cov_ok = true;
  std::string detail;
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    const MeanSe m = mean_se(prod[q]);
    const double ref = oracle::fbs_covariance(hp.h0, hp.h, pairs[q].t, {pairs[q].x}, pairs[q].s, {pairs[q].y});
    cov_ok = cov_ok && std::abs(m.mean - ref) <= 3.0 * m.se;
    detail += fmtn(" cov %.4f/%.4f (SE %.4f);", m.mean, ref, m.se);
  }
  std::vector<double> lh, lt, lxs, lx;
  for (std::size_t l = 0; l < lags.size(); ++l) {
    lh.push_back(std::log(lags[l] / 32.0));
    lt.push_back(std::log(mean_se(dt2[l]).mean));
    lxs.push_back(std::log(2.0 * lags[l] / 32.0));
    lx.push_back(std::log(mean_se(dx2[l]).mean));
  }
  const double h0_hat = oracle::least_squares(lh, lt).slope / 2.0;
  const double h_hat = oracle::least_squares(lxs, lx).slope / 2.0;
  const bool holder_ok = std::abs(h0_hat - hp.h0) <= 0.1 && std::abs(h_hat - hp.h) <= 0.1;
  return {cov_ok && holder_ok, detail + fmtn(" exponents %.3f/%.2f and %.3f/%.2f", h0_hat, hp.h0, h_hat, hp.h)};
}

PdeSpec sine_coupled_problem(Driver eta, double n) {
  PdeSpec spec;
  spec.d = 1;
  spec.n = n;
  spec.horizon = 1.0;
  spec.h = [](std::span<const double> x) { return std::cos(x[0]); };
  spec.diffusion = [](std::span<const double>, std::span<double> out) { out[0] = 1.0; };
  spec.coupling = [](double u, std::span<double> out) { out[0] = std::sin(u); };
  spec.field = std::move(eta);
  spec.tag = "sine-coupled";
  return spec;
}

// 9. Finite differences against Monte Carlo for g(y) = sin(y).
Outcome cross_check() {
  const auto t0 = std::chrono::steady_clock::now();
  const Driver eta = mollify(fbs_generate({0.9, 0.6, 1}, TimeGrid::uniform(1.0, 200), {axis(-3.0, 3.0, 61)}, 909), 8);
  const PdeSpec spec = sine_coupled_problem(eta, 3.0);
  const PdeSolution fd = fd_dirichlet_solve(spec, {400, 300, 0.5});
  McOptions mc;
  mc.n_paths = 10000;
  mc.time_steps = 100;
  mc.seed = 910;
  std::vector<PointEstimate> est;
  for (double x : {-1.0, -0.5, 0.0, 0.5, 1.0}) est.push_back(mc_point_estimate(spec, {0.0, {x}}, mc));
  const auto rep = feynman_kac_cross_check(spec, fd, est, 0.0);
  double worst = 0.0;
  std::string detail;
  for (const auto& r : rep.rows) {
    worst = std::max(worst, r.discrepancy);
    detail += fmtn(" %.4f/%.4f", r.fd, r.mc.mean);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst <= 5e-2 && secs < 300.0,
          fmtn("worst |u_FD - u_MC| %.2e (need <= 5e-2), %.1f s;", worst, secs) + detail};
}

// 10. Localization error of the Cauchy problem on growing boxes.
Outcome localization_error() {
  const auto family = [](double n) {
    PdeSpec spec;
    spec.d = 1;
    spec.n = n;
    spec.horizon = 1.0;
    spec.h = [](std::span<const double> x) { return std::cos(x[0]); };
    spec.diffusion = [](std::span<const double>, std::span<double> out) { out[0] = 1.0; };
    spec.generator = [](double, std::span<const double> x, double u, std::span<const double>) {
      return std::sqrt(std::abs(x[0])) * std::sin(u);
    };
    spec.tag = "localization";
    return spec;
  };
  const std::vector<EvalPoint> points{{0.0, {0.0}}, {0.0, {0.5}}, {0.0, {-0.5}}};
  const auto rep = localization_error_experiment(family, {2.0, 4.0, 6.0}, 10.0, points, 0.05, 200);
  std::string diffs;
  for (const auto& r : rep.rows) diffs += fmt(" %.2e", r.max_diff);
  return {rep.monotone && rep.fit.slope < 0.0 && rep.fit.r2 >= 0.8,
          "diffs" + diffs + fmtn(", slope %.3f, R2 %.4f (need < 0, >= 0.8)", rep.fit.slope, rep.fit.r2)};
}

// 11. Skorohod reflection and the Neumann functional with B = 0.
Outcome reflection() {
  const double a = 0.0, b = 1.0;
  const std::size_t steps = 1000, paths = 2000;
  bool confined = true, monotone = true, only_boundary = true;
  for (std::size_t p = 0; p < paths; ++p) {
    std::vector<double> inc(steps);
    for (std::size_t j = 0; j < steps; ++j) inc[j] = std::sqrt(1.0 / steps) * driving_normal(1111, p, j, 0);
    const auto r = reflect_1d(inc, a, b, 0.3);
    for (std::size_t j = 0; j <= steps; ++j) {
      confined = confined && r.x[j] >= a && r.x[j] <= b;
      if (j > 0) {
        monotone = monotone && r.local_time[j] >= r.local_time[j - 1];
        if (r.local_time[j] > r.local_time[j - 1]) only_boundary = only_boundary && (r.x[j] == a || r.x[j] == b);
      }
    }
  }
  const Driver zero = make_analytic_1d(1.0, [](double, double) { return 0.0; }, {});
  const auto h = [](double x) { return x * x + 0.5 * x; };
  NeumannOptions opt;
  opt.n_paths = 10000;
  opt.time_steps = 4000;
  opt.seed = 1112;
  const MeanSe est = neumann_fk_estimate(h, zero, a, b, 0.0, 0.3, opt);
  const double ref = oracle::reflected_expectation(h, a, b, 0.3, 1.0);
  const bool match = std::abs(est.mean - ref) <= 3.0 * est.se;
  return {confined && monotone && only_boundary && match,
          fmtn("confined %s, L nondecreasing %s, pushes on boundary only %s, Neumann %.5f vs %.5f (3 SE %.1e)",
               confined ? "yes" : "no", monotone ? "yes" : "no", only_boundary ? "yes" : "no", est.mean, ref,
               3.0 * est.se)};
}

// 12. Dynamic-programming p-variation against exhaustive enumeration.
Outcome pvar_exactness() {
  std::mt19937_64 gen(1212);
  std::normal_distribution<double> z;
  const TimeGrid grid = TimeGrid::uniform(1.0, 9);
  double worst = 0.0;
  for (int path = 0; path < 200; ++path) {
    std::vector<double> g(10);
    for (double& v : g) v = z(gen);
    const SamplePath sp = SamplePath::scalar(grid, g);
    for (double p : {1.5, 2.0, 3.0}) {
      const double ref = oracle::brute_force_pvar(g, p);
      worst = std::max(worst, std::abs(p_variation(sp, p) - ref) / std::max(1.0, ref));
    }
  }
  return {worst <= 1e-12, fmtn("worst relative difference %.2e over 600 cases (need <= 1e-12)", worst)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"sewing convergence", sewing_convergence},
      {"smooth reduction", smooth_reduction},
      {"flow cocycle", flow_cocycle},
      {"1-D exponential formula", exponential_formula},
      {"linear Feynman-Kac oracle", linear_oracle},
      {"comparison", comparison},
      {"localization", localization},
      {"fBs statistics", fbs_statistics},
      {"nonlinear Feynman-Kac cross-check", cross_check},
      {"localization error", localization_error},
      {"reflection", reflection},
      {"p-variation oracle exactness", pvar_exactness},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("AC%02d %s  %s: %s [%.1f s]\n", id, out.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                out.detail.c_str(), secs);
    std::fflush(stdout);
    failures += out.pass ? 0 : 1;
  }
  return failures;
}
