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

#include "experiments.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>

#include "ybsde/bsde.hpp"
#include "ybsde/common.hpp"
#include "ybsde/flow.hpp"
#include "ybsde/forward.hpp"
#include "ybsde/paths.hpp"
#include "ybsde/pde.hpp"
#include "ybsde/sewing.hpp"
#include "ybsde/stats.hpp"

namespace ybsde::cli {

namespace {

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

const char* pass(bool ok) { return ok ? "PASS" : "FAIL"; }

long long as_int(std::size_t v) { return static_cast<long long>(v); }

std::string path_in(const RunContext& ctx, const std::string& name) {
  return (std::filesystem::path(ctx.out_dir) / name).string();
}

/// Brownian motion on the grid from the library's counter-based normals.
SamplePath brownian_on(const TimeGrid& grid, std::uint64_t seed, double scale) {
  std::vector<double> w(grid.size(), 0.0);
  for (std::size_t j = 0; j < grid.steps(); ++j) {
    w[j + 1] = w[j] + scale * std::sqrt(grid.dt(j)) * driving_normal(seed, 0, j, 0);
  }
  return SamplePath::scalar(grid, std::move(w));
}

/// Scalar path x: {"type": "brownian", "scale": s} or {"type": "function", "fn": {...}}.
SamplePath read_path(std::optional<Section> s, const TimeGrid& grid, std::uint64_t seed) {
  if (!s) return brownian_on(grid, seed, 1.0);
  const std::string type = s->text("type");
  SamplePath out = SamplePath::constant(grid, 0.0);
  if (type == "brownian") {
    out = brownian_on(grid, seed, s->number("scale", 1.0));
  } else if (type == "function") {
    const Function1d f = read_function(s->child("fn"));
    out = SamplePath::from_function(grid, [f](double t) { return f(t); });
  } else {
    throw ConfigError(s->key_path("type") + ": expected brownian or function");
  }
  s->finish();
  return out;
}

std::uint64_t root_seed(Section& root) { return root.seed("seed"); }

std::vector<int> read_ints(Section& s, const std::string& key) {
  std::vector<int> out;
  for (double v : s.numbers(key)) {
    if (v != std::floor(v) || v < 1.0) throw ConfigError(s.key_path(key) + " must hold positive integers");
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw ConfigError(s.key_path(key) + " must not be empty");
  return out;
}

std::vector<double> read_list(Section& s, const std::string& key) {
  std::vector<double> out = s.numbers(key);
  if (out.empty()) throw ConfigError(s.key_path(key) + " must not be empty");
  return out;
}

std::vector<std::string> point_header(std::size_t d) {
  std::vector<std::string> h{"t"};
  for (std::size_t k = 0; k < d; ++k) h.push_back("x" + std::to_string(k + 1));
  return h;
}

void append_point(std::vector<Cell>& row, const EvalPoint& pt) {
  row.emplace_back(pt.t);
  for (double v : pt.x) row.emplace_back(v);
}

// --- integrate ----------------------------------------------------------------

ExperimentResult integrate(Section& root, const RunContext& ctx) {
  const std::uint64_t seed = root_seed(root);
  const double horizon = root.number("horizon", 1.0);
  const std::size_t steps = root.count("steps");
  const int levels = static_cast<int>(root.count("levels"));
  const double tol = root.number("tol", 0.0);
  if (steps == 0 || levels > 20) throw ConfigError("integrate: need steps > 0 and levels <= 20");
  const TimeGrid grid = TimeGrid::uniform(horizon, steps);
  struct Case {
    std::string name;
    Driver eta;
    SamplePath x;
    Function1d y;
  };
  std::vector<Case> cases;
  std::size_t k = 0;
  for (auto& c : root.children("cases")) {
    ++k;
    const std::string name = c.text("name", "case " + std::to_string(k));
    Driver eta = read_driver(c.child("driver"), horizon, 1, seed + 100 * k);
    SamplePath x = read_path(c.optional_child("x"), grid, seed + 100 * k + 1);
    Function1d y;
    if (auto ys = c.optional_child("y")) y = read_function(*ys);
    c.finish();
    cases.push_back({name, std::move(eta), std::move(x), y});
  }
  root.finish();
  ExperimentResult res;
  if (ctx.check_only) return res;

  res.table.header = {"case", "young", "riemann", "abs_difference", "level_used", "last_cauchy"};
  double worst = 0.0;
  bool all_riemann = true;
  for (const auto& c : cases) {
    std::vector<double> yv(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) yv[i] = c.y(c.x(i));
    const SamplePath y = SamplePath::scalar(grid, yv);
    const IntegralResult ir = nonlinear_young_integral(y, c.x, c.eta, {}, levels, tol);
    const Cell cauchy = ir.cauchy.empty() ? Cell{} : Cell{ir.cauchy.back()};
    if (!c.eta->has_time_derivative()) {
      all_riemann = false;
      res.table.add({c.name, ir.total(), Cell{}, Cell{}, static_cast<long long>(ir.level_used), cauchy});
      continue;
    }
    // x and y are piecewise linear, so the integrand is smooth on every cell.
    double quad = 0.0;
    for (std::size_t i = 0; i < grid.steps(); ++i) {
      quad += boost::math::quadrature::gauss<double, 20>::integrate(
          [&](double r) {
            const double xr = c.x.interpolate(r);
            double d[1];
            c.eta->time_derivative(r, std::span<const double>(&xr, 1), d);
            return y.interpolate(r) * d[0];
          },
          grid[i], grid[i + 1]);
    }
    const double diff = std::abs(ir.total() - quad);
    worst = std::max(worst, diff);
    res.table.add({c.name, ir.total(), quad, diff, static_cast<long long>(ir.level_used), cauchy});
  }
  res.summary.push_back(fmt("cases: %zu", cases.size()));
  if (all_riemann) res.summary.push_back(fmt("worst |young - riemann|: %.3e", worst));
  res.details["worst_abs_difference"] = worst;
  return res;
}

// --- flow ---------------------------------------------------------------------

ExperimentResult flow(Section& root, const RunContext& ctx) {
  const std::uint64_t seed = root_seed(root);
  const double horizon = root.number("horizon", 1.0);
  const std::size_t steps = root.count("steps");
  const int levels = static_cast<int>(root.count("levels", 0));
  const std::size_t n = root.count("n", 1);
  const Driver eta = read_driver(root.child("driver"), horizon, 1, seed + 1);
  const std::vector<double> alpha = root.numbers("alpha");
  const TimeGrid grid = TimeGrid::uniform(horizon, steps);
  const SamplePath x = read_path(root.optional_child("x"), grid, seed + 2);
  const int exp_levels = static_cast<int>(root.count("exp_levels", 12));
  root.finish();
  const std::size_t m = eta->channels();
  if (n == 0 || alpha.size() != m * n * n) {
    throw ConfigError("alpha must hold channels * n * n = " + std::to_string(m * n * n) + " numbers");
  }
  if (steps == 0 || steps > 512) throw ConfigError("steps must be in [1, 512]");
  ExperimentResult res;
  if (ctx.check_only) return res;

  std::vector<double> vals;
  for (std::size_t i = 0; i < grid.size(); ++i) vals.insert(vals.end(), alpha.begin(), alpha.end());
  const FlowCoefficient coeff{SamplePath(grid, alpha.size(), vals), n};
  const auto factors = flow_steps(coeff, x, *eta, levels);
  std::vector<FlowMatrix> flows;
  for (std::size_t t = 0; t < grid.size(); ++t) flows.push_back(flow_from_steps(grid, factors, t));
  double cocycle = 0.0;
  for (std::size_t t = 0; t < grid.size(); ++t) {
    for (std::size_t s = t; s < grid.size(); ++s) {
      for (std::size_t u = s; u < grid.size(); ++u) {
        const Eigen::MatrixXd& rhs = flows[t].at(u);
        const double err = (flows[s].at(u) * flows[t].at(s) - rhs).cwiseAbs().maxCoeff();
        cocycle = std::max(cocycle, err / std::max(rhs.cwiseAbs().maxCoeff(), 1e-300));
      }
    }
  }
  const FlowMatrix inv = inverse_flow(flows[0]);
  std::vector<double> closed;
  if (n == 1) {
    std::vector<double> a1(grid.size() * m);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (std::size_t c = 0; c < m; ++c) a1[i * m + c] = alpha[c];
    }
    closed = exp_formula_1d(SamplePath(grid, m, a1), x, eta, {}, exp_levels);
  }
  res.table.header = {"index", "t"};
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) res.table.header.push_back("g" + std::to_string(r + 1) + std::to_string(c + 1));
  }
  res.table.header.push_back("inverse_residual");
  if (n == 1) res.table.header.push_back("exp_formula");
  double worst_inv = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<Cell> row{as_int(i), grid[i]};
    const Eigen::MatrixXd& g = flows[0].at(i);
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
      for (Eigen::Index c = 0; c < g.cols(); ++c) row.emplace_back(g(r, c));
    }
    const double ir = (g * inv.at(i) - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
    worst_inv = std::max(worst_inv, ir);
    row.emplace_back(ir);
    if (n == 1) row.emplace_back(closed[i]);
    res.table.add(std::move(row));
  }
  res.summary.push_back(fmt("cocycle max relative error: %.3e", cocycle));
  res.summary.push_back(fmt("max |G G^-1 - I|: %.3e", worst_inv));
  if (n == 1) {
    double gap = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) gap = std::max(gap, std::abs(flows[0].at(i)(0, 0) - closed[i]));
    res.summary.push_back(fmt("max |Euler flow - exp formula|: %.3e", gap));
  }
  res.details["cocycle_error"] = cocycle;
  res.details["inverse_residual"] = worst_inv;
  return res;
}

// --- BSDE experiments ---------------------------------------------------------

struct BsdeSetup {
  ForwardConfig fwd;
  Driver eta;
  RegressionBasis basis;
  PicardOptions picard;
  std::uint64_t seed;
};

BsdeSetup read_bsde_setup(Section& root) {
  BsdeSetup s;
  s.seed = root_seed(root);
  s.fwd = read_forward(root.child("forward"));
  s.eta = read_driver(root.child("driver"), s.fwd.horizon, s.fwd.spec.d, s.seed + 1);
  s.basis = read_basis(root.optional_child("basis"));
  s.picard = read_picard(root.optional_child("picard"));
  return s;
}

PathEnsemble simulate(const BsdeSetup& s) {
  return euler_maruyama(s.fwd.spec, TimeGrid::uniform(s.fwd.horizon, s.fwd.steps), s.fwd.paths, s.seed);
}

ExperimentResult linear_bsde(Section& root, const RunContext& ctx) {
  const BsdeSetup setup = read_bsde_setup(root);
  const double a = root.number("alpha");
  const double f = root.number("drift", 0.0);
  const std::vector<double> g = root.numbers("girsanov", std::vector<double>(setup.fwd.spec.d, 0.0));
  const Function1d h = read_function(root.child("terminal"));
  root.finish();
  if (g.size() != setup.fwd.spec.d) throw ConfigError("girsanov must have d entries");
  ExperimentResult res;
  if (ctx.check_only) return res;

  LinearBsdeSpec lin;
  lin.field = setup.eta;
  lin.n = 1;
  const std::size_t m = setup.eta->channels();
  lin.alpha = [a, m](double, std::span<const double>, std::span<double> out) {
    for (std::size_t c = 0; c < m; ++c) out[c] = a;
  };
  if (f != 0.0) lin.drift = [f](double, std::span<const double>, std::span<double> out) { out[0] = f; };
  if (std::any_of(g.begin(), g.end(), [](double v) { return v != 0.0; })) {
    lin.girsanov = [g](double, std::span<const double>, std::span<double> out) {
      std::copy(g.begin(), g.end(), out.begin());
    };
  }
  lin.terminal = [h](const PathView& p, std::size_t i, std::span<double> out) { out[0] = h(p.at(i)); };
  const PathEnsemble ens = simulate(setup);
  const BsdeSolution sol = backward_solve(lin.to_bsde(setup.fwd.spec), ens, setup.basis, setup.picard);
  const LinearEstimate est = linear_closed_form(lin, ens, setup.basis);
  const MeanSe y0 = sol.y0(), cf = est.y0[0];
  const double combined = std::sqrt(y0.se * y0.se + cf.se * cf.se);
  const double gap = std::abs(y0.mean - cf.mean);
  res.table.header = {"method", "y0", "se"};
  res.table.add({std::string("backward"), y0.mean, y0.se});
  res.table.add({std::string("closed_form"), cf.mean, cf.se});
  res.summary.push_back(fmt("Y0 backward %.6f (SE %.2e), closed form %.6f (SE %.2e)", y0.mean, y0.se, cf.mean, cf.se));
  res.summary.push_back(fmt("agreement within 3 combined SE: %s (|gap| %.3e, 3 SE %.3e)", pass(gap <= 3.0 * combined),
                            gap, 3.0 * combined));
  res.details["gap"] = gap;
  res.details["combined_se"] = combined;
  return res;
}

ExperimentResult nonlinear_bsde(Section& root, const RunContext& ctx) {
  const BsdeSetup setup = read_bsde_setup(root);
  const BsdeSpec spec = read_bsde(root.child("bsde"), setup.fwd.spec, setup.eta);
  root.finish();
  ExperimentResult res;
  if (ctx.check_only) return res;

  const PathEnsemble ens = simulate(setup);
  const BsdeSolution sol = backward_solve(spec, ens, setup.basis, setup.picard);
  const auto& grid = sol.grid;
  std::vector<const StepLog*> by_index(grid.steps(), nullptr);
  for (const auto& s : sol.steps) by_index[s.index] = &s;
  res.table.header = {"index", "t", "mean_y", "mean_z", "iterations", "contraction", "halved"};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double my = 0.0, mz = 0.0;
    for (std::size_t p = 0; p < sol.n_paths; ++p) {
      my += sol.y_at(p, i);
      if (i < grid.steps()) mz += sol.z_at(p, i);
    }
    my /= static_cast<double>(sol.n_paths);
    mz /= static_cast<double>(sol.n_paths);
    if (i < grid.steps()) {
      const StepLog& s = *by_index[i];
      res.table.add({as_int(i), grid[i], my, mz, static_cast<long long>(s.iterations), s.contraction,
                     static_cast<long long>(s.halved ? 1 : 0)});
    } else {
      res.table.add({as_int(i), grid[i], my, Cell{}, Cell{}, Cell{}, Cell{}});
    }
  }
  const MeanSe y0 = sol.y0();
  std::size_t halved = 0;
  for (const auto& s : sol.steps) halved += s.halved ? 1 : 0;
  res.summary.push_back(fmt("Y0 = %.6f (SE %.2e), %zu paths, %zu steps", y0.mean, y0.se, sol.n_paths, grid.steps()));
  res.summary.push_back(fmt("halved steps: %zu", halved));
  save_solution_manifest(sol, spec, ens, setup.basis, setup.picard, path_in(ctx, "solution.json"));
  res.artifacts.push_back("solution.json");
  res.details["y0"] = {{"mean", y0.mean}, {"se", y0.se}};
  return res;
}

ExperimentResult localize(Section& root, const RunContext& ctx) {
  const BsdeSetup setup = read_bsde_setup(root);
  const BsdeSpec spec = read_bsde(root.child("bsde"), setup.fwd.spec, setup.eta);
  const std::vector<double> n_list = read_list(root, "n_list");
  root.finish();
  ExperimentResult res;
  if (ctx.check_only) return res;

  const PathEnsemble ens = simulate(setup);
  const auto rows = localization_sweep(spec, ens, n_list, setup.basis, setup.picard);
  res.table.header = {"n", "y0", "se", "next_difference", "exit_probability", "exit_se"};
  bool decreasing = true;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const Cell next = std::isnan(row.next_difference) ? Cell{} : Cell{row.next_difference};
    res.table.add({row.n, row.y0.mean, row.y0.se, next, row.exit_probability.mean, row.exit_probability.se});
    if (r > 0 && r + 1 < rows.size()) decreasing = decreasing && row.next_difference < rows[r - 1].next_difference;
  }
  res.summary.push_back(fmt("|Y^{n'}_0 - Y^n_0| strictly decreasing: %s", pass(decreasing)));
  return res;
}

ExperimentResult compare(Section& root, const RunContext& ctx) {
  const BsdeSetup setup = read_bsde_setup(root);
  const BsdeSpec a = read_bsde(root.child("a"), setup.fwd.spec, setup.eta);
  const BsdeSpec b = read_bsde(root.child("b"), setup.fwd.spec, setup.eta);
  const double allowance = root.number("allowance", 1e-2);
  root.finish();
  ExperimentResult res;
  if (ctx.check_only) return res;

  const PathEnsemble ens = simulate(setup);
  const auto rep = comparison_experiment(a, b, ens, setup.basis, setup.picard, allowance);
  res.table.header = {"fraction_ordered", "allowance", "min_difference", "y0_difference", "se"};
  res.table.add({rep.fraction_ordered, rep.allowance, rep.min_difference, rep.y0_difference.mean,
                 rep.y0_difference.se});
  res.summary.push_back(fmt("fraction of cells with Y_A >= Y_B - %.3g: %.4f", allowance, rep.fraction_ordered));
  res.summary.push_back(fmt("Y_A(0) - Y_B(0) = %.6f, 3 SE = %.3e", rep.y0_difference.mean, 3.0 * rep.y0_difference.se));
  return res;
}

// --- PDE experiments ----------------------------------------------------------

ExperimentResult pde_table(Section& root, const RunContext& ctx) {
  const std::uint64_t seed = root_seed(root);
  Section pde = root.child("pde");
  const double horizon = pde.number("horizon");
  const std::size_t d = pde.count("d", 1);
  Section drv = root.child("driver");
  if (drv.has("mollify")) throw ConfigError("pde-table: driver.mollify is set by m_list, remove it");
  const Driver eta = read_driver(drv, horizon, d, seed + 1);
  const PdeSpec base = read_pde(pde, eta, false);
  const std::vector<double> n_list = read_list(root, "n_list");
  const std::vector<int> m_list = read_ints(root, "m_list");
  const std::vector<EvalPoint> points = read_points(root, "points", d);
  const double dx = root.number("dx");
  const std::size_t time_steps = root.count("time_steps");
  const double threshold = root.number("threshold");
  root.finish();
  ExperimentResult res;
  if (ctx.check_only) return res;

  const auto family = [&](double n, int m) {
    PdeSpec s = base;
    s.n = n;
    s.field = mollify(eta, m);
    return s;
  };
  const auto table = young_pde_table(family, n_list, m_list, points, dx, time_steps, threshold);
  res.table.header = {"n", "m", "point"};
  for (const auto& h : point_header(d)) res.table.header.push_back(h);
  res.table.header.push_back("value");
  for (std::size_t in = 0; in < n_list.size(); ++in) {
    for (std::size_t im = 0; im < m_list.size(); ++im) {
      for (std::size_t ip = 0; ip < points.size(); ++ip) {
        std::vector<Cell> row{n_list[in], static_cast<long long>(m_list[im]), as_int(ip)};
        append_point(row, points[ip]);
        row.emplace_back(table.value(in, im, ip));
        res.table.add(std::move(row));
      }
    }
  }
  const std::size_t nm = m_list.size();
  std::string dn = "max |u^{n+1,m} - u^{n,m}| at the largest m:", dm = "max |u^{n,m+1} - u^{n,m}| at the largest n:";
  for (std::size_t in = 0; in + 1 < n_list.size(); ++in) dn += fmt(" %.3e", table.diff_n[in * nm + nm - 1]);
  for (std::size_t im = 0; im + 1 < nm; ++im) dm += fmt(" %.3e", table.diff_m[(n_list.size() - 1) * (nm - 1) + im]);
  res.summary.push_back(dn);
  res.summary.push_back(dm);
  res.summary.push_back(fmt("converged below %.3g: %s", threshold, pass(table.converged)));
  res.details["diff_n"] = table.diff_n;
  res.details["diff_m"] = table.diff_m;
  return res;
}

ExperimentResult cross_check(Section& root, const RunContext& ctx) {
  const std::uint64_t seed = root_seed(root);
  Section pde = root.child("pde");
  const double horizon = pde.number("horizon");
  const std::size_t d = pde.count("d", 1);
  const Driver eta = read_driver(root.child("driver"), horizon, d, seed + 1);
  const PdeSpec spec = read_pde(pde, eta, true);
  FdOptions fd;
  if (auto s = root.optional_child("fd")) {
    fd.time_steps = s->count("time_steps", fd.time_steps);
    fd.space_steps = s->count("space_steps", fd.space_steps);
    fd.theta = s->number("theta", fd.theta);
    s->finish();
  }
  McOptions mc;
  Section mcs = root.child("mc");
  mc.n_paths = mcs.count("paths");
  mc.time_steps = mcs.count("steps");
  mcs.finish();
  mc.seed = seed;
  mc.basis = read_basis(root.optional_child("basis"));
  mc.picard = read_picard(root.optional_child("picard"));
  const std::vector<EvalPoint> points = read_points(root, "points", d);
  const double fd_error = root.number("fd_error", 0.0);
  root.finish();
  ExperimentResult res;
  if (ctx.check_only) return res;

  const PdeSolution sol = fd_dirichlet_solve(spec, fd);
  std::vector<PointEstimate> est;
  for (std::size_t k = 0; k < points.size(); ++k) {
    McOptions o = mc;
    o.seed = seed + k;
    est.push_back(mc_point_estimate(spec, points[k], o));
  }
  const auto rep = feynman_kac_cross_check(spec, sol, est, fd_error);
  res.table.header = point_header(d);
  for (const char* h : {"fd", "mc", "se", "discrepancy", "tolerance", "pass"}) res.table.header.push_back(h);
  double worst = 0.0;
  for (const auto& r : rep.rows) {
    std::vector<Cell> row;
    append_point(row, r.point);
    for (double v : {r.fd, r.mc.mean, r.mc.se, r.discrepancy, r.tolerance}) row.emplace_back(v);
    row.emplace_back(static_cast<long long>(r.pass ? 1 : 0));
    res.table.add(std::move(row));
    worst = std::max(worst, r.discrepancy);
  }
  res.summary.push_back(fmt("worst |u_FD - u_MC|: %.3e", worst));
  res.summary.push_back(fmt("all points within FD error + 3 SE: %s", pass(rep.all_pass)));
  return res;
}

ExperimentResult localization_error(Section& root, const RunContext& ctx) {
  Section pde = root.child("pde");
  const double horizon = pde.number("horizon");
  const std::size_t d = pde.count("d", 1);
  const std::uint64_t seed = root.seed("seed", 1);
  const json zero = {{"kind", "zero"}};
  const auto drv = root.optional_child("driver");
  const Driver eta = read_driver(drv ? *drv : Section(zero, "driver"), horizon, d, seed + 1);
  const PdeSpec base = read_pde(pde, eta, false);
  const std::vector<double> n_list = read_list(root, "n_list");
  const double n_max = root.number("n_max");
  const std::vector<EvalPoint> points = read_points(root, "points", d);
  const double dx = root.number("dx");
  const std::size_t time_steps = root.count("time_steps");
  root.finish();
  ExperimentResult res;
  if (ctx.check_only) return res;

  const auto rep = localization_error_experiment(
      [&](double n) {
        PdeSpec s = base;
        s.n = n;
        return s;
      },
      n_list, n_max, points, dx, time_steps);
  res.table.header = {"n", "max_diff"};
  for (std::size_t k = 0; k < points.size(); ++k) res.table.header.push_back("diff_" + std::to_string(k + 1));
  for (const auto& r : rep.rows) {
    std::vector<Cell> row{r.n, r.max_diff};
    for (double v : r.diff) row.emplace_back(v);
    res.table.add(std::move(row));
  }
  res.summary.push_back(fmt("differences strictly decreasing in n: %s", pass(rep.monotone)));
  res.summary.push_back(fmt("log max_diff against n^2: slope %.4f, R2 %.4f", rep.fit.slope, rep.fit.r2));
  return res;
}

ExperimentResult neumann(Section& root, const RunContext& ctx) {
  const std::uint64_t seed = root_seed(root);
  const double horizon = root.number("horizon", 1.0);
  const Function1d h = read_function(root.child("h"));
  const Driver eta = read_driver(root.child("driver"), horizon, 1, seed + 1);
  const double a = root.number("a"), b = root.number("b"), t = root.number("t", 0.0), x = root.number("x");
  NeumannOptions opt;
  opt.n_paths = root.count("paths");
  opt.time_steps = root.count("steps");
  opt.sigma = root.number("sigma", 1.0);
  opt.levels = static_cast<int>(root.count("levels", 0));
  opt.seed = seed;
  root.finish();
  ExperimentResult res;
  if (ctx.check_only) return res;

  const MeanSe est = neumann_fk_estimate([h](double v) { return h(v); }, eta, a, b, t, x, opt);
  res.table.header = {"t", "x", "estimate", "se"};
  res.table.add({t, x, est.mean, est.se});
  res.summary.push_back(fmt("E[h(X_T) exp(int B(dr, X_r))] at (t, x) = (%.4g, %.4g): %.6f (SE %.2e)", t, x, est.mean,
                            est.se));
  return res;
}

// --- fBs and assumptions ------------------------------------------------------

ExperimentResult fbs_generate_run(Section& root, const RunContext& ctx) {
  const std::uint64_t seed = root_seed(root);
  const double horizon = root.number("horizon", 1.0);
  const std::size_t steps = root.count("time_steps");
  Section hs = root.child("hurst");
  HurstParams hp{hs.number("H0"), hs.number("H"), hs.count("d", 1)};
  hs.finish();
  Section sp = root.child("space");
  const double lo = sp.number("lo"), hi = sp.number("hi");
  const std::size_t points = sp.count("points");
  sp.finish();
  const std::string encoding = root.text("encoding", "binary");
  const double theta = root.number("theta", 0.01);
  root.finish();
  try {
    hp.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("hurst: ") + e.what());
  }
  if (encoding != "binary" && encoding != "csv") throw ConfigError("encoding must be binary or csv");
  if (steps == 0 || points < 2 || !(hi > lo)) throw ConfigError("need time_steps > 0, points >= 2 and lo < hi");
  ExperimentResult res;
  if (ctx.check_only) return res;

  std::vector<double> axis(points);
  for (std::size_t i = 0; i < points; ++i) axis[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  const auto field = fbs_generate(hp, TimeGrid::uniform(horizon, steps), std::vector<std::vector<double>>(hp.d, axis), seed);
  save_fbs(*field, path_in(ctx, "field"), encoding == "csv" ? FbsEncoding::csv : FbsEncoding::binary);
  res.artifacts.push_back(encoding == "csv" ? "field.csv" : "field.bin");
  res.artifacts.push_back("field.json");

  res.table.header = point_header(hp.d);
  res.table.header.push_back("value");
  const auto& axes = field->axes();
  std::vector<std::size_t> idx(hp.d, 0);
  for (std::size_t it = 0; it < field->times().size(); ++it) {
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      std::vector<Cell> row{field->times()[it]};
      for (std::size_t k = 0; k < hp.d; ++k) row.emplace_back(axes[k][idx[k]]);
      row.emplace_back(field->node(it, idx));
      res.table.add(std::move(row));
      std::size_t k = hp.d;
      while (k > 0 && ++idx[k - 1] == axes[k - 1].size()) idx[--k] = 0;
      if (k == 0) break;
    }
  }
  const auto report = assumption_check(fbs_regularity(hp, theta), hp, theta);
  res.summary.push_back(fmt("lattice %zu time x %zu space nodes per axis, seed %llu", field->times().size(),
                            axes[0].size(), static_cast<unsigned long long>(seed)));
  std::string text = report.summary();
  for (std::size_t pos; (pos = text.find('\n')) != std::string::npos; text.erase(0, pos + 1)) {
    res.summary.push_back(text.substr(0, pos));
  }
  return res;
}

ExperimentResult assumptions(Section& root, const RunContext& ctx) {
  std::optional<RegularityParams> rp;
  if (auto s = root.optional_child("regularity")) {
    RegularityParams r;
    r.tau = s->number("tau");
    r.lambda = s->number("lambda");
    r.beta = s->number("beta", 0.0);
    r.p = s->number("p", 2.5);
    if (s->has("eps")) r.eps = s->number("eps");
    s->finish();
    rp = r;
  }
  std::optional<HurstParams> hp;
  if (auto s = root.optional_child("hurst")) {
    hp = HurstParams{s->number("H0"), s->number("H"), s->count("d", 1)};
    s->finish();
  }
  std::optional<double> theta;
  if (root.has("theta")) theta = root.number("theta");
  root.finish();
  if (!rp && !hp) throw ConfigError("missing required key: regularity (or hurst)");
  try {
    if (rp) rp->validate();
    if (hp) hp->validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  ExperimentResult res;
  if (ctx.check_only) return res;

  if (!rp) rp = fbs_regularity(*hp, theta.value_or(0.01));
  const AssumptionReport rep = assumption_check(*rp, hp, hp ? std::optional<double>(theta.value_or(0.01)) : theta);
  res.table.header = {"check", "result"};
  res.table.add({std::string("H0"), std::string(pass(rep.h0))});
  res.table.add({std::string("H0_prime"), std::string(pass(rep.h0_prime))});
  res.table.add({std::string("H2_eps"), std::string(pass(rep.h2_eps))});
  res.table.add({std::string("eps_witness"), rep.eps_witness ? Cell{*rep.eps_witness} : Cell{}});
  if (rep.hurst_region) res.table.add({std::string("hurst_region"), std::string(pass(*rep.hurst_region))});
  if (rep.hurst_implied_h0) res.table.add({std::string("hurst_implied_H0"), std::string(pass(*rep.hurst_implied_h0))});
  std::string text = rep.summary();
  for (std::size_t pos; (pos = text.find('\n')) != std::string::npos; text.erase(0, pos + 1)) {
    res.summary.push_back(text.substr(0, pos));
  }
  return res;
}

using Runner = ExperimentResult (*)(Section&, const RunContext&);

const std::map<std::string, Runner>& registry() {
  static const std::map<std::string, Runner> r{
      {"integrate", integrate},
      {"flow", flow},
      {"linear-bsde", linear_bsde},
      {"nonlinear-bsde", nonlinear_bsde},
      {"localize", localize},
      {"compare", compare},
      {"pde-table", pde_table},
      {"cross-check", cross_check},
      {"localization-error", localization_error},
      {"neumann", neumann},
      {"fbs-generate", fbs_generate_run},
      {"assumptions", assumptions},
  };
  return r;
}

}  // namespace

std::vector<std::string> experiment_names() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : registry()) out.push_back(name);
  return out;
}

ExperimentResult run_experiment(const json& root, const RunContext& ctx) {
  Section s(root, "");
  const std::string name = s.text("experiment");
  s.text("output_dir", "");
  const auto it = registry().find(name);
  if (it == registry().end()) {
    std::string known;
    for (const auto& n : experiment_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("experiment: unknown name '" + name + "' (one of " + known + ")");
  }
  return it->second(s, ctx);
}

}  // namespace ybsde::cli
