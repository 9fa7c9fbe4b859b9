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

// Bounded-domain terminal problems for the time-mollified Young PDE
//
//   d_t u + L u + f(t, x, u, sigma^T grad u) + sum_i g_i(u) d_t eta_i(t, x) = 0  on [0, T) x D_n,
//   u(T, x) = h(x),   u(t, x) = h(x) on the boundary of D_n = [-n, n]^d,
//
// with L u = 1/2 tr(sigma sigma^T D^2 u) + b . grad u, solved by finite
// differences, plus the Monte Carlo counterparts used to cross-check them.

#ifndef YBSDE_PDE_HPP_
#define YBSDE_PDE_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ybsde/bsde.hpp"
#include "ybsde/driver.hpp"
#include "ybsde/forward.hpp"
#include "ybsde/regression.hpp"
#include "ybsde/stats.hpp"

namespace ybsde {

using ScalarField = std::function<double(std::span<const double> x)>;
/// f(t, x, u, sigma^T grad u).
using PdeGenerator = std::function<double(double t, std::span<const double> x, double u, std::span<const double> sz)>;
/// g(u, out): one entry per driver channel.
using PdeCoupling = std::function<void(double u, std::span<double> out)>;

struct PdeSpec {
  std::size_t d = 1;  // 1 or 2
  double n = 1.0;     // half-width of the box
  double horizon = 1.0;
  ScalarField h;
  /// Time-independent coefficients: b(x, out[d]) and sigma(x, out[d * d]).
  std::function<void(std::span<const double> x, std::span<double> out)> drift;
  std::function<void(std::span<const double> x, std::span<double> out)> diffusion;
  PdeGenerator generator;  // null means 0
  PdeCoupling coupling;    // null means 0
  Driver field;            // needs a time derivative when coupling is set
  double nu = 1e-8;        // ellipticity floor on sigma sigma^T
  std::string tag;

  void validate() const;
  std::uint64_t hash() const;
};

struct FdOptions {
  std::size_t time_steps = 200;
  std::size_t space_steps = 200;  // cells per axis
  double theta = 0.5;             // 0 explicit, 1/2 Crank-Nicolson, 1 implicit
};

struct PdeSolution {
  std::size_t d = 1;
  double n = 1.0;
  double dt = 0.0, dx = 0.0, theta = 0.5;
  std::vector<double> times;  // uniform, times.back() = horizon
  std::vector<double> axis;   // nodes of every axis
  std::vector<double> u;      // [time][axis 0][axis 1], row-major
  std::uint64_t spec_hash = 0;

  std::size_t nodes() const;
  double at(std::size_t k, std::size_t flat) const { return u[k * nodes() + flat]; }
  /// Multilinear in space at time index k.
  double interpolate(std::size_t k, std::span<const double> x) const;
  /// Linear in time between the two neighbouring time levels.
  double value(double t, std::span<const double> x) const;
};

/// Theta scheme backward in time with centered differences. The nonlinear
/// terms are explicit, evaluated at the half step after one fixed-point
/// sweep. Throws InvalidArgument when the CFL bound fails for theta = 0
/// (the message carries the largest admissible dt) or when sigma sigma^T
/// drops below nu on a node.
PdeSolution fd_dirichlet_solve(const PdeSpec& spec, const FdOptions& options = {});

/// eta(t0 + s, x) - eta(t0, x), so a problem started at t0 can be simulated
/// on a grid starting at 0.
Driver time_offset(Driver field, double t0);

// --- double limit table -------------------------------------------------------

struct EvalPoint {
  double t = 0.0;
  std::vector<double> x;
};

struct YoungPdeTable {
  std::vector<double> n_list;
  std::vector<int> m_list;
  std::vector<EvalPoint> points;
  std::vector<double> values;  // [n][m][point]
  std::vector<double> diff_n;  // [n - 1][m], max over points of |u^{n+1,m} - u^{n,m}|
  std::vector<double> diff_m;  // [n][m - 1]
  double threshold = 0.0;
  bool converged = false;  // last diff_n and diff_m rows below threshold

  double value(std::size_t in, std::size_t im, std::size_t ip) const {
    return values[(in * m_list.size() + im) * points.size() + ip];
  }
};

/// family(n, m) returns the problem on [-n, n]^d with driver mollified at m.
/// The mesh width dx is shared by all boxes.
YoungPdeTable young_pde_table(const std::function<PdeSpec(double n, int m)>& family,
                              const std::vector<double>& n_list, const std::vector<int>& m_list,
                              const std::vector<EvalPoint>& points, double dx, std::size_t time_steps,
                              double threshold);

// --- Monte Carlo side -----------------------------------------------------------

struct McOptions {
  std::size_t n_paths = 10000;
  std::size_t time_steps = 100;
  std::uint64_t seed = 1;
  RegressionBasis basis;
  PicardOptions picard;
};

struct PointEstimate {
  EvalPoint point;
  MeanSe value;
  std::uint64_t spec_hash = 0;
};

/// Y_t of the BSDE attached to the problem, started at (t, x) and stopped at
/// the first grid exit of the box (sup norm), where Xi = h at the projection
/// of X on the box.
PointEstimate mc_point_estimate(const PdeSpec& spec, const EvalPoint& point, const McOptions& options);

/// The BSDE attached to a problem started at time t0.
BsdeSpec bsde_from_pde(const PdeSpec& spec, std::vector<double> x0, double t0);

struct CrossCheckRow {
  EvalPoint point;
  double fd = 0.0;
  MeanSe mc;
  double discrepancy = 0.0;
  double tolerance = 0.0;  // fd_error + 3 SE
  bool pass = false;
};

struct CrossCheckReport {
  std::vector<CrossCheckRow> rows;
  bool all_pass = true;
};

/// Compares the finite-difference solution with Monte Carlo estimates of the
/// same problem. Throws InvalidArgument("spec hash mismatch") when the inputs
/// come from different specs.
CrossCheckReport feynman_kac_cross_check(const PdeSpec& spec, const PdeSolution& fd,
                                         const std::vector<PointEstimate>& mc, double fd_error);

// --- localization error ---------------------------------------------------------

struct LocalizationErrorRow {
  double n;
  std::vector<double> diff;  // |u^n - u^{n_max}| per point
  double max_diff;
};

struct LocalizationErrorReport {
  double n_max;
  std::vector<LocalizationErrorRow> rows;
  bool monotone = false;  // max_diff strictly decreasing in n
  LinearFit fit;          // log max_diff against n^2
};

LocalizationErrorReport localization_error_experiment(const std::function<PdeSpec(double n)>& family,
                                                      const std::vector<double>& n_list, double n_max,
                                                      const std::vector<EvalPoint>& points, double dx,
                                                      std::size_t time_steps);

// --- Neumann problem in one dimension -------------------------------------------

struct NeumannOptions {
  std::size_t n_paths = 10000;
  std::size_t time_steps = 1000;
  std::uint64_t seed = 1;
  double sigma = 1.0;  // X = x + sigma W reflected on [a, b]
  int levels = 0;      // dyadic refinement of the Young integral per step
};

/// E[h(X_T) exp(int_t^T B(dr, X_r))] for X reflected on [a, b] and started at
/// x at time t.
MeanSe neumann_fk_estimate(const std::function<double(double)>& h, Driver field, double a, double b, double t,
                           double x, const NeumannOptions& options);

// --- export ---------------------------------------------------------------------

/// CSV with header "t,x1[,x2],u" and a JSON manifest next to it.
void save_pde_csv(const PdeSolution& solution, const std::string& file);

}  // namespace ybsde

#endif  // YBSDE_PDE_HPP_
