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

// Backward SDEs with a nonlinear Young driver
//
//   Y_t = xi + int_t^T f(r, X_r, Y_r, Z_r) dr + sum_i int_t^T g_i(Y_r) eta_i(dr, X_r) - int_t^T Z_r dW_r
//
// solved backward on the grid of a simulated ensemble. Conditional
// expectations are cross-sectional least-squares regressions on a basis of
// the state at each time step.

#ifndef YBSDE_BSDE_HPP_
#define YBSDE_BSDE_HPP_

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ybsde/driver.hpp"
#include "ybsde/forward.hpp"
#include "ybsde/regression.hpp"
#include "ybsde/stats.hpp"

namespace ybsde {

/// Read-only view of one simulated path.
struct PathView {
  std::span<const double> states;  // grid.size() * d
  std::size_t d;
  const TimeGrid* grid;

  std::span<const double> at(std::size_t i) const { return states.subspan(i * d, d); }
};

PathView path_view(const PathEnsemble& ensemble, std::size_t p);

/// f(t, x, y, z, out): y has N entries, z has N * d (row-major), out N.
using Generator = std::function<void(double t, std::span<const double> x, std::span<const double> y,
                                     std::span<const double> z, std::span<double> out)>;
/// g(t, x, y, out): out is N x M row-major; column i multiplies eta_i. Most
/// couplings depend on y only; (t, x) is passed for the linear case where
/// g_i(y) = alpha^i_t y.
using Coupling = std::function<void(double t, std::span<const double> x, std::span<const double> y,
                                    std::span<double> out)>;
/// Path functional evaluated at grid index i: the process Xi_i. The plain
/// terminal value is Xi at the last index.
using PathFunctional = std::function<void(const PathView& path, std::size_t i, std::span<double> out)>;

struct BsdeSpec {
  SdeSpec forward;
  Driver field;
  std::size_t n = 1;  // N
  Generator generator;  // null means f = 0
  Coupling coupling;    // null means g = 0
  PathFunctional terminal;
  /// Extra regression state appended to X (e.g. a running maximum), with
  /// feature_dim entries; null when the state is X alone.
  PathFunctional state_features;
  std::size_t feature_dim = 0;
  /// Declared constants, recorded in manifests only.
  double c1 = std::numeric_limits<double>::quiet_NaN();
  double c_lip = std::numeric_limits<double>::quiet_NaN();
  std::string tag;

  void validate() const;
  std::uint64_t hash() const;
};

struct PicardOptions {
  int max_iter = 50;
  double tol = 1e-10;
  /// On failure to contract, retry the step as two half steps once.
  bool allow_halving = true;
};

struct StepLog {
  std::size_t index;
  int iterations = 0;
  std::vector<double> residuals;  // max |Y^k - Y^{k-1}| per inner iteration
  double contraction = 0.0;       // largest ratio of successive residuals
  bool halved = false;
};

struct BsdeSolution {
  TimeGrid grid;
  std::size_t n_paths = 0, n = 1, d = 1;
  std::vector<double> y;  // [path][grid][N]
  std::vector<double> z;  // [path][step][N * d]
  std::vector<std::size_t> terminal_index;  // per path
  std::vector<double> initial_targets;      // [path][N], regression targets at index 0
  /// [path][N]: Xi plus the generator and Young terms summed along the path.
  /// Its spread carries the sampling error of the terminal data, which the
  /// regressed targets at index 0 smooth out.
  std::vector<double> pathwise;
  std::vector<StepLog> steps;               // one per backward step, last step first

  double y_at(std::size_t p, std::size_t i, std::size_t k = 0) const { return y[(p * grid.size() + i) * n + k]; }
  double z_at(std::size_t p, std::size_t j, std::size_t k = 0, std::size_t l = 0) const {
    return z[(p * grid.steps() + j) * n * d + k * d + l];
  }
  /// Y_0 component k: the mean of the regression targets at index 0, with
  /// the standard error of the pathwise sums.
  MeanSe y0(std::size_t k = 0) const;
  /// All inner residuals in order of computation.
  std::vector<double> picard_residuals() const;
};

/// Discrete Picard scheme with regression (see the module notes). Throws
/// NumericalError("no contraction") when the inner loop fails to contract
/// even after halving.
BsdeSolution backward_solve(const BsdeSpec& spec, const PathEnsemble& ensemble, const RegressionBasis& basis,
                            const PicardOptions& picard = {});

/// Localized problem on [0, T_n] with terminal value Xi at each path's exit
/// index; Y is frozen and Z = 0 after the exit. n = +inf gives backward_solve.
BsdeSolution localized_solve(const BsdeSpec& spec, const PathEnsemble& ensemble, double n,
                             const RegressionBasis& basis, const PicardOptions& picard = {});

/// Solve stopped at an arbitrary per-path terminal index (e.g. the exit of
/// a box): Xi at that index, Y frozen and Z = 0 afterwards.
BsdeSolution stopped_solve(const BsdeSpec& spec, const PathEnsemble& ensemble,
                           std::vector<std::size_t> terminal_index, const RegressionBasis& basis,
                           const PicardOptions& picard = {});

struct LocalizationRow {
  double n;
  MeanSe y0;
  double next_difference;  // |Y^{n'}_0 - Y^n_0| for the next n' in the list, NaN for the last
  MeanSe exit_probability;  // P{T_n < T}
};

std::vector<LocalizationRow> localization_sweep(const BsdeSpec& spec, const PathEnsemble& ensemble,
                                                const std::vector<double>& n_list, const RegressionBasis& basis,
                                                const PicardOptions& picard = {});

// --- linear closed form ---------------------------------------------------------

/// Y_t = xi + sum_i int alpha^i Y eta_i(dr, X_r) + int (Z G + f) dr - int Z dW.
struct LinearBsdeSpec {
  Driver field;
  std::size_t n = 1;
  /// alpha(t, x, out): M matrices N x N, channel-major, row-major.
  VectorField alpha;
  /// f(t, x, out): N entries; null means 0.
  VectorField drift;
  /// G(t, x, out): d entries; null means 0.
  VectorField girsanov;
  PathFunctional terminal;

  /// The same equation as a general spec: f(t,x,y,z) = f_t + z G_t and
  /// g_i(y) = alpha^i_t y.
  BsdeSpec to_bsde(SdeSpec forward) const;
};

struct LinearEstimate {
  std::vector<MeanSe> y0;  // per component
  /// Y at the requested grid indices by regression: [index][path][N].
  std::vector<std::vector<double>> y_at;
  std::vector<std::size_t> indices;
  std::vector<double> weights;  // per path per component, the Y_0 samples
};

/// Monte Carlo mean of ((G_T^0)^T xi + int_0^T (G_s^0)^T f_s ds) M_T with the
/// Euler flow G of the ensemble grid and the discrete exponential weight M.
LinearEstimate linear_closed_form(const LinearBsdeSpec& spec, const PathEnsemble& ensemble,
                                  const RegressionBasis& basis, const std::vector<std::size_t>& indices = {});

// --- comparison -------------------------------------------------------------------

struct ComparisonReport {
  double fraction_ordered;  // share of (path, index) cells with Y_A >= Y_B - allowance
  double allowance;
  double min_difference;
  MeanSe y0_difference;  // Y_A(0) - Y_B(0) with the SE of paired targets
};

/// Solves both specs on the same ensemble. Throws InvalidArgument("inputs not
/// ordered") when xi_A < xi_B on a path, f_A < f_B on a solution cell, or the
/// couplings differ on a cell. N must be 1.
ComparisonReport comparison_experiment(const BsdeSpec& a, const BsdeSpec& b, const PathEnsemble& ensemble,
                                       const RegressionBasis& basis, const PicardOptions& picard = {},
                                       double allowance = 1e-2);

// --- diagnostics ------------------------------------------------------------------

struct Diagnostics {
  double m_pk;      // surrogate of m_{p,k}(Y; [0, T])
  double bmo_k;     // surrogate of ||Z||_{k-BMO; [0, T]}
  double sup_abs_y;
};

/// Conditional moments E_u[.] are replaced by regressions on the state at u
/// and the essential suprema by maxima over cells. Labeled surrogates, not
/// consistent estimators of the ess sup.
Diagnostics diagnostics(const BsdeSolution& solution, const PathEnsemble& ensemble, const RegressionBasis& basis,
                        double p, double k);

// --- export -----------------------------------------------------------------------

/// CSV with header path,t,Y1..YN,Z11..ZNd (Z empty on the terminal row).
void save_solution_csv(const BsdeSolution& solution, const std::string& file);
/// JSON run manifest: spec hash, ensemble seed, basis, Picard tolerances and
/// the per-step residual trace.
void save_solution_manifest(const BsdeSolution& solution, const BsdeSpec& spec, const PathEnsemble& ensemble,
                            const RegressionBasis& basis, const PicardOptions& picard, const std::string& file);

}  // namespace ybsde

#endif  // YBSDE_BSDE_HPP_
