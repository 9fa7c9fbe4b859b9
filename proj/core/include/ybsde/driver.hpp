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

// Space-time drivers eta(t, x): [0, T] x R^d -> R^M.
//
// Every field built here is normalized so that eta(0, x) == 0 exactly; the
// integrals only see time increments, so the t = 0 slice carries no
// information.

#ifndef YBSDE_DRIVER_HPP_
#define YBSDE_DRIVER_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ybsde/paths.hpp"

namespace ybsde {

/// Regularity exponents declared for a driver: time Hoelder tau, space
/// Hoelder lambda, spatial weight beta, path variation p, and the optional
/// interpolation exponent eps and moment index k.
struct RegularityParams {
  double tau = 1.0;
  double lambda = 1.0;
  double beta = 0.0;
  double p = 2.5;
  std::optional<double> eps;
  std::optional<double> k;

  /// Throws InvalidArgument when a value is outside its documented range.
  void validate() const;
};

/// Fractional Brownian sheet with time index H0 and common space index H.
struct HurstParams {
  double h0 = 0.75;
  double h = 0.5;
  std::size_t d = 1;

  void validate() const;
};

enum class FieldKind { analytic, fbs_grid, mollified, shifted, stacked };

std::string to_string(FieldKind kind);

class DriverField {
 public:
  virtual ~DriverField() = default;

  virtual FieldKind kind() const = 0;
  /// Number of channels M.
  virtual std::size_t channels() const = 0;
  /// Spatial dimension d.
  virtual std::size_t space_dim() const = 0;
  virtual double horizon() const = 0;

  /// out[0..M) = eta(t, x). Times outside [0, T] are clamped.
  virtual void evaluate(double t, std::span<const double> x, std::span<double> out) const = 0;

  virtual bool has_time_derivative() const { return false; }
  /// out = d/dt eta(t, x); throws InvalidArgument when unavailable.
  virtual void time_derivative(double t, std::span<const double> x, std::span<double> out) const;

  const RegularityParams& params() const { return params_; }

  /// Channel 0 at a scalar location; convenience for d = 1.
  double operator()(double t, double x) const;

 protected:
  explicit DriverField(RegularityParams params) : params_(params) {}

 private:
  RegularityParams params_;
};

using Driver = std::shared_ptr<const DriverField>;

/// Raw closed form r(t, x, out). The driver returned by make_analytic is
/// r(t, x) - r(0, x).
using RawField = std::function<void(double t, std::span<const double> x, std::span<double> out)>;

Driver make_analytic(std::size_t space_dim, std::size_t channels, double horizon,
                     RawField raw, RegularityParams params,
                     RawField time_derivative = nullptr);

/// Scalar convenience: raw(t, x) with x in R^1.
Driver make_analytic_1d(double horizon, std::function<double(double, double)> raw,
                        RegularityParams params,
                        std::function<double(double, double)> time_derivative = nullptr);

/// Grid-sampled field on a time lattice x product space lattice, evaluated by
/// multilinear interpolation. Off-lattice points are clamped to the nearest
/// lattice face.
class FbsField final : public DriverField {
 public:
  FbsField(HurstParams hurst, std::vector<double> times,
           std::vector<std::vector<double>> axes, std::vector<double> values,
           std::uint64_t seed, RegularityParams params);

  FieldKind kind() const override { return FieldKind::fbs_grid; }
  std::size_t channels() const override { return 1; }
  std::size_t space_dim() const override { return axes_.size(); }
  double horizon() const override { return times_.back(); }
  void evaluate(double t, std::span<const double> x, std::span<double> out) const override;

  const HurstParams& hurst() const { return hurst_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<std::vector<double>>& axes() const { return axes_; }
  /// Row-major values, time index slowest, then axis 0, axis 1, ...
  const std::vector<double>& values() const { return values_; }
  double node(std::size_t it, std::span<const std::size_t> ix) const;

 private:
  HurstParams hurst_;
  std::vector<double> times_;
  std::vector<std::vector<double>> axes_;
  std::vector<double> values_;
  std::vector<std::size_t> strides_;
  std::uint64_t seed_;
};

/// Factorizes the separable covariance of a fractional Brownian sheet once
/// and draws realizations for any seed. Each axis covariance is factorized
/// independently (Cholesky with relative jitter 1e-10 on the diagonal), and a
/// realization is the tensor contraction of the factors with i.i.d. normals.
class FbsSampler {
 public:
  /// Space axes are sorted and 0 is inserted when absent, so B(t, 0) = 0 on
  /// the lattice. Each axis may hold at most 2048 points.
  FbsSampler(HurstParams hurst, const TimeGrid& time_grid,
             std::vector<std::vector<double>> space_axes);

  std::shared_ptr<const FbsField> sample(std::uint64_t seed) const;

  const std::vector<double>& times() const { return times_; }
  const std::vector<std::vector<double>>& axes() const { return axes_; }

  /// Exact covariance E[B(t,x) B(s,y)].
  static double covariance(const HurstParams& hurst, double t, std::span<const double> x,
                           double s, std::span<const double> y);

 private:
  HurstParams hurst_;
  std::vector<double> times_;
  std::vector<std::vector<double>> axes_;
  // Lower-triangular factors restricted to the non-degenerate nodes.
  struct AxisFactor {
    std::vector<std::size_t> active;  // lattice indices with nonzero variance
    std::vector<double> lower;        // active.size()^2, row-major
  };
  std::vector<AxisFactor> factors_;  // [0] = time, then space axes
};

std::shared_ptr<const FbsField> fbs_generate(const HurstParams& hurst, const TimeGrid& time_grid,
                                             std::vector<std::vector<double>> space_axes,
                                             std::uint64_t seed);

/// Regularity implied for a sheet: tau = H0 - theta, lambda = H - theta,
/// beta = (d - 1) H + 2 theta, p = 2.5.
RegularityParams fbs_regularity(const HurstParams& hurst, double theta);

/// Time mollification eta^m(t, x) = int rho_m(t - s) eta(s, x) ds with
/// rho_m(t) = m rho(m t), rho the standard bump on [-1/2, 1/2], and eta
/// extended by its boundary values outside [0, T]. Quadrature: 64-node
/// composite midpoint rule on the support, weights normalized to total mass
/// one and the derivative weights to unit first moment. Re-normalized so
/// eta^m(0, x) = 0. The time derivative is available.
Driver mollify(Driver field, int m);

/// Quadrature nodes u_k in (-1/2, 1/2) and mass weights of the mollifier.
struct MollifierRule {
  std::vector<double> nodes;
  std::vector<double> weights;       // sum to 1
  std::vector<double> slope_weights; // rho'(u_k) du, scaled so -sum u_k w'_k = 1
};
const MollifierRule& mollifier_rule();

/// eta + delta * perturbation (both normalized).
Driver shift(Driver base, Driver perturbation, double delta);

/// Channels of several fields side by side; all must share d and T.
Driver stack(std::vector<Driver> fields);

/// Product evaluation grid for seminorm estimates.
struct EvalGrid {
  std::vector<double> times;
  std::vector<std::vector<double>> points;  // each a d-vector
};

/// Grid suprema of the three quotient terms of the (tau, lambda) seminorm or
/// of its beta-weighted variant: the mixed rectangular increment, the time
/// increment and the space increment.
struct SeminormTerms {
  double mixed = 0.0;
  double time = 0.0;
  double space = 0.0;

  /// The seminorm is the sum of the three suprema.
  double total() const { return mixed + time + space; }
  double largest() const;
};

/// Each term is a lower bound of its continuum supremum. Channels are
/// combined with the Euclidean norm.
SeminormTerms seminorm_terms(const DriverField& field, const RegularityParams& params,
                             const EvalGrid& grid, bool weighted);

/// seminorm_terms(...).total(): a lower bound of the true seminorm.
double seminorm_estimate(const DriverField& field, const RegularityParams& params,
                         const EvalGrid& grid, bool weighted);

struct AssumptionReport {
  bool h0 = false;        // p > 2, tau in (1/2, 1], lambda in (0, 1], tau + lambda/p > 1
  bool h0_prime = false;  // tau in (1/2, 1], lambda in (0, 1], tau + lambda/2 > 1
  bool h2_eps = false;    // exists eps with tau + (1-eps)/p > 1, lambda + beta < 2 eps tau/(1+eps)
  std::optional<double> eps_witness;
  std::optional<bool> hurst_region;  // H0 + H/2 > 1 and d H < 2 H0 - 1
  std::optional<RegularityParams> hurst_implied;  // from fbs_regularity(theta)
  std::optional<bool> hurst_implied_h0;

  std::string summary() const;
};

/// Reports which standing assumptions hold. The eps search scans
/// {0.01, 0.02, ..., 0.99} and reports the first witness.
AssumptionReport assumption_check(const RegularityParams& params,
                                  const std::optional<HurstParams>& hurst = std::nullopt,
                                  std::optional<double> theta = std::nullopt);

// --- fBs realization files -------------------------------------------------
//
// Binary layout: <stem>.bin holds values as little-endian IEEE-754 float64,
// row-major with time slowest then space axes 0..d-1; no header.
// CSV layout: <stem>.csv with header "t,x1,...,xd,value", one lattice node
// per row in the same order, 17 significant digits.
// Sidecar <stem>.json:
//   {"format": "ybsde-fbs", "version": 1, "encoding": "binary"|"csv",
//    "hurst": {"H0": .., "H": .., "d": ..}, "seed": <uint64>,
//    "grids": {"time": [...], "space": [[...], ...]},
//    "shape": [nt, n1, ..., nd], "params": {"tau":..,"lambda":..,"beta":..,"p":..}}

enum class FbsEncoding { binary, csv };

void save_fbs(const FbsField& field, const std::string& stem, FbsEncoding encoding);
std::shared_ptr<const FbsField> load_fbs(const std::string& sidecar_path);

}  // namespace ybsde

#endif  // YBSDE_DRIVER_HPP_
