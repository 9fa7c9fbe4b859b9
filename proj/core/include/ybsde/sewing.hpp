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

// Sewing of two-point germs A(s, t) into additive integrals, and the
// nonlinear Young integral int y_r eta(dr, x_r) built on the left-point germ
//
//   A(s, t) = y_s (eta(t, x_s) - eta(s, x_s)).
//
// A base grid is refined dyadically inside every cell; the value at level l
// is the sum of the germ over the 2^l pieces of each cell.

#ifndef YBSDE_SEWING_HPP_
#define YBSDE_SEWING_HPP_

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "ybsde/driver.hpp"
#include "ybsde/paths.hpp"

namespace ybsde {

/// Two-point germ A(s, t). Must be safe to call concurrently.
using Germ = std::function<double(double s, double t)>;

struct IntegralResult {
  std::vector<double> times;       // base grid points
  std::vector<double> cumulative;  // integral from times[0] to times[i], finest level
  std::vector<double> level_totals;  // I_l over the whole base grid, l = 0..level_used
  std::vector<double> cauchy;        // |I_{l+1} - I_l|, l = 0..level_used-1
  int level_used = 0;
  double mesh_used = 0.0;  // largest sub-cell length at the finest level
  Germ germ;

  double total() const { return cumulative.back(); }
  /// Integral over [times[i], times[j]].
  double between(std::size_t i, std::size_t j) const { return cumulative[j] - cumulative[i]; }
};

/// Dyadic refinement up to `levels`, stopping early once |I_{l+1} - I_l| < tol
/// (tol <= 0 disables the early stop). Cells are summed independently and
/// reduced in index order, so the result does not depend on the thread count.
/// Throws NumericalError naming (s, t) when the germ is not finite.
IntegralResult sew(const Germ& germ, std::span<const double> base, int levels, double tol = 1e-9);
IntegralResult sew(const Germ& germ, const TimeGrid& base, int levels, double tol = 1e-9);

/// The left-point germ. y is scalar or has one component per channel (the
/// channels are summed); y and x are linearly interpolated off their grids.
Germ young_germ(const SamplePath& y, const SamplePath& x, Driver field);

/// Cumulative int_a^t y_r eta(dr, x_r) on the grid points of x inside `iv`.
IntegralResult nonlinear_young_integral(const SamplePath& y, const SamplePath& x, Driver field,
                                        Interval iv, int levels, double tol = 1e-9);

/// Classical Young integral int y dM with the left-point germ y_s (M_t - M_s)
/// on the grid of m.
IntegralResult young_integral_against_path(const SamplePath& y, const SamplePath& m, int levels,
                                           double tol = 1e-9);

/// Control term w(s, t)^(1 + eps) of the sewing remainder bound.
struct ControlTerm {
  Control control;
  double exponent;  // 1 + eps, must exceed 1
};

struct CertificateEntry {
  std::size_t i, j;  // base grid indices, i < j
  double remainder;  // |integral over [t_i, t_j] - A(t_i, t_j)|
  double bound;      // l^eps0 / (1 - 2^-eps0) * sum w^(1+eps)
  bool holds;
};

struct Certificate {
  bool all_hold = true;
  double worst_ratio = 0.0;  // max remainder / bound (0 when all remainders vanish)
  std::vector<CertificateEntry> entries;
};

/// Checks the sewing remainder bound on every pair of base grid points.
Certificate remainder_certificate(const IntegralResult& result, const std::vector<ControlTerm>& controls);

/// 2^delta / (1 - 2^-delta), the constant of the integral estimates.
double young_estimate_constant(double delta);

/// min(tau + 1/p2 - 1, tau + lambda/p1 - 1).
double young_delta(double tau, double lambda, double p1, double p2);

}  // namespace ybsde

#endif  // YBSDE_SEWING_HPP_
