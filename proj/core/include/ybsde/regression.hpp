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

// Least-squares conditional expectations E[target | state] on a finite
// function basis, one cross-sectional regression per time step.

#ifndef YBSDE_REGRESSION_HPP_
#define YBSDE_REGRESSION_HPP_

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

namespace ybsde {

/// Monomials of total degree <= degree in the (standardized) state, plus
/// optional indicators 1{|x| <= r} of the raw state. The constant is always
/// the first feature and is never penalized by the ridge. The ridge is
/// scaled by the number of rows, so it acts on the mean squared loss.
struct RegressionBasis {
  int degree = 3;
  std::vector<double> ball_radii;
  double ridge = 1e-8;

  std::size_t size(std::size_t dim) const;
  std::string describe() const;
};

/// Cross-sectional fit: builds the design for a set of states once and
/// projects any number of target columns on it.
class Projection {
 public:
  /// states: n_rows x dim, row-major.
  Projection(const RegressionBasis& basis, std::span<const double> states, std::size_t dim);

  std::size_t rows() const { return static_cast<std::size_t>(design_.rows()); }
  std::size_t features() const { return static_cast<std::size_t>(design_.cols()); }

  /// Fitted values design * beta for each column of targets (n_rows x q).
  /// Throws NumericalError when the ridged normal equations are singular.
  Eigen::MatrixXd fit(const Eigen::MatrixXd& targets) const;
  /// Coefficients beta (features x q).
  Eigen::MatrixXd coefficients(const Eigen::MatrixXd& targets) const;

  const Eigen::MatrixXd& design() const { return design_; }

 private:
  Eigen::MatrixXd design_;
  Eigen::MatrixXd gram_;  // design^T design + ridge on non-constant features
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> solver_;
};

/// Exponent tuples of total degree <= degree in dim variables, graded order.
std::vector<std::vector<int>> monomial_exponents(std::size_t dim, int degree);

}  // namespace ybsde

#endif  // YBSDE_REGRESSION_HPP_
