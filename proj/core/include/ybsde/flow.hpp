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

// Linear Young ODE flows
//
//   G_s^t = I + sum_i int_t^s (alpha_r^i)^T G_r^t eta_i(dr, X_r),   s >= t,
//
// solved by the left-point Euler product, which makes the cocycle
// G_u^s G_s^t = G_u^t hold exactly up to rounding.

#ifndef YBSDE_FLOW_HPP_
#define YBSDE_FLOW_HPP_

#include <Eigen/Dense>
#include <vector>

#include "ybsde/driver.hpp"
#include "ybsde/paths.hpp"

namespace ybsde {

/// Coefficient path: at each grid point, M matrices of size N x N stored as
/// dim = M * N * N, channel-major then row-major.
struct FlowCoefficient {
  SamplePath alpha;
  std::size_t n;  // N

  std::size_t channels() const { return alpha.dim() / (n * n); }
  Eigen::MatrixXd at(double t, std::size_t channel) const;
};

/// Flow G_s^t for a fixed base index and every grid index s >= base.
class FlowMatrix {
 public:
  FlowMatrix(TimeGrid grid, std::size_t base, std::vector<Eigen::MatrixXd> mats);

  const TimeGrid& grid() const { return grid_; }
  std::size_t base() const { return base_; }
  std::size_t dim() const { return static_cast<std::size_t>(mats_.front().rows()); }
  /// G at grid index s (s >= base).
  const Eigen::MatrixXd& at(std::size_t s) const;
  const std::vector<Eigen::MatrixXd>& matrices() const { return mats_; }

 private:
  TimeGrid grid_;
  std::size_t base_;
  std::vector<Eigen::MatrixXd> mats_;
};

/// One-step factors P_j = I + sum_i (alpha^i_{t_j})^T (eta_i(t_{j+1}, X_{t_j}) - eta_i(t_j, X_{t_j}))
/// on the grid of x, each step refined into 2^levels equal sub-steps (alpha
/// and x are linearly interpolated there). Entry j maps index j to j + 1.
std::vector<Eigen::MatrixXd> flow_steps(const FlowCoefficient& alpha, const SamplePath& x, const DriverField& field,
                                        int levels = 0);

/// Euler flow from grid index `base`. Throws NumericalError naming the first
/// step whose product is not finite.
FlowMatrix solve_linear_yode(const FlowCoefficient& alpha, const SamplePath& x, const DriverField& field,
                             std::size_t base = 0, int levels = 0);

/// Same flow from precomputed step factors.
FlowMatrix flow_from_steps(const TimeGrid& grid, const std::vector<Eigen::MatrixXd>& steps, std::size_t base);

/// Matrix inverses of every stored matrix. Throws NumericalError with the
/// grid index when the condition number exceeds 1e12.
FlowMatrix inverse_flow(const FlowMatrix& flow);

/// Euler scheme of the inverse equation: H_{j+1} = H_j (I - sum_i (alpha^i)^T dEta^i_j).
FlowMatrix solve_inverse_yode(const FlowCoefficient& alpha, const SamplePath& x, const DriverField& field,
                              std::size_t base = 0, int levels = 0);

/// N = 1 closed form exp(sum_i int_a^s alpha^i_r eta_i(dr, X_r)) at the grid
/// points of x inside `iv`, the integral computed by sewing. alpha has one
/// component per channel.
std::vector<double> exp_formula_1d(const SamplePath& alpha, const SamplePath& x, Driver field, Interval iv,
                                   int levels);

/// Condition guard used by inverse_flow.
inline constexpr double kMaxFlowCondition = 1e12;

}  // namespace ybsde

#endif  // YBSDE_FLOW_HPP_
