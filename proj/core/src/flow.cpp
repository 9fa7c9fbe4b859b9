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

#include "ybsde/flow.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <string>

#include "ybsde/common.hpp"
#include "ybsde/sewing.hpp"

namespace ybsde {

namespace {

void check_shapes(const FlowCoefficient& alpha, const SamplePath& x, const DriverField& field) {
  if (alpha.n == 0 || alpha.alpha.dim() % (alpha.n * alpha.n) != 0) {
    throw InvalidArgument("flow coefficient dimension must be M * N * N");
  }
  if (alpha.channels() != field.channels()) {
    throw InvalidArgument("flow coefficient has " + std::to_string(alpha.channels()) +
                          " channels, driver has " + std::to_string(field.channels()));
  }
  if (x.dim() != field.space_dim()) throw InvalidArgument("path dimension does not match the driver");
  if (!(alpha.alpha.grid() == x.grid())) throw InvalidArgument("coefficient and path must share a grid");
}

// Sum over channels of (alpha^i_t)^T dEta^i.
Eigen::MatrixXd generator(const FlowCoefficient& alpha, const SamplePath& x, const DriverField& field, double s,
                          double t, std::vector<double>& xs, std::vector<double>& e0, std::vector<double>& e1) {
  x.interpolate(s, xs);
  field.evaluate(t, xs, e1);
  field.evaluate(s, xs, e0);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(alpha.n), static_cast<Eigen::Index>(alpha.n));
  for (std::size_t c = 0; c < field.channels(); ++c) g += alpha.at(s, c).transpose() * (e1[c] - e0[c]);
  return g;
}

}  // namespace

Eigen::MatrixXd FlowCoefficient::at(double t, std::size_t channel) const {
  const auto nn = static_cast<Eigen::Index>(n);
  std::vector<double> buf(alpha.dim());
  alpha.interpolate(t, buf);
  Eigen::MatrixXd out(nn, nn);
  for (Eigen::Index r = 0; r < nn; ++r) {
    for (Eigen::Index c = 0; c < nn; ++c) out(r, c) = buf[channel * n * n + static_cast<std::size_t>(r * nn + c)];
  }
  return out;
}

FlowMatrix::FlowMatrix(TimeGrid grid, std::size_t base, std::vector<Eigen::MatrixXd> mats)
    : grid_(std::move(grid)), base_(base), mats_(std::move(mats)) {
  if (base_ >= grid_.size()) throw InvalidArgument("flow base index outside the grid");
  if (mats_.size() != grid_.size() - base_) throw InvalidArgument("flow needs one matrix per grid tail point");
}

const Eigen::MatrixXd& FlowMatrix::at(std::size_t s) const {
  if (s < base_ || s >= grid_.size()) throw InvalidArgument("flow evaluated before its base time");
  return mats_[s - base_];
}

std::vector<Eigen::MatrixXd> flow_steps(const FlowCoefficient& alpha, const SamplePath& x, const DriverField& field,
                                        int levels) {
  check_shapes(alpha, x, field);
  if (levels < 0 || levels > 20) throw InvalidArgument("flow refinement levels must lie in [0, 20]");
  const auto& grid = x.grid();
  const auto nn = static_cast<Eigen::Index>(alpha.n);
  const std::size_t split = std::size_t{1} << levels;
  std::vector<Eigen::MatrixXd> steps(grid.steps());
  parallel_for(grid.steps(), [&](std::size_t j) {
    std::vector<double> xs(x.dim()), e0(field.channels()), e1(field.channels());
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(nn, nn);
    const double h = grid.dt(j) / static_cast<double>(split);
    for (std::size_t k = 0; k < split; ++k) {
      const double s = grid[j] + h * static_cast<double>(k);
      const double t = (k + 1 == split) ? grid[j + 1] : grid[j] + h * static_cast<double>(k + 1);
      Eigen::MatrixXd step = Eigen::MatrixXd::Identity(nn, nn) + generator(alpha, x, field, s, t, xs, e0, e1);
      p = step * p;
    }
    steps[j] = std::move(p);
  });
  return steps;
}

FlowMatrix flow_from_steps(const TimeGrid& grid, const std::vector<Eigen::MatrixXd>& steps, std::size_t base) {
  if (steps.size() != grid.steps()) throw InvalidArgument("one step factor per grid step is required");
  if (base >= grid.size()) throw InvalidArgument("flow base index outside the grid");
  const auto nn = steps.empty() ? 0 : steps.front().rows();
  std::vector<Eigen::MatrixXd> mats;
  mats.reserve(grid.size() - base);
  mats.push_back(Eigen::MatrixXd::Identity(nn, nn));
  for (std::size_t j = base; j < grid.steps(); ++j) {
    Eigen::MatrixXd next = steps[j] * mats.back();
    if (!next.allFinite()) {
      throw NumericalError("flow blow-up at step " + std::to_string(j) + " (t = " + std::to_string(grid[j]) + ")");
    }
    mats.push_back(std::move(next));
  }
  return FlowMatrix(grid, base, std::move(mats));
}

FlowMatrix solve_linear_yode(const FlowCoefficient& alpha, const SamplePath& x, const DriverField& field,
                             std::size_t base, int levels) {
  return flow_from_steps(x.grid(), flow_steps(alpha, x, field, levels), base);
}

FlowMatrix inverse_flow(const FlowMatrix& flow) {
  std::vector<Eigen::MatrixXd> inv;
  inv.reserve(flow.matrices().size());
  for (std::size_t k = 0; k < flow.matrices().size(); ++k) {
    const auto& m = flow.matrices()[k];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (!(smin > 0.0) || sv(0) / smin > kMaxFlowCondition) {
      throw NumericalError("singular flow matrix at grid index " + std::to_string(flow.base() + k));
    }
    inv.push_back(m.inverse());
  }
  return FlowMatrix(flow.grid(), flow.base(), std::move(inv));
}

FlowMatrix solve_inverse_yode(const FlowCoefficient& alpha, const SamplePath& x, const DriverField& field,
                              std::size_t base, int levels) {
  check_shapes(alpha, x, field);
  const auto& grid = x.grid();
  if (base >= grid.size()) throw InvalidArgument("flow base index outside the grid");
  const auto nn = static_cast<Eigen::Index>(alpha.n);
  const std::size_t split = std::size_t{1} << levels;
  std::vector<double> xs(x.dim()), e0(field.channels()), e1(field.channels());
  std::vector<Eigen::MatrixXd> mats{Eigen::MatrixXd::Identity(nn, nn)};
  for (std::size_t j = base; j < grid.steps(); ++j) {
    Eigen::MatrixXd h = mats.back();
    const double dt = grid.dt(j) / static_cast<double>(split);
    for (std::size_t k = 0; k < split; ++k) {
      const double s = grid[j] + dt * static_cast<double>(k);
      const double t = (k + 1 == split) ? grid[j + 1] : grid[j] + dt * static_cast<double>(k + 1);
      h = h * (Eigen::MatrixXd::Identity(nn, nn) - generator(alpha, x, field, s, t, xs, e0, e1));
    }
    if (!h.allFinite()) throw NumericalError("inverse flow blow-up at step " + std::to_string(j));
    mats.push_back(std::move(h));
  }
  return FlowMatrix(grid, base, std::move(mats));
}

std::vector<double> exp_formula_1d(const SamplePath& alpha, const SamplePath& x, Driver field, Interval iv,
                                   int levels) {
  const auto integral = nonlinear_young_integral(alpha, x, std::move(field), iv, levels, 0.0);
  std::vector<double> out(integral.cumulative.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(integral.cumulative[i]);
  return out;
}

}  // namespace ybsde
