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

#include "ybsde/regression.hpp"

#include <cmath>
#include <sstream>

#include "ybsde/common.hpp"

namespace ybsde {

namespace {

void enumerate(std::size_t dim, int remaining, std::vector<int>& current, std::size_t pos,
               std::vector<std::vector<int>>& out) {
  if (pos == dim) {
    out.push_back(current);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    current[pos] = e;
    enumerate(dim, remaining - e, current, pos + 1, out);
  }
  current[pos] = 0;
}

}  // namespace

std::vector<std::vector<int>> monomial_exponents(std::size_t dim, int degree) {
  std::vector<std::vector<int>> out;
  for (int total = 0; total <= degree; ++total) {
    std::vector<std::vector<int>> exact;
    std::vector<int> cur(dim, 0);
    enumerate(dim, total, cur, 0, exact);
    for (auto& e : exact) {
      int sum = 0;
      for (int v : e) sum += v;
      if (sum == total) out.push_back(std::move(e));
    }
  }
  return out;
}

std::size_t RegressionBasis::size(std::size_t dim) const {
  return monomial_exponents(dim, degree).size() + ball_radii.size();
}

std::string RegressionBasis::describe() const {
  std::ostringstream os;
  os << "polynomial(degree=" << degree << ")";
  for (double r : ball_radii) os << " + 1{|x|<=" << r << "}";
  os << ", ridge=" << ridge;
  return os.str();
}

Projection::Projection(const RegressionBasis& basis, std::span<const double> states, std::size_t dim) {
  if (basis.degree < 0) throw InvalidArgument("basis degree must be nonnegative");
  if (!(basis.ridge >= 0.0)) throw InvalidArgument("ridge must be nonnegative");
  if (dim == 0 || states.size() % dim != 0) throw InvalidArgument("state array does not match its dimension");
  const std::size_t n = states.size() / dim;
  if (n == 0) throw InvalidArgument("regression needs at least one row");

  // Standardizing the state leaves the polynomial span unchanged and keeps
  // the normal equations well conditioned.
  std::vector<double> mean(dim, 0.0), scale(dim, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = 0; k < dim; ++k) mean[k] += states[r * dim + k];
  }
  for (auto& m : mean) m /= static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = 0; k < dim; ++k) {
      const double c = states[r * dim + k] - mean[k];
      scale[k] += c * c;
    }
  }
  for (auto& s : scale) {
    s = std::sqrt(s / static_cast<double>(n));
    if (!(s > 1e-12)) s = 1.0;
  }

  const auto exps = monomial_exponents(dim, basis.degree);
  const std::size_t k_total = exps.size() + basis.ball_radii.size();
  design_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k_total));
  std::vector<double> z(dim);
  for (std::size_t r = 0; r < n; ++r) {
    double norm2 = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double v = states[r * dim + k];
      if (!std::isfinite(v)) throw NumericalError("non-finite regression state");
      z[k] = (v - mean[k]) / scale[k];
      norm2 += v * v;
    }
    Eigen::Index c = 0;
    for (const auto& e : exps) {
      double v = 1.0;
      for (std::size_t k = 0; k < dim; ++k) {
        for (int q = 0; q < e[k]; ++q) v *= z[k];
      }
      design_(static_cast<Eigen::Index>(r), c++) = v;
    }
    for (double radius : basis.ball_radii) {
      design_(static_cast<Eigen::Index>(r), c++) = std::sqrt(norm2) <= radius ? 1.0 : 0.0;
    }
  }
  gram_ = design_.transpose() * design_;
  for (Eigen::Index c = 1; c < gram_.cols(); ++c) gram_(c, c) += basis.ridge * static_cast<double>(n);
  solver_.compute(gram_);
  if (solver_.rank() == 0) throw NumericalError("regression normal equations are singular");
}

Eigen::MatrixXd Projection::coefficients(const Eigen::MatrixXd& targets) const {
  if (targets.rows() != design_.rows()) throw InvalidArgument("target rows do not match the design");
  Eigen::MatrixXd beta = solver_.solve(design_.transpose() * targets);
  if (!beta.allFinite()) throw NumericalError("regression normal equations are singular");
  return beta;
}

Eigen::MatrixXd Projection::fit(const Eigen::MatrixXd& targets) const { return design_ * coefficients(targets); }

}  // namespace ybsde
