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

// Time grids, discretely sampled paths and the path seminorms used
// throughout the library.
//
// Variation semantics: every p-variation in this library is the supremum
// over sub-partitions of the sampling grid. For p >= 1 this is the exact
// p-variation of the piecewise-linear interpolant of the samples.

#ifndef YBSDE_PATHS_HPP_
#define YBSDE_PATHS_HPP_

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace ybsde {

/// Strictly increasing grid 0 = t_0 < t_1 < ... < t_n = T with n >= 1.
/// Cheap to copy: the points are shared and immutable.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> points);

  /// n_steps equal steps on [0, horizon].
  static TimeGrid uniform(double horizon, std::size_t n_steps);

  std::size_t size() const { return points_->size(); }
  std::size_t steps() const { return points_->size() - 1; }
  double horizon() const { return points_->back(); }
  double operator[](std::size_t i) const { return (*points_)[i]; }
  double dt(std::size_t i) const { return (*points_)[i + 1] - (*points_)[i]; }
  std::span<const double> points() const { return *points_; }

  /// Index of the grid point equal to t (relative tolerance 1e-12 of T), or
  /// size() when t is not a grid point.
  std::size_t find(double t) const;
  /// Index of the last grid point <= t (clamped to [0, steps()-1]).
  std::size_t cell_of(double t) const;

  /// Grid with every cell split into 2^level equal pieces.
  TimeGrid refined(int level) const;

  bool operator==(const TimeGrid& other) const;

 private:
  std::shared_ptr<const std::vector<double>> points_;
};

/// Closed time interval [a, b]. The default value means "whole grid".
struct Interval {
  double a = 0.0;
  double b = std::numeric_limits<double>::infinity();
};

/// Grid index pair of an interval; throws InvalidArgument("misaligned
/// interval") if an endpoint is not a grid point.
std::pair<std::size_t, std::size_t> resolve(const TimeGrid& grid, Interval iv);

/// Real d-vector samples, one per grid point, stored row-major.
class SamplePath {
 public:
  SamplePath(TimeGrid grid, std::size_t dim, std::vector<double> values);

  /// Scalar path from one value per grid point.
  static SamplePath scalar(TimeGrid grid, std::vector<double> values);
  /// Samples f(t) on the grid.
  static SamplePath from_function(TimeGrid grid, const std::function<double(double)>& f);
  static SamplePath constant(TimeGrid grid, double c);

  const TimeGrid& grid() const { return grid_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return grid_.size(); }

  double operator()(std::size_t i, std::size_t k = 0) const { return values_[i * dim_ + k]; }
  std::span<const double> at(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }
  std::span<const double> values() const { return values_; }

  /// Linear interpolation between grid samples (constant outside [0, T]).
  void interpolate(double t, std::span<double> out) const;
  double interpolate(double t, std::size_t k = 0) const;

  /// Scalar path of coordinate k.
  SamplePath component(std::size_t k) const;

 private:
  TimeGrid grid_;
  std::size_t dim_;
  std::vector<double> values_;
};

/// ||path||_{p-var;[a,b]} by dynamic programming over grid indices:
/// V(j) = max_{i<j} V(i) + |g_j - g_i|^p, result V(last)^(1/p).
/// Vector paths use the Euclidean norm of increments.
double p_variation(const SamplePath& path, double p, Interval iv = {});

/// ||path||_{p-var;[t_i,T]} for every start index i, in one O(n^2) sweep.
std::vector<double> p_variation_tails(const SamplePath& path, double p);

/// max over grid pairs of |g_b - g_a| / |b - a|^gamma, gamma in (0, 1].
double holder_norm(const SamplePath& path, double gamma, Interval iv = {});

/// max |g| over grid points of the interval.
double uniform_norm(const SamplePath& path, Interval iv = {});

/// A nonnegative two-point function w(s, t) meant to be a control:
/// w(s, s) = 0 and w(s, u) + w(u, t) <= w(s, t).
class Control {
 public:
  using Fn = std::function<double(double, double)>;
  explicit Control(Fn fn) : fn_(std::move(fn)) {}
  double operator()(double s, double t) const { return fn_(s, t); }

  /// w1^a1 * w2^a2; a control again when a1 + a2 >= 1.
  static Control product(Control w1, double a1, Control w2, double a2);
  /// t - s.
  static Control elapsed();

 private:
  Fn fn_;
};

/// w(s, t) = ||path||^p_{p-var;[s,t]}. Endpoints must be grid points of the
/// path's grid.
Control control_from_pvar(const SamplePath& path, double p);

/// Checks w(t_i, t_i) == 0 and w(t_i,t_j) + w(t_j,t_k) <= w(t_i,t_k)(1 + rel_tol)
/// for every grid triple i <= j <= k.
bool is_superadditive(const Control& w, const TimeGrid& grid, double rel_tol = 1e-12);

}  // namespace ybsde

#endif  // YBSDE_PATHS_HPP_
