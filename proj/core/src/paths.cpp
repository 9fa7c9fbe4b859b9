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

#include "ybsde/paths.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ybsde/common.hpp"

namespace ybsde {

namespace {

double increment_norm(const SamplePath& path, std::size_t i, std::size_t j) {
  if (path.dim() == 1) return std::abs(path(j) - path(i));
  double acc = 0.0;
  for (std::size_t k = 0; k < path.dim(); ++k) {
    const double d = path(j, k) - path(i, k);
    acc += d * d;
  }
  return std::sqrt(acc);
}

void check_exponent(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw InvalidArgument("invalid exponent: p-variation needs p >= 1, got " +
                          std::to_string(p));
  }
}

}  // namespace

TimeGrid::TimeGrid(std::vector<double> points) {
  if (points.size() < 2) throw InvalidArgument("time grid needs at least 2 points");
  if (points.front() != 0.0) throw InvalidArgument("time grid must start at 0");
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i + 1] > points[i]) || !std::isfinite(points[i + 1])) {
      throw InvalidArgument("time grid must be finite and strictly increasing");
    }
  }
  points_ = std::make_shared<const std::vector<double>>(std::move(points));
}

TimeGrid TimeGrid::uniform(double horizon, std::size_t n_steps) {
  if (!(horizon > 0.0) || n_steps == 0) {
    throw InvalidArgument("uniform grid needs horizon > 0 and at least one step");
  }
  std::vector<double> pts(n_steps + 1);
  for (std::size_t i = 0; i <= n_steps; ++i) {
    pts[i] = horizon * static_cast<double>(i) / static_cast<double>(n_steps);
  }
  pts.back() = horizon;
  return TimeGrid(std::move(pts));
}

std::size_t TimeGrid::find(double t) const {
  const auto& p = *points_;
  const double tol = 1e-12 * std::max(1.0, horizon());
  auto it = std::lower_bound(p.begin(), p.end(), t - tol);
  if (it != p.end() && std::abs(*it - t) <= tol) return static_cast<std::size_t>(it - p.begin());
  return p.size();
}

std::size_t TimeGrid::cell_of(double t) const {
  const auto& p = *points_;
  auto it = std::upper_bound(p.begin(), p.end(), t);
  std::size_t idx = (it == p.begin()) ? 0 : static_cast<std::size_t>(it - p.begin()) - 1;
  return std::min(idx, p.size() - 2);
}

TimeGrid TimeGrid::refined(int level) const {
  if (level < 0) throw InvalidArgument("refinement level must be >= 0");
  const std::size_t split = std::size_t{1} << level;
  const auto& p = *points_;
  std::vector<double> out;
  out.reserve(steps() * split + 1);
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const double h = (p[i + 1] - p[i]) / static_cast<double>(split);
    for (std::size_t k = 0; k < split; ++k) out.push_back(p[i] + h * static_cast<double>(k));
  }
  out.push_back(p.back());
  return TimeGrid(std::move(out));
}

bool TimeGrid::operator==(const TimeGrid& other) const {
  return points_ == other.points_ || *points_ == *other.points_;
}

std::pair<std::size_t, std::size_t> resolve(const TimeGrid& grid, Interval iv) {
  const double b = std::isinf(iv.b) ? grid.horizon() : iv.b;
  const std::size_t ia = grid.find(iv.a);
  const std::size_t ib = grid.find(b);
  if (ia == grid.size() || ib == grid.size() || ib < ia) {
    throw InvalidArgument("misaligned interval [" + std::to_string(iv.a) + ", " +
                          std::to_string(b) + "]");
  }
  return {ia, ib};
}

SamplePath::SamplePath(TimeGrid grid, std::size_t dim, std::vector<double> values)
    : grid_(std::move(grid)), dim_(dim), values_(std::move(values)) {
  if (dim_ == 0) throw InvalidArgument("path dimension must be positive");
  if (values_.size() != grid_.size() * dim_) {
    throw InvalidArgument("path has " + std::to_string(values_.size()) +
                          " values, grid needs " + std::to_string(grid_.size() * dim_));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidArgument("path values must be finite");
  }
}

SamplePath SamplePath::scalar(TimeGrid grid, std::vector<double> values) {
  return SamplePath(std::move(grid), 1, std::move(values));
}

SamplePath SamplePath::from_function(TimeGrid grid, const std::function<double(double)>& f) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid[i]);
  return scalar(std::move(grid), std::move(v));
}

SamplePath SamplePath::constant(TimeGrid grid, double c) {
  std::vector<double> v(grid.size(), c);
  return scalar(std::move(grid), std::move(v));
}

void SamplePath::interpolate(double t, std::span<double> out) const {
  if (t <= 0.0) {
    for (std::size_t k = 0; k < dim_; ++k) out[k] = (*this)(0, k);
    return;
  }
  if (t >= grid_.horizon()) {
    for (std::size_t k = 0; k < dim_; ++k) out[k] = (*this)(size() - 1, k);
    return;
  }
  const std::size_t i = grid_.cell_of(t);
  const double w = (t - grid_[i]) / grid_.dt(i);
  for (std::size_t k = 0; k < dim_; ++k) {
    const double a = (*this)(i, k);
    const double b = (*this)(i + 1, k);
    out[k] = (w == 0.0) ? a : a + w * (b - a);
  }
}

double SamplePath::interpolate(double t, std::size_t k) const {
  if (dim_ == 1) {
    double v;
    interpolate(t, std::span<double>(&v, 1));
    return v;
  }
  std::vector<double> buf(dim_);
  interpolate(t, buf);
  return buf[k];
}

SamplePath SamplePath::component(std::size_t k) const {
  if (k >= dim_) throw InvalidArgument("component index out of range");
  std::vector<double> v(size());
  for (std::size_t i = 0; i < size(); ++i) v[i] = (*this)(i, k);
  return scalar(grid_, std::move(v));
}

double p_variation(const SamplePath& path, double p, Interval iv) {
  check_exponent(p);
  const auto [a, b] = resolve(path.grid(), iv);
  if (b == a) return 0.0;
  if (p == 1.0) {
    double tv = 0.0;
    for (std::size_t i = a; i < b; ++i) tv += increment_norm(path, i, i + 1);
    return tv;
  }
  std::vector<double> best(b - a + 1, 0.0);
  for (std::size_t j = a + 1; j <= b; ++j) {
    double v = 0.0;
    for (std::size_t i = a; i < j; ++i) {
      v = std::max(v, best[i - a] + std::pow(increment_norm(path, i, j), p));
    }
    best[j - a] = v;
  }
  return std::pow(best.back(), 1.0 / p);
}

std::vector<double> p_variation_tails(const SamplePath& path, double p) {
  check_exponent(p);
  const std::size_t n = path.size();
  // best[i] = sup over partitions of [t_i, T] of sum |increment|^p.
  std::vector<double> best(n, 0.0);
  for (std::size_t ii = n - 1; ii-- > 0;) {
    double v = 0.0;
    for (std::size_t j = ii + 1; j < n; ++j) {
      v = std::max(v, best[j] + std::pow(increment_norm(path, ii, j), p));
    }
    best[ii] = v;
  }
  for (double& v : best) v = std::pow(v, 1.0 / p);
  return best;
}

double holder_norm(const SamplePath& path, double gamma, Interval iv) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw InvalidArgument("Hoelder exponent must lie in (0, 1]");
  }
  const auto [a, b] = resolve(path.grid(), iv);
  double best = 0.0;
  const auto& g = path.grid();
  for (std::size_t i = a; i < b; ++i) {
    for (std::size_t j = i + 1; j <= b; ++j) {
      best = std::max(best, increment_norm(path, i, j) / std::pow(g[j] - g[i], gamma));
    }
  }
  return best;
}

double uniform_norm(const SamplePath& path, Interval iv) {
  const auto [a, b] = resolve(path.grid(), iv);
  double best = 0.0;
  for (std::size_t i = a; i <= b; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < path.dim(); ++k) acc += path(i, k) * path(i, k);
    best = std::max(best, std::sqrt(acc));
  }
  return best;
}

Control Control::product(Control w1, double a1, Control w2, double a2) {
  return Control([w1 = std::move(w1), w2 = std::move(w2), a1, a2](double s, double t) {
    return std::pow(w1(s, t), a1) * std::pow(w2(s, t), a2);
  });
}

Control Control::elapsed() {
  return Control([](double s, double t) { return t - s; });
}

Control control_from_pvar(const SamplePath& path, double p) {
  check_exponent(p);
  return Control([path, p](double s, double t) {
    return std::pow(p_variation(path, p, Interval{s, t}), p);
  });
}

bool is_superadditive(const Control& w, const TimeGrid& grid, double rel_tol) {
  const std::size_t n = grid.size();
  std::vector<double> table(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) table[i * n + j] = w(grid[i], grid[j]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (table[i * n + i] != 0.0) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i; k < n; ++k) {
      const double whole = table[i * n + k];
      if (whole < 0.0) return false;
      for (std::size_t j = i; j <= k; ++j) {
        const double split = table[i * n + j] + table[j * n + k];
        if (split > whole * (1.0 + rel_tol) + 1e-300) return false;
      }
    }
  }
  return true;
}

}  // namespace ybsde
