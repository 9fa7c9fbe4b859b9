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

// Independent reference computations used by the tests. Nothing here calls
// into the library; each oracle is a direct transcription of a closed form
// or an exhaustive search.

#ifndef YBSDE_TESTS_ORACLES_HPP_
#define YBSDE_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

/// sup over every sub-partition of the points (endpoints kept) of
/// (sum |increment|^p)^(1/p), by enumerating subsets of the interior points.
inline double brute_force_pvar(const std::vector<double>& g, double p) {
  const std::size_t n = g.size();
  if (n < 2) return 0.0;
  const std::size_t interior = n - 2;
  double best = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << interior); ++mask) {
    double acc = 0.0;
    std::size_t prev = 0;
    for (std::size_t k = 0; k < interior; ++k) {
      if (mask & (std::uint64_t{1} << k)) {
        acc += std::pow(std::abs(g[k + 1] - g[prev]), p);
        prev = k + 1;
      }
    }
    acc += std::pow(std::abs(g[n - 1] - g[prev]), p);
    best = std::max(best, acc);
  }
  return std::pow(best, 1.0 / p);
}

/// O(n^2) recursion written independently of the library, for long paths.
inline double dp_pvar(const std::vector<double>& g, double p) {
  const std::size_t n = g.size();
  if (n < 2) return 0.0;
  std::vector<double> v(n, 0.0);
  for (std::size_t j = 1; j < n; ++j) {
    double best = 0.0;
    for (std::size_t i = 0; i < j; ++i) best = std::max(best, v[i] + std::pow(std::abs(g[j] - g[i]), p));
    v[j] = best;
  }
  return std::pow(v[n - 1], 1.0 / p);
}

/// P{ sup_{t <= T} |W_t| < a } for standard Brownian motion from 0.
inline double bm_stays_inside(double a, double horizon) {
  double sum = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double m = 2.0 * k + 1.0;
    sum += (k % 2 == 0 ? 1.0 : -1.0) / m *
           std::exp(-m * m * std::numbers::pi * std::numbers::pi * horizon / (8.0 * a * a));
  }
  return 4.0 / std::numbers::pi * sum;
}

/// Exit probability of a Brownian motion monitored on a grid of step dt,
/// using the continuity correction a -> a + 0.5826 sqrt(dt).
inline double bm_grid_exit_probability(double a, double horizon, double dt) {
  return 1.0 - bm_stays_inside(a + 0.5826 * std::sqrt(dt), horizon);
}

/// Fractional Brownian sheet covariance, written from the product formula.
inline double fbs_covariance(double h0, double h, double t, const std::vector<double>& x, double s,
                             const std::vector<double>& y) {
  const auto r = [](double a, double b, double hh) {
    return std::pow(std::abs(a), 2 * hh) + std::pow(std::abs(b), 2 * hh) - std::pow(std::abs(a - b), 2 * hh);
  };
  double c = r(t, s, h0);
  for (std::size_t i = 0; i < x.size(); ++i) c *= r(x[i], y[i], h);
  return c / std::pow(2.0, static_cast<double>(x.size() + 1));
}

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton on P_n).
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (z * p1 - p0) / (z * z - 1.0);
    nodes[i] = z;
    weights[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

/// int_a^b f by composite Gauss-Legendre with `cells` panels of 16 nodes.
inline double integrate(const std::function<double(double)>& f, double a, double b, int cells) {
  static std::vector<double> nodes, weights;
  if (nodes.empty()) gauss_legendre(16, nodes, weights);
  const double h = (b - a) / cells;
  double sum = 0.0;
  for (int c = 0; c < cells; ++c) {
    const double mid = a + (c + 0.5) * h;
    for (std::size_t k = 0; k < nodes.size(); ++k) sum += weights[k] * f(mid + 0.5 * h * nodes[k]);
  }
  return 0.5 * h * sum;
}

/// E[h(x + s sqrt(tau) Z)] by quadrature against the Gaussian density.
inline double heat_expectation(const std::function<double(double)>& h, double x, double s, double tau) {
  const double sd = s * std::sqrt(tau);
  if (sd == 0.0) return h(x);
  return integrate(
      [&](double z) { return h(x + sd * z) * std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }, -12.0,
      12.0, 200);
}

/// Transition density of Brownian motion reflected on [a, b] (cosine series).
inline double reflected_density(double a, double b, double x, double y, double tau) {
  const double len = b - a;
  double sum = 1.0 / len;
  for (int k = 1; k < 400; ++k) {
    const double w = k * std::numbers::pi / len;
    const double decay = std::exp(-0.5 * w * w * tau);
    if (decay < 1e-18) break;
    sum += 2.0 / len * std::cos(w * (x - a)) * std::cos(w * (y - a)) * decay;
  }
  return sum;
}

/// E[h(X_tau)] for reflected Brownian motion started at x, by quadrature of
/// the occupation density.
inline double reflected_expectation(const std::function<double(double)>& h, double a, double b, double x,
                                    double tau) {
  return integrate([&](double y) { return h(y) * reflected_density(a, b, x, y, tau); }, a, b, 200);
}

/// Matrix exponential of a small dense matrix (row-major) by scaling and
/// squaring of the Taylor series.
inline std::vector<double> expm(std::vector<double> a, std::size_t n) {
  double norm = 0.0;
  for (double v : a) norm = std::max(norm, std::abs(v));
  int squarings = 0;
  while (norm * n > 0.25) {
    norm *= 0.5;
    ++squarings;
  }
  for (double& v : a) v = std::ldexp(v, -squarings);
  const auto mul = [n](const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> z(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j) z[i * n + j] += x[i * n + k] * y[k * n + j];
    return z;
  };
  std::vector<double> result(n * n, 0.0), term(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) result[i * n + i] = term[i * n + i] = 1.0;
  for (int k = 1; k < 30; ++k) {
    term = mul(term, a);
    for (double& v : term) v /= k;
    for (std::size_t i = 0; i < n * n; ++i) result[i] += term[i];
  }
  for (int s = 0; s < squarings; ++s) result = mul(result, result);
  return result;
}

/// Ordinary least-squares slope and R^2, independent of the library's fit.
struct Fit {
  double slope, intercept, r2;
};
inline Fit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx, syy > 0 ? sxy * sxy / (sxx * syy) : 1.0};
}

/// A Brownian path on n + 1 uniform points of [0, horizon] from std::mt19937_64.
inline std::vector<double> brownian(std::size_t n, double horizon, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  std::vector<double> w(n + 1, 0.0);
  const double s = std::sqrt(horizon / static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) w[i + 1] = w[i] + s * z(gen);
  return w;
}

}  // namespace oracle

#endif  // YBSDE_TESTS_ORACLES_HPP_
