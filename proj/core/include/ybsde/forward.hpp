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

// Forward diffusions X_t = x + int_0^t sigma(r, X_r) dW_r + int_0^t b(r, X_r) dr
// by Euler-Maruyama, grid exit times, and the 1-D Skorohod reflection.
//
// Randomness: the normal driving component k of step j on path p is a pure
// function of (seed, p, j, k), so ensembles are bit-identical whatever the
// thread count or simulation order.

#ifndef YBSDE_FORWARD_HPP_
#define YBSDE_FORWARD_HPP_

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ybsde/paths.hpp"

namespace ybsde {

/// f(t, x, out) with x of length d.
using VectorField = std::function<void(double t, std::span<const double> x, std::span<double> out)>;

struct SdeSpec {
  std::size_t d = 1;
  VectorField drift;      // out has length d
  VectorField diffusion;  // out has length d * d, row-major
  std::vector<double> x0;
  /// Declared bound on every |b_k| and |sigma_kl|; checked on sampled points.
  double bound = std::numeric_limits<double>::infinity();
  /// Free-form identifier that enters the spec hash.
  std::string tag;

  void validate() const;
  std::uint64_t hash() const;

  /// Standard Brownian motion started at x0 (b = 0, sigma = s I).
  static SdeSpec brownian(std::vector<double> x0, double s = 1.0);
  /// Constant drift and diffusion.
  static SdeSpec constant(std::vector<double> x0, std::vector<double> drift, std::vector<double> diffusion);
};

/// Simulated paths on a shared grid with the Brownian increments that
/// drove them.
class PathEnsemble {
 public:
  PathEnsemble(TimeGrid grid, std::size_t n_paths, std::size_t d, std::uint64_t seed, std::uint64_t spec_hash,
               std::vector<double> x, std::vector<double> dw);

  const TimeGrid& grid() const { return grid_; }
  std::size_t n_paths() const { return n_paths_; }
  std::size_t d() const { return d_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t spec_hash() const { return spec_hash_; }

  /// X of path p at grid index i.
  std::span<const double> state(std::size_t p, std::size_t i) const {
    return {x_.data() + (p * grid_.size() + i) * d_, d_};
  }
  /// dW of path p over step j.
  std::span<const double> increment(std::size_t p, std::size_t j) const {
    return {dw_.data() + (p * grid_.steps() + j) * d_, d_};
  }
  /// Whole path p as a SamplePath (copies).
  SamplePath path(std::size_t p) const;
  /// Cumulative Brownian path W of path p (copies).
  SamplePath brownian(std::size_t p) const;

  const std::vector<double>& states() const { return x_; }
  const std::vector<double>& increments() const { return dw_; }

 private:
  TimeGrid grid_;
  std::size_t n_paths_, d_;
  std::uint64_t seed_, spec_hash_;
  std::vector<double> x_;   // [path][grid][d]
  std::vector<double> dw_;  // [path][step][d]
};

/// Standard normal k of step j on path p.
double driving_normal(std::uint64_t seed, std::size_t p, std::size_t j, std::size_t k);

/// Simulates path p alone into x_out (grid.size() * d) and dw_out
/// (grid.steps() * d). Used to stream large ensembles.
void simulate_path(const SdeSpec& spec, const TimeGrid& grid, std::uint64_t seed, std::size_t p,
                   std::span<double> x_out, std::span<double> dw_out);

PathEnsemble euler_maruyama(const SdeSpec& spec, const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed);

struct ExitInfo {
  std::size_t index;  // first grid index with |X| > n, or the last index
  double time;        // grid time of that index
  bool exited;
};

/// T_n = T min inf{t : |X_t| > n} over grid points, |.| Euclidean.
ExitInfo exit_time(const SamplePath& path, double n);
ExitInfo exit_time(const PathEnsemble& ensemble, std::size_t p, double n);
ExitInfo exit_time(std::span<const double> states, std::size_t d, const TimeGrid& grid, double n);

struct ReflectedPath {
  std::vector<double> x;            // one value per grid point, in [a, b]
  std::vector<double> local_time;   // total pushing L = L_lower + L_upper, nondecreasing
  std::vector<double> lower_push;   // cumulative push at a (inward normal +1)
  std::vector<double> upper_push;   // cumulative push at b (inward normal -1)
};

/// Discrete Skorohod map on [a, b]: X' = X + dX, clipped to [a, b]; the
/// clipped amount is added to the push of the boundary that was hit, so
/// X_j = x0 + sum dX + lower_j - upper_j.
ReflectedPath reflect_1d(std::span<const double> increments, double a, double b, double x0);

// --- export -----------------------------------------------------------------
//
// save_ensemble writes <stem>.bin (states then increments, little-endian
// float64, layouts [path][grid][d] and [path][step][d]) and <stem>.json:
//   {"format": "ybsde-ensemble", "version": 1, "spec_hash": "<hex>",
//    "seed": <uint64>, "n_paths": .., "d": .., "grid": [...]}

void save_ensemble(const PathEnsemble& ensemble, const std::string& stem);
PathEnsemble load_ensemble(const std::string& sidecar_path);

/// CSV with header "path,t,x1,...,xd" for the selected paths.
void save_paths_csv(const PathEnsemble& ensemble, const std::string& file, const std::vector<std::size_t>& paths);

}  // namespace ybsde

#endif  // YBSDE_FORWARD_HPP_
