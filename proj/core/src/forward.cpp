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

#include "ybsde/forward.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>

#include "json.hpp"
#include "ybsde/common.hpp"
#include "ybsde/rng.hpp"

namespace ybsde {

namespace {

void check_bound(std::span<const double> v, double bound, const char* what, double t) {
  for (double e : v) {
    if (!std::isfinite(e)) {
      throw NumericalError(std::string("non-finite ") + what + " at t = " + std::to_string(t));
    }
    if (std::abs(e) > bound * (1.0 + 1e-12)) {
      throw NumericalError(std::string(what) + " exceeds the declared bound L at t = " + std::to_string(t));
    }
  }
}

}  // namespace

void SdeSpec::validate() const {
  if (d == 0) throw InvalidArgument("forward dimension must be positive");
  if (x0.size() != d) throw InvalidArgument("initial point must have d components");
  if (!drift || !diffusion) throw InvalidArgument("forward spec needs drift and diffusion");
  if (!(bound > 0.0)) throw InvalidArgument("declared bound L must be positive");
}

std::uint64_t SdeSpec::hash() const {
  std::string key = tag + "|d=" + std::to_string(d) + "|x0=";
  for (double v : x0) key += hex64(std::bit_cast<std::uint64_t>(v)) + ",";
  return fnv1a(key);
}

SdeSpec SdeSpec::brownian(std::vector<double> x0, double s) {
  SdeSpec spec;
  spec.d = x0.size();
  spec.x0 = std::move(x0);
  const std::size_t d = spec.d;
  spec.drift = [](double, std::span<const double>, std::span<double> out) { std::fill(out.begin(), out.end(), 0.0); };
  spec.diffusion = [d, s](double, std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t k = 0; k < d; ++k) out[k * d + k] = s;
  };
  spec.tag = "brownian(s=" + hex64(std::bit_cast<std::uint64_t>(s)) + ")";
  return spec;
}

SdeSpec SdeSpec::constant(std::vector<double> x0, std::vector<double> drift, std::vector<double> diffusion) {
  SdeSpec spec;
  spec.d = x0.size();
  if (drift.size() != spec.d || diffusion.size() != spec.d * spec.d) {
    throw InvalidArgument("constant coefficients must have shapes d and d x d");
  }
  spec.x0 = std::move(x0);
  std::string tag = "constant(";
  for (double v : drift) tag += hex64(std::bit_cast<std::uint64_t>(v)) + ",";
  for (double v : diffusion) tag += hex64(std::bit_cast<std::uint64_t>(v)) + ",";
  spec.tag = tag + ")";
  spec.drift = [b = std::move(drift)](double, std::span<const double>, std::span<double> out) {
    std::copy(b.begin(), b.end(), out.begin());
  };
  spec.diffusion = [s = std::move(diffusion)](double, std::span<const double>, std::span<double> out) {
    std::copy(s.begin(), s.end(), out.begin());
  };
  return spec;
}

PathEnsemble::PathEnsemble(TimeGrid grid, std::size_t n_paths, std::size_t d, std::uint64_t seed,
                           std::uint64_t spec_hash, std::vector<double> x, std::vector<double> dw)
    : grid_(std::move(grid)), n_paths_(n_paths), d_(d), seed_(seed), spec_hash_(spec_hash), x_(std::move(x)),
      dw_(std::move(dw)) {
  if (x_.size() != n_paths_ * grid_.size() * d_ || dw_.size() != n_paths_ * grid_.steps() * d_) {
    throw InvalidArgument("ensemble arrays do not match (paths, grid, d)");
  }
}

SamplePath PathEnsemble::path(std::size_t p) const {
  const std::size_t len = grid_.size() * d_;
  std::vector<double> v(x_.begin() + static_cast<std::ptrdiff_t>(p * len),
                        x_.begin() + static_cast<std::ptrdiff_t>((p + 1) * len));
  return SamplePath(grid_, d_, std::move(v));
}

SamplePath PathEnsemble::brownian(std::size_t p) const {
  std::vector<double> w(grid_.size() * d_, 0.0);
  for (std::size_t j = 0; j < grid_.steps(); ++j) {
    const auto inc = increment(p, j);
    for (std::size_t k = 0; k < d_; ++k) w[(j + 1) * d_ + k] = w[j * d_ + k] + inc[k];
  }
  return SamplePath(grid_, d_, std::move(w));
}

double driving_normal(std::uint64_t seed, std::size_t p, std::size_t j, std::size_t k) {
  const auto z = rng::normal_pair(seed, p, static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(k / 2));
  return z[k % 2];
}

void simulate_path(const SdeSpec& spec, const TimeGrid& grid, std::uint64_t seed, std::size_t p,
                   std::span<double> x_out, std::span<double> dw_out) {
  const std::size_t d = spec.d;
  std::vector<double> b(d), s(d * d);
  std::copy(spec.x0.begin(), spec.x0.end(), x_out.begin());
  for (std::size_t j = 0; j < grid.steps(); ++j) {
    const double t = grid[j];
    const double h = grid.dt(j);
    const double sq = std::sqrt(h);
    const auto xj = x_out.subspan(j * d, d);
    auto xn = x_out.subspan((j + 1) * d, d);
    auto dw = dw_out.subspan(j * d, d);
    for (std::size_t k = 0; k < d; ++k) dw[k] = sq * driving_normal(seed, p, j, k);
    spec.drift(t, xj, b);
    spec.diffusion(t, xj, s);
    check_bound(b, spec.bound, "drift", t);
    check_bound(s, spec.bound, "diffusion", t);
    for (std::size_t k = 0; k < d; ++k) {
      double v = xj[k] + b[k] * h;
      for (std::size_t l = 0; l < d; ++l) v += s[k * d + l] * dw[l];
      xn[k] = v;
    }
  }
}

PathEnsemble euler_maruyama(const SdeSpec& spec, const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed) {
  spec.validate();
  if (n_paths == 0) throw InvalidArgument("ensemble needs at least one path");
  const std::size_t d = spec.d;
  std::vector<double> x(n_paths * grid.size() * d), dw(n_paths * grid.steps() * d);
  parallel_for(n_paths, [&](std::size_t p) {
    simulate_path(spec, grid, seed, p, std::span<double>(x).subspan(p * grid.size() * d, grid.size() * d),
                  std::span<double>(dw).subspan(p * grid.steps() * d, grid.steps() * d));
  });
  return PathEnsemble(grid, n_paths, d, seed, spec.hash(), std::move(x), std::move(dw));
}

ExitInfo exit_time(std::span<const double> states, std::size_t d, const TimeGrid& grid, double n) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) acc += states[i * d + k] * states[i * d + k];
    // T_n is an infimum over t > 0; the starting point does not count.
    if (i > 0 && std::sqrt(acc) > n) return {i, grid[i], true};
  }
  return {grid.size() - 1, grid.horizon(), false};
}

ExitInfo exit_time(const SamplePath& path, double n) { return exit_time(path.values(), path.dim(), path.grid(), n); }

ExitInfo exit_time(const PathEnsemble& ensemble, std::size_t p, double n) {
  const std::size_t len = ensemble.grid().size() * ensemble.d();
  return exit_time(std::span<const double>(ensemble.states()).subspan(p * len, len), ensemble.d(), ensemble.grid(),
                   n);
}

ReflectedPath reflect_1d(std::span<const double> increments, double a, double b, double x0) {
  if (!(a < b)) throw InvalidArgument("reflection interval needs a < b");
  if (!(x0 >= a && x0 <= b)) throw InvalidArgument("starting point outside the reflection interval");
  ReflectedPath out;
  const std::size_t n = increments.size() + 1;
  out.x.resize(n);
  out.local_time.assign(n, 0.0);
  out.lower_push.assign(n, 0.0);
  out.upper_push.assign(n, 0.0);
  out.x[0] = x0;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double proposal = out.x[j] + increments[j];
    double lower = 0.0, upper = 0.0, next = proposal;
    if (proposal < a) {
      lower = a - proposal;
      next = a;
    } else if (proposal > b) {
      upper = proposal - b;
      next = b;
    }
    out.x[j + 1] = next;
    out.lower_push[j + 1] = out.lower_push[j] + lower;
    out.upper_push[j + 1] = out.upper_push[j] + upper;
    out.local_time[j + 1] = out.local_time[j] + lower + upper;
  }
  return out;
}

// --- export -------------------------------------------------------------------

void save_ensemble(const PathEnsemble& ensemble, const std::string& stem) {
  namespace fs = std::filesystem;
  const fs::path base(stem);
  std::ofstream bin(base.string() + ".bin", std::ios::binary);
  if (!bin) throw InvalidArgument("cannot open " + base.string() + ".bin for writing");
  bin.write(reinterpret_cast<const char*>(ensemble.states().data()),
            static_cast<std::streamsize>(ensemble.states().size() * sizeof(double)));
  bin.write(reinterpret_cast<const char*>(ensemble.increments().data()),
            static_cast<std::streamsize>(ensemble.increments().size() * sizeof(double)));
  nlohmann::json side = {{"format", "ybsde-ensemble"},
                         {"version", 1},
                         {"data", base.filename().string() + ".bin"},
                         {"spec_hash", hex64(ensemble.spec_hash())},
                         {"seed", ensemble.seed()},
                         {"n_paths", ensemble.n_paths()},
                         {"d", ensemble.d()},
                         {"grid", std::vector<double>(ensemble.grid().points().begin(), ensemble.grid().points().end())}};
  std::ofstream js(base.string() + ".json");
  js << side.dump(2) << '\n';
}

PathEnsemble load_ensemble(const std::string& sidecar_path) {
  namespace fs = std::filesystem;
  std::ifstream in(sidecar_path);
  if (!in) throw InvalidArgument("cannot open ensemble sidecar " + sidecar_path);
  try {
    nlohmann::json side;
    in >> side;
    if (side.value("format", "") != "ybsde-ensemble") throw InvalidArgument("sidecar is not an ensemble file");
    TimeGrid grid(side.at("grid").get<std::vector<double>>());
    const auto n_paths = side.at("n_paths").get<std::size_t>();
    const auto d = side.at("d").get<std::size_t>();
    std::vector<double> x(n_paths * grid.size() * d), dw(n_paths * grid.steps() * d);
    const fs::path data = fs::path(sidecar_path).parent_path() / side.at("data").get<std::string>();
    std::ifstream bin(data, std::ios::binary);
    if (!bin) throw InvalidArgument("cannot open ensemble data " + data.string());
    bin.read(reinterpret_cast<char*>(x.data()), static_cast<std::streamsize>(x.size() * sizeof(double)));
    bin.read(reinterpret_cast<char*>(dw.data()), static_cast<std::streamsize>(dw.size() * sizeof(double)));
    if (!bin) throw InvalidArgument("ensemble data file is shorter than its declared shape");
    const auto hash = std::stoull(side.at("spec_hash").get<std::string>(), nullptr, 16);
    return PathEnsemble(std::move(grid), n_paths, d, side.at("seed").get<std::uint64_t>(), hash, std::move(x),
                        std::move(dw));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed ensemble sidecar: ") + e.what());
  }
}

void save_paths_csv(const PathEnsemble& ensemble, const std::string& file, const std::vector<std::size_t>& paths) {
  std::ofstream out(file);
  if (!out) throw InvalidArgument("cannot open " + file + " for writing");
  out << "path,t";
  for (std::size_t k = 0; k < ensemble.d(); ++k) out << ",x" << (k + 1);
  out << "\r\n" << std::setprecision(17);
  for (std::size_t p : paths) {
    if (p >= ensemble.n_paths()) throw InvalidArgument("path index out of range");
    for (std::size_t i = 0; i < ensemble.grid().size(); ++i) {
      out << p << ',' << ensemble.grid()[i];
      for (double v : ensemble.state(p, i)) out << ',' << v;
      out << "\r\n";
    }
  }
}

}  // namespace ybsde
