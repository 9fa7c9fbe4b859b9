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

#include "ybsde/pde.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "ybsde/common.hpp"
#include "ybsde/sewing.hpp"

namespace ybsde {

namespace {

class OffsetField final : public DriverField {
 public:
  OffsetField(Driver base, double t0) : DriverField(base->params()), base_(std::move(base)), t0_(t0) {}
  FieldKind kind() const override { return base_->kind(); }
  std::size_t channels() const override { return base_->channels(); }
  std::size_t space_dim() const override { return base_->space_dim(); }
  double horizon() const override { return base_->horizon() - t0_; }
  void evaluate(double t, std::span<const double> x, std::span<double> out) const override {
    double at0[16];
    const std::size_t m = channels();
    base_->evaluate(t0_, x, std::span<double>(at0, m));
    base_->evaluate(t0_ + std::clamp(t, 0.0, horizon()), x, out);
    for (std::size_t c = 0; c < m; ++c) out[c] -= at0[c];
  }
  bool has_time_derivative() const override { return base_->has_time_derivative(); }
  void time_derivative(double t, std::span<const double> x, std::span<double> out) const override {
    base_->time_derivative(t0_ + t, x, out);
  }

 private:
  Driver base_;
  double t0_;
};

Driver zero_field(std::size_t d, double horizon) {
  return make_analytic(
      d, 1, horizon, [](double, std::span<const double>, std::span<double> out) { out[0] = 0.0; }, {},
      [](double, std::span<const double>, std::span<double> out) { out[0] = 0.0; });
}

// Node lattice of [-n, n]^d with k cells per axis.
struct Lattice {
  std::size_t d, k;
  double n, dx;
  std::vector<double> axis;

  std::size_t per_axis() const { return k + 1; }
  std::size_t size() const { return d == 1 ? k + 1 : (k + 1) * (k + 1); }
  std::array<std::size_t, 2> split(std::size_t flat) const {
    return d == 1 ? std::array<std::size_t, 2>{flat, 0} : std::array<std::size_t, 2>{flat / (k + 1), flat % (k + 1)};
  }
  bool boundary(std::size_t flat) const {
    const auto ix = split(flat);
    for (std::size_t a = 0; a < d; ++a) {
      if (ix[a] == 0 || ix[a] == k) return true;
    }
    return false;
  }
  std::size_t offset(std::size_t flat, std::size_t a, int step) const {
    const std::size_t stride = (d == 2 && a == 0) ? k + 1 : 1;
    return step > 0 ? flat + stride : flat - stride;
  }
  void coords(std::size_t flat, std::span<double> x) const {
    const auto ix = split(flat);
    for (std::size_t a = 0; a < d; ++a) x[a] = axis[ix[a]];
  }
};

Lattice make_lattice(std::size_t d, double n, std::size_t k) {
  Lattice lat{d, k, n, 2.0 * n / static_cast<double>(k), {}};
  lat.axis.resize(k + 1);
  for (std::size_t j = 0; j <= k; ++j) lat.axis[j] = -n + lat.dx * static_cast<double>(j);
  lat.axis[k] = n;
  return lat;
}

}  // namespace

Driver time_offset(Driver field, double t0) {
  if (!field) throw InvalidArgument("time_offset needs a driver");
  if (!(t0 >= 0.0) || !(t0 < field->horizon())) throw InvalidArgument("time offset outside [0, T)");
  if (t0 == 0.0) return field;
  return std::make_shared<OffsetField>(std::move(field), t0);
}

void PdeSpec::validate() const {
  if (d != 1 && d != 2) throw InvalidArgument("PDE dimension must be 1 or 2");
  if (!(n > 0.0)) throw InvalidArgument("box half-width n must be positive");
  if (!(horizon > 0.0)) throw InvalidArgument("horizon must be positive");
  if (!h) throw InvalidArgument("PDE spec needs terminal data h");
  if (!diffusion) throw InvalidArgument("PDE spec needs a diffusion coefficient");
  if (!(nu > 0.0)) throw InvalidArgument("ellipticity floor nu must be positive");
  if (coupling) {
    if (!field) throw InvalidArgument("a coupling needs a driver");
    if (!field->has_time_derivative()) throw InvalidArgument("driver has no time derivative; mollify it first");
    if (field->space_dim() != d) throw InvalidArgument("driver space dimension does not match the PDE");
  }
}

std::uint64_t PdeSpec::hash() const {
  std::ostringstream os;
  os << std::setprecision(17) << tag << "|d=" << d << "|n=" << n << "|T=" << horizon << "|nu=" << nu
     << "|f=" << static_cast<bool>(generator) << "|g=" << static_cast<bool>(coupling);
  if (field) os << "|eta=" << to_string(field->kind()) << "/" << field->channels();
  return fnv1a(os.str());
}

std::size_t PdeSolution::nodes() const { return d == 1 ? axis.size() : axis.size() * axis.size(); }

double PdeSolution::interpolate(std::size_t k, std::span<const double> x) const {
  if (x.size() != d) throw InvalidArgument("point dimension does not match the solution");
  const std::size_t na = axis.size();
  std::size_t cell[2] = {0, 0};
  double w[2] = {0.0, 0.0};
  for (std::size_t a = 0; a < d; ++a) {
    const double xc = std::clamp(x[a], -n, n);
    const double pos = (xc + n) / dx;
    cell[a] = std::min<std::size_t>(static_cast<std::size_t>(std::max(0.0, std::floor(pos))), na - 2);
    w[a] = std::clamp(pos - static_cast<double>(cell[a]), 0.0, 1.0);
  }
  const double* level = u.data() + k * nodes();
  if (d == 1) return (1.0 - w[0]) * level[cell[0]] + w[0] * level[cell[0] + 1];
  const auto idx = [&](std::size_t i, std::size_t j) { return level[i * na + j]; };
  return (1.0 - w[0]) * ((1.0 - w[1]) * idx(cell[0], cell[1]) + w[1] * idx(cell[0], cell[1] + 1)) +
         w[0] * ((1.0 - w[1]) * idx(cell[0] + 1, cell[1]) + w[1] * idx(cell[0] + 1, cell[1] + 1));
}

double PdeSolution::value(double t, std::span<const double> x) const {
  const double pos = std::clamp(t, 0.0, times.back()) / dt;
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(std::floor(pos)), times.size() - 2);
  const double w = std::clamp(pos - static_cast<double>(k), 0.0, 1.0);
  if (w == 0.0) return interpolate(k, x);
  return (1.0 - w) * interpolate(k, x) + w * interpolate(k + 1, x);
}

PdeSolution fd_dirichlet_solve(const PdeSpec& spec, const FdOptions& options) {
  spec.validate();
  if (options.time_steps == 0 || options.space_steps < 2) throw InvalidArgument("mesh needs >= 1 time step and >= 2 cells");
  if (!(options.theta >= 0.0 && options.theta <= 1.0)) throw InvalidArgument("theta must lie in [0, 1]");
  const std::size_t d = spec.d;
  const Lattice lat = make_lattice(d, spec.n, options.space_steps);
  const std::size_t nn = lat.size();
  const double dt = spec.horizon / static_cast<double>(options.time_steps);
  const double dx = lat.dx;
  const double theta = options.theta;
  const std::size_t m = spec.coupling ? spec.field->channels() : 0;

  // Coefficients per node: a = sigma sigma^T, b and sigma.
  std::vector<double> a(nn * d * d), b(nn * d, 0.0), sig(nn * d * d);
  std::vector<double> xs(nn * d);
  double worst_diag = 0.0;
  for (std::size_t q = 0; q < nn; ++q) {
    std::span<double> x(xs.data() + q * d, d);
    lat.coords(q, x);
    std::span<double> s(sig.data() + q * d * d, d * d);
    spec.diffusion(x, s);
    if (spec.drift) spec.drift(x, std::span<double>(b.data() + q * d, d));
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        double acc = 0.0;
        for (std::size_t l = 0; l < d; ++l) acc += s[i * d + l] * s[j * d + l];
        a[q * d * d + i * d + j] = acc;
      }
    }
    const double* aq = a.data() + q * d * d;
    double lo = aq[0];
    if (d == 2) {
      const double tr = aq[0] + aq[3], det = aq[0] * aq[3] - aq[1] * aq[2];
      lo = 0.5 * tr - std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    }
    if (!(lo >= spec.nu)) {
      throw InvalidArgument("diffusion is not uniformly elliptic at node " + std::to_string(q) + " (smallest eigenvalue " +
                            std::to_string(lo) + " < nu)");
    }
    double diag = 0.0;
    for (std::size_t i = 0; i < d; ++i) diag += aq[i * d + i];
    worst_diag = std::max(worst_diag, diag);
  }
  if (theta < 0.5) {
    const double dt_max = dx * dx / ((1.0 - 2.0 * theta) * worst_diag);
    if (dt > dt_max) {
      std::ostringstream os;
      os << "CFL violation: dt = " << dt << " exceeds " << dt_max << "; use at least "
         << static_cast<std::size_t>(std::ceil(spec.horizon / dt_max)) << " time steps";
      throw InvalidArgument(os.str());
    }
  }

  // Generator matrix of L on interior nodes.
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(nn * (1 + 4 * d));
  for (std::size_t q = 0; q < nn; ++q) {
    if (lat.boundary(q)) continue;
    const double* aq = a.data() + q * d * d;
    const double* bq = b.data() + q * d;
    const auto row = static_cast<int>(q);
    double centre = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double diff = 0.5 * aq[i * d + i] / (dx * dx);
      const double adv = bq[i] / (2.0 * dx);
      trip.emplace_back(row, static_cast<int>(lat.offset(q, i, +1)), diff + adv);
      trip.emplace_back(row, static_cast<int>(lat.offset(q, i, -1)), diff - adv);
      centre -= 2.0 * diff;
    }
    if (d == 2) {
      const double cross = aq[1] / (4.0 * dx * dx);  // 1/2 (a01 + a10) u_xy / (4 dx^2)
      const std::size_t up = lat.offset(q, 0, +1), dn = lat.offset(q, 0, -1);
      trip.emplace_back(row, static_cast<int>(lat.offset(up, 1, +1)), cross);
      trip.emplace_back(row, static_cast<int>(lat.offset(dn, 1, -1)), cross);
      trip.emplace_back(row, static_cast<int>(lat.offset(up, 1, -1)), -cross);
      trip.emplace_back(row, static_cast<int>(lat.offset(dn, 1, +1)), -cross);
    }
    trip.emplace_back(row, row, centre);
  }
  Eigen::SparseMatrix<double> gen(static_cast<int>(nn), static_cast<int>(nn));
  gen.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseMatrix<double> eye(static_cast<int>(nn), static_cast<int>(nn));
  eye.setIdentity();
  const Eigen::SparseMatrix<double> lhs = eye - theta * dt * gen;
  const Eigen::SparseMatrix<double> rhs_op = eye + (1.0 - theta) * dt * gen;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(lhs);
  if (lu.info() != Eigen::Success) throw NumericalError("finite-difference system factorization failed");

  PdeSolution sol;
  sol.d = d;
  sol.n = spec.n;
  sol.dt = dt;
  sol.dx = dx;
  sol.theta = theta;
  sol.axis = lat.axis;
  sol.spec_hash = spec.hash();
  sol.times.resize(options.time_steps + 1);
  for (std::size_t k = 0; k <= options.time_steps; ++k) sol.times[k] = dt * static_cast<double>(k);
  sol.times.back() = spec.horizon;
  sol.u.assign((options.time_steps + 1) * nn, 0.0);

  Eigen::VectorXd hval(static_cast<Eigen::Index>(nn));
  for (std::size_t q = 0; q < nn; ++q) hval(static_cast<Eigen::Index>(q)) = spec.h(std::span<const double>(xs.data() + q * d, d));
  Eigen::VectorXd cur = hval;
  std::copy(cur.data(), cur.data() + nn, sol.u.begin() + static_cast<std::ptrdiff_t>(options.time_steps * nn));

  const bool nonlinear = spec.generator || spec.coupling;
  std::vector<double> deta(nn * std::max<std::size_t>(m, 1), 0.0);
  // Explicit terms f(t, x, v, sigma^T grad v) + sum g_i(v) d_t eta_i at interior nodes.
  const auto explicit_terms = [&](double t, const Eigen::VectorXd& v) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nn));
    parallel_for(nn, [&](std::size_t q) {
      if (lat.boundary(q)) return;
      const std::span<const double> x(xs.data() + q * d, d);
      const double vq = v(static_cast<Eigen::Index>(q));
      double acc = 0.0;
      if (spec.generator) {
        double grad[2] = {0.0, 0.0}, sz[2] = {0.0, 0.0};
        for (std::size_t i = 0; i < d; ++i) {
          grad[i] = (v(static_cast<Eigen::Index>(lat.offset(q, i, +1))) -
                     v(static_cast<Eigen::Index>(lat.offset(q, i, -1)))) /
                    (2.0 * dx);
        }
        for (std::size_t l = 0; l < d; ++l) {
          for (std::size_t i = 0; i < d; ++i) sz[l] += sig[q * d * d + i * d + l] * grad[i];
        }
        acc += spec.generator(t, x, vq, std::span<const double>(sz, d));
      }
      if (spec.coupling) {
        double g[16];
        spec.coupling(vq, std::span<double>(g, m));
        for (std::size_t c = 0; c < m; ++c) acc += g[c] * deta[q * m + c];
      }
      out(static_cast<Eigen::Index>(q)) = acc;
    });
    if (!out.allFinite()) throw NumericalError("non-finite nonlinear term at t = " + std::to_string(t));
    return out;
  };
  const auto solve_with = [&](Eigen::VectorXd rhs) {
    for (std::size_t q = 0; q < nn; ++q) {
      if (lat.boundary(q)) rhs(static_cast<Eigen::Index>(q)) = hval(static_cast<Eigen::Index>(q));
    }
    Eigen::VectorXd next = lu.solve(rhs);
    if (!next.allFinite()) throw NumericalError("finite-difference solution blew up");
    return next;
  };

  for (std::size_t k = options.time_steps; k-- > 0;) {
    const double tm = 0.5 * (sol.times[k] + sol.times[k + 1]);
    const Eigen::VectorXd base = rhs_op * cur;
    Eigen::VectorXd next;
    if (!nonlinear) {
      next = solve_with(base);
    } else {
      if (spec.coupling) {
        parallel_for(nn, [&](std::size_t q) {
          if (lat.boundary(q)) return;
          spec.field->time_derivative(tm, std::span<const double>(xs.data() + q * d, d),
                                      std::span<double>(deta.data() + q * m, m));
        });
      }
      const Eigen::VectorXd predictor = solve_with(base + dt * explicit_terms(tm, cur));
      next = solve_with(base + dt * explicit_terms(tm, 0.5 * (predictor + cur)));
    }
    cur = std::move(next);
    std::copy(cur.data(), cur.data() + nn, sol.u.begin() + static_cast<std::ptrdiff_t>(k * nn));
  }
  return sol;
}

// --- double limit table -------------------------------------------------------

YoungPdeTable young_pde_table(const std::function<PdeSpec(double n, int m)>& family,
                              const std::vector<double>& n_list, const std::vector<int>& m_list,
                              const std::vector<EvalPoint>& points, double dx, std::size_t time_steps,
                              double threshold) {
  if (n_list.empty() || m_list.empty() || points.empty()) throw InvalidArgument("table needs n, m and points");
  if (!(dx > 0.0)) throw InvalidArgument("mesh width must be positive");
  YoungPdeTable tab;
  tab.n_list = n_list;
  tab.m_list = m_list;
  tab.points = points;
  tab.threshold = threshold;
  tab.values.resize(n_list.size() * m_list.size() * points.size());
  for (std::size_t in = 0; in < n_list.size(); ++in) {
    for (std::size_t im = 0; im < m_list.size(); ++im) {
      const PdeSpec spec = family(n_list[in], m_list[im]);
      const auto cells = static_cast<std::size_t>(std::llround(2.0 * spec.n / dx));
      const PdeSolution sol = fd_dirichlet_solve(spec, {time_steps, cells, 0.5});
      for (std::size_t ip = 0; ip < points.size(); ++ip) {
        tab.values[(in * m_list.size() + im) * points.size() + ip] = sol.value(points[ip].t, points[ip].x);
      }
    }
  }
  const auto max_diff = [&](std::size_t in0, std::size_t im0, std::size_t in1, std::size_t im1) {
    double worst = 0.0;
    for (std::size_t ip = 0; ip < points.size(); ++ip) {
      worst = std::max(worst, std::abs(tab.value(in1, im1, ip) - tab.value(in0, im0, ip)));
    }
    return worst;
  };
  for (std::size_t in = 0; in + 1 < n_list.size(); ++in) {
    for (std::size_t im = 0; im < m_list.size(); ++im) tab.diff_n.push_back(max_diff(in, im, in + 1, im));
  }
  for (std::size_t in = 0; in < n_list.size(); ++in) {
    for (std::size_t im = 0; im + 1 < m_list.size(); ++im) tab.diff_m.push_back(max_diff(in, im, in, im + 1));
  }
  bool ok = true;
  if (n_list.size() > 1) {
    for (std::size_t im = 0; im < m_list.size(); ++im) {
      ok = ok && tab.diff_n[(n_list.size() - 2) * m_list.size() + im] < threshold;
    }
  }
  if (m_list.size() > 1) {
    for (std::size_t in = 0; in < n_list.size(); ++in) {
      ok = ok && tab.diff_m[in * (m_list.size() - 1) + m_list.size() - 2] < threshold;
    }
  }
  tab.converged = ok;
  return tab;
}

// --- Monte Carlo side -----------------------------------------------------------

BsdeSpec bsde_from_pde(const PdeSpec& spec, std::vector<double> x0, double t0) {
  spec.validate();
  if (x0.size() != spec.d) throw InvalidArgument("starting point dimension does not match the PDE");
  const std::size_t d = spec.d;
  BsdeSpec out;
  out.forward.d = d;
  out.forward.x0 = std::move(x0);
  auto drift = spec.drift;
  auto diffusion = spec.diffusion;
  out.forward.drift = [drift](double, std::span<const double> x, std::span<double> o) {
    if (drift) {
      drift(x, o);
    } else {
      std::fill(o.begin(), o.end(), 0.0);
    }
  };
  out.forward.diffusion = [diffusion](double, std::span<const double> x, std::span<double> o) { diffusion(x, o); };
  out.forward.tag = spec.tag;
  out.field = spec.field ? time_offset(spec.field, t0) : zero_field(d, spec.horizon - t0);
  out.n = 1;
  if (spec.generator) {
    auto f = spec.generator;
    out.generator = [f, t0](double t, std::span<const double> x, std::span<const double> y,
                            std::span<const double> z, std::span<double> o) { o[0] = f(t0 + t, x, y[0], z); };
  }
  if (spec.coupling) {
    auto g = spec.coupling;
    out.coupling = [g](double, std::span<const double>, std::span<const double> y, std::span<double> o) { g(y[0], o); };
  }
  auto h = spec.h;
  const double n = spec.n;
  out.terminal = [h, n, d](const PathView& path, std::size_t i, std::span<double> o) {
    double x[2];
    const auto xi = path.at(i);
    for (std::size_t a = 0; a < d; ++a) x[a] = std::clamp(xi[a], -n, n);
    o[0] = h(std::span<const double>(x, d));
  };
  out.tag = spec.tag;
  return out;
}

PointEstimate mc_point_estimate(const PdeSpec& spec, const EvalPoint& point, const McOptions& options) {
  if (!(point.t >= 0.0 && point.t < spec.horizon)) throw InvalidArgument("evaluation time outside [0, T)");
  for (double v : point.x) {
    if (!(std::abs(v) < spec.n)) throw InvalidArgument("evaluation point outside the open box");
  }
  const BsdeSpec bs = bsde_from_pde(spec, point.x, point.t);
  const TimeGrid grid = TimeGrid::uniform(spec.horizon - point.t, options.time_steps);
  const PathEnsemble ens = euler_maruyama(bs.forward, grid, options.n_paths, options.seed);
  std::vector<std::size_t> term(ens.n_paths(), grid.size() - 1);
  for (std::size_t p = 0; p < ens.n_paths(); ++p) {
    for (std::size_t i = 1; i < grid.size(); ++i) {
      bool out = false;
      for (double v : ens.state(p, i)) out = out || std::abs(v) > spec.n;
      if (out) {
        term[p] = i;
        break;
      }
    }
  }
  const BsdeSolution sol = stopped_solve(bs, ens, std::move(term), options.basis, options.picard);
  return {point, sol.y0(), spec.hash()};
}

CrossCheckReport feynman_kac_cross_check(const PdeSpec& spec, const PdeSolution& fd,
                                         const std::vector<PointEstimate>& mc, double fd_error) {
  const std::uint64_t hash = spec.hash();
  if (fd.spec_hash != hash) throw InvalidArgument("spec hash mismatch: finite-difference solution");
  CrossCheckReport rep;
  for (const auto& est : mc) {
    if (est.spec_hash != hash) throw InvalidArgument("spec hash mismatch: Monte Carlo estimate");
    CrossCheckRow row;
    row.point = est.point;
    row.fd = fd.value(est.point.t, est.point.x);
    row.mc = est.value;
    row.discrepancy = std::abs(row.fd - row.mc.mean);
    row.tolerance = fd_error + 3.0 * row.mc.se;
    row.pass = row.discrepancy <= row.tolerance;
    rep.all_pass = rep.all_pass && row.pass;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

// --- localization error ---------------------------------------------------------

LocalizationErrorReport localization_error_experiment(const std::function<PdeSpec(double n)>& family,
                                                      const std::vector<double>& n_list, double n_max,
                                                      const std::vector<EvalPoint>& points, double dx,
                                                      std::size_t time_steps) {
  if (n_list.empty() || points.empty()) throw InvalidArgument("experiment needs n values and points");
  if (!(dx > 0.0)) throw InvalidArgument("mesh width must be positive");
  const auto solve = [&](double n) {
    const PdeSpec spec = family(n);
    const auto cells = static_cast<std::size_t>(std::llround(2.0 * spec.n / dx));
    const PdeSolution sol = fd_dirichlet_solve(spec, {time_steps, cells, 0.5});
    std::vector<double> vals;
    for (const auto& pt : points) vals.push_back(sol.value(pt.t, pt.x));
    return vals;
  };
  const std::vector<double> ref = solve(n_max);
  LocalizationErrorReport rep{n_max, {}, true, {}};
  std::vector<double> xs, ys;
  for (double n : n_list) {
    if (!(n < n_max)) throw InvalidArgument("every n must be below n_max");
    const auto vals = solve(n);
    LocalizationErrorRow row{n, {}, 0.0};
    for (std::size_t i = 0; i < vals.size(); ++i) {
      row.diff.push_back(std::abs(vals[i] - ref[i]));
      row.max_diff = std::max(row.max_diff, row.diff.back());
    }
    if (!rep.rows.empty()) rep.monotone = rep.monotone && row.max_diff < rep.rows.back().max_diff;
    if (row.max_diff > 0.0) {
      xs.push_back(n * n);
      ys.push_back(std::log(row.max_diff));
    }
    rep.rows.push_back(std::move(row));
  }
  if (xs.size() >= 2) rep.fit = linear_fit(xs, ys);
  return rep;
}

// --- Neumann problem --------------------------------------------------------------

MeanSe neumann_fk_estimate(const std::function<double(double)>& h, Driver field, double a, double b, double t,
                           double x, const NeumannOptions& options) {
  if (!field) throw InvalidArgument("Neumann estimate needs a driver");
  if (field->space_dim() != 1) throw InvalidArgument("Neumann estimate is one-dimensional");
  if (!(a < b)) throw InvalidArgument("empty interval");
  if (!(x >= a && x <= b)) throw InvalidArgument("starting point outside [a, b]");
  if (options.n_paths == 0 || options.time_steps == 0) throw InvalidArgument("need paths and time steps");
  const Driver shifted = time_offset(field, t);
  const TimeGrid grid = TimeGrid::uniform(field->horizon() - t, options.time_steps);
  std::vector<double> samples(options.n_paths);
  const SamplePath one = SamplePath::constant(grid, 1.0);
  parallel_for(options.n_paths, [&](std::size_t p) {
    std::vector<double> inc(grid.steps());
    for (std::size_t j = 0; j < grid.steps(); ++j) {
      inc[j] = options.sigma * std::sqrt(grid.dt(j)) * driving_normal(options.seed, p, j, 0);
    }
    const ReflectedPath refl = reflect_1d(inc, a, b, x);
    const SamplePath xp = SamplePath::scalar(grid, refl.x);
    const IntegralResult integral = sew(young_germ(one, xp, shifted), grid, options.levels, 0.0);
    samples[p] = h(refl.x.back()) * std::exp(integral.total());
  });
  return mean_se(samples);
}

// --- export ---------------------------------------------------------------------

void save_pde_csv(const PdeSolution& solution, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw InvalidArgument("cannot open " + file + " for writing");
  out << "t";
  for (std::size_t a = 0; a < solution.d; ++a) out << ",x" << (a + 1);
  out << ",u\r\n" << std::setprecision(17);
  const std::size_t na = solution.axis.size();
  for (std::size_t k = 0; k < solution.times.size(); ++k) {
    for (std::size_t q = 0; q < solution.nodes(); ++q) {
      out << solution.times[k];
      if (solution.d == 1) {
        out << ',' << solution.axis[q];
      } else {
        out << ',' << solution.axis[q / na] << ',' << solution.axis[q % na];
      }
      out << ',' << solution.at(k, q) << "\r\n";
    }
  }
  const nlohmann::json manifest = {{"format", "ybsde-pde"},
                                   {"version", 1},
                                   {"library", std::string(version())},
                                   {"spec_hash", hex64(solution.spec_hash)},
                                   {"d", solution.d},
                                   {"n", solution.n},
                                   {"dt", solution.dt},
                                   {"dx", solution.dx},
                                   {"theta", solution.theta},
                                   {"data", file}};
  std::ofstream js(file + ".json");
  js << manifest.dump(2) << '\n';
}

}  // namespace ybsde
