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

#include "ybsde/bsde.hpp"

#include <algorithm>
#include <cmath>

#include "ybsde/common.hpp"
#include "ybsde/flow.hpp"

namespace ybsde {

namespace {

using Eigen::MatrixXd;

// Rows of the backward step that are still before their terminal index.
struct ActiveSet {
  std::vector<std::size_t> paths;
  std::size_t dim = 0;
  std::vector<double> states;  // regression state per active row
};

ActiveSet active_rows(const BsdeSpec& spec, const PathEnsemble& ens, const std::vector<std::size_t>& term,
                      std::size_t i) {
  ActiveSet a;
  a.dim = ens.d() + spec.feature_dim;
  for (std::size_t p = 0; p < ens.n_paths(); ++p) {
    if (i < term[p]) a.paths.push_back(p);
  }
  a.states.resize(a.paths.size() * a.dim);
  parallel_for(a.paths.size(), [&](std::size_t r) {
    const std::size_t p = a.paths[r];
    const auto x = ens.state(p, i);
    std::copy(x.begin(), x.end(), a.states.begin() + static_cast<std::ptrdiff_t>(r * a.dim));
    if (spec.feature_dim > 0) {
      spec.state_features(path_view(ens, p), i,
                          std::span<double>(a.states).subspan(r * a.dim + ens.d(), spec.feature_dim));
    }
  });
  return a;
}

class Stepper {
 public:
  Stepper(const BsdeSpec& spec, const PathEnsemble& ens, const ActiveSet& rows, const Projection& proj,
          const MatrixXd& z)
      : spec_(spec), ens_(ens), rows_(rows), proj_(proj), z_(z), n_(spec.n), m_(spec.field->channels()) {}

  // base + g(y_prev) (eta(t1, X_i) - eta(t0, X_i)) per row.
  MatrixXd young_part(const MatrixXd& y_prev, std::size_t i, double t0, double t1) const {
    MatrixXd out = y_prev;
    if (!spec_.coupling) return out;
    parallel_for(rows_.paths.size(), [&](std::size_t r) {
      const auto x = ens_.state(rows_.paths[r], i);
      std::vector<double> e0(m_), e1(m_), g(n_ * m_), y(n_);
      spec_.field->evaluate(t1, x, e1);
      spec_.field->evaluate(t0, x, e0);
      for (std::size_t k = 0; k < n_; ++k) y[k] = y_prev(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k));
      spec_.coupling(ens_.grid()[i], x, y, g);
      for (std::size_t k = 0; k < n_; ++k) {
        double acc = 0.0;
        for (std::size_t c = 0; c < m_; ++c) acc += g[k * m_ + c] * (e1[c] - e0[c]);
        out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) += acc;
      }
    });
    return out;
  }

  // base + f(tf, X_i, y, Z_i) dt per row.
  MatrixXd with_generator(const MatrixXd& base, const MatrixXd& y, std::size_t i, double tf, double dt) const {
    MatrixXd out = base;
    if (!spec_.generator) return out;
    const std::size_t d = ens_.d();
    parallel_for(rows_.paths.size(), [&](std::size_t r) {
      const auto x = ens_.state(rows_.paths[r], i);
      std::vector<double> yy(n_), zz(n_ * d), f(n_);
      const auto row = static_cast<Eigen::Index>(r);
      for (std::size_t k = 0; k < n_; ++k) yy[k] = y(row, static_cast<Eigen::Index>(k));
      for (std::size_t k = 0; k < n_ * d; ++k) zz[k] = z_(row, static_cast<Eigen::Index>(k));
      spec_.generator(tf, x, yy, zz, f);
      for (std::size_t k = 0; k < n_; ++k) {
        if (!std::isfinite(f[k])) throw NumericalError("non-finite generator value at t = " + std::to_string(tf));
        out(row, static_cast<Eigen::Index>(k)) += f[k] * dt;
      }
    });
    return out;
  }

  // Inner Picard loop on Y = E[base + f(Y) dt]. Returns false when it fails
  // to contract.
  bool picard(const MatrixXd& base, const MatrixXd& y_start, std::size_t i, double tf, double dt,
              const PicardOptions& opt, StepLog& log, MatrixXd& y_out, MatrixXd& targets_out) const {
    targets_out = with_generator(base, y_start, i, tf, dt);
    MatrixXd y = proj_.fit(targets_out);
    log.iterations += 1;
    if (!spec_.generator) {
      y_out = std::move(y);
      return true;
    }
    int rising = 0;
    double previous = std::numeric_limits<double>::infinity();
    for (int it = 1; it < opt.max_iter; ++it) {
      targets_out = with_generator(base, y, i, tf, dt);
      MatrixXd next = proj_.fit(targets_out);
      const double res = (next - y).cwiseAbs().maxCoeff();
      log.iterations += 1;
      log.residuals.push_back(res);
      if (std::isfinite(previous) && previous > 0.0) log.contraction = std::max(log.contraction, res / previous);
      y = std::move(next);
      if (!std::isfinite(res)) return false;
      if (res < opt.tol) break;
      rising = (res >= previous) ? rising + 1 : 0;
      if (rising >= 3) return false;
      previous = res;
    }
    y_out = std::move(y);
    return true;
  }

 private:
  const BsdeSpec& spec_;
  const PathEnsemble& ens_;
  const ActiveSet& rows_;
  const Projection& proj_;
  const MatrixXd& z_;
  std::size_t n_, m_;
};

BsdeSolution solve_impl(const BsdeSpec& spec, const PathEnsemble& ens, std::vector<std::size_t> term,
                        const RegressionBasis& basis, const PicardOptions& picard) {
  spec.validate();
  if (ens.d() != spec.forward.d) throw InvalidArgument("ensemble dimension does not match the forward spec");
  if (ens.spec_hash() != spec.forward.hash()) throw InvalidArgument("ensemble was not simulated from the forward spec");
  if (spec.field->space_dim() != ens.d()) throw InvalidArgument("driver space dimension does not match X");
  const auto& grid = ens.grid();
  const std::size_t n = spec.n, d = ens.d(), np = ens.n_paths();

  BsdeSolution sol{grid, np, n, d, {}, {}, std::move(term), {}, {}, {}};
  sol.y.assign(np * grid.size() * n, 0.0);
  sol.z.assign(np * grid.steps() * n * d, 0.0);
  sol.initial_targets.assign(np * n, 0.0);
  sol.pathwise.assign(np * n, 0.0);

  parallel_for(np, [&](std::size_t p) {
    const std::size_t ti = sol.terminal_index[p];
    double* row = sol.y.data() + (p * grid.size() + ti) * n;
    spec.terminal(path_view(ens, p), ti, std::span<double>(row, n));
    for (std::size_t k = 0; k < n; ++k) {
      if (!std::isfinite(row[k])) throw NumericalError("non-finite terminal value on path " + std::to_string(p));
    }
    for (std::size_t i = ti + 1; i < grid.size(); ++i) {
      std::copy(row, row + n, sol.y.data() + (p * grid.size() + i) * n);
    }
    std::copy(row, row + n, sol.pathwise.data() + p * n);
    if (ti == 0) std::copy(row, row + n, sol.initial_targets.data() + p * n);
  });

  for (std::size_t i = grid.steps(); i-- > 0;) {
    StepLog log;
    log.index = i;
    const ActiveSet rows = active_rows(spec, ens, sol.terminal_index, i);
    if (rows.paths.empty()) {
      sol.steps.push_back(std::move(log));
      continue;
    }
    const Projection proj(basis, rows.states, rows.dim);
    const auto nr = static_cast<Eigen::Index>(rows.paths.size());
    const double dt = grid.dt(i);

    MatrixXd y_next(nr, static_cast<Eigen::Index>(n));
    for (Eigen::Index r = 0; r < nr; ++r) {
      const std::size_t p = rows.paths[static_cast<std::size_t>(r)];
      for (std::size_t k = 0; k < n; ++k) y_next(r, static_cast<Eigen::Index>(k)) = sol.y[(p * grid.size() + i + 1) * n + k];
    }
    // Centering Y_{i+1} by its fitted conditional mean leaves E_i[Y dW] unchanged
    // and removes the noise of the mean part; a deterministic Y gives Z = 0.
    const MatrixXd centered = y_next - proj.fit(y_next);
    MatrixXd zt(nr, static_cast<Eigen::Index>(n * d));
    for (Eigen::Index r = 0; r < nr; ++r) {
      const auto dw = ens.increment(rows.paths[static_cast<std::size_t>(r)], i);
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < d; ++l) {
          zt(r, static_cast<Eigen::Index>(k * d + l)) = centered(r, static_cast<Eigen::Index>(k)) * dw[l];
        }
      }
    }
    const MatrixXd z = proj.fit(zt) / dt;

    const Stepper stepper(spec, ens, rows, proj, z);
    MatrixXd y_i, targets;
    const MatrixXd base = stepper.young_part(y_next, i, grid[i], grid[i + 1]);
    bool ok = stepper.picard(base, y_next, i, grid[i], dt, picard, log, y_i, targets);
    MatrixXd increment = targets - y_next;
    if (!ok && picard.allow_halving) {
      log.halved = true;
      const double mid = 0.5 * (grid[i] + grid[i + 1]);
      MatrixXd y_mid, t_mid;
      ok = stepper.picard(stepper.young_part(y_next, i, mid, grid[i + 1]), y_next, i, mid, 0.5 * dt, picard, log,
                          y_mid, t_mid);
      if (ok) {
        ok = stepper.picard(stepper.young_part(y_mid, i, grid[i], mid), y_mid, i, grid[i], 0.5 * dt, picard, log,
                            y_i, targets);
        increment = (t_mid - y_next) + (targets - y_mid);
      }
    }
    if (!ok) throw NumericalError("no contraction at backward step " + std::to_string(i));

    for (Eigen::Index r = 0; r < nr; ++r) {
      const std::size_t p = rows.paths[static_cast<std::size_t>(r)];
      for (std::size_t k = 0; k < n; ++k) {
        sol.y[(p * grid.size() + i) * n + k] = y_i(r, static_cast<Eigen::Index>(k));
        sol.pathwise[p * n + k] += increment(r, static_cast<Eigen::Index>(k));
        if (i == 0) sol.initial_targets[p * n + k] = targets(r, static_cast<Eigen::Index>(k));
      }
      for (std::size_t k = 0; k < n * d; ++k) {
        sol.z[(p * grid.steps() + i) * n * d + k] = z(r, static_cast<Eigen::Index>(k));
      }
    }
    sol.steps.push_back(std::move(log));
  }
  return sol;
}

}  // namespace

PathView path_view(const PathEnsemble& ensemble, std::size_t p) {
  const std::size_t len = ensemble.grid().size() * ensemble.d();
  return {std::span<const double>(ensemble.states()).subspan(p * len, len), ensemble.d(), &ensemble.grid()};
}

void BsdeSpec::validate() const {
  forward.validate();
  if (!field) throw InvalidArgument("BSDE spec needs a driver");
  if (n == 0) throw InvalidArgument("BSDE dimension N must be positive");
  if (!terminal) throw InvalidArgument("BSDE spec needs a terminal functional");
  if (feature_dim > 0 && !state_features) throw InvalidArgument("feature_dim > 0 needs state_features");
}

std::uint64_t BsdeSpec::hash() const {
  return fnv1a(tag + "|" + hex64(forward.hash()) + "|N=" + std::to_string(n) + "|M=" +
               std::to_string(field ? field->channels() : 0) + "|eta=" + (field ? to_string(field->kind()) : ""));
}

MeanSe BsdeSolution::y0(std::size_t k) const {
  std::vector<double> v(n_paths), w(n_paths);
  for (std::size_t p = 0; p < n_paths; ++p) {
    v[p] = initial_targets[p * n + k];
    w[p] = pathwise[p * n + k];
  }
  MeanSe out = mean_se(w);
  out.mean = mean_se(v).mean;
  return out;
}

std::vector<double> BsdeSolution::picard_residuals() const {
  std::vector<double> out;
  for (const auto& s : steps) out.insert(out.end(), s.residuals.begin(), s.residuals.end());
  return out;
}

BsdeSolution backward_solve(const BsdeSpec& spec, const PathEnsemble& ensemble, const RegressionBasis& basis,
                            const PicardOptions& picard) {
  std::vector<std::size_t> term(ensemble.n_paths(), ensemble.grid().size() - 1);
  return solve_impl(spec, ensemble, std::move(term), basis, picard);
}

BsdeSolution localized_solve(const BsdeSpec& spec, const PathEnsemble& ensemble, double n,
                             const RegressionBasis& basis, const PicardOptions& picard) {
  if (!(n > 0.0)) throw InvalidArgument("localization level n must be positive");
  std::vector<std::size_t> term(ensemble.n_paths());
  for (std::size_t p = 0; p < ensemble.n_paths(); ++p) term[p] = exit_time(ensemble, p, n).index;
  return solve_impl(spec, ensemble, std::move(term), basis, picard);
}

BsdeSolution stopped_solve(const BsdeSpec& spec, const PathEnsemble& ensemble,
                           std::vector<std::size_t> terminal_index, const RegressionBasis& basis,
                           const PicardOptions& picard) {
  if (terminal_index.size() != ensemble.n_paths()) throw InvalidArgument("one terminal index per path required");
  for (std::size_t t : terminal_index) {
    if (t == 0 || t >= ensemble.grid().size()) throw InvalidArgument("terminal index out of range");
  }
  return solve_impl(spec, ensemble, std::move(terminal_index), basis, picard);
}

std::vector<LocalizationRow> localization_sweep(const BsdeSpec& spec, const PathEnsemble& ensemble,
                                                const std::vector<double>& n_list, const RegressionBasis& basis,
                                                const PicardOptions& picard) {
  std::vector<LocalizationRow> rows;
  for (double n : n_list) {
    const auto sol = localized_solve(spec, ensemble, n, basis, picard);
    std::vector<double> exited(ensemble.n_paths());
    for (std::size_t p = 0; p < ensemble.n_paths(); ++p) exited[p] = exit_time(ensemble, p, n).exited ? 1.0 : 0.0;
    rows.push_back({n, sol.y0(), std::numeric_limits<double>::quiet_NaN(), mean_se(exited)});
  }
  for (std::size_t r = 0; r + 1 < rows.size(); ++r) {
    rows[r].next_difference = std::abs(rows[r + 1].y0.mean - rows[r].y0.mean);
  }
  return rows;
}

// --- linear closed form ---------------------------------------------------------

BsdeSpec LinearBsdeSpec::to_bsde(SdeSpec forward) const {
  BsdeSpec spec;
  spec.forward = std::move(forward);
  spec.field = field;
  spec.n = n;
  spec.terminal = terminal;
  const std::size_t nn = n;
  const std::size_t m = field ? field->channels() : 0;
  const std::size_t d = spec.forward.d;
  auto drift_fn = drift;
  auto g_fn = girsanov;
  spec.generator = [nn, d, drift_fn, g_fn](double t, std::span<const double> x, std::span<const double>,
                                           std::span<const double> z, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    if (drift_fn) drift_fn(t, x, out);
    if (g_fn) {
      std::vector<double> g(d);
      g_fn(t, x, g);
      for (std::size_t k = 0; k < nn; ++k) {
        for (std::size_t l = 0; l < d; ++l) out[k] += z[k * d + l] * g[l];
      }
    }
  };
  auto alpha_fn = alpha;
  spec.coupling = [nn, m, alpha_fn](double t, std::span<const double> x, std::span<const double> y,
                                    std::span<double> out) {
    std::vector<double> a(m * nn * nn);
    alpha_fn(t, x, a);
    for (std::size_t k = 0; k < nn; ++k) {
      for (std::size_t c = 0; c < m; ++c) {
        double acc = 0.0;
        for (std::size_t l = 0; l < nn; ++l) acc += a[c * nn * nn + k * nn + l] * y[l];
        out[k * m + c] = acc;
      }
    }
  };
  spec.tag = "linear";
  return spec;
}

LinearEstimate linear_closed_form(const LinearBsdeSpec& spec, const PathEnsemble& ensemble,
                                  const RegressionBasis& basis, const std::vector<std::size_t>& indices) {
  if (!spec.field || !spec.alpha || !spec.terminal) {
    throw InvalidArgument("linear spec needs a driver, alpha and a terminal functional");
  }
  const auto& grid = ensemble.grid();
  const std::size_t n = spec.n, m = spec.field->channels(), d = ensemble.d(), np = ensemble.n_paths();
  const std::size_t last = grid.size() - 1;
  for (std::size_t idx : indices) {
    if (idx > last) throw InvalidArgument("requested index beyond the grid");
  }
  const auto nn = static_cast<Eigen::Index>(n);

  LinearEstimate est;
  est.indices = indices;
  est.weights.assign(np * n, 0.0);
  // Per requested index: target per path.
  std::vector<std::vector<double>> later(indices.size(), std::vector<double>(np * n, 0.0));

  parallel_for(np, [&](std::size_t p) {
    const SamplePath x = ensemble.path(p);
    std::vector<double> a(grid.size() * m * n * n);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      spec.alpha(grid[i], ensemble.state(p, i), std::span<double>(a).subspan(i * m * n * n, m * n * n));
    }
    const FlowCoefficient coeff{SamplePath(grid, m * n * n, std::move(a)), n};
    const FlowMatrix flow = solve_linear_yode(coeff, x, *spec.field, 0, 0);

    // Cumulative (G_s^0)^T f_s ds from the right and log M_t from the left.
    std::vector<Eigen::VectorXd> tail(grid.size(), Eigen::VectorXd::Zero(nn));
    std::vector<double> log_m(grid.size(), 0.0);
    std::vector<double> f(n), g(d);
    for (std::size_t j = 0; j < grid.steps(); ++j) {
      double lm = 0.0;
      if (spec.girsanov) {
        spec.girsanov(grid[j], ensemble.state(p, j), g);
        const auto dw = ensemble.increment(p, j);
        for (std::size_t l = 0; l < d; ++l) lm += g[l] * dw[l] - 0.5 * g[l] * g[l] * grid.dt(j);
      }
      log_m[j + 1] = log_m[j] + lm;
    }
    for (std::size_t j = grid.steps(); j-- > 0;) {
      tail[j] = tail[j + 1];
      if (spec.drift) {
        spec.drift(grid[j], ensemble.state(p, j), f);
        tail[j] += flow.at(j).transpose() * Eigen::Map<const Eigen::VectorXd>(f.data(), nn) * grid.dt(j);
      }
    }
    Eigen::VectorXd xi(nn);
    spec.terminal(path_view(ensemble, p), last, std::span<double>(xi.data(), n));
    const Eigen::VectorXd head = flow.at(last).transpose() * xi;
    const double mt = std::exp(log_m[last]);
    const Eigen::VectorXd w0 = (head + tail[0]) * mt;
    for (std::size_t k = 0; k < n; ++k) est.weights[p * n + k] = w0(static_cast<Eigen::Index>(k));

    for (std::size_t q = 0; q < indices.size(); ++q) {
      const std::size_t t = indices[q];
      const MatrixXd& gt = flow.at(t);
      Eigen::JacobiSVD<MatrixXd> svd(gt);
      const auto& sv = svd.singularValues();
      if (!(sv(sv.size() - 1) > 0.0) || sv(0) / sv(sv.size() - 1) > kMaxFlowCondition) {
        throw NumericalError("singular flow matrix at grid index " + std::to_string(t));
      }
      const Eigen::VectorXd v =
          gt.transpose().fullPivLu().solve(head + tail[t]) * std::exp(log_m[last] - log_m[t]);
      for (std::size_t k = 0; k < n; ++k) later[q][p * n + k] = v(static_cast<Eigen::Index>(k));
    }
  });

  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> col(np);
    for (std::size_t p = 0; p < np; ++p) col[p] = est.weights[p * n + k];
    est.y0.push_back(mean_se(col));
  }
  for (std::size_t q = 0; q < indices.size(); ++q) {
    const std::size_t t = indices[q];
    std::vector<double> states(np * d);
    for (std::size_t p = 0; p < np; ++p) {
      const auto x = ensemble.state(p, t);
      std::copy(x.begin(), x.end(), states.begin() + static_cast<std::ptrdiff_t>(p * d));
    }
    const Projection proj(basis, states, d);
    const MatrixXd fitted =
        proj.fit(Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            later[q].data(), static_cast<Eigen::Index>(np), nn));
    std::vector<double> out(np * n);
    for (std::size_t p = 0; p < np; ++p) {
      for (std::size_t k = 0; k < n; ++k) {
        out[p * n + k] = fitted(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(k));
      }
    }
    est.y_at.push_back(std::move(out));
  }
  return est;
}

// --- comparison -------------------------------------------------------------------

ComparisonReport comparison_experiment(const BsdeSpec& a, const BsdeSpec& b, const PathEnsemble& ensemble,
                                       const RegressionBasis& basis, const PicardOptions& picard,
                                       double allowance) {
  if (a.n != 1 || b.n != 1) throw InvalidArgument("comparison needs N = 1");
  const auto& grid = ensemble.grid();
  const std::size_t last = grid.size() - 1;
  const std::size_t np = ensemble.n_paths();
  for (std::size_t p = 0; p < np; ++p) {
    double xa = 0.0, xb = 0.0;
    a.terminal(path_view(ensemble, p), last, std::span<double>(&xa, 1));
    b.terminal(path_view(ensemble, p), last, std::span<double>(&xb, 1));
    if (xa < xb) throw InvalidArgument("inputs not ordered: terminal values on path " + std::to_string(p));
  }
  const BsdeSolution sb = backward_solve(b, ensemble, basis, picard);

  // Generators and couplings are compared on the cells of the B solution.
  const std::size_t d = ensemble.d();
  const std::size_t m = a.field->channels();
  for (std::size_t p = 0; p < np; ++p) {
    for (std::size_t i = 0; i < grid.steps(); ++i) {
      const auto x = ensemble.state(p, i);
      const double y = sb.y_at(p, i);
      std::vector<double> z(d);
      for (std::size_t l = 0; l < d; ++l) z[l] = sb.z_at(p, i, 0, l);
      double fa = 0.0, fb = 0.0;
      if (a.generator) a.generator(grid[i], x, std::span<const double>(&y, 1), z, std::span<double>(&fa, 1));
      if (b.generator) b.generator(grid[i], x, std::span<const double>(&y, 1), z, std::span<double>(&fb, 1));
      if (fa < fb) throw InvalidArgument("inputs not ordered: generators at path " + std::to_string(p));
      std::vector<double> ga(m, 0.0), gb(m, 0.0);
      if (a.coupling) a.coupling(grid[i], x, std::span<const double>(&y, 1), ga);
      if (b.coupling) b.coupling(grid[i], x, std::span<const double>(&y, 1), gb);
      if (ga != gb) throw InvalidArgument("inputs not ordered: couplings differ at path " + std::to_string(p));
    }
  }
  const BsdeSolution sa = backward_solve(a, ensemble, basis, picard);

  ComparisonReport rep{};
  rep.allowance = allowance;
  rep.min_difference = std::numeric_limits<double>::infinity();
  std::size_t ordered = 0, cells = 0;
  for (std::size_t p = 0; p < np; ++p) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double diff = sa.y_at(p, i) - sb.y_at(p, i);
      rep.min_difference = std::min(rep.min_difference, diff);
      ordered += diff >= -allowance ? 1 : 0;
      ++cells;
    }
  }
  rep.fraction_ordered = static_cast<double>(ordered) / static_cast<double>(cells);
  std::vector<double> paired(np), paired_path(np);
  for (std::size_t p = 0; p < np; ++p) {
    paired[p] = sa.initial_targets[p] - sb.initial_targets[p];
    paired_path[p] = sa.pathwise[p] - sb.pathwise[p];
  }
  rep.y0_difference = mean_se(paired_path);
  rep.y0_difference.mean = mean_se(paired).mean;
  return rep;
}

// --- diagnostics ------------------------------------------------------------------

Diagnostics diagnostics(const BsdeSolution& sol, const PathEnsemble& ensemble, const RegressionBasis& basis,
                        double p, double k) {
  if (!(k >= 1.0)) throw InvalidArgument("moment index k must be >= 1");
  const auto& grid = sol.grid;
  const std::size_t np = sol.n_paths, n = sol.n, d = sol.d;
  Diagnostics out{0.0, 0.0, 0.0};
  for (double v : sol.y) out.sup_abs_y = std::max(out.sup_abs_y, std::abs(v));

  // Per path: ||Y||_{p-var;[t_u,T]}^k and (int_u^T |Z|^2)^(k/2) for every u.
  std::vector<double> pvar(np * grid.size()), qv(np * grid.size());
  parallel_for(np, [&](std::size_t path) {
    std::vector<double> v(sol.y.begin() + static_cast<std::ptrdiff_t>(path * grid.size() * n),
                          sol.y.begin() + static_cast<std::ptrdiff_t>((path + 1) * grid.size() * n));
    const auto tails = p_variation_tails(SamplePath(grid, n, std::move(v)), p);
    double acc = 0.0;
    qv[path * grid.size() + grid.size() - 1] = 0.0;
    for (std::size_t u = grid.size(); u-- > 0;) {
      pvar[path * grid.size() + u] = std::pow(tails[u], k);
      if (u < grid.steps()) {
        double z2 = 0.0;
        for (std::size_t c = 0; c < n * d; ++c) {
          const double zv = sol.z[(path * grid.steps() + u) * n * d + c];
          z2 += zv * zv;
        }
        acc += z2 * grid.dt(u);
      }
      qv[path * grid.size() + u] = std::pow(acc, 0.5 * k);
    }
  });

  double best_m = 0.0, best_b = 0.0;
  for (std::size_t u = 0; u < grid.size(); ++u) {
    std::vector<double> states(np * d);
    for (std::size_t path = 0; path < np; ++path) {
      const auto x = ensemble.state(path, u);
      std::copy(x.begin(), x.end(), states.begin() + static_cast<std::ptrdiff_t>(path * d));
    }
    const Projection proj(basis, states, d);
    MatrixXd targets(static_cast<Eigen::Index>(np), 2);
    for (std::size_t path = 0; path < np; ++path) {
      targets(static_cast<Eigen::Index>(path), 0) = pvar[path * grid.size() + u];
      targets(static_cast<Eigen::Index>(path), 1) = qv[path * grid.size() + u];
    }
    const MatrixXd fitted = proj.fit(targets);
    best_m = std::max(best_m, fitted.col(0).maxCoeff());
    best_b = std::max(best_b, fitted.col(1).maxCoeff());
  }
  out.m_pk = std::pow(std::max(best_m, 0.0), 1.0 / k);
  out.bmo_k = std::pow(std::max(best_b, 0.0), 1.0 / k);
  return out;
}

}  // namespace ybsde
