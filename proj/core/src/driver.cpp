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

#include "ybsde/driver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "ybsde/common.hpp"
#include "ybsde/rng.hpp"

namespace ybsde {

namespace {

constexpr std::size_t kMaxAxis = 2048;
constexpr std::uint64_t kFbsStream = 0x6662730000000000ULL;

// Small fixed-capacity scratch so hot evaluation paths do not allocate.
class Scratch {
 public:
  explicit Scratch(std::size_t n) : n_(n) {
    if (n_ > stack_.size()) heap_.resize(n_);
  }
  std::span<double> span() {
    return n_ > stack_.size() ? std::span<double>(heap_) : std::span<double>(stack_.data(), n_);
  }

 private:
  std::size_t n_;
  std::array<double, 16> stack_{};
  std::vector<double> heap_;
};

double clamp_time(double t, double horizon) { return std::clamp(t, 0.0, horizon); }

class AnalyticField final : public DriverField {
 public:
  AnalyticField(std::size_t d, std::size_t m, double horizon, RawField raw, RegularityParams params,
                RawField dt)
      : DriverField(params), d_(d), m_(m), horizon_(horizon), raw_(std::move(raw)), dt_(std::move(dt)) {}

  FieldKind kind() const override { return FieldKind::analytic; }
  std::size_t channels() const override { return m_; }
  std::size_t space_dim() const override { return d_; }
  double horizon() const override { return horizon_; }

  void evaluate(double t, std::span<const double> x, std::span<double> out) const override {
    Scratch zero(m_);
    raw_(clamp_time(t, horizon_), x, out);
    raw_(0.0, x, zero.span());
    auto z = zero.span();
    for (std::size_t i = 0; i < m_; ++i) out[i] -= z[i];
  }

  bool has_time_derivative() const override { return static_cast<bool>(dt_); }
  void time_derivative(double t, std::span<const double> x, std::span<double> out) const override {
    if (!dt_) DriverField::time_derivative(t, x, out);
    dt_(clamp_time(t, horizon_), x, out);
  }

 private:
  std::size_t d_, m_;
  double horizon_;
  RawField raw_, dt_;
};

class MollifiedField final : public DriverField {
 public:
  MollifiedField(Driver base, int m) : DriverField(base->params()), base_(std::move(base)), m_(m) {}

  FieldKind kind() const override { return FieldKind::mollified; }
  std::size_t channels() const override { return base_->channels(); }
  std::size_t space_dim() const override { return base_->space_dim(); }
  double horizon() const override { return base_->horizon(); }

  void evaluate(double t, std::span<const double> x, std::span<double> out) const override {
    const std::size_t mm = channels();
    Scratch at0(mm);
    convolve(clamp_time(t, horizon()), x, out, false);
    convolve(0.0, x, at0.span(), false);
    auto z = at0.span();
    for (std::size_t i = 0; i < mm; ++i) out[i] -= z[i];
  }

  bool has_time_derivative() const override { return true; }
  void time_derivative(double t, std::span<const double> x, std::span<double> out) const override {
    convolve(clamp_time(t, horizon()), x, out, true);
  }

 private:
  void convolve(double t, std::span<const double> x, std::span<double> out, bool slope) const {
    const auto& rule = mollifier_rule();
    const std::size_t mm = channels();
    Scratch tmp(mm);
    auto v = tmp.span();
    for (std::size_t i = 0; i < mm; ++i) out[i] = 0.0;
    const double inv_m = 1.0 / static_cast<double>(m_);
    const auto& w = slope ? rule.slope_weights : rule.weights;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      // Base fields clamp t to [0, T], which is the constant extension.
      base_->evaluate(t - rule.nodes[k] * inv_m, x, v);
      for (std::size_t i = 0; i < mm; ++i) out[i] += w[k] * v[i];
    }
    if (slope) {
      for (std::size_t i = 0; i < mm; ++i) out[i] *= static_cast<double>(m_);
    }
  }

  Driver base_;
  int m_;
};

class ShiftedField final : public DriverField {
 public:
  ShiftedField(Driver base, Driver pert, double delta)
      : DriverField(base->params()), base_(std::move(base)), pert_(std::move(pert)), delta_(delta) {}

  FieldKind kind() const override { return FieldKind::shifted; }
  std::size_t channels() const override { return base_->channels(); }
  std::size_t space_dim() const override { return base_->space_dim(); }
  double horizon() const override { return base_->horizon(); }

  void evaluate(double t, std::span<const double> x, std::span<double> out) const override {
    Scratch tmp(channels());
    base_->evaluate(t, x, out);
    pert_->evaluate(t, x, tmp.span());
    auto v = tmp.span();
    for (std::size_t i = 0; i < channels(); ++i) out[i] += delta_ * v[i];
  }

  bool has_time_derivative() const override {
    return base_->has_time_derivative() && pert_->has_time_derivative();
  }
  void time_derivative(double t, std::span<const double> x, std::span<double> out) const override {
    Scratch tmp(channels());
    base_->time_derivative(t, x, out);
    pert_->time_derivative(t, x, tmp.span());
    auto v = tmp.span();
    for (std::size_t i = 0; i < channels(); ++i) out[i] += delta_ * v[i];
  }

 private:
  Driver base_, pert_;
  double delta_;
};

class StackedField final : public DriverField {
 public:
  explicit StackedField(std::vector<Driver> parts)
      : DriverField(parts.front()->params()), parts_(std::move(parts)) {
    for (const auto& p : parts_) m_ += p->channels();
  }

  FieldKind kind() const override { return FieldKind::stacked; }
  std::size_t channels() const override { return m_; }
  std::size_t space_dim() const override { return parts_.front()->space_dim(); }
  double horizon() const override { return parts_.front()->horizon(); }

  void evaluate(double t, std::span<const double> x, std::span<double> out) const override {
    std::size_t off = 0;
    for (const auto& p : parts_) {
      p->evaluate(t, x, out.subspan(off, p->channels()));
      off += p->channels();
    }
  }
  bool has_time_derivative() const override {
    return std::all_of(parts_.begin(), parts_.end(),
                       [](const Driver& p) { return p->has_time_derivative(); });
  }
  void time_derivative(double t, std::span<const double> x, std::span<double> out) const override {
    std::size_t off = 0;
    for (const auto& p : parts_) {
      p->time_derivative(t, x, out.subspan(off, p->channels()));
      off += p->channels();
    }
  }

 private:
  std::vector<Driver> parts_;
  std::size_t m_ = 0;
};

double half_fbm_cov(double a, double b, double two_h) {
  return 0.5 * (std::pow(std::abs(a), two_h) + std::pow(std::abs(b), two_h) -
                std::pow(std::abs(a - b), two_h));
}

// Locates t in a sorted lattice: returns cell index and weight in [0, 1].
std::pair<std::size_t, double> locate(const std::vector<double>& axis, double v) {
  if (axis.size() == 1) return {0, 0.0};
  if (v <= axis.front()) return {0, 0.0};
  if (v >= axis.back()) return {axis.size() - 2, 1.0};
  auto it = std::upper_bound(axis.begin(), axis.end(), v);
  const std::size_t i = static_cast<std::size_t>(it - axis.begin()) - 1;
  return {i, (v - axis[i]) / (axis[i + 1] - axis[i])};
}

// Multiplies mode k of a row-major tensor by a lower-triangular matrix.
void apply_mode(std::vector<double>& tensor, const std::vector<std::size_t>& shape, std::size_t k,
                const std::vector<double>& lower) {
  const std::size_t n = shape[k];
  std::size_t before = 1, after = 1;
  for (std::size_t i = 0; i < k; ++i) before *= shape[i];
  for (std::size_t i = k + 1; i < shape.size(); ++i) after *= shape[i];
  std::vector<double> column(n);
  for (std::size_t b = 0; b < before; ++b) {
    for (std::size_t a = 0; a < after; ++a) {
      const std::size_t base = b * n * after + a;
      for (std::size_t i = 0; i < n; ++i) column[i] = tensor[base + i * after];
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        const double* row = lower.data() + i * n;
        for (std::size_t j = 0; j <= i; ++j) acc += row[j] * column[j];
        tensor[base + i * after] = acc;
      }
    }
  }
}

std::string fmt_bool(bool v) { return v ? "PASS" : "FAIL"; }

}  // namespace

void RegularityParams::validate() const {
  if (!(tau > 0.0 && tau <= 1.0)) throw InvalidArgument("tau must lie in (0, 1]");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw InvalidArgument("lambda must lie in (0, 1]");
  if (!(beta >= 0.0)) throw InvalidArgument("beta must be nonnegative");
  if (!(p > 2.0)) throw InvalidArgument("p must exceed 2");
  if (eps && !(*eps > 0.0 && *eps < 1.0)) throw InvalidArgument("eps must lie in (0, 1)");
  if (k && !(*k > 1.0)) throw InvalidArgument("k must exceed 1");
}

void HurstParams::validate() const {
  if (!(h0 > 0.0 && h0 < 1.0)) throw InvalidArgument("H0 must lie in (0, 1)");
  if (!(h > 0.0 && h < 1.0)) throw InvalidArgument("H must lie in (0, 1)");
  if (d == 0) throw InvalidArgument("space dimension must be positive");
}

std::string to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::analytic: return "analytic";
    case FieldKind::fbs_grid: return "fbs-grid";
    case FieldKind::mollified: return "mollified";
    case FieldKind::shifted: return "shifted";
    case FieldKind::stacked: return "stacked";
  }
  return "unknown";
}

void DriverField::time_derivative(double, std::span<const double>, std::span<double>) const {
  throw InvalidArgument("driver of kind '" + to_string(kind()) + "' has no time derivative");
}

double DriverField::operator()(double t, double x) const {
  Scratch out(channels());
  evaluate(t, std::span<const double>(&x, 1), out.span());
  return out.span()[0];
}

Driver make_analytic(std::size_t space_dim, std::size_t channels, double horizon, RawField raw,
                     RegularityParams params, RawField time_derivative) {
  if (space_dim == 0 || channels == 0) throw InvalidArgument("driver needs d >= 1 and M >= 1");
  if (!(horizon > 0.0)) throw InvalidArgument("driver horizon must be positive");
  if (!raw) throw InvalidArgument("analytic driver needs a closed form");
  return std::make_shared<AnalyticField>(space_dim, channels, horizon, std::move(raw), params,
                                         std::move(time_derivative));
}

Driver make_analytic_1d(double horizon, std::function<double(double, double)> raw,
                        RegularityParams params, std::function<double(double, double)> time_derivative) {
  RawField r = [raw = std::move(raw)](double t, std::span<const double> x, std::span<double> out) {
    out[0] = raw(t, x[0]);
  };
  RawField dt;
  if (time_derivative) {
    dt = [f = std::move(time_derivative)](double t, std::span<const double> x, std::span<double> out) {
      out[0] = f(t, x[0]);
    };
  }
  return make_analytic(1, 1, horizon, std::move(r), params, std::move(dt));
}

// --- fBs field ---------------------------------------------------------------

FbsField::FbsField(HurstParams hurst, std::vector<double> times, std::vector<std::vector<double>> axes,
                   std::vector<double> values, std::uint64_t seed, RegularityParams params)
    : DriverField(params),
      hurst_(hurst),
      times_(std::move(times)),
      axes_(std::move(axes)),
      values_(std::move(values)),
      seed_(seed) {
  if (times_.size() < 2 || times_.front() != 0.0) {
    throw InvalidArgument("fBs time lattice must start at 0 and hold >= 2 points");
  }
  if (axes_.empty() || axes_.size() > 7) throw InvalidArgument("fBs needs 1 to 7 space axes");
  std::size_t total = times_.size();
  for (const auto& a : axes_) {
    if (a.empty() || !std::is_sorted(a.begin(), a.end())) {
      throw InvalidArgument("fBs space axes must be non-empty and sorted");
    }
    total *= a.size();
  }
  if (values_.size() != total) throw InvalidArgument("fBs value count does not match lattice shape");
  strides_.assign(axes_.size() + 1, 1);
  for (std::size_t k = axes_.size(); k-- > 0;) {
    strides_[k] = strides_[k + 1] * axes_[k].size();
  }
  // strides_[0] is the time stride: product of all space sizes.
}

double FbsField::node(std::size_t it, std::span<const std::size_t> ix) const {
  std::size_t off = it * strides_[0];
  for (std::size_t k = 0; k < axes_.size(); ++k) off += ix[k] * strides_[k + 1];
  return values_[off];
}

void FbsField::evaluate(double t, std::span<const double> x, std::span<double> out) const {
  const std::size_t d = axes_.size();
  const auto [it, wt] = locate(times_, t);
  std::array<std::size_t, 8> cell{};
  std::array<double, 8> weight{};
  for (std::size_t k = 0; k < d; ++k) {
    const auto [i, w] = locate(axes_[k], x[k]);
    cell[k] = i;
    weight[k] = w;
  }
  double acc = 0.0;
  const std::size_t corners = std::size_t{1} << (d + 1);
  for (std::size_t c = 0; c < corners; ++c) {
    double w = (c & 1u) ? wt : 1.0 - wt;
    if (w == 0.0) continue;
    std::size_t off = (it + (c & 1u)) * strides_[0];
    if (times_.size() == 1) off = 0;
    bool skip = false;
    for (std::size_t k = 0; k < d; ++k) {
      const bool up = (c >> (k + 1)) & 1u;
      const double wk = up ? weight[k] : 1.0 - weight[k];
      if (wk == 0.0) {
        skip = true;
        break;
      }
      w *= wk;
      const std::size_t idx = (axes_[k].size() == 1) ? 0 : cell[k] + (up ? 1 : 0);
      off += idx * strides_[k + 1];
    }
    if (skip) continue;
    acc += w * values_[off];
  }
  out[0] = acc;
}

FbsSampler::FbsSampler(HurstParams hurst, const TimeGrid& time_grid,
                       std::vector<std::vector<double>> space_axes)
    : hurst_(hurst), times_(time_grid.points().begin(), time_grid.points().end()) {
  hurst_.validate();
  if (space_axes.size() != hurst_.d) {
    throw InvalidArgument("fBs needs one space axis per dimension");
  }
  for (auto& axis : space_axes) {
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
    if (!std::binary_search(axis.begin(), axis.end(), 0.0)) {
      axis.insert(std::upper_bound(axis.begin(), axis.end(), 0.0), 0.0);
    }
  }
  axes_ = std::move(space_axes);
  if (times_.size() > kMaxAxis) throw InvalidArgument("oversize grid: time axis exceeds 2048 points");
  for (const auto& a : axes_) {
    if (a.size() > kMaxAxis) throw InvalidArgument("oversize grid: space axis exceeds 2048 points");
  }

  auto factor_axis = [](const std::vector<double>& nodes, double hurst_index) {
    AxisFactor f;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i] != 0.0) f.active.push_back(i);
    }
    const std::size_t n = f.active.size();
    Eigen::MatrixXd cov(n, n);
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        const double c = half_fbm_cov(nodes[f.active[i]], nodes[f.active[j]], 2.0 * hurst_index);
        cov(i, j) = c;
        cov(j, i) = c;
      }
      max_diag = std::max(max_diag, cov(i, i));
    }
    cov.diagonal().array() += 1e-10 * std::max(max_diag, 1e-300);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("covariance factorization failed");
    }
    Eigen::MatrixXd lower = llt.matrixL();
    f.lower.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) f.lower[i * n + j] = (j <= i) ? lower(i, j) : 0.0;
    }
    return f;
  };

  factors_.push_back(factor_axis(times_, hurst_.h0));
  for (const auto& a : axes_) factors_.push_back(factor_axis(a, hurst_.h));
}

double FbsSampler::covariance(const HurstParams& hurst, double t, std::span<const double> x, double s,
                              std::span<const double> y) {
  double c = half_fbm_cov(t, s, 2.0 * hurst.h0);
  for (std::size_t k = 0; k < x.size(); ++k) c *= half_fbm_cov(x[k], y[k], 2.0 * hurst.h);
  return c;
}

std::shared_ptr<const FbsField> FbsSampler::sample(std::uint64_t seed) const {
  std::vector<std::size_t> shape;
  std::size_t total = 1;
  for (const auto& f : factors_) {
    shape.push_back(f.active.size());
    total *= f.active.size();
  }
  std::vector<double> z(total);
  rng::fill_normals(seed, kFbsStream, 0u, total, z);
  for (std::size_t k = 0; k < factors_.size(); ++k) apply_mode(z, shape, k, factors_[k].lower);

  // Scatter the active block into the full lattice; degenerate nodes stay 0.
  std::vector<std::size_t> full_shape{times_.size()};
  for (const auto& a : axes_) full_shape.push_back(a.size());
  std::size_t full_total = 1;
  for (auto s : full_shape) full_total *= s;
  std::vector<double> values(full_total, 0.0);
  std::vector<std::size_t> idx(shape.size(), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (std::size_t k = shape.size(); k-- > 0;) {
      idx[k] = rem % shape[k];
      rem /= shape[k];
    }
    std::size_t off = 0;
    for (std::size_t k = 0; k < shape.size(); ++k) off = off * full_shape[k] + factors_[k].active[idx[k]];
    values[off] = z[flat];
  }
  return std::make_shared<FbsField>(hurst_, times_, axes_, std::move(values), seed,
                                    fbs_regularity(hurst_, 0.01));
}

std::shared_ptr<const FbsField> fbs_generate(const HurstParams& hurst, const TimeGrid& time_grid,
                                             std::vector<std::vector<double>> space_axes,
                                             std::uint64_t seed) {
  return FbsSampler(hurst, time_grid, std::move(space_axes)).sample(seed);
}

RegularityParams fbs_regularity(const HurstParams& hurst, double theta) {
  RegularityParams r;
  r.tau = hurst.h0 - theta;
  r.lambda = hurst.h - theta;
  r.beta = static_cast<double>(hurst.d - 1) * hurst.h + 2.0 * theta;
  r.p = 2.5;
  return r;
}

// --- mollification -------------------------------------------------------------

const MollifierRule& mollifier_rule() {
  static const MollifierRule rule = [] {
    constexpr int kNodes = 64;
    MollifierRule r;
    const double du = 1.0 / kNodes;
    double mass = 0.0;
    double moment = 0.0;
    for (int k = 0; k < kNodes; ++k) {
      const double u = -0.5 + (k + 0.5) * du;
      const double q = 1.0 - 4.0 * u * u;
      const double rho = std::exp(-1.0 / q);
      const double drho = rho * (-8.0 * u / (q * q));
      r.nodes.push_back(u);
      r.weights.push_back(rho * du);
      r.slope_weights.push_back(drho * du);
      mass += rho * du;
      moment += -u * drho * du;
    }
    for (auto& w : r.weights) w /= mass;
    for (auto& w : r.slope_weights) w /= moment;
    return r;
  }();
  return rule;
}

Driver mollify(Driver field, int m) {
  if (m <= 0) throw InvalidArgument("mollification index m must be positive");
  if (!field) throw InvalidArgument("mollify needs a field");
  return std::make_shared<MollifiedField>(std::move(field), m);
}

Driver shift(Driver base, Driver perturbation, double delta) {
  if (!base || !perturbation) throw InvalidArgument("shift needs two fields");
  if (base->channels() != perturbation->channels() || base->space_dim() != perturbation->space_dim()) {
    throw InvalidArgument("shift needs fields of matching shape");
  }
  return std::make_shared<ShiftedField>(std::move(base), std::move(perturbation), delta);
}

Driver stack(std::vector<Driver> fields) {
  if (fields.empty()) throw InvalidArgument("stack needs at least one field");
  for (const auto& f : fields) {
    if (f->space_dim() != fields.front()->space_dim()) {
      throw InvalidArgument("stacked fields must share the space dimension");
    }
  }
  return std::make_shared<StackedField>(std::move(fields));
}

// --- seminorms -------------------------------------------------------------------

double SeminormTerms::largest() const { return std::max({mixed, time, space}); }

SeminormTerms seminorm_terms(const DriverField& field, const RegularityParams& params, const EvalGrid& grid,
                             bool weighted) {
  const std::size_t nt = grid.times.size();
  const std::size_t nx = grid.points.size();
  const std::size_t m = field.channels();
  const std::size_t d = field.space_dim();
  if (nt < 2 || nx < 1) throw InvalidArgument("seminorm grid needs >= 2 times and >= 1 point");
  std::vector<double> table(nt * nx * m);
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j < nx; ++j) {
      if (grid.points[j].size() != d) throw InvalidArgument("seminorm point has wrong dimension");
      field.evaluate(grid.times[i], grid.points[j], std::span<double>(table.data() + (i * nx + j) * m, m));
    }
  }
  auto val = [&](std::size_t i, std::size_t j, std::size_t c) { return table[(i * nx + j) * m + c]; };
  std::vector<double> norms(nx);
  for (std::size_t j = 0; j < nx; ++j) {
    double acc = 0.0;
    for (double v : grid.points[j]) acc += v * v;
    norms[j] = std::sqrt(acc);
  }
  auto dist = [&](std::size_t a, std::size_t b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double diff = grid.points[a][k] - grid.points[b][k];
      acc += diff * diff;
    }
    return std::sqrt(acc);
  };
  const double beta = weighted ? params.beta : 0.0;
  auto weight2 = [&](std::size_t a, std::size_t b) {
    return weighted ? 1.0 + std::pow(norms[a], beta) + std::pow(norms[b], beta) : 1.0;
  };

  double mixed = 0.0, timeterm = 0.0, space = 0.0;
  for (std::size_t s = 0; s < nt; ++s) {
    for (std::size_t t = s + 1; t < nt; ++t) {
      const double dt = std::pow(std::abs(grid.times[t] - grid.times[s]), params.tau);
      if (dt == 0.0) continue;
      for (std::size_t a = 0; a < nx; ++a) {
        double acc = 0.0;
        for (std::size_t c = 0; c < m; ++c) {
          const double v = val(s, a, c) - val(t, a, c);
          acc += v * v;
        }
        const double wx = weighted ? 1.0 + std::pow(norms[a], beta + params.lambda) : 1.0;
        timeterm = std::max(timeterm, std::sqrt(acc) / (dt * wx));
        for (std::size_t b = a + 1; b < nx; ++b) {
          const double dx = dist(a, b);
          if (dx == 0.0) continue;
          double mix = 0.0;
          for (std::size_t c = 0; c < m; ++c) {
            const double v = val(s, a, c) - val(t, a, c) - val(s, b, c) + val(t, b, c);
            mix += v * v;
          }
          mixed = std::max(mixed, std::sqrt(mix) / (dt * std::pow(dx, params.lambda) * weight2(a, b)));
        }
      }
    }
  }
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t a = 0; a < nx; ++a) {
      for (std::size_t b = a + 1; b < nx; ++b) {
        const double dx = dist(a, b);
        if (dx == 0.0) continue;
        double acc = 0.0;
        for (std::size_t c = 0; c < m; ++c) {
          const double v = val(t, b, c) - val(t, a, c);
          acc += v * v;
        }
        space = std::max(space, std::sqrt(acc) / (std::pow(dx, params.lambda) * weight2(a, b)));
      }
    }
  }
  return SeminormTerms{mixed, timeterm, space};
}

double seminorm_estimate(const DriverField& field, const RegularityParams& params, const EvalGrid& grid,
                         bool weighted) {
  return seminorm_terms(field, params, grid, weighted).total();
}

// --- assumptions -------------------------------------------------------------------

namespace {

bool check_h0(const RegularityParams& r) {
  return r.p > 2.0 && r.tau > 0.5 && r.tau <= 1.0 && r.lambda > 0.0 && r.lambda <= 1.0 &&
         r.tau + r.lambda / r.p > 1.0;
}

}  // namespace

AssumptionReport assumption_check(const RegularityParams& params, const std::optional<HurstParams>& hurst,
                                  std::optional<double> theta) {
  AssumptionReport rep;
  rep.h0 = check_h0(params);
  rep.h0_prime = params.tau > 0.5 && params.tau <= 1.0 && params.lambda > 0.0 && params.lambda <= 1.0 &&
                 params.tau + params.lambda / 2.0 > 1.0;
  for (int i = 1; i <= 99; ++i) {
    const double eps = i / 100.0;
    if (params.beta >= 0.0 && params.tau + (1.0 - eps) / params.p > 1.0 &&
        params.lambda + params.beta < 2.0 * eps / (1.0 + eps) * params.tau) {
      rep.h2_eps = true;
      rep.eps_witness = eps;
      break;
    }
  }
  if (hurst) {
    const double dd = static_cast<double>(hurst->d);
    rep.hurst_region = (hurst->h0 + hurst->h / 2.0 > 1.0) && (dd * hurst->h < 2.0 * hurst->h0 - 1.0);
    if (theta) {
      rep.hurst_implied = fbs_regularity(*hurst, *theta);
      rep.hurst_implied_h0 = check_h0(*rep.hurst_implied);
    }
  }
  return rep;
}

std::string AssumptionReport::summary() const {
  std::ostringstream os;
  os << "(H0) p > 2, tau in (1/2,1], lambda in (0,1], tau + lambda/p > 1: " << fmt_bool(h0) << "\n";
  os << "(H0') tau in (1/2,1], lambda in (0,1], tau + lambda/2 > 1: " << fmt_bool(h0_prime) << "\n";
  os << "(H2)(1) interpolation exponent: " << fmt_bool(h2_eps);
  if (eps_witness) os << " (eps = " << *eps_witness << ")";
  os << "\n";
  if (hurst_region) {
    os << "hurst region (H0 + H/2 > 1 and d H < 2 H0 - 1): " << fmt_bool(*hurst_region) << "\n";
  }
  if (hurst_implied) {
    os << "sheet regularity tau = " << hurst_implied->tau << ", lambda = " << hurst_implied->lambda
       << ", beta = " << hurst_implied->beta << "; (H0) at p = " << hurst_implied->p << ": "
       << fmt_bool(hurst_implied_h0.value_or(false)) << "\n";
  }
  return os.str();
}

}  // namespace ybsde
