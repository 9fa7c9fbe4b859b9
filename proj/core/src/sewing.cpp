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

#include "ybsde/sewing.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "ybsde/common.hpp"

namespace ybsde {

namespace {

double checked(const Germ& germ, double s, double t) {
  const double v = germ(s, t);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os.precision(17);
    os << "non-finite germ value at (s, t) = (" << s << ", " << t << ")";
    throw NumericalError(os.str());
  }
  return v;
}

// Sum of the germ over 2^level equal pieces of [a, b].
double cell_sum(const Germ& germ, double a, double b, int level) {
  const std::size_t pieces = std::size_t{1} << level;
  const double h = (b - a) / static_cast<double>(pieces);
  double acc = 0.0;
  for (std::size_t k = 0; k < pieces; ++k) {
    const double s = a + h * static_cast<double>(k);
    const double t = (k + 1 == pieces) ? b : a + h * static_cast<double>(k + 1);
    acc += checked(germ, s, t);
  }
  return acc;
}

}  // namespace

IntegralResult sew(const Germ& germ, std::span<const double> base, int levels, double tol) {
  if (base.size() < 2) throw InvalidArgument("sewing needs a base grid of at least 2 points");
  for (std::size_t i = 0; i + 1 < base.size(); ++i) {
    if (!(base[i + 1] > base[i])) throw InvalidArgument("sewing base grid must be strictly increasing");
  }
  if (levels < 0 || levels > 40) throw InvalidArgument("refinement levels must lie in [0, 40]");
  const std::size_t cells = base.size() - 1;

  IntegralResult out;
  out.times.assign(base.begin(), base.end());
  out.germ = germ;
  std::vector<double> per_cell(cells);
  double previous = 0.0;
  for (int level = 0; level <= levels; ++level) {
    parallel_for(cells, [&](std::size_t i) { per_cell[i] = cell_sum(germ, base[i], base[i + 1], level); });
    double total = 0.0;
    for (double v : per_cell) total += v;
    out.level_totals.push_back(total);
    out.level_used = level;
    if (level > 0) {
      const double diff = std::abs(total - previous);
      out.cauchy.push_back(diff);
      if (tol > 0.0 && diff < tol) break;
    }
    previous = total;
  }
  out.cumulative.assign(base.size(), 0.0);
  for (std::size_t i = 0; i < cells; ++i) out.cumulative[i + 1] = out.cumulative[i] + per_cell[i];
  double widest = 0.0;
  for (std::size_t i = 0; i < cells; ++i) widest = std::max(widest, base[i + 1] - base[i]);
  out.mesh_used = widest / static_cast<double>(std::size_t{1} << out.level_used);
  return out;
}

IntegralResult sew(const Germ& germ, const TimeGrid& base, int levels, double tol) {
  return sew(germ, base.points(), levels, tol);
}

Germ young_germ(const SamplePath& y, const SamplePath& x, Driver field) {
  if (!field) throw InvalidArgument("young integral needs a driver");
  if (x.dim() != field->space_dim()) {
    throw InvalidArgument("path dimension does not match the driver's space dimension");
  }
  const std::size_t m = field->channels();
  if (y.dim() != 1 && y.dim() != m) {
    throw InvalidArgument("integrand must be scalar or have one component per channel");
  }
  return [y, x, field = std::move(field), m](double s, double t) {
    std::array<double, 8> xs_buf{}, e1_buf{}, e0_buf{}, ys_buf{};
    std::vector<double> heap;
    const std::size_t d = x.dim();
    std::span<double> xs, e1, e0, ys;
    if (d <= 8 && m <= 8) {
      xs = {xs_buf.data(), d};
      e1 = {e1_buf.data(), m};
      e0 = {e0_buf.data(), m};
      ys = {ys_buf.data(), y.dim()};
    } else {
      heap.resize(d + 3 * std::max(m, y.dim()));
      xs = {heap.data(), d};
      e1 = {heap.data() + d, m};
      e0 = {heap.data() + d + m, m};
      ys = {heap.data() + d + 2 * m, y.dim()};
    }
    x.interpolate(s, xs);
    y.interpolate(s, ys);
    field->evaluate(t, xs, e1);
    field->evaluate(s, xs, e0);
    double acc = 0.0;
    for (std::size_t c = 0; c < m; ++c) acc += ys[y.dim() == 1 ? 0 : c] * (e1[c] - e0[c]);
    return acc;
  };
}

IntegralResult nonlinear_young_integral(const SamplePath& y, const SamplePath& x, Driver field, Interval iv,
                                        int levels, double tol) {
  const auto [a, b] = resolve(x.grid(), iv);
  if (b == a) throw InvalidArgument("integration interval is a single point");
  const auto pts = x.grid().points();
  Germ germ = young_germ(y, x, std::move(field));
  return sew(germ, pts.subspan(a, b - a + 1), levels, tol);
}

IntegralResult young_integral_against_path(const SamplePath& y, const SamplePath& m, int levels, double tol) {
  if (m.dim() != 1 || y.dim() != 1) throw InvalidArgument("young_integral_against_path needs scalar paths");
  Germ germ = [y, m](double s, double t) {
    return y.interpolate(s) * (m.interpolate(t) - m.interpolate(s));
  };
  return sew(germ, m.grid(), levels, tol);
}

double young_delta(double tau, double lambda, double p1, double p2) {
  return std::min(tau + 1.0 / p2 - 1.0, tau + lambda / p1 - 1.0);
}

double young_estimate_constant(double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("estimate constant needs delta > 0");
  return std::pow(2.0, delta) / (1.0 - std::pow(2.0, -delta));
}

Certificate remainder_certificate(const IntegralResult& result, const std::vector<ControlTerm>& controls) {
  if (controls.empty()) throw InvalidArgument("certificate needs at least one control");
  double eps0 = std::numeric_limits<double>::infinity();
  for (const auto& c : controls) {
    if (!(c.exponent > 1.0)) throw InvalidArgument("control exponents must exceed 1");
    eps0 = std::min(eps0, c.exponent - 1.0);
  }
  const double constant =
      std::pow(static_cast<double>(controls.size()), eps0) / (1.0 - std::pow(2.0, -eps0));
  Certificate cert;
  const auto& t = result.times;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      double sum = 0.0;
      for (const auto& c : controls) sum += std::pow(c.control(t[i], t[j]), c.exponent);
      const double bound = constant * sum;
      const double remainder = std::abs(result.between(i, j) - result.germ(t[i], t[j]));
      // A relative slack of a few ulps absorbs the rounding in the sums.
      const double slack = 64.0 * std::numeric_limits<double>::epsilon() *
                           (std::abs(result.between(i, j)) + std::abs(result.germ(t[i], t[j])));
      const bool holds = remainder <= bound + slack;
      cert.all_hold = cert.all_hold && holds;
      if (bound > 0.0) cert.worst_ratio = std::max(cert.worst_ratio, remainder / bound);
      else if (remainder > slack) cert.worst_ratio = std::numeric_limits<double>::infinity();
      cert.entries.push_back({i, j, remainder, bound, holds});
    }
  }
  return cert;
}

}  // namespace ybsde
