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

#include "config.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ybsde/common.hpp"

namespace ybsde::cli {

namespace {

std::string type_name(json::value_t t) {
  switch (t) {
    case json::value_t::number_float:
    case json::value_t::number_integer:
    case json::value_t::number_unsigned:
      return "a number";
    case json::value_t::boolean:
      return "a boolean";
    case json::value_t::string:
      return "a string";
    case json::value_t::array:
      return "an array";
    case json::value_t::object:
      return "an object";
    default:
      return "a value";
  }
}

bool is_number(const json& j) { return j.is_number(); }

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

struct TimeFunction {
  std::string type;
  double param = 1.0;

  double value(double t) const {
    if (type == "power") return std::pow(t, param);
    if (type == "sin") return std::sin(param * t);
    if (type == "exp") return std::exp(param * t);
    return t;
  }
  double slope(double t) const {
    if (type == "power") return t > 0.0 ? param * std::pow(t, param - 1.0) : (param == 1.0 ? 1.0 : 0.0);
    if (type == "sin") return param * std::cos(param * t);
    if (type == "exp") return param * std::exp(param * t);
    return 1.0;
  }
};

TimeFunction read_time_function(Section s) {
  TimeFunction f;
  f.type = s.text("type");
  if (f.type == "power") {
    f.param = s.number("exponent");
    if (!(f.param > 0.0)) throw ConfigError(s.key_path("exponent") + " must be positive");
  } else if (f.type == "sin") {
    f.param = s.number("frequency", 1.0);
  } else if (f.type == "exp") {
    f.param = s.number("rate", 1.0);
  } else if (f.type != "linear") {
    throw ConfigError(s.key_path("type") + ": unknown time function '" + f.type + "'");
  }
  s.finish();
  return f;
}

RegularityParams read_regularity(Section s, RegularityParams base) {
  base.tau = s.number("tau", base.tau);
  base.lambda = s.number("lambda", base.lambda);
  base.beta = s.number("beta", base.beta);
  base.p = s.number("p", base.p);
  s.finish();
  return base;
}

HurstParams read_hurst(Section& s, std::size_t d) {
  HurstParams hp{s.number("H0"), s.number("H"), d};
  try {
    hp.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(s.path() + ": " + e.what());
  }
  return hp;
}

struct GeneratorConfig {
  std::string type = "zero";
  double y = 0.0, z = 0.0, c = 0.0, scale = 1.0;
  bool sqrt_abs_x = false;

  double operator()(std::span<const double> x, double yv, double zv) const {
    if (type == "linear") return y * yv + z * zv + c;
    if (type == "sin") return scale * std::sin(yv) * (sqrt_abs_x ? std::sqrt(std::abs(x[0])) : 1.0);
    return 0.0;
  }
};

GeneratorConfig read_generator(std::optional<Section> s) {
  GeneratorConfig g;
  if (!s) return g;
  g.type = s->text("type");
  if (g.type == "linear") {
    g.y = s->number("y", 0.0);
    g.z = s->number("z", 0.0);
    g.c = s->number("const", 0.0);
  } else if (g.type == "sin") {
    g.scale = s->number("scale", 1.0);
    const std::string w = s->text("weight", "none");
    if (w != "none" && w != "sqrt_abs_x") throw ConfigError(s->key_path("weight") + ": expected none or sqrt_abs_x");
    g.sqrt_abs_x = w == "sqrt_abs_x";
  } else if (g.type != "zero") {
    throw ConfigError(s->key_path("type") + ": unknown generator '" + g.type + "'");
  }
  s->finish();
  return g;
}

struct CouplingConfig {
  std::string type = "zero";
  double scale = 1.0;

  double operator()(double y) const {
    if (type == "linear") return scale * y;
    if (type == "sin") return scale * std::sin(y);
    return 0.0;
  }
};

CouplingConfig read_coupling(std::optional<Section> s) {
  CouplingConfig c;
  if (!s) return c;
  c.type = s->text("type");
  if (c.type != "zero" && c.type != "linear" && c.type != "sin") {
    throw ConfigError(s->key_path("type") + ": unknown coupling '" + c.type + "'");
  }
  c.scale = s->number("scale", 1.0);
  s->finish();
  return c;
}

std::string describe(const GeneratorConfig& g) {
  std::ostringstream os;
  os << std::setprecision(17) << "f:" << g.type << ":" << g.y << ":" << g.z << ":" << g.c << ":" << g.scale << ":"
     << g.sqrt_abs_x;
  return os.str();
}

std::string describe(const CouplingConfig& c) {
  std::ostringstream os;
  os << std::setprecision(17) << "g:" << c.type << ":" << c.scale;
  return os.str();
}

}  // namespace

// --- Section ------------------------------------------------------------------------

Section::Section(const json& node, std::string path) : node_(&node), path_(std::move(path)) {
  if (!node.is_object()) throw ConfigError((path_.empty() ? std::string("config") : path_) + " must be an object");
}

bool Section::has(const std::string& key) const { return node_->contains(key); }

std::string Section::key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

const json& Section::get(const std::string& key, json::value_t type, const char* what) {
  used_.insert(key);
  const auto it = node_->find(key);
  if (it == node_->end()) throw ConfigError("missing required key: " + key_path(key));
  const bool ok = type == json::value_t::number_float ? is_number(*it) : it->type() == type;
  if (!ok) throw ConfigError(key_path(key) + " must be " + what + ", got " + type_name(it->type()));
  return *it;
}

double Section::number(const std::string& key) {
  const double v = get(key, json::value_t::number_float, "a number").get<double>();
  if (!std::isfinite(v)) throw ConfigError(key_path(key) + " must be finite");
  return v;
}

double Section::number(const std::string& key, double fallback) {
  used_.insert(key);
  return has(key) ? number(key) : fallback;
}

std::size_t Section::count(const std::string& key) {
  const json& j = get(key, json::value_t::number_float, "a nonnegative integer");
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw ConfigError(key_path(key) + " must be a nonnegative integer");
  }
  return j.get<std::size_t>();
}

std::size_t Section::count(const std::string& key, std::size_t fallback) {
  used_.insert(key);
  return has(key) ? count(key) : fallback;
}

std::uint64_t Section::seed(const std::string& key) { return count(key); }

std::uint64_t Section::seed(const std::string& key, std::uint64_t fallback) {
  used_.insert(key);
  return has(key) ? seed(key) : fallback;
}

bool Section::flag(const std::string& key, bool fallback) {
  used_.insert(key);
  return has(key) ? get(key, json::value_t::boolean, "a boolean").get<bool>() : fallback;
}

std::string Section::text(const std::string& key) {
  return get(key, json::value_t::string, "a string").get<std::string>();
}

std::string Section::text(const std::string& key, const std::string& fallback) {
  used_.insert(key);
  return has(key) ? text(key) : fallback;
}

std::vector<double> Section::numbers(const std::string& key) {
  const json& arr = get(key, json::value_t::array, "an array of numbers");
  std::vector<double> out;
  for (const auto& v : arr) {
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      throw ConfigError(key_path(key) + " must be an array of finite numbers");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<double> Section::numbers(const std::string& key, std::vector<double> fallback) {
  used_.insert(key);
  return has(key) ? numbers(key) : std::move(fallback);
}

Section Section::child(const std::string& key) {
  return Section(get(key, json::value_t::object, "an object"), key_path(key));
}

std::optional<Section> Section::optional_child(const std::string& key) {
  used_.insert(key);
  if (!has(key)) return std::nullopt;
  return child(key);
}

std::vector<Section> Section::children(const std::string& key) {
  const json& arr = get(key, json::value_t::array, "an array of objects");
  std::vector<Section> out;
  for (std::size_t i = 0; i < arr.size(); ++i) out.emplace_back(arr[i], key_path(key) + "[" + std::to_string(i) + "]");
  return out;
}

void Section::finish() const {
  for (const auto& [key, value] : node_->items()) {
    if (key.rfind("_comment", 0) == 0) continue;
    if (!used_.count(key)) throw ConfigError("unknown key: " + key_path(key));
  }
}

// --- functions ----------------------------------------------------------------------

double Function1d::operator()(double x) const {
  const double u = frequency * x;
  double phi = 1.0;
  if (type == "linear") phi = u;
  else if (type == "square") phi = u * u;
  else if (type == "sin") phi = std::sin(u);
  else if (type == "cos") phi = std::cos(u);
  else if (type == "bump") phi = std::exp(-u * u);
  else if (type == "tanh") phi = std::tanh(u);
  return scale * phi + shift;
}

double Function1d::operator()(std::span<const double> x) const {
  double sum = 0.0;
  for (double v : x) sum += v;
  return (*this)(sum);
}

std::string Function1d::describe() const {
  std::ostringstream os;
  os << std::setprecision(17) << type << ":" << scale << ":" << frequency << ":" << shift;
  return os.str();
}

Function1d read_function(Section s) {
  static const std::set<std::string> kTypes{"constant", "linear", "square", "sin", "cos", "bump", "tanh"};
  Function1d f;
  f.type = s.text("type");
  if (!kTypes.count(f.type)) throw ConfigError(s.key_path("type") + ": unknown function '" + f.type + "'");
  f.scale = s.number("scale", 1.0);
  f.frequency = s.number("frequency", 1.0);
  f.shift = s.number("shift", 0.0);
  s.finish();
  return f;
}

// --- driver ---------------------------------------------------------------------------

Driver read_driver(Section s, double horizon, std::size_t d, std::uint64_t default_seed) {
  const std::string kind = s.text("kind");
  Driver out;
  if (kind == "zero") {
    out = make_analytic(
        d, 1, horizon, [](double, std::span<const double>, std::span<double> o) { o[0] = 0.0; }, {},
        [](double, std::span<const double>, std::span<double> o) { o[0] = 0.0; });
  } else if (kind == "separable") {
    const double scale = s.number("scale", 1.0);
    const TimeFunction tf = read_time_function(s.child("time"));
    const Function1d sf = read_function(s.child("space"));
    RegularityParams rp;
    rp.tau = tf.type == "power" ? std::min(1.0, tf.param) : 1.0;
    rp.beta = sf.type == "linear" ? 1.0 : 0.0;
    if (auto r = s.optional_child("regularity")) rp = read_regularity(*r, rp);
    out = make_analytic(
        d, 1, horizon,
        [=](double t, std::span<const double> x, std::span<double> o) { o[0] = scale * tf.value(t) * sf(x); }, rp,
        [=](double t, std::span<const double> x, std::span<double> o) { o[0] = scale * tf.slope(t) * sf(x); });
  } else if (kind == "fbs") {
    const HurstParams hp = read_hurst(s, d);
    const std::size_t steps = s.count("time_steps");
    Section sp = s.child("space");
    const double lo = sp.number("lo"), hi = sp.number("hi");
    const std::size_t points = sp.count("points");
    sp.finish();
    if (!(hi > lo) || points < 2) throw ConfigError(sp.path() + ": need lo < hi and at least 2 points");
    if (steps == 0) throw ConfigError(s.key_path("time_steps") + " must be positive");
    std::vector<std::vector<double>> axes(d, linspace(lo, hi, points));
    out = fbs_generate(hp, TimeGrid::uniform(horizon, steps), std::move(axes), s.seed("seed", default_seed));
  } else if (kind == "file") {
    out = load_fbs(s.text("path"));
    if (std::abs(out->horizon() - horizon) > 1e-12 * horizon) {
      throw ConfigError(s.key_path("path") + ": field horizon does not match the experiment horizon");
    }
  } else if (kind == "stack") {
    std::vector<Driver> fields;
    std::uint64_t k = 0;
    for (auto& f : s.children("fields")) fields.push_back(read_driver(f, horizon, d, default_seed + 1000 * ++k));
    if (fields.empty()) throw ConfigError(s.key_path("fields") + " must not be empty");
    out = stack(std::move(fields));
  } else {
    throw ConfigError(s.key_path("kind") + ": unknown driver kind '" + kind + "'");
  }
  if (out->space_dim() != d) throw ConfigError(s.path() + ": driver space dimension must be " + std::to_string(d));
  if (s.has("mollify")) {
    const std::size_t m = s.count("mollify");
    if (m == 0) throw ConfigError(s.key_path("mollify") + " must be positive");
    out = mollify(out, static_cast<int>(m));
  }
  s.finish();
  return out;
}

// --- forward --------------------------------------------------------------------------

ForwardConfig read_forward(Section s) {
  ForwardConfig fc;
  const std::size_t d = s.count("d", 1);
  if (d == 0) throw ConfigError(s.key_path("d") + " must be positive");
  std::vector<double> x0 = s.numbers("x0", std::vector<double>(d, 0.0));
  std::vector<double> drift = s.numbers("drift", std::vector<double>(d, 0.0));
  std::vector<double> diffusion(d * d, 0.0);
  for (std::size_t k = 0; k < d; ++k) diffusion[k * d + k] = 1.0;
  diffusion = s.numbers("diffusion", diffusion);
  if (x0.size() != d) throw ConfigError(s.key_path("x0") + " must have d entries");
  if (drift.size() != d) throw ConfigError(s.key_path("drift") + " must have d entries");
  if (diffusion.size() != d * d) throw ConfigError(s.key_path("diffusion") + " must have d * d entries");
  const double kappa = s.number("mean_reversion", 0.0);
  fc.horizon = s.number("horizon");
  fc.steps = s.count("steps");
  fc.paths = s.count("paths");
  s.finish();
  if (!(fc.horizon > 0.0)) throw ConfigError(s.key_path("horizon") + " must be positive");
  if (fc.steps == 0 || fc.paths == 0) throw ConfigError(s.path() + ": steps and paths must be positive");
  fc.spec = SdeSpec::constant(x0, drift, diffusion);
  if (kappa != 0.0) {
    fc.spec.drift = [drift, kappa](double, std::span<const double> x, std::span<double> out) {
      for (std::size_t k = 0; k < x.size(); ++k) out[k] = drift[k] - kappa * x[k];
    };
    std::ostringstream tag;
    tag << std::setprecision(17) << fc.spec.tag << "|mean_reversion=" << kappa;
    fc.spec.tag = tag.str();
  }
  return fc;
}

RegressionBasis read_basis(std::optional<Section> s) {
  RegressionBasis b;
  if (!s) return b;
  b.degree = static_cast<int>(s->count("degree", static_cast<std::size_t>(b.degree)));
  b.ridge = s->number("ridge", b.ridge);
  b.ball_radii = s->numbers("ball_radii", {});
  s->finish();
  if (b.ridge < 0.0) throw ConfigError(s->key_path("ridge") + " must be nonnegative");
  return b;
}

PicardOptions read_picard(std::optional<Section> s) {
  PicardOptions p;
  if (!s) return p;
  p.max_iter = static_cast<int>(s->count("max_iter", static_cast<std::size_t>(p.max_iter)));
  p.tol = s->number("tol", p.tol);
  p.allow_halving = s->flag("allow_halving", p.allow_halving);
  s->finish();
  if (p.max_iter < 1) throw ConfigError(s->key_path("max_iter") + " must be at least 1");
  return p;
}

// --- BSDE -----------------------------------------------------------------------------

BsdeSpec read_bsde(Section s, const SdeSpec& forward, Driver field) {
  BsdeSpec spec;
  spec.forward = forward;
  spec.n = 1;
  std::ostringstream tag;
  Section term = s.child("terminal");
  if (term.has("type") && term.text("type") == "running_max") {
    const double scale = term.number("scale", 1.0), shift = term.number("shift", 0.0);
    term.finish();
    const auto running_max = [](const PathView& p, std::size_t i, std::span<double> out) {
      double m = p.at(0)[0];
      for (std::size_t j = 1; j <= i; ++j) m = std::max(m, p.at(j)[0]);
      out[0] = m;
    };
    spec.terminal = [=](const PathView& p, std::size_t i, std::span<double> out) {
      running_max(p, i, out);
      out[0] = scale * out[0] + shift;
    };
    spec.state_features = running_max;
    spec.feature_dim = 1;
    tag << std::setprecision(17) << "xi:running_max:" << scale << ":" << shift;
  } else {
    const Function1d h = read_function(term);
    spec.terminal = [h](const PathView& p, std::size_t i, std::span<double> out) { out[0] = h(p.at(i)); };
    tag << "xi:" << h.describe();
  }
  const GeneratorConfig f = read_generator(s.optional_child("generator"));
  const CouplingConfig g = read_coupling(s.optional_child("coupling"));
  s.finish();
  if (f.type != "zero") {
    spec.generator = [f](double, std::span<const double> x, std::span<const double> y, std::span<const double> z,
                         std::span<double> out) { out[0] = f(x, y[0], z[0]); };
  }
  if (g.type != "zero") {
    const std::size_t m = field->channels();
    spec.coupling = [g, m](double, std::span<const double>, std::span<const double> y, std::span<double> out) {
      for (std::size_t i = 0; i < m; ++i) out[i] = g(y[0]);
    };
  }
  spec.field = std::move(field);
  spec.tag = tag.str() + "|" + describe(f) + "|" + describe(g);
  return spec;
}

// --- PDE ------------------------------------------------------------------------------

PdeSpec read_pde(Section s, Driver field, bool need_n) {
  PdeSpec spec;
  spec.d = s.count("d", 1);
  if (spec.d != 1 && spec.d != 2) throw ConfigError(s.key_path("d") + " must be 1 or 2");
  const std::size_t d = spec.d;
  if (need_n) spec.n = s.number("n");
  spec.horizon = s.number("horizon");
  const Function1d h = read_function(s.child("h"));
  spec.h = [h](std::span<const double> x) { return h(x); };
  const std::vector<double> drift = s.numbers("drift", std::vector<double>(d, 0.0));
  std::vector<double> diffusion(d * d, 0.0);
  for (std::size_t k = 0; k < d; ++k) diffusion[k * d + k] = 1.0;
  diffusion = s.numbers("diffusion", diffusion);
  if (drift.size() != d) throw ConfigError(s.key_path("drift") + " must have d entries");
  if (diffusion.size() != d * d) throw ConfigError(s.key_path("diffusion") + " must have d * d entries");
  spec.drift = [drift](std::span<const double>, std::span<double> out) {
    std::copy(drift.begin(), drift.end(), out.begin());
  };
  spec.diffusion = [diffusion](std::span<const double>, std::span<double> out) {
    std::copy(diffusion.begin(), diffusion.end(), out.begin());
  };
  const GeneratorConfig f = read_generator(s.optional_child("generator"));
  const CouplingConfig g = read_coupling(s.optional_child("coupling"));
  spec.nu = s.number("nu", spec.nu);
  s.finish();
  if (f.type != "zero") {
    spec.generator = [f](double, std::span<const double> x, double u, std::span<const double> sz) {
      return f(x, u, sz[0]);
    };
  }
  if (g.type != "zero") {
    const std::size_t m = field->channels();
    spec.coupling = [g, m](double u, std::span<double> out) {
      for (std::size_t i = 0; i < m; ++i) out[i] = g(u);
    };
  }
  spec.field = std::move(field);
  std::ostringstream tag;
  tag << std::setprecision(17) << "h:" << h.describe() << "|b:";
  for (double v : drift) tag << v << ";";
  tag << "|sigma:";
  for (double v : diffusion) tag << v << ";";
  tag << "|" << describe(f) << "|" << describe(g);
  spec.tag = tag.str();
  return spec;
}

std::vector<EvalPoint> read_points(Section& s, const std::string& key, std::size_t d) {
  std::vector<EvalPoint> out;
  for (auto& p : s.children(key)) {
    EvalPoint pt{p.number("t", 0.0), p.numbers("x")};
    p.finish();
    if (pt.x.size() != d) throw ConfigError(p.key_path("x") + " must have " + std::to_string(d) + " entries");
    out.push_back(std::move(pt));
  }
  if (out.empty()) throw ConfigError(s.key_path(key) + " must not be empty");
  return out;
}

}  // namespace ybsde::cli
