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

// Strict reading of experiment configs and the builders that turn config
// sections into library specs. Every key is looked up through a Section,
// which remembers what was read so that unknown keys can be rejected.

#ifndef YBSDE_TOOLS_CONFIG_HPP_
#define YBSDE_TOOLS_CONFIG_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "ybsde/bsde.hpp"
#include "ybsde/driver.hpp"
#include "ybsde/forward.hpp"
#include "ybsde/pde.hpp"
#include "ybsde/regression.hpp"

namespace ybsde::cli {

using nlohmann::json;

/// Malformed config: missing or unknown key, wrong type, value out of range.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Section {
 public:
  Section(const json& node, std::string path);

  const std::string& path() const { return path_; }
  bool has(const std::string& key) const;
  std::string key_path(const std::string& key) const;

  double number(const std::string& key);
  double number(const std::string& key, double fallback);
  std::size_t count(const std::string& key);
  std::size_t count(const std::string& key, std::size_t fallback);
  std::uint64_t seed(const std::string& key);
  std::uint64_t seed(const std::string& key, std::uint64_t fallback);
  bool flag(const std::string& key, bool fallback);
  std::string text(const std::string& key);
  std::string text(const std::string& key, const std::string& fallback);
  std::vector<double> numbers(const std::string& key);
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback);
  Section child(const std::string& key);
  std::optional<Section> optional_child(const std::string& key);
  /// Elements of an array of objects.
  std::vector<Section> children(const std::string& key);

  /// Throws ConfigError naming the first key that was never read. Keys
  /// starting with "_comment" are ignored.
  void finish() const;

 private:
  const json& get(const std::string& key, json::value_t type, const char* what);

  const json* node_;
  std::string path_;
  std::set<std::string> used_;
};

/// f(x) = scale * phi(frequency * (x_1 + ... + x_d)) + shift.
struct Function1d {
  std::string type = "constant";
  double scale = 1.0, frequency = 1.0, shift = 0.0;

  double operator()(double x) const;
  double operator()(std::span<const double> x) const;
  std::string describe() const;
};
Function1d read_function(Section s);

/// Driver on [0, horizon] x R^d.
Driver read_driver(Section s, double horizon, std::size_t d, std::uint64_t default_seed);

struct ForwardConfig {
  SdeSpec spec;
  double horizon = 1.0;
  std::size_t steps = 50;
  std::size_t paths = 1000;
};
ForwardConfig read_forward(Section s);

RegressionBasis read_basis(std::optional<Section> s);
PicardOptions read_picard(std::optional<Section> s);

/// Terminal, generator and coupling of a scalar BSDE (N = 1).
BsdeSpec read_bsde(Section s, const SdeSpec& forward, Driver field);

/// d_t u + L u + f + g(u) d_t eta = 0 on [-n, n]^d; n is read when
/// need_n is set and passed separately by the box families otherwise.
PdeSpec read_pde(Section s, Driver field, bool need_n);

std::vector<EvalPoint> read_points(Section& s, const std::string& key, std::size_t d);

}  // namespace ybsde::cli

#endif  // YBSDE_TOOLS_CONFIG_HPP_
