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

#include <fstream>
#include <iomanip>

#include "json.hpp"
#include "ybsde/bsde.hpp"
#include "ybsde/common.hpp"

namespace ybsde {

void save_solution_csv(const BsdeSolution& solution, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw InvalidArgument("cannot open " + file + " for writing");
  const std::size_t n = solution.n, d = solution.d;
  out << "path,t";
  for (std::size_t k = 0; k < n; ++k) out << ",Y" << (k + 1);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < d; ++l) out << ",Z" << (k + 1) << (l + 1);
  }
  out << "\r\n" << std::setprecision(17);
  const auto& grid = solution.grid;
  for (std::size_t p = 0; p < solution.n_paths; ++p) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out << p << ',' << grid[i];
      for (std::size_t k = 0; k < n; ++k) out << ',' << solution.y_at(p, i, k);
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < d; ++l) {
          out << ',';
          if (i < grid.steps()) out << solution.z_at(p, i, k, l);
        }
      }
      out << "\r\n";
    }
  }
}

void save_solution_manifest(const BsdeSolution& solution, const BsdeSpec& spec, const PathEnsemble& ensemble,
                            const RegressionBasis& basis, const PicardOptions& picard, const std::string& file) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : solution.steps) {
    steps.push_back({{"index", s.index},
                     {"iterations", s.iterations},
                     {"residuals", s.residuals},
                     {"contraction", s.contraction},
                     {"halved", s.halved}});
  }
  nlohmann::json y0 = nlohmann::json::array();
  for (std::size_t k = 0; k < solution.n; ++k) {
    const auto m = solution.y0(k);
    y0.push_back({{"mean", m.mean}, {"se", m.se}});
  }
  const nlohmann::json doc = {
      {"format", "ybsde-bsde-run"},
      {"version", 1},
      {"library", std::string(version())},
      {"spec_hash", hex64(spec.hash())},
      {"forward_hash", hex64(ensemble.spec_hash())},
      {"seed", ensemble.seed()},
      {"n_paths", solution.n_paths},
      {"steps", solution.grid.steps()},
      {"basis", {{"degree", basis.degree}, {"ball_radii", basis.ball_radii}, {"ridge", basis.ridge}}},
      {"picard", {{"max_iter", picard.max_iter}, {"tol", picard.tol}, {"allow_halving", picard.allow_halving}}},
      {"y0", y0},
      {"trace", steps}};
  std::ofstream out(file);
  if (!out) throw InvalidArgument("cannot open " + file + " for writing");
  out << doc.dump(2) << '\n';
}

}  // namespace ybsde
