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

// The named experiments of the CLI. Each runner reads its whole config
// section (rejecting unknown keys), then runs unless only a check was asked.

#ifndef YBSDE_TOOLS_EXPERIMENTS_HPP_
#define YBSDE_TOOLS_EXPERIMENTS_HPP_

#include <string>
#include <vector>

#include "config.hpp"
#include "report.hpp"

namespace ybsde::cli {

struct RunContext {
  std::string out_dir;
  bool check_only = false;
};

std::vector<std::string> experiment_names();

/// Dispatches on root["experiment"]. Returns an empty result when
/// check_only is set.
ExperimentResult run_experiment(const json& root, const RunContext& ctx);

}  // namespace ybsde::cli

#endif  // YBSDE_TOOLS_EXPERIMENTS_HPP_
