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

// ybsde: config-driven experiment runner.
//
//   ybsde run <config.json> [--threads N] [--out DIR]
//   ybsde check <config.json>
//   ybsde list
//
// The output directory is --out, else the config's "output_dir", else
// $YBSDE_OUT_DIR, else ./ybsde-out. Exit status: 0 success, 2 config or
// argument error, 3 numerical failure, 1 anything else (I/O).

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "experiments.hpp"
#include "ybsde/common.hpp"

namespace {

using ybsde::cli::json;

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;
constexpr const char* kManifestFormat = "ybsde-run-manifest";

json load_config(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ybsde::cli::ConfigError("cannot read " + file);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ybsde::cli::ConfigError(file + ": " + e.what());
  }
  // A run manifest carries the config it was produced from.
  if (root.is_object() && root.value("format", "") == kManifestFormat) {
    if (!root.contains("config")) throw ybsde::cli::ConfigError("missing required key: config");
    return root["config"];
  }
  return root;
}

std::string output_dir(const json& root, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (root.is_object() && root.contains("output_dir") && root["output_dir"].is_string()) {
    return root["output_dir"].get<std::string>();
  }
  if (const char* env = std::getenv("YBSDE_OUT_DIR"); env && *env) return env;
  return "ybsde-out";
}

int run(const std::string& file, const std::string& out_flag, std::size_t threads) {
  const json root = load_config(file);
  ybsde::set_thread_count(threads);
  ybsde::cli::RunContext ctx{output_dir(root, out_flag), true};
  // Validate everything before touching the output directory.
  ybsde::cli::run_experiment(root, ctx);
  std::filesystem::create_directories(ctx.out_dir);
  ctx.check_only = false;

  const auto t0 = std::chrono::steady_clock::now();
  const auto result = ybsde::cli::run_experiment(root, ctx);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const auto dir = std::filesystem::path(ctx.out_dir);
  ybsde::cli::write_text((dir / "results.csv").string(), ybsde::cli::to_csv(result.table));
  std::string summary = "experiment: " + root["experiment"].get<std::string>() + "\n";
  for (const auto& line : result.summary) summary += line + "\n";
  ybsde::cli::write_text((dir / "summary.txt").string(), summary);
  std::vector<std::string> artifacts{"results.csv", "summary.txt", "manifest.json"};
  artifacts.insert(artifacts.end(), result.artifacts.begin(), result.artifacts.end());
  const json manifest = {{"format", kManifestFormat},
                         {"version", 1},
                         {"library_version", std::string(ybsde::version())},
                         {"experiment", root["experiment"]},
                         {"seed", root.contains("seed") ? root["seed"] : json()},
                         {"threads", ybsde::thread_count()},
                         {"wall_time_s", wall},
                         {"artifacts", artifacts},
                         {"details", result.details},
                         {"config", root}};
  ybsde::cli::write_text((dir / "manifest.json").string(), manifest.dump(2) + "\n");
  std::cout << summary << "wall time: " << wall << " s\n" << "output: " << ctx.out_dir << "\n";
  return 0;
}

int check(const std::string& file) {
  const json root = load_config(file);
  ybsde::cli::run_experiment(root, {"", true});
  std::cout << "config OK: " << root["experiment"].get<std::string>() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments for backward SDEs driven by nonlinear Young integrals", "ybsde"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ybsde::version()));

  std::string config, out;
  std::size_t threads = 0;
  auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a JSON config (or a run manifest)");
  run_cmd->add_option("config", config, "Config file")->required();
  run_cmd->add_option("--threads", threads, "Worker cap (0 = hardware concurrency); results do not depend on it");
  run_cmd->add_option("--out", out, "Output directory (default: config output_dir, $YBSDE_OUT_DIR, ./ybsde-out)");
  auto* check_cmd = app.add_subcommand("check", "Validate a config without running it");
  check_cmd->add_option("config", config, "Config file")->required();
  auto* list_cmd = app.add_subcommand("list", "Print the experiment names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*list_cmd) {
      for (const auto& name : ybsde::cli::experiment_names()) std::cout << name << "\n";
      return 0;
    }
    if (*check_cmd) return check(config);
    return run(config, out, threads);
  } catch (const ybsde::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ybsde::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kConfigError;
  } catch (const ybsde::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
