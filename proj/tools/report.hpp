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

// Tabular results and the artifacts written for every run.

#ifndef YBSDE_TOOLS_REPORT_HPP_
#define YBSDE_TOOLS_REPORT_HPP_

#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace ybsde::cli {

using Cell = std::variant<std::monostate, double, long long, std::string>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

/// RFC 4180: CRLF line ends, fields quoted when they hold a comma, quote or
/// line break; doubles with 17 significant digits; empty cell for no value.
std::string to_csv(const Table& table);

struct ExperimentResult {
  Table table;
  std::vector<std::string> summary;
  nlohmann::json details = nlohmann::json::object();
  std::vector<std::string> artifacts;  // extra files written next to results.csv
};

void write_text(const std::string& file, const std::string& content);

}  // namespace ybsde::cli

#endif  // YBSDE_TOOLS_REPORT_HPP_
