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

#include "report.hpp"

#include <cstdio>
#include <fstream>

#include "ybsde/common.hpp"

namespace ybsde::cli {

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render(const Cell& cell) {
  if (std::holds_alternative<double>(cell)) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", std::get<double>(cell));
    return buf;
  }
  if (std::holds_alternative<long long>(cell)) return std::to_string(std::get<long long>(cell));
  if (std::holds_alternative<std::string>(cell)) return quote(std::get<std::string>(cell));
  return {};
}

}  // namespace

void Table::add(std::vector<Cell> row) {
  if (row.size() != header.size()) throw std::logic_error("table row width does not match the header");
  rows.push_back(std::move(row));
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.header.size(); ++c) out += (c ? "," : "") + quote(table.header[c]);
  out += "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + render(row[c]);
    out += "\r\n";
  }
  return out;
}

void write_text(const std::string& file, const std::string& content) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open " + file + " for writing");
  out << content;
  if (!out) throw InvalidArgument("cannot write " + file);
}

}  // namespace ybsde::cli
