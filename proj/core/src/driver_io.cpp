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

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "ybsde/common.hpp"
#include "ybsde/driver.hpp"

namespace ybsde {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little, "binary fBs files assume a little-endian host");

std::vector<std::size_t> index_of(std::size_t flat, const std::vector<std::size_t>& shape) {
  std::vector<std::size_t> idx(shape.size());
  for (std::size_t k = shape.size(); k-- > 0;) {
    idx[k] = flat % shape[k];
    flat /= shape[k];
  }
  return idx;
}

}  // namespace

void save_fbs(const FbsField& field, const std::string& stem, FbsEncoding encoding) {
  std::vector<std::size_t> shape{field.times().size()};
  for (const auto& a : field.axes()) shape.push_back(a.size());
  const auto& params = field.params();
  const fs::path base(stem);
  const std::string data_name = base.filename().string() + (encoding == FbsEncoding::binary ? ".bin" : ".csv");

  json side = {
      {"format", "ybsde-fbs"},
      {"version", 1},
      {"encoding", encoding == FbsEncoding::binary ? "binary" : "csv"},
      {"data", data_name},
      {"hurst", {{"H0", field.hurst().h0}, {"H", field.hurst().h}, {"d", field.hurst().d}}},
      {"seed", field.seed()},
      {"grids", {{"time", field.times()}, {"space", field.axes()}}},
      {"shape", shape},
      {"params", {{"tau", params.tau}, {"lambda", params.lambda}, {"beta", params.beta}, {"p", params.p}}},
  };

  const fs::path data_path = base.parent_path() / data_name;
  if (encoding == FbsEncoding::binary) {
    std::ofstream out(data_path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot open " + data_path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(field.values().data()),
              static_cast<std::streamsize>(field.values().size() * sizeof(double)));
  } else {
    std::ofstream out(data_path);
    if (!out) throw InvalidArgument("cannot open " + data_path.string() + " for writing");
    out << "t";
    for (std::size_t k = 0; k < field.axes().size(); ++k) out << ",x" << (k + 1);
    out << ",value\n" << std::setprecision(17);
    for (std::size_t flat = 0; flat < field.values().size(); ++flat) {
      const auto idx = index_of(flat, shape);
      out << field.times()[idx[0]];
      for (std::size_t k = 0; k < field.axes().size(); ++k) out << ',' << field.axes()[k][idx[k + 1]];
      out << ',' << field.values()[flat] << '\n';
    }
  }
  std::ofstream js(base.string() + ".json");
  if (!js) throw InvalidArgument("cannot open " + base.string() + ".json for writing");
  js << side.dump(2) << '\n';
}

std::shared_ptr<const FbsField> load_fbs(const std::string& sidecar_path) {
  std::ifstream in(sidecar_path);
  if (!in) throw InvalidArgument("cannot open fBs sidecar " + sidecar_path);
  json side;
  try {
    in >> side;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed fBs sidecar: ") + e.what());
  }
  if (side.value("format", "") != "ybsde-fbs") throw InvalidArgument("sidecar is not an fBs file");
  if (side.value("version", 0) != 1) throw InvalidArgument("unsupported fBs file version");
  try {
    HurstParams hurst{side.at("hurst").at("H0").get<double>(), side.at("hurst").at("H").get<double>(),
                      side.at("hurst").at("d").get<std::size_t>()};
    auto times = side.at("grids").at("time").get<std::vector<double>>();
    auto axes = side.at("grids").at("space").get<std::vector<std::vector<double>>>();
    RegularityParams params;
    params.tau = side.at("params").at("tau").get<double>();
    params.lambda = side.at("params").at("lambda").get<double>();
    params.beta = side.at("params").at("beta").get<double>();
    params.p = side.at("params").at("p").get<double>();
    std::size_t total = times.size();
    for (const auto& a : axes) total *= a.size();

    const std::string encoding = side.at("encoding").get<std::string>();
    const fs::path data_path = fs::path(sidecar_path).parent_path() / side.at("data").get<std::string>();
    std::vector<double> values(total);
    if (encoding == "binary") {
      std::ifstream bin(data_path, std::ios::binary);
      if (!bin) throw InvalidArgument("cannot open fBs data " + data_path.string());
      bin.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(total * sizeof(double)));
      if (bin.gcount() != static_cast<std::streamsize>(total * sizeof(double))) {
        throw InvalidArgument("fBs data file is shorter than its declared shape");
      }
    } else if (encoding == "csv") {
      std::ifstream csv(data_path);
      if (!csv) throw InvalidArgument("cannot open fBs data " + data_path.string());
      std::string line;
      std::getline(csv, line);
      for (std::size_t flat = 0; flat < total; ++flat) {
        if (!std::getline(csv, line)) throw InvalidArgument("fBs data file is shorter than its declared shape");
        const auto comma = line.find_last_of(',');
        values[flat] = std::stod(line.substr(comma + 1));
      }
    } else {
      throw InvalidArgument("unknown fBs encoding '" + encoding + "'");
    }
    return std::make_shared<FbsField>(hurst, std::move(times), std::move(axes), std::move(values),
                                      side.at("seed").get<std::uint64_t>(), params);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed fBs sidecar: ") + e.what());
  }
}

}  // namespace ybsde
