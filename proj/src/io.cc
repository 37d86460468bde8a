// Copyright 2026 The optmotion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "optmotion/io.h"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "optmotion/errors.h"

namespace optmotion {
namespace {

using Record = std::map<std::string, std::vector<std::string>>;

void WriteValues(std::ostream& out, const std::string& key, const Vector& values) {
  out << key;
  for (int i = 0; i < values.size(); ++i) out << ' ' << FormatDouble(values(i));
  out << '\n';
}

void WriteValues(std::ostream& out, const std::string& key, const std::vector<double>& values) {
  WriteValues(out, key, Eigen::Map<const Vector>(values.data(), values.size()).eval());
}

// Reads "key token..." lines up to "end" after checking the magic header.
Record ReadRecord(std::istream& in, const std::string& magic, int version) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty " + magic + " file");
  std::istringstream header(line);
  std::string word;
  int found_version = 0;
  if (!(header >> word >> found_version) || word != magic) {
    throw ParseError("not a " + magic + " file");
  }
  if (found_version != version) {
    throw ParseError(magic + " version " + std::to_string(found_version) +
                     " is not supported (expected " + std::to_string(version) + ")");
  }
  Record record;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string key;
    if (!(fields >> key)) continue;
    if (key == "end") return record;
    if (record.count(key)) throw ParseError("duplicate key '" + key + "' in " + magic);
    std::vector<std::string>& tokens = record[key];
    std::string token;
    while (fields >> token) tokens.push_back(token);
  }
  throw ParseError(magic + " file is truncated");
}

const std::vector<std::string>& Field(const Record& record, const std::string& key) {
  const auto it = record.find(key);
  if (it == record.end()) throw ParseError("missing key '" + key + "'");
  return it->second;
}

Vector Doubles(const Record& record, const std::string& key, int expected) {
  const auto& tokens = Field(record, key);
  if (static_cast<int>(tokens.size()) != expected) {
    throw ParseError("key '" + key + "' needs " + std::to_string(expected) + " values, got " +
                     std::to_string(tokens.size()));
  }
  Vector values(expected);
  for (int i = 0; i < expected; ++i) values(i) = ParseDouble(tokens[i]);
  return values;
}

double Double(const Record& record, const std::string& key) {
  return Doubles(record, key, 1)(0);
}

int Integer(const Record& record, const std::string& key) {
  const double value = Double(record, key);
  if (value != static_cast<int>(value)) {
    throw ParseError("key '" + key + "' must be an integer");
  }
  return static_cast<int>(value);
}

std::string AnchorFileName(int index) {
  char name[32];
  std::snprintf(name, sizeof(name), "anchor_%04d.dmp", index);
  return name;
}

}  // namespace

void WriteDmp(const Dmp& dmp, std::ostream& out) {
  const int n = dmp.state_dim();
  out << "optmotion-dmp " << kDmpFormatVersion << '\n';
  out << "state_dim " << n << '\n';
  out << "tau " << FormatDouble(dmp.params.tau) << '\n';
  out << "damping " << FormatDouble(dmp.params.damping) << '\n';
  out << "stiffness " << FormatDouble(dmp.params.stiffness) << '\n';
  out << "alpha " << FormatDouble(dmp.params.alpha) << '\n';
  out << "basis_count " << dmp.params.basis_count << '\n';
  out << "start_at_rest " << (dmp.params.start_at_rest ? 1 : 0) << '\n';
  WriteValues(out, "centers", dmp.basis.centers);
  WriteValues(out, "widths", dmp.basis.widths);
  for (int i = 0; i < n; ++i) {
    WriteValues(out, "weights_" + std::to_string(i), dmp.weights.row(i).transpose().eval());
  }
  WriteValues(out, "x0", dmp.x0);
  WriteValues(out, "initial_velocity", dmp.initial_velocity);
  WriteValues(out, "xf_anchor", dmp.xf_anchor);
  out << "anchor_cost " << FormatDouble(dmp.anchor_cost) << '\n';
  WriteValues(out, "anchor_value_gradient", dmp.anchor_value_gradient);
  out << "fit_residual " << FormatDouble(dmp.fit_residual) << '\n';
  WriteValues(out, "fit_residual_max", dmp.fit_residual_max);
  out << "end\n";
}

Dmp ReadDmp(std::istream& in) {
  const Record record = ReadRecord(in, "optmotion-dmp", kDmpFormatVersion);
  Dmp dmp;
  const int n = Integer(record, "state_dim");
  if (n < 1) throw ParseError("state_dim must be positive");
  dmp.params.tau = Double(record, "tau");
  dmp.params.damping = Double(record, "damping");
  dmp.params.stiffness = Double(record, "stiffness");
  dmp.params.alpha = Double(record, "alpha");
  dmp.params.basis_count = Integer(record, "basis_count");
  dmp.params.start_at_rest = Integer(record, "start_at_rest") != 0;
  try {
    ValidateParams(dmp.params);
  } catch (const ContractError& error) {
    throw ParseError(std::string("invalid DMP parameters: ") + error.what());
  }
  const int count = dmp.params.basis_count;
  const Vector centers = Doubles(record, "centers", count);
  const Vector widths = Doubles(record, "widths", count);
  dmp.basis.centers.assign(centers.data(), centers.data() + count);
  dmp.basis.widths.assign(widths.data(), widths.data() + count);
  dmp.weights.resize(n, count);
  for (int i = 0; i < n; ++i) {
    dmp.weights.row(i) = Doubles(record, "weights_" + std::to_string(i), count).transpose();
  }
  dmp.x0 = Doubles(record, "x0", n);
  dmp.initial_velocity = Doubles(record, "initial_velocity", n);
  dmp.xf_anchor = Doubles(record, "xf_anchor", n);
  dmp.anchor_cost = Double(record, "anchor_cost");
  dmp.anchor_value_gradient = Doubles(record, "anchor_value_gradient", n);
  dmp.fit_residual = Double(record, "fit_residual");
  dmp.fit_residual_max = Doubles(record, "fit_residual_max", n);
  return dmp;
}

void SaveDmp(const Dmp& dmp, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  WriteDmp(dmp, out);
}

Dmp LoadDmp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return ReadDmp(in);
}

void SaveGrid(const SampleGrid& grid, const std::filesystem::path& directory) {
  ValidateGrid(grid);
  std::filesystem::create_directories(directory);
  std::ofstream out(directory / "manifest.txt");
  if (!out) throw std::runtime_error("cannot write a manifest in '" + directory.string() + "'");
  out << "optmotion-grid " << kGridFormatVersion << '\n';
  out << "state_dim " << grid.region.dim() << '\n';
  out << "axis_count " << grid.axis_count() << '\n';
  WriteValues(out, "region_lower", grid.region.lower);
  WriteValues(out, "region_upper", grid.region.upper);
  WriteValues(out, "origin", grid.origin);
  for (int d = 0; d < grid.axis_count(); ++d) {
    WriteValues(out, "direction_" + std::to_string(d), grid.directions[d]);
    out << "coordinate_count_" << d << ' ' << grid.coordinates[d].size() << '\n';
    WriteValues(out, "coordinates_" + std::to_string(d), grid.coordinates[d]);
  }
  out << "anchor_count " << grid.size() << '\n';
  for (int k = 0; k < grid.size(); ++k) {
    out << "anchor_" << k << ' ' << AnchorFileName(k) << '\n';
    SaveDmp(grid.anchors[k], directory / AnchorFileName(k));
  }
  out << "end\n";
}

SampleGrid LoadGrid(const std::filesystem::path& directory) {
  std::ifstream in(directory / "manifest.txt");
  if (!in) throw ParseError("no grid manifest in '" + directory.string() + "'");
  const Record record = ReadRecord(in, "optmotion-grid", kGridFormatVersion);
  SampleGrid grid;
  const int n = Integer(record, "state_dim");
  const int axes = Integer(record, "axis_count");
  if (n < 1 || axes < 1) throw ParseError("grid dimensions must be positive");
  grid.region.lower = Doubles(record, "region_lower", n);
  grid.region.upper = Doubles(record, "region_upper", n);
  grid.origin = Doubles(record, "origin", n);
  for (int d = 0; d < axes; ++d) {
    const std::string suffix = std::to_string(d);
    grid.directions.push_back(Doubles(record, "direction_" + suffix, n));
    const int count = Integer(record, "coordinate_count_" + suffix);
    const Vector c = Doubles(record, "coordinates_" + suffix, count);
    grid.coordinates.emplace_back(c.data(), c.data() + count);
  }
  const int anchors = Integer(record, "anchor_count");
  for (int k = 0; k < anchors; ++k) {
    const auto& file = Field(record, "anchor_" + std::to_string(k));
    if (file.size() != 1) throw ParseError("anchor entry needs exactly one file name");
    grid.anchors.push_back(LoadDmp(directory / file.front()));
  }
  try {
    ValidateGrid(grid);
  } catch (const ContractError& error) {
    throw ParseError(std::string("inconsistent grid: ") + error.what());
  }
  return grid;
}

}  // namespace optmotion
