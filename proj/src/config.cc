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


#include "optmotion/config.h"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "optmotion/errors.h"

namespace optmotion {
namespace {

struct Field {
  const char* section;
  const char* key;
  std::function<std::string(const RunConfig&)> format;
  std::function<void(RunConfig&, const std::string&)> parse;
};

std::vector<std::string> Tokens(const std::string& value) {
  std::istringstream in(value);
  std::vector<std::string> tokens;
  std::string token;
  while (in >> token) tokens.push_back(token);
  return tokens;
}

std::string Single(const std::string& value) {
  const auto tokens = Tokens(value);
  if (tokens.size() != 1) throw ParseError("expected a single value, got '" + value + "'");
  return tokens.front();
}

double ToDouble(const std::string& value) { return ParseDouble(Single(value)); }

int ToInt(const std::string& value) {
  const std::string token = Single(value);
  std::size_t used = 0;
  int result = 0;
  try {
    result = std::stoi(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size()) throw ParseError("malformed integer '" + token + "'");
  return result;
}

bool ToBool(const std::string& value) {
  const std::string token = Single(value);
  if (token == "true") return true;
  if (token == "false") return false;
  throw ParseError("expected true or false, got '" + token + "'");
}

Vector ToVector(const std::string& value) {
  const auto tokens = Tokens(value);
  if (tokens.empty()) throw ParseError("expected at least one number");
  Vector result(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) result(i) = ParseDouble(tokens[i]);
  return result;
}

// square matrix written row-major on one line
Matrix ToSquareMatrix(const std::string& value) {
  const Vector entries = ToVector(value);
  const int size = static_cast<int>(std::lround(std::sqrt(entries.size())));
  if (size * size != entries.size()) {
    throw ParseError("matrix needs a square number of entries, got " +
                     std::to_string(entries.size()));
  }
  Matrix result(size, size);
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) result(i, j) = entries(i * size + j);
  }
  return result;
}

std::string Format(double value) { return FormatDouble(value); }
std::string Format(int value) { return std::to_string(value); }
std::string Format(bool value) { return value ? "true" : "false"; }

std::string Format(const Vector& value) {
  std::string text;
  for (int i = 0; i < value.size(); ++i) text += (i ? " " : "") + FormatDouble(value(i));
  return text;
}

std::string FormatMatrix(const Matrix& value) {
  std::string text;
  for (int i = 0; i < value.rows(); ++i) {
    for (int j = 0; j < value.cols(); ++j) {
      text += (text.empty() ? "" : " ") + FormatDouble(value(i, j));
    }
  }
  return text;
}

template <typename Enum>
struct EnumName {
  Enum value;
  const char* name;
};

constexpr EnumName<Direction> kDirections[] = {{Direction::kForward, "forward"},
                                               {Direction::kBackward, "backward"}};
constexpr EnumName<InputPin> kInputPins[] = {{InputPin::kInitialNode, "initial"},
                                             {InputPin::kNone, "none"}};
constexpr EnumName<InitialInputRule> kInitialInputs[] = {
    {InitialInputRule::kInitialNode, "initial_node"},
    {InitialInputRule::kQuadraticExtrapolation, "quadratic_extrapolation"},
    {InitialInputRule::kFirstInteriorNode, "first_interior_node"}};
constexpr EnumName<BlendMode> kBlendModes[] = {{BlendMode::kMultilinear, "multilinear"},
                                               {BlendMode::kCostWeighted, "cost_weighted"}};

template <typename Enum, std::size_t N>
std::string EnumToString(const EnumName<Enum> (&names)[N], Enum value) {
  for (const auto& entry : names) {
    if (entry.value == value) return entry.name;
  }
  throw ContractError("enum value without a name");
}

template <typename Enum, std::size_t N>
Enum EnumFromString(const EnumName<Enum> (&names)[N], const std::string& value) {
  const std::string token = Single(value);
  std::string choices;
  for (const auto& entry : names) {
    if (token == entry.name) return entry.value;
    choices += (choices.empty() ? "" : ", ") + std::string(entry.name);
  }
  throw ParseError("unknown value '" + token + "' (expected one of " + choices + ")");
}

#define OPTMOTION_FIELD(section, key, member, to, from)                            \
  Field {                                                                          \
    section, key, [](const RunConfig& c) { return from(c.member); },               \
        [](RunConfig& c, const std::string& v) { c.member = to(v); }               \
  }

#define OPTMOTION_ENUM_FIELD(section, key, member, names)                              \
  Field {                                                                              \
    section, key, [](const RunConfig& c) { return EnumToString(names, c.member); },    \
        [](RunConfig& c, const std::string& v) { c.member = EnumFromString(names, v); } \
  }

std::string Text(const std::string& value) { return Single(value); }
std::string FormatText(const std::string& value) { return value; }

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      OPTMOTION_FIELD("system", "name", system, Text, FormatText),
      OPTMOTION_FIELD("ocp", "x0", x0, ToVector, Format),
      OPTMOTION_FIELD("ocp", "xf", xf, ToVector, Format),
      OPTMOTION_FIELD("ocp", "tf", tf, ToDouble, Format),
      OPTMOTION_FIELD("ocp", "R", R, ToSquareMatrix, FormatMatrix),
      OPTMOTION_FIELD("ocp", "state_cost", state_cost, ToBool, Format),
      OPTMOTION_FIELD("ocp", "state_weight", state_weight, ToDouble, Format),
      OPTMOTION_FIELD("ocp", "n_intervals", n_intervals, ToInt, Format),
      OPTMOTION_ENUM_FIELD("ocp", "direction", direction, kDirections),
      OPTMOTION_ENUM_FIELD("ocp", "input_pin", input_pin, kInputPins),
      OPTMOTION_FIELD("solver", "initial_penalty", nlp.initial_penalty, ToDouble, Format),
      OPTMOTION_FIELD("solver", "penalty_growth", nlp.penalty_growth, ToDouble, Format),
      OPTMOTION_FIELD("solver", "max_penalty", nlp.max_penalty, ToDouble, Format),
      OPTMOTION_FIELD("solver", "max_outer_iterations", nlp.max_outer_iterations, ToInt,
                      Format),
      OPTMOTION_FIELD("solver", "feasibility_tolerance", nlp.feasibility_tolerance, ToDouble,
                      Format),
      OPTMOTION_FIELD("solver", "stationarity_tolerance", nlp.stationarity_tolerance,
                      ToDouble, Format),
      OPTMOTION_FIELD("solver", "lbfgs_memory", nlp.inner.memory, ToInt, Format),
      OPTMOTION_FIELD("solver", "lbfgs_max_iterations", nlp.inner.max_iterations, ToInt,
                      Format),
      OPTMOTION_FIELD("dmp", "damping", damping, ToDouble, Format),
      OPTMOTION_FIELD("dmp", "alpha", alpha, ToDouble, Format),
      OPTMOTION_FIELD("dmp", "basis_count", basis_count, ToInt, Format),
      OPTMOTION_FIELD("dmp", "start_at_rest", start_at_rest, ToBool, Format),
      OPTMOTION_FIELD("dmp", "rollout_steps", rollout_steps, ToInt, Format),
      OPTMOTION_ENUM_FIELD("value", "initial_input", initial_input, kInitialInputs),
      OPTMOTION_FIELD("sampler", "start", start, ToVector, Format),
      OPTMOTION_FIELD("sampler", "direction", sample_direction, ToVector, Format),
      OPTMOTION_FIELD("sampler", "region_lower", region_lower, ToVector, Format),
      OPTMOTION_FIELD("sampler", "region_upper", region_upper, ToVector, Format),
      OPTMOTION_FIELD("sampler", "j_threshold", j_threshold, ToDouble, Format),
      OPTMOTION_FIELD("sampler", "t_samples", t_samples, ToInt, Format),
      OPTMOTION_FIELD("sampler", "delta_x", delta_x, ToDouble, Format),
      OPTMOTION_FIELD("sampler", "t_steps", t_steps, ToInt, Format),
      OPTMOTION_FIELD("sampler", "both_senses", both_senses, ToBool, Format),
      OPTMOTION_FIELD("sweep", "spacing", sweep_spacing, ToDouble, Format),
      OPTMOTION_FIELD("sweep", "oracle", oracle, ToBool, Format),
      OPTMOTION_FIELD("sweep", "workers", workers, ToInt, Format),
      OPTMOTION_ENUM_FIELD("query", "blend", blend, kBlendModes),
      OPTMOTION_FIELD("output", "directory", output_directory, Text, FormatText),
  };
  return fields;
}

#undef OPTMOTION_FIELD
#undef OPTMOTION_ENUM_FIELD

std::string Trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

}  // namespace

RunConfig ParseConfig(std::istream& in) {
  RunConfig config;
  std::string section;
  std::string line;
  int number = 0;
  std::vector<std::string> seen;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(number) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(where + "unterminated section header");
      section = Trim(line.substr(1, line.size() - 2));
      bool known = false;
      for (const Field& field : Fields()) known = known || section == field.section;
      if (!known) throw ParseError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto equals = line.find('=');
    if (equals == std::string::npos) throw ParseError(where + "expected key = value");
    if (section.empty()) throw ParseError(where + "key outside any section");
    const std::string key = Trim(line.substr(0, equals));
    const std::string value = Trim(line.substr(equals + 1));
    const Field* match = nullptr;
    for (const Field& field : Fields()) {
      if (section == field.section && key == field.key) match = &field;
    }
    if (!match) throw ParseError(where + "unknown key '" + key + "' in [" + section + "]");
    const std::string qualified = section + "." + key;
    for (const std::string& previous : seen) {
      if (previous == qualified) throw ParseError(where + "duplicate key '" + qualified + "'");
    }
    seen.push_back(qualified);
    try {
      match->parse(config, value);
    } catch (const ParseError& error) {
      throw ParseError(where + qualified + ": " + error.what());
    }
  }
  return config;
}

void SetConfigValue(RunConfig& config, const std::string& section, const std::string& key,
                    const std::string& value) {
  for (const Field& field : Fields()) {
    if (section == field.section && key == field.key) {
      try {
        field.parse(config, value);
      } catch (const ParseError& error) {
        throw ParseError(section + "." + key + ": " + error.what());
      }
      return;
    }
  }
  throw ParseError("unknown config key '" + section + "." + key + "'");
}

RunConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config '" + path + "'");
  return ParseConfig(in);
}

std::string FormatConfig(const RunConfig& config) {
  std::string text;
  std::string section;
  for (const Field& field : Fields()) {
    if (section != field.section) {
      if (!section.empty()) text += "\n";
      section = field.section;
      text += "[" + section + "]\n";
    }
    text += std::string(field.key) + " = " + field.format(config) + "\n";
  }
  return text;
}

void ValidateConfig(const RunConfig& config) {
  ValidateProblem(ProblemFromConfig(config));
  ValidateOptions(config.nlp);
  if (config.output_directory.empty()) throw ContractError("output directory is empty");
}

void ValidateSamplingConfig(const RunConfig& config) {
  ValidateConfig(config);
  const AnchorSettings settings = SettingsFromConfig(config);
  ValidateParams(settings.dmp_params());
  if (config.rollout_steps < 3) throw ContractError("rollout_steps must be at least 3");
  ValidateSamplerConfig(SamplerFromConfig(config));
  if (config.region_lower.size() != config.x0.size()) {
    throw ContractError("sampler region must match the state dimension");
  }
  if (!(config.sweep_spacing > 0.0)) throw ContractError("sweep spacing must be positive");
  if (config.workers < 1) throw ContractError("workers must be at least 1");
}

OcpProblem ProblemFromConfig(const RunConfig& config) {
  OcpProblem problem = MakeProblem(MakeDynamics(config.system), config.x0, config.xf,
                                   config.tf, config.R, config.n_intervals);
  if (config.state_cost) problem.cost = QuadraticStateCost(config.R, config.state_weight);
  problem.input_pin = config.input_pin;
  return config.direction == Direction::kBackward ? ReverseProblem(problem) : problem;
}

AnchorSettings SettingsFromConfig(const RunConfig& config) {
  AnchorSettings settings;
  settings.dynamics = MakeDynamics(config.system);
  settings.x0 = config.x0;
  settings.tf = config.tf;
  settings.cost = config.state_cost ? QuadraticStateCost(config.R, config.state_weight)
                                    : InputEnergyCost(config.R);
  settings.n_intervals = config.n_intervals;
  settings.input_pin = config.input_pin;
  settings.dmp = CriticallyDampedParams(config.tf, config.damping, config.alpha,
                                        config.basis_count);
  settings.dmp.start_at_rest = config.start_at_rest;
  settings.rollout_steps = config.rollout_steps;
  settings.initial_input_rule = config.initial_input;
  settings.solve.nlp = config.nlp;
  return settings;
}

SamplerConfig SamplerFromConfig(const RunConfig& config) {
  SamplerConfig sampler;
  sampler.start = config.start;
  sampler.direction = config.sample_direction;
  sampler.region.lower = config.region_lower;
  sampler.region.upper = config.region_upper;
  sampler.j_threshold = config.j_threshold;
  sampler.t_samples = config.t_samples;
  sampler.delta_x = config.delta_x;
  sampler.t_steps = config.t_steps;
  return sampler;
}

}  // namespace optmotion
