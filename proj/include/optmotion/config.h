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


#ifndef OPTMOTION_CONFIG_H_
#define OPTMOTION_CONFIG_H_

#include <iosfwd>
#include <string>

#include "optmotion/ocp.h"
#include "optmotion/sampler.h"

namespace optmotion {

// Everything a command-line run needs. Defaults reproduce the example-system
// experiment: x0 = (5, 5), goals on the line x2 = 5 with x1 in [1, 9].
struct RunConfig {
  // [system]
  std::string system = "example_sys1";

  // [ocp]
  Vector x0 = Vector::Constant(2, 5.0);
  Vector xf = Vector::Constant(2, 5.0);
  double tf = 8.0;
  Matrix R = Matrix::Identity(2, 2);
  bool state_cost = false;  // adds q |x|^2 to the running cost
  double state_weight = 1.0;
  int n_intervals = 80;
  Direction direction = Direction::kForward;
  // initial: u(0) = 0 as a hard constraint; none: inputs unconstrained
  InputPin input_pin = InputPin::kInitialNode;

  // [solver]
  AugmentedLagrangianOptions nlp;

  // [dmp]
  double damping = 20.0;
  double alpha = 3.0;
  int basis_count = 81;
  bool start_at_rest = false;
  int rollout_steps = 800;

  // [value]
  InitialInputRule initial_input = InitialInputRule::kQuadraticExtrapolation;

  // [sampler]
  Vector start = Vector::Constant(2, 5.0);
  Vector sample_direction = Vector::Unit(2, 0);
  Vector region_lower = (Vector(2) << 1.0, 5.0).finished();
  Vector region_upper = (Vector(2) << 9.0, 5.0).finished();
  double j_threshold = 10.0;
  int t_samples = 15;
  double delta_x = 0.2;
  int t_steps = 5;
  bool both_senses = true;  // sample -direction too, sharing t_samples

  // [sweep]
  double sweep_spacing = 0.05;
  bool oracle = true;
  int workers = 1;

  // [query]
  BlendMode blend = BlendMode::kMultilinear;

  // [output]
  std::string output_directory = "out";
};

// Parses "[section]" headers and "key = value" lines; '#' starts a comment.
// Keys missing from the text keep their defaults. Throws ParseError on
// unknown sections or keys and on malformed values.
RunConfig ParseConfig(std::istream& in);
RunConfig LoadConfig(const std::string& path);

// Sets one field from its text form, as if it appeared in a config file.
void SetConfigValue(RunConfig& config, const std::string& section, const std::string& key,
                    const std::string& value);

// Canonical text of every field; ParseConfig(FormatConfig(c)) formats back to
// the same bytes.
std::string FormatConfig(const RunConfig& config);

// Checks the optimal control fields. Throws ContractError on inconsistency.
void ValidateConfig(const RunConfig& config);
// Additionally checks the DMP, sampler and sweep fields.
void ValidateSamplingConfig(const RunConfig& config);

OcpProblem ProblemFromConfig(const RunConfig& config);
AnchorSettings SettingsFromConfig(const RunConfig& config);
SamplerConfig SamplerFromConfig(const RunConfig& config);

}  // namespace optmotion

#endif  // OPTMOTION_CONFIG_H_
