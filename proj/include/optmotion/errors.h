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

#ifndef OPTMOTION_ERRORS_H_
#define OPTMOTION_ERRORS_H_

#include <stdexcept>
#include <string>

namespace optmotion {

// violated precondition: wrong dimensions, invalid parameters
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// an optional capability (e.g. the actuation inverse) is not available
class CapabilityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// NaN/Inf, singular matrices, underflow
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// a least-squares problem with fewer equations than unknowns
class IllPosedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// a result that is required to come from a converged solve did not
class SolverStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfRegionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// malformed configuration or persisted file
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace optmotion

#endif  // OPTMOTION_ERRORS_H_
