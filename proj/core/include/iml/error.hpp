// Copyright 2026 The iml Authors
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

#ifndef IML_ERROR_HPP_
#define IML_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace iml {

// Caller supplied data that violates a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation produced non-finite values or hit a singular system.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An object was used before it reached the required state (e.g. an
// untrained model).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The plant simulation diverged or produced non-finite state.
class SimulationFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace iml

#endif  // IML_ERROR_HPP_
