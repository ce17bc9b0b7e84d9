// Copyright 2026 The ILoSA Authors
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

#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace ilosa {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Error categories shared across modules. Callers that need to distinguish
// them catch the concrete type; everything derives from std::exception.

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by gp::correct_labels when the weight row at the query point is
// numerically zero; the caller is expected to append a sample instead.
class CorrectionUndefined : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite simulator state.
class SimulationDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ilosa
