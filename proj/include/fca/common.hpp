// Copyright 2026 The fca-alm Authors
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

#include <Eigen/Core>

#include <limits>
#include <stdexcept>
#include <string>

namespace fca {

using Index = Eigen::Index;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Invalid parameter passed to an operation (nonpositive step, bad range, ...).
class ParameterError : public std::invalid_argument {
public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// An oracle returned a non-finite value where a finite one is required.
class EvaluationError : public std::runtime_error {
public:
  explicit EvaluationError(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative routine could not make progress (line search, bracketing).
class SolveError : public std::runtime_error {
public:
  explicit SolveError(const std::string& what) : std::runtime_error(what) {}
};

inline void require_positive(double value, const char* name) {
  if (!(value > 0.0)) throw ParameterError(std::string(name) + " must be positive");
}

} // namespace fca
