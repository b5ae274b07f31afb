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

#include <optional>
#include <vector>

#include "fca/common.hpp"
#include "fca/problem.hpp"

namespace fca {

enum class InnerMode { gradient_descent, exact_1d };

struct InnerStop {
  /// Gradient-norm tolerance (gradient_descent) or bracket width (exact_1d).
  double grad_tol = 1e-8;
  int max_iters = 200000;
  /// Strong convexity modulus of L_mu(., y); enables gap certification.
  std::optional<double> strong_convexity;
  InnerMode mode = InnerMode::gradient_descent;
  /// exact_1d only: keep bisecting until the certified gap is below this.
  std::optional<double> gap_tol;
  bool record_values = false;
};

struct InnerResult {
  Vec x;
  double grad_norm = 0.0;
  /// Upper bound on L_mu(x, y) - inf L_mu(., y); valid for convex subproblems.
  std::optional<double> certified_gap;
  int iters = 0;
  /// Objective values after each accepted step (record_values only).
  std::vector<double> values;
};

/// Augmented Lagrangian  f(x) + g^mu(c(x) + mu y) - mu/2 ||y||^2  and its x-gradient.
ValueGrad al_value_grad(const ProblemSpec& p, const Vec& x, const Vec& y, double mu);

/// Approximately minimises x -> L_mu(x, y) from x0.
///
/// gradient_descent: steepest descent with Armijo backtracking (c1 = 1e-4,
/// trial step 1, halving, at most 60 halvings) until ||grad|| <= grad_tol.
/// exact_1d (n = 1): bisection on the derivative over a bracket grown by
/// doubling steps from x0 in the descent direction, so warm starts stay in
/// their basin on nonconvex subproblems.
///
/// Throws SolveError when the line search or the bracketing fails and
/// ParameterError for exact_1d with n > 1.
InnerResult minimize_al(const ProblemSpec& p, const Vec& y, double mu, const Vec& x0, const InnerStop& stop);

} // namespace fca
