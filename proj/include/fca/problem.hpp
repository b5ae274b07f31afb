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

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "fca/common.hpp"
#include "fca/prox.hpp"

namespace fca {

struct ValueGrad {
  double value;
  Vec gradient;
};

struct KnownSolution {
  Vec x;
  std::optional<Vec> y;  ///< absent when no multiplier exists
  double phi;
};

/// Composite problem  min_x f(x) + g(c(x)).
///
/// f and c are smooth; g comes from the prox catalog. Oracles are pure
/// functions of their arguments, so a spec may be shared across threads.
/// Convexity of g o c along the horizon of g is the caller's responsibility;
/// it cannot be checked from the oracles.
struct ProblemSpec {
  std::string name;
  Index dim_x = 0;
  Index dim_c = 0;
  std::function<ValueGrad(const Vec&)> f;
  std::function<Vec(const Vec&)> c;
  /// (x, v) -> c'(x)^T v
  std::function<Vec(const Vec&, const Vec&)> jtvp;
  ProxFunction g = ProxFunction::nonpositive_orthant(1);
  /// Projection onto (hzn g)°. Empty means: use g.project_horizon_polar.
  std::function<Vec(const Vec&)> horizon_polar;
  std::optional<KnownSolution> known_solution;
  /// Strong convexity modulus of f, which also lower-bounds that of the
  /// augmented Lagrangian in x.
  std::optional<double> strong_convexity;
  /// False for formulations outside the fully convex setting (Kanzow-Steck).
  bool convex = true;

  Vec project_horizon_polar(const Vec& y) const;
};

struct KktResidual {
  double stationarity;  ///< ||grad f(x) + c'(x)^T y||
  double attachment;    ///< ||c(x) - prox_g(c(x) + y)||
};

/// f(x) + g(c(x)); +inf when c(x) is outside dom g.
/// Throws EvaluationError on non-finite oracle output.
double evaluate_phi(const ProblemSpec& p, const Vec& x);

KktResidual kkt_residuals(const ProblemSpec& p, const Vec& x, const Vec& y);

// Built-in problems. All scalar ones use g = indicator of R_-.

/// min x  s.t.  x^2 - x <= 0;  solution (0, 1).
ProblemSpec regular_problem();
/// min x  s.t.  x^2 <= 0;  solution 0, no multiplier.
ProblemSpec irregular_problem();
/// min x  s.t.  1 - x^3 <= 0;  solution (1, 1/3), nonconvex formulation.
ProblemSpec kanzow_steck_problem();
/// min x  s.t.  x >= 0 (g = indicator of R_+);  solution (0, -1).
ProblemSpec halfline_problem();

/// Data of the seeded box-constrained QP  min 1/2 x'Qx + q'x  s.t. Ax <= b.
struct BoxQp {
  Mat Q;
  Vec q;
  Mat A;
  Vec b;
};

/// Deterministic generator: std::mt19937_64(seed), raw draws mapped to [-1, 1).
/// Q = B'B/n + I, b = A x_unc - 1/2 with x_unc the unconstrained minimiser.
BoxQp make_box_qp(Index n, Index m, std::uint64_t seed);

/// Problem view of a box QP; known_solution comes from active-set enumeration.
ProblemSpec box_qp_problem(const BoxQp& qp);
ProblemSpec box_qp_problem(Index n, Index m, std::uint64_t seed);

/// Looks up "regular", "irregular", "kanzow_steck", "halfline" or "box_qp".
/// Throws ParameterError for unknown names or bad sizes.
ProblemSpec builtin_problem(std::string_view name, Index n = 4, Index m = 2, std::uint64_t seed = 1);

/// Primal-dual solution of  min 1/2 x'Hx + h'x  s.t.  Cx <= d  by enumerating
/// all 2^rows active sets (H positive definite). For small constraint counts.
struct QpSolution {
  Vec x;
  Vec y;
  double value;
};
QpSolution solve_qp_by_enumeration(const Mat& H, const Vec& h, const Mat& C, const Vec& d);

} // namespace fca
