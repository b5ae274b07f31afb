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

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fca/common.hpp"
#include "fca/inner.hpp"
#include "fca/problem.hpp"

namespace fca {

/// Nonempty compact convex set of safeguarded multiplier estimates.
class SafeguardSet {
public:
  enum class Kind { box, ball, polar_horizon_ball };

  static SafeguardSet box(Vec lo, Vec hi);
  /// [-radius, radius]^m
  static SafeguardSet symmetric_box(Index m, double radius);
  static SafeguardSet ball(double radius);
  /// {y in (hzn g)° : ||y|| <= radius}; the default construction for cones.
  static SafeguardSet polar_horizon_ball(const ProblemSpec& p, double radius);

  Kind kind() const { return kind_; }
  Vec project(const Vec& y) const;
  /// Projection onto rho * set, i.e. rho * project(y / rho).
  Vec project_scaled(double rho, const Vec& y) const;
  double distance(const Vec& y) const;

private:
  SafeguardSet(Kind kind, Vec lo, Vec hi, double radius, std::function<Vec(const Vec&)> polar);

  Kind kind_;
  Vec lo_, hi_;
  double radius_ = 0.0;
  std::function<Vec(const Vec&)> polar_;
};

struct PenaltyRule {
  enum class Setting { fixed, geometric, adaptive };
  Setting setting = Setting::fixed;
  double beta = 0.5;
  double theta = 0.9;

  static PenaltyRule fixed() { return {}; }
  static PenaltyRule geometric(double beta);
  static PenaltyRule adaptive(double beta, double theta);
};

/// Data of the elastic safeguard. Construction enforces eta^2 < beta < eta.
struct ElasticParams {
  double theta;
  double eta;
  double beta;
  SafeguardSet set;

  ElasticParams(double theta, double eta, double beta, SafeguardSet set);
};

struct ClassicalMode {};
struct RigidMode {
  SafeguardSet set;
};
/// classical: no safeguard; rigid: project onto a fixed set; elastic: onto rho_k * set.
/// In elastic mode the penalty schedule comes from ElasticParams.
using AlmMode = std::variant<ClassicalMode, RigidMode, ElasticParams>;

struct EpsSchedule {
  enum class Kind { practical, summable };
  Kind kind = Kind::practical;
  double eps0 = 1.0;
  double factor = 0.5;  ///< kappa_eps (practical) or nu (summable)
  double floor = 1e-9;  ///< practical only

  /// eps_{k+1} = max(floor, kappa eps_k)
  static EpsSchedule practical(double eps0, double kappa, double floor);
  /// eps_k = eps0 nu^k
  static EpsSchedule summable(double eps0, double nu);
  double next(double eps) const;
};

struct Termination {
  double eps_term = 1e-9;
  double attach_tol = 1e-9;
  int max_outer = 500;
  double dual_blowup = 1e6;
};

struct StartPolicy {
  /// warm: x^{k-1} seeds iteration k; cold: x_cold seeds every iteration.
  bool warm = true;
  Vec x_cold;

  static StartPolicy warm_start() { return {}; }
  static StartPolicy cold_start(Vec x) { return {false, std::move(x)}; }
};

struct InnerSettings {
  enum class Mode { automatic, gradient_descent, exact_1d };
  /// automatic: exact_1d for scalar problems, gradient descent otherwise.
  Mode mode = Mode::automatic;
  int max_iters = 200000;
};

struct AlmConfig {
  AlmMode mode = ClassicalMode{};
  PenaltyRule penalty;
  double mu0 = 1.0;
  Vec y0;
  Vec x0;
  EpsSchedule eps;
  Termination termination;
  StartPolicy start;
  InnerSettings inner;
};

enum class Terminal { converged, dual_divergent, iteration_cap, inner_failure };
std::string_view to_string(Terminal t);

/// One outer iteration. y holds the updated multiplier y^{k+1}; every other
/// field is the iteration-k quantity. eps is the inexactness the inner solve
/// is certified to when `certified`, else the scheduled tolerance.
struct IterationRecord {
  int k = 0;
  Vec x, z, y, yhat;
  double mu = 0.0;
  double rho = 1.0;
  double eps = 0.0;
  double V_eucl = 0.0;
  double V_inf = 0.0;
  int inner_iters = 0;
  double stat_res = 0.0;
  bool certified = false;
};

struct RunTrace {
  std::vector<IterationRecord> records;
  Terminal terminal = Terminal::iteration_cap;
  std::string message;

  int penalty_decreases() const;
};

struct DualStep {
  Vec z;
  Vec y_next;
};

/// z = prox_{mu g}(c(x) + mu yhat),  y_next = yhat + (c(x) - z) / mu.
DualStep dual_update(const ProblemSpec& p, const Vec& x, const Vec& yhat, double mu);

/// yhat for the given mode; rho only matters in elastic mode.
Vec safeguard(const AlmMode& mode, double rho, const Vec& y);

struct PenaltyUpdate {
  double mu;
  double rho;
};

/// V_prev = +inf on the first iteration.
PenaltyUpdate penalty_step(const PenaltyRule& rule, int k, double V_now, double V_prev, double mu, double rho);
PenaltyUpdate penalty_step(const ElasticParams& params, int k, double V_now, double V_prev, double mu, double rho);

/// Throws ParameterError when run_alm would reject cfg for p.
void validate_config(const ProblemSpec& p, const AlmConfig& cfg);

/// Runs the outer loop selected by cfg.mode. Inner failures end the run with
/// Terminal::inner_failure; invalid configurations throw ParameterError.
RunTrace run_alm(const ProblemSpec& p, const AlmConfig& cfg);

} // namespace fca
