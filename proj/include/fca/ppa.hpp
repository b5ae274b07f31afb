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
#include <vector>

#include "fca/alm.hpp"
#include "fca/common.hpp"
#include "fca/problem.hpp"

namespace fca {

// --- scalar minimisation helpers -------------------------------------------

struct ScalarMin {
  double x;
  double value;
};

/// Golden-section search for a unimodal fn on [lo, hi]; stops at width `width`
/// or when the probes stop moving. +inf values are allowed.
ScalarMin golden_section(const std::function<double(double)>& fn, double lo, double hi, double width = 1e-12);

/// Minimises a convex fn (+inf off an interval domain) starting from `center`:
/// the interval [center - 1, center + 1] is doubled until it brackets a
/// minimiser, then golden_section runs. Throws SolveError on bracket failure.
ScalarMin minimize_convex_1d(const std::function<double(double)>& fn, double center, double width = 1e-12);

// --- dual models -------------------------------------------------------------

/// Concave dual function M(y) = inf_x L(x, y), -inf outside its domain.
class DualModel {
public:
  enum class Kind { analytic, bruteforce };
  /// argmin_y -M(y) + mu/2 ||y - yhat||^2
  using ProxRoutine = std::function<Vec(double mu, const Vec& yhat)>;
  /// argmin_y -M(y) + mu/2 dist^2(y, set)
  using DmuRoutine = std::function<Vec(double mu, const SafeguardSet& set)>;

  /// Generic analytic model. derivative (scalar models only) enables
  /// bisection-based prox and (D_mu) solves.
  static DualModel analytic(std::string name, Index dim, std::function<double(const Vec&)> value,
                            std::function<double(double)> derivative = {}, ProxRoutine prox = {},
                            DmuRoutine dmu = {});

  /// M(y) = -(1-y)^2 / (4y), y > 0.
  static DualModel regular();
  /// M(y) = -1 / (4y), y > 0.
  static DualModel irregular();
  /// f = x, c = x, g = indicator of R_+: M(-1) = 0, -inf elsewhere.
  static DualModel halfline();
  /// M(y) = -1/2 (q + A'y)' Q^{-1} (q + A'y) - b'y, y >= 0.
  static DualModel box_qp(const BoxQp& qp);
  /// M(y) = -1/2 ||y - center||^2
  static DualModel quadratic(Vec center);
  /// M(y) = -exp(y): bounded above, no maximiser.
  static DualModel exponential();
  /// M(y) = min over an x-grid of f(x) + y c(x) - g*(y), each grid minimum
  /// refined by golden section. Scalar problems only; over-estimates M.
  static DualModel bruteforce(const ProblemSpec& p, double x_lo, double x_hi, int grid = 2001);

  const std::string& name() const { return name_; }
  Kind kind() const { return kind_; }
  Index dim() const { return dim_; }
  double value(const Vec& y) const { return value_(y); }
  double value(double y) const { return value_(Vec::Constant(1, y)); }
  const std::function<double(double)>& derivative() const { return derivative_; }
  const ProxRoutine& prox_routine() const { return prox_; }
  const DmuRoutine& dmu_routine() const { return dmu_; }

private:
  DualModel() = default;

  std::string name_;
  Kind kind_ = Kind::analytic;
  Index dim_ = 1;
  std::function<double(const Vec&)> value_;
  std::function<double(double)> derivative_;
  ProxRoutine prox_;
  DmuRoutine dmu_;
};

/// Dual model of a built-in problem (see builtin_problem); kanzow_steck has
/// none since its M is identically -inf.
std::optional<DualModel> builtin_dual_model(std::string_view name, Index n = 4, Index m = 2, std::uint64_t seed = 1);

/// argmin_y -M(y) + mu/2 ||y - yhat||^2.
///
/// Uses the model's routine when present; scalar models with a derivative are
/// solved by bisection on the optimality condition to floating-point
/// resolution, others by golden section to width 1e-12. Throws ParameterError
/// for unsupported dimensions and SolveError when no bracket is found.
Vec prox_dual(const DualModel& model, double mu, const Vec& yhat);

/// argmin_y -M(y) + mu/2 dist^2(y, set), same solution strategy as prox_dual.
Vec solve_dmu(const DualModel& model, double mu, const SafeguardSet& set);

// --- proximal point method -------------------------------------------------

struct PpaConfig {
  std::function<double(int)> gamma = [](int) { return 1.0; };
  std::function<double(int)> eps = [](int) { return 0.0; };
  double gamma_min = 1.0;
  Vec y0;
  int max_iters = 100;
};

struct Inexactness {
  bool adversarial = false;
  std::uint64_t seed = 0;

  static Inexactness exact() { return {}; }
  static Inexactness worst_case(std::uint64_t seed) { return {true, seed}; }
};

struct PpaTrace {
  std::vector<Vec> y;  ///< y^0, ..., y^N
  /// partial_sums[k] = sum_{j<=k} ||y^{j+1} - y^j||^2 / gamma_j
  std::vector<double> partial_sums;
};

/// Proximal point iteration on phi = -M with step gamma_k. In adversarial
/// mode each step is displaced by exactly sqrt(2 gamma_k eps_k) in a seeded
/// direction.
PpaTrace run_ppa(const DualModel& model, const PpaConfig& cfg, Inexactness inexactness = Inexactness::exact());

struct AlmPpaResidual {
  int k;
  double distance;  ///< ||y^{k+1} - prox_dual(mu_k, yhat^k)||
  double bound;     ///< sqrt(2 eps_k / mu_k)
  double residual;  ///< distance - bound
};

/// Compares each ALM multiplier update with the exact dual proximal step.
/// Throws ParameterError for traces containing uncertified records.
std::vector<AlmPpaResidual> check_alm_ppa(const RunTrace& trace, const DualModel& model);

} // namespace fca
