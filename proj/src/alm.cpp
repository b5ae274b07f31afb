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

#include "fca/alm.hpp"

#include <cmath>
#include <utility>

#include "fca/kernels.hpp"

namespace fca {
namespace {

constexpr double kMuFloor = 1e-300;
// Gradient descent cannot resolve gradients much below this on the built-ins.
constexpr double kMinGradTol = 1e-12;
// Bracket width requested from exact_1d when eps_k = 0; bisection then stops at
// floating-point resolution.
constexpr double kExactWidth = 1e-300;

void check_fraction(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) throw ParameterError(std::string(name) + " must lie in (0, 1)");
}

// beta governing penalty decreases, if the schedule can decrease at all.
std::optional<double> decrease_factor(const AlmConfig& cfg) {
  if (const auto* e = std::get_if<ElasticParams>(&cfg.mode)) return e->beta;
  if (cfg.penalty.setting == PenaltyRule::Setting::fixed) return std::nullopt;
  return cfg.penalty.beta;
}

void validate(const ProblemSpec& p, const AlmConfig& cfg) {
  require_positive(cfg.mu0, "mu0");
  if (cfg.y0.size() != 0 && cfg.y0.size() != p.dim_c) throw ParameterError("run_alm: y0 has wrong dimension");
  if (cfg.x0.size() != 0 && cfg.x0.size() != p.dim_x) throw ParameterError("run_alm: x0 has wrong dimension");
  if (!cfg.start.warm && cfg.start.x_cold.size() != p.dim_x)
    throw ParameterError("run_alm: cold start point has wrong dimension");
  const auto& t = cfg.termination;
  require_positive(t.eps_term, "eps_term");
  require_positive(t.attach_tol, "attach_tol");
  require_positive(t.dual_blowup, "dual_blowup");
  if (t.max_outer < 1) throw ParameterError("run_alm: max_outer must be at least 1");
  if (cfg.inner.max_iters < 1) throw ParameterError("run_alm: inner max_iters must be at least 1");
  if (cfg.eps.kind == EpsSchedule::Kind::summable) {
    if (const auto beta = decrease_factor(cfg); beta && !(cfg.eps.factor < *beta * *beta))
      throw ParameterError("run_alm: summable schedule needs nu < beta^2");
  }
  if (cfg.inner.mode == InnerSettings::Mode::exact_1d && p.dim_x != 1)
    throw ParameterError("run_alm: exact_1d inner solves need a scalar variable");
}

struct InnerPlan {
  InnerStop stop;
  bool exact = false;
};

InnerPlan plan_inner(const ProblemSpec& p, const AlmConfig& cfg, double eps) {
  InnerPlan plan;
  plan.exact = cfg.inner.mode == InnerSettings::Mode::exact_1d ||
               (cfg.inner.mode == InnerSettings::Mode::automatic && p.dim_x == 1);
  plan.stop.max_iters = cfg.inner.max_iters;
  if (plan.exact) {
    plan.stop.mode = InnerMode::exact_1d;
    plan.stop.grad_tol = eps > 0.0 ? eps : kExactWidth;
    plan.stop.gap_tol = eps;
  } else {
    plan.stop.mode = InnerMode::gradient_descent;
    plan.stop.strong_convexity = p.strong_convexity;
    // With a modulus the gap bound ||g||^2 / (2 sigma) <= eps holds at the
    // second argument; the first keeps the iterate itself accurate.
    double tol = eps;
    if (p.strong_convexity) tol = std::min(eps, std::sqrt(2.0 * *p.strong_convexity * eps));
    plan.stop.grad_tol = std::max(tol, kMinGradTol);
  }
  return plan;
}

} // namespace

// --- SafeguardSet ---------------------------------------------------------

SafeguardSet::SafeguardSet(Kind kind, Vec lo, Vec hi, double radius, std::function<Vec(const Vec&)> polar)
    : kind_(kind), lo_(std::move(lo)), hi_(std::move(hi)), radius_(radius), polar_(std::move(polar)) {}

SafeguardSet SafeguardSet::box(Vec lo, Vec hi) {
  if (lo.size() != hi.size() || lo.size() == 0) throw ParameterError("SafeguardSet::box: bad bounds");
  if (!lo.allFinite() || !hi.allFinite() || (lo.array() > hi.array()).any())
    throw ParameterError("SafeguardSet::box: bounds must be finite with lo <= hi");
  return SafeguardSet(Kind::box, std::move(lo), std::move(hi), 0.0, {});
}

SafeguardSet SafeguardSet::symmetric_box(Index m, double radius) {
  if (!(radius >= 0.0)) throw ParameterError("SafeguardSet::symmetric_box: negative radius");
  return box(Vec::Constant(m, -radius), Vec::Constant(m, radius));
}

SafeguardSet SafeguardSet::ball(double radius) {
  require_positive(radius, "ball radius");
  return SafeguardSet(Kind::ball, {}, {}, radius, {});
}

SafeguardSet SafeguardSet::polar_horizon_ball(const ProblemSpec& p, double radius) {
  require_positive(radius, "ball radius");
  auto polar = p.horizon_polar;
  if (!polar) polar = [g = p.g](const Vec& y) { return g.project_horizon_polar(y); };
  return SafeguardSet(Kind::polar_horizon_ball, {}, {}, radius, std::move(polar));
}

Vec SafeguardSet::project(const Vec& y) const {
  switch (kind_) {
  case Kind::box: {
    if (y.size() != lo_.size()) throw ParameterError("SafeguardSet: dimension mismatch");
    Vec out(y.size());
    simd::active_kernels().clamp(as_span(y), as_span(lo_), as_span(hi_), as_span(out));
    return out;
  }
  case Kind::ball:
  case Kind::polar_horizon_ball: {
    // For a closed convex cone K, proj onto K n B_r is the radial shrink of proj_K.
    Vec v = kind_ == Kind::ball ? y : polar_(y);
    const double n = norm2(v);
    if (n > radius_) v *= radius_ / n;
    return v;
  }
  }
  return y;
}

Vec SafeguardSet::project_scaled(double rho, const Vec& y) const {
  require_positive(rho, "safeguard scale");
  return rho * project(y / rho);
}

double SafeguardSet::distance(const Vec& y) const { return norm2(y - project(y)); }

// --- parameters -----------------------------------------------------------

PenaltyRule PenaltyRule::geometric(double beta) {
  check_fraction(beta, "beta");
  return {Setting::geometric, beta, 0.9};
}

PenaltyRule PenaltyRule::adaptive(double beta, double theta) {
  check_fraction(beta, "beta");
  check_fraction(theta, "theta");
  return {Setting::adaptive, beta, theta};
}

ElasticParams::ElasticParams(double theta_, double eta_, double beta_, SafeguardSet set_)
    : theta(theta_), eta(eta_), beta(beta_), set(std::move(set_)) {
  check_fraction(theta, "theta");
  check_fraction(eta, "eta");
  if (!(eta * eta < beta && beta < eta)) throw ParameterError("ElasticParams: need eta^2 < beta < eta");
}

EpsSchedule EpsSchedule::practical(double eps0, double kappa, double floor) {
  if (!(eps0 >= 0.0) || !(floor >= 0.0)) throw ParameterError("EpsSchedule: negative tolerance");
  check_fraction(kappa, "kappa_eps");
  return {Kind::practical, eps0, kappa, floor};
}

EpsSchedule EpsSchedule::summable(double eps0, double nu) {
  if (!(eps0 >= 0.0)) throw ParameterError("EpsSchedule: negative tolerance");
  check_fraction(nu, "nu");
  return {Kind::summable, eps0, nu, 0.0};
}

double EpsSchedule::next(double eps) const {
  return kind == Kind::practical ? std::max(floor, factor * eps) : factor * eps;
}

std::string_view to_string(Terminal t) {
  switch (t) {
  case Terminal::converged: return "converged";
  case Terminal::dual_divergent: return "dual_divergent";
  case Terminal::iteration_cap: return "iteration_cap";
  case Terminal::inner_failure: return "inner_failure";
  }
  return "unknown";
}

int RunTrace::penalty_decreases() const {
  int n = 0;
  for (std::size_t i = 1; i < records.size(); ++i) n += records[i].mu < records[i - 1].mu;
  return n;
}

// --- steps ----------------------------------------------------------------

DualStep dual_update(const ProblemSpec& p, const Vec& x, const Vec& yhat, double mu) {
  require_positive(mu, "penalty parameter");
  const Vec cx = p.c(x);
  DualStep s;
  s.z = p.g.prox(mu, cx + mu * yhat);
  s.y_next = yhat + (cx - s.z) / mu;
  return s;
}

Vec safeguard(const AlmMode& mode, double rho, const Vec& y) {
  require_positive(rho, "safeguard scale");
  if (const auto* r = std::get_if<RigidMode>(&mode)) return r->set.project(y);
  if (const auto* e = std::get_if<ElasticParams>(&mode)) return e->set.project_scaled(rho, y);
  return y;
}

PenaltyUpdate penalty_step(const PenaltyRule& rule, int k, double V_now, double V_prev, double mu, double rho) {
  switch (rule.setting) {
  case PenaltyRule::Setting::fixed: return {mu, rho};
  case PenaltyRule::Setting::geometric: return {rule.beta * mu, rho};
  case PenaltyRule::Setting::adaptive:
    if (k == 0 || V_now <= rule.theta * V_prev) return {mu, rho};
    return {rule.beta * mu, rho};
  }
  return {mu, rho};
}

PenaltyUpdate penalty_step(const ElasticParams& params, int k, double V_now, double V_prev, double mu, double rho) {
  if (k == 0 || V_now <= params.theta * V_prev) return {mu, rho};
  return {params.beta * mu, (params.eta / params.beta) * rho};
}

// --- outer loop -----------------------------------------------------------

void validate_config(const ProblemSpec& p, const AlmConfig& cfg) { validate(p, cfg); }

RunTrace run_alm(const ProblemSpec& p, const AlmConfig& cfg) {
  validate(p, cfg);
  const auto* elastic = std::get_if<ElasticParams>(&cfg.mode);

  RunTrace trace;
  double mu = cfg.mu0, rho = 1.0, eps = cfg.eps.eps0, V_prev = kInf;
  Vec y = cfg.y0.size() ? cfg.y0 : Vec::Zero(p.dim_c);
  Vec x_prev = cfg.x0.size() ? cfg.x0 : Vec::Zero(p.dim_x);

  for (int k = 0; k < cfg.termination.max_outer; ++k) {
    IterationRecord rec;
    rec.k = k;
    rec.mu = mu;
    rec.rho = rho;
    rec.yhat = safeguard(cfg.mode, rho, y);

    const InnerPlan plan = plan_inner(p, cfg, eps);
    InnerResult inner;
    try {
      inner = minimize_al(p, rec.yhat, mu, cfg.start.warm ? x_prev : cfg.start.x_cold, plan.stop);
    } catch (const SolveError& e) {
      trace.terminal = Terminal::inner_failure;
      trace.message = e.what();
      return trace;
    } catch (const EvaluationError& e) {
      trace.terminal = Terminal::inner_failure;
      trace.message = e.what();
      return trace;
    }

    rec.x = std::move(inner.x);
    rec.inner_iters = inner.iters;
    rec.certified = p.convex && inner.certified_gap.has_value();
    rec.eps = rec.certified ? std::max(eps, *inner.certified_gap) : eps;

    DualStep step = dual_update(p, rec.x, rec.yhat, mu);
    const Vec resid = p.c(rec.x) - step.z;
    rec.V_eucl = norm2(resid);
    rec.V_inf = norm_inf(resid);
    rec.z = std::move(step.z);
    rec.y = std::move(step.y_next);
    rec.stat_res = norm2(p.f(rec.x).gradient + p.jtvp(rec.x, rec.y));
    trace.records.push_back(rec);

    if (!rec.y.allFinite()) {
      trace.terminal = Terminal::dual_divergent;
      trace.message = "non-finite multiplier";
      return trace;
    }
    if (eps <= cfg.termination.eps_term && rec.V_eucl <= cfg.termination.attach_tol) {
      trace.terminal = Terminal::converged;
      return trace;
    }
    if (norm2(rec.y) >= cfg.termination.dual_blowup) {
      trace.terminal = Terminal::dual_divergent;
      trace.message = "multiplier norm exceeded the blow-up threshold";
      return trace;
    }

    const double V = elastic ? rec.V_inf : rec.V_eucl;
    const PenaltyUpdate up = elastic ? penalty_step(*elastic, k, V, V_prev, mu, rho)
                                     : penalty_step(cfg.penalty, k, V, V_prev, mu, rho);
    if (up.mu < kMuFloor) {
      trace.terminal = Terminal::iteration_cap;
      trace.message = "penalty parameter underflow";
      return trace;
    }
    mu = up.mu;
    rho = up.rho;
    V_prev = V;
    eps = cfg.eps.next(eps);
    y = rec.y;
    x_prev = rec.x;
  }
  trace.terminal = Terminal::iteration_cap;
  trace.message = "outer iteration limit reached";
  return trace;
}

} // namespace fca
