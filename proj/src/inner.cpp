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

#include "fca/inner.hpp"

#include <algorithm>
#include <cmath>

#include "fca/kernels.hpp"

namespace fca {
namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 60;
constexpr int kMaxDoublings = 2000;

InnerResult descend(const ProblemSpec& p, const Vec& y, double mu, const Vec& x0, const InnerStop& stop) {
  InnerResult res;
  res.x = x0;
  ValueGrad cur = al_value_grad(p, res.x, y, mu);
  if (stop.record_values) res.values.push_back(cur.value);
  double gn2 = dot(cur.gradient, cur.gradient);
  while (std::sqrt(gn2) > stop.grad_tol && res.iters < stop.max_iters) {
    // Below the value resolution the Armijo decrease cannot be observed; there
    // a step is accepted when the value does not rise beyond rounding and the
    // slope at the trial point shows no overshoot.
    const double resolution = 1e-13 * (1.0 + std::abs(cur.value));
    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h, step *= 0.5) {
      const Vec trial = res.x - step * cur.gradient;
      ValueGrad next = al_value_grad(p, trial, y, mu);
      const double decrease = kArmijo * step * gn2;
      // The slope test is the Armijo condition for the quadratic model through
      // both endpoints; value comparisons below the resolution are noise.
      const bool ok = decrease > resolution
                          ? next.value <= cur.value - decrease
                          : next.value <= cur.value + resolution &&
                                dot(next.gradient, cur.gradient) >= -(1.0 - 2.0 * kArmijo) * gn2;
      if (ok) {
        res.x = trial;
        cur = std::move(next);
        accepted = true;
        break;
      }
    }
    if (!accepted) throw SolveError("minimize_al: line search failed after 60 halvings");
    gn2 = dot(cur.gradient, cur.gradient);
    ++res.iters;
    if (stop.record_values) res.values.push_back(cur.value);
  }
  res.grad_norm = std::sqrt(gn2);
  if (stop.strong_convexity) res.certified_gap = gn2 / (2.0 * *stop.strong_convexity);
  return res;
}

InnerResult bisect(const ProblemSpec& p, const Vec& y, double mu, const Vec& x0, const InnerStop& stop) {
  if (p.dim_x != 1) throw ParameterError("minimize_al: exact_1d requires a scalar variable");
  InnerResult res;
  auto raw_deriv = [&](double t) {
    ++res.iters;
    return al_value_grad(p, Vec::Constant(1, t), y, mu).gradient[0];
  };
  auto deriv = [&](double t) {
    const double d = raw_deriv(t);
    if (!std::isfinite(d)) throw EvaluationError("minimize_al: non-finite derivative");
    return d;
  };
  auto finish = [&](double t, double gap) {
    res.x = Vec::Constant(1, t);
    res.grad_norm = std::abs(deriv(t));
    res.certified_gap = gap;
    if (stop.record_values) res.values.push_back(al_value_grad(p, res.x, y, mu).value);
    return res;
  };

  const double start = x0[0];
  const double d0 = deriv(start);
  if (d0 == 0.0) return finish(start, 0.0);

  // Walk downhill with doubling steps until the derivative changes sign.
  const double dir = d0 > 0.0 ? -1.0 : 1.0;
  double h = 1e-3 * std::max(std::abs(start), 1e-12);
  double inner = start, d_inner = d0;
  double outer = start + dir * h;
  double d_outer = raw_deriv(outer);
  // overflow while walking out means no minimiser in that direction
  for (int k = 0; (d_outer > 0.0) == (d0 > 0.0) && d_outer != 0.0; ++k) {
    if (k >= kMaxDoublings || !std::isfinite(outer) || !std::isfinite(d_outer))
      throw SolveError("minimize_al: bracket expansion failed");
    inner = outer;
    d_inner = d_outer;
    h *= 2.0;
    outer = start + dir * h;
    d_outer = raw_deriv(outer);
  }
  if (!std::isfinite(d_outer)) throw SolveError("minimize_al: bracket expansion failed");
  if (d_outer == 0.0) return finish(outer, 0.0);

  double lo = inner, d_lo = d_inner, hi = outer, d_hi = d_outer;
  if (lo > hi) {
    std::swap(lo, hi);
    std::swap(d_lo, d_hi);
  }
  // now d_lo < 0 < d_hi
  auto gap = [&] { return std::max(std::abs(d_lo), std::abs(d_hi)) * (hi - lo); };
  while (res.iters < stop.max_iters) {
    const bool width_ok = hi - lo <= stop.grad_tol;
    const bool gap_ok = !stop.gap_tol || gap() <= *stop.gap_tol;
    if (width_ok && gap_ok) break;
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;  // bracket at floating-point resolution
    const double d = deriv(mid);
    if (d == 0.0) return finish(mid, 0.0);
    if (d < 0.0) {
      lo = mid;
      d_lo = d;
    } else {
      hi = mid;
      d_hi = d;
    }
  }
  // Secant point of the final bracket; any point of the bracket carries the
  // same certificate.
  double t = lo - d_lo * (hi - lo) / (d_hi - d_lo);
  t = std::clamp(t, lo, hi);
  return finish(t, gap());
}

} // namespace

ValueGrad al_value_grad(const ProblemSpec& p, const Vec& x, const Vec& y, double mu) {
  require_positive(mu, "penalty parameter");
  const ValueGrad fx = p.f(x);
  const Envelope env = envelope(p.g, mu, p.c(x) + mu * y);
  return {fx.value + env.value - 0.5 * mu * dot(y, y), fx.gradient + p.jtvp(x, env.gradient)};
}

InnerResult minimize_al(const ProblemSpec& p, const Vec& y, double mu, const Vec& x0, const InnerStop& stop) {
  require_positive(mu, "penalty parameter");
  require_positive(stop.grad_tol, "inner tolerance");
  if (x0.size() != p.dim_x) throw ParameterError("minimize_al: x0 has wrong dimension");
  return stop.mode == InnerMode::exact_1d ? bisect(p, y, mu, x0, stop) : descend(p, y, mu, x0, stop);
}

} // namespace fca
