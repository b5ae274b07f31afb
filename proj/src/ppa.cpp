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

#include "fca/ppa.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <random>
#include <utility>

#include "fca/kernels.hpp"

namespace fca {
namespace {

constexpr int kMaxExpansions = 1100;
const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;

Vec scalar(double v) { return Vec::Constant(1, v); }

// A point where fn is finite, looked for around `center` on a log scale.
double find_finite(const std::function<double(double)>& fn, double center) {
  if (std::isfinite(fn(center))) return center;
  if (std::isfinite(fn(0.0))) return 0.0;
  for (int j = -40; j <= 60; ++j) {
    const double s = std::ldexp(1.0, j);
    for (double t : {center + s, center - s, s, -s})
      if (std::isfinite(fn(t))) return t;
  }
  throw SolveError("no point of the effective domain found");
}

// Root of an increasing sign oracle: side(t) < 0 means the root lies to the
// right of t, > 0 to the left. Bisects to floating-point resolution.
double bisect_root(const std::function<int(double)>& side, double start) {
  const int s0 = side(start);
  if (s0 == 0) return start;
  const double dir = s0 < 0 ? 1.0 : -1.0;
  double inner = start, d = 1.0, outer = start + dir * d;
  int so = side(outer);
  for (int k = 0; so == s0; ++k) {
    if (k >= kMaxExpansions || !std::isfinite(outer)) throw SolveError("bracket expansion failed");
    inner = outer;
    d *= 2.0;
    outer = start + dir * d;
    so = side(outer);
  }
  if (so == 0) return outer;
  double lo = std::min(inner, outer), hi = std::max(inner, outer);
  for (;;) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const int sm = side(mid);
    if (sm == 0) return mid;
    (sm < 0 ? lo : hi) = mid;
  }
  return lo + 0.5 * (hi - lo);
}

// Solves min -M(t) + penalty(t) for scalar models, penalty' given.
double scalar_solve(const DualModel& model, const std::function<double(double)>& penalty,
                    const std::function<double(double)>& penalty_deriv, double center) {
  auto objective = [&](double t) {
    const double m = model.value(t);
    return std::isfinite(m) ? -m + penalty(t) : kInf;
  };
  if (!model.derivative()) return minimize_convex_1d(objective, center).x;
  const double anchor = find_finite([&](double t) { return model.value(t); }, center);
  auto side = [&](double t) {
    if (!std::isfinite(model.value(t))) return t < anchor ? -1 : 1;
    const double h = -model.derivative()(t) + penalty_deriv(t);
    return h < 0.0 ? -1 : (h > 0.0 ? 1 : 0);
  };
  return bisect_root(side, anchor);
}

Vec unit_direction(Index m, std::uint64_t seed, int k) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(k)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal;
  Vec d(m);
  do {
    for (Index i = 0; i < m; ++i) d[i] = normal(rng);
  } while (norm2(d) == 0.0);
  return d / norm2(d);
}

} // namespace

ScalarMin golden_section(const std::function<double(double)>& fn, double lo, double hi, double width) {
  if (!(lo <= hi)) throw ParameterError("golden_section: empty interval");
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
  double fc = fn(c), fd = fn(d);
  while (b - a > width) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      if (c == d || c <= a) break;
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      if (d == c || d >= b) break;
      fd = fn(d);
    }
  }
  return fc <= fd ? ScalarMin{c, fc} : ScalarMin{d, fd};
}

ScalarMin minimize_convex_1d(const std::function<double(double)>& fn, double center, double width) {
  const double c = find_finite(fn, center);
  const double fc = fn(c);
  auto reach = [&](double dir) {
    double d = 1.0;
    for (int k = 0; fn(c + dir * d) < fc; ++k) {
      if (k >= kMaxExpansions || !std::isfinite(c + dir * d)) throw SolveError("minimize_convex_1d: unbounded below");
      d *= 2.0;
    }
    return d;
  };
  const double left = reach(-1.0), right = reach(1.0);
  ScalarMin best = golden_section(fn, c - left, c + right, width);
  if (fc < best.value) best = {c, fc};
  return best;
}

// --- models ------------------------------------------------------------------

DualModel DualModel::analytic(std::string name, Index dim, std::function<double(const Vec&)> value,
                              std::function<double(double)> derivative, ProxRoutine prox, DmuRoutine dmu) {
  if (dim < 1 || !value) throw ParameterError("DualModel: need a positive dimension and a value oracle");
  if (derivative && dim != 1) throw ParameterError("DualModel: derivatives are for scalar models");
  DualModel m;
  m.name_ = std::move(name);
  m.dim_ = dim;
  m.value_ = std::move(value);
  m.derivative_ = std::move(derivative);
  m.prox_ = std::move(prox);
  m.dmu_ = std::move(dmu);
  return m;
}

DualModel DualModel::regular() {
  return analytic(
      "regular", 1,
      [](const Vec& y) { return y[0] > 0.0 ? -(1.0 - y[0]) * (1.0 - y[0]) / (4.0 * y[0]) : -kInf; },
      [](double y) { return (1.0 - y * y) / (4.0 * y * y); });
}

DualModel DualModel::irregular() {
  return analytic(
      "irregular", 1, [](const Vec& y) { return y[0] > 0.0 ? -1.0 / (4.0 * y[0]) : -kInf; },
      [](double y) { return 1.0 / (4.0 * y * y); });
}

DualModel DualModel::halfline() {
  // Point-supported: every proximal or penalised problem is solved by -1.
  return analytic(
      "halfline", 1, [](const Vec& y) { return y[0] == -1.0 ? 0.0 : -kInf; }, {},
      [](double, const Vec&) { return scalar(-1.0); }, [](double, const SafeguardSet&) { return scalar(-1.0); });
}

DualModel DualModel::box_qp(const BoxQp& qp) {
  const Eigen::LLT<Mat> llt(qp.Q);
  if (llt.info() != Eigen::Success) throw ParameterError("DualModel::box_qp: Q is not positive definite");
  const Mat Qinv_At = llt.solve(qp.A.transpose());
  const Mat H = qp.A * Qinv_At;  // A Q^{-1} A'
  const Vec Aqq = Qinv_At.transpose() * qp.q;  // A Q^{-1} q
  const Index m = qp.A.rows();
  auto value = [qp, llt](const Vec& y) {
    if ((y.array() < 0.0).any()) return -kInf;
    const Vec w = qp.q + qp.A.transpose() * y;
    return -0.5 * w.dot(llt.solve(w)) - qp.b.dot(y);
  };
  auto prox = [H, Aqq, b = qp.b, m](double mu, const Vec& yhat) {
    const Mat Hmu = H + mu * Mat::Identity(m, m);
    const Vec h = Aqq + b - mu * yhat;
    return solve_qp_by_enumeration(Hmu, h, -Mat::Identity(m, m), Vec::Zero(m)).x;
  };
  return analytic("box_qp", m, value, {}, prox);
}

DualModel DualModel::quadratic(Vec center) {
  const Index m = center.size();
  std::function<double(double)> deriv;
  if (m == 1) deriv = [c = center[0]](double y) { return -(y - c); };
  return analytic(
      "quadratic", m, [center](const Vec& y) { return -0.5 * (y - center).squaredNorm(); }, deriv,
      [center](double mu, const Vec& yhat) { return Vec((center + mu * yhat) / (1.0 + mu)); });
}

DualModel DualModel::exponential() {
  return analytic(
      "exp", 1, [](const Vec& y) { return -std::exp(y[0]); }, [](double y) { return -std::exp(y); });
}

DualModel DualModel::bruteforce(const ProblemSpec& p, double x_lo, double x_hi, int grid) {
  if (p.dim_x != 1 || p.dim_c != 1) throw ParameterError("DualModel::bruteforce: scalar problems only");
  if (!(x_lo < x_hi) || grid < 3) throw ParameterError("DualModel::bruteforce: bad grid");
  auto value = [p, x_lo, x_hi, grid](const Vec& y) {
    const double gstar = p.g.conjugate_value(y);
    if (!std::isfinite(gstar)) return -kInf;
    auto lag = [&](double x) {
      const Vec xv = scalar(x);
      return p.f(xv).value + y[0] * p.c(xv)[0];
    };
    const double h = (x_hi - x_lo) / (grid - 1);
    int best = 0;
    double best_val = kInf;
    for (int i = 0; i < grid; ++i) {
      const double v = lag(x_lo + i * h);
      if (v < best_val) {
        best_val = v;
        best = i;
      }
    }
    const double a = x_lo + std::max(best - 1, 0) * h, b = x_lo + std::min(best + 1, grid - 1) * h;
    best_val = std::min(best_val, golden_section(lag, a, b, 1e-13).value);
    return best_val - gstar;
  };
  DualModel m = analytic(p.name + "-bruteforce", 1, value);
  m.kind_ = Kind::bruteforce;
  return m;
}

std::optional<DualModel> builtin_dual_model(std::string_view name, Index n, Index m, std::uint64_t seed) {
  if (name == "regular") return DualModel::regular();
  if (name == "irregular") return DualModel::irregular();
  if (name == "halfline") return DualModel::halfline();
  if (name == "box_qp") return DualModel::box_qp(make_box_qp(n, m, seed));
  if (name == "kanzow_steck") return std::nullopt;
  throw ParameterError("builtin_dual_model: unknown problem '" + std::string(name) + "'");
}

// --- operations ------------------------------------------------------------

Vec prox_dual(const DualModel& model, double mu, const Vec& yhat) {
  require_positive(mu, "penalty parameter");
  if (yhat.size() != model.dim()) throw ParameterError("prox_dual: dimension mismatch");
  if (model.prox_routine()) return model.prox_routine()(mu, yhat);
  if (model.dim() != 1) throw ParameterError("prox_dual: vector models need an analytic routine");
  const double c = yhat[0];
  return scalar(scalar_solve(
      model, [&](double t) { return 0.5 * mu * (t - c) * (t - c); }, [&](double t) { return mu * (t - c); }, c));
}

Vec solve_dmu(const DualModel& model, double mu, const SafeguardSet& set) {
  require_positive(mu, "penalty parameter");
  if (model.dmu_routine()) return model.dmu_routine()(mu, set);
  if (model.dim() != 1) throw ParameterError("solve_dmu: vector models need an analytic routine");
  auto excess = [&](double t) { return t - set.project(scalar(t))[0]; };
  const double center = set.project(Vec::Zero(1))[0];
  return scalar(scalar_solve(
      model, [&](double t) { return 0.5 * mu * excess(t) * excess(t); }, [&](double t) { return mu * excess(t); },
      center));
}

PpaTrace run_ppa(const DualModel& model, const PpaConfig& cfg, Inexactness inexactness) {
  require_positive(cfg.gamma_min, "gamma_min");
  if (cfg.max_iters < 0) throw ParameterError("run_ppa: negative iteration count");
  PpaTrace trace;
  Vec y = cfg.y0.size() ? cfg.y0 : Vec::Zero(model.dim());
  if (y.size() != model.dim()) throw ParameterError("run_ppa: y0 has wrong dimension");
  trace.y.push_back(y);
  double sum = 0.0;
  for (int k = 0; k < cfg.max_iters; ++k) {
    const double gamma = cfg.gamma(k), eps = cfg.eps(k);
    if (!(gamma >= cfg.gamma_min)) throw ParameterError("run_ppa: gamma_k below gamma_min");
    if (!(eps >= 0.0)) throw ParameterError("run_ppa: negative eps_k");
    Vec next = prox_dual(model, 1.0 / gamma, y);
    if (inexactness.adversarial && eps > 0.0)
      next += std::sqrt(2.0 * gamma * eps) * unit_direction(model.dim(), inexactness.seed, k);
    sum += (next - y).squaredNorm() / gamma;
    trace.partial_sums.push_back(sum);
    y = std::move(next);
    trace.y.push_back(y);
  }
  return trace;
}

std::vector<AlmPpaResidual> check_alm_ppa(const RunTrace& trace, const DualModel& model) {
  std::vector<AlmPpaResidual> out;
  out.reserve(trace.records.size());
  for (const auto& r : trace.records) {
    if (!r.certified)
      throw ParameterError("check_alm_ppa: iteration " + std::to_string(r.k) +
                           " has no certified inexactness; the comparison would be meaningless");
    const double distance = norm2(r.y - prox_dual(model, r.mu, r.yhat));
    const double bound = std::sqrt(2.0 * r.eps / r.mu);
    out.push_back({r.k, distance, bound, distance - bound});
  }
  return out;
}

} // namespace fca
