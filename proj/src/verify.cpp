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

#include "fca/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "fca/alm.hpp"
#include "fca/inner.hpp"
#include "fca/kernels.hpp"
#include "fca/ppa.hpp"
#include "fca/problem.hpp"
#include "fca/prox.hpp"

namespace fca {
namespace {

// Minimiser of the penalised dual of the regular example for Y_sg = [-0.1, 0.1]
// and mu = 1, computed once in 40-digit arithmetic.
constexpr double kRegularDmuReference = 0.5837202421651099271;

class Check {
public:
  Check(std::string suite, std::string name, double tol) : suite_(std::move(suite)), name_(std::move(name)), tol_(tol) {}

  void see(double v, const std::string& detail = {}) {
    if (std::isnan(v)) v = kInf;
    if (v > worst_) {
      worst_ = v;
      detail_ = detail;
    }
  }

  CheckResult result() const { return {suite_, name_, worst_, tol_, worst_ <= tol_, detail_}; }

private:
  std::string suite_, name_;
  double tol_;
  double worst_ = -kInf;
  std::string detail_;
};

struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}
  double normal() { return std::normal_distribution<double>()(engine); }
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(engine); }
  Vec normal_vec(Index m, double s = 1.0) {
    Vec v(m);
    for (Index i = 0; i < m; ++i) v[i] = s * normal();
    return v;
  }
};

Vec scalar(double v) { return Vec::Constant(1, v); }

std::vector<ProxFunction> catalog() {
  Vec lo(3), hi(3), normal(3);
  lo << -1.0, -2.0, 0.0;
  hi << 1.0, 0.5, 3.0;
  normal << 1.0, -2.0, 0.5;
  return {ProxFunction::nonpositive_orthant(3), ProxFunction::nonnegative_orthant(3), ProxFunction::box(lo, hi),
          ProxFunction::halfspace(normal, 0.3),   ProxFunction::second_order_cone(3), ProxFunction::l1_norm(3, 0.7),
          ProxFunction::componentwise_max(3)};
}

// A point of dom g near `v`, or v itself for finite-valued g.
Vec in_domain(const ProxFunction& g, const Vec& v) { return g.is_indicator() ? g.prox(1.0, v) : v; }

// f = 1/2 ||x||^2 + q'x, c = Ax - b with the given g.
ProblemSpec linear_problem(const ProxFunction& g, Rng& rng) {
  const Index n = 3, m = g.dim();
  const Mat A = Mat::NullaryExpr(m, n, [&] { return rng.normal(); });
  const Vec b = rng.normal_vec(m), q = rng.normal_vec(n);
  ProblemSpec p;
  p.name = "linear-" + std::string(g.tag());
  p.dim_x = n;
  p.dim_c = m;
  p.f = [q](const Vec& x) { return ValueGrad{0.5 * x.squaredNorm() + q.dot(x), x + q}; };
  p.c = [A, b](const Vec& x) { return Vec(A * x - b); };
  p.jtvp = [A](const Vec&, const Vec& v) { return Vec(A.transpose() * v); };
  p.g = g;
  p.strong_convexity = 1.0;
  return p;
}

// --- prox ----------------------------------------------------------------

void prox_suite(std::vector<CheckResult>& out) {
  const std::string s = "prox";
  for (const auto& g : catalog()) {
    const std::string tag(g.tag());
    Rng rng(11);
    const Index m = g.dim();

    Check opt(s, tag + ": prox minimises the prox objective", 1e-10);
    for (int i = 0; i < 10; ++i) {
      const Vec z = rng.normal_vec(m, 3.0);
      const double gamma = rng.uniform(0.1, 3.0);
      const Vec p = prox(g, gamma, z);
      const double at_p = g.value(p) + (p - z).squaredNorm() / (2.0 * gamma);
      for (int j = 0; j < 100; ++j) {
        Vec w = j % 3 == 0 ? rng.normal_vec(m, 3.0) : in_domain(g, j % 3 == 1 ? rng.normal_vec(m, 3.0) : Vec(p + rng.normal_vec(m, 0.01)));
        const double at_w = g.value(w) + (w - z).squaredNorm() / (2.0 * gamma);
        if (std::isfinite(at_w)) opt.see(at_p - at_w);
      }
    }
    out.push_back(opt.result());

    Check nonexp(s, tag + ": prox is nonexpansive", 1e-12);
    for (int i = 0; i < 1000; ++i) {
      const Vec z1 = rng.normal_vec(m, 3.0), z2 = rng.normal_vec(m, 3.0);
      const double gamma = rng.uniform(0.1, 3.0);
      nonexp.see(norm2(prox(g, gamma, z1) - prox(g, gamma, z2)) - norm2(z1 - z2));
    }
    out.push_back(nonexp.result());

    Check ineq(s, tag + ": prox inequality", 1e-10);
    for (int i = 0; i < 1000; ++i) {
      const Vec z = rng.normal_vec(m, 3.0);
      const Vec w = i % 2 ? in_domain(g, rng.normal_vec(m, 3.0)) : rng.normal_vec(m, 3.0);
      const Vec p = prox(g, 1.0, z);
      const double rhs =
          g.value(w) + 0.5 * (z - w).squaredNorm() - 0.5 * (z - p).squaredNorm() - 0.5 * (w - p).squaredNorm();
      if (std::isfinite(rhs)) ineq.see(g.value(p) - rhs);
    }
    out.push_back(ineq.result());

    Check moreau(s, tag + ": Moreau decomposition", 1e-12);
    Check fy(s, tag + ": Fenchel-Young equality at the decomposition", 1e-12);
    for (int i = 0; i < 1000; ++i) {
      const Vec z = rng.normal_vec(m, 3.0);
      const double gamma = rng.uniform(0.1, 3.0);
      const Vec p = prox(g, gamma, z);
      // u = prox_{g*/gamma}(z/gamma) belongs to the subdifferential of g at p
      const Vec u = prox_conjugate(g, 1.0 / gamma, z / gamma);
      moreau.see(norm2(z - (p + gamma * u)) / (1.0 + norm2(z)));
      const double pu = dot(p, u);
      fy.see(std::abs(g.value(p) + g.conjugate_value(u) - pu) / (1.0 + norm2(p) * norm2(u)));
    }
    out.push_back(moreau.result());
    out.push_back(fy.result());

    Check fd(s, tag + ": envelope gradient matches finite differences", 1e-6);
    for (int i = 0, taken = 0; taken < 200 && i < 10000; ++i) {
      const Vec z = rng.normal_vec(m, 3.0);
      Vec d = rng.normal_vec(m);
      d /= norm2(d);
      const double gamma = rng.uniform(0.1, 3.0);
      auto grad_at = [&](double t) { return envelope(g, gamma, Vec(z + t * d)).gradient; };
      // The gradient is piecewise affine or smooth; a large second difference
      // over +-1e-4 means a kink is nearby.
      constexpr double delta = 1e-4;
      if (norm2(grad_at(delta) + grad_at(-delta) - 2.0 * grad_at(0.0)) > 1e-6) continue;
      ++taken;
      constexpr double h = 1e-6;
      const double num =
          (envelope(g, gamma, Vec(z + h * d)).value - envelope(g, gamma, Vec(z - h * d)).value) / (2.0 * h);
      const double ana = dot(grad_at(0.0), d);
      fd.see(std::abs(num - ana) / std::max(1.0, std::abs(ana)));
    }
    out.push_back(fd.result());
  }

  // Along the horizon direction -1 of the indicator of R_- the envelope does
  // not increase; along +1 it does, eventually.
  const auto g = ProxFunction::nonpositive_orthant(1);
  Check hzn(s, "horizon direction does not increase the envelope", 0.0);
  Check anti(s, "non-horizon direction increases the envelope", 0.0);
  for (double z0 : {-1.5, 0.0, 0.7, 3.0}) {
    for (double gamma : {0.5, 1.0, 4.0}) {
      const double base = envelope(g, gamma, scalar(z0)).value;
      for (double t : {1.0, 10.0, 100.0}) hzn.see(envelope(g, gamma, scalar(z0 - t)).value - base);
      anti.see(base - envelope(g, gamma, scalar(z0 + 100.0)).value);
    }
  }
  out.push_back(hzn.result());
  out.push_back(anti.result());
}

// --- identities ----------------------------------------------------------

void identities_suite(std::vector<CheckResult>& out) {
  const std::string s = "identities";
  Rng rng(23);
  std::vector<ProblemSpec> problems;
  for (const auto& g : catalog()) problems.push_back(linear_problem(g, rng));
  for (const char* name : {"regular", "irregular", "kanzow_steck", "halfline", "box_qp"})
    problems.push_back(builtin_problem(name));

  Check a(s, "dual update is a proximal-gradient step on the Lagrangian", 1e-10);
  Check b(s, "dual update is a gradient step on the augmented Lagrangian", 1e-12);
  Check grad(s, "y-gradient of the augmented Lagrangian equals c(x) - z", 1e-12);
  Check grad_fd(s, "y-gradient of the augmented Lagrangian matches finite differences", 1e-5);
  for (int i = 0; i < 1000; ++i) {
    const ProblemSpec& p = problems[static_cast<std::size_t>(i) % problems.size()];
    const Vec x = rng.normal_vec(p.dim_x, 1.5);
    const Vec yhat = rng.normal_vec(p.dim_c, 2.0);
    const double mu = std::pow(10.0, rng.uniform(-2.0, 1.0));
    const std::string where = p.name + " sample " + std::to_string(i);

    const DualStep step = dual_update(p, x, yhat, mu);
    const Vec cx = p.c(x);
    const Vec via_conj = prox_conjugate(p.g, 1.0 / mu, Vec(yhat + cx / mu));
    a.see(norm2(step.y_next - via_conj) / (1.0 + norm2(step.y_next)), where);

    // grad_y L_mu(x, y) = mu grad g^mu(c + mu y) - mu y
    const Vec gy = mu * envelope(p.g, mu, Vec(cx + mu * yhat)).gradient - mu * yhat;
    const double scale = std::max({1.0, norm2(cx), mu * norm2(yhat)});
    grad.see(norm2(gy - (cx - step.z)) / scale, where);
    b.see(norm2(step.y_next - (yhat + gy / mu)) / std::max({1.0, norm2(yhat), norm2(gy) / mu}), where);

    const double h = 1e-6 * std::max(1.0, norm2(yhat));
    for (Index j = 0; j < p.dim_c; ++j) {
      Vec yp = yhat, ym = yhat;
      yp[j] += h;
      ym[j] -= h;
      const double num = (al_value_grad(p, x, yp, mu).value - al_value_grad(p, x, ym, mu).value) / (2.0 * h);
      grad_fd.see(std::abs(num - gy[j]) / std::max(1.0, std::abs(gy[j])), where);
    }
  }
  out.push_back(a.result());
  out.push_back(b.result());
  out.push_back(grad.result());
  out.push_back(grad_fd.result());

  // L_mu(x, y) = sup_z L(x, z) - mu/2 |z - y|^2 on the scalar problems.
  Check sup(s, "augmented Lagrangian equals the dual-regularised Lagrangian", 1e-8);
  for (const char* name : {"regular", "irregular", "kanzow_steck", "halfline"}) {
    const ProblemSpec p = builtin_problem(name);
    for (int i = 0; i < 200; ++i) {
      const double x = rng.uniform(-2.0, 2.0), y = rng.uniform(-3.0, 3.0);
      const double mu = std::pow(10.0, rng.uniform(-1.0, 1.0));
      const Vec xv = scalar(x);
      const double fx = p.f(xv).value, cx = p.c(xv)[0];
      auto neg = [&](double z) {
        const double gs = p.g.conjugate_value(scalar(z));
        return std::isfinite(gs) ? -(fx + z * cx - gs - 0.5 * mu * (z - y) * (z - y)) : kInf;
      };
      const double lhs = al_value_grad(p, xv, scalar(y), mu).value;
      const double rhs = -minimize_convex_1d(neg, y).value;
      sup.see(std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)), std::string(name));
    }
  }
  out.push_back(sup.result());

  // Weak duality for every dual model, strong duality at known saddle points.
  Check weak(s, "weak duality: M(y) <= Phi(x)", 1e-9);
  Check strong(s, "strong duality at known saddle points", 1e-9);
  for (const char* name : {"regular", "irregular", "halfline", "box_qp"}) {
    const ProblemSpec p = builtin_problem(name);
    const DualModel model = *builtin_dual_model(name);
    for (int i = 0; i < 100; ++i) {
      Vec x = rng.normal_vec(p.dim_x, 1.5);
      Vec y = rng.normal_vec(p.dim_c, 2.0).cwiseAbs();
      if (std::string_view(name) == "halfline") {
        x = x.cwiseAbs();
        y = scalar(i % 2 ? -1.0 : -y[0]);
      }
      const double phi = evaluate_phi(p, x);
      if (std::isfinite(phi)) weak.see(model.value(y) - phi, name);
    }
    if (p.known_solution && p.known_solution->y)
      strong.see(std::abs(evaluate_phi(p, p.known_solution->x) - model.value(*p.known_solution->y)), name);
  }
  out.push_back(weak.result());
  out.push_back(strong.result());

  Check brute(s, "analytic dual models agree with brute-force grids", 1e-6);
  for (const char* name : {"regular", "irregular"}) {
    const ProblemSpec p = builtin_problem(name);
    const DualModel model = *builtin_dual_model(name);
    const DualModel grid = DualModel::bruteforce(p, -50.0, 50.0);
    for (double y = 0.05; y <= 3.0; y += 0.05) brute.see(std::abs(model.value(y) - grid.value(y)), name);
  }
  {
    const DualModel grid = DualModel::bruteforce(halfline_problem(), -50.0, 50.0);
    brute.see(std::abs(grid.value(-1.0) - DualModel::halfline().value(-1.0)), "halfline");
  }
  out.push_back(brute.result());
}

// --- ppa -----------------------------------------------------------------

void ppa_suite(std::vector<CheckResult>& out) {
  const std::string s = "ppa";
  const DualModel quad = DualModel::quadratic(scalar(3.0));
  PpaConfig cfg;
  cfg.y0 = scalar(0.0);
  cfg.max_iters = 60;

  Check closed(s, "quadratic model: exact iterates follow 3(1 - 2^-k)", 1e-12);
  const PpaTrace exact = run_ppa(quad, cfg);
  for (std::size_t k = 0; k < exact.y.size(); ++k)
    closed.see(std::abs(exact.y[k][0] - 3.0 * (1.0 - std::ldexp(1.0, -static_cast<int>(k)))));
  out.push_back(closed.result());

  auto plateau = [](const PpaTrace& t) {
    const auto& ps = t.partial_sums;
    const std::size_t from = ps.size() - ps.size() / 5 - 1;
    return ps.back() - ps[from];
  };

  Check conv(s, "quadratic model converges to 3 by iteration 60", 1e-6);
  Check sums(s, "step-size weighted partial sums plateau", 1e-10);
  conv.see(std::abs(exact.y.back()[0] - 3.0), "exact");
  sums.see(plateau(exact), "exact");
  PpaConfig adv = cfg;
  adv.eps = [](int k) { return std::ldexp(1.0, -2 * k); };
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const PpaTrace t = run_ppa(quad, adv, Inexactness::worst_case(seed));
    conv.see(std::abs(t.y.back()[0] - 3.0), "adversarial seed " + std::to_string(seed));
    sums.see(plateau(t), "adversarial seed " + std::to_string(seed));
  }
  out.push_back(conv.result());
  out.push_back(sums.result());

  PpaConfig ecfg;
  ecfg.y0 = scalar(0.0);
  ecfg.max_iters = 200;
  const PpaTrace e = run_ppa(DualModel::exponential(), ecfg);
  Check mono(s, "exp model: iterates strictly decrease", 0.0);
  for (std::size_t k = 1; k < e.y.size(); ++k) mono.see(e.y[k][0] >= e.y[k - 1][0] ? 1.0 : -1.0);
  out.push_back(mono.result());
  Check unbounded(s, "exp model: |y^200| >= 5", 0.0);
  unbounded.see(5.0 - std::abs(e.y.back()[0]));
  out.push_back(unbounded.result());
}

// --- alm_ppa -------------------------------------------------------------

AlmConfig exact_config(AlmMode mode, PenaltyRule penalty) {
  AlmConfig cfg;
  cfg.mode = std::move(mode);
  cfg.penalty = penalty;
  cfg.eps = EpsSchedule::summable(0.0, 0.2);
  cfg.inner.mode = InnerSettings::Mode::exact_1d;
  return cfg;
}

void alm_ppa_suite(std::vector<CheckResult>& out) {
  const std::string s = "alm_ppa";
  const ProblemSpec reg = regular_problem();
  const DualModel model = DualModel::regular();
  const auto box = SafeguardSet::symmetric_box(1, 0.1);

  Check corr(s, "regular example: multiplier updates are dual proximal steps", 1e-8);
  const std::vector<std::pair<std::string, AlmConfig>> runs = {
      {"classical adaptive", exact_config(ClassicalMode{}, PenaltyRule::adaptive(0.5, 0.9))},
      {"classical fixed", exact_config(ClassicalMode{}, PenaltyRule::fixed())},
      {"rigid adaptive", exact_config(RigidMode{box}, PenaltyRule::adaptive(0.5, 0.9))},
      {"elastic adaptive", exact_config(ElasticParams(0.9, 0.6, 0.5, box), PenaltyRule::adaptive(0.5, 0.9))}};
  RunTrace first;
  for (const auto& [name, cfg] : runs) {
    const RunTrace t = run_alm(reg, cfg);
    if (first.records.empty()) first = t;
    for (const auto& r : check_alm_ppa(t, model)) corr.see(r.distance, name + " k=" + std::to_string(r.k));
  }
  out.push_back(corr.result());

  Check point(s, "point-supported dual: updates equal the dual proximal step exactly", 0.0);
  for (double mu : {0.5, 1.0, 2.0}) {
    AlmConfig cfg = exact_config(RigidMode{SafeguardSet::symmetric_box(1, 0.0)}, PenaltyRule::fixed());
    cfg.mu0 = mu;
    cfg.termination.max_outer = 20;
    const RunTrace t = run_alm(halfline_problem(), cfg);
    for (const auto& r : check_alm_ppa(t, DualModel::halfline())) point.see(r.distance);
  }
  out.push_back(point.result());

  Check neg(s, "a perturbed multiplier violates the correspondence", 0.0);
  RunTrace bad = first;
  bad.records[0].y[0] += 1.0;
  double worst = -kInf;
  for (const auto& r : check_alm_ppa(bad, model)) worst = std::max(worst, r.residual);
  neg.see(0.5 - worst);
  out.push_back(neg.result());

  Check refuse(s, "uncertified traces are refused", 0.0);
  RunTrace unc = first;
  unc.records[0].certified = false;
  try {
    check_alm_ppa(unc, model);
    refuse.see(1.0);
  } catch (const ParameterError&) {
    refuse.see(0.0);
  }
  out.push_back(refuse.result());
}

// --- dmu -----------------------------------------------------------------

void dmu_suite(std::vector<CheckResult>& out) {
  const std::string s = "dmu";
  const DualModel reg = DualModel::regular();
  const auto box = SafeguardSet::symmetric_box(1, 0.1);

  Check ref(s, "regular example, Y_sg = [-0.1, 0.1], mu = 1: reference minimiser", 1e-12);
  ref.see(std::abs(solve_dmu(reg, 1.0, box)[0] - kRegularDmuReference));
  out.push_back(ref.result());

  Check fixed(s, "minimisers are fixed points of the safeguarded dual step", 1e-10);
  Check rigid(s, "rigid fixed-penalty runs converge to the penalised dual solution", 1e-6);
  Check inside(s, "safeguard containing the multiplier: minimiser is the multiplier", 1e-10);
  Check point(s, "point-supported dual: minimiser is -1", 0.0);
  for (double mu : {0.5, 1.0, 2.0}) {
    const double ys = solve_dmu(reg, mu, box)[0];
    fixed.see(std::abs(ys - prox_dual(reg, mu, box.project(scalar(ys)))[0]));

    AlmConfig cfg;
    cfg.mode = RigidMode{box};
    cfg.mu0 = mu;
    cfg.inner.mode = InnerSettings::Mode::exact_1d;
    const RunTrace t = run_alm(regular_problem(), cfg);
    rigid.see(std::abs(t.records.back().y[0] - ys), "mu=" + std::to_string(mu));

    inside.see(std::abs(solve_dmu(reg, mu, SafeguardSet::symmetric_box(1, 2.0))[0] - 1.0));
    point.see(std::abs(solve_dmu(DualModel::halfline(), mu, SafeguardSet::symmetric_box(1, 0.0))[0] + 1.0));
  }
  out.push_back(fixed.result());
  out.push_back(rigid.result());
  out.push_back(inside.result());
  out.push_back(point.result());
}

} // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"prox", "identities", "ppa", "alm_ppa", "dmu"};
  return names;
}

std::vector<CheckResult> run_suite(std::string_view suite) {
  static const std::vector<std::pair<std::string, std::function<void(std::vector<CheckResult>&)>>> table = {
      {"prox", prox_suite}, {"identities", identities_suite}, {"ppa", ppa_suite},
      {"alm_ppa", alm_ppa_suite}, {"dmu", dmu_suite}};
  std::vector<CheckResult> out;
  bool found = false;
  for (const auto& [name, fn] : table) {
    if (suite == "all" || suite == name) {
      fn(out);
      found = true;
    }
  }
  if (!found) throw ParameterError("unknown verification suite '" + std::string(suite) + "'");
  return out;
}

nlohmann::json verify_report(const std::vector<CheckResult>& results) {
  nlohmann::json checks = nlohmann::json::array();
  bool ok = true;
  for (const auto& r : results) {
    ok = ok && r.passed;
    nlohmann::json c = {{"suite", r.suite}, {"name", r.name}, {"passed", r.passed}, {"tolerance", r.tolerance}};
    c["worst"] = std::isfinite(r.worst) ? nlohmann::json(r.worst) : nlohmann::json(nullptr);
    c["slack"] = std::isfinite(r.slack()) ? nlohmann::json(r.slack()) : nlohmann::json(nullptr);
    if (!r.detail.empty()) c["worst_case"] = r.detail;
    checks.push_back(std::move(c));
  }
  return {{"passed", ok}, {"checks", checks}};
}

} // namespace fca
