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

#include "fca/problem.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <random>

#include "fca/kernels.hpp"

namespace fca {
namespace {

Vec scalar(double v) { return Vec::Constant(1, v); }

// Shared shape of the scalar examples: f(x) = x, g = indicator of R_-.
ProblemSpec scalar_problem(std::string name, std::function<double(double)> c,
                           std::function<double(double)> dc) {
  ProblemSpec p{.name = std::move(name),
                .dim_x = 1,
                .dim_c = 1,
                .f = [](const Vec& x) { return ValueGrad{x[0], Vec::Ones(1)}; },
                .c = [c](const Vec& x) { return scalar(c(x[0])); },
                .jtvp = [dc](const Vec& x, const Vec& v) { return scalar(dc(x[0]) * v[0]); },
                .g = ProxFunction::nonpositive_orthant(1),
                .horizon_polar = {},
                .known_solution = std::nullopt,
                .strong_convexity = std::nullopt,
                .convex = true};
  return p;
}

} // namespace

Vec ProblemSpec::project_horizon_polar(const Vec& y) const {
  return horizon_polar ? horizon_polar(y) : g.project_horizon_polar(y);
}

double evaluate_phi(const ProblemSpec& p, const Vec& x) {
  if (!x.allFinite()) throw EvaluationError("evaluate_phi: non-finite point");
  const double fx = p.f(x).value;
  const Vec cx = p.c(x);
  if (!std::isfinite(fx) || !cx.allFinite()) throw EvaluationError("evaluate_phi: non-finite oracle output");
  return fx + p.g.value(cx);
}

KktResidual kkt_residuals(const ProblemSpec& p, const Vec& x, const Vec& y) {
  const ValueGrad fx = p.f(x);
  const Vec cx = p.c(x);
  const Vec grad_l = fx.gradient + p.jtvp(x, y);
  const Vec attach = cx - p.g.prox(1.0, cx + y);
  if (!grad_l.allFinite() || !attach.allFinite()) throw EvaluationError("kkt_residuals: non-finite oracle output");
  return {norm2(grad_l), norm2(attach)};
}

ProblemSpec regular_problem() {
  auto p = scalar_problem("regular", [](double x) { return x * x - x; }, [](double x) { return 2.0 * x - 1.0; });
  p.known_solution = KnownSolution{scalar(0.0), scalar(1.0), 0.0};
  return p;
}

ProblemSpec irregular_problem() {
  auto p = scalar_problem("irregular", [](double x) { return x * x; }, [](double x) { return 2.0 * x; });
  p.known_solution = KnownSolution{scalar(0.0), std::nullopt, 0.0};
  return p;
}

ProblemSpec kanzow_steck_problem() {
  auto p = scalar_problem("kanzow_steck", [](double x) { return 1.0 - x * x * x; },
                          [](double x) { return -3.0 * x * x; });
  p.known_solution = KnownSolution{scalar(1.0), scalar(1.0 / 3.0), 1.0};
  p.convex = false;
  return p;
}

ProblemSpec halfline_problem() {
  auto p = scalar_problem("halfline", [](double x) { return x; }, [](double) { return 1.0; });
  p.g = ProxFunction::nonnegative_orthant(1);
  p.known_solution = KnownSolution{scalar(0.0), scalar(-1.0), 0.0};
  return p;
}

BoxQp make_box_qp(Index n, Index m, std::uint64_t seed) {
  if (n < 1 || m < 1) throw ParameterError("box_qp needs n, m >= 1");
  std::mt19937_64 rng(seed);
  // raw engine output is portable, library distributions are not
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
  Mat B(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) B(i, j) = uniform();
  BoxQp qp;
  qp.Q = B.transpose() * B / static_cast<double>(n) + Mat::Identity(n, n);
  qp.q.resize(n);
  for (Index i = 0; i < n; ++i) qp.q[i] = uniform();
  qp.A.resize(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) qp.A(i, j) = uniform();
  const Vec x_unc = -qp.Q.ldlt().solve(qp.q);
  qp.b = qp.A * x_unc - Vec::Constant(m, 0.5);
  return qp;
}

ProblemSpec box_qp_problem(const BoxQp& qp) {
  const Index n = qp.Q.rows();
  const Index m = qp.A.rows();
  auto data = std::make_shared<const BoxQp>(qp);
  ProblemSpec p;
  p.name = "box_qp";
  p.dim_x = n;
  p.dim_c = m;
  p.f = [data](const Vec& x) {
    const Vec qx = data->Q * x;
    return ValueGrad{0.5 * dot(x, qx) + dot(data->q, x), qx + data->q};
  };
  p.c = [data](const Vec& x) -> Vec { return data->A * x - data->b; };
  p.jtvp = [data](const Vec&, const Vec& v) -> Vec { return data->A.transpose() * v; };
  p.g = ProxFunction::nonpositive_orthant(m);
  const QpSolution sol = solve_qp_by_enumeration(qp.Q, qp.q, qp.A, qp.b);
  p.known_solution = KnownSolution{sol.x, sol.y, sol.value};
  p.strong_convexity = Eigen::SelfAdjointEigenSolver<Mat>(qp.Q).eigenvalues().minCoeff();
  return p;
}

ProblemSpec box_qp_problem(Index n, Index m, std::uint64_t seed) { return box_qp_problem(make_box_qp(n, m, seed)); }

ProblemSpec builtin_problem(std::string_view name, Index n, Index m, std::uint64_t seed) {
  if (name == "regular") return regular_problem();
  if (name == "irregular") return irregular_problem();
  if (name == "kanzow_steck") return kanzow_steck_problem();
  if (name == "halfline") return halfline_problem();
  if (name == "box_qp") return box_qp_problem(n, m, seed);
  throw ParameterError("unknown problem '" + std::string(name) + "'");
}

QpSolution solve_qp_by_enumeration(const Mat& H, const Vec& h, const Mat& C, const Vec& d) {
  const Index n = H.rows();
  const Index rows = C.rows();
  if (rows > 20) throw ParameterError("active-set enumeration limited to 20 constraints");
  const double tol = 1e-10 * std::max(1.0, d.size() > 0 ? d.cwiseAbs().maxCoeff() : 1.0);
  std::optional<QpSolution> best;
  for (std::uint32_t mask = 0; mask < (1u << rows); ++mask) {
    std::vector<Index> active;
    for (Index i = 0; i < rows; ++i)
      if (mask & (1u << i)) active.push_back(i);
    const Index r = static_cast<Index>(active.size());
    Mat kkt = Mat::Zero(n + r, n + r);
    Vec rhs(n + r);
    kkt.topLeftCorner(n, n) = H;
    rhs.head(n) = -h;
    for (Index a = 0; a < r; ++a) {
      kkt.block(n + a, 0, 1, n) = C.row(active[a]);
      kkt.block(0, n + a, n, 1) = C.row(active[a]).transpose();
      rhs[n + a] = d[active[a]];
    }
    Eigen::FullPivLU<Mat> lu(kkt);
    if (!lu.isInvertible()) continue;
    const Vec sol = lu.solve(rhs);
    Vec y = Vec::Zero(rows);
    for (Index a = 0; a < r; ++a) y[active[a]] = sol[n + a];
    const Vec x = sol.head(n);
    if ((y.array() < -tol).any()) continue;
    if (((C * x - d).array() > tol).any()) continue;
    const double value = 0.5 * x.dot(H * x) + h.dot(x);
    if (!best || value < best->value) best = QpSolution{x, y.cwiseMax(0.0), value};
  }
  if (!best) throw SolveError("active-set enumeration found no KKT point");
  return *best;
}

} // namespace fca
