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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fca/problem.hpp"

namespace {

using fca::ProblemSpec;
using fca::Vec;

Vec v1(double a) { return Vec::Constant(1, a); }

// box_qp(4, 2, seed 1): reference from an independent replica of the
// generator and active-set enumeration in 50-digit arithmetic
// (tests/oracles/box_qp_oracle.py).
const double kQpX[] = {0.71534707604859148, -0.71993615356399543, 0.2867430366201224, 0.72344178013291971};
const double kQpY[] = {1.1416609399419012, 0.28045773171814354};
constexpr double kQpPhi = 0.087940750098031397;
constexpr double kQpLambdaMin = 1.1150807223724255;

std::vector<ProblemSpec> all_builtins() {
  return {fca::regular_problem(), fca::irregular_problem(), fca::kanzow_steck_problem(), fca::halfline_problem(),
          fca::box_qp_problem(4, 2, 1), fca::box_qp_problem(6, 3, 7)};
}

TEST(EvaluatePhi, Examples) {
  EXPECT_EQ(fca::evaluate_phi(fca::regular_problem(), v1(0.0)), 0.0);
  EXPECT_TRUE(std::isinf(fca::evaluate_phi(fca::regular_problem(), v1(2.0))));
  EXPECT_EQ(fca::evaluate_phi(fca::kanzow_steck_problem(), v1(1.0)), 1.0);
  EXPECT_THROW(fca::evaluate_phi(fca::regular_problem(), v1(NAN)), fca::EvaluationError);
  ProblemSpec bad = fca::regular_problem();
  bad.f = [](const Vec&) { return fca::ValueGrad{INFINITY, Vec::Zero(1)}; };
  EXPECT_THROW(fca::evaluate_phi(bad, v1(0.0)), fca::EvaluationError);
}

TEST(KktResiduals, Examples) {
  auto r = fca::kkt_residuals(fca::regular_problem(), v1(0.0), v1(1.0));
  EXPECT_EQ(r.stationarity, 0.0);
  EXPECT_EQ(r.attachment, 0.0);
  r = fca::kkt_residuals(fca::kanzow_steck_problem(), v1(1.0), v1(1.0 / 3.0));
  EXPECT_NEAR(r.stationarity, 0.0, 1e-15);
  EXPECT_EQ(r.attachment, 0.0);
  for (double y : {-2.0, 0.0, 0.5, 100.0})
    EXPECT_EQ(fca::kkt_residuals(fca::irregular_problem(), v1(0.0), v1(y)).stationarity, 1.0);
}

TEST(Builtins, KnownSolutionsAreSaddlePoints) {
  for (const auto& p : all_builtins()) {
    ASSERT_TRUE(p.known_solution) << p.name;
    const auto& s = *p.known_solution;
    EXPECT_NEAR(fca::evaluate_phi(p, s.x), s.phi, 1e-12) << p.name;
    if (!s.y) continue;
    const auto r = fca::kkt_residuals(p, s.x, *s.y);
    EXPECT_LE(r.stationarity, 1e-9) << p.name;
    EXPECT_LE(r.attachment, 1e-9) << p.name;
  }
  EXPECT_FALSE(fca::irregular_problem().known_solution->y);
}

TEST(Builtins, NamesAndErrors) {
  EXPECT_EQ(fca::builtin_problem("regular").name, "regular");
  EXPECT_EQ(fca::builtin_problem("box_qp", 5, 3, 2).dim_x, 5);
  EXPECT_EQ(fca::builtin_problem("box_qp", 5, 3, 2).dim_c, 3);
  EXPECT_THROW(fca::builtin_problem("nope"), fca::ParameterError);
  EXPECT_THROW(fca::builtin_problem("box_qp", 0, 2, 1), fca::ParameterError);
  EXPECT_FALSE(fca::kanzow_steck_problem().convex);
}

TEST(Builtins, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  for (const auto& p : all_builtins()) {
    for (int trial = 0; trial < 50; ++trial) {
      Vec x(p.dim_x), v(p.dim_c);
      for (auto& e : x) e = n(rng);
      for (auto& e : v) e = n(rng);
      const Vec g = p.f(x).gradient;
      Vec jt_fd = Vec::Zero(p.dim_x);
      for (fca::Index i = 0; i < p.dim_x; ++i) {
        const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
        Vec xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double fd = (p.f(xp).value - p.f(xm).value) / (2.0 * h);
        EXPECT_LE(std::abs(fd - g[i]), 1e-6 * std::max(1.0, std::abs(g[i]))) << p.name;
        jt_fd[i] = (p.c(xp) - p.c(xm)).dot(v) / (2.0 * h);
      }
      const Vec jt = p.jtvp(x, v);
      EXPECT_LE((jt - jt_fd).norm(), 1e-5 * std::max(1.0, jt.norm())) << p.name;
    }
  }
}

TEST(Builtins, ConvexitySpotCheck) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (const auto& p : all_builtins()) {
    if (!p.convex) continue;  // the nonconvex formulation is exempt
    // sample around the solution so that small feasible sets are hit often;
    // the irregular problem's feasible set is the single point 0
    const Vec center = p.known_solution->x;
    const double radius = p.name == "irregular" ? 0.0 : 1.0 / 3.0;
    int pairs = 0;
    for (int attempt = 0; pairs < 100 && attempt < 100000; ++attempt) {
      Vec a = center, b = center;
      for (auto& e : a) e += radius * u(rng);
      for (auto& e : b) e += radius * u(rng);
      const double fa = fca::evaluate_phi(p, a), fb = fca::evaluate_phi(p, b);
      if (!std::isfinite(fa) || !std::isfinite(fb)) continue;
      ++pairs;
      for (double lam : {0.25, 0.5, 0.75})
        EXPECT_LE(fca::evaluate_phi(p, lam * a + (1 - lam) * b), lam * fa + (1 - lam) * fb + 1e-10) << p.name;
    }
    EXPECT_EQ(pairs, 100) << p.name;
  }
}

TEST(BoxQp, MatchesFrozenOracle) {
  const ProblemSpec p = fca::box_qp_problem(4, 2, 1);
  const auto& s = *p.known_solution;
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(s.x[i], kQpX[i], 1e-12);
  for (int i = 0; i < 2; ++i) EXPECT_NEAR((*s.y)[i], kQpY[i], 1e-12);
  EXPECT_NEAR(s.phi, kQpPhi, 1e-12);
  EXPECT_NEAR(*p.strong_convexity, kQpLambdaMin, 1e-12);
}

TEST(BoxQp, GeneratorIsDeterministic) {
  const auto a = fca::make_box_qp(4, 2, 1), b = fca::make_box_qp(4, 2, 1), c = fca::make_box_qp(4, 2, 2);
  EXPECT_EQ(a.Q, b.Q);
  EXPECT_EQ(a.A, b.A);
  EXPECT_NE(a.A, c.A);
  EXPECT_TRUE(a.Q.isApprox(a.Q.transpose()));
}

TEST(QpEnumeration, SimpleBoundConstrainedProblem) {
  // min 1/2 |x|^2 - x1 - x2  s.t. x1 <= 0.5 ; solution (0.5, 1), y = 0.5
  const fca::Mat H = fca::Mat::Identity(2, 2);
  Vec h(2);
  h << -1.0, -1.0;
  fca::Mat C(1, 2);
  C << 1.0, 0.0;
  const auto s = fca::solve_qp_by_enumeration(H, h, C, Vec::Constant(1, 0.5));
  EXPECT_NEAR(s.x[0], 0.5, 1e-14);
  EXPECT_NEAR(s.x[1], 1.0, 1e-14);
  EXPECT_NEAR(s.y[0], 0.5, 1e-14);
  EXPECT_THROW(fca::solve_qp_by_enumeration(H, h, fca::Mat::Zero(21, 2), Vec::Zero(21)), fca::ParameterError);
}

} // namespace
