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

#include "fca/prox.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "fca/kernels.hpp"

namespace fca {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Membership slack for sets whose projections are not exact in floating
// point (halfspace, cone, conjugate domains). Orthants and boxes are exact.
constexpr double kSetTol = 1e-12;

double scale_of(const Vec& v) { return std::max(1.0, norm_inf(v)); }

Vec project_soc(const Vec& z) {
  const double t = z[0];
  const Vec u = z.tail(z.size() - 1);
  const double s = norm2(u);
  if (s <= t) return z;
  if (s <= -t) return Vec::Zero(z.size());
  const double alpha = 0.5 * (t + s);
  Vec p(z.size());
  p[0] = alpha;
  p.tail(z.size() - 1) = (alpha / s) * u;
  return p;
}

bool in_soc(const Vec& z, double slack) {
  return norm2(z.tail(z.size() - 1)) <= z[0] + slack;
}

} // namespace

ProxFunction::ProxFunction(Index dim, Member member) : dim_(dim), member_(std::move(member)) {
  if (dim_ < 1) throw ParameterError("prox function dimension must be >= 1");
}

ProxFunction ProxFunction::nonpositive_orthant(Index m) { return {m, NonpositiveOrthant{}}; }
ProxFunction ProxFunction::nonnegative_orthant(Index m) { return {m, NonnegativeOrthant{}}; }

ProxFunction ProxFunction::box(Vec lo, Vec hi) {
  if (lo.size() != hi.size()) throw ParameterError("box bounds differ in size");
  if ((lo.array() > hi.array()).any()) throw ParameterError("box has lo > hi");
  const Index m = lo.size();
  return {m, Box{std::move(lo), std::move(hi)}};
}

ProxFunction ProxFunction::halfspace(Vec normal, double offset) {
  if (!(normal.squaredNorm() > 0.0)) throw ParameterError("halfspace normal must be nonzero");
  const Index m = normal.size();
  return {m, Halfspace{std::move(normal), offset}};
}

ProxFunction ProxFunction::second_order_cone(Index m) {
  if (m < 2) throw ParameterError("second-order cone needs dimension >= 2");
  return {m, SecondOrderCone{}};
}

ProxFunction ProxFunction::l1_norm(Index m, double weight) {
  require_positive(weight, "l1 weight");
  return {m, L1Norm{weight}};
}

ProxFunction ProxFunction::componentwise_max(Index m) { return {m, ComponentwiseMax{}}; }

std::string_view ProxFunction::tag() const {
  return std::visit(overloaded{
                        [](const NonpositiveOrthant&) { return "nonpositive_orthant"; },
                        [](const NonnegativeOrthant&) { return "nonnegative_orthant"; },
                        [](const Box&) { return "box"; },
                        [](const Halfspace&) { return "halfspace"; },
                        [](const SecondOrderCone&) { return "second_order_cone"; },
                        [](const L1Norm&) { return "l1_norm"; },
                        [](const ComponentwiseMax&) { return "componentwise_max"; },
                    },
                    member_);
}

bool ProxFunction::is_indicator() const {
  return !std::holds_alternative<L1Norm>(member_) && !std::holds_alternative<ComponentwiseMax>(member_);
}

double ProxFunction::value(const Vec& z) const {
  // membership up to rounding, as for the conjugates
  const double tol = kSetTol * scale_of(z);
  return std::visit(
      overloaded{
          [&](const NonpositiveOrthant&) { return (z.array() <= tol).all() ? 0.0 : kInf; },
          [&](const NonnegativeOrthant&) { return (z.array() >= -tol).all() ? 0.0 : kInf; },
          [&](const Box& b) {
            return ((z.array() >= b.lo.array() - tol) && (z.array() <= b.hi.array() + tol)).all() ? 0.0 : kInf;
          },
          [&](const Halfspace& h) {
            const double slack = kSetTol * std::max(1.0, std::abs(h.offset)) * scale_of(z);
            return dot(h.normal, z) <= h.offset + slack ? 0.0 : kInf;
          },
          [&](const SecondOrderCone&) { return in_soc(z, kSetTol * scale_of(z)) ? 0.0 : kInf; },
          [&](const L1Norm& l) { return l.weight * z.lpNorm<1>(); },
          [&](const ComponentwiseMax&) { return z.maxCoeff(); },
      },
      member_);
}

Vec ProxFunction::prox(double gamma, const Vec& z) const {
  require_positive(gamma, "prox step");
  if (z.size() != dim_) throw ParameterError("prox argument has wrong dimension");
  const auto& k = simd::active_kernels();
  Vec out(z.size());
  std::visit(overloaded{
                 [&](const NonpositiveOrthant&) { k.clamp_uniform(as_span(z), -kInf, 0.0, as_span(out)); },
                 [&](const NonnegativeOrthant&) { k.clamp_uniform(as_span(z), 0.0, kInf, as_span(out)); },
                 [&](const Box& b) { k.clamp(as_span(z), as_span(b.lo), as_span(b.hi), as_span(out)); },
                 [&](const Halfspace& h) {
                   const double excess = dot(h.normal, z) - h.offset;
                   out = z;
                   if (excess > 0.0) out -= (excess / h.normal.squaredNorm()) * h.normal;
                 },
                 [&](const SecondOrderCone&) { out = project_soc(z); },
                 [&](const L1Norm& l) { k.soft_threshold(as_span(z), gamma * l.weight, as_span(out)); },
                 [&](const ComponentwiseMax&) { out = z - gamma * project_simplex(z / gamma); },
             },
             member_);
  return out;
}

double ProxFunction::conjugate_value(const Vec& y) const {
  const double slack = kSetTol * scale_of(y);
  return std::visit(
      overloaded{
          [&](const NonpositiveOrthant&) { return (y.array() >= -slack).all() ? 0.0 : kInf; },
          [&](const NonnegativeOrthant&) { return (y.array() <= slack).all() ? 0.0 : kInf; },
          [&](const Box& b) {
            // support function of the box
            double s = 0.0;
            for (Index i = 0; i < y.size(); ++i) {
              if (y[i] > 0.0) s += b.hi[i] * y[i];
              else if (y[i] < 0.0) s += b.lo[i] * y[i];
            }
            return s;
          },
          [&](const Halfspace& h) {
            const double t = dot(h.normal, y) / h.normal.squaredNorm();
            if (t < -slack || norm_inf(y - t * h.normal) > slack) return kInf;
            return std::max(t, 0.0) * h.offset;
          },
          [&](const SecondOrderCone&) {
            // polar cone is -K
            return in_soc(-y, slack) ? 0.0 : kInf;
          },
          [&](const L1Norm& l) { return norm_inf(y) <= l.weight * (1.0 + kSetTol) ? 0.0 : kInf; },
          [&](const ComponentwiseMax&) {
            return (y.array() >= -slack).all() && std::abs(y.sum() - 1.0) <= slack ? 0.0 : kInf;
          },
      },
      member_);
}

Vec ProxFunction::project_horizon_polar(const Vec& y) const {
  return std::visit(overloaded{
                        [&](const NonpositiveOrthant&) -> Vec { return y.cwiseMax(0.0); },
                        [&](const NonnegativeOrthant&) -> Vec { return y.cwiseMin(0.0); },
                        [&](const Box& b) -> Vec {
                          Vec p = y;
                          for (Index i = 0; i < y.size(); ++i) {
                            const bool lo_free = std::isinf(b.lo[i]);
                            const bool hi_free = std::isinf(b.hi[i]);
                            if (lo_free && hi_free) p[i] = 0.0;
                            else if (lo_free) p[i] = std::max(y[i], 0.0);
                            else if (hi_free) p[i] = std::min(y[i], 0.0);
                          }
                          return p;
                        },
                        [&](const Halfspace& h) -> Vec {
                          return (std::max(dot(h.normal, y), 0.0) / h.normal.squaredNorm()) * h.normal;
                        },
                        [&](const SecondOrderCone&) -> Vec { return -project_soc(-y); },
                        [&](const L1Norm&) -> Vec { return y; },
                        [&](const ComponentwiseMax&) -> Vec { return y.cwiseMax(0.0); },
                    },
                    member_);
}

Vec prox(const ProxFunction& g, double gamma, const Vec& z) { return g.prox(gamma, z); }

Envelope envelope(const ProxFunction& g, double gamma, const Vec& z) {
  const Vec p = g.prox(gamma, z);
  const Vec diff = z - p;
  const double gp = g.value(p);
  return {gp + dot(diff, diff) / (2.0 * gamma), diff / gamma};
}

Vec prox_conjugate(const ProxFunction& g, double gamma, const Vec& z) {
  require_positive(gamma, "prox step");
  return z - gamma * g.prox(1.0 / gamma, z / gamma);
}

Vec inexact_prox(const ProxFunction& g, double gamma, const Vec& z, double eps, std::uint64_t seed) {
  if (!(eps >= 0.0)) throw ParameterError("inexactness must be nonnegative");
  Vec p = g.prox(gamma, z);
  const double radius = std::sqrt(2.0 * gamma * eps);
  if (radius == 0.0) return p;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vec d(p.size());
  double nd = 0.0;
  while (nd == 0.0) {
    for (Index i = 0; i < d.size(); ++i) d[i] = normal(rng);
    nd = norm2(d);
  }
  return p + (radius / nd) * d;
}

Vec project_simplex(const Vec& v) {
  std::vector<double> sorted(v.data(), v.data() + v.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double tau = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    cumulative += sorted[j];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) tau = candidate;
  }
  return (v.array() - tau).cwiseMax(0.0);
}

} // namespace fca
