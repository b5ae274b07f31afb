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
#include <string_view>
#include <variant>

#include "fca/common.hpp"

namespace fca {

// Catalog members. Each is a proper, lsc, convex function with a closed-form
// proximal mapping.

/// Indicator of the nonpositive orthant.
struct NonpositiveOrthant {};
/// Indicator of the nonnegative orthant.
struct NonnegativeOrthant {};
/// Indicator of [lo, hi]; infinite bounds allowed.
struct Box {
  Vec lo, hi;
};
/// Indicator of {z : <normal, z> <= offset}.
struct Halfspace {
  Vec normal;
  double offset = 0.0;
};
/// Indicator of the second-order cone {(t, u) : ||u|| <= t}, t = z[0].
struct SecondOrderCone {};
/// weight * ||z||_1
struct L1Norm {
  double weight = 1.0;
};
/// max_i z_i
struct ComponentwiseMax {};

class ProxFunction {
public:
  using Member = std::variant<NonpositiveOrthant, NonnegativeOrthant, Box, Halfspace, SecondOrderCone,
                              L1Norm, ComponentwiseMax>;

  static ProxFunction nonpositive_orthant(Index m);
  static ProxFunction nonnegative_orthant(Index m);
  static ProxFunction box(Vec lo, Vec hi);
  static ProxFunction halfspace(Vec normal, double offset);
  static ProxFunction second_order_cone(Index m);
  static ProxFunction l1_norm(Index m, double weight = 1.0);
  static ProxFunction componentwise_max(Index m);

  Index dim() const { return dim_; }
  const Member& member() const { return member_; }
  std::string_view tag() const;
  bool is_indicator() const;

  /// g(z); +inf outside the domain.
  double value(const Vec& z) const;
  /// prox_{gamma g}(z).
  Vec prox(double gamma, const Vec& z) const;
  /// g*(y); +inf outside dom g*.
  double conjugate_value(const Vec& y) const;
  /// Euclidean projection onto the polar of the horizon cone of g.
  Vec project_horizon_polar(const Vec& y) const;

private:
  ProxFunction(Index dim, Member member);

  Index dim_;
  Member member_;
};

struct Envelope {
  double value;
  Vec gradient;
};

/// Throws ParameterError when gamma <= 0.
Vec prox(const ProxFunction& g, double gamma, const Vec& z);

/// Moreau envelope g^gamma(z) and its gradient (z - prox_{gamma g}(z)) / gamma.
Envelope envelope(const ProxFunction& g, double gamma, const Vec& z);

/// prox_{gamma g*}(z) = z - gamma * prox_{g/gamma}(z/gamma).
Vec prox_conjugate(const ProxFunction& g, double gamma, const Vec& z);

/// An admissible inexact prox: prox_{gamma g}(z) + d with ||d|| = sqrt(2 gamma eps)
/// exactly, the direction of d drawn deterministically from `seed`.
Vec inexact_prox(const ProxFunction& g, double gamma, const Vec& z, double eps, std::uint64_t seed);

/// Euclidean projection onto the unit simplex {y >= 0, sum y = 1}.
Vec project_simplex(const Vec& v);

} // namespace fca
