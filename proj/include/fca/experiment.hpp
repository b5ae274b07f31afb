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
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fca/alm.hpp"
#include "fca/problem.hpp"

namespace fca {

enum class SafeguardKind { none, rigid, elastic };
enum class PenaltyKind { fixed, geometric, adaptive };

struct CellSpec {
  SafeguardKind safeguard = SafeguardKind::none;
  PenaltyKind penalty = PenaltyKind::fixed;

  /// "none_fixed", "elastic_adaptive", ...
  std::string name() const;
  bool operator==(const CellSpec&) const = default;
};

/// The five reference cells: none/rigid x fixed/adaptive, elastic adaptive.
std::vector<CellSpec> reference_cells();

/// Parses a cell list: "all" (alias "all7"), "fixed", "adaptive", or
/// "mode,penalty" pairs separated by '/'. Duplicates are dropped.
/// Throws ParameterError; elastic cells must be adaptive.
std::vector<CellSpec> parse_cells(std::string_view text);

/// Shared run parameters; defaults are the reference experiment's.
struct ExperimentParams {
  double mu0 = 1.0;
  double beta = 0.5;
  double theta = 0.9;
  double eta = 0.6;
  double ysg_max = 0.1;
  double eps0 = 1.0;
  double kappa_eps = 0.5;
  double eps_floor = 1e-9;
  double tol = 1e-9;
  int max_outer = 500;
  double dual_blowup = 1e6;
  bool warm = true;
  std::vector<double> x_cold;  ///< one value is broadcast to every component
  std::uint64_t seed = 1;
};

struct ExperimentPlan {
  std::string problem = "regular";
  Index qp_n = 4;
  Index qp_m = 2;
  std::vector<CellSpec> cells = reference_cells();
  ExperimentParams params;
  std::filesystem::path out = "fca_alm_out";
  int jobs = 1;
};

/// Applies one `key=value` setting; keys are the long flag names without
/// dashes ("mu0", "kappa-eps", "start", ...). Throws ParameterError.
void apply_setting(ExperimentPlan& plan, std::string_view key, std::string_view value);

/// Flat `key = value` lines; '#' starts a comment. Throws ParameterError on
/// lines without '='.
std::vector<std::pair<std::string, std::string>> parse_config(std::string_view text);

ProblemSpec plan_problem(const ExperimentPlan& plan);
AlmConfig make_alm_config(const ProblemSpec& p, const CellSpec& cell, const ExperimentParams& params);

struct CellResult {
  CellSpec cell;
  RunTrace trace;
  double wall_time_s = 0.0;
  bool failed = false;
  std::string error;
  std::string csv;  ///< path relative to the output directory
};

/// Runs every cell (up to plan.jobs concurrently), writes <out>/<cell>/trace.csv
/// and <out>/summary.json, and returns the results in plan order.
std::vector<CellResult> run_plan(const ExperimentPlan& plan);

nlohmann::json summary_json(const ExperimentPlan& plan, const std::vector<CellResult>& results);

} // namespace fca
