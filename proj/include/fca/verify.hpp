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

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace fca {

/// One invariant measured over a sample: it holds when worst <= tolerance.
struct CheckResult {
  std::string suite;
  std::string name;
  double worst = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;

  double slack() const { return tolerance - worst; }
};

/// Suite names accepted by run_suite, in execution order of "all".
const std::vector<std::string>& suite_names();

/// Runs "prox", "identities", "ppa", "alm_ppa", "dmu" or "all".
/// Deterministic (fixed seeds). Throws ParameterError for unknown names.
std::vector<CheckResult> run_suite(std::string_view suite);

nlohmann::json verify_report(const std::vector<CheckResult>& results);

} // namespace fca
