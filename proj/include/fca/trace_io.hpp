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

// CSV traces. One row per outer iteration:
//   k,x,z,y,yhat,mu,rho,eps,V_eucl,V_inf,inner_iters,stat_res,certified
// Vector fields are ';'-joined, reals use the shortest round-trip decimal
// form, certified is 0/1.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fca/alm.hpp"

namespace fca {

inline constexpr std::string_view kTraceHeader =
    "k,x,z,y,yhat,mu,rho,eps,V_eucl,V_inf,inner_iters,stat_res,certified";

/// Malformed trace or config input; the message names the offending column.
class FormatError : public std::runtime_error {
public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

std::string format_real(double v);
double parse_real(std::string_view s);

void write_trace_csv(std::ostream& os, const std::vector<IterationRecord>& records);
std::string trace_csv(const std::vector<IterationRecord>& records);
std::vector<IterationRecord> read_trace_csv(std::istream& is);
std::vector<IterationRecord> read_trace_csv(const std::filesystem::path& path);

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Summary statistics of a trace, as printed by `fca-alm report`.
struct TraceStats {
  int iters = 0;
  double final_V = 0.0;
  double final_mu = 0.0;
  double final_rho = 0.0;
  double final_y_norm = 0.0;
  int penalty_decreases = 0;
  /// min / max of mu_k ||y^{k+1}|| over the last 20% of the records.
  double tail_mu_y_min = 0.0;
  double tail_mu_y_max = 0.0;
  bool all_certified = false;
};

TraceStats trace_stats(const std::vector<IterationRecord>& records);

} // namespace fca
