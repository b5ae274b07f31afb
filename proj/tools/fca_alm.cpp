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

// fca-alm: run the reference experiment matrix, verification suites, and
// trace reports.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "fca/experiment.hpp"
#include "fca/kernels.hpp"
#include "fca/trace_io.hpp"
#include "fca/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

const std::vector<std::pair<std::string, std::string>> kRunFlags = {
    {"problem", "regular | irregular | kanzow_steck | halfline | box_qp | box_qp(n,m)"},
    {"mu0", "initial penalty parameter"},
    {"beta", "penalty decrease factor"},
    {"theta", "residual decrease threshold of the adaptive rule"},
    {"eta", "elastic safeguard growth parameter"},
    {"ysg-max", "safeguard box half-width"},
    {"eps0", "initial inner tolerance"},
    {"kappa-eps", "inner tolerance decrease factor"},
    {"eps-floor", "smallest inner tolerance"},
    {"tol", "termination tolerance for eps_k and the primal residual"},
    {"max-outer", "outer iteration limit"},
    {"dual-blowup", "multiplier norm classified as divergence"},
    {"start", "warm | cold:<x>[;<x>...]"},
    {"out", "output directory (default $FCA_ALM_OUT or fca_alm_out)"},
    {"jobs", "cells run concurrently"},
    {"seed", "seed of generated problems"},
};

int do_run(const std::map<std::string, std::string>& flags, const std::map<std::string, CLI::Option*>& opts,
           const std::vector<std::string>& cells, const std::string& config_path) {
  fca::ExperimentPlan plan;
  if (const char* env = std::getenv("FCA_ALM_OUT"); env && *env) plan.out = env;
  try {
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) throw fca::ParameterError("cannot read config file " + config_path);
      std::stringstream ss;
      ss << is.rdbuf();
      for (const auto& [k, v] : fca::parse_config(ss.str())) fca::apply_setting(plan, k, v);
    }
    for (const auto& [key, value] : flags)
      if (opts.at(key)->count() > 0) fca::apply_setting(plan, key, value);
    if (!cells.empty()) {
      std::string joined;
      for (const auto& c : cells) joined += (joined.empty() ? "" : "/") + c;
      fca::apply_setting(plan, "cells", joined);
    }
    fca::plan_problem(plan);
  } catch (const fca::ParameterError& e) {
    std::cerr << "fca-alm run: " << e.what() << "\n";
    return kUsage;
  }

  std::vector<fca::CellResult> results;
  try {
    results = fca::run_plan(plan);
  } catch (const fca::ParameterError& e) {
    std::cerr << "fca-alm run: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "fca-alm run: " << e.what() << "\n";
    return kFailure;
  }
  for (const auto& r : results) {
    std::printf("%-18s %-15s iters=%-5zu", r.cell.name().c_str(), std::string(fca::to_string(r.trace.terminal)).c_str(),
                r.trace.records.size());
    if (!r.trace.records.empty()) {
      const auto& last = r.trace.records.back();
      std::printf(" V=%-10.3e mu=%-10.3e |y|=%-10.3e", last.V_eucl, last.mu, fca::norm2(last.y));
    }
    std::printf(" %.3fs%s\n", r.wall_time_s, r.failed ? "  FAILED" : "");
  }
  std::printf("summary: %s\n", (plan.out / "summary.json").string().c_str());
  return kOk;
}

int do_verify(const std::string& suite, const std::string& report_path, bool json) {
  std::vector<fca::CheckResult> results;
  try {
    results = fca::run_suite(suite);
  } catch (const fca::ParameterError& e) {
    std::cerr << "fca-alm verify: " << e.what() << "\n";
    return kUsage;
  }
  const auto report = fca::verify_report(results);
  if (json) {
    std::cout << report.dump(2) << "\n";
  } else {
    for (const auto& r : results)
      std::printf("%s  %-10s %-70s worst=%-11.3e tol=%.1e\n", r.passed ? "PASS" : "FAIL", r.suite.c_str(),
                  r.name.c_str(), r.worst, r.tolerance);
  }
  if (!report_path.empty()) {
    std::ofstream os(report_path);
    os << report.dump(2) << "\n";
    if (!os) {
      std::cerr << "fca-alm verify: cannot write " << report_path << "\n";
      return kFailure;
    }
  }
  return report.at("passed").get<bool>() ? kOk : kFailure;
}

int do_report(const std::vector<std::string>& inputs, bool json) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(in))
        if (entry.is_directory() && fs::exists(entry.path() / "trace.csv")) found.push_back(entry.path() / "trace.csv");
      std::sort(found.begin(), found.end());
      if (found.empty()) {
        std::cerr << "fca-alm report: no traces under " << in << "\n";
        return kUsage;
      }
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.emplace_back(in);
    }
  }
  nlohmann::json out = nlohmann::json::array();
  for (const auto& f : files) {
    std::vector<fca::IterationRecord> records;
    try {
      records = fca::read_trace_csv(f);
    } catch (const fca::FormatError& e) {
      std::cerr << "fca-alm report: " << e.what() << "\n";
      return kUsage;
    }
    const auto s = fca::trace_stats(records);
    if (json) {
      out.push_back({{"trace", f.string()},
                     {"iters", s.iters},
                     {"final_V", s.final_V},
                     {"final_mu", s.final_mu},
                     {"final_rho", s.final_rho},
                     {"final_y_norm", s.final_y_norm},
                     {"penalty_decreases", s.penalty_decreases},
                     {"tail_mu_y_liminf", s.tail_mu_y_min},
                     {"tail_mu_y_limsup", s.tail_mu_y_max},
                     {"all_certified", s.all_certified}});
    } else {
      std::printf("%s\n  iters=%d V=%.3e mu=%.3e rho=%.4g |y|=%.4g decreases=%d mu|y| tail in [%.3e, %.3e]%s\n",
                  f.string().c_str(), s.iters, s.final_V, s.final_mu, s.final_rho, s.final_y_norm,
                  s.penalty_decreases, s.tail_mu_y_min, s.tail_mu_y_max, s.all_certified ? "" : "  (heuristic-eps)");
    }
  }
  if (json) std::cout << out.dump(2) << "\n";
  return kOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Augmented Lagrangian experiments for convex composite problems"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run the experiment cells and write traces and a summary");
  std::map<std::string, std::string> flags;
  std::map<std::string, CLI::Option*> opts;
  for (const auto& [key, help] : kRunFlags) opts[key] = run->add_option("--" + key, flags[key], help);
  std::vector<std::string> cells;
  run->add_option("--cells", cells, "all | fixed | adaptive | <mode>,<penalty> (repeatable, or '/'-separated)");
  std::string config_path;
  run->add_option("--config", config_path, "flat key=value file; flags override it");

  auto* verify = app.add_subcommand("verify", "run invariant suites");
  std::string suite = "all";
  std::string report_path;
  bool verify_json = false;
  verify->add_option("suite", suite, "prox | identities | ppa | alm_ppa | dmu | all");
  verify->add_option("--report", report_path, "write the JSON report to this file");
  verify->add_flag("--json", verify_json, "print the JSON report instead of the table");

  auto* report = app.add_subcommand("report", "summarise trace files or run directories");
  std::vector<std::string> inputs;
  bool report_json = false;
  report->add_option("inputs", inputs, "trace.csv files or run output directories")->required();
  report->add_flag("--json", report_json, "print JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (run->parsed()) return do_run(flags, opts, cells, config_path);
  if (verify->parsed()) return do_verify(suite, report_path, verify_json);
  return do_report(inputs, report_json);
}
