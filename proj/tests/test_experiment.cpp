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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fca/experiment.hpp"
#include "fca/trace_io.hpp"

namespace {

using fca::CellSpec;
using fca::ExperimentPlan;
using fca::PenaltyKind;
using fca::SafeguardKind;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  return dir;
}

TEST(Cells, ParsingAndNames) {
  const auto all = fca::parse_cells("all");
  ASSERT_EQ(all.size(), 5u);
  EXPECT_EQ(all, fca::reference_cells());
  EXPECT_EQ(fca::parse_cells("all7"), all);
  std::vector<std::string> names;
  for (const auto& c : all) names.push_back(c.name());
  EXPECT_EQ(names, (std::vector<std::string>{"none_fixed", "none_adaptive", "rigid_fixed", "rigid_adaptive",
                                             "elastic_adaptive"}) ) << "order of the reference cells";
  EXPECT_EQ(fca::parse_cells("fixed").size(), 2u);
  EXPECT_EQ(fca::parse_cells("adaptive").size(), 3u);
  const auto two = fca::parse_cells("rigid,geometric / classical,fixed / none,fixed");
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0], (CellSpec{SafeguardKind::rigid, PenaltyKind::geometric}));
  EXPECT_EQ(two[0].name(), "rigid_geometric");
  EXPECT_EQ(two[1].name(), "none_fixed");
  EXPECT_EQ(fca::parse_cells("fixed/all").size(), 5u);

  EXPECT_THROW(fca::parse_cells(""), fca::ParameterError);
  EXPECT_THROW(fca::parse_cells("bogus"), fca::ParameterError);
  EXPECT_THROW(fca::parse_cells("rigid,sometimes"), fca::ParameterError);
  EXPECT_THROW(fca::parse_cells("elastic,fixed"), fca::ParameterError);
}

TEST(Settings, ApplyAndReject) {
  ExperimentPlan plan;
  fca::apply_setting(plan, "problem", "box_qp(6,3)");
  EXPECT_EQ(plan.problem, "box_qp");
  EXPECT_EQ(plan.qp_n, 6);
  EXPECT_EQ(plan.qp_m, 3);
  fca::apply_setting(plan, "mu0", "2.5");
  fca::apply_setting(plan, "kappa-eps", "0.25");
  fca::apply_setting(plan, "max-outer", "42");
  fca::apply_setting(plan, "start", "cold:1;2");
  fca::apply_setting(plan, "jobs", "3");
  fca::apply_setting(plan, "out", "/tmp/x");
  EXPECT_EQ(plan.params.mu0, 2.5);
  EXPECT_EQ(plan.params.kappa_eps, 0.25);
  EXPECT_EQ(plan.params.max_outer, 42);
  EXPECT_FALSE(plan.params.warm);
  EXPECT_EQ(plan.params.x_cold, (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(plan.jobs, 3);
  EXPECT_EQ(plan.out, "/tmp/x");
  fca::apply_setting(plan, "start", "warm");
  EXPECT_TRUE(plan.params.warm);

  EXPECT_THROW(fca::apply_setting(plan, "mu0", "fast"), fca::ParameterError);
  EXPECT_THROW(fca::apply_setting(plan, "max-outer", "1.5"), fca::ParameterError);
  EXPECT_THROW(fca::apply_setting(plan, "jobs", "0"), fca::ParameterError);
  EXPECT_THROW(fca::apply_setting(plan, "start", "lukewarm"), fca::ParameterError);
  EXPECT_THROW(fca::apply_setting(plan, "colour", "red"), fca::ParameterError);
  EXPECT_THROW(fca::apply_setting(plan, "problem", "box_qp(6)"), fca::ParameterError);
}

TEST(Settings, ConfigFile) {
  const auto kv = fca::parse_config("# reference run\nproblem = irregular\n\n  mu0=0.5  # inline\ncells = fixed\n");
  ASSERT_EQ(kv.size(), 3u);
  EXPECT_EQ(kv[0], (std::pair<std::string, std::string>{"problem", "irregular"}));
  EXPECT_EQ(kv[1].first, "mu0");
  EXPECT_EQ(kv[1].second, "0.5");
  EXPECT_THROW(fca::parse_config("mu0 0.5\n"), fca::ParameterError);
}

TEST(Settings, AlmConfigFromCell) {
  ExperimentPlan plan;
  const auto p = fca::plan_problem(plan);
  const auto rigid = fca::make_alm_config(p, {SafeguardKind::rigid, PenaltyKind::adaptive}, plan.params);
  ASSERT_TRUE(std::holds_alternative<fca::RigidMode>(rigid.mode));
  EXPECT_EQ(std::get<fca::RigidMode>(rigid.mode).set.project(fca::Vec::Constant(1, 5.0))[0], 0.1);
  EXPECT_EQ(rigid.penalty.setting, fca::PenaltyRule::Setting::adaptive);
  const auto el = fca::make_alm_config(p, {SafeguardKind::elastic, PenaltyKind::adaptive}, plan.params);
  ASSERT_TRUE(std::holds_alternative<fca::ElasticParams>(el.mode));
  EXPECT_EQ(std::get<fca::ElasticParams>(el.mode).eta, 0.6);
  EXPECT_THROW(fca::make_alm_config(p, {SafeguardKind::elastic, PenaltyKind::fixed}, plan.params),
               fca::ParameterError);
  plan.params.eta = 0.45;  // beta = 0.5 > eta
  EXPECT_THROW(fca::make_alm_config(p, {SafeguardKind::elastic, PenaltyKind::adaptive}, plan.params),
               fca::ParameterError);
}

TEST(RunPlan, WritesTracesAndSummary) {
  ExperimentPlan plan;
  plan.out = fresh_dir("fca_run_plan_test");
  plan.params.max_outer = 80;
  plan.jobs = 3;
  const auto results = fca::run_plan(plan);
  ASSERT_EQ(results.size(), 5u);
  for (std::size_t i = 0; i < results.size(); ++i) {
    EXPECT_EQ(results[i].cell, plan.cells[i]);
    EXPECT_FALSE(results[i].failed);
    const auto recs = fca::read_trace_csv(plan.out / results[i].csv);
    EXPECT_EQ(recs.size(), results[i].trace.records.size());
    EXPECT_EQ(fca::trace_csv(recs), fca::trace_csv(results[i].trace.records));
  }
  const auto summary = nlohmann::json::parse(slurp(plan.out / "summary.json"));
  EXPECT_EQ(summary["problem"], "regular");
  EXPECT_EQ(summary["any_failed"], false);
  EXPECT_EQ(summary["parameters"]["max_outer"], 80);
  ASSERT_EQ(summary["cells"].size(), 5u);
  const auto& c0 = summary["cells"][0];
  EXPECT_EQ(c0["cell"], "none_fixed");
  EXPECT_EQ(c0["terminal"], "converged");
  EXPECT_EQ(c0["csv"], "none_fixed/trace.csv");
  EXPECT_NEAR(c0["final_y"][0].get<double>(), 1.0, 1e-6);
  EXPECT_EQ(summary["cells"][2]["terminal"], "iteration_cap");  // rigid_fixed stalls

  // Same plan, one thread: identical traces.
  ExperimentPlan serial = plan;
  serial.out = fresh_dir("fca_run_plan_serial");
  serial.jobs = 1;
  fca::run_plan(serial);
  for (const auto& c : plan.cells)
    EXPECT_EQ(slurp(plan.out / c.name() / "trace.csv"), slurp(serial.out / c.name() / "trace.csv")) << c.name();
  std::filesystem::remove_all(plan.out);
  std::filesystem::remove_all(serial.out);
}

TEST(RunPlan, FailedCellsAreReportedNotThrown) {
  ExperimentPlan plan;
  plan.problem = "kanzow_steck";
  plan.cells = fca::parse_cells("none,fixed");
  plan.params.max_outer = 20;
  plan.params.warm = false;
  plan.params.x_cold = {-3.0};
  plan.out = fresh_dir("fca_run_plan_fail");
  const auto results = fca::run_plan(plan);
  ASSERT_EQ(results.size(), 1u);
  const auto summary = nlohmann::json::parse(slurp(plan.out / "summary.json"));
  EXPECT_EQ(summary["cells"][0]["failed"], results[0].failed);
  EXPECT_EQ(summary["any_failed"], results[0].failed);
  if (results[0].failed) {
    EXPECT_EQ(summary["cells"][0]["terminal"], "inner_failure");
    EXPECT_TRUE(summary["cells"][0].contains("error"));
  }
  std::filesystem::remove_all(plan.out);
}

TEST(RunPlan, BadPlansFailBeforeWriting) {
  ExperimentPlan plan;
  plan.out = fresh_dir("fca_run_plan_bad");
  plan.params.mu0 = -1.0;
  EXPECT_THROW(fca::run_plan(plan), fca::ParameterError);
  EXPECT_FALSE(std::filesystem::exists(plan.out));
}

// The documented command-line examples, driven through the same settings path.
std::vector<fca::CellResult> run_with(const std::vector<std::pair<std::string, std::string>>& flags,
                                      const std::string& dir) {
  ExperimentPlan plan;
  for (const auto& [k, v] : flags) fca::apply_setting(plan, k, v);
  plan.out = fresh_dir(dir);
  auto results = fca::run_plan(plan);
  std::filesystem::remove_all(plan.out);
  return results;
}

TEST(CliExamples, RegularReferenceMatrix) {
  const auto res = run_with({{"problem", "regular"}, {"cells", "all7"}}, "fca_cli_regular");
  ASSERT_EQ(res.size(), 5u);
  for (const auto& r : res) {
    const bool stalls = r.cell == CellSpec{SafeguardKind::rigid, PenaltyKind::fixed};
    EXPECT_EQ(r.trace.terminal == fca::Terminal::converged, !stalls) << r.cell.name();
  }
}

TEST(CliExamples, KanzowSteckColdStart) {
  const auto res =
      run_with({{"problem", "kanzow_steck"}, {"start", "cold:1.0"}, {"cells", "adaptive"}}, "fca_cli_ks_cold");
  ASSERT_EQ(res.size(), 3u);
  for (const auto& r : res) {
    ASSERT_EQ(r.trace.terminal, fca::Terminal::converged) << r.cell.name();
    EXPECT_NEAR(r.trace.records.back().x[0], 1.0, 1e-6) << r.cell.name();
    EXPECT_NEAR(r.trace.records.back().y[0], 1.0 / 3.0, 1e-6) << r.cell.name();
  }
}

TEST(CliExamples, IrregularClassicalGrowsWithoutBound) {
  const auto res =
      run_with({{"problem", "irregular"}, {"cells", "none,fixed"}, {"max-outer", "2000"}}, "fca_cli_irregular");
  ASSERT_EQ(res.size(), 1u);
  const auto& tr = res[0].trace;
  EXPECT_EQ(tr.terminal, fca::Terminal::iteration_cap);
  ASSERT_EQ(tr.records.size(), 2000u);
  EXPECT_GE(std::abs(tr.records.back().y[0]), 10.0);
  for (std::size_t k = 1; k < tr.records.size(); ++k)
    EXPECT_GT(std::abs(tr.records[k].y[0]), std::abs(tr.records[k - 1].y[0])) << k;
}

} // namespace
