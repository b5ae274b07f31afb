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

#include "fca/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <thread>

#include "fca/trace_io.hpp"

namespace fca {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double real_value(std::string_view key, std::string_view v) {
  try {
    return parse_real(trim(v));
  } catch (const FormatError&) {
    throw ParameterError("--" + std::string(key) + ": expected a number, got '" + std::string(v) + "'");
  }
}

long long int_value(std::string_view key, std::string_view v) {
  const double d = real_value(key, v);
  if (d != static_cast<double>(static_cast<long long>(d)))
    throw ParameterError("--" + std::string(key) + ": expected an integer, got '" + std::string(v) + "'");
  return static_cast<long long>(d);
}

const char* to_string(SafeguardKind k) {
  switch (k) {
  case SafeguardKind::none: return "none";
  case SafeguardKind::rigid: return "rigid";
  case SafeguardKind::elastic: return "elastic";
  }
  return "?";
}

const char* to_string(PenaltyKind k) {
  switch (k) {
  case PenaltyKind::fixed: return "fixed";
  case PenaltyKind::geometric: return "geometric";
  case PenaltyKind::adaptive: return "adaptive";
  }
  return "?";
}

// JSON has no infinities; non-finite reals are written as null.
nlohmann::json real_json(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json vec_json(const Vec& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(real_json(v[i]));
  return out;
}

} // namespace

std::string CellSpec::name() const { return std::string(to_string(safeguard)) + "_" + to_string(penalty); }

std::vector<CellSpec> reference_cells() {
  using S = SafeguardKind;
  using P = PenaltyKind;
  return {{S::none, P::fixed}, {S::none, P::adaptive}, {S::rigid, P::fixed}, {S::rigid, P::adaptive},
          {S::elastic, P::adaptive}};
}

std::vector<CellSpec> parse_cells(std::string_view text) {
  using S = SafeguardKind;
  using P = PenaltyKind;
  std::vector<CellSpec> cells;
  auto add = [&](CellSpec c) {
    if (std::find(cells.begin(), cells.end(), c) == cells.end()) cells.push_back(c);
  };
  std::string_view rest = trim(text);
  if (rest.empty()) throw ParameterError("--cells: empty cell list");
  while (!rest.empty()) {
    const auto slash = rest.find('/');
    const std::string_view item = trim(rest.substr(0, slash));
    rest = slash == std::string_view::npos ? std::string_view{} : rest.substr(slash + 1);
    if (item == "all" || item == "all7") {
      for (const auto& c : reference_cells()) add(c);
    } else if (item == "fixed") {
      add({S::none, P::fixed});
      add({S::rigid, P::fixed});
    } else if (item == "adaptive") {
      add({S::none, P::adaptive});
      add({S::rigid, P::adaptive});
      add({S::elastic, P::adaptive});
    } else {
      const auto comma = item.find(',');
      if (comma == std::string_view::npos) throw ParameterError("--cells: unknown cell '" + std::string(item) + "'");
      const auto mode = trim(item.substr(0, comma)), pen = trim(item.substr(comma + 1));
      CellSpec c;
      if (mode == "none" || mode == "classical") c.safeguard = S::none;
      else if (mode == "rigid") c.safeguard = S::rigid;
      else if (mode == "elastic") c.safeguard = S::elastic;
      else throw ParameterError("--cells: unknown safeguard mode '" + std::string(mode) + "'");
      if (pen == "fixed") c.penalty = P::fixed;
      else if (pen == "geometric") c.penalty = P::geometric;
      else if (pen == "adaptive") c.penalty = P::adaptive;
      else throw ParameterError("--cells: unknown penalty rule '" + std::string(pen) + "'");
      if (c.safeguard == S::elastic && c.penalty != P::adaptive)
        throw ParameterError("--cells: the elastic safeguard requires the adaptive penalty rule");
      add(c);
    }
  }
  return cells;
}

void apply_setting(ExperimentPlan& plan, std::string_view key, std::string_view value) {
  auto& q = plan.params;
  const std::string_view v = trim(value);
  if (key == "problem") {
    if (v.starts_with("box_qp(") && v.ends_with(")")) {
      const auto inner = v.substr(7, v.size() - 8);
      const auto comma = inner.find(',');
      if (comma == std::string_view::npos) throw ParameterError("--problem: expected box_qp(n,m)");
      plan.qp_n = int_value(key, inner.substr(0, comma));
      plan.qp_m = int_value(key, inner.substr(comma + 1));
      plan.problem = "box_qp";
    } else {
      plan.problem = std::string(v);
    }
  } else if (key == "cells") plan.cells = parse_cells(v);
  else if (key == "mu0") q.mu0 = real_value(key, v);
  else if (key == "beta") q.beta = real_value(key, v);
  else if (key == "theta") q.theta = real_value(key, v);
  else if (key == "eta") q.eta = real_value(key, v);
  else if (key == "ysg-max") q.ysg_max = real_value(key, v);
  else if (key == "eps0") q.eps0 = real_value(key, v);
  else if (key == "kappa-eps") q.kappa_eps = real_value(key, v);
  else if (key == "eps-floor") q.eps_floor = real_value(key, v);
  else if (key == "tol") q.tol = real_value(key, v);
  else if (key == "dual-blowup") q.dual_blowup = real_value(key, v);
  else if (key == "max-outer") {
    const auto n = int_value(key, v);
    if (n < 1 || n > 100000000) throw ParameterError("--max-outer: out of range");
    q.max_outer = static_cast<int>(n);
  } else if (key == "start") {
    if (v == "warm") {
      q.warm = true;
      q.x_cold.clear();
    } else if (v.starts_with("cold:")) {
      q.warm = false;
      q.x_cold.clear();
      std::string_view rest = v.substr(5);
      for (;;) {
        const auto semi = rest.find(';');
        q.x_cold.push_back(real_value(key, rest.substr(0, semi)));
        if (semi == std::string_view::npos) break;
        rest = rest.substr(semi + 1);
      }
    } else {
      throw ParameterError("--start: expected 'warm' or 'cold:<x>'");
    }
  } else if (key == "out") plan.out = std::string(v);
  else if (key == "jobs") {
    const auto n = int_value(key, v);
    if (n < 1 || n > 1024) throw ParameterError("--jobs: out of range");
    plan.jobs = static_cast<int>(n);
  } else if (key == "seed") {
    const auto n = int_value(key, v);
    if (n < 0) throw ParameterError("--seed: must be nonnegative");
    q.seed = static_cast<std::uint64_t>(n);
  } else {
    throw ParameterError("unknown setting '" + std::string(key) + "'");
  }
}

std::vector<std::pair<std::string, std::string>> parse_config(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  int lineno = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParameterError("config line " + std::to_string(lineno) + ": expected key=value");
    auto key = trim(line.substr(0, eq));
    if (key.starts_with("--")) key.remove_prefix(2);
    out.emplace_back(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return out;
}

ProblemSpec plan_problem(const ExperimentPlan& plan) {
  return builtin_problem(plan.problem, plan.qp_n, plan.qp_m, plan.params.seed);
}

AlmConfig make_alm_config(const ProblemSpec& p, const CellSpec& cell, const ExperimentParams& q) {
  AlmConfig cfg;
  const auto box = [&] { return SafeguardSet::symmetric_box(p.dim_c, q.ysg_max); };
  switch (cell.safeguard) {
  case SafeguardKind::none: cfg.mode = ClassicalMode{}; break;
  case SafeguardKind::rigid: cfg.mode = RigidMode{box()}; break;
  case SafeguardKind::elastic:
    if (cell.penalty != PenaltyKind::adaptive)
      throw ParameterError("the elastic safeguard requires the adaptive penalty rule");
    cfg.mode = ElasticParams(q.theta, q.eta, q.beta, box());
    break;
  }
  switch (cell.penalty) {
  case PenaltyKind::fixed: cfg.penalty = PenaltyRule::fixed(); break;
  case PenaltyKind::geometric: cfg.penalty = PenaltyRule::geometric(q.beta); break;
  case PenaltyKind::adaptive: cfg.penalty = PenaltyRule::adaptive(q.beta, q.theta); break;
  }
  cfg.mu0 = q.mu0;
  cfg.y0 = Vec::Zero(p.dim_c);
  cfg.x0 = Vec::Zero(p.dim_x);
  cfg.eps = EpsSchedule::practical(q.eps0, q.kappa_eps, q.eps_floor);
  cfg.termination = {q.tol, q.tol, q.max_outer, q.dual_blowup};
  if (!q.warm) {
    if (q.x_cold.size() == 1) cfg.start = StartPolicy::cold_start(Vec::Constant(p.dim_x, q.x_cold[0]));
    else if (static_cast<Index>(q.x_cold.size()) == p.dim_x)
      cfg.start = StartPolicy::cold_start(Eigen::Map<const Vec>(q.x_cold.data(), p.dim_x));
    else throw ParameterError("--start: cold point has wrong dimension");
  }
  return cfg;
}

std::vector<CellResult> run_plan(const ExperimentPlan& plan) {
  const ProblemSpec p = plan_problem(plan);
  std::vector<AlmConfig> configs;  // validated up front so that bad plans fail before any output
  for (const auto& c : plan.cells) {
    configs.push_back(make_alm_config(p, c, plan.params));
    validate_config(p, configs.back());
  }

  std::filesystem::create_directories(plan.out);
  std::vector<CellResult> results(plan.cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < plan.cells.size();) {
      CellResult& r = results[i];
      r.cell = plan.cells[i];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        r.trace = run_alm(p, configs[i]);
        r.failed = r.trace.terminal == Terminal::inner_failure;
        if (r.failed) r.error = r.trace.message;
      } catch (const std::exception& e) {
        r.failed = true;
        r.trace.terminal = Terminal::inner_failure;
        r.error = e.what();
      }
      r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const auto dir = plan.out / r.cell.name();
      std::filesystem::create_directories(dir);
      write_file_atomic(dir / "trace.csv", trace_csv(r.trace.records));
      r.csv = r.cell.name() + "/trace.csv";
    }
  };
  const int n = std::max(1, std::min<int>(plan.jobs, static_cast<int>(plan.cells.size())));
  std::vector<std::jthread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();

  write_file_atomic(plan.out / "summary.json", summary_json(plan, results).dump(2) + "\n");
  return results;
}

nlohmann::json summary_json(const ExperimentPlan& plan, const std::vector<CellResult>& results) {
  const auto& q = plan.params;
  nlohmann::json params = {{"mu0", q.mu0},
                           {"beta", q.beta},
                           {"theta", q.theta},
                           {"eta", q.eta},
                           {"ysg_max", q.ysg_max},
                           {"eps0", q.eps0},
                           {"kappa_eps", q.kappa_eps},
                           {"eps_floor", q.eps_floor},
                           {"tol", q.tol},
                           {"max_outer", q.max_outer},
                           {"dual_blowup", q.dual_blowup},
                           {"start", q.warm ? nlohmann::json("warm") : nlohmann::json(q.x_cold)},
                           {"seed", q.seed}};
  if (plan.problem == "box_qp") {
    params["qp_n"] = plan.qp_n;
    params["qp_m"] = plan.qp_m;
  }
  nlohmann::json cells = nlohmann::json::array();
  bool any_failed = false;
  for (const auto& r : results) {
    any_failed = any_failed || r.failed;
    nlohmann::json c = {{"cell", r.cell.name()},
                        {"safeguard", to_string(r.cell.safeguard)},
                        {"penalty", to_string(r.cell.penalty)},
                        {"terminal", std::string(to_string(r.trace.terminal))},
                        {"iters", r.trace.records.size()},
                        {"wall_time_s", r.wall_time_s},
                        {"failed", r.failed},
                        {"penalty_decreases", r.trace.penalty_decreases()},
                        {"csv", r.csv}};
    if (!r.trace.records.empty()) {
      const auto& last = r.trace.records.back();
      c["final_x"] = vec_json(last.x);
      c["final_y"] = vec_json(last.y);
      c["final_mu"] = real_json(last.mu);
      c["final_rho"] = real_json(last.rho);
      c["final_V"] = real_json(last.V_eucl);
    } else {
      c["final_x"] = c["final_y"] = nlohmann::json::array();
      c["final_mu"] = c["final_rho"] = c["final_V"] = nullptr;
    }
    if (!r.error.empty()) c["error"] = r.error;
    cells.push_back(std::move(c));
  }
  return {{"problem", plan.problem}, {"parameters", params}, {"cells", cells}, {"any_failed", any_failed}};
}

} // namespace fca
