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

#include "fca/trace_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "fca/kernels.hpp"

namespace fca {
namespace {

constexpr std::array<std::string_view, 13> kColumns = {"k",      "x",      "z",     "y",      "yhat",
                                                       "mu",     "rho",    "eps",   "V_eucl", "V_inf",
                                                       "inner_iters", "stat_res", "certified"};

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

void put_vec(std::string& out, const Vec& v) {
  for (Index i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += format_real(v[i]);
  }
}

Vec get_vec(std::string_view s) {
  const auto parts = split(s, ';');
  Vec v(static_cast<Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v[static_cast<Index>(i)] = parse_real(parts[i]);
  return v;
}

int get_int(std::string_view s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw FormatError("not an integer: '" + std::string(s) + "'");
  return v;
}

} // namespace

std::string format_real(double v) {
  std::array<char, 32> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_real(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw FormatError("not a real number: '" + std::string(s) + "'");
  return v;
}

void write_trace_csv(std::ostream& os, const std::vector<IterationRecord>& records) {
  std::string line;
  os << kTraceHeader << '\n';
  for (const auto& r : records) {
    line.clear();
    line += std::to_string(r.k);
    for (const Vec* v : {&r.x, &r.z, &r.y, &r.yhat}) {
      line += ',';
      put_vec(line, *v);
    }
    for (double d : {r.mu, r.rho, r.eps, r.V_eucl, r.V_inf}) {
      line += ',';
      line += format_real(d);
    }
    line += ',';
    line += std::to_string(r.inner_iters);
    line += ',';
    line += format_real(r.stat_res);
    line += r.certified ? ",1" : ",0";
    os << line << '\n';
  }
}

std::string trace_csv(const std::vector<IterationRecord>& records) {
  std::ostringstream os;
  write_trace_csv(os, records);
  return os.str();
}

std::vector<IterationRecord> read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("empty trace: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line, ',');
  for (std::size_t i = 0; i < kColumns.size(); ++i) {
    if (i >= header.size()) throw FormatError("missing column '" + std::string(kColumns[i]) + "'");
    if (header[i] != kColumns[i])
      throw FormatError("column " + std::to_string(i + 1) + " is '" + std::string(header[i]) + "', expected '" +
                        std::string(kColumns[i]) + "'");
  }
  if (header.size() != kColumns.size()) throw FormatError("unexpected extra column '" + std::string(header[13]) + "'");

  std::vector<IterationRecord> out;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != kColumns.size())
      throw FormatError("line " + std::to_string(lineno) + ": expected 13 fields, got " + std::to_string(f.size()));
    std::size_t col = 0;
    try {
      IterationRecord r;
      r.k = get_int(f[col]);
      r.x = get_vec(f[++col]);
      r.z = get_vec(f[++col]);
      r.y = get_vec(f[++col]);
      r.yhat = get_vec(f[++col]);
      r.mu = parse_real(f[++col]);
      r.rho = parse_real(f[++col]);
      r.eps = parse_real(f[++col]);
      r.V_eucl = parse_real(f[++col]);
      r.V_inf = parse_real(f[++col]);
      r.inner_iters = get_int(f[++col]);
      r.stat_res = parse_real(f[++col]);
      ++col;
      if (f[col] != "0" && f[col] != "1") throw FormatError("expected 0 or 1");
      r.certified = f[col] == "1";
      out.push_back(std::move(r));
    } catch (const FormatError& e) {
      throw FormatError("line " + std::to_string(lineno) + ", column '" + std::string(kColumns[col]) +
                        "': " + e.what());
    }
  }
  return out;
}

std::vector<IterationRecord> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open " + path.string());
  try {
    return read_trace_csv(is);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

TraceStats trace_stats(const std::vector<IterationRecord>& records) {
  TraceStats s;
  if (records.empty()) return s;
  const auto& last = records.back();
  s.iters = static_cast<int>(records.size());
  s.final_V = last.V_eucl;
  s.final_mu = last.mu;
  s.final_rho = last.rho;
  s.final_y_norm = norm2(last.y);
  s.all_certified = std::all_of(records.begin(), records.end(), [](const auto& r) { return r.certified; });
  for (std::size_t i = 1; i < records.size(); ++i) s.penalty_decreases += records[i].mu < records[i - 1].mu;
  const std::size_t tail = records.size() - std::max<std::size_t>(1, records.size() / 5);
  s.tail_mu_y_min = kInf;
  s.tail_mu_y_max = 0.0;
  for (std::size_t i = tail; i < records.size(); ++i) {
    const double v = records[i].mu * norm2(records[i].y);
    s.tail_mu_y_min = std::min(s.tail_mu_y_min, v);
    s.tail_mu_y_max = std::max(s.tail_mu_y_max, v);
  }
  return s;
}

} // namespace fca
