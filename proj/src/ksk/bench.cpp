// Copyright 2026 The ksk Authors
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

#include "ksk/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "ksk/error.hpp"
#include "ksk/rng.hpp"

namespace ksk {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kMatrixStream = 0x41;    // 'A'
constexpr std::uint64_t kSolutionStream = 0x78;  // 'x'

double Median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::string FormatReal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%#.6g", v);
  return buf;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  Require(in.is_open(), ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Require(out.is_open(), ErrorCode::kIo,
          "cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  Require(!out.fail(), ErrorCode::kIo, "failed writing '" + path.string() + "'");
}

std::vector<std::string> SplitFields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool Converged(const SolveReport& r) {
  return r.termination == Termination::kConverged;
}

}  // namespace

Problem GenerateProblem(std::size_t m, std::size_t n, std::uint64_t seed) {
  Require(n >= 1 && m > n, ErrorCode::kInvalidArgument,
          "problem generation needs m > n >= 1 (got m=" + std::to_string(m) +
              ", n=" + std::to_string(n) + ")");
  Rng matrix_rng(MixSeed({seed, kMatrixStream}));
  Rng solution_rng(MixSeed({seed, kSolutionStream}));
  std::vector<double> data(m * n);
  for (double& v : data) v = matrix_rng.Normal();
  Problem p;
  p.a = DenseMatrix(m, n, std::move(data));
  p.x_star.resize(n);
  for (double& v : p.x_star) v = solution_rng.Normal();
  p.b = MatVec(p.a, p.x_star);
  p.seed = seed;
  return p;
}

std::uint64_t TrialSeed(std::uint64_t base_seed, std::size_t m, std::size_t n,
                        std::size_t trial) {
  return MixSeed({base_seed, m, n, trial});
}

std::size_t SketchRows(const BenchConfig& cfg, std::size_t n) {
  return cfg.explicit_d != 0 ? cfg.explicit_d : n * n;
}

SuiteResult RunSuite(const BenchConfig& cfg) {
  Require(cfg.trials >= 1, ErrorCode::kInvalidArgument, "trials must be >= 1");
  Require(!cfg.sizes.empty(), ErrorCode::kInvalidArgument, "no sizes given");
  Require(!cfg.methods.empty(), ErrorCode::kInvalidArgument, "no methods given");
  Require(cfg.delta_report > 0.0 && cfg.delta_report < 1.0,
          ErrorCode::kInvalidArgument, "delta_report must lie in (0, 1)");
  for (const auto& [m, n] : cfg.sizes) {
    Require(n >= 1 && m > n, ErrorCode::kInvalidArgument,
            "every size needs m > n >= 1");
  }

  const std::size_t num_methods = cfg.methods.size();
  const std::size_t cells = cfg.sizes.size() * cfg.trials;
  // reports[cell * num_methods + method]
  std::vector<std::optional<SolveReport>> reports(cells * num_methods);
  std::map<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, std::string>>
      errors;  // (size, method) -> (first failing trial, message)
  std::mutex errors_mutex;

  auto run_cell = [&](std::size_t cell) {
    const std::size_t size_index = cell / cfg.trials;
    const std::size_t trial = cell % cfg.trials;
    const auto [m, n] = cfg.sizes[size_index];
    const std::uint64_t seed = TrialSeed(cfg.base_seed, m, n, trial);
    const Problem problem = GenerateProblem(m, n, seed);
    for (std::size_t k = 0; k < num_methods; ++k) {
      SolverConfig sc;
      sc.method = cfg.methods[k];
      sc.tol_res = cfg.tol_res;
      sc.max_iters = cfg.max_iters;
      sc.seed = MixSeed({seed, static_cast<std::uint64_t>(sc.method)});
      sc.trace_every = cfg.trace_every;
      if (sc.method == Method::kCSK) {
        sc.d = SketchRows(cfg, n);
        sc.compute_epsilon = cfg.measure_epsilon;
      }
      try {
        SolveInputs inputs;
        inputs.x_star = problem.x_star;
        SolveReport report = Solve(problem.a, problem.b, sc, inputs);
        report.x.clear();
        if (cfg.no_timing) {
          report.wall_time_s = 0.0;
          std::fill(report.time_trace.begin(), report.time_trace.end(), 0.0);
        }
        reports[cell * num_methods + k] = std::move(report);
      } catch (const Error& e) {
        std::lock_guard lock(errors_mutex);
        auto& slot = errors[{size_index, k}];
        if (slot.second.empty() || trial < slot.first) slot = {trial, e.what()};
      }
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(cfg.threads, 1, cells);
  if (threads == 1) {
    for (std::size_t c = 0; c < cells; ++c) run_cell(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        try {
          for (std::size_t c = next++; c < cells; c = next++) run_cell(c);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }

  SuiteResult result;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    const std::size_t size_index = cell / cfg.trials;
    for (std::size_t k = 0; k < num_methods; ++k) {
      auto& slot = reports[cell * num_methods + k];
      if (!slot) continue;
      if (!Converged(*slot)) ++result.flagged_trials;
      result.trials.push_back({cfg.sizes[size_index].first,
                               cfg.sizes[size_index].second, cell % cfg.trials,
                               std::move(*slot)});
    }
  }
  for (const auto& [key, value] : errors) {
    const auto [m, n] = cfg.sizes[key.first];
    result.failures.push_back(std::to_string(m) + "x" + std::to_string(n) + " " +
                              std::string(MethodName(cfg.methods[key.second])) +
                              ": " + value.second);
  }

  result.rows = AggregateRows(cfg, result.trials);
  result.traces = MedianTraces(cfg, result.trials);

  if (cfg.measure_epsilon) {
    for (const auto& [m, n] : cfg.sizes) {
      std::vector<double> eps;
      for (const auto& t : result.trials) {
        if (t.m == m && t.n == n && t.report.epsilon_exact)
          eps.push_back(*t.report.epsilon_exact);
      }
      if (eps.empty()) continue;
      std::sort(eps.begin(), eps.end());
      const auto rank = static_cast<std::size_t>(
          std::ceil((1.0 - cfg.delta_report) * static_cast<double>(eps.size())));
      const std::size_t idx = std::min(eps.size() - 1, rank == 0 ? 0 : rank - 1);
      result.epsilon.push_back({m, n, SketchRows(cfg, n), eps[idx], eps.size()});
    }
  }
  return result;
}

std::vector<BenchRow> AggregateRows(const BenchConfig& cfg,
                                    const std::vector<TrialRecord>& trials) {
  std::vector<BenchRow> rows;
  for (const auto& [m, n] : cfg.sizes) {
    // trial index -> report, per method
    std::map<Method, std::map<std::size_t, const SolveReport*>> by_method;
    for (const auto& t : trials) {
      if (t.m == m && t.n == n) by_method[t.report.method][t.trial] = &t.report;
    }
    for (Method method : cfg.methods) {
      const auto found = by_method.find(method);
      if (found == by_method.end() || found->second.empty()) continue;
      BenchRow row;
      row.m = m;
      row.n = n;
      row.d = SketchRows(cfg, n);
      row.method = method;
      for (const auto& [trial, report] : found->second) {
        row.mean_it += static_cast<double>(report->iterations);
        row.mean_cpu_s += report->wall_time_s;
      }
      const auto count = static_cast<double>(found->second.size());
      row.mean_it /= count;
      row.mean_cpu_s /= count;

      const auto mwrk = by_method.find(Method::kMWRK);
      if (method == Method::kCSK && mwrk != by_method.end()) {
        double it_csk = 0, it_mwrk = 0, cpu_csk = 0, cpu_mwrk = 0;
        std::size_t paired = 0;
        for (const auto& [trial, csk] : found->second) {
          const auto other = mwrk->second.find(trial);
          if (other == mwrk->second.end()) continue;
          if (!Converged(*csk) || !Converged(*other->second)) continue;
          it_csk += static_cast<double>(csk->iterations);
          it_mwrk += static_cast<double>(other->second->iterations);
          cpu_csk += csk->wall_time_s;
          cpu_mwrk += other->second->wall_time_s;
          ++paired;
        }
        if (paired > 0 && it_csk > 0) row.it_speedup = it_mwrk / it_csk;
        if (paired > 0) {
          row.cpu_speedup = cpu_csk > 0 ? cpu_mwrk / cpu_csk : 0.0;
        }
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<MethodTrace> MedianTraces(const BenchConfig& cfg,
                                      const std::vector<TrialRecord>& trials) {
  std::vector<MethodTrace> out;
  for (const auto& [m, n] : cfg.sizes) {
    for (Method method : cfg.methods) {
      std::vector<const SolveReport*> group;
      for (const auto& t : trials) {
        if (t.m == m && t.n == n && t.report.method == method)
          group.push_back(&t.report);
      }
      if (group.empty()) continue;
      std::set<std::size_t> iterations;
      for (const auto* r : group)
        for (const auto& [it, res] : r->res_trace) iterations.insert(it);

      MethodTrace trace{m, n, method, {}};
      std::vector<std::size_t> cursor(group.size(), 0);
      for (std::size_t it : iterations) {
        std::vector<double> res, cpu;
        for (std::size_t g = 0; g < group.size(); ++g) {
          const auto& rt = group[g]->res_trace;
          while (cursor[g] + 1 < rt.size() && rt[cursor[g] + 1].first <= it)
            ++cursor[g];
          res.push_back(rt[cursor[g]].second);
          const auto& tt = group[g]->time_trace;
          cpu.push_back(cursor[g] < tt.size() ? tt[cursor[g]] : 0.0);
        }
        trace.points.push_back({it, Median(res), Median(cpu)});
      }
      out.push_back(std::move(trace));
    }
  }
  return out;
}

std::string EmitCsv(const std::vector<BenchRow>& rows) {
  std::string out = "m,n,d,method,mean_it,mean_cpu_s,it_speedup,cpu_speedup\n";
  for (const auto& r : rows) {
    out += std::to_string(r.m) + ',' + std::to_string(r.n) + ',' +
           std::to_string(r.d) + ',' + std::string(MethodName(r.method)) + ',' +
           FormatReal(r.mean_it) + ',' + FormatReal(r.mean_cpu_s) + ',' +
           (r.it_speedup ? FormatReal(*r.it_speedup) : "") + ',' +
           (r.cpu_speedup ? FormatReal(*r.cpu_speedup) : "") + '\n';
  }
  return out;
}

std::vector<BenchRow> ParseCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Require(static_cast<bool>(std::getline(in, line)) &&
              line == "m,n,d,method,mean_it,mean_cpu_s,it_speedup,cpu_speedup",
          ErrorCode::kIo, "bad bench CSV header");
  std::vector<BenchRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = SplitFields(line);
    Require(f.size() == 8, ErrorCode::kIo, "bad bench CSV row: " + line);
    try {
      BenchRow r;
      r.m = std::stoull(f[0]);
      r.n = std::stoull(f[1]);
      r.d = std::stoull(f[2]);
      r.method = ParseMethod(f[3]);
      r.mean_it = std::stod(f[4]);
      r.mean_cpu_s = std::stod(f[5]);
      if (!f[6].empty()) r.it_speedup = std::stod(f[6]);
      if (!f[7].empty()) r.cpu_speedup = std::stod(f[7]);
      rows.push_back(r);
    } catch (const std::logic_error&) {
      Fail(ErrorCode::kIo, "bad bench CSV row: " + line);
    }
  }
  return rows;
}

std::string EmitTraceCsv(const std::vector<MethodTrace>& traces) {
  std::string out = "method,iteration,median_res,median_cpu_s\n";
  char buf[128];
  for (const auto& t : traces) {
    for (const auto& p : t.points) {
      std::snprintf(buf, sizeof buf, "%s,%zu,%.6e,%.6e\n",
                    std::string(MethodName(t.method)).c_str(), p.iteration,
                    p.median_res, p.median_cpu_s);
      out += buf;
    }
  }
  return out;
}

void WriteTrialArchive(const std::string& dir,
                       const std::vector<TrialRecord>& trials) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  Require(!ec, ErrorCode::kIo, "cannot create '" + dir + "': " + ec.message());
  for (const auto& t : trials) {
    const std::string name = std::to_string(t.m) + "x" + std::to_string(t.n) +
                             "_" + std::string(MethodName(t.report.method)) +
                             "_" + std::to_string(t.trial) + ".json";
    WriteFile(fs::path(dir) / name, ToJson(t.report) + "\n");
  }
}

std::vector<TrialRecord> ReadTrialArchive(const std::string& dir) {
  std::vector<TrialRecord> trials;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    TrialRecord t;
    const std::string stem = path.stem().string();
    unsigned long long m = 0, n = 0, trial = 0;
    char method[16] = {};
    Require(std::sscanf(stem.c_str(), "%llux%llu_%15[a-z]_%llu", &m, &n, method,
                        &trial) == 4,
            ErrorCode::kIo, "unexpected trial file name '" + stem + "'");
    t.m = m;
    t.n = n;
    t.trial = trial;
    t.report = SolveReportFromJson(ReadFile(path));
    Require(MethodName(t.report.method) == method, ErrorCode::kIo,
            "method in '" + stem + "' does not match its contents");
    trials.push_back(std::move(t));
  }
  return trials;
}

void WriteSuiteOutputs(const std::string& dir, const SuiteResult& result,
                       bool table, bool traces, bool archive) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  Require(!ec, ErrorCode::kIo, "cannot create '" + dir + "': " + ec.message());
  if (table) WriteFile(fs::path(dir) / "table.csv", EmitCsv(result.rows));
  if (traces) {
    std::vector<std::pair<std::size_t, std::size_t>> sizes;
    for (const auto& t : result.traces) {
      if (std::find(sizes.begin(), sizes.end(), std::pair{t.m, t.n}) == sizes.end())
        sizes.emplace_back(t.m, t.n);
    }
    if (sizes.size() <= 1) {
      WriteFile(fs::path(dir) / "traces.csv", EmitTraceCsv(result.traces));
    } else {
      for (const auto& [m, n] : sizes) {
        std::vector<MethodTrace> subset;
        for (const auto& t : result.traces)
          if (t.m == m && t.n == n) subset.push_back(t);
        WriteFile(fs::path(dir) / ("traces_" + std::to_string(m) + "x" +
                                   std::to_string(n) + ".csv"),
                  EmitTraceCsv(subset));
      }
    }
  }
  if (archive) WriteTrialArchive((fs::path(dir) / "trials").string(), result.trials);
}

}  // namespace ksk
