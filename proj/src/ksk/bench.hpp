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

// Benchmark harness: Gaussian consistent systems, paired multi-trial runs,
// mean IT/CPU tables with MWRK-vs-CSK speedups, and median convergence
// traces.

#ifndef KSK_BENCH_HPP_
#define KSK_BENCH_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ksk/matrix.hpp"
#include "ksk/solvers.hpp"

namespace ksk {

struct Problem {
  DenseMatrix a;
  Vector b;
  Vector x_star;
  std::uint64_t seed = 0;
};

// A and x* with i.i.d. standard normal entries (polar method, see rng.hpp),
// drawn from separate streams of the seed; b = A x*. Requires m > n >= 1.
Problem GenerateProblem(std::size_t m, std::size_t n, std::uint64_t seed);

// Seed of trial t of size (m, n): every method of that trial solves the same
// problem.
std::uint64_t TrialSeed(std::uint64_t base_seed, std::size_t m, std::size_t n,
                        std::size_t trial);

struct BenchConfig {
  std::vector<std::pair<std::size_t, std::size_t>> sizes;
  std::vector<Method> methods = {Method::kRK, Method::kGRK, Method::kMWRK,
                                 Method::kCSK};
  std::size_t trials = 50;
  double tol_res = 1e-6;
  std::size_t max_iters = 20000;
  std::size_t explicit_d = 0;  // 0: d = n^2
  std::uint64_t base_seed = 0;
  // With measure_epsilon, every CSK trial also reports epsilon_exact and the
  // suite reports the (1 - delta_report) empirical quantile per size.
  bool measure_epsilon = false;
  double delta_report = 0.1;
  std::size_t trace_every = 1;
  std::size_t threads = 1;
  bool no_timing = false;
};

std::size_t SketchRows(const BenchConfig& cfg, std::size_t n);

struct BenchRow {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t d = 0;
  Method method = Method::kMWRK;
  double mean_it = 0.0;
  double mean_cpu_s = 0.0;
  std::optional<double> it_speedup;
  std::optional<double> cpu_speedup;

  bool operator==(const BenchRow&) const = default;
};

struct TrialRecord {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t trial = 0;
  SolveReport report;
};

struct TracePoint {
  std::size_t iteration = 0;
  double median_res = 0.0;
  double median_cpu_s = 0.0;
};

struct MethodTrace {
  std::size_t m = 0;
  std::size_t n = 0;
  Method method = Method::kMWRK;
  std::vector<TracePoint> points;
};

struct EpsilonQuantile {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t d = 0;
  double quantile = 0.0;  // empirical (1 - delta) quantile of epsilon_exact
  std::size_t samples = 0;
};

struct SuiteResult {
  std::vector<BenchRow> rows;
  std::vector<MethodTrace> traces;
  std::vector<TrialRecord> trials;
  std::vector<EpsilonQuantile> epsilon;
  // Trials that stopped without converging; excluded from speedups.
  std::size_t flagged_trials = 0;
  // One message per (size, method) cell that raised an error.
  std::vector<std::string> failures;
};

SuiteResult RunSuite(const BenchConfig& cfg);

// Mean IT/CPU per (size, method) in size-major, method-minor order. CSK rows
// get speedups against MWRK when both were run, computed over the paired
// trials in which both converged.
std::vector<BenchRow> AggregateRows(const BenchConfig& cfg,
                                    const std::vector<TrialRecord>& trials);

// Median RES and elapsed time per iteration across trials. A trial that
// already stopped contributes its final values.
std::vector<MethodTrace> MedianTraces(const BenchConfig& cfg,
                                      const std::vector<TrialRecord>& trials);

// Header m,n,d,method,mean_it,mean_cpu_s,it_speedup,cpu_speedup; reals with
// six significant digits ("%#.6g"); absent speedups as empty fields.
std::string EmitCsv(const std::vector<BenchRow>& rows);
std::vector<BenchRow> ParseCsv(const std::string& text);

// Header method,iteration,median_res,median_cpu_s.
std::string EmitTraceCsv(const std::vector<MethodTrace>& traces);

// One SolveReport JSON per trial, named <m>x<n>_<method>_<trial>.json.
void WriteTrialArchive(const std::string& dir,
                       const std::vector<TrialRecord>& trials);
std::vector<TrialRecord> ReadTrialArchive(const std::string& dir);

// table.csv, trace CSV(s) and trials/. With a single size the traces go to
// traces.csv; with several, to traces_<m>x<n>.csv per size.
void WriteSuiteOutputs(const std::string& dir, const SuiteResult& result,
                       bool table, bool traces, bool archive);

}  // namespace ksk

#endif  // KSK_BENCH_HPP_
