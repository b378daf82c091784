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

// ksk command-line front end. Talks to the library only through ksk.h.
//
// Exit codes: 0 success / converged, 1 usage or input error, 2 solver hit
// max iterations or stagnated, 3 some bench cells failed, 4 embedding check
// exceeded its failure budget.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ksk/ksk.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitPartialBench = 3;
constexpr int kExitEmbedFail = 4;

struct MatrixDeleter {
  void operator()(ksk_matrix* m) const { ksk_matrix_destroy(m); }
};
struct SketchDeleter {
  void operator()(ksk_sketch* s) const { ksk_sketch_destroy(s); }
};
struct ReportDeleter {
  void operator()(ksk_report* r) const { ksk_report_destroy(r); }
};
struct StringDeleter {
  void operator()(char* s) const { ksk_string_free(s); }
};
using Matrix = std::unique_ptr<ksk_matrix, MatrixDeleter>;
using Sketch = std::unique_ptr<ksk_sketch, SketchDeleter>;
using Report = std::unique_ptr<ksk_report, ReportDeleter>;
using CString = std::unique_ptr<char, StringDeleter>;

// Thrown to unwind to main with an exit code after printing a diagnostic.
struct ExitError {
  int code;
};

void Check(ksk_status status, const std::string& context) {
  if (status == KSK_OK) return;
  std::fprintf(stderr, "ksk: %s: %s\n", context.c_str(), ksk_last_error());
  throw ExitError{kExitInput};
}

[[noreturn]] void Usage(const std::string& message) {
  std::fprintf(stderr, "ksk: %s\n", message.c_str());
  throw ExitError{kExitInput};
}

Matrix Load(const std::string& path) {
  ksk_matrix* m = nullptr;
  Check(ksk_matrix_load(path.c_str(), &m), "loading " + path);
  return Matrix(m);
}

std::string Real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::size_t EnvThreads() {
  const char* env = std::getenv("KSK_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const unsigned long v = std::strtoul(env, &end, 10);
  if (*end != '\0' || v == 0) Usage("KSK_THREADS must be a positive integer");
  return v;
}

std::vector<ksk_method> ParseMethods(const std::string& list) {
  std::vector<ksk_method> methods;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    ksk_method m;
    Check(ksk_method_parse(item.c_str(), &m), "--methods");
    methods.push_back(m);
  }
  if (methods.empty()) Usage("--methods is empty");
  return methods;
}

void ParseSizes(const std::string& list, std::vector<size_t>& ms,
                std::vector<size_t>& ns) {
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    unsigned long long m = 0, n = 0;
    char tail = 0;
    if (std::sscanf(item.c_str(), "%llux%llu%c", &m, &n, &tail) != 2)
      Usage("bad size '" + item + "' (expected MxN)");
    ms.push_back(m);
    ns.push_back(n);
  }
  if (ms.empty()) Usage("--sizes is empty");
}

// ---- gen -------------------------------------------------------------------

struct GenArgs {
  size_t m = 0, n = 0;
  uint64_t seed = 0;
  std::string out;
  std::string format = "binary";
};

int RunGen(const GenArgs& args) {
  ksk_matrix *a = nullptr, *b = nullptr, *x = nullptr;
  Check(ksk_generate_problem(args.m, args.n, args.seed, &a, &b, &x), "gen");
  Matrix ma(a), mb(b), mx(x);
  std::error_code ec;
  std::filesystem::create_directories(args.out, ec);
  if (ec) {
    std::fprintf(stderr, "ksk: cannot create '%s': %s\n", args.out.c_str(),
                 ec.message().c_str());
    return kExitInput;
  }
  const bool mm = args.format == "mm";
  const ksk_format fmt = mm ? KSK_FORMAT_MATRIX_MARKET : KSK_FORMAT_BINARY;
  const std::string ext = mm ? ".mtx" : ".kskm";
  const auto dir = std::filesystem::path(args.out);
  for (auto [name, mat] : {std::pair{"A", ma.get()}, std::pair{"b", mb.get()},
                           std::pair{"xstar", mx.get()}}) {
    const std::string path = (dir / (std::string(name) + ext)).string();
    Check(ksk_matrix_save(mat, path.c_str(), fmt), "writing " + path);
  }
  std::printf("seed: %llu\n", static_cast<unsigned long long>(args.seed));
  std::printf("m: %zu\nn: %zu\n", args.m, args.n);
  return kExitOk;
}

// ---- solve -----------------------------------------------------------------

struct SolveArgs {
  std::string a, b, xstar, x0, report, solution;
  std::string method = "csk";
  double tol = 1e-6;
  size_t max_iters = 20000;
  uint64_t seed = 0;
  size_t d = 0;
  double theta = -1.0;
  size_t trace_every = 1;
  size_t recompute_every = 1000;
  bool epsilon = false;
  bool check = false;
};

int RunCheck(const SolveArgs& args) {
  if (args.xstar.empty()) Usage("--check needs --xstar");
  Matrix a = Load(args.a), b = Load(args.b), x = Load(args.xstar);
  ksk_matrix* ax = nullptr;
  Check(ksk_matrix_matvec(a.get(), x.get(), &ax), "check");
  Matrix prod(ax);
  const size_t len = ksk_matrix_rows(prod.get()) * ksk_matrix_cols(prod.get());
  if (len != ksk_matrix_rows(b.get()) * ksk_matrix_cols(b.get()))
    Usage("check: b length does not match A rows");
  const double* p = ksk_matrix_data(prod.get());
  const double* q = ksk_matrix_data(b.get());
  size_t mismatches = 0;
  double worst = 0.0;
  for (size_t i = 0; i < len; ++i) {
    if (p[i] != q[i]) ++mismatches;
    worst = std::max(worst, std::abs(p[i] - q[i]));
  }
  std::printf("check: %s\nmismatched_entries: %zu\nmax_abs_diff: %s\n",
              mismatches == 0 ? "consistent" : "inconsistent", mismatches,
              Real(worst).c_str());
  return mismatches == 0 ? kExitOk : kExitInput;
}

int RunSolve(const SolveArgs& args) {
  if (args.check) return RunCheck(args);
  ksk_solver_config cfg;
  ksk_solver_config_init(&cfg);
  Check(ksk_method_parse(args.method.c_str(), &cfg.method), "--method");
  if (args.d != 0 && cfg.method != KSK_METHOD_CSK) Usage("d applies to csk only");
  if (args.theta >= 0.0 && cfg.method != KSK_METHOD_RGRK)
    Usage("theta applies to rgrk only");
  if (args.epsilon && cfg.method != KSK_METHOD_CSK)
    Usage("--epsilon applies to csk only");
  if (args.report.empty()) Usage("--report is required");
  cfg.tol_res = args.tol;
  cfg.max_iters = args.max_iters;
  cfg.seed = args.seed;
  cfg.d = args.d;
  if (args.theta >= 0.0) cfg.theta = args.theta;
  cfg.trace_every = args.trace_every;
  cfg.recompute_every = args.recompute_every;
  cfg.compute_epsilon = args.epsilon ? 1 : 0;

  Matrix a = Load(args.a), b = Load(args.b);
  Matrix x0, xs;
  if (!args.x0.empty()) x0 = Load(args.x0);
  if (!args.xstar.empty()) xs = Load(args.xstar);

  ksk_report* raw = nullptr;
  Check(ksk_solve(a.get(), b.get(), x0.get(), xs.get(), &cfg, &raw), "solve");
  Report report(raw);

  char* json = nullptr;
  Check(ksk_report_to_json(report.get(), &json), "report");
  CString owned(json);
  std::ofstream out(args.report, std::ios::trunc);
  out << owned.get() << '\n';
  out.close();
  if (!out) {
    std::fprintf(stderr, "ksk: cannot write '%s'\n", args.report.c_str());
    return kExitInput;
  }
  if (!args.solution.empty()) {
    ksk_matrix* sol = nullptr;
    Check(ksk_report_solution(report.get(), &sol), "solution");
    Matrix s(sol);
    Check(ksk_matrix_save(s.get(), args.solution.c_str(), KSK_FORMAT_BINARY),
          "writing " + args.solution);
  }

  const ksk_termination term = ksk_report_termination(report.get());
  static const char* kNames[] = {"Converged", "MaxIters", "Stagnated"};
  std::printf("method: %s\ntermination: %s\niterations: %zu\nfinal_res: %s\n",
              ksk_method_name(cfg.method), kNames[term],
              ksk_report_iterations(report.get()),
              Real(ksk_report_final_res(report.get())).c_str());
  return term == KSK_CONVERGED ? kExitOk : kExitNotConverged;
}

// ---- bench / trace ---------------------------------------------------------

struct BenchArgs {
  std::string sizes;
  size_t m = 0, n = 0;  // trace
  std::string methods = "rk,grk,mwrk,csk";
  size_t trials = 50;
  uint64_t seed = 0;
  std::string out_dir;
  double tol = 1e-6;
  size_t max_iters = 20000;
  size_t d = 0;
  size_t trace_every = 1;
  bool no_timing = false;
  bool measure_epsilon = false;
  double delta = 0.1;
};

int RunBench(const BenchArgs& args, unsigned outputs) {
  std::vector<size_t> ms, ns;
  if (outputs == KSK_BENCH_TRACES) {
    ms.push_back(args.m);
    ns.push_back(args.n);
  } else {
    ParseSizes(args.sizes, ms, ns);
  }
  const std::vector<ksk_method> methods = ParseMethods(args.methods);

  ksk_bench_config cfg;
  ksk_bench_config_init(&cfg);
  cfg.sizes_m = ms.data();
  cfg.sizes_n = ns.data();
  cfg.num_sizes = ms.size();
  cfg.methods = methods.data();
  cfg.num_methods = methods.size();
  cfg.trials = args.trials;
  cfg.tol_res = args.tol;
  cfg.max_iters = args.max_iters;
  cfg.d = args.d;
  cfg.base_seed = args.seed;
  cfg.measure_epsilon = args.measure_epsilon ? 1 : 0;
  cfg.delta_report = args.delta;
  cfg.trace_every = args.trace_every;
  cfg.threads = EnvThreads();
  cfg.no_timing = args.no_timing ? 1 : 0;
  cfg.outputs = outputs;

  ksk_bench_summary summary{};
  Check(ksk_bench_run(&cfg, args.out_dir.c_str(), &summary), "bench");
  std::printf("rows: %zu\nflagged_trials: %zu\nfailed_cells: %zu\n",
              summary.rows, summary.flagged_trials, summary.failed_cells);
  if (summary.flagged_trials > 0) {
    std::fprintf(stderr,
                 "ksk: warning: %zu solve(s) did not converge; excluded from "
                 "speedups\n",
                 summary.flagged_trials);
  }
  if (args.measure_epsilon) {
    for (size_t i = 0; i < ms.size(); ++i) {
      double q = 0.0;
      size_t samples = 0;
      if (ksk_bench_epsilon_quantile(i, &q, &samples) == KSK_OK) {
        std::printf("epsilon_quantile %zux%zu (1-delta=%s, %zu samples): %s\n",
                    ms[i], ns[i], Real(1.0 - args.delta).c_str(), samples,
                    Real(q).c_str());
      }
    }
  }
  for (size_t i = 0; i < summary.failed_cells; ++i) {
    std::fprintf(stderr, "ksk: failed cell: %s\n", ksk_bench_failure(i));
  }
  return summary.failed_cells > 0 ? kExitPartialBench : kExitOk;
}

// ---- embed-check -----------------------------------------------------------

struct EmbedArgs {
  size_t m = 5000, n = 20, d = 0;
  size_t seeds = 100;
  uint64_t seed = 0;
  double epsilon = -1.0;
  double delta = 0.1;
};

int RunEmbedCheck(const EmbedArgs& args) {
  if (args.d == 0) Usage("--d must be positive");
  if (args.d >= args.m) Usage("count sketch needs d < m (got d=" +
                              std::to_string(args.d) + ", m=" +
                              std::to_string(args.m) + ")");
  if (args.seeds == 0) Usage("--seeds must be positive");

  uint64_t problem_seed = args.seed;
  Matrix a;
  for (int attempt = 0;; ++attempt) {
    ksk_matrix *pa = nullptr, *pb = nullptr, *px = nullptr;
    Check(ksk_generate_problem(args.m, args.n, problem_seed, &pa, &pb, &px), "gen");
    a.reset(pa);
    ksk_matrix_destroy(pb);
    ksk_matrix_destroy(px);
    ksk_spectral_summary s;
    Check(ksk_spectral_summary_compute(a.get(), 0.0, &s), "spectrum");
    if (s.rank_estimate == args.n) break;
    std::fprintf(stderr, "ksk: note: A from seed %llu is rank deficient; regenerating\n",
                 static_cast<unsigned long long>(problem_seed));
    if (attempt >= 16) Usage("could not generate a full-rank matrix");
    ++problem_seed;
  }

  std::vector<double> eps;
  for (size_t i = 0; i < args.seeds; ++i) {
    ksk_sketch* raw = nullptr;
    Check(ksk_sketch_create(args.d, args.m, args.seed + 1 + i, &raw), "sketch");
    Sketch s(raw);
    ksk_distortion dist;
    Check(ksk_sketch_distortion(s.get(), a.get(), &dist), "distortion");
    eps.push_back(dist.epsilon_exact);
  }
  std::vector<double> sorted = eps;
  std::sort(sorted.begin(), sorted.end());
  const size_t h = sorted.size() / 2;
  const double median =
      sorted.size() % 2 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);

  std::printf("m: %zu\nn: %zu\nd: %zu\nseeds: %zu\nproblem_seed: %llu\n", args.m,
              args.n, args.d, args.seeds,
              static_cast<unsigned long long>(problem_seed));
  std::printf("epsilon_min: %s\nepsilon_median: %s\nepsilon_max: %s\n",
              Real(sorted.front()).c_str(), Real(median).c_str(),
              Real(sorted.back()).c_str());
  if (args.epsilon < 0.0) return kExitOk;

  const auto exceed = std::count_if(eps.begin(), eps.end(),
                                    [&](double e) { return e > args.epsilon; });
  const double empirical_delta =
      static_cast<double>(exceed) / static_cast<double>(eps.size());
  const bool pass = empirical_delta <= args.delta;
  std::printf("epsilon_threshold: %s\nempirical_delta: %s\ndelta_budget: %s\n"
              "result: %s\n",
              Real(args.epsilon).c_str(), Real(empirical_delta).c_str(),
              Real(args.delta).c_str(), pass ? "pass" : "fail");
  return pass ? kExitOk : kExitEmbedFail;
}

// ---- factors ---------------------------------------------------------------

struct FactorArgs {
  std::string a;
  double epsilon = -1.0;
  bool epsilon_given = false;
  size_t d = 0;
  uint64_t seed = 0;
};

int RunFactors(const FactorArgs& args) {
  Matrix a = Load(args.a);
  const size_t m = ksk_matrix_rows(a.get());
  const size_t n = ksk_matrix_cols(a.get());
  ksk_spectral_summary s;
  Check(ksk_spectral_summary_compute(a.get(), 0.0, &s), "spectrum");
  if (s.rank_estimate < n) {
    std::fprintf(stderr, "ksk: A is rank deficient (rank %zu < %zu)\n",
                 s.rank_estimate, n);
    return kExitInput;
  }
  if (args.epsilon_given && !(args.epsilon >= 0.0 && args.epsilon < 1.0))
    Usage("--epsilon must lie in [0, 1)");

  double mwrk = 0.0;
  Check(ksk_convergence_factor_mwrk(a.get(), &s, &mwrk), "mwrk factor");

  double epsilon = args.epsilon;
  std::string source = "given";
  if (!args.epsilon_given) {
    const size_t d = args.d != 0 ? args.d : n * n;
    ksk_sketch* raw = nullptr;
    Check(ksk_sketch_create(d, m, args.seed, &raw), "sketch");
    Sketch sk(raw);
    ksk_distortion dist;
    Check(ksk_sketch_distortion(sk.get(), a.get(), &dist), "distortion");
    epsilon = dist.epsilon_exact;
    source = "measured (d=" + std::to_string(d) + ", seed=" +
             std::to_string(args.seed) + ")";
  }

  std::printf("m: %zu\nn: %zu\nsigma_max: %s\nsigma_min_nonzero: %s\n"
              "frobenius_sq: %s\nrank: %zu\nmwrk_factor: %s\n",
              m, n, Real(s.sigma_max).c_str(), Real(s.sigma_min_nonzero).c_str(),
              Real(s.frobenius_sq).c_str(), s.rank_estimate, Real(mwrk).c_str());
  std::printf("epsilon: %s\nepsilon_source: %s\n", Real(epsilon).c_str(),
              source.c_str());
  if (epsilon >= 1.0) {
    std::printf("csk_factor: undefined (epsilon >= 1)\n");
    return kExitOk;
  }
  double csk = 0.0;
  Check(ksk_convergence_factor_csk(&s, n, epsilon, &csk), "csk factor");
  std::printf("csk_factor: %s\n", Real(csk).c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Count sketch Kaczmarz solvers and benchmarks", "ksk"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ksk_version());

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a Gaussian consistent system");
  gen_cmd->add_option("--m", gen.m, "Rows")->required();
  gen_cmd->add_option("--n", gen.n, "Columns")->required();
  gen_cmd->add_option("--seed", gen.seed, "Seed");
  gen_cmd->add_option("--out", gen.out, "Output directory (A, b, xstar)")->required();
  gen_cmd->add_option("--format", gen.format, "binary or mm")
      ->check(CLI::IsMember({"binary", "mm"}));

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve Ax = b");
  solve_cmd->add_option("--a", solve.a, "Matrix file")->required();
  solve_cmd->add_option("--b", solve.b, "Right-hand side file")->required();
  solve_cmd->add_option("--xstar", solve.xstar, "Known solution (RES stopping rule)");
  solve_cmd->add_option("--x0", solve.x0, "Initial iterate (default 0)");
  solve_cmd->add_option("--method", solve.method, "rk, grk, rgrk, mwrk or csk");
  solve_cmd->add_option("--tol", solve.tol, "Stopping tolerance");
  solve_cmd->add_option("--max-iters", solve.max_iters, "Iteration cap");
  solve_cmd->add_option("--seed", solve.seed, "Seed (sketch / sampling)");
  solve_cmd->add_option("--d", solve.d, "Sketch rows (csk only, default n^2)");
  solve_cmd->add_option("--theta", solve.theta, "Relaxation (rgrk only)")
      ->check(CLI::Range(0.0, 1.0));
  solve_cmd->add_option("--trace-every", solve.trace_every, "RES trace period")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--recompute-every", solve.recompute_every,
                        "Full residual recompute period")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_flag("--epsilon", solve.epsilon,
                      "Also measure the sketch distortion (csk only)");
  solve_cmd->add_option("--report", solve.report, "SolveReport JSON output");
  solve_cmd->add_option("--solution", solve.solution, "Write the final iterate");
  solve_cmd->add_flag("--check", solve.check,
                      "Only verify b == A * xstar bit for bit");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run the multi-trial benchmark");
  bench_cmd->add_option("--sizes", bench.sizes, "Comma list of MxN")->required();
  bench_cmd->add_option("--methods", bench.methods, "Comma list of methods");
  bench_cmd->add_option("--trials", bench.trials, "Trials per size")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench.seed, "Base seed");
  bench_cmd->add_option("--out-dir", bench.out_dir, "Output directory")->required();
  bench_cmd->add_option("--tol", bench.tol, "RES tolerance");
  bench_cmd->add_option("--max-iters", bench.max_iters, "Iteration cap");
  bench_cmd->add_option("--d", bench.d, "Sketch rows (default n^2)");
  bench_cmd->add_option("--trace-every", bench.trace_every, "Trace period")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_flag("--no-timing", bench.no_timing,
                      "Zero CPU columns for byte-identical output");
  bench_cmd->add_flag("--measure-epsilon", bench.measure_epsilon,
                      "Measure epsilon_exact of every CSK sketch");
  bench_cmd->add_option("--delta", bench.delta, "Failure budget for the epsilon quantile")
      ->check(CLI::Range(0.0, 1.0));

  BenchArgs trace;
  auto* trace_cmd = app.add_subcommand("trace", "Median RES traces for one size");
  trace_cmd->add_option("--m", trace.m, "Rows")->required();
  trace_cmd->add_option("--n", trace.n, "Columns")->required();
  trace_cmd->add_option("--methods", trace.methods, "Comma list of methods");
  trace_cmd->add_option("--trials", trace.trials, "Trials")->check(CLI::PositiveNumber);
  trace_cmd->add_option("--seed", trace.seed, "Base seed");
  trace_cmd->add_option("--out-dir", trace.out_dir, "Output directory")->required();
  trace_cmd->add_option("--tol", trace.tol, "RES tolerance");
  trace_cmd->add_option("--max-iters", trace.max_iters, "Iteration cap");
  trace_cmd->add_option("--d", trace.d, "Sketch rows (default n^2)");
  trace_cmd->add_option("--trace-every", trace.trace_every, "Trace period")
      ->check(CLI::PositiveNumber);
  trace_cmd->add_flag("--no-timing", trace.no_timing, "Zero the CPU column");

  EmbedArgs embed;
  auto* embed_cmd = app.add_subcommand("embed-check", "Measure sketch distortion");
  embed_cmd->add_option("--m", embed.m, "Rows");
  embed_cmd->add_option("--n", embed.n, "Columns");
  embed_cmd->add_option("--d", embed.d, "Sketch rows")->required();
  embed_cmd->add_option("--seeds", embed.seeds, "Number of sketches");
  embed_cmd->add_option("--seed", embed.seed, "Base seed");
  embed_cmd->add_option("--epsilon", embed.epsilon, "Distortion threshold");
  embed_cmd->add_option("--delta", embed.delta, "Allowed fraction above threshold")
      ->check(CLI::Range(0.0, 1.0));

  FactorArgs factors;
  auto* factors_cmd = app.add_subcommand("factors", "Report convergence factors");
  factors_cmd->add_option("--a", factors.a, "Matrix file")->required();
  auto* eps_opt = factors_cmd->add_option("--epsilon", factors.epsilon,
                                          "Distortion to evaluate the CSK factor at");
  factors_cmd->add_option("--d", factors.d, "Sketch rows for a measured epsilon");
  factors_cmd->add_option("--seed", factors.seed, "Sketch seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*gen_cmd) return RunGen(gen);
    if (*solve_cmd) return RunSolve(solve);
    if (*bench_cmd) return RunBench(bench, KSK_BENCH_ALL);
    if (*trace_cmd) return RunBench(trace, KSK_BENCH_TRACES);
    if (*embed_cmd) return RunEmbedCheck(embed);
    if (*factors_cmd) {
      factors.epsilon_given = eps_opt->count() > 0;
      return RunFactors(factors);
    }
  } catch (const ExitError& e) {
    return e.code;
  }
  return kExitInput;
}
