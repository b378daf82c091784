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

// extern "C" bridge over the C++ core. Exceptions never cross this boundary.

#include "ksk/ksk.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "ksk/bench.hpp"
#include "ksk/countsketch.hpp"
#include "ksk/error.hpp"
#include "ksk/io.hpp"
#include "ksk/matrix.hpp"
#include "ksk/solvers.hpp"

struct ksk_matrix {
  ksk::DenseMatrix value;
};

struct ksk_sketch {
  ksk::CountSketch value;
};

struct ksk_report {
  ksk::SolveReport value;
};

namespace {

thread_local std::string last_error;
thread_local std::vector<std::string> bench_failures;
thread_local std::vector<std::optional<std::pair<double, size_t>>> bench_epsilon;

ksk_status ToStatus(ksk::ErrorCode code) {
  switch (code) {
    case ksk::ErrorCode::kInvalidArgument: return KSK_ERR_INVALID_ARGUMENT;
    case ksk::ErrorCode::kDimensionMismatch: return KSK_ERR_DIMENSION;
    case ksk::ErrorCode::kIo: return KSK_ERR_IO;
    case ksk::ErrorCode::kRankDeficient: return KSK_ERR_RANK_DEFICIENT;
    case ksk::ErrorCode::kNoConvergence: return KSK_ERR_NO_CONVERGENCE;
    case ksk::ErrorCode::kInternal: return KSK_ERR_INTERNAL;
  }
  return KSK_ERR_INTERNAL;
}

ksk_status SetError(ksk_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs body, converting any exception into a status code.
template <typename Body>
ksk_status Guard(Body&& body) {
  try {
    body();
    return KSK_OK;
  } catch (const ksk::Error& e) {
    return SetError(ToStatus(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return SetError(KSK_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return SetError(KSK_ERR_INTERNAL, e.what());
  } catch (...) {
    return SetError(KSK_ERR_INTERNAL, "unknown error");
  }
}

ksk_status NullArgument(const char* what) {
  return SetError(KSK_ERR_INVALID_ARGUMENT, std::string("null argument: ") + what);
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ksk::Vector ColumnVector(const ksk_matrix* m, const char* what) {
  const auto& v = m->value;
  ksk::Require(v.cols() == 1 || v.rows() == 1, ksk::ErrorCode::kDimensionMismatch,
               std::string(what) + " must be a vector (n x 1 matrix)");
  return ksk::Vector(v.data().begin(), v.data().end());
}

ksk_matrix* WrapVector(ksk::Vector v) {
  const std::size_t n = v.size();
  return new ksk_matrix{ksk::DenseMatrix(n, 1, std::move(v))};
}

}  // namespace

extern "C" {

const char* ksk_version(void) { return "1.0.0"; }

const char* ksk_last_error(void) { return last_error.c_str(); }

const char* ksk_status_string(ksk_status status) {
  switch (status) {
    case KSK_OK: return "ok";
    case KSK_ERR_INVALID_ARGUMENT: return "invalid argument";
    case KSK_ERR_DIMENSION: return "dimension mismatch";
    case KSK_ERR_IO: return "i/o error";
    case KSK_ERR_RANK_DEFICIENT: return "rank deficient";
    case KSK_ERR_NO_CONVERGENCE: return "no convergence";
    case KSK_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void ksk_string_free(char* s) { std::free(s); }

ksk_status ksk_matrix_create(size_t rows, size_t cols, const double* data,
                             ksk_matrix** out) {
  if (!out) return NullArgument("out");
  return Guard([&] {
    std::vector<double> values(rows * cols, 0.0);
    if (data) std::memcpy(values.data(), data, values.size() * sizeof(double));
    *out = new ksk_matrix{ksk::DenseMatrix(rows, cols, std::move(values))};
  });
}

void ksk_matrix_destroy(ksk_matrix* m) { delete m; }

size_t ksk_matrix_rows(const ksk_matrix* m) { return m ? m->value.rows() : 0; }

size_t ksk_matrix_cols(const ksk_matrix* m) { return m ? m->value.cols() : 0; }

const double* ksk_matrix_data(const ksk_matrix* m) {
  return m ? m->value.data().data() : nullptr;
}

ksk_status ksk_matrix_load(const char* path, ksk_matrix** out) {
  if (!path) return NullArgument("path");
  if (!out) return NullArgument("out");
  return Guard([&] { *out = new ksk_matrix{ksk::LoadMatrix(path)}; });
}

ksk_status ksk_matrix_save(const ksk_matrix* m, const char* path,
                           ksk_format format) {
  if (!m) return NullArgument("m");
  if (!path) return NullArgument("path");
  return Guard([&] {
    ksk::SaveMatrix(path, m->value,
                    format == KSK_FORMAT_MATRIX_MARKET ? ksk::MatrixFormat::kMatrixMarket
                                                       : ksk::MatrixFormat::kBinary);
  });
}

ksk_status ksk_matrix_matvec(const ksk_matrix* a, const ksk_matrix* x,
                             ksk_matrix** out) {
  if (!a || !x) return NullArgument("a/x");
  if (!out) return NullArgument("out");
  return Guard([&] {
    *out = WrapVector(ksk::MatVec(a->value, ColumnVector(x, "x")));
  });
}

ksk_status ksk_generate_problem(size_t m, size_t n, uint64_t seed,
                                ksk_matrix** a, ksk_matrix** b,
                                ksk_matrix** x_star) {
  if (!a || !b || !x_star) return NullArgument("a/b/x_star");
  return Guard([&] {
    ksk::Problem p = ksk::GenerateProblem(m, n, seed);
    std::unique_ptr<ksk_matrix> pa(new ksk_matrix{std::move(p.a)});
    std::unique_ptr<ksk_matrix> pb(WrapVector(std::move(p.b)));
    std::unique_ptr<ksk_matrix> px(WrapVector(std::move(p.x_star)));
    *a = pa.release();
    *b = pb.release();
    *x_star = px.release();
  });
}

ksk_status ksk_spectral_summary_compute(const ksk_matrix* m, double rank_tol,
                                        ksk_spectral_summary* out) {
  if (!m) return NullArgument("m");
  if (!out) return NullArgument("out");
  return Guard([&] {
    const auto s = ksk::ComputeSpectralSummary(
        m->value, rank_tol > 0 ? rank_tol : ksk::kDefaultRankTol);
    *out = {s.sigma_max, s.sigma_min_nonzero, s.frobenius_sq, s.rank_estimate,
            s.tolerance_used};
  });
}

ksk_status ksk_spectral_norm(const ksk_matrix* m, double tol, size_t max_iters,
                             double* out) {
  if (!m) return NullArgument("m");
  if (!out) return NullArgument("out");
  try {
    *out = ksk::SpectralNorm(m->value, tol, max_iters);
    return KSK_OK;
  } catch (const ksk::NoConvergence& e) {
    *out = e.best_estimate();
    return SetError(KSK_ERR_NO_CONVERGENCE, e.what());
  } catch (...) {
    return Guard([] { throw; });
  }
}

namespace {
ksk::SpectralSummary FromC(const ksk_spectral_summary& s) {
  ksk::SpectralSummary out;
  out.sigma_max = s.sigma_max;
  out.sigma_min_nonzero = s.sigma_min_nonzero;
  out.frobenius_sq = s.frobenius_sq;
  out.rank_estimate = s.rank_estimate;
  out.tolerance_used = s.tolerance_used;
  return out;
}
}  // namespace

ksk_status ksk_convergence_factor_csk(const ksk_spectral_summary* s, size_t n,
                                      double epsilon, double* out) {
  if (!s) return NullArgument("summary");
  if (!out) return NullArgument("out");
  return Guard([&] { *out = ksk::ConvergenceFactorCsk(FromC(*s), n, epsilon); });
}

ksk_status ksk_convergence_factor_mwrk(const ksk_matrix* a,
                                       const ksk_spectral_summary* s,
                                       double* out) {
  if (!a) return NullArgument("a");
  if (!s) return NullArgument("summary");
  if (!out) return NullArgument("out");
  return Guard([&] { *out = ksk::ConvergenceFactorMwrk(a->value, FromC(*s)); });
}

ksk_status ksk_sketch_create(size_t d, size_t m, uint64_t seed, ksk_sketch** out) {
  if (!out) return NullArgument("out");
  return Guard([&] { *out = new ksk_sketch{ksk::CountSketch(d, m, seed)}; });
}

ksk_status ksk_sketch_from_json(const char* json, ksk_sketch** out) {
  if (!json) return NullArgument("json");
  if (!out) return NullArgument("out");
  return Guard([&] { *out = new ksk_sketch{ksk::CountSketch::FromJson(json)}; });
}

void ksk_sketch_destroy(ksk_sketch* s) { delete s; }

ksk_status ksk_sketch_to_json(const ksk_sketch* s, int explicit_arrays,
                              char** out) {
  if (!s) return NullArgument("s");
  if (!out) return NullArgument("out");
  return Guard([&] { *out = CopyString(s->value.ToJson(explicit_arrays != 0)); });
}

ksk_status ksk_sketch_apply(const ksk_sketch* s, const ksk_matrix* a,
                            ksk_matrix** out) {
  if (!s || !a) return NullArgument("s/a");
  if (!out) return NullArgument("out");
  return Guard([&] { *out = new ksk_matrix{s->value.Apply(a->value)}; });
}

ksk_status ksk_sketch_distortion(const ksk_sketch* s, const ksk_matrix* a,
                                 ksk_distortion* out) {
  if (!s || !a) return NullArgument("s/a");
  if (!out) return NullArgument("out");
  return Guard([&] {
    const auto r = ksk::DistortionExact(s->value, a->value);
    *out = {r.epsilon_exact, r.sigma_min_SQ, r.sigma_max_SQ, r.d, r.n};
  });
}

void ksk_solver_config_init(ksk_solver_config* cfg) {
  if (!cfg) return;
  const ksk::SolverConfig d;
  cfg->method = static_cast<ksk_method>(d.method);
  cfg->tol_res = d.tol_res;
  cfg->max_iters = d.max_iters;
  cfg->seed = d.seed;
  cfg->theta = d.theta;
  cfg->d = d.d;
  cfg->trace_every = d.trace_every;
  cfg->recompute_every = d.recompute_every;
  cfg->compute_epsilon = d.compute_epsilon ? 1 : 0;
}

ksk_status ksk_method_parse(const char* name, ksk_method* out) {
  if (!name) return NullArgument("name");
  if (!out) return NullArgument("out");
  return Guard([&] { *out = static_cast<ksk_method>(ksk::ParseMethod(name)); });
}

const char* ksk_method_name(ksk_method method) {
  if (method < KSK_METHOD_RK || method > KSK_METHOD_CSK) return "unknown";
  return ksk::MethodName(static_cast<ksk::Method>(method)).data();
}

ksk_status ksk_solve(const ksk_matrix* a, const ksk_matrix* b,
                     const ksk_matrix* x0, const ksk_matrix* x_star,
                     const ksk_solver_config* cfg, ksk_report** out) {
  if (!a || !b) return NullArgument("a/b");
  if (!cfg) return NullArgument("cfg");
  if (!out) return NullArgument("out");
  if (cfg->method < KSK_METHOD_RK || cfg->method > KSK_METHOD_CSK)
    return SetError(KSK_ERR_INVALID_ARGUMENT, "unknown method");
  return Guard([&] {
    ksk::SolverConfig sc;
    sc.method = static_cast<ksk::Method>(cfg->method);
    sc.tol_res = cfg->tol_res;
    sc.max_iters = cfg->max_iters;
    sc.seed = cfg->seed;
    sc.theta = cfg->theta;
    sc.d = cfg->d;
    sc.trace_every = cfg->trace_every;
    sc.recompute_every = cfg->recompute_every;
    sc.compute_epsilon = cfg->compute_epsilon != 0;
    const ksk::Vector rhs = ColumnVector(b, "b");
    ksk::Vector start, solution;
    if (x0) start = ColumnVector(x0, "x0");
    if (x_star) solution = ColumnVector(x_star, "x_star");
    ksk::SolveInputs inputs;
    inputs.x0 = start;
    inputs.x_star = solution;
    *out = new ksk_report{ksk::Solve(a->value, rhs, sc, inputs)};
  });
}

void ksk_report_destroy(ksk_report* r) { delete r; }

ksk_termination ksk_report_termination(const ksk_report* r) {
  return r ? static_cast<ksk_termination>(r->value.termination) : KSK_STAGNATED;
}

size_t ksk_report_iterations(const ksk_report* r) {
  return r ? r->value.iterations : 0;
}

double ksk_report_final_res(const ksk_report* r) {
  return r ? r->value.final_res : 0.0;
}

double ksk_report_wall_time(const ksk_report* r) {
  return r ? r->value.wall_time_s : 0.0;
}

ksk_status ksk_report_solution(const ksk_report* r, ksk_matrix** out) {
  if (!r) return NullArgument("r");
  if (!out) return NullArgument("out");
  return Guard([&] { *out = WrapVector(r->value.x); });
}

ksk_status ksk_report_to_json(const ksk_report* r, char** out) {
  if (!r) return NullArgument("r");
  if (!out) return NullArgument("out");
  return Guard([&] { *out = CopyString(ksk::ToJson(r->value)); });
}

void ksk_bench_config_init(ksk_bench_config* cfg) {
  if (!cfg) return;
  const ksk::BenchConfig d;
  *cfg = ksk_bench_config{};
  cfg->trials = d.trials;
  cfg->tol_res = d.tol_res;
  cfg->max_iters = d.max_iters;
  cfg->delta_report = d.delta_report;
  cfg->trace_every = d.trace_every;
  cfg->threads = 1;
  cfg->outputs = KSK_BENCH_ALL;
}

ksk_status ksk_bench_run(const ksk_bench_config* cfg, const char* out_dir,
                         ksk_bench_summary* out) {
  if (!cfg) return NullArgument("cfg");
  if (!out_dir) return NullArgument("out_dir");
  if (cfg->num_sizes > 0 && (!cfg->sizes_m || !cfg->sizes_n))
    return NullArgument("sizes");
  return Guard([&] {
    ksk::BenchConfig bc;
    for (size_t i = 0; i < cfg->num_sizes; ++i)
      bc.sizes.emplace_back(cfg->sizes_m[i], cfg->sizes_n[i]);
    if (cfg->methods && cfg->num_methods > 0) {
      bc.methods.clear();
      for (size_t i = 0; i < cfg->num_methods; ++i) {
        ksk::Require(cfg->methods[i] >= KSK_METHOD_RK &&
                         cfg->methods[i] <= KSK_METHOD_CSK,
                     ksk::ErrorCode::kInvalidArgument, "unknown method");
        bc.methods.push_back(static_cast<ksk::Method>(cfg->methods[i]));
      }
    }
    bc.trials = cfg->trials;
    bc.tol_res = cfg->tol_res;
    bc.max_iters = cfg->max_iters;
    bc.explicit_d = cfg->d;
    bc.base_seed = cfg->base_seed;
    bc.measure_epsilon = cfg->measure_epsilon != 0;
    bc.delta_report = cfg->delta_report;
    bc.trace_every = cfg->trace_every;
    bc.threads = cfg->threads;
    bc.no_timing = cfg->no_timing != 0;

    bench_failures.clear();
    bench_epsilon.assign(bc.sizes.size(), std::nullopt);
    const ksk::SuiteResult result = ksk::RunSuite(bc);
    const unsigned outputs = cfg->outputs;
    ksk::WriteSuiteOutputs(out_dir, result, outputs & KSK_BENCH_TABLE,
                           outputs & KSK_BENCH_TRACES, outputs & KSK_BENCH_ARCHIVE);
    bench_failures = result.failures;
    for (const auto& e : result.epsilon) {
      for (size_t i = 0; i < bc.sizes.size(); ++i) {
        if (bc.sizes[i] == std::pair{e.m, e.n}) bench_epsilon[i] = {{e.quantile, e.samples}};
      }
    }
    if (out) {
      out->rows = result.rows.size();
      out->flagged_trials = result.flagged_trials;
      out->failed_cells = result.failures.size();
    }
  });
}

const char* ksk_bench_failure(size_t index) {
  return index < bench_failures.size() ? bench_failures[index].c_str() : nullptr;
}

ksk_status ksk_bench_epsilon_quantile(size_t size_index, double* out,
                                      size_t* samples) {
  if (!out) return NullArgument("out");
  if (size_index >= bench_epsilon.size() || !bench_epsilon[size_index])
    return SetError(KSK_ERR_INVALID_ARGUMENT, "no epsilon recorded for that size");
  *out = bench_epsilon[size_index]->first;
  if (samples) *samples = bench_epsilon[size_index]->second;
  return KSK_OK;
}

}  // extern "C"
