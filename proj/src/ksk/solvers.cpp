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

#include "ksk/solvers.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>

#include "json.hpp"
#include "ksk/error.hpp"

namespace ksk {

namespace {

constexpr std::string_view kMethodNames[] = {"rk", "grk", "rgrk", "mwrk", "csk"};
constexpr std::string_view kTerminationNames[] = {"Converged", "MaxIters",
                                                  "Stagnated"};

bool Masked(std::span<const std::uint8_t> mask, std::size_t i) {
  return !mask.empty() && mask[i] != 0;
}

bool IsGreedy(Method m) { return m != Method::kRK; }

}  // namespace

std::string_view MethodName(Method method) {
  return kMethodNames[static_cast<int>(method)];
}

Method ParseMethod(std::string_view name) {
  std::string lower(name);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (int i = 0; i < 5; ++i) {
    if (kMethodNames[i] == lower) return static_cast<Method>(i);
  }
  Fail(ErrorCode::kInvalidArgument,
       "unknown method '" + std::string(name) + "' (expected rk, grk, rgrk, mwrk or csk)");
}

std::string_view TerminationName(Termination t) {
  return kTerminationNames[static_cast<int>(t)];
}

std::string ToJson(const SolveReport& report) {
  nlohmann::json j;
  j["iterations"] = report.iterations;
  j["final_res"] = report.final_res;
  auto trace = nlohmann::json::array();
  for (const auto& [it, res] : report.res_trace) trace.push_back({it, res});
  j["res_trace"] = std::move(trace);
  j["wall_time_s"] = report.wall_time_s;
  j["termination"] = TerminationName(report.termination);
  j["method"] = MethodName(report.method);
  j["epsilon_exact"] = report.epsilon_exact ? nlohmann::json(*report.epsilon_exact)
                                            : nlohmann::json(nullptr);
  return j.dump();
}

SolveReport SolveReportFromJson(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    SolveReport report;
    report.iterations = j.at("iterations").get<std::size_t>();
    report.final_res = j.at("final_res").get<double>();
    for (const auto& entry : j.at("res_trace")) {
      report.res_trace.emplace_back(entry.at(0).get<std::size_t>(),
                                    entry.at(1).get<double>());
    }
    report.wall_time_s = j.at("wall_time_s").get<double>();
    const auto term = j.at("termination").get<std::string>();
    bool found = false;
    for (int i = 0; i < 3; ++i) {
      if (kTerminationNames[i] == term) {
        report.termination = static_cast<Termination>(i);
        found = true;
      }
    }
    Require(found, ErrorCode::kIo, "unknown termination '" + term + "'");
    report.method = ParseMethod(j.at("method").get<std::string>());
    if (!j.at("epsilon_exact").is_null()) {
      report.epsilon_exact = j.at("epsilon_exact").get<double>();
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kIo, std::string("bad solve report JSON: ") + e.what());
  }
}

SketchedSystem::SketchedSystem(DenseMatrix a, Vector b)
    : a_(std::move(a)), b_(std::move(b)) {
  Require(b_.size() == a_.rows(), ErrorCode::kDimensionMismatch,
          "right-hand side length does not match matrix rows");
  row_norms_sq_ = RowNormsSquared(a_);
  mask_.resize(row_norms_sq_.size());
  for (std::size_t i = 0; i < row_norms_sq_.size(); ++i) {
    mask_[i] = row_norms_sq_[i] == 0.0 ? 1 : 0;
    frobenius_sq_ += row_norms_sq_[i];
  }
  Require(frobenius_sq_ > 0.0, ErrorCode::kRankDeficient,
          "iterated system matrix is all zeros");
}

SketchedSystem SketchedSystem::FromSketch(const CountSketch& s,
                                          const DenseMatrix& a,
                                          std::span<const double> b) {
  return SketchedSystem(s.Apply(a), s.Apply(b));
}

bool SketchedSystem::HasInconsistentZeroRow() const {
  const double limit = 1e-12 * std::sqrt(SquaredNorm(b_));
  for (std::size_t i = 0; i < b_.size(); ++i) {
    if (mask_[i] && std::abs(b_[i]) > limit) return true;
  }
  return false;
}

Vector Residual(const DenseMatrix& a, std::span<const double> b,
                std::span<const double> x) {
  Require(b.size() == a.rows(), ErrorCode::kDimensionMismatch,
          "residual: right-hand side length does not match matrix rows");
  Vector r = MatVec(a, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return r;
}

std::size_t SelectMwrk(std::span<const double> r,
                       std::span<const double> row_norms_sq,
                       std::span<const std::uint8_t> mask) {
  Require(r.size() == row_norms_sq.size() && (mask.empty() || mask.size() == r.size()),
          ErrorCode::kDimensionMismatch, "select: length mismatch");
  std::size_t best = r.size();
  double best_ratio = -1.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (Masked(mask, i) || row_norms_sq[i] == 0.0) continue;
    const double ratio = r[i] * r[i] / row_norms_sq[i];
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = i;
    }
  }
  Require(best < r.size(), ErrorCode::kInvalidArgument,
          "every row is masked; nothing to select");
  return best;
}

double ProjectStep(std::span<double> x, std::span<const double> row, double b_i,
                   double row_norm_sq) {
  Require(row_norm_sq > 0.0, ErrorCode::kInvalidArgument,
          "cannot project onto a zero row");
  Require(x.size() == row.size(), ErrorCode::kDimensionMismatch,
          "project: row length does not match iterate");
  double dot = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) dot += row[j] * x[j];
  const double lambda = (b_i - dot) / row_norm_sq;
  for (std::size_t j = 0; j < x.size(); ++j) x[j] += lambda * row[j];
  return lambda;
}

void UpdateResidual(std::span<double> r, const DenseMatrix& a, std::size_t i_k,
                    double lambda) {
  const auto pivot = a.row(i_k);
  const std::size_t n = pivot.size();
  for (std::size_t j = 0; j < r.size(); ++j) {
    const auto row = a.row(j);
    double dot = 0.0;
    for (std::size_t c = 0; c < n; ++c) dot += row[c] * pivot[c];
    r[j] -= lambda * dot;
  }
  r[i_k] = 0.0;
}

RowSampler::RowSampler(std::span<const double> row_norms_sq)
    : prefix_(row_norms_sq.size()) {
  double sum = 0.0;
  for (std::size_t i = 0; i < row_norms_sq.size(); ++i) {
    sum += row_norms_sq[i];
    prefix_[i] = sum;
    if (row_norms_sq[i] > 0.0) last_nonzero_ = i;
  }
  Require(sum > 0.0, ErrorCode::kInvalidArgument,
          "row sampling needs a nonzero matrix");
}

std::size_t RowSampler::Sample(Rng& rng) const {
  const double u = rng.Uniform() * prefix_.back();
  const auto it = std::upper_bound(prefix_.begin(), prefix_.end(), u);
  const auto i = static_cast<std::size_t>(it - prefix_.begin());
  return std::min(i, last_nonzero_);
}

std::size_t SelectRk(const RowSampler& sampler, Rng& rng) {
  return sampler.Sample(rng);
}

std::vector<std::size_t> GrkCandidates(std::span<const double> r,
                                       std::span<const double> row_norms_sq,
                                       std::span<const std::uint8_t> mask,
                                       double frobenius_sq, double theta) {
  Require(theta >= 0.0 && theta <= 1.0, ErrorCode::kInvalidArgument,
          "theta must lie in [0, 1]");
  Require(frobenius_sq > 0.0, ErrorCode::kInvalidArgument,
          "Frobenius norm must be positive");
  double max_ratio = 0.0;
  double r_sq = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (Masked(mask, i) || row_norms_sq[i] == 0.0) continue;
    max_ratio = std::max(max_ratio, r[i] * r[i] / row_norms_sq[i]);
    r_sq += r[i] * r[i];
  }
  Require(r_sq > 0.0, ErrorCode::kInvalidArgument, "already converged");

  const double threshold = std::min(
      max_ratio, theta * max_ratio + (1.0 - theta) * (r_sq / frobenius_sq));
  std::vector<std::size_t> admitted;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (Masked(mask, i) || row_norms_sq[i] == 0.0) continue;
    if (r[i] * r[i] / row_norms_sq[i] >= threshold) admitted.push_back(i);
  }
  return admitted;
}

std::size_t SelectGrk(std::span<const double> r,
                      std::span<const double> row_norms_sq,
                      std::span<const std::uint8_t> mask, double frobenius_sq,
                      double theta, Rng& rng) {
  const auto admitted = GrkCandidates(r, row_norms_sq, mask, frobenius_sq, theta);
  double total = 0.0;
  for (std::size_t i : admitted) total += r[i] * r[i];
  const double u = rng.Uniform() * total;
  double cumulative = 0.0;
  for (std::size_t i : admitted) {
    cumulative += r[i] * r[i];
    if (u < cumulative) return i;
  }
  // Only reachable through rounding of the running sum.
  for (auto it = admitted.rbegin(); it != admitted.rend(); ++it) {
    if (r[*it] != 0.0) return *it;
  }
  return admitted.back();
}

SolveReport Solve(const DenseMatrix& a, std::span<const double> b,
                  const SolverConfig& cfg, const SolveInputs& inputs) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  Require(!a.empty(), ErrorCode::kInvalidArgument, "empty system matrix");
  Require(b.size() == m, ErrorCode::kDimensionMismatch,
          "right-hand side length does not match matrix rows");
  Require(cfg.tol_res > 0.0, ErrorCode::kInvalidArgument, "tol_res must be positive");
  Require(cfg.theta >= 0.0 && cfg.theta <= 1.0, ErrorCode::kInvalidArgument,
          "theta must lie in [0, 1]");
  Require(cfg.trace_every >= 1 && cfg.recompute_every >= 1,
          ErrorCode::kInvalidArgument, "trace and recompute periods must be >= 1");
  Require(cfg.d == 0 || cfg.method == Method::kCSK, ErrorCode::kInvalidArgument,
          "d applies to csk only");
  Require(inputs.x0.empty() || inputs.x0.size() == n,
          ErrorCode::kDimensionMismatch, "x0 length does not match columns");
  Require(inputs.x_star.empty() || inputs.x_star.size() == n,
          ErrorCode::kDimensionMismatch, "x_star length does not match columns");

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(Clock::now() - start).count();
  };

  SolveReport report;
  report.method = cfg.method;
  Vector x = inputs.x0.empty() ? Vector(n, 0.0)
                               : Vector(inputs.x0.begin(), inputs.x0.end());

  // The unsketched methods iterate on A itself; only its row norms and mask
  // are built here, so A is never copied.
  std::optional<CountSketch> sketch;
  std::optional<SketchedSystem> sketched;
  const DenseMatrix* sys_a = &a;
  std::span<const double> sb = b;
  Vector own_norms;
  std::vector<std::uint8_t> own_mask;
  double frobenius_sq = 0.0;
  bool inconsistent = false;
  if (cfg.method == Method::kCSK) {
    const std::size_t d = cfg.d != 0 ? cfg.d : n * n;
    sketch.emplace(d, m, cfg.seed);
    sketched.emplace(SketchedSystem::FromSketch(*sketch, a, b));
    sys_a = &sketched->a();
    sb = sketched->b();
    frobenius_sq = sketched->frobenius_sq();
    inconsistent = sketched->HasInconsistentZeroRow();
  } else {
    own_norms = RowNormsSquared(a);
    own_mask.resize(m);
    const double limit = 1e-12 * std::sqrt(SquaredNorm(b));
    for (std::size_t i = 0; i < m; ++i) {
      frobenius_sq += own_norms[i];
      own_mask[i] = own_norms[i] == 0.0 ? 1 : 0;
      if (own_mask[i] && std::abs(b[i]) > limit) inconsistent = true;
    }
    Require(frobenius_sq > 0.0, ErrorCode::kRankDeficient,
            "system matrix is all zeros");
  }
  const DenseMatrix& sa = *sys_a;
  const std::span<const double> norms =
      sketched ? sketched->row_norms_sq() : std::span<const double>(own_norms);
  const std::span<const std::uint8_t> mask =
      sketched ? sketched->zero_row_mask()
               : std::span<const std::uint8_t>(own_mask);

  const bool have_x_star = !inputs.x_star.empty();
  const double x_star_sq = have_x_star ? SquaredNorm(inputs.x_star) : 0.0;
  const double b_sq = SquaredNorm(sb);
  auto solution_error = [&] {
    double e = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double diff = x[j] - inputs.x_star[j];
      e += diff * diff;
    }
    return x_star_sq > 0.0 ? e / x_star_sq : e;
  };
  auto relative = [&](double r_sq) { return b_sq > 0.0 ? r_sq / b_sq : r_sq; };
  auto record = [&](std::size_t k, double res) {
    report.res_trace.emplace_back(k, res);
    report.time_trace.push_back(elapsed());
  };

  Rng rng(MixSeed({cfg.seed, static_cast<std::uint64_t>(cfg.method) + 1}));
  const bool greedy = IsGreedy(cfg.method);
  const double theta = cfg.method == Method::kGRK ? 0.5 : cfg.theta;
  Vector r;
  if (greedy) r = Residual(sa, sb, x);
  std::optional<RowSampler> sampler;
  if (!greedy) sampler.emplace(norms);
  const std::size_t rk_check_period = std::max(cfg.trace_every, n);

  Vector x_before;
  Vector r_before;
  std::size_t k = 0;
  double res = 0.0;

  for (;; ++k) {
    const bool last = k >= cfg.max_iters;
    bool evaluated = true;
    if (have_x_star) {
      res = solution_error();
    } else if (greedy) {
      res = relative(SquaredNorm(r));
    } else if (k % rk_check_period == 0 || last) {
      res = relative(SquaredNorm(Residual(sa, sb, x)));
    } else {
      evaluated = false;
    }
    if (evaluated && k % cfg.trace_every == 0) record(k, res);

    if (evaluated && res <= cfg.tol_res) {
      report.termination = Termination::kConverged;
      break;
    }
    if (inconsistent) {
      report.termination = Termination::kStagnated;
      break;
    }
    if (last) {
      report.termination = Termination::kMaxIters;
      break;
    }

    std::size_t i;
    if (!greedy) {
      i = SelectRk(*sampler, rng);
    } else {
      const std::size_t best = SelectMwrk(r, norms, mask);
      if (r[best] == 0.0) {
        // The iterate solves the iterated system but is not yet accurate.
        report.termination = Termination::kStagnated;
        break;
      }
      i = (cfg.method == Method::kMWRK || cfg.method == Method::kCSK)
              ? best
              : SelectGrk(r, norms, mask, frobenius_sq, theta, rng);
    }

    if (inputs.observer) {
      x_before = x;
      if (greedy) r_before = r;
    }
    const double lambda = ProjectStep(x, sa.row(i), sb[i], norms[i]);
    if (greedy) {
      UpdateResidual(r, sa, i, lambda);
      if ((k + 1) % cfg.recompute_every == 0) r = Residual(sa, sb, x);
    }
    if (inputs.observer) {
      StepEvent event;
      event.iteration = k;
      event.index = i;
      event.lambda = lambda;
      event.x_before = x_before;
      event.x_after = x;
      event.residual_before = greedy ? std::span<const double>(r_before)
                                     : std::span<const double>();
      event.a = &sa;
      event.b = sb;
      event.row_norms_sq = norms;
      event.zero_row_mask = mask;
      inputs.observer(event);
    }
  }

  if (report.res_trace.empty() || report.res_trace.back().first != k) {
    record(k, res);
  }
  report.iterations = k;
  report.final_res = res;
  report.wall_time_s = elapsed();
  report.x = std::move(x);

  if (cfg.compute_epsilon && sketch) {
    try {
      report.epsilon_exact = DistortionExact(*sketch, a).epsilon_exact;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kRankDeficient) throw;
    }
  }
  return report;
}

double ConvergenceFactorCsk(const SpectralSummary& summary, std::size_t n,
                            double epsilon) {
  Require(epsilon >= 0.0 && epsilon < 1.0, ErrorCode::kInvalidArgument,
          "epsilon must lie in [0, 1)");
  Require(n >= 1, ErrorCode::kInvalidArgument, "n must be positive");
  Require(summary.sigma_max > 0.0, ErrorCode::kRankDeficient,
          "convergence factor of a zero matrix");
  const double shrink = 1.0 - epsilon;
  const double ratio = summary.sigma_min_nonzero / summary.sigma_max;
  return 1.0 - (shrink * shrink * shrink / static_cast<double>(n)) * ratio * ratio;
}

double ConvergenceFactorMwrk(const DenseMatrix& a,
                             const SpectralSummary& summary) {
  Require(a.rows() >= 2, ErrorCode::kInvalidArgument,
          "MWRK factor needs at least two rows");
  const Vector norms = RowNormsSquared(a);
  const double min_norm = *std::min_element(norms.begin(), norms.end());
  const double denominator = summary.frobenius_sq - min_norm;
  Require(denominator > 0.0, ErrorCode::kRankDeficient,
          "MWRK factor undefined: all but one row vanish");
  const double sr = summary.sigma_min_nonzero;
  return 1.0 - sr * sr / denominator;
}

}  // namespace ksk
