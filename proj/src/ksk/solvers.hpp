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

// Kaczmarz iterations for consistent overdetermined systems Ax = b.
//
//   RK    samples row i with probability |a_i|^2 / |A|_F^2.
//   GRK   greedy randomized selection with relaxation 1/2.
//   RGRK  the same rule with a caller-chosen relaxation theta in [0, 1].
//   MWRK  maximal weighted residual: argmax_i r_i^2 / |a_i|^2.
//   CSK   MWRK run on the count-sketched system (SA, Sb), S drawn once per
//         solve from the config seed.
//
// Each step projects the iterate orthogonally onto the hyperplane of the
// selected row. Greedy methods keep the residual of the iterated system up to
// date incrementally and rebuild it from scratch every recompute_every steps.

#ifndef KSK_SOLVERS_HPP_
#define KSK_SOLVERS_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ksk/countsketch.hpp"
#include "ksk/matrix.hpp"
#include "ksk/rng.hpp"

namespace ksk {

enum class Method { kRK, kGRK, kRGRK, kMWRK, kCSK };

std::string_view MethodName(Method method);
Method ParseMethod(std::string_view name);

enum class Termination { kConverged, kMaxIters, kStagnated };

std::string_view TerminationName(Termination t);

struct SolverConfig {
  Method method = Method::kMWRK;
  double tol_res = 1e-6;
  std::size_t max_iters = 20000;
  std::uint64_t seed = 0;
  double theta = 0.5;  // RGRK only; GRK always uses 1/2
  std::size_t d = 0;   // CSK only; 0 selects n^2
  std::size_t trace_every = 1;
  std::size_t recompute_every = 1000;
  bool compute_epsilon = false;  // CSK: measure the sketch distortion too
};

struct SolveReport {
  std::size_t iterations = 0;
  double final_res = 0.0;
  std::vector<std::pair<std::size_t, double>> res_trace;
  double wall_time_s = 0.0;
  Termination termination = Termination::kMaxIters;
  Method method = Method::kMWRK;
  std::optional<double> epsilon_exact;

  // Not serialized: seconds since the start of the solve at each trace
  // point, and the final iterate.
  std::vector<double> time_trace;
  Vector x;
};

std::string ToJson(const SolveReport& report);
SolveReport SolveReportFromJson(const std::string& text);

// Rows, right-hand side, squared row norms and zero-row mask of the system a
// solver iterates on. Zero rows (e.g. from bucket cancellation in a sketch)
// are masked out of every selection rule.
class SketchedSystem {
 public:
  SketchedSystem(DenseMatrix a, Vector b);
  static SketchedSystem FromSketch(const CountSketch& s, const DenseMatrix& a,
                                   std::span<const double> b);

  const DenseMatrix& a() const { return a_; }
  std::span<const double> b() const { return b_; }
  std::span<const double> row_norms_sq() const { return row_norms_sq_; }
  std::span<const std::uint8_t> zero_row_mask() const { return mask_; }
  double frobenius_sq() const { return frobenius_sq_; }

  // True when some masked row carries a right-hand side larger than
  // 1e-12 * |b|: no iterate can satisfy that equation.
  bool HasInconsistentZeroRow() const;

 private:
  DenseMatrix a_;
  Vector b_;
  Vector row_norms_sq_;
  std::vector<std::uint8_t> mask_;
  double frobenius_sq_ = 0.0;
};

// b - a x.
Vector Residual(const DenseMatrix& a, std::span<const double> b,
                std::span<const double> x);

// Smallest index maximizing r_i^2 / norms_sq_i over unmasked rows. An empty
// mask means no row is masked. Throws if every row is masked.
std::size_t SelectMwrk(std::span<const double> r,
                       std::span<const double> row_norms_sq,
                       std::span<const std::uint8_t> mask = {});

// Projects x in place onto {y : row . y = b_i} and returns the step length
// lambda = (b_i - row . x) / row_norm_sq, so that x' = x + lambda * row.
double ProjectStep(std::span<double> x, std::span<const double> row, double b_i,
                   double row_norm_sq);

// r <- r - lambda * a * a_{i_k}^T, then r[i_k] = 0.
void UpdateResidual(std::span<double> r, const DenseMatrix& a, std::size_t i_k,
                    double lambda);

// Samples row i with probability row_norms_sq[i] / sum(row_norms_sq).
class RowSampler {
 public:
  explicit RowSampler(std::span<const double> row_norms_sq);
  std::size_t Sample(Rng& rng) const;
  double total() const { return prefix_.empty() ? 0.0 : prefix_.back(); }

 private:
  Vector prefix_;
  std::size_t last_nonzero_ = 0;
};

std::size_t SelectRk(const RowSampler& sampler, Rng& rng);

// Rows admitted by the greedy randomized threshold
//   r_i^2 / |a_i|^2 >= theta * max_j r_j^2/|a_j|^2 + (1-theta) * |r|^2/|A|_F^2,
// which is the ratio form of r_i^2 >= eps_k |r|^2 |a_i|^2 with
//   eps_k = theta * max_j(r_j^2/|a_j|^2) / |r|^2 + (1-theta) / |A|_F^2.
// The argmax row always qualifies. Throws if r vanishes on unmasked rows.
std::vector<std::size_t> GrkCandidates(std::span<const double> r,
                                       std::span<const double> row_norms_sq,
                                       std::span<const std::uint8_t> mask,
                                       double frobenius_sq, double theta);

// Picks i from GrkCandidates with probability r_i^2 / sum_{U} r_j^2.
std::size_t SelectGrk(std::span<const double> r,
                      std::span<const double> row_norms_sq,
                      std::span<const std::uint8_t> mask, double frobenius_sq,
                      double theta, Rng& rng);

// Read-only snapshot handed to a StepObserver after every step k -> k+1.
struct StepEvent {
  std::size_t iteration = 0;  // k
  std::size_t index = 0;      // selected row of the iterated system
  double lambda = 0.0;
  std::span<const double> x_before;
  std::span<const double> x_after;
  // Maintained residual of the iterated system before the step. Empty for
  // RK, which does not track it.
  std::span<const double> residual_before;
  const DenseMatrix* a = nullptr;  // iterated system (A or SA)
  std::span<const double> b;
  std::span<const double> row_norms_sq;
  std::span<const std::uint8_t> zero_row_mask;
};

using StepObserver = std::function<void(const StepEvent&)>;

struct SolveInputs {
  std::span<const double> x0;      // empty: zero vector
  std::span<const double> x_star;  // empty: stop on the relative residual
  StepObserver observer;
};

// Runs cfg.method until the stopping quantity drops to cfg.tol_res or
// cfg.max_iters steps were taken. With x_star the quantity is
// |x_k - x*|^2 / |x*|^2; without it, |r_k|^2 / |b|^2 of the iterated system
// (for RK the residual test runs every max(trace_every, n) steps). The
// wall time covers building the sketch and the iteration loop.
SolveReport Solve(const DenseMatrix& a, std::span<const double> b,
                  const SolverConfig& cfg, const SolveInputs& inputs = {});

// 1 - ((1-eps)^3 / n) * sigma_r^2 / sigma_1^2. Requires eps in [0, 1).
double ConvergenceFactorCsk(const SpectralSummary& summary, std::size_t n,
                            double epsilon);

// 1 - sigma_r^2 / max_i sum_{j != i} |a_j|^2, the denominator evaluated as
// |A|_F^2 - min_i |a_i|^2. Requires at least two rows.
double ConvergenceFactorMwrk(const DenseMatrix& a,
                             const SpectralSummary& summary);

}  // namespace ksk

#endif  // KSK_SOLVERS_HPP_
