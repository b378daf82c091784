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

#ifndef KSK_COUNTSKETCH_HPP_
#define KSK_COUNTSKETCH_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ksk/matrix.hpp"

namespace ksk {

/// Count sketch S = Phi * D, a d x m matrix with exactly one +-1 per column.
///
/// Column i has its nonzero in row bucket(i) with value sign(i). The dense
/// matrix is never formed by the library itself; applying S costs one pass
/// over the input.
///
/// Buckets and signs come from two independent xoshiro256** streams derived
/// from the seed, so (d, m, seed) fully determines the sketch.
class CountSketch {
 public:
  /// Requires 1 <= d < m.
  CountSketch(std::size_t d, std::size_t m, std::uint64_t seed);

  /// Explicit construction, used for fixtures and cross-implementation
  /// checks. Only requires d >= 1, buckets in range and signs exactly +-1;
  /// d >= m is allowed here so that permutation sketches can be expressed.
  static CountSketch FromArrays(std::size_t d, std::vector<std::uint32_t> bucket,
                                std::vector<std::int8_t> sign);

  std::size_t d() const { return d_; }
  std::size_t m() const { return bucket_.size(); }
  std::uint64_t seed() const { return seed_; }
  bool seeded() const { return seeded_; }

  std::span<const std::uint32_t> bucket() const { return bucket_; }
  std::span<const std::int8_t> sign() const { return sign_; }

  /// Row j of the result is the signed sum of the rows of a hashed to j,
  /// accumulated in increasing source-row order.
  DenseMatrix Apply(const DenseMatrix& a) const;
  Vector Apply(std::span<const double> b) const;

  /// The d x m matrix itself. Test scale only.
  DenseMatrix MaterializeDense() const;

  /// {"d","m","seed"} for seeded sketches; explicit arrays are added when
  /// explicit is true or the sketch was not built from a seed.
  std::string ToJson(bool explicit_arrays = false) const;
  static CountSketch FromJson(const std::string& text);

 private:
  CountSketch() = default;

  std::size_t d_ = 0;
  std::uint64_t seed_ = 0;
  bool seeded_ = false;
  std::vector<std::uint32_t> bucket_;
  std::vector<std::int8_t> sign_;
};

struct DistortionReport {
  double epsilon_exact = 0.0;
  // Extreme singular values of the product S*Q (not squared).
  double sigma_min_SQ = 0.0;
  double sigma_max_SQ = 0.0;
  std::size_t d = 0;
  std::size_t n = 0;
};

/// Orthonormal basis of range(a) by modified Gram-Schmidt, each column
/// orthogonalized twice. Throws kRankDeficient if a column vanishes.
DenseMatrix OrthonormalBasis(const DenseMatrix& a);

/// Smallest epsilon with (1-eps)|Ax|^2 <= |SAx|^2 <= (1+eps)|Ax|^2 for every
/// x. Over x, |SAx|^2/|Ax|^2 sweeps exactly the squared singular values of
/// S*Q for an orthonormal basis Q of range(A), so
///   eps = max(1 - sigma_min(SQ)^2, sigma_max(SQ)^2 - 1).
/// Throws kRankDeficient unless A has full column rank.
DistortionReport DistortionExact(const CountSketch& s, const DenseMatrix& a);

}  // namespace ksk

#endif  // KSK_COUNTSKETCH_HPP_
