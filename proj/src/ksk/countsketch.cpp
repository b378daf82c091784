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

#include "ksk/countsketch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "ksk/error.hpp"
#include "ksk/rng.hpp"

namespace ksk {

namespace {
constexpr std::uint64_t kBucketStream = 0x68;  // 'h'
constexpr std::uint64_t kSignStream = 0x44;    // 'D'
}  // namespace

CountSketch::CountSketch(std::size_t d, std::size_t m, std::uint64_t seed)
    : d_(d), seed_(seed), seeded_(true) {
  Require(d >= 1, ErrorCode::kInvalidArgument,
          "count sketch needs at least one row (d >= 1)");
  Require(d < m, ErrorCode::kInvalidArgument,
          "count sketch must reduce dimension: need d < m, got d=" +
              std::to_string(d) + ", m=" + std::to_string(m));
  Require(d <= std::numeric_limits<std::uint32_t>::max(),
          ErrorCode::kInvalidArgument, "count sketch d too large");

  Rng bucket_rng(MixSeed({seed, kBucketStream}));
  Rng sign_rng(MixSeed({seed, kSignStream}));
  bucket_.resize(m);
  sign_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    bucket_[i] = static_cast<std::uint32_t>(bucket_rng.Below(d));
    sign_[i] = sign_rng.Sign() > 0 ? 1 : -1;
  }
}

CountSketch CountSketch::FromArrays(std::size_t d,
                                    std::vector<std::uint32_t> bucket,
                                    std::vector<std::int8_t> sign) {
  Require(d >= 1, ErrorCode::kInvalidArgument, "count sketch needs d >= 1");
  Require(bucket.size() == sign.size(), ErrorCode::kDimensionMismatch,
          "bucket and sign arrays differ in length");
  for (auto b : bucket) {
    Require(b < d, ErrorCode::kInvalidArgument, "bucket index out of range");
  }
  for (auto s : sign) {
    Require(s == 1 || s == -1, ErrorCode::kInvalidArgument,
            "sign entries must be +1 or -1");
  }
  CountSketch sketch;
  sketch.d_ = d;
  sketch.bucket_ = std::move(bucket);
  sketch.sign_ = std::move(sign);
  return sketch;
}

DenseMatrix CountSketch::Apply(const DenseMatrix& a) const {
  Require(a.rows() == m(), ErrorCode::kDimensionMismatch,
          "sketch has m=" + std::to_string(m()) + " but matrix has " +
              std::to_string(a.rows()) + " rows");
  DenseMatrix out(d_, a.cols());
  for (std::size_t i = 0; i < bucket_.size(); ++i) {
    auto dst = out.row(bucket_[i]);
    const auto src = a.row(i);
    const double s = sign_[i];
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] += s * src[k];
  }
  return out;
}

Vector CountSketch::Apply(std::span<const double> b) const {
  Require(b.size() == m(), ErrorCode::kDimensionMismatch,
          "sketch has m=" + std::to_string(m()) + " but vector has length " +
              std::to_string(b.size()));
  Vector out(d_, 0.0);
  for (std::size_t i = 0; i < bucket_.size(); ++i) {
    out[bucket_[i]] += static_cast<double>(sign_[i]) * b[i];
  }
  return out;
}

DenseMatrix CountSketch::MaterializeDense() const {
  DenseMatrix s(d_, m());
  for (std::size_t i = 0; i < bucket_.size(); ++i) s(bucket_[i], i) = sign_[i];
  return s;
}

std::string CountSketch::ToJson(bool explicit_arrays) const {
  nlohmann::json j;
  j["d"] = d_;
  j["m"] = m();
  if (seeded_) j["seed"] = seed_;
  if (explicit_arrays || !seeded_) {
    j["bucket"] = bucket_;
    j["sign"] = sign_;
  }
  return j.dump();
}

CountSketch CountSketch::FromJson(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kIo, std::string("bad sketch JSON: ") + e.what());
  }
  try {
    const auto d = j.at("d").get<std::size_t>();
    const auto m = j.at("m").get<std::size_t>();
    if (j.contains("bucket")) {
      auto sketch = FromArrays(d, j.at("bucket").get<std::vector<std::uint32_t>>(),
                               j.at("sign").get<std::vector<std::int8_t>>());
      Require(sketch.m() == m, ErrorCode::kDimensionMismatch,
              "sketch JSON: array length does not match m");
      if (j.contains("seed")) {
        CountSketch regenerated(d, m, j.at("seed").get<std::uint64_t>());
        Require(regenerated.bucket_ == sketch.bucket_ &&
                    regenerated.sign_ == sketch.sign_,
                ErrorCode::kInvalidArgument,
                "sketch JSON: arrays disagree with the seed");
        return regenerated;
      }
      return sketch;
    }
    return CountSketch(d, m, j.at("seed").get<std::uint64_t>());
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kIo, std::string("bad sketch JSON: ") + e.what());
  }
}

DenseMatrix OrthonormalBasis(const DenseMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  std::vector<Vector> q(n, Vector(m));
  for (std::size_t j = 0; j < n; ++j) {
    Vector& v = q[j];
    for (std::size_t i = 0; i < m; ++i) v[i] = a(i, j);
    const double original = std::sqrt(SquaredNorm(v));
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        const double c = Dot(q[k], v);
        for (std::size_t i = 0; i < m; ++i) v[i] -= c * q[k][i];
      }
    }
    const double norm = std::sqrt(SquaredNorm(v));
    Require(original > 0.0 &&
                norm > 1e3 * std::numeric_limits<double>::epsilon() * original,
            ErrorCode::kRankDeficient,
            "matrix columns are linearly dependent");
    for (double& x : v) x /= norm;
  }
  DenseMatrix out(m, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) out(i, j) = q[j][i];
  return out;
}

DistortionReport DistortionExact(const CountSketch& s, const DenseMatrix& a) {
  Require(a.rows() == s.m(), ErrorCode::kDimensionMismatch,
          "distortion: matrix rows do not match sketch m");
  Require(!a.empty(), ErrorCode::kInvalidArgument, "distortion of empty matrix");
  const SpectralSummary summary = ComputeSpectralSummary(a);
  Require(summary.rank_estimate == a.cols(), ErrorCode::kRankDeficient,
          "distortion needs a full column rank matrix (rank " +
              std::to_string(summary.rank_estimate) + " < " +
              std::to_string(a.cols()) + ")");

  const DenseMatrix sq = s.Apply(OrthonormalBasis(a));
  const Vector eig = SymmetricEigenvalues(Gram(sq));
  const double lambda_max = std::max(eig.front(), 0.0);
  const double lambda_min = std::max(eig.back(), 0.0);

  DistortionReport report;
  report.d = s.d();
  report.n = a.cols();
  report.sigma_max_SQ = std::sqrt(lambda_max);
  report.sigma_min_SQ = std::sqrt(lambda_min);
  report.epsilon_exact = std::max(1.0 - lambda_min, lambda_max - 1.0);
  return report;
}

}  // namespace ksk
