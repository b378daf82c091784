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

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "ksk/countsketch.hpp"
#include "ksk/error.hpp"
#include "ksk/rng.hpp"
#include "oracles.hpp"

namespace ksk {
namespace {

DenseMatrix FromNested(const oracle::Mat& m) {
  DenseMatrix out(m.size(), m.empty() ? 0 : m[0].size());
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) = m[i][j];
  return out;
}

oracle::Mat ToNested(const DenseMatrix& m) {
  oracle::Mat out(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

bool BitEqual(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// Dense d x m matrix built straight from the arrays, without the library.
oracle::Mat DenseOf(const CountSketch& s) {
  oracle::Mat out(s.d(), std::vector<double>(s.m(), 0.0));
  for (std::size_t i = 0; i < s.m(); ++i) out[s.bucket()[i]][i] = s.sign()[i];
  return out;
}

struct GeneralizedSpectrum {
  double lambda_min;
  double lambda_max;
};

// Extreme eigenvalues of C^{-1} B with C = A^T A and B = (SA)^T (SA),
// through the symmetric form L^{-1} B L^{-T}.
oracle::Mat Whitened(const oracle::Mat& b, const oracle::Mat& l) {
  const std::size_t n = l.size();
  oracle::Mat linv(n, std::vector<double>(n, 0.0));
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = i == c ? 1.0 : 0.0;
      for (std::size_t k = 0; k < i; ++k) s -= l[i][k] * linv[k][c];
      linv[i][c] = s / l[i][i];
    }
  }
  oracle::Mat lt(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) lt[i][j] = linv[j][i];
  return oracle::Multiply(oracle::Multiply(linv, b), lt);
}

double EpsilonOracle(const oracle::Mat& a, const oracle::Mat& sa) {
  const oracle::Mat w =
      Whitened(oracle::GramOf(sa), oracle::Cholesky(oracle::GramOf(a)));
  const std::vector<double> ev = oracle::EigenvaluesClassicalJacobi(w);
  return std::max(1.0 - ev.back(), ev.front() - 1.0);
}

TEST_CASE("construction preconditions") {
  CHECK_THROWS_AS(CountSketch(0, 10, 1), Error);
  CHECK_THROWS_AS(CountSketch(10, 10, 1), Error);
  try {
    CountSketch(12, 10, 1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidArgument);
    CHECK(std::string(e.what()).find("d < m") != std::string::npos);
  }
  CHECK_THROWS_AS(CountSketch::FromArrays(2, {0, 2}, {1, 1}), Error);
  CHECK_THROWS_AS(CountSketch::FromArrays(2, {0, 1}, {1, 0}), Error);
  CHECK_THROWS_AS(CountSketch::FromArrays(2, {0, 1}, {1}), Error);
}

TEST_CASE("single bucket") {
  const CountSketch s(1, 3, 99);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(s.bucket()[i] == 0);
    CHECK(std::abs(s.sign()[i]) == 1);
  }
}

TEST_CASE("materialized structure: one signed unit per column") {
  const CountSketch s(4, 1000, 42);
  const DenseMatrix dense = s.MaterializeDense();
  REQUIRE(dense.rows() == 4);
  REQUIRE(dense.cols() == 1000);
  for (std::size_t i = 0; i < 1000; ++i) {
    int nonzeros = 0;
    double sum = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
      if (dense(j, i) != 0.0) {
        ++nonzeros;
        CHECK(std::abs(dense(j, i)) == 1.0);
      }
      sum += dense(j, i);
    }
    CHECK(nonzeros == 1);
    CHECK(std::abs(sum) == 1.0);
  }
  CHECK(CountSketch::FromArrays(2, {0, 1}, {1, 1}).MaterializeDense() ==
        DenseMatrix::Identity(2));
}

TEST_CASE("buckets and signs are roughly uniform") {
  const std::size_t d = 8, m = 80000;
  const CountSketch s(d, m, 7);
  std::vector<double> counts(d, 0.0);
  double plus = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    counts[s.bucket()[i]] += 1.0;
    plus += s.sign()[i] > 0;
  }
  const double expect = static_cast<double>(m) / d;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expect) * (c - expect) / expect;
  CHECK(chi2 < 24.32);  // chi-square, 7 dof, alpha = 0.001
  CHECK(std::abs(plus / m - 0.5) < 4.0 * 0.5 / std::sqrt(static_cast<double>(m)));
}

TEST_CASE("reconstruction from seed is deterministic and seeds differ") {
  const CountSketch a(50, 400, 123), b(50, 400, 123), c(50, 400, 124);
  CHECK(std::equal(a.bucket().begin(), a.bucket().end(), b.bucket().begin()));
  CHECK(std::equal(a.sign().begin(), a.sign().end(), b.sign().begin()));
  CHECK_FALSE(std::equal(a.bucket().begin(), a.bucket().end(), c.bucket().begin()));
}

TEST_CASE("three-row hand example") {
  const CountSketch s = CountSketch::FromArrays(2, {0, 1, 0}, {1, -1, 1});
  const oracle::Mat a = {{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}};
  const DenseMatrix sa = s.Apply(FromNested(a));
  CHECK(sa == DenseMatrix(2, 2, {6.0, 8.0, -3.0, -4.0}));
  CHECK(sa == FromNested(oracle::Multiply(DenseOf(s), a)));
  const Vector ones = {1.0, 1.0, 1.0};
  CHECK(s.Apply(ones) == Vector{2.0, -1.0});
}

TEST_CASE("zero inputs, one-hot vectors and permutations") {
  const CountSketch s(5, 30, 3);
  CHECK(s.Apply(DenseMatrix(30, 4)) == DenseMatrix(5, 4));
  CHECK(s.Apply(Vector(30, 0.0)) == Vector(5, 0.0));
  for (std::size_t i = 0; i < 30; ++i) {
    Vector e(30, 0.0);
    e[i] = 1.0;
    Vector want(5, 0.0);
    want[s.bucket()[i]] = s.sign()[i];
    CHECK(s.Apply(e) == want);
  }

  std::vector<std::uint32_t> perm(6);
  std::iota(perm.begin(), perm.end(), 0u);
  std::mt19937 gen(5);
  std::shuffle(perm.begin(), perm.end(), gen);
  const std::vector<std::int8_t> signs = {1, -1, -1, 1, 1, -1};
  const CountSketch p = CountSketch::FromArrays(6, perm, signs);
  const DenseMatrix a = FromNested(oracle::Random(6, 3, 8));
  const DenseMatrix pa = p.Apply(a);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(pa(perm[i], j) == signs[i] * a(i, j));
}

TEST_CASE("apply matches the dense oracle bit for bit") {
  std::mt19937 gen(11);
  for (int t = 0; t < 100; ++t) {
    const std::size_t m = 2 + gen() % 49;
    const std::size_t d = 1 + gen() % std::min<std::size_t>(20, m - 1);
    const std::size_t n = 1 + gen() % 10;
    const CountSketch s(d, m, gen());
    const oracle::Mat a = oracle::Random(m, n, gen());
    const DenseMatrix got = s.Apply(FromNested(a));
    const DenseMatrix want = FromNested(oracle::Multiply(DenseOf(s), a));
    CHECK(BitEqual(got.data(), want.data()));

    std::vector<double> b = oracle::Random(1, m, gen())[0];
    oracle::Mat bcol(m, std::vector<double>(1));
    for (std::size_t i = 0; i < m; ++i) bcol[i][0] = b[i];
    const oracle::Mat sb = oracle::Multiply(DenseOf(s), bcol);
    std::vector<double> sb_flat(d);
    for (std::size_t j = 0; j < d; ++j) sb_flat[j] = sb[j][0];
    CHECK(BitEqual(s.Apply(b), sb_flat));
  }
  const CountSketch s(4, 20, 1);
  const oracle::Mat a = oracle::Random(20, 5, 2);
  CHECK(BitEqual(s.Apply(FromNested(a)).data(),
                 Multiply(s.MaterializeDense(), FromNested(a)).data()));
}

TEST_CASE("dimension mismatch") {
  const CountSketch s(3, 10, 1);
  CHECK_THROWS_AS(s.Apply(DenseMatrix(9, 2)), Error);
  CHECK_THROWS_AS(s.Apply(Vector(11, 1.0)), Error);
}

TEST_CASE("isometry in expectation") {
  const std::size_t m = 200, d = 20, seeds = 4000;
  const std::vector<double> b = oracle::Random(1, m, 77)[0];
  double bb = 0.0;
  for (double v : b) bb += v * v;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t t = 0; t < seeds; ++t) {
    const Vector sb = CountSketch(d, m, 1000 + t).Apply(b);
    double q = 0.0;
    for (double v : sb) q += v * v;
    q /= bb;
    sum += q;
    sum_sq += q * q;
  }
  const double mean = sum / seeds;
  const double var = (sum_sq - seeds * mean * mean) / (seeds - 1);
  CHECK(std::abs(mean - 1.0) <= 5.0 * std::sqrt(var / seeds));
}

TEST_CASE("orthonormal basis") {
  const DenseMatrix a = FromNested(oracle::Random(60, 6, 4));
  const DenseMatrix q = OrthonormalBasis(a);
  const DenseMatrix g = Gram(q);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j)
      CHECK(std::abs(g(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-13);
  DenseMatrix dup(3, 2, {1, 2, 2, 4, 3, 6});
  CHECK_THROWS_AS(OrthonormalBasis(dup), Error);
}

TEST_CASE("distortion examples") {
  const DenseMatrix a = FromNested(oracle::Random(6, 3, 8));
  const CountSketch perm = CountSketch::FromArrays(6, {3, 0, 5, 1, 4, 2}, {1, -1, 1, 1, -1, -1});
  CHECK(DistortionExact(perm, a).epsilon_exact <= 1e-12);

  const CountSketch one(1, 40, 9);
  const DistortionReport r = DistortionExact(one, FromNested(oracle::Random(40, 2, 10)));
  CHECK(r.epsilon_exact >= 1.0 - 1e-12);
  CHECK(r.d == 1);
  CHECK(r.n == 2);

  DenseMatrix dup(4, 2, {1, 2, 2, 4, 3, 6, 4, 8});
  try {
    DistortionExact(CountSketch(2, 4, 1), dup);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kRankDeficient);
  }
}

TEST_CASE("distortion report fields are consistent") {
  const DenseMatrix a = FromNested(oracle::Random(500, 8, 12));
  const DistortionReport r = DistortionExact(CountSketch(64, 500, 5), a);
  CHECK(r.epsilon_exact >= 0.0);
  CHECK(r.sigma_max_SQ >= r.sigma_min_SQ);
  const double want = std::max(1.0 - r.sigma_min_SQ * r.sigma_min_SQ,
                               r.sigma_max_SQ * r.sigma_max_SQ - 1.0);
  CHECK(r.epsilon_exact == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("distortion depends only on the range") {
  for (std::uint32_t seed = 0; seed < 5; ++seed) {
    const oracle::Mat a = oracle::Random(300, 6, 20 + seed);
    oracle::Mat r = oracle::Random(6, 6, 40 + seed);
    for (std::size_t i = 0; i < 6; ++i) r[i][i] += 4.0;  // well conditioned
    const CountSketch s(36, 300, seed);
    const double e1 = DistortionExact(s, FromNested(a)).epsilon_exact;
    const double e2 = DistortionExact(s, FromNested(oracle::Multiply(a, r))).epsilon_exact;
    CHECK(std::abs(e2 - e1) <= 1e-9 * e1);
  }
}

TEST_CASE("distortion matches the generalized-eigenvalue oracle") {
  for (std::uint32_t seed = 0; seed < 10; ++seed) {
    const oracle::Mat a = oracle::Random(400, 5, 300 + seed);
    const CountSketch s(25, 400, seed);
    const oracle::Mat sa = ToNested(s.Apply(FromNested(a)));
    CHECK(std::abs(DistortionExact(s, FromNested(a)).epsilon_exact -
                   EpsilonOracle(a, sa)) <= 1e-9);
  }
}

// Largest |x^T B x / x^T C x - 1| over random directions, then the same
// quantity after polishing the best directions by power iteration on the
// whitened pencil.
struct SampledEstimate {
  double raw;
  double refined;
};

SampledEstimate SampledDistortion(const oracle::Mat& a, const oracle::Mat& sa,
                                  std::size_t samples, std::mt19937_64& gen) {
  const std::size_t n = a[0].size();
  const oracle::Mat c = oracle::GramOf(a), b = oracle::GramOf(sa);
  std::normal_distribution<double> normal;
  double lo = INFINITY, hi = -INFINITY;
  std::vector<double> x(n), arg_lo(n), arg_hi(n);
  for (std::size_t t = 0; t < samples; ++t) {
    for (double& v : x) v = normal(gen);
    const double q = oracle::Quadratic(b, x) / oracle::Quadratic(c, x);
    if (q < lo) lo = q, arg_lo = x;
    if (q > hi) hi = q, arg_hi = x;
  }
  const double raw = std::max(1.0 - lo, hi - 1.0);

  const oracle::Mat l = oracle::Cholesky(c);
  const oracle::Mat w = Whitened(b, l);
  auto to_whitened = [&](const std::vector<double>& v) {
    std::vector<double> y(n, 0.0);  // y = L^T v
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = i; k < n; ++k) y[i] += l[k][i] * v[k];
    return y;
  };
  auto rayleigh = [&](const std::vector<double>& y) {
    return oracle::Quadratic(w, y) / std::inner_product(y.begin(), y.end(), y.begin(), 0.0);
  };
  auto polish = [&](std::vector<double> y, double shift, double dir) {
    for (int it = 0; it < 300; ++it) {
      std::vector<double> z(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) z[i] += dir * w[i][j] * y[j];
        z[i] += shift * y[i];
      }
      const double norm = std::sqrt(std::inner_product(z.begin(), z.end(), z.begin(), 0.0));
      for (std::size_t i = 0; i < n; ++i) y[i] = z[i] / norm;
    }
    return rayleigh(y);
  };
  const double top = polish(to_whitened(arg_hi), 0.0, 1.0);
  const double bottom = polish(to_whitened(arg_lo), top, -1.0);
  return {raw, std::max(1.0 - std::min(bottom, lo), std::max(top, hi) - 1.0)};
}

TEST_CASE("distortion against sampled ratios, m=5000 n=20 d=400") {
  const std::size_t m = 5000, n = 20, d = 400, seeds = 200;
  std::mt19937_64 gen(2026);
  std::size_t refined_close = 0, raw_close = 0;
  for (std::size_t t = 0; t < seeds; ++t) {
    const oracle::Mat a = oracle::Random(m, n, static_cast<std::uint32_t>(t));
    const CountSketch s(d, m, 9000 + t);
    const oracle::Mat sa = ToNested(s.Apply(FromNested(a)));
    const double exact = DistortionExact(s, FromNested(a)).epsilon_exact;
    const SampledEstimate est = SampledDistortion(a, sa, 10000, gen);
    CHECK(est.raw <= exact + 1e-9);
    CHECK(est.refined <= exact + 1e-9);
    raw_close += std::abs(est.raw - exact) <= 0.02;
    refined_close += std::abs(est.refined - exact) <= 0.02;
  }
  MESSAGE("raw samples within 0.02: " << raw_close << "/" << seeds
          << ", polished: " << refined_close << "/" << seeds);
  CHECK(refined_close >= 198);
}

TEST_CASE("median distortion shrinks as d grows") {
  const std::size_t m = 2000, n = 10, seeds = 60;
  std::vector<double> small, large;
  for (std::size_t t = 0; t < seeds; ++t) {
    const DenseMatrix a = FromNested(oracle::Random(m, n, 600 + t));
    small.push_back(DistortionExact(CountSketch(n * n, m, t), a).epsilon_exact);
    large.push_back(DistortionExact(CountSketch(4 * n * n, m, t), a).epsilon_exact);
  }
  std::sort(small.begin(), small.end());
  std::sort(large.begin(), large.end());
  CHECK(large[seeds / 2] <= small[seeds / 2]);
}

TEST_CASE("json round trips") {
  const CountSketch s(7, 50, 31337);
  const CountSketch back = CountSketch::FromJson(s.ToJson());
  CHECK(back.seeded());
  CHECK(back.seed() == 31337);
  CHECK(std::equal(back.bucket().begin(), back.bucket().end(), s.bucket().begin()));
  CHECK(std::equal(back.sign().begin(), back.sign().end(), s.sign().begin()));

  const CountSketch with_arrays = CountSketch::FromJson(s.ToJson(true));
  CHECK(std::equal(with_arrays.sign().begin(), with_arrays.sign().end(), s.sign().begin()));

  const CountSketch fixed = CountSketch::FromArrays(2, {0, 1, 0}, {1, -1, 1});
  const CountSketch fixed_back = CountSketch::FromJson(fixed.ToJson());
  CHECK_FALSE(fixed_back.seeded());
  CHECK(fixed_back.Apply(Vector{1.0, 1.0, 1.0}) == Vector{2.0, -1.0});

  std::string tampered = s.ToJson(true);
  const auto pos = tampered.find("\"sign\":[") + 8;
  tampered[pos] = tampered[pos] == '1' ? '-' : '1';
  if (tampered[pos] == '-') tampered.insert(pos + 1, "1");
  CHECK_THROWS_AS(CountSketch::FromJson(tampered), Error);
  CHECK_THROWS_AS(CountSketch::FromJson("{not json"), Error);
  CHECK_THROWS_AS(CountSketch::FromJson(R"({"d":3})"), Error);
}

}  // namespace
}  // namespace ksk
