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

// Test-only reference computations. Nothing here calls into the library's
// numerical kernels, so they can serve as independent checks.

#ifndef KSK_TESTS_ORACLES_HPP_
#define KSK_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using Mat = std::vector<std::vector<double>>;  // row-major, nested

inline Mat Random(std::size_t rows, std::size_t cols, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal;
  Mat m(rows, std::vector<double>(cols));
  for (auto& r : m)
    for (auto& v : r) v = normal(gen);
  return m;
}

// Triple loop, accumulating over k in increasing order starting from 0.0.
inline Mat Multiply(const Mat& a, const Mat& b) {
  const std::size_t n = a.size(), p = b.size(), q = b.empty() ? 0 : b[0].size();
  Mat c(n, std::vector<double>(q, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < q; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < p; ++k) sum += a[i][k] * b[k][j];
      c[i][j] = sum;
    }
  return c;
}

inline std::vector<double> MatVec(const Mat& a, const std::vector<double>& x) {
  std::vector<double> y(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) sum += a[i][j] * x[j];
    y[i] = sum;
  }
  return y;
}

inline Mat GramOf(const Mat& a) {
  const std::size_t n = a.empty() ? 0 : a[0].size();
  Mat g(n, std::vector<double>(n, 0.0));
  for (const auto& row : a)
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q) g[p][q] += row[p] * row[q];
  return g;
}

// Classical Jacobi: always rotate away the largest off-diagonal entry.
// Eigenvalues sorted in decreasing order.
inline std::vector<double> EigenvaluesClassicalJacobi(Mat a) {
  const std::size_t n = a.size();
  for (int iter = 0; iter < 100000; ++iter) {
    std::size_t p = 0, q = 1;
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (std::abs(a[i][j]) > best) {
          best = std::abs(a[i][j]);
          p = i;
          q = j;
        }
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(a[i][i]));
    if (n < 2 || best <= 1e-300 || best <= 1e-17 * scale) break;
    const double theta = 0.5 * std::atan2(2.0 * a[p][q], a[q][q] - a[p][p]);
    const double c = std::cos(theta), s = std::sin(theta);
    for (std::size_t k = 0; k < n; ++k) {
      const double kp = a[k][p], kq = a[k][q];
      a[k][p] = c * kp - s * kq;
      a[k][q] = s * kp + c * kq;
    }
    for (std::size_t k = 0; k < n; ++k) {
      const double pk = a[p][k], qk = a[q][k];
      a[p][k] = c * pk - s * qk;
      a[q][k] = s * pk + c * qk;
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

// Cholesky factor L (lower) of a symmetric positive definite matrix.
inline Mat Cholesky(const Mat& a) {
  const std::size_t n = a.size();
  Mat l(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= l[j][k] * l[j][k];
    l[j][j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      l[i][j] = s / l[j][j];
    }
  }
  return l;
}

// Solves (L L^T) x = b.
inline std::vector<double> CholeskySolve(const Mat& l, std::vector<double> b) {
  const std::size_t n = l.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) b[i] -= l[i][k] * b[k];
    b[i] /= l[i][i];
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) b[i] -= l[k][i] * b[k];
    b[i] /= l[i][i];
  }
  return b;
}

inline double Quadratic(const Mat& g, const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) s += x[i] * g[i][j] * x[j];
  return s;
}

}  // namespace oracle

#endif  // KSK_TESTS_ORACLES_HPP_
