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

#include "ksk/matrix.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <functional>
#include <string>

#include "ksk/error.hpp"
#include "ksk/rng.hpp"

namespace ksk {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols,
                         std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  Require(data_.size() == rows * cols, ErrorCode::kDimensionMismatch,
          "matrix data length " + std::to_string(data_.size()) +
              " does not match " + std::to_string(rows) + "x" +
              std::to_string(cols));
  for (double v : data_) {
    Require(std::isfinite(v), ErrorCode::kInvalidArgument,
            "matrix entries must be finite");
  }
}

DenseMatrix DenseMatrix::Identity(std::size_t n) {
  DenseMatrix eye(n, n);
  for (std::size_t i = 0; i < n; ++i) eye(i, i) = 1.0;
  return eye;
}

double Dot(std::span<const double> a, std::span<const double> b) {
  Require(a.size() == b.size(), ErrorCode::kDimensionMismatch,
          "dot product of vectors with different lengths");
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) sum += a[j] * b[j];
  return sum;
}

double SquaredNorm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return sum;
}

Vector RowNormsSquared(const DenseMatrix& m) {
  Vector norms(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) norms[i] = SquaredNorm(m.row(i));
  return norms;
}

Vector MatVec(const DenseMatrix& m, std::span<const double> x) {
  Require(x.size() == m.cols(), ErrorCode::kDimensionMismatch,
          "matvec: vector length " + std::to_string(x.size()) +
              " does not match matrix columns " + std::to_string(m.cols()));
  Vector y(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    double sum = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) sum += r[j] * x[j];
    y[i] = sum;
  }
  return y;
}

Vector TransposeMatVec(const DenseMatrix& m, std::span<const double> y) {
  Require(y.size() == m.rows(), ErrorCode::kDimensionMismatch,
          "transpose matvec: vector length does not match matrix rows");
  Vector x(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    const double yi = y[i];
    for (std::size_t j = 0; j < r.size(); ++j) x[j] += r[j] * yi;
  }
  return x;
}

DenseMatrix Gram(const DenseMatrix& m) {
  const std::size_t n = m.cols();
  DenseMatrix g(n, n);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    for (std::size_t p = 0; p < n; ++p) {
      const double rp = r[p];
      if (rp == 0.0) continue;
      for (std::size_t q = p; q < n; ++q) g(p, q) += rp * r[q];
    }
  }
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < p; ++q) g(p, q) = g(q, p);
  return g;
}

DenseMatrix Multiply(const DenseMatrix& a, const DenseMatrix& b) {
  Require(a.cols() == b.rows(), ErrorCode::kDimensionMismatch,
          "multiply: inner dimensions differ");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) sum += a(i, k) * b(k, j);
      c(i, j) = sum;
    }
  }
  return c;
}

Vector SymmetricEigenvalues(DenseMatrix a, int max_sweeps) {
  Require(a.rows() == a.cols(), ErrorCode::kDimensionMismatch,
          "eigenvalues need a square matrix");
  const std::size_t n = a.rows();
  const double total = std::sqrt(SquaredNorm(a.data()));

  auto off_norm = [&] {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
    return std::sqrt(off);
  };

  int sweep = 0;
  while (off_norm() > DBL_EPSILON * total) {
    if (++sweep > max_sweeps) {
      throw NoConvergence("Jacobi eigenvalue sweeps did not converge",
                          off_norm());
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
    }
  }

  Vector values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i);
  std::sort(values.begin(), values.end(), std::greater<>());
  return values;
}

Vector SingularValues(const DenseMatrix& m) {
  Vector values = SymmetricEigenvalues(Gram(m));
  for (double& v : values) v = std::sqrt(std::max(v, 0.0));
  return values;
}

double SpectralNorm(const DenseMatrix& m, double tol, std::size_t max_iters) {
  Require(!m.empty(), ErrorCode::kInvalidArgument,
          "spectral norm of an empty matrix");
  Require(tol > 0.0, ErrorCode::kInvalidArgument, "tolerance must be positive");
  if (SquaredNorm(m.data()) == 0.0) return 0.0;

  const std::size_t n = m.cols();
  Vector v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  Rng restart_rng(0x5eedc0ffeeULL);
  double lambda = 0.0;

  for (std::size_t it = 0; it < max_iters; ++it) {
    const Vector u = MatVec(m, v);
    const double rayleigh = SquaredNorm(u);
    Vector w = TransposeMatVec(m, u);
    const double w_norm = std::sqrt(SquaredNorm(w));
    if (w_norm == 0.0) {
      // v fell into the null space; start over from a random direction.
      for (double& x : v) x = restart_rng.Normal();
      const double scale = 1.0 / std::sqrt(SquaredNorm(v));
      for (double& x : v) x *= scale;
      continue;
    }
    for (std::size_t j = 0; j < n; ++j) v[j] = w[j] / w_norm;
    const double change = std::abs(rayleigh - lambda);
    lambda = rayleigh;
    if (it > 0 && change <= tol * lambda) return std::sqrt(lambda);
  }
  throw NoConvergence("power iteration did not converge",
                      std::sqrt(lambda));
}

SpectralSummary ComputeSpectralSummary(const DenseMatrix& m, double rank_tol) {
  Require(!m.empty(), ErrorCode::kInvalidArgument,
          "spectral summary of an empty matrix");
  Require(rank_tol >= 0.0, ErrorCode::kInvalidArgument,
          "rank tolerance must be nonnegative");

  SpectralSummary summary;
  for (double r : RowNormsSquared(m)) summary.frobenius_sq += r;
  Require(summary.frobenius_sq > 0.0, ErrorCode::kRankDeficient,
          "zero matrix has no nonzero singular value");

  const Vector eig = SymmetricEigenvalues(Gram(m));
  const double lambda_max = std::max(eig.front(), 0.0);
  summary.sigma_max = std::sqrt(lambda_max);

  // Gram eigenvalues below this are indistinguishable from round-off.
  const double noise_floor =
      8.0 * static_cast<double>(eig.size()) * DBL_EPSILON * lambda_max;
  summary.tolerance_used =
      std::max(rank_tol * summary.sigma_max, std::sqrt(noise_floor));

  for (double lambda : eig) {
    if (lambda <= noise_floor) break;
    const double sigma = std::sqrt(lambda);
    if (sigma <= rank_tol * summary.sigma_max) break;
    summary.sigma_min_nonzero = sigma;
    ++summary.rank_estimate;
  }
  return summary;
}

}  // namespace ksk
