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

// Dense row-major matrices and the small set of kernels the solvers need.
//
// Every reduction in this file sums left to right in index order, with no
// pairwise or compensated summation. Tests rely on that to compare against
// naive loops bit for bit.

#ifndef KSK_MATRIX_HPP_
#define KSK_MATRIX_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace ksk {

using Vector = std::vector<double>;

class DenseMatrix {
 public:
  DenseMatrix() = default;

  // rows x cols of zeros.
  DenseMatrix(std::size_t rows, std::size_t cols);

  // Takes ownership of row-major data. Throws if the length is not
  // rows * cols or an entry is not finite.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix Identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Left-to-right inner product. Lengths must match.
double Dot(std::span<const double> a, std::span<const double> b);

double SquaredNorm(std::span<const double> v);

// Entry i is the sum of squares of row i.
Vector RowNormsSquared(const DenseMatrix& m);

// m * x. Throws kDimensionMismatch if x.size() != m.cols().
Vector MatVec(const DenseMatrix& m, std::span<const double> x);

// m^T * y. Throws kDimensionMismatch if y.size() != m.rows().
Vector TransposeMatVec(const DenseMatrix& m, std::span<const double> y);

// m^T * m (cols x cols).
DenseMatrix Gram(const DenseMatrix& m);

// a * b, accumulating over the inner index in increasing order.
DenseMatrix Multiply(const DenseMatrix& a, const DenseMatrix& b);

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted in
// decreasing order. Only the upper triangle is trusted to be symmetric with
// the lower one; the input is taken by value and destroyed. Cost is O(n^3)
// per sweep.
Vector SymmetricEigenvalues(DenseMatrix sym, int max_sweeps = 100);

// Singular values in decreasing order, as square roots of the Gram
// eigenvalues (negative round-off clamped to zero).
Vector SingularValues(const DenseMatrix& m);

// Largest singular value by power iteration on m^T m. The start vector is
// all-ones normalized; if an iterate collapses to zero the iteration restarts
// from a fixed-seed random vector. Throws NoConvergence (with the best
// estimate) when the relative change of the Rayleigh quotient has not dropped
// below tol within max_iters products.
double SpectralNorm(const DenseMatrix& m, double tol = 1e-12,
                    std::size_t max_iters = 10000);

struct SpectralSummary {
  double sigma_max = 0.0;          // sigma_1
  double sigma_min_nonzero = 0.0;  // sigma_r
  double frobenius_sq = 0.0;
  std::size_t rank_estimate = 0;
  // Absolute singular-value threshold below which a value counted as zero.
  double tolerance_used = 0.0;
};

inline constexpr double kDefaultRankTol = 1e-10;

// Full singular spectrum through the cols x cols Gram matrix (O(n^3), meant
// for n up to a few thousand). sigma_r is the smallest singular value above
// rank_tol * sigma_1; Gram eigenvalues at round-off level are treated as
// zero regardless of rank_tol. frobenius_sq is the sum of row norms.
// Throws kRankDeficient for the zero matrix.
SpectralSummary ComputeSpectralSummary(const DenseMatrix& m,
                                       double rank_tol = kDefaultRankTol);

}  // namespace ksk

#endif  // KSK_MATRIX_HPP_
