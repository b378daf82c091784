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

// Matrix files.
//
// Binary ("KSKM"): the four magic bytes, rows and cols as little-endian u64,
// then rows*cols little-endian IEEE-754 doubles in row-major order. Round
// trips are bit exact.
//
// Matrix Market: the dense "array real general" variant, entries written
// column-major as the format requires, with 17 significant digits so that
// text round trips are also exact.
//
// Vectors are stored as n x 1 matrices in both formats.

#ifndef KSK_IO_HPP_
#define KSK_IO_HPP_

#include <iosfwd>
#include <string>

#include "ksk/matrix.hpp"

namespace ksk {

enum class MatrixFormat { kBinary, kMatrixMarket };

void WriteBinary(std::ostream& out, const DenseMatrix& m);
DenseMatrix ReadBinary(std::istream& in);

void WriteMatrixMarket(std::ostream& out, const DenseMatrix& m);
DenseMatrix ReadMatrixMarket(std::istream& in);

void SaveMatrix(const std::string& path, const DenseMatrix& m,
                MatrixFormat format = MatrixFormat::kBinary);

// Detects the format from the leading bytes.
DenseMatrix LoadMatrix(const std::string& path);

// Accepts n x 1 or 1 x n matrices.
Vector LoadVector(const std::string& path);
void SaveVector(const std::string& path, const Vector& v,
                MatrixFormat format = MatrixFormat::kBinary);

}  // namespace ksk

#endif  // KSK_IO_HPP_
