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

#include "ksk/io.hpp"

#include <array>
#include <bit>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "ksk/error.hpp"

namespace ksk {
namespace {

constexpr std::array<char, 4> kMagic = {'K', 'S', 'K', 'M'};
constexpr std::string_view kMarketBanner = "%%MatrixMarket";

void PutU64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes;
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

std::uint64_t GetU64(std::istream& in) {
  std::array<unsigned char, 8> bytes;
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  Require(in.good(), ErrorCode::kIo, "truncated matrix header");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

std::string Lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

void WriteBinary(std::ostream& out, const DenseMatrix& m) {
  out.write(kMagic.data(), kMagic.size());
  PutU64(out, m.rows());
  PutU64(out, m.cols());
  for (double v : m.data()) PutU64(out, std::bit_cast<std::uint64_t>(v));
  Require(out.good(), ErrorCode::kIo, "failed writing binary matrix");
}

DenseMatrix ReadBinary(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  Require(in.good() && magic == kMagic, ErrorCode::kIo,
          "not a KSKM binary matrix");
  const std::uint64_t rows = GetU64(in);
  const std::uint64_t cols = GetU64(in);
  Require(cols == 0 || rows <= std::numeric_limits<std::uint64_t>::max() / 8 / cols,
          ErrorCode::kIo, "binary matrix dimensions overflow");
  std::vector<double> data(rows * cols);
  for (double& v : data) v = std::bit_cast<double>(GetU64(in));
  return DenseMatrix(rows, cols, std::move(data));
}

void WriteMatrixMarket(std::ostream& out, const DenseMatrix& m) {
  out << kMarketBanner << " matrix array real general\n";
  out << m.rows() << ' ' << m.cols() << '\n';
  char buf[32];
  for (std::size_t j = 0; j < m.cols(); ++j) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g\n", m(i, j));
      out << buf;
    }
  }
  Require(out.good(), ErrorCode::kIo, "failed writing Matrix Market file");
}

DenseMatrix ReadMatrixMarket(std::istream& in) {
  std::string line;
  Require(static_cast<bool>(std::getline(in, line)), ErrorCode::kIo,
          "empty Matrix Market file");
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  Require(tag == kMarketBanner, ErrorCode::kIo, "missing %%MatrixMarket banner");
  Require(Lower(object) == "matrix" && Lower(format) == "array" &&
              Lower(field) == "real" && Lower(symmetry) == "general",
          ErrorCode::kIo,
          "only 'matrix array real general' Matrix Market files are supported");

  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream dims(line);
  std::size_t rows = 0, cols = 0;
  Require(static_cast<bool>(dims >> rows >> cols), ErrorCode::kIo,
          "bad Matrix Market size line");

  std::vector<double> data(rows * cols);
  for (std::size_t j = 0; j < cols; ++j) {
    for (std::size_t i = 0; i < rows; ++i) {
      std::string token;
      Require(static_cast<bool>(in >> token), ErrorCode::kIo,
              "Matrix Market file ended early");
      char* end = nullptr;
      const double v = std::strtod(token.c_str(), &end);
      Require(end != token.c_str() && *end == '\0', ErrorCode::kIo,
              "bad Matrix Market entry '" + token + "'");
      data[i * cols + j] = v;
    }
  }
  return DenseMatrix(rows, cols, std::move(data));
}

void SaveMatrix(const std::string& path, const DenseMatrix& m,
                MatrixFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  Require(out.is_open(), ErrorCode::kIo, "cannot open '" + path + "' for writing");
  if (format == MatrixFormat::kBinary) {
    WriteBinary(out, m);
  } else {
    WriteMatrixMarket(out, m);
  }
  out.close();
  Require(!out.fail(), ErrorCode::kIo, "failed writing '" + path + "'");
}

DenseMatrix LoadMatrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  Require(in.is_open(), ErrorCode::kIo, "cannot open '" + path + "'");
  std::array<char, 4> head{};
  in.read(head.data(), head.size());
  const bool binary = in.gcount() == 4 && head == kMagic;
  in.clear();
  in.seekg(0);
  try {
    return binary ? ReadBinary(in) : ReadMatrixMarket(in);
  } catch (const Error& e) {
    Fail(e.code(), path + ": " + e.what());
  }
}

Vector LoadVector(const std::string& path) {
  DenseMatrix m = LoadMatrix(path);
  Require(m.rows() == 1 || m.cols() == 1, ErrorCode::kDimensionMismatch,
          path + ": expected a vector (n x 1 matrix)");
  return Vector(m.data().begin(), m.data().end());
}

void SaveVector(const std::string& path, const Vector& v, MatrixFormat format) {
  SaveMatrix(path, DenseMatrix(v.size(), 1, v), format);
}

}  // namespace ksk
