// Copyright 2026 The qden Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace qden {

using Complex = std::complex<double>;

/// Dense row-major complex matrix.
class CMat {
 public:
  CMat() = default;
  CMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  CMat(std::size_t rows, std::size_t cols, std::vector<Complex> data);
  /// Row-list literal, e.g. CMat{{1, 0}, {0, 1}}.
  CMat(std::initializer_list<std::initializer_list<Complex>> rows);

  static CMat identity(std::size_t n);
  static CMat zeros(std::size_t rows, std::size_t cols) { return CMat(rows, cols); }
  static CMat diag(std::span<const double> values);
  static CMat diag(std::initializer_list<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool square() const noexcept { return rows_ == cols_; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<Complex> data() noexcept { return data_; }
  std::span<const Complex> data() const noexcept { return data_; }

  CMat adjoint() const;
  Complex trace() const;

  CMat& operator+=(const CMat& other);
  CMat& operator-=(const CMat& other);
  CMat& operator*=(Complex s);

  friend CMat operator+(CMat a, const CMat& b) { return a += b; }
  friend CMat operator-(CMat a, const CMat& b) { return a -= b; }
  friend CMat operator*(CMat a, Complex s) { return a *= s; }
  friend CMat operator*(Complex s, CMat a) { return a *= s; }
  friend bool operator==(const CMat&, const CMat&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

/// Matrix product; throws InvalidArgument when a.cols() != b.rows().
CMat matmul(const CMat& a, const CMat& b);
/// a * b * a^dagger.
CMat sandwich(const CMat& a, const CMat& b);
CMat kron(const CMat& a, const CMat& b);

/// <A, B> = sum conj(A_ij) * B_ij.
Complex frob_inner(const CMat& a, const CMat& b);
double frob_norm(const CMat& a);
double frob_distance(const CMat& a, const CMat& b);

/// ||A - A^dagger||_F / ||A||_F (0 for the zero matrix).
double hermiticity_error(const CMat& a);

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  CMat vectors;                // column k pairs with values[k]
};

inline constexpr double kHermitianTolerance = 1e-10;

/// Cyclic complex Jacobi. Rejects non-square or non-Hermitian input; throws
/// NumericError if the sweep limit is hit before convergence.
EigenDecomposition hermitian_eig(const CMat& a);

/// V diag(values) V^dagger.
CMat reconstruct(std::span<const double> values, const CMat& vectors);

inline constexpr double kPsdClampTolerance = 1e-10;

/// Principal square root of a Hermitian PSD matrix. Eigenvalues in
/// [-1e-10, 0) are treated as zero; anything more negative is rejected.
CMat sqrt_psd(const CMat& a);

}  // namespace qden
