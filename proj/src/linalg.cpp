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

#include "qden/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qden/error.hpp"

namespace qden {
namespace {

std::string shape_str(const CMat& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const CMat& a, const CMat& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidArgument(std::string(op) + ": shape mismatch " + shape_str(a) + " vs " + shape_str(b));
  }
}

constexpr int kMaxJacobiSweeps = 100;
constexpr double kJacobiOffDiagonalTolerance = 1e-12;

}  // namespace

CMat::CMat(std::size_t rows, std::size_t cols, std::vector<Complex> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw InvalidArgument("CMat: data length " + std::to_string(data_.size()) + " does not match " +
                          std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

CMat::CMat(std::initializer_list<std::initializer_list<Complex>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw InvalidArgument("CMat: ragged row literal");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

CMat CMat::identity(std::size_t n) {
  CMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMat CMat::diag(std::span<const double> values) {
  CMat m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

CMat CMat::diag(std::initializer_list<double> values) {
  return diag(std::span<const double>(values.begin(), values.size()));
}

CMat CMat::adjoint() const {
  CMat out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

Complex CMat::trace() const {
  Complex t = 0.0;
  const std::size_t n = std::min(rows_, cols_);
  for (std::size_t i = 0; i < n; ++i) t += (*this)(i, i);
  return t;
}

CMat& CMat::operator+=(const CMat& other) {
  require_same_shape(*this, other, "operator+");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

CMat& CMat::operator-=(const CMat& other) {
  require_same_shape(*this, other, "operator-");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

CMat& CMat::operator*=(Complex s) {
  for (auto& v : data_) v *= s;
  return *this;
}

CMat matmul(const CMat& a, const CMat& b) {
  if (a.cols() != b.rows()) {
    throw InvalidArgument("matmul: dimension mismatch " + shape_str(a) + " * " + shape_str(b));
  }
  CMat out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex(0.0)) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

CMat sandwich(const CMat& a, const CMat& b) { return matmul(matmul(a, b), a.adjoint()); }

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ar = 0; ar < a.rows(); ++ar)
    for (std::size_t ac = 0; ac < a.cols(); ++ac) {
      const Complex s = a(ar, ac);
      for (std::size_t br = 0; br < b.rows(); ++br)
        for (std::size_t bc = 0; bc < b.cols(); ++bc)
          out(ar * b.rows() + br, ac * b.cols() + bc) = s * b(br, bc);
    }
  return out;
}

Complex frob_inner(const CMat& a, const CMat& b) {
  require_same_shape(a, b, "frob_inner");
  Complex acc = 0.0;
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) acc += std::conj(da[i]) * db[i];
  return acc;
}

double frob_norm(const CMat& a) {
  double acc = 0.0;
  for (const auto& v : a.data()) acc += std::norm(v);
  return std::sqrt(acc);
}

double frob_distance(const CMat& a, const CMat& b) { return frob_norm(a - b); }

double hermiticity_error(const CMat& a) {
  if (!a.square()) return INFINITY;
  const double norm = frob_norm(a);
  if (norm == 0.0) return 0.0;
  double acc = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) acc += std::norm(a(r, c) - std::conj(a(c, r)));
  return std::sqrt(acc) / norm;
}

EigenDecomposition hermitian_eig(const CMat& input) {
  if (!input.square()) throw InvalidArgument("hermitian_eig: matrix is not square (" + shape_str(input) + ")");
  for (const auto& v : input.data()) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw InvalidArgument("hermitian_eig: non-finite entry");
    }
  }
  const double herm = hermiticity_error(input);
  if (herm > kHermitianTolerance) {
    throw InvalidArgument("hermitian_eig: matrix is not Hermitian (relative error " + std::to_string(herm) + ")");
  }

  const std::size_t n = input.rows();
  // Work on the exact Hermitian part so the rotations below stay consistent.
  CMat a(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) a(r, c) = 0.5 * (input(r, c) + std::conj(input(c, r)));
  for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();
  CMat v = CMat::identity(n);

  const double norm = frob_norm(a);
  bool converged = norm == 0.0;
  for (int sweep = 0; sweep < kMaxJacobiSweeps && !converged; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * std::norm(a(p, q));
    if (std::sqrt(off) < kJacobiOffDiagonalTolerance * norm) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double r = std::abs(apq);
        if (r == 0.0) continue;
        const Complex phase_conj = std::conj(apq / r);
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double zeta = (aqq - app) / (2.0 * r);
        double t;
        if (std::abs(zeta) > 1e150) {
          t = 0.5 / zeta;
        } else {
          t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // U = diag(1, e^{-i phi}) * [[c, s], [-s, c]] acting on coordinates (p, q).
        const Complex u_pp = c;
        const Complex u_pq = s;
        const Complex u_qp = -s * phase_conj;
        const Complex u_qq = c * phase_conj;

        for (std::size_t k = 0; k < n; ++k) {
          const Complex akp = a(k, p);
          const Complex akq = a(k, q);
          a(k, p) = akp * u_pp + akq * u_qp;
          a(k, q) = akp * u_pq + akq * u_qq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex apk = a(p, k);
          const Complex aqk = a(q, k);
          a(p, k) = std::conj(u_pp) * apk + std::conj(u_qp) * aqk;
          a(q, k) = std::conj(u_pq) * apk + std::conj(u_qq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = app - t * r;
        a(q, q) = aqq + t * r;
        for (std::size_t k = 0; k < n; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = vkp * u_pp + vkq * u_qp;
          v(k, q) = vkp * u_pq + vkq * u_qq;
        }
      }
    }
  }
  if (!converged) {
    throw NumericError("hermitian_eig: Jacobi iteration did not converge in " + std::to_string(kMaxJacobiSweeps) +
                       " sweeps");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
  EigenDecomposition out{std::vector<double>(n), CMat(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

CMat reconstruct(std::span<const double> values, const CMat& vectors) {
  const std::size_t n = vectors.rows();
  if (values.size() != vectors.cols()) throw InvalidArgument("reconstruct: eigenvalue count mismatch");
  CMat out(n, n);
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double lambda = values[k];
    if (lambda == 0.0) continue;
    for (std::size_t r = 0; r < n; ++r) {
      const Complex vr = lambda * vectors(r, k);
      for (std::size_t c = 0; c < n; ++c) out(r, c) += vr * std::conj(vectors(c, k));
    }
  }
  return out;
}

CMat sqrt_psd(const CMat& a) {
  auto eig = hermitian_eig(a);
  for (double& lambda : eig.values) {
    if (lambda < -kPsdClampTolerance) {
      throw InvalidArgument("sqrt_psd: matrix is not positive semidefinite (eigenvalue " + std::to_string(lambda) +
                            ")");
    }
    lambda = lambda > 0.0 ? std::sqrt(lambda) : 0.0;
  }
  CMat b = reconstruct(eig.values, eig.vectors);
  const std::size_t n = b.rows();
  for (std::size_t r = 0; r < n; ++r) {
    b(r, r) = b(r, r).real();
    for (std::size_t c = r + 1; c < n; ++c) {
      const Complex avg = 0.5 * (b(r, c) + std::conj(b(c, r)));
      b(r, c) = avg;
      b(c, r) = std::conj(avg);
    }
  }
  return b;
}

}  // namespace qden
