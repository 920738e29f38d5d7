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

#include "qden/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "qden/error.hpp"

namespace qden {
namespace {

void hermitize(CMat& m) {
  const std::size_t n = m.rows();
  for (std::size_t r = 0; r < n; ++r) {
    m(r, r) = m(r, r).real();
    for (std::size_t c = r + 1; c < n; ++c) {
      const Complex avg = 0.5 * (m(r, c) + std::conj(m(c, r)));
      m(r, c) = avg;
      m(c, r) = std::conj(avg);
    }
  }
}

}  // namespace

double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim() || !rho.mat.square() || !sigma.mat.square()) {
    throw InvalidArgument("uhlmann_fidelity: dimension mismatch (" + std::to_string(rho.dim()) + " vs " +
                          std::to_string(sigma.dim()) + ")");
  }
  const CMat root = sqrt_psd(rho.mat);
  CMat inner = matmul(matmul(root, sigma.mat), root);
  hermitize(inner);
  // Rounding leaves ~1e-17 eigenvalues on rank-deficient input; their square
  // roots would add ~1e-9 to the trace, so anything below the floor is dropped.
  const auto values = hermitian_eig(inner).values;
  const double floor = kFidelityEigenFloor * std::max(values.back(), 0.0);
  double trace_root = 0.0;
  for (double lambda : values)
    if (lambda > floor) trace_root += std::sqrt(lambda);
  return std::clamp(trace_root * trace_root, 0.0, 1.0);
}

double surrogate_fidelity(const CMat& rho, const CMat& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw InvalidArgument("surrogate_fidelity: shape mismatch");
  }
  const double nr = frob_norm(rho);
  const double ns = frob_norm(sigma);
  if (nr < kSurrogateNormFloor || ns < kSurrogateNormFloor) return 0.0;
  return std::clamp(frob_inner(rho, sigma).real() / (nr * ns), -1.0, 1.0);
}

double purity(const DensityMatrix& rho) {
  // tr(rho^2) = <rho^dagger, rho> for Hermitian rho.
  return frob_inner(rho.mat.adjoint(), rho.mat).real();
}

DensityMatrix project_to_dm(const CMat& m) {
  if (!m.square() || m.rows() == 0 || (m.rows() & (m.rows() - 1)) != 0) {
    throw InvalidArgument("project_to_dm: dimension must be a power of two");
  }
  CMat h = m;
  hermitize(h);
  auto eig = hermitian_eig(h);
  if (eig.values.front() >= -kProjectFixedPointTolerance &&
      std::abs(h.trace().real() - 1.0) <= kProjectFixedPointTolerance &&
      frob_distance(h, m) <= kProjectFixedPointTolerance) {
    return DensityMatrix::from_matrix(m);
  }
  double total = 0.0;
  for (double& lambda : eig.values) {
    lambda = std::max(lambda, 0.0);
    total += lambda;
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw NumericError("project_to_dm: no positive spectrum left after clipping (unreconstructable)");
  }
  for (double& lambda : eig.values) lambda /= total;
  CMat out = reconstruct(eig.values, eig.vectors);
  hermitize(out);
  return DensityMatrix::from_matrix(std::move(out));
}

}  // namespace qden
