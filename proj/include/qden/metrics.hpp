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

#include "qden/linalg.hpp"
#include "qden/quantum.hpp"

namespace qden {

/// Eigenvalues of sqrt(rho) sigma sqrt(rho) below this fraction of the largest
/// are treated as zero.
inline constexpr double kFidelityEigenFloor = 1e-14;

/// Squared Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, clamped to
/// [0, 1]. For pure rho = |psi><psi| this is <psi|sigma|psi>.
double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Re<rho, sigma> / (||rho||_F ||sigma||_F); 0 when either norm is below 1e-30.
double surrogate_fidelity(const CMat& rho, const CMat& sigma);

inline constexpr double kSurrogateNormFloor = 1e-30;

/// tr(rho^2).
double purity(const DensityMatrix& rho);

inline constexpr double kProjectFixedPointTolerance = 1e-12;

/// Nearest valid state along the clipped spectrum: Hermitize, zero negative
/// eigenvalues, renormalize the trace. Input that is already a state within
/// kProjectFixedPointTolerance is returned unchanged.
/// Throws NumericError when nothing positive survives the clipping.
DensityMatrix project_to_dm(const CMat& m);

}  // namespace qden
