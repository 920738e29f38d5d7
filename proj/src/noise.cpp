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

#include "qden/noise.hpp"

#include <cmath>

#include "qden/error.hpp"
#include "qden/rng.hpp"

namespace qden {
namespace {

constexpr std::string_view kNoiseNames[] = {"bitflip", "depolarizing", "amplitude_damping", "phase_damping",
                                            "mixed"};

}  // namespace

std::string_view noise_kind_name(NoiseKind kind) { return kNoiseNames[static_cast<std::size_t>(kind)]; }

std::optional<NoiseKind> parse_noise_kind(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kNoiseNames); ++i)
    if (kNoiseNames[i] == name) return static_cast<NoiseKind>(i);
  return std::nullopt;
}

NoiseKind noise_kind_from_code(std::uint8_t code) {
  if (code > static_cast<std::uint8_t>(NoiseKind::kMixed)) {
    throw InvalidArgument("unknown noise kind code " + std::to_string(code));
  }
  return static_cast<NoiseKind>(code);
}

KrausSet kraus_for(NoiseKind kind, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("noise level must lie in [0, 1], got " + std::to_string(p));
  const CMat eye = CMat::identity(2);
  switch (kind) {
    case NoiseKind::kBitflip:
      return {{std::sqrt(1.0 - p) * eye, std::sqrt(p) * gate_matrix(GateKind::X)}};
    case NoiseKind::kDepolarizing: {
      const double w = std::sqrt(p / 4.0);
      return {{std::sqrt(1.0 - 0.75 * p) * eye, w * gate_matrix(GateKind::X), w * gate_matrix(GateKind::Y),
               w * gate_matrix(GateKind::Z)}};
    }
    case NoiseKind::kAmplitudeDamping:
      return {{CMat{{1, 0}, {0, std::sqrt(1.0 - p)}}, CMat{{0, std::sqrt(p)}, {0, 0}}}};
    case NoiseKind::kPhaseDamping:
      return {{CMat{{1, 0}, {0, std::sqrt(1.0 - p)}}, CMat{{0, 0}, {0, std::sqrt(p)}}}};
    case NoiseKind::kMixed:
      throw InvalidArgument("kraus_for: mixed noise has no single Kraus set");
  }
  throw InvalidArgument("kraus_for: unknown noise kind");
}

CptpCheck validate_cptp(const KrausSet& kraus) {
  CptpCheck out;
  if (kraus.ops.empty()) {
    out.completeness_error = INFINITY;
    out.detail = "empty Kraus set";
    return out;
  }
  const std::size_t n = kraus.ops.front().rows();
  CMat sum(n, n);
  for (std::size_t i = 0; i < kraus.ops.size(); ++i) {
    const CMat& k = kraus.ops[i];
    if (k.rows() != n || k.cols() != n) {
      out.completeness_error = INFINITY;
      out.detail = "operator " + std::to_string(i) + " has inconsistent shape";
      return out;
    }
    sum += matmul(k.adjoint(), k);
  }
  out.completeness_error = frob_distance(sum, CMat::identity(n));
  out.ok = out.completeness_error <= kCptpTolerance;
  if (!out.ok) out.detail = "||sum K^dagger K - I||_F = " + std::to_string(out.completeness_error);
  return out;
}

DensityMatrix apply_channel_on_qubit(const DensityMatrix& rho, const KrausSet& kraus, std::uint32_t qubit) {
  if (qubit >= rho.num_qubits) {
    throw InvalidArgument("apply_channel_on_qubit: qubit " + std::to_string(qubit) + " out of range for " +
                          std::to_string(rho.num_qubits) + " qubits");
  }
  if (kraus.ops.empty()) throw InvalidArgument("apply_channel_on_qubit: empty Kraus set");
  const std::uint32_t targets[] = {qubit};
  CMat out(rho.dim(), rho.dim());
  for (const auto& k : kraus.ops) out += conjugate_local(rho.mat, rho.num_qubits, k, targets);
  return {rho.num_qubits, std::move(out)};
}

DensityMatrix apply_noise(const DensityMatrix& rho, const NoiseSpec& spec, std::uint64_t seed) {
  if (spec.kind != NoiseKind::kMixed) {
    const KrausSet kraus = kraus_for(spec.kind, spec.level);
    DensityMatrix out = rho;
    for (std::uint32_t q = 0; q < rho.num_qubits; ++q) out = apply_channel_on_qubit(out, kraus, q);
    return out;
  }
  if (!(spec.level >= 0.0 && spec.level <= 1.0)) {
    throw InvalidArgument("noise level must lie in [0, 1], got " + std::to_string(spec.level));
  }
  Rng rng(seed);
  DensityMatrix out = rho;
  for (std::uint32_t q = 0; q < rho.num_qubits; ++q) {
    const NoiseKind kind = kBaseNoiseKinds[rng.below(std::size(kBaseNoiseKinds))];
    out = apply_channel_on_qubit(out, kraus_for(kind, spec.level), q);
  }
  return out;
}

}  // namespace qden
