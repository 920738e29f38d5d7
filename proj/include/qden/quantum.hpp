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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qden/linalg.hpp"

namespace qden {

enum class GateKind : std::uint8_t { X, Y, Z, H, T, S, RX, RY, RZ, CNOT, CZ, SWAP };

inline constexpr GateKind kSingleQubitGates[] = {GateKind::X,  GateKind::Y,  GateKind::Z,
                                                 GateKind::H,  GateKind::T,  GateKind::S,
                                                 GateKind::RX, GateKind::RY, GateKind::RZ};
inline constexpr GateKind kTwoQubitGates[] = {GateKind::CNOT, GateKind::CZ, GateKind::SWAP};

std::string_view gate_name(GateKind kind);
std::optional<GateKind> parse_gate_name(std::string_view name);
bool is_rotation(GateKind kind);
unsigned gate_arity(GateKind kind);

struct GateOp {
  GateKind kind = GateKind::X;
  /// One entry for single-qubit gates; (control, target) for CNOT.
  std::vector<std::uint32_t> targets;
  /// Radians in [0, 2pi); only meaningful for RX/RY/RZ.
  double angle = 0.0;

  friend bool operator==(const GateOp&, const GateOp&) = default;
};

struct Circuit {
  std::uint32_t num_qubits = 0;
  std::vector<std::vector<GateOp>> layers;
  std::uint64_t seed = 0;

  std::size_t depth() const { return layers.size(); }
  friend bool operator==(const Circuit&, const Circuit&) = default;
};

/// An n-qubit state. Qubit 0 is the most significant bit of the basis index,
/// so |q0 q1 ... q_{n-1}> has index sum q_k * 2^(n-1-k).
struct DensityMatrix {
  std::uint32_t num_qubits = 0;
  CMat mat;

  std::size_t dim() const { return mat.rows(); }
  /// |0...0><0...0|.
  static DensityMatrix ground(std::uint32_t num_qubits);
  static DensityMatrix from_matrix(CMat mat);
};

struct StateCheck {
  double hermiticity = 0.0;    // ||A - A^dagger||_F (absolute)
  double trace_error = 0.0;    // |tr A - 1|
  double min_eigenvalue = 0.0;
  bool finite = true;
};

StateCheck check_state(const CMat& mat);

/// Throws InvalidArgument unless the matrix is Hermitian, unit trace and PSD
/// within `tol` (eigenvalues may dip to -tol).
void validate_state(const CMat& mat, double tol = 1e-10);

/// The 2x2 or 4x4 gate matrix in its own basis. RX(t) = exp(-i t X / 2), etc.
/// T = diag(1, e^{i pi/4}), S = diag(1, i). Two-qubit matrices take targets[0]
/// as the more significant qubit.
CMat gate_matrix(GateKind kind, double angle = 0.0);

void validate_gate(const GateOp& gate, std::uint32_t num_qubits);

/// Full 2^n x 2^n unitary of `gate` on an n-qubit register.
CMat gate_unitary(const GateOp& gate, std::uint32_t num_qubits);

/// op~ * rho * op~^dagger where op~ is `op` (2^k x 2^k) embedded on `targets`.
/// Costs O(4^n * 2^k) instead of the dense O(8^n).
CMat conjugate_local(const CMat& rho, std::uint32_t num_qubits, const CMat& op,
                     std::span<const std::uint32_t> targets);

/// Layer rule: with probability 1/2 place one two-qubit gate (kind uniform
/// over CNOT/CZ/SWAP, ordered pair uniform over distinct pairs), then give
/// every free qubit a uniform single-qubit gate. Rotation angles are uniform
/// on [0, 2pi). Depth is uniform on [depth_min, depth_max].
Circuit random_circuit(std::uint32_t num_qubits, std::uint32_t depth_min, std::uint32_t depth_max,
                       std::uint64_t seed, bool two_qubit_gates = true);

void validate_circuit(const Circuit& circuit);

/// rho <- U rho U^dagger for every gate, starting from |0...0>.
DensityMatrix simulate_clean(const Circuit& circuit);

/// One gate per line: `KIND t0 [t1] [angle]`, layers introduced by `# layer k`.
std::string circuit_to_text(const Circuit& circuit);

}  // namespace qden
