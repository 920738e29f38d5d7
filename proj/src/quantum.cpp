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

#include "qden/quantum.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qden/error.hpp"
#include "qden/rng.hpp"

namespace qden {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct GateInfo {
  GateKind kind;
  std::string_view name;
};

constexpr std::array<GateInfo, 12> kGateTable = {{
    {GateKind::X, "X"},
    {GateKind::Y, "Y"},
    {GateKind::Z, "Z"},
    {GateKind::H, "H"},
    {GateKind::T, "T"},
    {GateKind::S, "S"},
    {GateKind::RX, "RX"},
    {GateKind::RY, "RY"},
    {GateKind::RZ, "RZ"},
    {GateKind::CNOT, "CNOT"},
    {GateKind::CZ, "CZ"},
    {GateKind::SWAP, "SWAP"},
}};

CMat hermitian_part(const CMat& m) {
  CMat out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = 0.5 * (m(r, c) + std::conj(m(c, r)));
  return out;
}

}  // namespace

std::string_view gate_name(GateKind kind) { return kGateTable.at(static_cast<std::size_t>(kind)).name; }

std::optional<GateKind> parse_gate_name(std::string_view name) {
  for (const auto& info : kGateTable)
    if (info.name == name) return info.kind;
  return std::nullopt;
}

bool is_rotation(GateKind kind) { return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ; }

unsigned gate_arity(GateKind kind) {
  return (kind == GateKind::CNOT || kind == GateKind::CZ || kind == GateKind::SWAP) ? 2 : 1;
}

DensityMatrix DensityMatrix::ground(std::uint32_t num_qubits) {
  const std::size_t dim = std::size_t{1} << num_qubits;
  CMat m(dim, dim);
  m(0, 0) = 1.0;
  return {num_qubits, std::move(m)};
}

DensityMatrix DensityMatrix::from_matrix(CMat mat) {
  if (!mat.square() || mat.rows() == 0 || (mat.rows() & (mat.rows() - 1)) != 0) {
    throw InvalidArgument("DensityMatrix: dimension must be a power of two");
  }
  std::uint32_t n = 0;
  while ((std::size_t{1} << n) < mat.rows()) ++n;
  return {n, std::move(mat)};
}

StateCheck check_state(const CMat& mat) {
  StateCheck out;
  for (const auto& v : mat.data()) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      out.finite = false;
      out.hermiticity = out.trace_error = INFINITY;
      out.min_eigenvalue = -INFINITY;
      return out;
    }
  }
  out.hermiticity = frob_distance(mat, mat.adjoint());
  out.trace_error = std::abs(mat.trace() - Complex(1.0));
  out.min_eigenvalue = hermitian_eig(hermitian_part(mat)).values.front();
  return out;
}

void validate_state(const CMat& mat, double tol) {
  if (!mat.square()) throw InvalidArgument("density matrix must be square");
  const StateCheck check = check_state(mat);
  if (!check.finite) throw InvalidArgument("density matrix has non-finite entries");
  if (check.hermiticity > tol)
    throw InvalidArgument("density matrix is not Hermitian (error " + std::to_string(check.hermiticity) + ")");
  if (check.trace_error > tol)
    throw InvalidArgument("density matrix trace differs from 1 by " + std::to_string(check.trace_error));
  if (check.min_eigenvalue < -tol)
    throw InvalidArgument("density matrix is not PSD (min eigenvalue " + std::to_string(check.min_eigenvalue) + ")");
}

CMat gate_matrix(GateKind kind, double angle) {
  using namespace std::complex_literals;
  const double h = 1.0 / std::sqrt(2.0);
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  switch (kind) {
    case GateKind::X: return CMat{{0, 1}, {1, 0}};
    case GateKind::Y: return CMat{{0, -1i}, {1i, 0}};
    case GateKind::Z: return CMat{{1, 0}, {0, -1}};
    case GateKind::H: return CMat{{h, h}, {h, -h}};
    case GateKind::T: return CMat{{1, 0}, {0, std::polar(1.0, std::numbers::pi / 4.0)}};
    case GateKind::S: return CMat{{1, 0}, {0, 1i}};
    case GateKind::RX: return CMat{{c, -1i * s}, {-1i * s, c}};
    case GateKind::RY: return CMat{{c, -s}, {s, c}};
    case GateKind::RZ: return CMat{{std::polar(1.0, -angle / 2.0), 0}, {0, std::polar(1.0, angle / 2.0)}};
    case GateKind::CNOT:
      return CMat{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}};
    case GateKind::CZ:
      return CMat{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, -1}};
    case GateKind::SWAP:
      return CMat{{1, 0, 0, 0}, {0, 0, 1, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}};
  }
  throw InvalidArgument("gate_matrix: unknown gate kind " + std::to_string(static_cast<int>(kind)));
}

void validate_gate(const GateOp& gate, std::uint32_t num_qubits) {
  if (static_cast<std::size_t>(gate.kind) >= kGateTable.size()) {
    throw InvalidArgument("unknown gate kind " + std::to_string(static_cast<int>(gate.kind)));
  }
  const std::string name(gate_name(gate.kind));
  if (gate.targets.size() != gate_arity(gate.kind)) {
    throw InvalidArgument(name + ": expected " + std::to_string(gate_arity(gate.kind)) + " target(s), got " +
                          std::to_string(gate.targets.size()));
  }
  for (auto t : gate.targets) {
    if (t >= num_qubits) {
      throw InvalidArgument(name + ": target " + std::to_string(t) + " out of range for " +
                            std::to_string(num_qubits) + " qubits");
    }
  }
  if (gate.targets.size() == 2 && gate.targets[0] == gate.targets[1]) {
    throw InvalidArgument(name + ": targets must be distinct");
  }
  if (is_rotation(gate.kind) && !(gate.angle >= 0.0 && gate.angle < kTwoPi)) {
    throw InvalidArgument(name + ": angle must lie in [0, 2pi)");
  }
}

CMat gate_unitary(const GateOp& gate, std::uint32_t num_qubits) {
  validate_gate(gate, num_qubits);
  const CMat local = gate_matrix(gate.kind, gate.angle);
  const std::size_t dim = std::size_t{1} << num_qubits;
  // Columns of the embedded operator: apply the local matrix to each basis state.
  CMat out(dim, dim);
  const unsigned k = static_cast<unsigned>(gate.targets.size());
  const std::size_t local_dim = std::size_t{1} << k;
  for (std::size_t col = 0; col < dim; ++col) {
    std::size_t in_local = 0;
    for (unsigned j = 0; j < k; ++j) {
      const unsigned bit = num_qubits - 1 - gate.targets[j];
      in_local |= ((col >> bit) & 1u) << (k - 1 - j);
    }
    for (std::size_t out_local = 0; out_local < local_dim; ++out_local) {
      std::size_t row = col;
      for (unsigned j = 0; j < k; ++j) {
        const unsigned bit = num_qubits - 1 - gate.targets[j];
        const std::size_t v = (out_local >> (k - 1 - j)) & 1u;
        row = (row & ~(std::size_t{1} << bit)) | (v << bit);
      }
      out(row, col) = local(out_local, in_local);
    }
  }
  return out;
}

CMat conjugate_local(const CMat& rho, std::uint32_t num_qubits, const CMat& op,
                     std::span<const std::uint32_t> targets) {
  const std::size_t dim = std::size_t{1} << num_qubits;
  const unsigned k = static_cast<unsigned>(targets.size());
  const std::size_t local_dim = std::size_t{1} << k;
  if (rho.rows() != dim || rho.cols() != dim) throw InvalidArgument("conjugate_local: state dimension mismatch");
  if (k == 0 || k > 2 || op.rows() != local_dim || op.cols() != local_dim) {
    throw InvalidArgument("conjugate_local: operator shape does not match target count");
  }
  std::size_t mask = 0;
  std::array<std::size_t, 2> bit_of{};
  for (unsigned j = 0; j < k; ++j) {
    if (targets[j] >= num_qubits) throw InvalidArgument("conjugate_local: target out of range");
    bit_of[j] = std::size_t{1} << (num_qubits - 1 - targets[j]);
    mask |= bit_of[j];
  }
  if (k == 2 && bit_of[0] == bit_of[1]) throw InvalidArgument("conjugate_local: targets must be distinct");

  // offsets[l] = basis-index bits for local index l.
  std::array<std::size_t, 4> offsets{};
  for (std::size_t l = 0; l < local_dim; ++l) {
    std::size_t off = 0;
    for (unsigned j = 0; j < k; ++j)
      if ((l >> (k - 1 - j)) & 1u) off |= bit_of[j];
    offsets[l] = off;
  }

  CMat tmp = rho;
  std::array<Complex, 4> buf{};
  // Left: tmp <- op~ * rho, acting on row indices.
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & mask) continue;
    for (std::size_t c = 0; c < dim; ++c) {
      for (std::size_t l = 0; l < local_dim; ++l) buf[l] = tmp(base | offsets[l], c);
      for (std::size_t l = 0; l < local_dim; ++l) {
        Complex acc = 0.0;
        for (std::size_t m = 0; m < local_dim; ++m) acc += op(l, m) * buf[m];
        tmp(base | offsets[l], c) = acc;
      }
    }
  }
  // Right: tmp <- tmp * op~^dagger, acting on column indices.
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & mask) continue;
    for (std::size_t r = 0; r < dim; ++r) {
      for (std::size_t l = 0; l < local_dim; ++l) buf[l] = tmp(r, base | offsets[l]);
      for (std::size_t l = 0; l < local_dim; ++l) {
        Complex acc = 0.0;
        for (std::size_t m = 0; m < local_dim; ++m) acc += buf[m] * std::conj(op(l, m));
        tmp(r, base | offsets[l]) = acc;
      }
    }
  }
  return tmp;
}

Circuit random_circuit(std::uint32_t num_qubits, std::uint32_t depth_min, std::uint32_t depth_max,
                       std::uint64_t seed, bool two_qubit_gates) {
  if (num_qubits == 0) throw InvalidArgument("random_circuit: num_qubits must be positive");
  if (two_qubit_gates && num_qubits < 2) {
    throw InvalidArgument("random_circuit: two-qubit gates need at least 2 qubits");
  }
  if (depth_min > depth_max) throw InvalidArgument("random_circuit: depth_min > depth_max");

  Rng rng(seed);
  Circuit circuit;
  circuit.num_qubits = num_qubits;
  circuit.seed = seed;
  const auto depth = depth_min + static_cast<std::uint32_t>(rng.below(depth_max - depth_min + 1));
  circuit.layers.resize(depth);
  for (auto& layer : circuit.layers) {
    std::vector<bool> busy(num_qubits, false);
    if (two_qubit_gates && rng.bernoulli(0.5)) {
      GateOp g;
      g.kind = kTwoQubitGates[rng.below(std::size(kTwoQubitGates))];
      const auto a = static_cast<std::uint32_t>(rng.below(num_qubits));
      auto b = static_cast<std::uint32_t>(rng.below(num_qubits - 1));
      if (b >= a) ++b;
      g.targets = {a, b};
      busy[a] = busy[b] = true;
      layer.push_back(std::move(g));
    }
    for (std::uint32_t q = 0; q < num_qubits; ++q) {
      if (busy[q]) continue;
      GateOp g;
      g.kind = kSingleQubitGates[rng.below(std::size(kSingleQubitGates))];
      g.targets = {q};
      if (is_rotation(g.kind)) {
        g.angle = rng.uniform01() * kTwoPi;
        if (g.angle >= kTwoPi) g.angle = 0.0;
      }
      layer.push_back(std::move(g));
    }
  }
  return circuit;
}

void validate_circuit(const Circuit& circuit) {
  if (circuit.num_qubits == 0) throw InvalidArgument("circuit has no qubits");
  for (std::size_t li = 0; li < circuit.layers.size(); ++li) {
    std::vector<bool> busy(circuit.num_qubits, false);
    for (const auto& g : circuit.layers[li]) {
      validate_gate(g, circuit.num_qubits);
      for (auto t : g.targets) {
        if (busy[t]) {
          throw InvalidArgument("layer " + std::to_string(li) + " targets qubit " + std::to_string(t) + " twice");
        }
        busy[t] = true;
      }
    }
  }
}

DensityMatrix simulate_clean(const Circuit& circuit) {
  validate_circuit(circuit);
  DensityMatrix rho = DensityMatrix::ground(circuit.num_qubits);
  for (const auto& layer : circuit.layers) {
    for (const auto& g : layer) {
      rho.mat = conjugate_local(rho.mat, circuit.num_qubits, gate_matrix(g.kind, g.angle), g.targets);
    }
  }
  return rho;
}

std::string circuit_to_text(const Circuit& circuit) {
  std::ostringstream os;
  os.precision(17);
  os << "# qubits " << circuit.num_qubits << " seed " << circuit.seed << "\n";
  for (std::size_t li = 0; li < circuit.layers.size(); ++li) {
    os << "# layer " << li << "\n";
    for (const auto& g : circuit.layers[li]) {
      os << gate_name(g.kind);
      for (auto t : g.targets) os << ' ' << t;
      if (is_rotation(g.kind)) os << ' ' << g.angle;
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace qden
