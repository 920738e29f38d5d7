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
#include <string>
#include <string_view>
#include <vector>

#include "qden/linalg.hpp"
#include "qden/quantum.hpp"

namespace qden {

/// Values double as the on-disk u8 code.
enum class NoiseKind : std::uint8_t {
  kBitflip = 0,
  kDepolarizing = 1,
  kAmplitudeDamping = 2,
  kPhaseDamping = 3,
  kMixed = 4,
};

inline constexpr NoiseKind kAllNoiseKinds[] = {NoiseKind::kBitflip, NoiseKind::kDepolarizing,
                                               NoiseKind::kAmplitudeDamping, NoiseKind::kPhaseDamping,
                                               NoiseKind::kMixed};
inline constexpr NoiseKind kBaseNoiseKinds[] = {NoiseKind::kBitflip, NoiseKind::kDepolarizing,
                                                NoiseKind::kAmplitudeDamping, NoiseKind::kPhaseDamping};
inline constexpr double kDefaultNoiseLevels[] = {0.05, 0.10, 0.15, 0.20};

std::string_view noise_kind_name(NoiseKind kind);
std::optional<NoiseKind> parse_noise_kind(std::string_view name);
/// Rejects codes above 4.
NoiseKind noise_kind_from_code(std::uint8_t code);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kDepolarizing;
  double level = 0.0;
};

struct KrausSet {
  std::vector<CMat> ops;
};

/// Single-qubit Kraus operators. Depolarizing follows rho -> (1-p) rho + p I/2.
/// Mixed has no single Kraus set and is rejected.
KrausSet kraus_for(NoiseKind kind, double level);

struct CptpCheck {
  bool ok = false;
  double completeness_error = 0.0;  // ||sum K^dagger K - I||_F
  std::string detail;
};

inline constexpr double kCptpTolerance = 1e-12;

CptpCheck validate_cptp(const KrausSet& kraus);

DensityMatrix apply_channel_on_qubit(const DensityMatrix& rho, const KrausSet& kraus, std::uint32_t qubit);

/// Applies the channel independently to every qubit in ascending order. For
/// Mixed, each qubit draws its base kind uniformly from an Rng seeded with
/// `seed`; the base kinds ignore the seed.
DensityMatrix apply_noise(const DensityMatrix& rho, const NoiseSpec& spec, std::uint64_t seed);

}  // namespace qden
