#pragma once

#include "ssel/rom_noise.hpp"
#include "ssel/types.hpp"

#include <cstdint>

namespace ssel {

struct OracleResult {
  SensorSet sensors;  // ascending
  double objective = 0.0;
  std::uint64_t subsets_evaluated = 0;
};

inline constexpr std::uint64_t kOracleSubsetLimit = 1'000'000;

// C(n, p), saturating at UINT64_MAX.
std::uint64_t binomial(Index n, Index p);

// Global A-optimal p-subset by enumeration of all C(n, p) subsets in
// lexicographic order. Subsets with a singular Fisher information are
// skipped. Equal objectives resolve to the lexicographically first subset.
// Throws TooLarge above kOracleSubsetLimit subsets.
OracleResult exhaustive_best(const ReducedOrderModel& rom, const NoiseModel& noise, Index p);

}  // namespace ssel
