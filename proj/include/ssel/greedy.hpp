#pragma once

#include "ssel/rom_noise.hpp"
#include "ssel/types.hpp"

#include <vector>

namespace ssel {

enum class NoiseMode { White, Correlated };

struct GreedyConfig {
  NoiseMode noise_mode = NoiseMode::Correlated;
  Index p = 0;
};

struct GreedyResult {
  SensorSet sensors;               // selection order
  std::vector<double> objectives;  // criterion after each step
  std::vector<Index> ranks;        // FIM rank after each step
};

// Adds one sensor at a time, each time taking the candidate that minimizes
// tr((C^T Rp^-1 C)^-1) over the augmented set. While the set is smaller than
// r1 the FIM is singular; candidates are then ranked by FIM rank (higher
// first) and by the trace of the pseudo-inverse. In White mode Rp = I.
//
// The whitened rows of the current set are kept as an incremental Cholesky
// factorization of Rp, so scoring all candidates costs O(n k (r2 - r1)) per
// step.
GreedyResult greedy_select(const ReducedOrderModel& rom, const NoiseModel& noise,
                           const GreedyConfig& config);

}  // namespace ssel
