#pragma once

// Method roster and evaluation plumbing shared by the CLI and the test
// suites. Every method's objective and reconstruction error are scored under
// the correlated noise model, whatever model the method itself optimized.

#include "ssel/admm.hpp"
#include "ssel/ingest.hpp"
#include "ssel/rom_noise.hpp"
#include "ssel/types.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ssel {

enum class Method { GreedyWN, GreedyCN, AdmmWN, AdmmCN, AdmmCNwoN, Oracle };

std::string to_string(Method m);
std::optional<Method> parse_method(std::string_view name);
const std::vector<Method>& all_methods();
bool is_admm(Method m);

struct SelectionRun {
  Method method = Method::AdmmCN;
  SensorSet sensors;              // ascending for ADMM and oracle, pick order for greedy
  double reported_objective = 0;  // what the selector itself reports
  double objective = 0;           // aopt_objective under the correlated model
  bool converged = true;
  Index iterations = 0;
  double wall_time_s = 0;         // selection only
  std::vector<TraceRecord> trace;
};

SelectionRun run_method(Method method, const ReducedOrderModel& rom, const NoiseModel& noise, Index p,
                        const SolverConfig& config = {});

struct Evaluation {
  double objective = 0;
  double recon_error = 0;
};

// Objective of `sensors` under `noise`, and the relative error of rebuilding
// `data` from those rows with the modes of `rom`.
Evaluation evaluate(const ReducedOrderModel& rom, const NoiseModel& noise, const SensorSet& sensors,
                    const SnapshotMatrix& data);

struct FoldResult {
  Index fold = 0;
  SensorSet sensors;
  double objective = 0;
  double train_error = 0;
  double test_error = 0;
  bool converged = true;
  Index iterations = 0;
};

// k-fold CV. Each fold fits the model on its training columns, selects with
// `method` (or scores the fixed `sensors`), then reconstructs the held-out
// columns.
std::vector<FoldResult> cross_validate(const SnapshotMatrix& data, Index r1, Index r2, Method method,
                                       Index p, Index folds, const SolverConfig& config = {});

// Noise model used to score a fixed set. White treats R = I (ordinary least
// squares) and works on data too clean for a correlated model.
enum class EvalNoise { Correlated, White };

std::vector<FoldResult> cross_validate_fixed(const SnapshotMatrix& data, Index r1, Index r2,
                                             const SensorSet& sensors, Index folds,
                                             EvalNoise noise = EvalNoise::Correlated);

// Mean over sensors of the Euclidean grid distance to the nearest other
// sensor, in cell units. Needs at least two sensors.
double mean_nearest_neighbor_distance(const CellIndex& cells, const SensorSet& sensors);

}  // namespace ssel
