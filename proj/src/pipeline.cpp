#include "ssel/pipeline.hpp"

#include "ssel/errors.hpp"
#include "ssel/estimation.hpp"
#include "ssel/greedy.hpp"
#include "ssel/oracle.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <utility>

namespace ssel {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 6> kNames{{
    {Method::GreedyWN, "greedy-wn"},
    {Method::GreedyCN, "greedy-cn"},
    {Method::AdmmWN, "admm-wn"},
    {Method::AdmmCN, "admm-cn"},
    {Method::AdmmCNwoN, "admm-cn-wo-norm"},
    {Method::Oracle, "oracle"},
}};

Matrix column_block(const Matrix& values, const std::vector<Index>& cols) {
  Matrix out(values.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Index>(j)) = values.col(cols[j]);
  return out;
}

}  // namespace

std::string to_string(Method m) {
  for (const auto& [method, name] : kNames) {
    if (method == m) return std::string(name);
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  for (const auto& [method, n] : kNames) {
    if (n == name) return method;
  }
  return std::nullopt;
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = [] {
    std::vector<Method> out;
    for (const auto& entry : kNames) out.push_back(entry.first);
    return out;
  }();
  return methods;
}

bool is_admm(Method m) {
  return m == Method::AdmmWN || m == Method::AdmmCN || m == Method::AdmmCNwoN;
}

SelectionRun run_method(Method method, const ReducedOrderModel& rom, const NoiseModel& noise, Index p,
                        const SolverConfig& config) {
  using Clock = std::chrono::steady_clock;
  SelectionRun run;
  run.method = method;
  const auto start = Clock::now();
  switch (method) {
    case Method::GreedyWN:
    case Method::GreedyCN: {
      const bool white = method == Method::GreedyWN;
      const NoiseModel model = white ? NoiseModel::white(rom.n()) : noise;
      GreedyResult g = greedy_select(rom, model, GreedyConfig{white ? NoiseMode::White : NoiseMode::Correlated, p});
      run.sensors = std::move(g.sensors);
      run.reported_objective = g.objectives.back();
      run.iterations = p;
      break;
    }
    case Method::AdmmWN:
    case Method::AdmmCN:
    case Method::AdmmCNwoN: {
      AdmmProblem problem = method == Method::AdmmWN    ? normalize(rom, NoiseModel::white(rom.n()), p)
                            : method == Method::AdmmCN ? normalize(rom, noise, p)
                                                       : without_normalization(rom, noise, p);
      AdmmResult r = solve(problem, config);
      run.sensors = std::move(r.sensors);
      run.converged = r.converged;
      run.iterations = r.state.iter;
      run.trace = std::move(r.state.trace);
      const NoiseModel& own = method == Method::AdmmWN ? NoiseModel::white(rom.n()) : noise;
      run.reported_objective = polish(rom, own, run.sensors).objective();
      break;
    }
    case Method::Oracle: {
      OracleResult o = exhaustive_best(rom, noise, p);
      run.sensors = std::move(o.sensors);
      run.reported_objective = o.objective;
      run.iterations = static_cast<Index>(o.subsets_evaluated);
      break;
    }
  }
  run.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
  run.objective = aopt_objective(rom, noise, run.sensors);
  return run;
}

Evaluation evaluate(const ReducedOrderModel& rom, const NoiseModel& noise, const SensorSet& sensors,
                    const SnapshotMatrix& data) {
  if (data.rows() != rom.n()) {
    throw Error(ErrorCode::DimensionMismatch, "data has " + std::to_string(data.rows()) +
                                                  " rows, model has " + std::to_string(rom.n()));
  }
  const Estimator est = wls_estimator(rom, noise, sensors);
  const Reconstruction rec = reconstruct(est, rom, data);
  return Evaluation{est.objective(), reconstruction_error(data, rec.field)};
}

namespace {

template <typename Select>
std::vector<FoldResult> run_folds(const SnapshotMatrix& data, Index r1, Index r2, Index folds, EvalNoise kind,
                                  Select select) {
  const CvSplit split = make_folds(data.cols(), folds);
  std::vector<FoldResult> out;
  for (Index f = 0; f < split.fold_count; ++f) {
    const auto& [train_cols, test_cols] = split.folds[static_cast<std::size_t>(f)];
    const SnapshotMatrix train = data.columns(train_cols);
    const ReducedOrderModel rom = fit_rom(train, r1, r2);
    const NoiseModel noise = kind == EvalNoise::White ? NoiseModel::white(rom.n()) : build_noise_model(rom);
    FoldResult res;
    res.fold = f;
    select(rom, noise, res);
    const Evaluation on_train = evaluate(rom, noise, res.sensors, train);
    res.objective = on_train.objective;
    res.train_error = on_train.recon_error;
    // One held-out column is allowed; SnapshotMatrix needs two, so score directly.
    const Matrix test = column_block(data.values(), test_cols);
    const Estimator est = wls_estimator(rom, noise, res.sensors);
    const Matrix field = rom.signal_modes() * (est.gain * gather_rows(test, res.sensors.indices()));
    const double denom = test.norm();
    if (!(denom > 0.0)) throw Error(ErrorCode::ZeroData, "held-out fold has zero norm");
    res.test_error = (test - field).norm() / denom;
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace

std::vector<FoldResult> cross_validate(const SnapshotMatrix& data, Index r1, Index r2, Method method,
                                       Index p, Index folds, const SolverConfig& config) {
  return run_folds(data, r1, r2, folds, EvalNoise::Correlated, [&](const ReducedOrderModel& rom, const NoiseModel& noise, FoldResult& res) {
    SelectionRun run = run_method(method, rom, noise, p, config);
    res.sensors = std::move(run.sensors);
    res.converged = run.converged;
    res.iterations = run.iterations;
  });
}

std::vector<FoldResult> cross_validate_fixed(const SnapshotMatrix& data, Index r1, Index r2,
                                             const SensorSet& sensors, Index folds, EvalNoise noise) {
  if (sensors.candidate_count() != data.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "sensor set was built for n=" + std::to_string(sensors.candidate_count()) +
                                                  " but data has n=" + std::to_string(data.rows()));
  }
  return run_folds(data, r1, r2, folds, noise,
                   [&](const ReducedOrderModel&, const NoiseModel&, FoldResult& res) { res.sensors = sensors; });
}

double mean_nearest_neighbor_distance(const CellIndex& cells, const SensorSet& sensors) {
  const Index p = sensors.size();
  if (p < 2) throw Error(ErrorCode::DimensionError, "nearest-neighbour distance needs at least two sensors");
  double total = 0.0;
  for (Index a = 0; a < p; ++a) {
    const auto [ra, ca] = cells.grid_position(sensors[a]);
    double best = std::numeric_limits<double>::infinity();
    for (Index b = 0; b < p; ++b) {
      if (a == b) continue;
      const auto [rb, cb] = cells.grid_position(sensors[b]);
      best = std::min(best, std::hypot(static_cast<double>(ra - rb), static_cast<double>(ca - cb)));
    }
    total += best;
  }
  return total / static_cast<double>(p);
}

}  // namespace ssel
