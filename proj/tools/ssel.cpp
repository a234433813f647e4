// ssel: sensor selection command-line driver.
//
// Exit codes: 0 ok, 2 usage, 3 data error, 4 numerical error.

#include "ssel/admm.hpp"
#include "ssel/errors.hpp"
#include "ssel/estimation.hpp"
#include "ssel/ingest.hpp"
#include "ssel/oracle.hpp"
#include "ssel/pipeline.hpp"
#include "ssel/synthetic.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace ssel;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

int exit_code_for(const Error& e) {
  switch (category_of(e.code())) {
    case ErrorCategory::Usage: return kExitUsage;
    case ErrorCategory::Numerical: return kExitNumerical;
    case ErrorCategory::Data: return kExitData;
  }
  return kExitData;
}

FileFormat parse_format(const std::string& s) {
  if (s == "binary") return FileFormat::Binary;
  if (s == "csv") return FileFormat::Csv;
  return FileFormat::Auto;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

// Writes to the named file, or stdout for "" and "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::trunc);
      if (!*file_) throw Error(ErrorCode::IoError, "cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct SolverFlags {
  double gamma = 1.0;
  double eta = 0.99;
  Index decay_period = 5000;
  double eps = 0.0;  // 0 = size-dependent default
  Index max_iters = 200000;
  double polish_threshold = 1e-4;

  void add_to(CLI::App* app) {
    app->add_option("--gamma", gamma, "initial ADMM step size")->capture_default_str();
    app->add_option("--eta", eta, "step-size decay factor")->capture_default_str();
    app->add_option("--decay-period", decay_period, "iterations between step-size decays")->capture_default_str();
    app->add_option("--eps", eps, "convergence tolerance on ||X_k - X_k-1||_F (0 = 1e-6 sqrt(n r1))");
    app->add_option("--max-iters", max_iters, "iteration cap")->capture_default_str();
    app->add_option("--polish-threshold", polish_threshold, "row-norm threshold for active sensors")
        ->capture_default_str();
  }

  SolverConfig config(bool trace) const {
    SolverConfig c;
    c.gamma_init = gamma;
    c.eta = eta;
    c.gamma_decay_period = decay_period;
    if (eps > 0.0) c.eps_conv = eps;
    c.max_iters = max_iters;
    c.polish_threshold = polish_threshold;
    c.record_trace = trace;
    return c;
  }
};

Method require_method(const std::string& name) {
  const auto m = parse_method(name);
  if (!m) throw Error(ErrorCode::InfeasibleBudget, "unknown method '" + name + "'");
  return *m;
}

void check_ranks(Index r1, Index r2, Index p) {
  if (p < r1) {
    throw Error(ErrorCode::InfeasibleBudget, "p=" + std::to_string(p) + " is below r1=" + std::to_string(r1));
  }
  if (r2 <= r1) throw Error(ErrorCode::RankOutOfRange, "r2 must exceed r1");
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  Index n = 0;
  Index m = 0;
  std::uint64_t seed = 0;
  std::string spectrum = "inv-sqrt";
  std::string out;
  std::string format = "auto";
};

std::vector<double> parse_spectrum(const std::string& s) {
  if (s == "inv-sqrt") return {};
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad spectrum entry '" + tok + "'");
    }
  }
  return out;
}

int run_generate(const GenerateArgs& a) {
  SyntheticSpec spec;
  spec.n = a.n;
  spec.m = a.m;
  spec.seed = a.seed;
  spec.spectrum = parse_spectrum(a.spectrum);
  save_matrix(a.out, generate(spec).values(), parse_format(a.format));
  return 0;
}

// ------------------------------------------------------------------ select

struct SelectArgs {
  std::string data;
  std::string method;
  Index p = 0;
  Index r1 = 10;
  Index r2 = 40;
  bool center = false;
  double holdout = 0.0;
  std::string out;
  std::string trace;
  bool n_check = false;
  SolverFlags solver;
};

int run_select(const SelectArgs& a) {
  const Method method = require_method(a.method);
  check_ranks(a.r1, a.r2, a.p);
  const LoadedData loaded = load_snapshots(a.data, a.center);
  const Matrix& all = loaded.snapshots.values();
  const Index m = all.cols();
  if (!(a.holdout >= 0.0 && a.holdout < 1.0)) {
    throw Error(ErrorCode::BadFoldCount, "--holdout must lie in [0, 1)");
  }
  const Index test_cols = static_cast<Index>(std::ceil(a.holdout * static_cast<double>(m)));
  std::vector<Index> train_idx, test_idx;
  for (Index j = 0; j < m; ++j) (j < m - test_cols ? train_idx : test_idx).push_back(j);
  const SnapshotMatrix train = loaded.snapshots.columns(train_idx);

  if (method == Method::Oracle && a.n_check) {
    const std::uint64_t count = binomial(train.rows(), a.p);
    std::cerr << "oracle: C(" << train.rows() << ", " << a.p << ") = " << count << " subsets (limit "
              << kOracleSubsetLimit << ")\n";
    if (count > kOracleSubsetLimit) throw Error(ErrorCode::TooLarge, "subset count exceeds the oracle limit");
  }

  const ReducedOrderModel rom = fit_rom(train, a.r1, a.r2);
  const NoiseModel noise = build_noise_model(rom);
  const SelectionRun run = run_method(method, rom, noise, a.p, a.solver.config(!a.trace.empty()));
  const Evaluation ev = evaluate(rom, noise, run.sensors, train);

  double test_error = std::nan("");
  if (!test_idx.empty()) {
    Matrix test(all.rows(), static_cast<Index>(test_idx.size()));
    for (std::size_t j = 0; j < test_idx.size(); ++j) test.col(static_cast<Index>(j)) = all.col(test_idx[j]);
    const Estimator est = wls_estimator(rom, noise, run.sensors);
    const Matrix field = rom.signal_modes() * (est.gain * gather_rows(test, run.sensors.indices()));
    test_error = (test - field).norm() / test.norm();
  }

  if (!run.converged) {
    std::cerr << "warning: " << to_string(method) << " did not converge within " << run.iterations
              << " iterations; reporting the best support seen\n";
  }

  Output out(a.out);
  std::ostream& os = out.stream();
  os << "# method=" << to_string(method) << " n=" << rom.n() << " m=" << train.cols() << " p=" << a.p
     << " r1=" << a.r1 << " r2=" << a.r2 << "\n";
  os << "# objective=" << fmt(run.objective) << "\n";
  os << "# train_error=" << fmt(ev.recon_error) << "\n";
  if (!test_idx.empty()) os << "# test_error=" << fmt(test_error) << "\n";
  os << "# converged=" << (run.converged ? "true" : "false") << " iterations=" << run.iterations
     << " wall_time_s=" << fmt(run.wall_time_s) << "\n";
  for (Index i : run.sensors.indices()) os << i << "\n";

  if (!a.trace.empty()) {
    Output t(a.trace);
    std::ostream& ts = t.stream();
    ts << "iteration,gamma,objective,residual,active_rows,step\n";
    for (const TraceRecord& r : run.trace) {
      ts << r.iteration << ',' << fmt(r.gamma) << ',' << fmt(r.objective) << ',' << fmt(r.residual) << ','
         << r.active_rows << ',' << fmt(r.step) << '\n';
    }
  }
  return 0;
}

// ------------------------------------------------------------------- bench

struct BenchArgs {
  std::vector<std::string> methods{"greedy-wn", "greedy-cn", "admm-wn", "admm-cn", "admm-cn-wo-norm"};
  Index seeds = 5;
  std::uint64_t first_seed = 1;
  std::vector<Index> p_values{30};
  std::vector<Index> n_values{2000};
  Index m = 60;
  Index r1 = 10;
  Index r2 = 40;
  std::string data;
  bool center = false;
  int jobs = 1;
  std::string out;
  std::string summary;
  SolverFlags solver;
};

struct Trial {
  std::uint64_t seed;
  Method method;
  Index n;
  Index p;
};

struct TrialResult {
  Index n = 0;
  Index m = 0;
  double objective = std::nan("");
  double recon_error = std::nan("");
  double wall_time_s = std::nan("");
  Index iterations = 0;
  bool converged = false;
  std::string status = "ok";
};

TrialResult run_trial(const Trial& t, const BenchArgs& a, const SnapshotMatrix* fixed) {
  TrialResult res;
  try {
    SnapshotMatrix data;
    if (fixed) {
      data = *fixed;
    } else {
      SyntheticSpec spec;
      spec.n = t.n;
      spec.m = a.m;
      spec.seed = t.seed;
      data = generate(spec);
    }
    res.n = data.rows();
    res.m = data.cols();
    const ReducedOrderModel rom = fit_rom(data, a.r1, a.r2);
    const NoiseModel noise = build_noise_model(rom);
    const SelectionRun run = run_method(t.method, rom, noise, t.p, a.solver.config(false));
    res.objective = run.objective;
    res.recon_error = evaluate(rom, noise, run.sensors, data).recon_error;
    res.wall_time_s = run.wall_time_s;
    res.iterations = run.iterations;
    res.converged = run.converged;
    if (!run.converged) res.status = "not_converged";
  } catch (const Error& e) {
    res.status = std::string(to_string(e.code()));
  } catch (const std::exception& e) {
    res.status = "error";
  }
  return res;
}

int run_bench(const BenchArgs& a) {
  std::vector<Method> methods;
  for (const auto& name : a.methods) methods.push_back(require_method(name));
  std::unique_ptr<SnapshotMatrix> fixed;
  std::vector<Index> n_values = a.n_values;
  if (!a.data.empty()) {
    fixed = std::make_unique<SnapshotMatrix>(load_snapshots(a.data, a.center).snapshots);
    n_values = {fixed->rows()};
  }

  std::vector<Trial> trials;
  for (Index n : n_values)
    for (Index p : a.p_values)
      for (Method method : methods)
        for (Index s = 0; s < a.seeds; ++s) trials.push_back({a.first_seed + static_cast<std::uint64_t>(s), method, n, p});

  std::vector<TrialResult> results(trials.size());
  const int jobs = std::max(1, a.jobs);
#pragma omp parallel for num_threads(jobs) schedule(dynamic, 1)
  for (std::size_t k = 0; k < trials.size(); ++k) results[k] = run_trial(trials[k], a, fixed.get());

  Output out(a.out);
  std::ostream& os = out.stream();
  os << "seed,method,n,m,p,objective,recon_error,wall_time_s,iterations,time_per_iter_s,converged,status\n";
  for (std::size_t k = 0; k < trials.size(); ++k) {
    const Trial& t = trials[k];
    const TrialResult& r = results[k];
    const double per_iter = r.iterations > 0 ? r.wall_time_s / static_cast<double>(r.iterations) : std::nan("");
    os << t.seed << ',' << to_string(t.method) << ',' << (r.n ? r.n : t.n) << ',' << (r.m ? r.m : a.m) << ','
       << t.p << ',' << fmt(r.objective) << ',' << fmt(r.recon_error) << ',' << fmt(r.wall_time_s) << ','
       << r.iterations << ',' << fmt(per_iter) << ',' << (r.converged ? 1 : 0) << ',' << r.status << '\n';
  }

  if (!a.summary.empty()) {
    struct Cell {
      Index trials = 0, ok = 0;
      double obj = 0, err = 0, time = 0, iters = 0;
    };
    std::vector<std::pair<std::tuple<Index, Index, Method>, Cell>> cells;
    std::map<std::tuple<Index, Index, int>, std::size_t> where;
    for (std::size_t k = 0; k < trials.size(); ++k) {
      const auto key = std::make_tuple(trials[k].n, trials[k].p, static_cast<int>(trials[k].method));
      auto it = where.find(key);
      if (it == where.end()) {
        it = where.emplace(key, cells.size()).first;
        cells.push_back({{trials[k].n, trials[k].p, trials[k].method}, {}});
      }
      Cell& c = cells[it->second].second;
      const TrialResult& r = results[k];
      ++c.trials;
      if (std::isfinite(r.objective)) {
        ++c.ok;
        c.obj += r.objective;
        c.err += r.recon_error;
        c.time += r.wall_time_s;
        c.iters += static_cast<double>(r.iterations);
      }
    }
    Output sum(a.summary);
    std::ostream& ss = sum.stream();
    ss << "method,n,p,trials,ok,mean_objective,mean_recon_error,mean_wall_time_s,mean_iterations\n";
    for (const auto& [key, c] : cells) {
      const auto [n, p, method] = key;
      const double k = c.ok > 0 ? static_cast<double>(c.ok) : std::nan("");
      ss << to_string(method) << ',' << n << ',' << p << ',' << c.trials << ',' << c.ok << ',' << fmt(c.obj / k)
         << ',' << fmt(c.err / k) << ',' << fmt(c.time / k) << ',' << fmt(c.iters / k) << '\n';
    }
  }
  return 0;
}

// -------------------------------------------------------------------- eval

struct EvalArgs {
  std::string data;
  std::string sensors;
  Index r1 = 10;
  Index r2 = 40;
  Index folds = 5;
  bool center = false;
  std::string noise = "correlated";
  std::string out;
};

std::vector<Index> read_sensor_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::vector<Index> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      std::size_t used = 0;
      const long long v = std::stoll(line.substr(first), &used);
      out.push_back(static_cast<Index>(v));
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, path + ": bad sensor index '" + line + "'");
    }
  }
  return out;
}

int run_eval(const EvalArgs& a) {
  const LoadedData loaded = load_snapshots(a.data, a.center);
  const SnapshotMatrix& data = loaded.snapshots;
  const std::vector<Index> idx = read_sensor_file(a.sensors);
  for (Index i : idx) {
    if (i < 0 || i >= data.rows()) {
      throw Error(ErrorCode::DimensionMismatch, "sensor index " + std::to_string(i) + " exceeds dataset n=" +
                                                    std::to_string(data.rows()));
    }
  }
  const SensorSet sensors(idx, data.rows());
  const EvalNoise kind = a.noise == "white" ? EvalNoise::White : EvalNoise::Correlated;

  Output out(a.out);
  std::ostream& os = out.stream();
  os << "fold,objective,train_error,test_error\n";
  if (a.folds == 1) {
    const ReducedOrderModel rom = fit_rom(data, a.r1, a.r2);
    const NoiseModel noise = kind == EvalNoise::White ? NoiseModel::white(rom.n()) : build_noise_model(rom);
    const Evaluation ev = evaluate(rom, noise, sensors, data);
    os << "all," << fmt(ev.objective) << ',' << fmt(ev.recon_error) << ',' << fmt(ev.recon_error) << '\n';
    return 0;
  }
  const auto folds = cross_validate_fixed(data, a.r1, a.r2, sensors, a.folds, kind);
  double obj = 0, train = 0, test = 0;
  for (const FoldResult& f : folds) {
    os << f.fold << ',' << fmt(f.objective) << ',' << fmt(f.train_error) << ',' << fmt(f.test_error) << '\n';
    obj += f.objective;
    train += f.train_error;
    test += f.test_error;
  }
  const double k = static_cast<double>(folds.size());
  os << "mean," << fmt(obj / k) << ',' << fmt(train / k) << ',' << fmt(test / k) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sensor selection for field reconstruction under correlated noise"};
  app.set_config("--config", "", "key = value file supplying defaults; flags override");
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "write a synthetic snapshot matrix");
  g->add_option("--n", gen.n, "spatial points")->required();
  g->add_option("--m", gen.m, "snapshots")->required();
  g->add_option("--seed", gen.seed, "random seed")->capture_default_str();
  g->add_option("--spectrum", gen.spectrum, "inv-sqrt or a comma list of m singular values")->capture_default_str();
  g->add_option("--out", gen.out, "output file (.csv for text, otherwise binary)")->required();
  g->add_option("--format", gen.format, "auto, binary or csv")->check(CLI::IsMember({"auto", "binary", "csv"}));

  SelectArgs sel;
  auto* s = app.add_subcommand("select", "select sensors on a dataset");
  s->add_option("--data", sel.data, "snapshot matrix or grid file")->required();
  s->add_option("--method", sel.method, "greedy-wn, greedy-cn, admm-wn, admm-cn, admm-cn-wo-norm or oracle")
      ->required();
  s->add_option("--p", sel.p, "number of sensors")->required();
  s->add_option("--r1", sel.r1, "signal rank")->capture_default_str();
  s->add_option("--r2", sel.r2, "noise-model rank")->capture_default_str();
  s->add_flag("--center", sel.center, "remove each row's temporal mean");
  s->add_option("--holdout", sel.holdout, "fraction of trailing snapshots held out for a test error");
  s->add_option("--out", sel.out, "sensor file (default stdout)");
  s->add_option("--trace", sel.trace, "ADMM iteration trace CSV");
  s->add_flag("--n-check", sel.n_check, "report the oracle subset count before enumerating");
  sel.solver.add_to(s);

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "benchmark sweep over seeds, methods, p and n");
  b->add_option("--methods", bench.methods, "methods to run")->delimiter(',');
  b->add_option("--seeds", bench.seeds, "seeds per cell")->capture_default_str();
  b->add_option("--first-seed", bench.first_seed, "first seed")->capture_default_str();
  b->add_option("--p-values", bench.p_values, "sensor counts")->delimiter(',');
  b->add_option("--n-values", bench.n_values, "spatial sizes (synthetic data)")->delimiter(',');
  b->add_option("--m", bench.m, "snapshots (synthetic data)")->capture_default_str();
  b->add_option("--r1", bench.r1, "signal rank")->capture_default_str();
  b->add_option("--r2", bench.r2, "noise-model rank")->capture_default_str();
  b->add_option("--data", bench.data, "use this dataset instead of synthetic data");
  b->add_flag("--center", bench.center, "remove each row's temporal mean (with --data)");
  b->add_option("--jobs", bench.jobs, "concurrent trials")->capture_default_str();
  b->add_option("--out", bench.out, "long-format CSV (default stdout)");
  b->add_option("--summary", bench.summary, "per-cell mean CSV");
  bench.solver.add_to(b);

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "score a sensor file on a dataset");
  e->add_option("--data", ev.data, "snapshot matrix or grid file")->required();
  e->add_option("--sensors", ev.sensors, "sensor file, one index per line")->required();
  e->add_option("--r1", ev.r1, "signal rank")->capture_default_str();
  e->add_option("--r2", ev.r2, "noise-model rank")->capture_default_str();
  e->add_option("--folds", ev.folds, "cross-validation folds (1 = whole dataset)")->capture_default_str();
  e->add_flag("--center", ev.center, "remove each row's temporal mean");
  e->add_option("--noise", ev.noise, "correlated or white")->check(CLI::IsMember({"correlated", "white"}));
  e->add_option("--out", ev.out, "CSV output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*g) return run_generate(gen);
    if (*s) return run_select(sel);
    if (*b) return run_bench(bench);
    if (*e) return run_eval(ev);
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return exit_code_for(err);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
