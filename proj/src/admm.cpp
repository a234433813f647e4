#include "ssel/admm.hpp"

#include "ssel/errors.hpp"
#include "ssel/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

namespace ssel {

namespace {

void check_budget(const ReducedOrderModel& rom, Index p) {
  if (p < rom.r1 || p > rom.n()) {
    throw Error(ErrorCode::InfeasibleBudget, "sensor budget p=" + std::to_string(p) +
                                                 " must satisfy r1=" + std::to_string(rom.r1) +
                                                 " <= p <= n=" + std::to_string(rom.n()));
  }
}

AdmmProblem assemble(const ReducedOrderModel& rom, const NoiseModel& noise, Index p,
                     const Vector& weights) {
  if (noise.n() != rom.n()) {
    throw Error(ErrorCode::DimensionMismatch, "noise model and ROM disagree on n");
  }
  check_budget(rom, p);
  if (!(weights.array() > 0.0).all()) {
    throw Error(ErrorCode::DegenerateNoise, "noise weighting term has non-positive entries");
  }
  const Vector inv_sqrt = weights.array().rsqrt();

  AdmmProblem pr;
  pr.A_t = inv_sqrt.asDiagonal() * rom.U.leftCols(rom.r1);
  pr.UQ_hat = inv_sqrt.asDiagonal() * noise.UQ;
  pr.SQ = noise.SQ;
  pr.deltaS_hat = noise.deltaS.cwiseQuotient(weights);
  pr.Rd = weights;
  pr.budget = p;
  return pr;
}

// Strict weak order: larger norm first, then lower index.
struct ByNormDesc {
  const Vector* norms;
  bool operator()(Index a, Index b) const {
    const double na = (*norms)[a];
    const double nb = (*norms)[b];
    if (na != nb) return na > nb;
    return a < b;
  }
};

std::vector<Index> top_by_norm(const Vector& norms, Index p) {
  std::vector<Index> idx(static_cast<std::size_t>(norms.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  if (p < norms.size()) {
    std::nth_element(idx.begin(), idx.begin() + p, idx.end(), ByNormDesc{&norms});
    idx.resize(static_cast<std::size_t>(p));
  }
  std::sort(idx.begin(), idx.end());
  return idx;
}

Matrix keep_rows(const Matrix& v, const std::vector<Index>& rows) {
  Matrix w = Matrix::Zero(v.rows(), v.cols());
  for (Index i : rows) w.row(i) = v.row(i);
  return w;
}

}  // namespace

Matrix AdmmProblem::dense_q() const {
  Matrix q = UQ_hat * SQ.array().square().matrix().asDiagonal() * UQ_hat.transpose();
  q.diagonal() += deltaS_hat;
  return q;
}

AdmmProblem normalize(const ReducedOrderModel& rom, const NoiseModel& noise, Index p) {
  return assemble(rom, noise, p, noise.Rd);
}

AdmmProblem without_normalization(const ReducedOrderModel& rom, const NoiseModel& noise, Index p) {
  return assemble(rom, noise, p, Vector::Ones(rom.n()));
}

AdmmProblem with_group_l1(AdmmProblem problem, double lambda) {
  if (!(lambda >= 0.0)) throw Error(ErrorCode::InfeasibleBudget, "group-l1 weight must be >= 0");
  problem.mode = SparsityMode::GroupL1;
  problem.lambda = lambda;
  return problem;
}

void SolverConfig::validate() const {
  if (!(gamma_init > 0.0)) throw Error(ErrorCode::InfeasibleBudget, "gamma_init must be > 0");
  if (!(eta > 0.0 && eta < 1.0)) throw Error(ErrorCode::InfeasibleBudget, "eta must lie in (0, 1)");
  if (eps_conv && !(*eps_conv > 0.0)) throw Error(ErrorCode::InfeasibleBudget, "eps_conv must be > 0");
  if (gamma_decay_period < 1) throw Error(ErrorCode::InfeasibleBudget, "decay period must be >= 1");
  if (max_iters < 1) throw Error(ErrorCode::InfeasibleBudget, "max_iters must be >= 1");
  if (!(polish_threshold > 0.0)) throw Error(ErrorCode::InfeasibleBudget, "polish threshold must be > 0");
}

double SolverConfig::tolerance_for(Index n, Index r1) const {
  return eps_conv ? *eps_conv : 1e-6 * std::sqrt(static_cast<double>(n * r1));
}

SolverState SolverState::initial(const AdmmProblem& problem, double gamma, std::optional<Matrix> x0) {
  const Index n = problem.n();
  const Index r1 = problem.r1();
  SolverState s;
  if (x0) {
    if (x0->rows() != n || x0->cols() != r1) {
      throw Error(ErrorCode::DimensionMismatch, "initial X must be n x r1");
    }
    s.X = std::move(*x0);
  } else {
    // Minimum-norm solution of A X = I: A^T (A A^T)^-1.
    const Matrix gram = problem.A_t.transpose() * problem.A_t;
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorCode::NumericalFailure, "candidate matrix does not have full row rank");
    }
    s.X = problem.A_t * llt.solve(Matrix::Identity(r1, r1));
  }
  s.Z1 = Matrix::Zero(n, r1);
  s.Z2 = Matrix::Zero(r1, r1);
  s.Y1 = Matrix::Zero(n, r1);
  s.Y2 = Matrix::Zero(r1, r1);
  s.gamma = gamma;
  return s;
}

XUpdateFactor::XUpdateFactor(const AdmmProblem& problem, double gamma)
    : problem_(&problem), gamma_(gamma) {
  if (!(gamma > 0.0)) throw Error(ErrorCode::NumericalFailure, "gamma must be > 0");
  const Index q = problem.noise_rank();

  d_inv_ = (2.0 * problem.deltaS_hat.array() + 1.0 / gamma).inverse().matrix();
  kernels::scale_rows(ad_, d_inv_, problem.A_t);

  Matrix inner = kernels::cross_gram(problem.A_t, ad_);
  inner = 0.5 * (inner + inner.transpose()).eval();
  inner.diagonal().array() += gamma;
  inner_.compute(inner);
  if (inner_.info() != Eigen::Success) {
    throw Error(ErrorCode::NumericalFailure, "r1 x r1 inner system is singular");
  }

  v_ = problem.UQ_hat * (std::sqrt(2.0) * problem.SQ).asDiagonal();
  kernels::scale_rows(jv_, d_inv_, v_);
  if (q > 0) {
    kernels::sub_product(jv_, ad_, inner_.solve(kernels::cross_gram(ad_, v_)));
  }

  Matrix cap = q > 0 ? kernels::cross_gram(v_, jv_) : Matrix(0, 0);
  cap = 0.5 * (cap + cap.transpose()).eval();
  cap.diagonal().array() += 1.0;
  capacitance_.compute(cap);
  if (q > 0 && capacitance_.info() != Eigen::Success) {
    throw Error(ErrorCode::NumericalFailure, "noise-rank capacitance system is singular");
  }
}

Matrix XUpdateFactor::solve(const Matrix& z1_minus_y1, const Matrix& z2_minus_y2) const {
  Matrix x, b;
  solve_into(z1_minus_y1, z2_minus_y2, x, b);
  return x;
}

void XUpdateFactor::solve_into(const Matrix& z1_minus_y1, const Matrix& z2_minus_y2, Matrix& x,
                               Matrix& b) const {
  const AdmmProblem& pr = *problem_;
  // B = (1/gamma) [(Z1 - Y1) + A^T (Z2 - Y2)]
  b = z1_minus_y1;
  kernels::sub_product(b, pr.A_t, -z2_minus_y2);
  b /= gamma_;

  // J^-1 B
  kernels::scale_rows(x, d_inv_, b);
  kernels::sub_product(x, ad_, inner_.solve(kernels::cross_gram(ad_, b)));

  // noise-rank correction
  if (pr.noise_rank() > 0) {
    kernels::sub_product(x, jv_, capacitance_.solve(kernels::cross_gram(v_, x)));
  }
}

Matrix x_update(const AdmmProblem& problem, const SolverState& state) {
  XUpdateFactor factor(problem, state.gamma);
  return factor.solve(state.Z1 - state.Y1, state.Z2 - state.Y2);
}

Matrix l0_bht(const Matrix& v, Index p) {
  if (p < 1) throw Error(ErrorCode::InfeasibleBudget, "hard-threshold budget must be >= 1");
  if (p >= v.rows()) return v;
  return keep_rows(v, top_by_norm(kernels::row_norms(v), p));
}

Matrix block_soft_threshold(const Matrix& v, double t) {
  if (!(t >= 0.0)) throw Error(ErrorCode::InfeasibleBudget, "threshold must be >= 0");
  Matrix w(v.rows(), v.cols());
  for (Index i = 0; i < v.rows(); ++i) {
    const double nrm = v.row(i).norm();
    const double scale = nrm > 0.0 ? std::max(0.0, 1.0 - t / nrm) : 0.0;
    w.row(i) = scale * v.row(i);
  }
  return w;
}

std::vector<Index> top_rows(const Matrix& x, Index p) {
  return top_by_norm(kernels::row_norms(x), p);
}

double admm_objective(const AdmmProblem& problem, const Matrix& x) {
  double obj = kernels::weighted_row_energy(problem.deltaS_hat, x);
  if (problem.noise_rank() > 0) {
    const Matrix w = problem.UQ_hat * problem.SQ.asDiagonal();
    obj += kernels::cross_gram(w, x).squaredNorm();
  }
  return obj;
}

double support_objective(const AdmmProblem& problem, const std::vector<Index>& support) {
  const Index p = static_cast<Index>(support.size());
  const Index r1 = problem.r1();
  if (p < r1) return std::numeric_limits<double>::infinity();
  const Matrix c = gather_rows(problem.A_t, support);
  const Matrix w = gather_rows(problem.UQ_hat, support) * problem.SQ.asDiagonal();
  Matrix rp = w * w.transpose();
  for (Index j = 0; j < p; ++j) rp(j, j) += problem.deltaS_hat[support[static_cast<std::size_t>(j)]];
  Eigen::LLT<Matrix> rp_llt(rp);
  if (rp_llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  Matrix fim = c.transpose() * rp_llt.solve(c);
  fim = 0.5 * (fim + fim.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(fim, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kFimConditionLimit) return std::numeric_limits<double>::infinity();
  return fim.llt().solve(Matrix::Identity(r1, r1)).trace();
}

AdmmResult solve(const AdmmProblem& problem, const SolverConfig& config, std::optional<Matrix> initial) {
  config.validate();
  const Index n = problem.n();
  const Index r1 = problem.r1();
  if (problem.mode == SparsityMode::GroupL0 && (problem.budget < r1 || problem.budget > n)) {
    throw Error(ErrorCode::InfeasibleBudget, "sensor budget p=" + std::to_string(problem.budget) +
                                                 " must satisfy r1 <= p <= n");
  }
  const double tol = config.tolerance_for(n, r1);
  const Matrix eye = Matrix::Identity(r1, r1);
  const Matrix w_obj = problem.UQ_hat * problem.SQ.asDiagonal();

  AdmmResult result;
  result.lambda = problem.lambda;
  SolverState& s = result.state;
  s = SolverState::initial(problem, config.gamma_init, std::move(initial));
  if (config.record_trace) s.trace.reserve(static_cast<std::size_t>(std::min<Index>(config.max_iters, 100000)));

  const bool track = config.track_best_support && problem.mode == SparsityMode::GroupL0;
  result.best_objective = std::numeric_limits<double>::infinity();
  std::vector<Index> support;
  // Supports already scored. Small problems cycle through a handful of
  // supports, so this skips most rescoring; the cap bounds memory.
  std::set<std::vector<Index>> scored;
  constexpr std::size_t kScoredCap = 1 << 14;

  std::optional<XUpdateFactor> factor;
  // Loop buffers, sized once.
  Matrix x_new(n, r1), v1(n, r1), rhs(n, r1), scratch(n, r1);
  for (Index k = 1; k <= config.max_iters; ++k) {
    if (!factor || factor->gamma() != s.gamma) factor.emplace(problem, s.gamma);

    rhs = s.Z1 - s.Y1;
    factor->solve_into(rhs, s.Z2 - s.Y2, x_new, scratch);

    // Z-update on G X + Y; Y-update Y + G X - Z.
    v1 = x_new + s.Y1;
    const Matrix ax = kernels::cross_gram(problem.A_t, x_new);
    if (problem.mode == SparsityMode::GroupL0) {
      support = top_by_norm(kernels::row_norms(v1), problem.budget);
      s.Z1.setZero();
      for (Index i : support) s.Z1.row(i) = v1.row(i);
      if (track && scored.insert(support).second) {
        if (scored.size() > kScoredCap) scored.clear();
        const double obj = support_objective(problem, support);
        if (obj < result.best_objective) {
          result.best_objective = obj;
          result.best_support = support;
          result.best_iteration = k;
        }
      }
    } else {
      s.Z1 = block_soft_threshold(v1, problem.lambda * s.gamma);
    }
    s.Z2 = eye;
    s.Y1 = v1 - s.Z1;
    s.Y2 = ax + s.Y2 - s.Z2;

    const double step = (x_new - s.X).norm();
    s.X.swap(x_new);
    s.iter = k;

    if (config.record_trace) {
      TraceRecord rec;
      rec.iteration = k;
      rec.gamma = s.gamma;
      rec.objective = kernels::weighted_row_energy(problem.deltaS_hat, s.X);
      if (problem.noise_rank() > 0) rec.objective += kernels::cross_gram(w_obj, s.X).squaredNorm();
      rec.residual = (ax - eye).norm();
      const Vector norms = kernels::row_norms(s.X);
      rec.active_rows = (norms.array() > config.polish_threshold).count();
      rec.step = step;
      s.trace.push_back(rec);
    }

    if (!std::isfinite(step)) {
      throw Error(ErrorCode::NumericalFailure, "ADMM iterates diverged at iteration " + std::to_string(k));
    }
    if (step <= tol) {
      result.converged = true;
      break;
    }
    if (k % config.gamma_decay_period == 0) s.gamma *= config.eta;
  }

  const Vector norms = kernels::row_norms(s.X);
  std::vector<Index> chosen;
  if (problem.mode == SparsityMode::GroupL0) {
    chosen = top_by_norm(norms, problem.budget);
    if (!result.converged && !result.best_support.empty()) chosen = result.best_support;
  } else {
    for (Index i = 0; i < n; ++i) {
      if (norms[i] > config.polish_threshold) chosen.push_back(i);
    }
    if (chosen.empty()) {
      throw Error(ErrorCode::NumericalFailure, "group-l1 solution has no active rows");
    }
  }
  result.sensors = SensorSet(std::move(chosen), n);
  return result;
}

Estimator polish(const ReducedOrderModel& rom, const NoiseModel& noise, const SensorSet& sensors) {
  return wls_estimator(rom, noise, sensors);
}

Matrix denormalized_gain(const AdmmProblem& problem, const Matrix& x) {
  return x.transpose() * problem.Rd.array().rsqrt().matrix().asDiagonal();
}

}  // namespace ssel
