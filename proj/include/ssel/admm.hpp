#pragma once

// ADMM sensor selection:
//
//   minimize tr(X^T Q X)  subject to  ||X||_{g,0} <= p  and  A X = I
//
// with X (n x r1) the transposed, noise-normalized estimation gain, A the
// normalized candidate matrix transposed, and Q the low-rank-plus-diagonal
// noise covariance. The splitting uses G = [I; A], Z = [Z1; Z2]: Z1 carries
// the row-sparsity constraint and Z2 is pinned to I.

#include "ssel/estimation.hpp"
#include "ssel/rom_noise.hpp"
#include "ssel/types.hpp"

#include <optional>
#include <vector>

namespace ssel {

enum class SparsityMode { GroupL0, GroupL1 };

struct AdmmProblem {
  Matrix A_t;         // n x r1; A = A_t^T
  Matrix UQ_hat;      // n x (r2 - r1)
  Vector SQ;          // r2 - r1
  Vector deltaS_hat;  // n
  Vector Rd;          // n; the row weights used for normalization (ones when skipped)
  Index budget = 0;   // p, GroupL0 only
  SparsityMode mode = SparsityMode::GroupL0;
  double lambda = 0.0;  // GroupL1 only

  Index n() const { return A_t.rows(); }
  Index r1() const { return A_t.cols(); }
  Index noise_rank() const { return SQ.size(); }

  // Explicit n x n Q. Tests and small instances only.
  Matrix dense_q() const;
};

// Scales candidate rows by Rd^{-1/2} so the implied Q has unit diagonal.
// Throws InfeasibleBudget unless r1 <= p <= n.
AdmmProblem normalize(const ReducedOrderModel& rom, const NoiseModel& noise, Index p);

// Same problem without the Rd^{-1/2} row scaling.
AdmmProblem without_normalization(const ReducedOrderModel& rom, const NoiseModel& noise, Index p);

// Switches a problem to the group-l1 penalty lambda * sum_i ||x_i||_2.
AdmmProblem with_group_l1(AdmmProblem problem, double lambda);

struct SolverConfig {
  double gamma_init = 1.0;
  double eta = 0.99;
  Index gamma_decay_period = 5000;
  // Tolerance on ||X^k - X^(k-1)||_F. Unset means 1e-6 * sqrt(n * r1).
  std::optional<double> eps_conv;
  Index max_iters = 200000;
  double polish_threshold = 1e-4;
  bool record_trace = true;
  // Score the support of Z1 whenever it changes and keep the best one seen.
  // A run that stops without converging reports that support.
  bool track_best_support = true;

  void validate() const;
  double tolerance_for(Index n, Index r1) const;
};

struct TraceRecord {
  Index iteration = 0;
  double gamma = 0.0;
  double objective = 0.0;  // tr(X^T Q X)
  double residual = 0.0;   // ||A X - I||_F
  Index active_rows = 0;   // rows of X above the polish threshold
  double step = 0.0;       // ||X^k - X^(k-1)||_F
};

struct SolverState {
  Matrix X;   // n x r1
  Matrix Z1;  // n x r1
  Matrix Z2;  // r1 x r1
  Matrix Y1;  // n x r1
  Matrix Y2;  // r1 x r1
  double gamma = 0.0;
  Index iter = 0;
  std::vector<TraceRecord> trace;

  static SolverState initial(const AdmmProblem& problem, double gamma,
                             std::optional<Matrix> x0 = std::nullopt);
};

struct AdmmResult {
  SolverState state;
  SensorSet sensors;
  bool converged = false;
  double lambda = 0.0;
  // Best Z1 support seen while iterating, with its A-optimality value and
  // the iteration it first appeared. Empty when tracking is off.
  std::vector<Index> best_support;
  double best_objective = 0.0;
  Index best_iteration = 0;
};

// Cached factorization of 2Q + (1/gamma)(I + A^T A) for one gamma, applied
// through two nested matrix-inversion-lemma steps: first the diagonal plus
// rank-r1 part J, then the rank-(r2 - r1) noise correction. Building costs
// O(n (r2-r1)^2); each apply costs O(n r1 (r1 + r2 - r1)).
class XUpdateFactor {
 public:
  XUpdateFactor(const AdmmProblem& problem, double gamma);

  double gamma() const { return gamma_; }

  // argmin_X tr(X^T Q X) + (1/2 gamma) ||Z - G X - Y||_F^2.
  Matrix solve(const Matrix& z1_minus_y1, const Matrix& z2_minus_y2) const;

  // Same, writing into x and using b as scratch; reuses their storage.
  void solve_into(const Matrix& z1_minus_y1, const Matrix& z2_minus_y2, Matrix& x, Matrix& b) const;

 private:
  const AdmmProblem* problem_;
  double gamma_;
  Vector d_inv_;     // (2 deltaS_hat + 1/gamma)^-1
  Matrix ad_;        // D^-1 A^T, n x r1
  Eigen::LLT<Matrix> inner_;  // gamma I + A D^-1 A^T
  Matrix v_;         // UQ_hat diag(sqrt(2) SQ)
  Matrix jv_;        // J^-1 V
  Eigen::LLT<Matrix> capacitance_;  // I + V^T J^-1 V
};

Matrix x_update(const AdmmProblem& problem, const SolverState& state);

// Metric projection onto {W : at most p nonzero rows}: keeps the p rows of
// largest norm. Equal norms at the cut keep the lower row index.
Matrix l0_bht(const Matrix& v, Index p);

// Row-wise prox of t * sum_i ||v_i||_2.
Matrix block_soft_threshold(const Matrix& v, double t);

// Top-p rows of x by norm, returned in ascending index order.
std::vector<Index> top_rows(const Matrix& x, Index p);

double admm_objective(const AdmmProblem& problem, const Matrix& x);

// tr((C^T Q_S^-1 C)^-1) for the rows `support` of the problem's own
// candidate and noise matrices. Row scaling cancels in this ratio, so for a
// normalized problem it equals the A-optimality value of the unscaled one.
// Returns +inf when the Fisher information is singular.
double support_objective(const AdmmProblem& problem, const std::vector<Index>& support);

AdmmResult solve(const AdmmProblem& problem, const SolverConfig& config,
                 std::optional<Matrix> initial = std::nullopt);

// Recomputes the estimator for the selected set by weighted least squares.
// The solver's own gain is not used for estimation.
Estimator polish(const ReducedOrderModel& rom, const NoiseModel& noise, const SensorSet& sensors);

// Undoes the row scaling: K = X^T Rd^{-1/2}.
Matrix denormalized_gain(const AdmmProblem& problem, const Matrix& x);

}  // namespace ssel
