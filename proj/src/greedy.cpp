#include "ssel/greedy.hpp"

#include "ssel/errors.hpp"
#include "ssel/kernels.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ssel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Candidates whose conditional noise variance falls below this fraction of
// their marginal variance are numerically dependent on the current set.
constexpr double kConditionalVarianceTol = 1e-12;
// Scores within this relative distance of the best are ties.
constexpr double kTieTol = 1e-12;
// Eigenvalues below this fraction of the largest count as zero.
constexpr double kRankTol = 1e-10;

struct PseudoScore {
  Index rank = 0;
  double trace = kInf;
};

PseudoScore pseudo_inverse_trace(const Matrix& fim) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(fim, Eigen::EigenvaluesOnly);
  const Vector& ev = eig.eigenvalues();
  const double top = ev.size() > 0 ? ev.maxCoeff() : 0.0;
  PseudoScore out;
  if (!(top > 0.0)) return out;
  out.trace = 0.0;
  for (Index j = 0; j < ev.size(); ++j) {
    if (ev[j] > kRankTol * top) {
      ++out.rank;
      out.trace += 1.0 / ev[j];
    }
  }
  return out;
}

}  // namespace

GreedyResult greedy_select(const ReducedOrderModel& rom, const NoiseModel& base_noise,
                           const GreedyConfig& config) {
  const Index n = rom.n();
  const Index r1 = rom.r1;
  const Index p = config.p;
  if (p < r1 || p > n) {
    throw Error(ErrorCode::InfeasibleBudget, "greedy budget p=" + std::to_string(p) +
                                                 " must satisfy r1=" + std::to_string(r1) +
                                                 " <= p <= n=" + std::to_string(n));
  }
  if (base_noise.n() != n) throw Error(ErrorCode::DimensionMismatch, "noise model and ROM disagree on n");

  const NoiseModel white = config.noise_mode == NoiseMode::White ? NoiseModel::white(n) : NoiseModel();
  const NoiseModel& noise = config.noise_mode == NoiseMode::White ? white : base_noise;

  const Index q = noise.rank();
  const Matrix w = noise.UQ * noise.SQ.asDiagonal();  // R = W W^T + diag(deltaS)
  const Matrix c_all = rom.U.leftCols(r1);

  // Whitened quantities of the committed set, with Rp = L L^T:
  //   m_sel = L^-1 W_sel (k x q),  cn = L^-1 C_sel (k x r1).
  Matrix m_sel(0, q);
  Matrix cn(0, r1);
  Matrix fim = Matrix::Zero(r1, r1);
  Matrix fim_inv;
  std::vector<bool> taken(static_cast<std::size_t>(n), false);

  GreedyResult out;
  std::vector<Index> order;
  order.reserve(static_cast<std::size_t>(p));

  Matrix cross;     // n x k: row i = (L^-1 b_i)^T, b_i = cov(selected, i)
  Matrix u;         // n x r1: whitened candidate rows before scaling
  Vector s2(n);     // conditional variances
  Vector score(n);
  std::vector<Index> rank(static_cast<std::size_t>(n), 0);

  for (Index k = 0; k < p; ++k) {
    if (k > 0 && q > 0) {
      kernels::multiply(cross, w, m_sel.transpose());
    } else {
      cross = Matrix::Zero(n, k);
    }
    u = c_all;
    if (k > 0) kernels::sub_product(u, cross, cn);

#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
      s2[i] = noise.Rd[i] - cross.row(i).squaredNorm();
      const bool usable = !taken[static_cast<std::size_t>(i)] &&
                          s2[i] > kConditionalVarianceTol * noise.Rd[i];
      if (usable) u.row(i) /= std::sqrt(s2[i]);
    }

    const bool full_rank = k >= r1;
    if (full_rank) {
      Matrix g;
      kernels::multiply(g, u, fim_inv);
      const double base = fim_inv.trace();
#pragma omp parallel for schedule(static)
      for (Index i = 0; i < n; ++i) {
        const bool usable = !taken[static_cast<std::size_t>(i)] &&
                            s2[i] > kConditionalVarianceTol * noise.Rd[i];
        if (!usable) {
          score[i] = kInf;
          rank[static_cast<std::size_t>(i)] = -1;
          continue;
        }
        const double num = g.row(i).squaredNorm();
        const double den = 1.0 + g.row(i).dot(u.row(i));
        score[i] = base - num / den;
        rank[static_cast<std::size_t>(i)] = r1;
      }
    } else {
#pragma omp parallel for schedule(dynamic, 64)
      for (Index i = 0; i < n; ++i) {
        const bool usable = !taken[static_cast<std::size_t>(i)] &&
                            s2[i] > kConditionalVarianceTol * noise.Rd[i];
        if (!usable) {
          score[i] = kInf;
          rank[static_cast<std::size_t>(i)] = -1;
          continue;
        }
        const Matrix f = fim + u.row(i).transpose() * u.row(i);
        const PseudoScore ps = pseudo_inverse_trace(f);
        score[i] = ps.trace;
        rank[static_cast<std::size_t>(i)] = ps.rank;
      }
    }

    // Commit: highest rank, then lowest score, ties to the lowest index.
    Index best_rank = -1;
    for (Index i = 0; i < n; ++i) {
      if (std::isfinite(score[i])) best_rank = std::max(best_rank, rank[static_cast<std::size_t>(i)]);
    }
    double best = kInf;
    for (Index i = 0; i < n; ++i) {
      if (rank[static_cast<std::size_t>(i)] == best_rank && score[i] < best) best = score[i];
    }
    if (!std::isfinite(best)) {
      throw Error(ErrorCode::SingularFIM, "no candidate yields a usable step at step " + std::to_string(k + 1));
    }
    Index pick = -1;
    for (Index i = 0; i < n; ++i) {
      if (rank[static_cast<std::size_t>(i)] == best_rank && score[i] <= best + kTieTol * std::abs(best)) {
        pick = i;
        break;
      }
    }

    // Appending the pick extends L by the row [cross_pick, s].
    const double s = std::sqrt(s2[pick]);

    Matrix m_new(k + 1, q);
    m_new.topRows(k) = m_sel;
    if (q > 0) m_new.row(k) = (w.row(pick) - cross.row(pick) * m_sel) / s;
    m_sel = std::move(m_new);

    Matrix cn_new(k + 1, r1);
    cn_new.topRows(k) = cn;
    cn_new.row(k) = u.row(pick);
    cn = std::move(cn_new);

    fim = cn.transpose() * cn;
    fim = 0.5 * (fim + fim.transpose()).eval();
    taken[static_cast<std::size_t>(pick)] = true;
    order.push_back(pick);

    if (k + 1 >= r1) {
      Eigen::LLT<Matrix> llt(fim);
      if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::SingularFIM, "Fisher information singular after " + std::to_string(k + 1) + " sensors");
      }
      fim_inv = llt.solve(Matrix::Identity(r1, r1));
      out.objectives.push_back(fim_inv.trace());
      out.ranks.push_back(r1);
    } else {
      const PseudoScore ps = pseudo_inverse_trace(fim);
      out.objectives.push_back(ps.trace);
      out.ranks.push_back(ps.rank);
    }
  }

  out.sensors = SensorSet(std::move(order), n);
  return out;
}

}  // namespace ssel
