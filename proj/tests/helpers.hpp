#pragma once

// Independent dense reference computations. Nothing here calls the library's
// numerical code; instances are built from scratch and every quantity is
// formed explicitly (n x n covariances, dense selection matrices, explicit
// inverses).

#include "ssel/rom_noise.hpp"
#include "ssel/types.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace testing {

using ssel::Index;
using ssel::Matrix;
using ssel::Vector;

inline Matrix random_gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = nd(rng);
  return g;
}

inline Matrix random_orthonormal(Index rows, Index cols, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_gaussian(rows, cols, rng));
  return qr.householderQ() * Matrix::Identity(rows, cols);
}

// Descending positive spectrum with some spread.
inline Vector random_spectrum(Index k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ud(0.2, 1.0);
  Vector s(k);
  double v = 1.0;
  for (Index i = 0; i < k; ++i) {
    s[i] = v;
    v *= ud(rng);
  }
  return s;
}

struct Instance {
  Matrix U;
  Vector S;
  Matrix V;
  Index r1;
  Index r2;
  Matrix data() const { return U * S.asDiagonal() * V.transpose(); }
};

inline Instance random_instance(Index n, Index m, Index r1, Index r2, std::mt19937_64& rng) {
  const Index k = std::min(n, m);
  return Instance{random_orthonormal(n, k, rng), random_spectrum(k, rng), random_orthonormal(m, k, rng), r1, r2};
}

// Covariance of all truncated modes r1+1..k, formed densely.
inline Matrix explicit_truncated_covariance(const Matrix& U, const Vector& S, Index r1) {
  const Index k = S.size();
  const Matrix ut = U.middleCols(r1, k - r1);
  const Vector st = S.segment(r1, k - r1);
  return ut * st.array().square().matrix().asDiagonal() * ut.transpose();
}

// Low-rank part only (modes r1+1..r2), no diagonal correction.
inline Matrix explicit_lowrank_covariance(const Matrix& U, const Vector& S, Index r1, Index r2) {
  const Matrix uq = U.middleCols(r1, r2 - r1);
  const Vector sq = S.segment(r1, r2 - r1);
  return uq * sq.array().square().matrix().asDiagonal() * uq.transpose();
}

// Low-rank part plus the diagonal that restores the truncated-mode diagonal.
inline Matrix explicit_noise_covariance(const Matrix& U, const Vector& S, Index r1, Index r2) {
  Matrix low = explicit_lowrank_covariance(U, S, r1, r2);
  const Matrix full = explicit_truncated_covariance(U, S, r1);
  low.diagonal() += (full.diagonal() - low.diagonal());
  return low;
}

inline Matrix dense_selection(const std::vector<Index>& rows, Index n) {
  Matrix h = Matrix::Zero(static_cast<Index>(rows.size()), n);
  for (std::size_t j = 0; j < rows.size(); ++j) h(static_cast<Index>(j), rows[j]) = 1.0;
  return h;
}

// tr((C^T Rp^-1 C)^-1) with C = H U1, Rp = H R H^T, via explicit inverses.
inline double dense_aopt(const Matrix& U1, const Matrix& R, const std::vector<Index>& rows) {
  const Matrix h = dense_selection(rows, U1.rows());
  const Matrix c = h * U1;
  const Matrix rp = h * R * h.transpose();
  const Matrix fim = c.transpose() * rp.inverse() * c;
  return fim.inverse().trace();
}

// Calls f(subset) for every p-subset of {0..n-1} in lexicographic order.
template <typename F>
void for_each_subset(Index n, Index p, F&& f) {
  std::vector<Index> s(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) s[static_cast<std::size_t>(j)] = j;
  while (true) {
    f(s);
    Index j = p - 1;
    while (j >= 0 && s[static_cast<std::size_t>(j)] == n - p + j) --j;
    if (j < 0) return;
    ++s[static_cast<std::size_t>(j)];
    for (Index t = j + 1; t < p; ++t) s[static_cast<std::size_t>(t)] = s[static_cast<std::size_t>(t - 1)] + 1;
  }
}

// Normalized quantities formed from the explicit covariance.
struct DenseNormalized {
  Matrix A;  // r1 x n
  Matrix Q;  // n x n
};

inline DenseNormalized dense_normalized(const Instance& inst) {
  const Matrix r = explicit_noise_covariance(inst.U, inst.S, inst.r1, inst.r2);
  const Vector w = r.diagonal().array().rsqrt();
  return {(w.asDiagonal() * inst.U.leftCols(inst.r1)).transpose(), w.asDiagonal() * r * w.asDiagonal()};
}

// Direct solve of (2Q + (1/g)(I + A^T A)) X = (1/g)((Z1 - Y1) + A^T (Z2 - Y2)).
inline Matrix dense_x_update(const Matrix& a, const Matrix& q, double g, const Matrix& z1y1, const Matrix& z2y2) {
  const Index n = q.rows();
  const Matrix lhs = 2.0 * q + (Matrix::Identity(n, n) + a.transpose() * a) / g;
  const Matrix rhs = (z1y1 + a.transpose() * z2y2) / g;
  return lhs.partialPivLu().solve(rhs);
}

inline double rel_diff(const Matrix& a, const Matrix& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale > 0.0 ? (a - b).norm() / scale : 0.0;
}

}  // namespace testing
