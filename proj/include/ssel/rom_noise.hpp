#pragma once

#include "ssel/types.hpp"

namespace ssel {

// Thin SVD of a snapshot matrix, split at the signal rank r1 and the
// noise-model rank r2 (1 <= r1 < r2 <= min(n, m)).
struct ReducedOrderModel {
  Matrix U;  // n x k spatial modes, k = min(n, m)
  Vector S;  // k singular values, descending
  Matrix V;  // m x k temporal modes
  Index r1 = 0;
  Index r2 = 0;

  Index n() const { return U.rows(); }
  Index rank() const { return S.size(); }

  // Leading r1 spatial modes: the sensor candidate matrix.
  auto signal_modes() const { return U.leftCols(r1); }
};

// Low-rank correlated noise covariance
//   R = UQ diag(SQ^2) UQ^T + diag(deltaS)
// built from modes r1+1..r2, with deltaS restoring the exact diagonal of the
// covariance of all truncated modes r1+1..k. Rd is diag(R), floored.
struct NoiseModel {
  Matrix UQ;      // n x (r2 - r1)
  Vector SQ;      // r2 - r1
  Vector deltaS;  // n, >= 0
  Vector Rd;      // n, > 0

  Index n() const { return deltaS.size(); }
  Index rank() const { return SQ.size(); }

  // R = c I. Used for the white-noise variants of the selectors.
  static NoiseModel white(Index n, double variance = 1.0);

  // Explicit n x n covariance. O(n^2) memory; tests and small problems only.
  Matrix dense_covariance() const;
};

ReducedOrderModel fit_rom(const SnapshotMatrix& data, Index r1, Index r2);

// Same, from precomputed factors. Validates ranks and descending S.
ReducedOrderModel make_rom(Matrix U, Vector S, Matrix V, Index r1, Index r2);

NoiseModel build_noise_model(const ReducedOrderModel& rom);

// H R H^T for the selected rows, assembled from rows of UQ and the diagonal
// only. Cost O(p^2 (r2 - r1)).
Matrix covariance_submatrix(const NoiseModel& noise, const SensorSet& sensors);

// Relative floor applied to Rd before any inverse square root.
inline constexpr double kRdFloor = 1e-14;
// Tolerance below which a negative deltaS entry is treated as rounding noise.
inline constexpr double kDeltaSNegTol = 1e-12;

}  // namespace ssel
