#pragma once

#include "ssel/rom_noise.hpp"
#include "ssel/types.hpp"

namespace ssel {

// Weighted least-squares estimator for a fixed sensor set:
//   z = (C^T Rp^-1 C)^-1 C^T Rp^-1 y,  C = H U_{1:r1}.
struct Estimator {
  SensorSet sensors;
  Matrix gain;         // r1 x p
  Matrix Rp;           // p x p
  Matrix fim_inverse;  // r1 x r1

  // A-optimality value tr((C^T Rp^-1 C)^-1).
  double objective() const { return fim_inverse.trace(); }
};

// Condition number of the Fisher information above which it is treated as singular.
inline constexpr double kFimConditionLimit = 1e12;

// p x r1 measurement matrix C: row j is row sensors[j] of U_{1:r1}.
Matrix measurement_matrix(const ReducedOrderModel& rom, const SensorSet& sensors);

Estimator wls_estimator(const ReducedOrderModel& rom, const NoiseModel& noise,
                        const SensorSet& sensors);

double aopt_objective(const ReducedOrderModel& rom, const NoiseModel& noise,
                      const SensorSet& sensors);

struct Reconstruction {
  Matrix coefficients;  // r1 x m
  Matrix field;         // n x m
};

// Estimates mode coefficients from the snapshot rows at the sensor locations
// and lifts them back to the full field.
Reconstruction reconstruct(const Estimator& estimator, const ReducedOrderModel& rom,
                           const SnapshotMatrix& snapshots);

// ||original - field||_F / ||original||_F.
double reconstruction_error(const SnapshotMatrix& original, const Matrix& field);

}  // namespace ssel
