#include "ssel/estimation.hpp"

#include "ssel/errors.hpp"

#include <string>

namespace ssel {

Matrix measurement_matrix(const ReducedOrderModel& rom, const SensorSet& sensors) {
  if (sensors.candidate_count() != rom.n()) {
    throw Error(ErrorCode::IndexOutOfRange, "sensor set built for n=" +
                                                std::to_string(sensors.candidate_count()) +
                                                " but model has n=" + std::to_string(rom.n()));
  }
  Matrix c(sensors.size(), rom.r1);
  for (Index j = 0; j < sensors.size(); ++j) c.row(j) = rom.U.row(sensors[j]).head(rom.r1);
  return c;
}

Estimator wls_estimator(const ReducedOrderModel& rom, const NoiseModel& noise,
                        const SensorSet& sensors) {
  if (sensors.size() < rom.r1) {
    throw Error(ErrorCode::UnderSampled, "p=" + std::to_string(sensors.size()) +
                                             " sensors cannot estimate r1=" +
                                             std::to_string(rom.r1) + " latent variables");
  }
  if (noise.n() != rom.n()) {
    throw Error(ErrorCode::DimensionMismatch, "noise model and ROM disagree on n");
  }

  const Matrix c = measurement_matrix(rom, sensors);
  Estimator est{sensors, Matrix(), covariance_submatrix(noise, sensors), Matrix()};

  Eigen::LLT<Matrix> rp_llt(est.Rp);
  if (rp_llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularFIM, "noise covariance of the selected sensors is not positive definite");
  }
  const Matrix rinv_c = rp_llt.solve(c);
  Matrix fim = c.transpose() * rinv_c;
  fim = 0.5 * (fim + fim.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> eig(fim, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kFimConditionLimit) {
    throw Error(ErrorCode::SingularFIM, "Fisher information is singular (condition " +
                                            std::to_string(lo > 0.0 ? hi / lo : INFINITY) + ")");
  }

  Eigen::LLT<Matrix> fim_llt(fim);
  if (fim_llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularFIM, "Cholesky of the Fisher information failed");
  }
  est.fim_inverse = fim_llt.solve(Matrix::Identity(rom.r1, rom.r1));
  est.gain = fim_llt.solve(rinv_c.transpose());
  return est;
}

double aopt_objective(const ReducedOrderModel& rom, const NoiseModel& noise,
                      const SensorSet& sensors) {
  return wls_estimator(rom, noise, sensors).objective();
}

Reconstruction reconstruct(const Estimator& estimator, const ReducedOrderModel& rom,
                           const SnapshotMatrix& snapshots) {
  if (snapshots.rows() != rom.n() || estimator.gain.rows() != rom.r1 ||
      estimator.gain.cols() != estimator.sensors.size()) {
    throw Error(ErrorCode::DimensionMismatch, "estimator, model and snapshots disagree in shape");
  }
  const Matrix observed = gather_rows(snapshots.values(), estimator.sensors.indices());
  Reconstruction out;
  out.coefficients = estimator.gain * observed;
  out.field = rom.signal_modes() * out.coefficients;
  return out;
}

double reconstruction_error(const SnapshotMatrix& original, const Matrix& field) {
  const Matrix& x = original.values();
  if (x.rows() != field.rows() || x.cols() != field.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "reconstructed field shape differs from data");
  }
  const double denom = x.norm();
  if (denom == 0.0) throw Error(ErrorCode::ZeroData, "original data has zero norm");
  return (x - field).norm() / denom;
}

}  // namespace ssel
