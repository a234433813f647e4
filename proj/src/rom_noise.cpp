#include "ssel/rom_noise.hpp"

#include "ssel/errors.hpp"

#include <string>

namespace ssel {

namespace {

void check_ranks(Index r1, Index r2, Index k) {
  if (r1 < 1 || r2 <= r1 || r2 > k) {
    throw Error(ErrorCode::RankOutOfRange, "need 1 <= r1 < r2 <= " + std::to_string(k) +
                                               ", got r1=" + std::to_string(r1) +
                                               " r2=" + std::to_string(r2));
  }
}

// Noise amplitude (relative to the leading singular value) below which the
// truncated modes are considered absent.
constexpr double kDegenerateRelAmplitude = 1e-12;

}  // namespace

NoiseModel NoiseModel::white(Index n, double variance) {
  if (n < 1 || !(variance > 0.0)) {
    throw Error(ErrorCode::DegenerateNoise, "white noise needs n >= 1 and positive variance");
  }
  NoiseModel nm;
  nm.UQ = Matrix::Zero(n, 0);
  nm.SQ = Vector::Zero(0);
  nm.deltaS = Vector::Constant(n, variance);
  nm.Rd = Vector::Constant(n, variance);
  return nm;
}

Matrix NoiseModel::dense_covariance() const {
  Matrix r = UQ * SQ.array().square().matrix().asDiagonal() * UQ.transpose();
  r.diagonal() += deltaS;
  return r;
}

ReducedOrderModel fit_rom(const SnapshotMatrix& data, Index r1, Index r2) {
  const Matrix& x = data.values();
  const Index k = std::min(x.rows(), x.cols());
  check_ranks(r1, r2, k);

  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw Error(ErrorCode::NumericalFailure, "SVD of the snapshot matrix did not converge");
  }
  return make_rom(svd.matrixU(), svd.singularValues(), svd.matrixV(), r1, r2);
}

ReducedOrderModel make_rom(Matrix U, Vector S, Matrix V, Index r1, Index r2) {
  const Index k = S.size();
  if (U.cols() != k || V.cols() != k) {
    throw Error(ErrorCode::DimensionMismatch, "U, S and V ranks disagree");
  }
  check_ranks(r1, r2, k);
  for (Index i = 0; i < k; ++i) {
    if (!(S[i] >= 0.0) || (i > 0 && S[i] > S[i - 1])) {
      throw Error(ErrorCode::NumericalFailure, "singular values must be nonnegative and descending");
    }
  }
  ReducedOrderModel rom;
  rom.U = std::move(U);
  rom.S = std::move(S);
  rom.V = std::move(V);
  rom.r1 = r1;
  rom.r2 = r2;
  return rom;
}

NoiseModel build_noise_model(const ReducedOrderModel& rom) {
  const Index k = rom.rank();
  check_ranks(rom.r1, rom.r2, k);
  const Index q = rom.r2 - rom.r1;

  NoiseModel nm;
  nm.UQ = rom.U.middleCols(rom.r1, q);
  nm.SQ = rom.S.segment(rom.r1, q);

  // Diagonal of the dropped modes r2..k, as row sums of squares. This is the
  // difference between the full truncated-mode covariance diagonal and the
  // low-rank one, without forming either.
  const Index tail = k - rom.r2;
  if (tail > 0) {
    nm.deltaS = (rom.U.rightCols(tail) * rom.S.tail(tail).asDiagonal()).rowwise().squaredNorm();
  } else {
    nm.deltaS = Vector::Zero(rom.n());
  }

  const Matrix w = nm.UQ * nm.SQ.asDiagonal();
  nm.Rd = nm.deltaS + w.rowwise().squaredNorm();

  const double rd_max = nm.Rd.maxCoeff();
  const double scale = rom.S.size() > 0 ? rom.S[0] : 0.0;
  const double degenerate = kDegenerateRelAmplitude * scale;
  if (!(rd_max > degenerate * degenerate)) {
    throw Error(ErrorCode::DegenerateNoise, "truncated modes carry no energy; noise model is zero");
  }
  const double floor = kRdFloor * rd_max;
  nm.Rd = nm.Rd.cwiseMax(floor);
  return nm;
}

Matrix covariance_submatrix(const NoiseModel& noise, const SensorSet& sensors) {
  if (sensors.candidate_count() != noise.n()) {
    throw Error(ErrorCode::DimensionMismatch, "sensor set and noise model disagree on n");
  }
  const Index p = sensors.size();
  const Index q = noise.rank();
  Matrix w(p, q);
  for (Index j = 0; j < p; ++j) {
    w.row(j) = noise.UQ.row(sensors[j]).cwiseProduct(noise.SQ.transpose());
  }
  Matrix lower = Matrix::Zero(p, p);
  if (q > 0) lower.selfadjointView<Eigen::Lower>().rankUpdate(w);
  Matrix rp = lower.selfadjointView<Eigen::Lower>();
  for (Index j = 0; j < p; ++j) rp(j, j) = noise.Rd[sensors[j]];
  return rp;
}

}  // namespace ssel
