#include "ssel/synthetic.hpp"

#include "ssel/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace ssel {

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  // u1 in (0, 1] keeps the log finite.
  const double u1 = static_cast<double>((engine_() >> 11) + 1) * kScale;
  const double u2 = static_cast<double>(engine_() >> 11) * kScale;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

NormalStream make_stream(std::uint64_t seed, StreamRole role) {
  return NormalStream(splitmix64(seed ^ static_cast<std::uint64_t>(role)));
}

void SyntheticSpec::validate() const {
  if (m < 2 || n < m) {
    throw Error(ErrorCode::DimensionError, "synthetic data needs n >= m >= 2, got n=" +
                                               std::to_string(n) + " m=" + std::to_string(m));
  }
  if (!spectrum.empty()) {
    if (static_cast<Index>(spectrum.size()) != m) {
      throw Error(ErrorCode::DimensionError, "custom spectrum must have m entries");
    }
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
      if (!(spectrum[k] > 0.0) || (k > 0 && spectrum[k] > spectrum[k - 1])) {
        throw Error(ErrorCode::DimensionError, "custom spectrum must be positive and descending");
      }
    }
  }
}

Vector SyntheticSpec::singular_values() const {
  Vector s(m);
  for (Index k = 0; k < m; ++k) {
    s[k] = spectrum.empty() ? 1.0 / std::sqrt(static_cast<double>(k + 1))
                            : spectrum[static_cast<std::size_t>(k)];
  }
  return s;
}

Matrix gaussian_matrix(Index rows, Index cols, NormalStream& stream) {
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = stream.next();
  return g;
}

Matrix orthonormal_columns(const Matrix& gaussian) {
  const Index rows = gaussian.rows();
  const Index cols = gaussian.cols();
  Eigen::HouseholderQR<Matrix> qr(gaussian);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  const auto r = qr.matrixQR();
  for (Index j = 0; j < cols; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

SyntheticFactors generate_factors(const SyntheticSpec& spec) {
  spec.validate();
  auto u_stream = make_stream(spec.seed, StreamRole::SpatialModes);
  auto v_stream = make_stream(spec.seed, StreamRole::TemporalModes);
  SyntheticFactors f;
  f.U = orthonormal_columns(gaussian_matrix(spec.n, spec.m, u_stream));
  f.V = orthonormal_columns(gaussian_matrix(spec.m, spec.m, v_stream));
  f.S = spec.singular_values();
  return f;
}

SnapshotMatrix generate(const SyntheticSpec& spec) {
  const SyntheticFactors f = generate_factors(spec);
  return SnapshotMatrix(f.U * f.S.asDiagonal() * f.V.transpose());
}

}  // namespace ssel
