#include "doctest.h"
#include "helpers.hpp"

#include "ssel/errors.hpp"
#include "ssel/rom_noise.hpp"

#include <algorithm>
#include <numeric>

using namespace ssel;
using testing::explicit_lowrank_covariance;
using testing::explicit_noise_covariance;
using testing::explicit_truncated_covariance;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an ssel::Error");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("fit_rom: identity data has unit spectrum") {
  const ReducedOrderModel rom = fit_rom(SnapshotMatrix(Matrix::Identity(3, 3)), 1, 2);
  CHECK((rom.S - Vector::Ones(3)).norm() < 1e-14);
  CHECK((rom.U * rom.S.asDiagonal() * rom.V.transpose() - Matrix::Identity(3, 3)).norm() < 1e-12);
}

TEST_CASE("fit_rom: rank-2 sum of known modes") {
  std::mt19937_64 rng(11);
  const Matrix u = testing::random_orthonormal(9, 2, rng);
  const Matrix v = testing::random_orthonormal(6, 2, rng);
  const Matrix data = u.col(0) * v.col(0).transpose() + 0.5 * u.col(1) * v.col(1).transpose();
  const ReducedOrderModel rom = fit_rom(SnapshotMatrix(data), 1, 2);
  // Reference spectrum from an independent two-sided Jacobi SVD.
  const Eigen::JacobiSVD<Matrix> ref(data);
  CHECK(rom.S.size() == 6);
  CHECK(rom.S[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rom.S[1] == doctest::Approx(0.5).epsilon(1e-12));
  for (Index k = 0; k < rom.S.size(); ++k) CHECK(std::abs(rom.S[k] - ref.singularValues()[k]) < 1e-12);
  for (Index k = 2; k < rom.S.size(); ++k) CHECK(rom.S[k] < 1e-12);
}

TEST_CASE("fit_rom: factors are orthonormal and reconstruct the data") {
  std::mt19937_64 rng(3);
  const Matrix data = testing::random_gaussian(40, 12, rng);
  const ReducedOrderModel rom = fit_rom(SnapshotMatrix(data), 3, 7);
  CHECK((rom.U.transpose() * rom.U - Matrix::Identity(12, 12)).norm() < 1e-10);
  CHECK((rom.V.transpose() * rom.V - Matrix::Identity(12, 12)).norm() < 1e-10);
  CHECK((rom.U * rom.S.asDiagonal() * rom.V.transpose() - data).norm() < 1e-8 * data.norm());
  for (Index k = 1; k < rom.S.size(); ++k) CHECK(rom.S[k] <= rom.S[k - 1]);
}

TEST_CASE("fit_rom: rank bounds") {
  const SnapshotMatrix data(Matrix::Identity(5, 4));
  CHECK(code_of([&] { fit_rom(data, 0, 2); }) == ErrorCode::RankOutOfRange);
  CHECK(code_of([&] { fit_rom(data, 2, 2); }) == ErrorCode::RankOutOfRange);
  CHECK(code_of([&] { fit_rom(data, 1, 5); }) == ErrorCode::RankOutOfRange);
  CHECK_NOTHROW(fit_rom(data, 1, 4));
}

TEST_CASE("noise model: r2 = m gives zero correction") {
  std::mt19937_64 rng(5);
  const auto inst = testing::random_instance(10, 5, 2, 5, rng);
  const NoiseModel noise = build_noise_model(make_rom(inst.U, inst.S, inst.V, 2, 5));
  CHECK(noise.deltaS.cwiseAbs().maxCoeff() == 0.0);
  const Matrix full = explicit_truncated_covariance(inst.U, inst.S, 2);
  CHECK((noise.dense_covariance() - full).norm() < 1e-12);
}

TEST_CASE("noise model: diagonal matches explicit covariance (n=6, m=5, r1=1, r2=3)") {
  std::mt19937_64 rng(17);
  const auto inst = testing::random_instance(6, 5, 1, 3, rng);
  const NoiseModel noise = build_noise_model(make_rom(inst.U, inst.S, inst.V, 1, 3));
  const Matrix full = explicit_truncated_covariance(inst.U, inst.S, 1);
  CHECK((noise.dense_covariance().diagonal() - full.diagonal()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((noise.Rd - full.diagonal()).cwiseAbs().maxCoeff() < 1e-12);
  for (Index i = 0; i < 6; ++i) CHECK(noise.deltaS[i] >= 0.0);
}

TEST_CASE("noise model: noiseless data is degenerate") {
  std::mt19937_64 rng(2);
  const Matrix u = testing::random_orthonormal(8, 4, rng);
  const Matrix v = testing::random_orthonormal(4, 4, rng);
  Vector s = Vector::Zero(4);
  s[0] = 1.0;
  CHECK(code_of([&] { build_noise_model(make_rom(u, s, v, 1, 3)); }) == ErrorCode::DegenerateNoise);
}

TEST_CASE("covariance_submatrix against the explicit covariance") {
  std::mt19937_64 rng(17);
  const auto inst = testing::random_instance(6, 5, 1, 3, rng);
  const NoiseModel noise = build_noise_model(make_rom(inst.U, inst.S, inst.V, 1, 3));
  const Matrix r = explicit_noise_covariance(inst.U, inst.S, 1, 3);

  SUBCASE("singletons equal Rd exactly") {
    for (Index i = 0; i < 6; ++i) {
      const Matrix rp = covariance_submatrix(noise, SensorSet({i}, 6));
      CHECK(rp.rows() == 1);
      CHECK(rp(0, 0) == noise.Rd[i]);
    }
  }
  SUBCASE("subset {0,3,5}") {
    const std::vector<Index> rows{0, 3, 5};
    const Matrix h = testing::dense_selection(rows, 6);
    CHECK((covariance_submatrix(noise, SensorSet(rows, 6)) - h * r * h.transpose()).norm() < 1e-12);
  }
  SUBCASE("all sensors") {
    std::vector<Index> all(6);
    std::iota(all.begin(), all.end(), Index{0});
    const Matrix rp = covariance_submatrix(noise, SensorSet(all, 6));
    CHECK((rp - r).norm() < 1e-12);
    CHECK((rp - rp.transpose()).norm() < 1e-12);
  }
  SUBCASE("invalid sets") {
    CHECK(code_of([&] { covariance_submatrix(noise, SensorSet({0, 6}, 6)); }) == ErrorCode::IndexOutOfRange);
    CHECK(code_of([&] { covariance_submatrix(noise, SensorSet({2, 2}, 6)); }) == ErrorCode::DuplicateSensor);
  }
}

TEST_CASE("property: implied covariance is PSD and the correction only helps") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<Index> nd(8, 40);
    const Index n = nd(rng);
    const Index m = std::uniform_int_distribution<Index>(6, std::min<Index>(n, 14))(rng);
    const Index r1 = std::uniform_int_distribution<Index>(1, m - 3)(rng);
    const Index r2 = std::uniform_int_distribution<Index>(r1 + 1, m - 1)(rng);
    const auto inst = testing::random_instance(n, m, r1, r2, rng);
    const NoiseModel noise = build_noise_model(make_rom(inst.U, inst.S, inst.V, r1, r2));
    const Matrix implied = noise.dense_covariance();
    for (int v = 0; v < 100; ++v) {
      const Vector x = testing::random_gaussian(n, 1, rng);
      CHECK(x.dot(implied * x) >= -1e-10);
    }
    const Matrix full = explicit_truncated_covariance(inst.U, inst.S, r1);
    const Matrix low = explicit_lowrank_covariance(inst.U, inst.S, r1, r2);
    CHECK((implied.diagonal() - full.diagonal()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((full - implied).norm() <= (full - low).norm());
  }
}

TEST_CASE("property: submatrix is permutation-equivariant") {
  std::mt19937_64 rng(8);
  const auto inst = testing::random_instance(15, 9, 2, 6, rng);
  const NoiseModel noise = build_noise_model(make_rom(inst.U, inst.S, inst.V, 2, 6));
  std::vector<Index> rows{1, 4, 7, 9, 13};
  const Matrix base = covariance_submatrix(noise, SensorSet(rows, 15));
  std::vector<Index> perm{3, 0, 4, 2, 1};
  std::vector<Index> shuffled;
  for (Index j : perm) shuffled.push_back(rows[static_cast<std::size_t>(j)]);
  const Matrix permuted = covariance_submatrix(noise, SensorSet(shuffled, 15));
  for (Index a = 0; a < 5; ++a)
    for (Index b = 0; b < 5; ++b) CHECK(permuted(a, b) == doctest::Approx(base(perm[a], perm[b])).epsilon(1e-14));
}
