#include "doctest.h"
#include "helpers.hpp"

#include "ssel/errors.hpp"
#include "ssel/estimation.hpp"

#include <algorithm>

using namespace ssel;

namespace {

// Model whose U is the identity and whose noise is diagonal with entries rd.
struct DiagonalSetup {
  ReducedOrderModel rom;
  NoiseModel noise;
};

DiagonalSetup identity_setup(Index n, Index r1, const Vector& rd) {
  DiagonalSetup d;
  d.rom.U = Matrix::Identity(n, n);
  d.rom.S = Vector::LinSpaced(n, static_cast<double>(n), 1.0);
  d.rom.V = Matrix::Identity(n, n);
  d.rom.r1 = r1;
  d.rom.r2 = r1 + 1;
  d.noise.UQ = Matrix::Zero(n, 0);
  d.noise.SQ = Vector::Zero(0);
  d.noise.deltaS = rd;
  d.noise.Rd = rd;
  return d;
}

struct RandomSetup {
  testing::Instance inst;
  ReducedOrderModel rom;
  NoiseModel noise;
  Matrix R;
};

RandomSetup random_setup(Index n, Index m, Index r1, Index r2, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RandomSetup s{testing::random_instance(n, m, r1, r2, rng), {}, {}, {}};
  s.rom = make_rom(s.inst.U, s.inst.S, s.inst.V, r1, r2);
  s.noise = build_noise_model(s.rom);
  s.R = testing::explicit_noise_covariance(s.inst.U, s.inst.S, r1, r2);
  return s;
}

}  // namespace

TEST_CASE("measurement_matrix") {
  const auto d = identity_setup(4, 2, Vector::Ones(4));
  CHECK(measurement_matrix(d.rom, SensorSet({0, 1}, 4)) == Matrix::Identity(2, 2));
  Matrix swapped(2, 2);
  swapped << 0, 0, 1, 0;
  CHECK(measurement_matrix(d.rom, SensorSet({2, 0}, 4)) == swapped);

  const auto s = random_setup(20, 8, 3, 5, 4);
  const std::vector<Index> rows{4, 7, 19};
  const Matrix h = testing::dense_selection(rows, 20);
  CHECK((measurement_matrix(s.rom, SensorSet(rows, 20)) - h * s.inst.U.leftCols(3)).norm() < 1e-15);
}

TEST_CASE("aopt_objective: closed forms") {
  SUBCASE("identity FIM") {
    const auto d = identity_setup(5, 3, Vector::Ones(5));
    CHECK(aopt_objective(d.rom, d.noise, SensorSet({0, 1, 2}, 5)) == doctest::Approx(3.0).epsilon(1e-14));
  }
  SUBCASE("diag(4, 9)") {
    Vector rd(3);
    rd << 4.0, 9.0, 1.0;
    const auto d = identity_setup(3, 2, rd);
    CHECK(aopt_objective(d.rom, d.noise, SensorSet({0, 1}, 3)) == doctest::Approx(13.0).epsilon(1e-14));
  }
}

TEST_CASE("aopt_objective against the dense oracle (n=10, r1=3, p=4)") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto s = random_setup(10, 8, 3, 6, seed);
    const std::vector<Index> rows{0, 2, 5, 9};
    const double ref = testing::dense_aopt(s.inst.U.leftCols(3), s.R, rows);
    CHECK(aopt_objective(s.rom, s.noise, SensorSet(rows, 10)) == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("wls_estimator") {
  SUBCASE("white noise with square C gives C^-1") {
    const auto s = random_setup(12, 8, 3, 5, 21);
    NoiseModel white = NoiseModel::white(12, 2.5);
    const SensorSet set({1, 6, 10}, 12);
    const Estimator est = wls_estimator(s.rom, white, set);
    const Matrix c = measurement_matrix(s.rom, set);
    CHECK((est.gain - c.inverse()).norm() < 1e-10);
  }
  SUBCASE("gain matches explicit whitened normal equations (n=8, r1=2, p=3)") {
    const auto s = random_setup(8, 6, 2, 4, 3);
    const std::vector<Index> rows{1, 4, 6};
    const Matrix h = testing::dense_selection(rows, 8);
    const Matrix c = h * s.inst.U.leftCols(2);
    const Matrix rp_inv = (h * s.R * h.transpose()).inverse();
    const Matrix ref = (c.transpose() * rp_inv * c).inverse() * c.transpose() * rp_inv;
    const Estimator est = wls_estimator(s.rom, s.noise, SensorSet(rows, 8));
    CHECK(testing::rel_diff(est.gain, ref) < 1e-10);
    const Vector y = Vector::LinSpaced(3, -1.0, 2.0);
    CHECK(testing::rel_diff(est.gain * y, ref * y) < 1e-10);
  }
  SUBCASE("p = r1 is exactly determined regardless of Rp") {
    const auto s = random_setup(9, 7, 3, 5, 8);
    const SensorSet set({0, 3, 8}, 9);
    const Matrix c = measurement_matrix(s.rom, set);
    const Vector y = Vector::LinSpaced(3, 0.5, 1.5);
    CHECK((wls_estimator(s.rom, s.noise, set).gain * y - c.lu().solve(y)).norm() < 1e-9);
  }
  SUBCASE("errors") {
    const auto s = random_setup(9, 7, 3, 5, 8);
    CHECK_THROWS_AS(wls_estimator(s.rom, s.noise, SensorSet({0, 1}, 9)), Error);
    try {
      wls_estimator(s.rom, s.noise, SensorSet({0, 1}, 9));
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnderSampled);
    }
    // Two identical candidate rows make C rank-deficient.
    auto d = identity_setup(4, 2, Vector::Ones(4));
    d.rom.U.row(1) = d.rom.U.row(0);
    try {
      wls_estimator(d.rom, d.noise, SensorSet({0, 1}, 4));
      FAIL("expected SingularFIM");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SingularFIM);
    }
  }
}

TEST_CASE("reconstruct and reconstruction_error") {
  SUBCASE("noiseless rank-r1 data is recovered") {
    const auto s = random_setup(15, 10, 3, 6, 5);
    const Matrix z_true = Matrix::Random(3, 4);
    const SnapshotMatrix snaps(s.inst.U.leftCols(3) * z_true);
    const Estimator est = wls_estimator(s.rom, s.noise, SensorSet({0, 2, 5, 7, 11}, 15));
    const Reconstruction rec = reconstruct(est, s.rom, snaps);
    CHECK((rec.coefficients - z_true).norm() < 1e-8);
    CHECK(reconstruction_error(snaps, rec.field) < 1e-8);
  }
  SUBCASE("r1 = 1 is the weighted mean of the ratios") {
    // U column (1, 2, 2)/3, independent noise variances 1, 4, 9 on the three rows.
    Vector rd(3);
    rd << 1.0, 4.0, 9.0;
    auto d = identity_setup(3, 1, rd);
    d.rom.U.col(0) << 1.0 / 3, 2.0 / 3, 2.0 / 3;
    d.rom.U.col(1) << 2.0 / 3, 1.0 / 3, -2.0 / 3;
    d.rom.U.col(2) << 2.0 / 3, -2.0 / 3, 1.0 / 3;
    Matrix y(3, 2);
    y << 1.0, 0.0, 2.0, 1.0, 3.0, -1.0;
    const Estimator est = wls_estimator(d.rom, d.noise, SensorSet({0, 1, 2}, 3));
    const Reconstruction rec = reconstruct(est, d.rom, SnapshotMatrix(y));
    // z = sum(c_i y_i / r_i) / sum(c_i^2 / r_i), by hand.
    const double c0 = 1.0 / 3, c1 = 2.0 / 3, c2 = 2.0 / 3;
    const double den = c0 * c0 / 1 + c1 * c1 / 4 + c2 * c2 / 9;
    CHECK(rec.coefficients(0, 0) == doctest::Approx((c0 * 1 / 1 + c1 * 2 / 4 + c2 * 3 / 9) / den).epsilon(1e-12));
    CHECK(rec.coefficients(0, 1) == doctest::Approx((c0 * 0 / 1 + c1 * 1 / 4 - c2 * 1 / 9) / den).epsilon(1e-12));
  }
  SUBCASE("square system interpolates the mode projection at the sensors") {
    const auto s = random_setup(12, 9, 3, 6, 31);
    std::mt19937_64 rng(1);
    const SnapshotMatrix snaps(testing::random_gaussian(12, 4, rng));
    const std::vector<Index> rows{2, 5, 9};
    const Reconstruction rec = reconstruct(wls_estimator(s.rom, s.noise, SensorSet(rows, 12)), s.rom, snaps);
    for (Index r : rows) CHECK((rec.field.row(r) - snaps.values().row(r)).norm() < 1e-9);
  }
  SUBCASE("error values") {
    Matrix x(2, 2);
    x << 3, 3, 4, 4;
    const SnapshotMatrix orig(x);
    CHECK(reconstruction_error(orig, x) == 0.0);
    CHECK(reconstruction_error(orig, Matrix::Zero(2, 2)) == doctest::Approx(1.0));
    Matrix f(2, 2);
    f << 3, 3, 0, 0;
    CHECK(reconstruction_error(orig, f) == doctest::Approx(0.8).epsilon(1e-14));
    try {
      reconstruction_error(SnapshotMatrix(Matrix::Zero(2, 2)), Matrix::Zero(2, 2));
      FAIL("expected ZeroData");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ZeroData);
    }
  }
}

TEST_CASE("property: permutation invariance, monotonicity, unbiasedness") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto s = random_setup(14, 10, 3, 7, 100 + seed);
    const std::vector<Index> rows{1, 3, 6, 10};
    const double base = aopt_objective(s.rom, s.noise, SensorSet(rows, 14));
    CHECK(aopt_objective(s.rom, s.noise, SensorSet({10, 1, 6, 3}, 14)) == doctest::Approx(base).epsilon(1e-12));
    for (Index i = 0; i < 14; ++i) {
      if (std::find(rows.begin(), rows.end(), i) != rows.end()) continue;
      auto more = rows;
      more.push_back(i);
      CHECK(aopt_objective(s.rom, s.noise, SensorSet(more, 14)) <= base + 1e-10);
    }
    const Estimator est = wls_estimator(s.rom, s.noise, SensorSet(rows, 14));
    CHECK((est.gain * measurement_matrix(s.rom, est.sensors) - Matrix::Identity(3, 3)).norm() < 1e-8);
    // R = sigma^2 I reduces to ordinary least squares.
    const Estimator ols = wls_estimator(s.rom, NoiseModel::white(14, 0.37), est.sensors);
    const Matrix c = measurement_matrix(s.rom, est.sensors);
    CHECK((ols.gain - (c.transpose() * c).inverse() * c.transpose()).norm() < 1e-10);
  }
}
