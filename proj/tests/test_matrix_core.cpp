#include <doctest.h>

#include <cmath>

#include "hdclust/errors.hpp"
#include "hdclust/matrix_core.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace hdclust;
using testing::random_matrix;
using testing::random_spd;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("cholesky of the identity is the identity") {
  const CholFactor f = cholesky(SymMatrix::identity(3));
  CHECK((f.lower() - Matrix::Identity(3, 3)).norm() == doctest::Approx(0.0));
}

TEST_CASE("cholesky of a 2x2 matrix") {
  Matrix m(2, 2);
  m << 4, 2, 2, 3;
  const Matrix l = cholesky(SymMatrix(m)).lower();
  CHECK(l(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(l(1, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(l(1, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(l(0, 1) == 0.0);
}

TEST_CASE("cholesky reconstructs a random SPD matrix") {
  Rng rng(11);
  const Matrix a = random_spd(rng, 50);
  const CholFactor f = cholesky(SymMatrix(a));
  CHECK((f.reconstruct() - a).norm() / a.norm() < 1e-10);
}

TEST_CASE("cholesky rejects indefinite and asymmetric input") {
  Matrix m(2, 2);
  m << 1, 2, 2, 1;
  CHECK(kind_of([&] { cholesky(SymMatrix(m)); }) == ErrorKind::NotPositiveDefinite);
  Matrix asym(2, 2);
  asym << 1, 0.5, 0.4, 1;
  CHECK_THROWS_AS(SymMatrix{asym}, Error);
}

TEST_CASE("log_det") {
  CHECK(log_det(SymMatrix::identity(5)) == doctest::Approx(0.0));
  CHECK(log_det(SymMatrix::scaled_identity(3, 2.0)) == doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-14));
  Rng rng(12);
  const Matrix a = random_spd(rng, 30);
  CHECK(std::abs(log_det(SymMatrix(a)) - oracle::log_det_eigen(a)) < 1e-8);
}

TEST_CASE("log_det of a matrix and its inverse cancel") {
  Rng rng(13);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix a = random_spd(rng, 12);
    const Matrix inv = SymMatrix::symmetrized(a.inverse()).matrix();
    const double ld = log_det(SymMatrix(a));
    CHECK(std::abs(ld + log_det(SymMatrix(inv))) < 1e-8 * std::max(1.0, std::abs(ld)));
  }
}

TEST_CASE("rank-one update") {
  Vector v(2);
  v << 1, 0;
  const CholFactor f = rank1_update(cholesky(SymMatrix::identity(2)), v, +1);
  CHECK(f.lower()(0, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(f.lower()(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f.lower()(1, 0) == doctest::Approx(0.0));
}

TEST_CASE("update then downdate restores the factor") {
  Rng rng(14);
  const Matrix a = random_spd(rng, 20);
  const CholFactor f0 = cholesky(SymMatrix(a));
  const Vector v = random_matrix(rng, 20, 1);
  CholFactor f = rank1_update(f0, v, +1);
  f = rank1_update(f, v, -1);
  CHECK((f.lower() - f0.lower()).norm() / f0.lower().norm() < 1e-10);
}

TEST_CASE("sequential updates match a fresh factorization") {
  Rng rng(15);
  Matrix a = random_spd(rng, 15);
  CholFactor f = cholesky(SymMatrix(a));
  for (int i = 0; i < 20; ++i) {
    const Vector v = random_matrix(rng, 15, 1);
    f.update(v, +1);
    a += v * v.transpose();
  }
  const CholFactor fresh = cholesky(SymMatrix::symmetrized(a));
  CHECK((f.lower() - fresh.lower()).norm() / fresh.lower().norm() < 1e-9);
}

TEST_CASE("downdate that destroys definiteness is rejected atomically") {
  const CholFactor f0 = cholesky(SymMatrix::identity(2));
  CholFactor f = f0;
  Vector v(2);
  v << 1, 0;
  CHECK(kind_of([&] { f.update(v, -1); }) == ErrorKind::DowndateBreaksPD);
  CHECK(f.lower() == f0.lower());
}

TEST_CASE("extend grows a factor row by row") {
  Rng rng(16);
  const Matrix a = random_spd(rng, 8);
  CholFactor f;
  for (Index k = 0; k < 8; ++k) f.extend(a.col(k).head(k), a(k, k));
  CHECK((f.reconstruct() - a).norm() / a.norm() < 1e-12);
  CHECK(std::abs(f.log_det() - oracle::log_det_eigen(a)) < 1e-9);
}

TEST_CASE("solve") {
  Rng rng(17);
  const Matrix a = random_spd(rng, 10);
  const Vector b = random_matrix(rng, 10, 1);
  const Vector x = cholesky(SymMatrix(a)).solve(b);
  CHECK((a * x - b).norm() < 1e-10 * b.norm() * a.norm());
}

TEST_CASE("spectral norm") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3;
  d(1, 1) = 1;
  CHECK(spectral_norm(d).value == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(spectral_norm(Matrix::Zero(3, 3)).value == 0.0);

  Rng rng(18);
  for (int rep = 0; rep < 5; ++rep) {
    const Matrix m = random_matrix(rng, 10, 10);
    const double want = Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
    const SpectralNorm s = spectral_norm(m);
    CHECK(std::abs(s.value - want) < 1e-6 * want);
    // Any probe vector gives a lower bound.
    for (int k = 0; k < 5; ++k) {
      const Vector u = random_matrix(rng, 10, 1);
      CHECK(s.value >= (m * u).norm() / u.norm() * (1 - 1e-9));
    }
  }
}
