#include "doctest.h"
#include "oracles.hpp"
#include "valuegap/errors.hpp"
#include "valuegap/linalg.hpp"
#include "valuegap/random.hpp"

using namespace valuegap;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_SUITE("linalg") {
  TEST_CASE("min-norm solve matches normal equations on full-rank tall systems") {
    Rng rng(11);
    const MatrixXd a = rng.normal_matrix(40, 6);
    const VectorXd b = rng.normal_vector(40);
    const MinNormSolution sol = min_norm_solve(a, b);
    CHECK(sol.rank == 6);
    CHECK((sol.x.col(0) - oracle::normal_equations(a, b)).norm() < 1e-10);
  }

  TEST_CASE("min-norm solve picks the solution orthogonal to the null space") {
    // Columns 0 and 1 are identical, so only their sum is identified.
    MatrixXd a(3, 2);
    a << 1, 1, 2, 2, 3, 3;
    const VectorXd b = a * VectorXd::Constant(2, 1.0);
    const MinNormSolution sol = min_norm_solve(a, b);
    CHECK(sol.rank == 1);
    CHECK(sol.x(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sol.x(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("zero matrix has rank zero and a zero solution") {
    const MinNormSolution sol = min_norm_solve(MatrixXd::Zero(3, 3), VectorXd::Ones(3));
    CHECK(sol.rank == 0);
    CHECK(sol.x.norm() == 0.0);
  }

  TEST_CASE("kron agrees with explicit index loops") {
    Rng rng(12);
    const MatrixXd a = rng.normal_matrix(2, 3);
    const MatrixXd b = rng.normal_matrix(3, 2);
    CHECK((kron(a, b) - oracle::kron_loops(a, b)).norm() == 0.0);
  }

  TEST_CASE("vec stacks columns and unvec inverts it") {
    MatrixXd m(2, 2);
    m << 1, 3, 2, 4;
    const VectorXd v = vec(m);
    CHECK(v(0) == 1.0);
    CHECK(v(1) == 2.0);
    CHECK(v(2) == 3.0);
    CHECK(v(3) == 4.0);
    CHECK(unvec(v, 2) == m);
  }

  TEST_CASE("vec(A X B) = (Bᵀ ⊗ A) vec(X)") {
    Rng rng(13);
    const MatrixXd a = rng.normal_matrix(3, 3);
    const MatrixXd x = rng.normal_matrix(3, 3);
    const MatrixXd b = rng.normal_matrix(3, 3);
    CHECK((vec(a * x * b) - kron(b.transpose(), a) * vec(x)).norm() < 1e-12);
  }

  TEST_CASE("spectral radius of a rotation-scaling matrix") {
    MatrixXd a(2, 2);
    a << 0.0, -0.5, 0.5, 0.0;
    CHECK(spectral_radius(a) == doctest::Approx(0.5).epsilon(1e-14));
  }

  TEST_CASE("Lyapunov doubling matches the truncated series") {
    Rng rng(14);
    MatrixXd f = rng.normal_matrix(5, 5);
    f *= 0.85 / spectral_radius(f);
    const MatrixXd q = MatrixXd::Identity(5, 5) + 0.1 * MatrixXd::Ones(5, 5);
    const MatrixXd x = solve_discrete_lyapunov(f, q);
    CHECK((x - oracle::lyapunov_series(f, q, 2000)).norm() < 1e-8 * x.norm());
    CHECK((f * x * f.transpose() - x + q).norm() <= 1e-10 * q.norm());
  }

  TEST_CASE("Lyapunov solve rejects unstable maps") {
    MatrixXd f = MatrixXd::Identity(2, 2) * 1.01;
    CHECK_THROWS_AS(solve_discrete_lyapunov(f, MatrixXd::Identity(2, 2)), ConvergenceError);
  }

  TEST_CASE("derived seeds differ across streams and are reproducible") {
    CHECK(derive_seed(1, 0) == derive_seed(1, 0));
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  }
}
