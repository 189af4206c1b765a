#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "sectorsum/linops.hpp"

using namespace sectorsum;
using oracle::diag;

TEST_CASE("shifted solves match closed forms") {
  Matrix one = Matrix::Constant(1, 1, 1.0);
  CHECK(std::abs(solve_shifted(one, 1.0, Vector::Ones(1))(0) - 0.5) < 1e-15);

  Vector x = solve_shifted(diag({1, 2}), 0.0, Vector::Ones(2));
  CHECK(std::abs(x(0) - 1.0) < 1e-15);
  CHECK(std::abs(x(1) - 0.5) < 1e-15);

  Matrix jordan(2, 2);
  jordan << 2, 1, 0, 2;
  Vector e1 = Vector::Unit(2, 0);
  Vector y = solve_shifted(jordan, 0.0, e1);
  CHECK(std::abs(y(0) - 0.5) < 1e-15);
  CHECK(std::abs(y(1)) < 1e-15);
}

TEST_CASE("singular shifts and dimension errors") {
  Matrix one = Matrix::Constant(1, 1, 1.0);
  try {
    solve_shifted(one, -1.0, Vector::Ones(1));
    FAIL("expected SingularShift");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::singular_shift);
    REQUIRE(e.where());
    CHECK(*e.where() == Complex(-1.0));
  }
  CHECK_THROWS_AS(solve_shifted(diag({1, 2}), 0.0, Vector::Ones(3)), Error);
  CHECK_THROWS_AS(solve_shifted(Matrix::Zero(2, 3), 0.0, Vector::Ones(2)), Error);
}

TEST_CASE("solve residual on random well-conditioned systems") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 1 + trial % 32;
    Matrix m = oracle::random_matrix(n, rng) + 3.0 * std::sqrt(double(n)) * Matrix::Identity(n, n);
    const Complex z(0.5, -0.25);
    Vector rhs = oracle::random_matrix(n, rng).col(0);
    Vector x = solve_shifted(m, z, rhs);
    Matrix shifted = m;
    shifted.diagonal().array() += z;
    CHECK((shifted * x - rhs).norm() <= 1e-10 * rhs.norm());
  }
}

TEST_CASE("operator norm") {
  CHECK(operator_norm(diag({1, 2})) == doctest::Approx(2.0).epsilon(1e-14));
  Matrix nil(2, 2);
  nil << 0, 1, 0, 0;
  CHECK(operator_norm(nil) == doctest::Approx(1.0).epsilon(1e-14));
  Matrix jordan(2, 2);
  jordan << 2, 1, 0, 2;
  // singular values of [[2,1],[0,2]]: roots of s^4 - 9 s^2 + 16
  const double top = std::sqrt((9.0 + std::sqrt(17.0)) / 2.0);
  CHECK(operator_norm(jordan) == doctest::Approx(top).epsilon(1e-14));
  CHECK(top == doctest::Approx(2.5616).epsilon(1e-4));
}

TEST_CASE("power-iteration norm agrees with the SVD branch") {
  std::mt19937_64 rng(11);
  Matrix m = oracle::random_matrix(40, rng);
  CHECK(operator_norm(m, 8) == doctest::Approx(operator_norm(m)).epsilon(1e-10));
}

TEST_CASE("norm consistency on sampled vectors") {
  std::mt19937_64 rng(3);
  Matrix m = oracle::random_matrix(6, rng);
  const double norm = operator_norm(m);
  for (int i = 0; i < 10; ++i) {
    Vector x = oracle::random_matrix(6, rng).col(0);
    CHECK((m * x).norm() <= norm * x.norm() * (1 + 1e-14));
  }
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  Vector top = svd.matrixV().col(0);
  CHECK((m * top).norm() == doctest::Approx(norm).epsilon(1e-12));
}

TEST_CASE("matrix exponential") {
  CHECK(matrix_exp(Matrix::Zero(3, 3)) == Matrix::Identity(3, 3));
  CHECK(std::abs(matrix_exp(diag({1}))(0, 0) - std::exp(1.0)) < 1e-14);
  Matrix nil(2, 2);
  nil << 0, 1, 0, 0;
  Matrix expected(2, 2);
  expected << 1, 1, 0, 1;
  CHECK(oracle::max_abs_diff(matrix_exp(nil), expected) < 1e-15);
  CHECK_THROWS_AS(matrix_exp(diag({1e7})), Error);
}

TEST_CASE("exponential semigroup law") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix m = oracle::random_matrix(5, rng);
    m *= 5.0 / operator_norm(m);
    const double s = u(rng), t = u(rng);
    Matrix lhs = matrix_exp(s * m) * matrix_exp(t * m);
    CHECK(operator_norm(lhs - matrix_exp((s + t) * m)) <= 1e-8);
  }
}

TEST_CASE("matrix files round-trip bit-exactly") {
  std::mt19937_64 rng(9);
  Matrix m = oracle::random_matrix(4, rng);
  m(0, 0) = Complex(1.5, -0.25);
  m(1, 1) = Complex(1e-300, -3e300);
  std::stringstream ss;
  write_matrix_csv(ss, m);
  Matrix back = read_matrix_csv(ss);
  CHECK(back == m);
  CHECK(format_complex(Complex(1.5, -0.25)) == "1.5-0.25i");
}

TEST_CASE("complex entry parsing") {
  CHECK(parse_complex("1.5-0.25i") == Complex(1.5, -0.25));
  CHECK(parse_complex(" 2 ") == Complex(2.0, 0.0));
  CHECK(parse_complex("3i") == Complex(0.0, 3.0));
  CHECK(parse_complex("-i") == Complex(0.0, -1.0));
  CHECK(parse_complex("1e-3+2E+2i") == Complex(1e-3, 200.0));
  CHECK_THROWS_AS(parse_complex("abc"), Error);
  CHECK_THROWS_AS(parse_complex("nan"), Error);
  std::stringstream bad("2\n1,2\n3\n");
  CHECK_THROWS_AS(read_matrix_csv(bad), Error);
}
