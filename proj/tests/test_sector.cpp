#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sectorsum/sector.hpp"

using namespace sectorsum;
using oracle::diag;

namespace {
Matrix scalar(Complex a) { return Matrix::Constant(1, 1, a); }
}  // namespace

TEST_CASE("resolvent_apply") {
  CHECK(std::abs(resolvent_apply(scalar(1.0), 1.0, Vector::Ones(1))(0) - 0.5) < 1e-15);
  Vector v = resolvent_apply(diag({1, 4}), Complex(0, 1), Vector::Unit(2, 0));
  CHECK(std::abs(v(0) - Complex(0.5, -0.5)) < 1e-15);
  CHECK(std::abs(v(1)) < 1e-15);
  CHECK_THROWS_AS(resolvent_apply(scalar(1.0), -1.0, Vector::Ones(1)), Error);
}

TEST_CASE("certify_sector on scalar and identity") {
  auto c = certify_sector(scalar(1.0), kPi / 2);
  CHECK(c.k_hat == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(std::abs(c.argmax - Complex(0.0, 1.0)) < 1e-12);
  CHECK(c.edge_max == doctest::Approx(1.0).epsilon(1e-5));

  auto id = certify_sector(Matrix::Identity(3, 3), 0.0);
  CHECK(id.k_hat == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("certify_sector reports the offending shift") {
  try {
    certify_sector(scalar(-1.0), 0.0);
    FAIL("expected NotSectorialAtAngle");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::not_sectorial_at_angle);
    REQUIRE(e.where());
    CHECK(std::abs(*e.where() - Complex(1.0)) < 1e-12);
  }
}

TEST_CASE("certification is monotone in the angle") {
  Matrix a = diag({Complex(1, 0.5), 3.0, Complex(2, -1)});
  double prev = 0.0;
  for (double theta : {0.0, 0.3, 0.8, 1.2, 1.6, 2.0}) {
    const double k = certify_sector(a, theta).k_hat;
    CHECK(k >= prev);
    prev = k;
  }
}

TEST_CASE("normal operators agree with dense scalar sampling") {
  const std::vector<Complex> eig{1.0, 4.0, std::polar(2.0, 0.7)};
  Matrix a = diag({eig[0], eig[1], eig[2]});
  const double theta = 1.9;
  double oracle_max = 0.0;
  for (Complex e : eig)
    for (int j = 0; j <= 40000; ++j) {
      const double r = std::pow(10.0, -6.0 + 12.0 * j / 40000);
      for (int s : {-1, 1}) {
        const Complex z = std::polar(r, s * theta);
        oracle_max = std::max(oracle_max, (1 + r) / std::abs(e + z));
      }
    }
  const double k = certify_sector(a, theta).k_hat;
  CHECK(std::abs(k - oracle_max) <= 0.01 * oracle_max);
}

TEST_CASE("resolvent identity") {
  Matrix a(3, 3);
  a << 2, 1, 0, 0, 3, 1, 0, 0, 1;
  for (auto [z, w] : {std::pair{Complex(0.5, 0.2), Complex(2.0, -1.0)}, std::pair{Complex(0, 5), Complex(7, 0)}}) {
    Matrix rz = shifted_inverse(a, z), rw = shifted_inverse(a, w);
    CHECK(operator_norm(rz - rw - (w - z) * rz * rw) <= 1e-9);
  }
}

TEST_CASE("scaling covariance") {
  Matrix a(2, 2);
  a << 1, 2, 0, 3;
  const double c = 7.5;
  for (Complex z : {Complex(0.3, 0.4), Complex(2.0, -5.0)}) {
    Matrix lhs = shifted_inverse(c * a, c * z);
    CHECK(operator_norm(lhs - shifted_inverse(a, z) / c) <= 1e-14 * operator_norm(lhs) * 10);
    // |z| ||(A+z)^{-1}|| is invariant under (A, z) -> (cA, cz)
    CHECK(std::abs(c * z) * operator_norm(lhs) == doctest::Approx(std::abs(z) * operator_norm(shifted_inverse(a, z))));
  }
}

TEST_CASE("extended sector check") {
  auto ok = extended_sector_check(scalar(1.0), {kPi / 2, 1.4143});
  CHECK(ok.pass);
  CHECK(ok.outputs["worst"].get<double>() <= 2 * 1.4143 + 1);

  auto id = extended_sector_check(Matrix::Identity(2, 2), {0.0, 1.0});
  CHECK(id.pass);

  try {
    extended_sector_check(scalar(1.0), {kPi / 2, 1.0});
    FAIL("expected ExtensionViolated");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::extension_violated);
    CHECK(e.where().has_value());
  }
}

TEST_CASE("decay probe") {
  auto flat = decay_probe(scalar(1.0), 0.5, 0.0, 0.0, Vector::Ones(1));
  CHECK(flat.sup <= 1.0 + 1e-8);
  auto weighted = decay_probe(scalar(1.0), 0.5, 0.25, 0.0, Vector::Ones(1));
  // sup over z >= 0 of z^{1/4}/(1+z) is attained at z = 1/3
  const double expected = std::pow(1.0 / 3.0, 0.25) / (4.0 / 3.0);
  CHECK(weighted.sup == doctest::Approx(expected).epsilon(1e-3));
  CHECK_THROWS_AS(decay_probe(diag({1, 10}), 0.9, 0.9, 0.0, Vector::Ones(2)), Error);
}
