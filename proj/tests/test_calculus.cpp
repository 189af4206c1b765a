#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sectorsum/calculus.hpp"

using namespace sectorsum;
using oracle::diag;
using oracle::max_abs_diff;

namespace {
Matrix scalar(Complex a) { return Matrix::Constant(1, 1, a); }
}  // namespace

TEST_CASE("complex powers of diagonal matrices") {
  Matrix a = diag({1, 4});
  auto r = complex_power(a, -0.5, power_contour(a, -0.5));
  CHECK(max_abs_diff(r.value, diag({1, 0.5})) < 1e-8);
  CHECK(r.nodes <= 600);

  CHECK(max_abs_diff(complex_power(Matrix::Identity(3, 3), Complex(-0.3, 1.2)), Matrix::Identity(3, 3)) < 1e-8);
  CHECK(std::abs(complex_power(scalar(4.0), -1.0)(0, 0) - 0.25) < 1e-8);
  CHECK(complex_power(a, 0.0) == Matrix::Identity(2, 2));
  CHECK_THROWS_AS(complex_power(a, Complex(0.5, 0.0)), Error);
}

TEST_CASE("complex powers respect the certified angle") {
  MatrixOperator a(diag({1, 2}), SectorSpec{0.5, 1.0});
  ContourSpec spec = power_contour(a.matrix(), -0.5);
  CHECK_THROWS_AS(complex_power(a, -0.5, spec), Error);
  CHECK(max_abs_diff(complex_power(a, -0.5), diag({1, 1 / std::sqrt(2.0)})) < 1e-8);
}

TEST_CASE("power semigroup on a non-normal matrix") {
  Matrix a(3, 3);
  a << 2, 1, 0, 0, 2, 1, 0, 0, 3;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> re(-1.2, -0.1), im(-1.5, 1.5);
  for (int k = 0; k < 5; ++k) {
    const Complex z1(re(rng), im(rng)), z2(re(rng), im(rng));
    Matrix lhs = complex_power(a, z1) * complex_power(a, z2);
    CHECK(operator_norm(lhs - complex_power(a, z1 + z2)) <= 1e-6);
  }
}

TEST_CASE("imaginary powers") {
  CHECK(max_abs_diff(imaginary_power(Matrix::Identity(2, 2), 1.0), Matrix::Identity(2, 2)) < 1e-10);
  const Complex e_i = imaginary_power(scalar(std::exp(1.0)), 1.0)(0, 0);
  CHECK(std::abs(e_i - Complex(std::cos(1.0), std::sin(1.0))) < 1e-7);
  const Complex rot = imaginary_power(scalar(std::polar(1.0, kPi / 4)), -1.0)(0, 0);
  CHECK(std::abs(std::abs(rot) - std::exp(kPi / 4)) < 1e-5);
  CHECK(imaginary_power_prefactor(0.0) == 1.0);
  CHECK(imaginary_power_prefactor(1.0) == doctest::Approx(std::sinh(kPi) / kPi).epsilon(1e-15));
}

TEST_CASE("imaginary power agrees with continuation of the complex power") {
  Matrix a(2, 2);
  a << 1, 0.5, 0, 3;
  const Matrix root = complex_power(a, -0.5).inverse();
  for (double t : {-1.5, 0.3, 2.0}) {
    Matrix via_power = complex_power(a, Complex(-0.5, t)) * root;
    CHECK(operator_norm(imaginary_power(a, t) - via_power) <= 1e-6);
  }
}

TEST_CASE("normal-operator oracle for all routes") {
  const std::vector<Complex> eig{1.0, 2.5, std::polar(3.0, 0.6)};
  Matrix a = diag({eig[0], eig[1], eig[2]});
  const Complex z(-0.7, 0.4);
  Matrix p = complex_power(a, z);
  Matrix it = imaginary_power(a, 0.8);
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(p(j, j) - std::pow(eig[j], z)) < 1e-7);
    CHECK(std::abs(it(j, j) - std::pow(eig[j], Complex(0, 0.8))) < 1e-7);
  }
  for (const auto& name : builtin_symbol_names()) {
    auto f = builtin_symbol(name, kPi / 4);
    Matrix v = hinf_apply(f, a);
    for (int j = 0; j < 3; ++j) CHECK(std::abs(v(j, j) - f.eval(-eig[j])) < 1e-7);
  }
}

TEST_CASE("BIP fits") {
  auto positive = bip_fit(diag({1, 2}), 4.0, 17);
  CHECK(positive.phi <= 0.01);
  CHECK(positive.M == doctest::Approx(1.0).epsilon(1e-6));

  auto rotated = bip_fit(diag({std::polar(1.0, kPi / 4), std::polar(1.0, -kPi / 4)}), 4.0, 17);
  CHECK(std::abs(rotated.phi - kPi / 4) <= 0.05 * kPi / 4);

  auto id = bip_fit(Matrix::Identity(2, 2), 2.0, 9);
  CHECK(id.phi == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(id.M == doctest::Approx(1.0).epsilon(1e-8));
  for (std::size_t j = 0; j < rotated.t_grid.size(); ++j)
    CHECK(std::log(rotated.norms[j]) <= std::log(rotated.M) + rotated.phi * std::abs(rotated.t_grid[j]) + 1e-12);
}

TEST_CASE("symbol class checks") {
  HolomorphicSymbol cayley = builtin_symbol("cayley-squared", kPi / 2);
  cayley.decay.c = 1.1;
  CHECK(symbol_class_check(cayley).pass);

  HolomorphicSymbol one{"one", [](Complex) { return Complex(1.0); }, kPi / 2, {DecayKind::h0_infinity, 5.0, 0.5}, {}};
  CHECK_THROWS_AS(symbol_class_check(one), Error);

  CHECK(symbol_class_check(builtin_symbol("sqrt-over-1minus", kPi / 4)).pass);
  for (const auto& name : builtin_symbol_names()) CHECK(symbol_class_check(builtin_symbol(name, 0.3)).pass);
}

TEST_CASE("H-infinity application") {
  auto sq = builtin_symbol("sqrt-over-1minus", kPi / 2);
  CHECK(std::abs(hinf_apply(sq, scalar(1.0))(0, 0) - 0.5) < 1e-7);
  auto cay = builtin_symbol("cayley-squared", kPi / 2);
  CHECK(std::abs(hinf_apply(cay, scalar(1.0))(0, 0) - 0.25) < 1e-7);
  CHECK(max_abs_diff(hinf_apply(sq, diag({1, 4})), diag({0.5, 0.4})) < 1e-7);
}

TEST_CASE("H-infinity constant estimates") {
  std::vector<HolomorphicSymbol> family;
  for (const auto& name : builtin_symbol_names()) family.push_back(builtin_symbol(name, kPi / 2));
  auto id = hinf_constant(Matrix::Identity(2, 2), kPi / 2, family);
  CHECK(id.c_hat <= 1.0 + 1e-7);
  double oracle_ratio = 0.0;
  for (const auto& f : family) oracle_ratio = std::max(oracle_ratio, std::abs(f.eval(-1.0)) / sampled_sup(f));
  CHECK(id.c_hat == doctest::Approx(oracle_ratio).epsilon(1e-6));

  auto d = hinf_constant(diag({1, 4}), kPi / 2, family);
  CHECK(d.c_hat <= 1.0 + 1e-7);
  CHECK_THROWS_AS(hinf_constant(diag({1, 4}), kPi / 2, {}), Error);

  // the same operator yields finite imaginary-power growth
  auto fit = bip_fit(diag({1, 4}), 2.0, 9);
  CHECK(std::isfinite(fit.M));
  CHECK(std::isfinite(fit.phi));
}
