#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sectorsum/contour.hpp"

using namespace sectorsum;
using oracle::diag;

namespace {

Matrix scalar(Complex a) { return Matrix::Constant(1, 1, a); }

NodeIntegrand power_integrand(const Matrix& a, Complex z) {
  return [a, z](Complex lam) -> Matrix { return std::pow(-lam, z) * shifted_inverse(a, lam); };
}

// sine integral Si(x) by composite Gauss-Legendre on sin(t)/t
double sine_integral(double x) {
  double sum = 0.0;
  for (auto [t, w] : radial_rule(0.0, x, 400, 16, false)) sum += w * std::sin(t) / t;
  return sum;
}

}  // namespace

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (int order : {1, 4, 8, 16}) {
    const auto& g = gauss_legendre(order);
    for (int deg = 0; deg < 2 * order; ++deg) {
      double s = 0.0;
      for (int k = 0; k < order; ++k) s += g.w[k] * std::pow(g.x[k], deg);
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("arc-only rule for R = rho") {
  ContourSpec spec;
  spec.rho = 1.0;
  spec.R = 1.0;
  spec.theta = kPi / 2;
  spec.n_arc = 16;
  auto nodes = build_nodes(spec);
  REQUIRE(nodes.size() == 16);
  for (const auto& n : nodes) {
    CHECK(std::abs(std::abs(n.lambda) - 1.0) < 1e-14);
    CHECK(n.lambda.real() <= 1e-14);
  }
}

TEST_CASE("rho = 0 gives two rays and no arc") {
  ContourSpec spec;
  spec.rho = 0.0;
  spec.theta = kPi / 4;
  spec.R = 10.0;
  spec.n_ray = 32;
  auto nodes = build_nodes(spec);
  CHECK(nodes.size() == 64);
  for (const auto& n : nodes) CHECK(std::abs(std::abs(std::arg(n.lambda)) - kPi / 4) < 1e-14);

  spec.n_arc = 8;
  CHECK_THROWS_AS(build_nodes(spec), Error);
}

TEST_CASE("invalid contours are rejected") {
  ContourSpec spec;
  spec.theta = 0.0;
  CHECK_THROWS_AS(build_nodes(spec), Error);
  spec.theta = 1.0;
  spec.R = 0.5;
  CHECK_THROWS_AS(build_nodes(spec), Error);
  spec.R = 10;
  spec.n_ray = 2;
  CHECK_THROWS_AS(build_nodes(spec), Error);
}

TEST_CASE("closed curve integrates a simple pole to its residue") {
  ContourSpec path;
  path.rho = 0.5;
  path.theta = kPi / 3;
  path.R = 20.0;
  path.n_ray = 64;
  path.n_arc = 32;
  ContourSpec cap = path;  // outer arc from angle theta up to 2pi - theta closes the path
  cap.rho = cap.R;
  cap.n_arc = 64;
  cap.orientation = Orientation::negated;

  auto around = [&](Complex pole) {
    auto f = [pole](Complex lam) -> Matrix { return Matrix::Constant(1, 1, 1.0 / (lam - pole)); };
    return integrate(build_nodes(path), f).value(0, 0) + integrate(build_nodes(cap), f).value(0, 0);
  };
  CHECK(std::abs(around(-2.0) - 1.0) < 1e-12);
  CHECK(std::abs(around(2.0)) < 1e-12);

  // reflection keeps the weights: the sum is the integral of F(-l) over the path
  path.reflected = cap.reflected = true;
  CHECK(std::abs(around(2.0) + 1.0) < 1e-12);
}

TEST_CASE("Dunford integral: square root and inverse") {
  ContourSpec spec;
  spec.rho = 0.1;
  spec.theta = 3 * kPi / 4;
  spec.R = 1e6;
  spec.n_arc = 32;
  spec.n_ray = 8 * 24;
  spec.tail_exponent = Complex(-1.5);
  auto half = dunford(spec, power_integrand(scalar(4.0), -0.5));
  CHECK(std::abs(half.value(0, 0) - 0.5) < 1e-8);

  spec.tail_exponent = Complex(-2.0);
  auto inv = dunford(spec, power_integrand(scalar(2.0), -1.0));
  CHECK(std::abs(inv.value(0, 0) - 0.5) < 1e-8);
}

TEST_CASE("tail estimate without closure and truncation failure") {
  ContourSpec spec;
  spec.rho = 0.1;
  spec.theta = kPi / 2;
  spec.R = 100.0;
  spec.n_arc = 32;
  spec.n_ray = 80;
  spec.tol_tail = 1e-8;
  CHECK_THROWS_AS(dunford(spec, power_integrand(scalar(4.0), -0.5)), Error);
  try {
    dunford(spec, power_integrand(scalar(4.0), -0.5));
  } catch (const Error& e) {
    CHECK(e.code() == Errc::truncation_not_converged);
  }
  spec.tol_tail = 1.0;
  auto r = dunford(spec, power_integrand(scalar(4.0), -0.5));
  CHECK(r.tail_estimate > 0.0);
}

TEST_CASE("negated orientation negates exactly") {
  ContourSpec spec;
  spec.rho = 0.3;
  spec.theta = 2.0;
  spec.R = 1e5;
  spec.n_arc = 16;
  spec.n_ray = 8 * 20;
  spec.tail_exponent = Complex(-1.5);
  const Matrix a = diag({1, 3});
  Matrix plus = dunford(spec, power_integrand(a, -0.5)).value;
  spec.orientation = Orientation::negated;
  Matrix minus = dunford(spec, power_integrand(a, -0.5)).value;
  CHECK(plus == -minus);
}

TEST_CASE("Cauchy invariance under a shifted, narrowed path") {
  const Matrix a = diag({1, 3});
  ContourSpec base;
  base.rho = 0.2;
  base.theta = kPi / 2;
  base.R = 1e6;
  base.n_arc = 32;
  base.n_ray = 8 * 24;
  base.tail_exponent = Complex(-1.5);
  auto r1 = dunford(base, power_integrand(a, -0.5));

  ContourSpec moved;
  moved.rho = 0.0;
  moved.theta = kPi / 2 - 0.05;
  moved.delta = -0.1;
  moved.R = 1e6;
  moved.r_inner = 0.05;
  moved.n_ray = 8 * 26;
  moved.tail_exponent = Complex(-1.5);
  auto r2 = dunford(moved, power_integrand(a, -0.5));
  CHECK(operator_norm(r1.value - r2.value) <= 1e-9 + r1.tail_estimate + r2.tail_estimate);
  CHECK(std::abs(r1.value(1, 1) - 1.0 / std::sqrt(3.0)) < 1e-9);
}

TEST_CASE("panel refinement converges at high order") {
  // fixed truncation radius so only the quadrature error changes
  const Matrix a = scalar(1.0);
  auto run = [&](int panels) {
    ContourSpec s;
    s.rho = 0.5;
    s.theta = 0.9 * kPi;
    s.R = 50.0;
    s.n_arc = 4 * panels / 4;
    s.order = 4;
    s.n_ray = 4 * panels;
    s.tol_tail = 1.0;
    return dunford(s, power_integrand(a, -0.5)).value(0, 0);
  };
  const Complex reference = run(256);
  const double e1 = std::abs(run(4) - reference), e2 = std::abs(run(8) - reference);
  CHECK(e1 > 0.0);
  CHECK(e1 / e2 >= 16.0);
}

TEST_CASE("principal value integrals") {
  auto odd = pv_integral([](double s) { return Vector::Constant(1, 1.0 / s); }, 5.0, 64);
  CHECK(odd.value.norm() == 0.0);

  auto sinh_kernel = pv_integral([](double s) { return Vector::Constant(1, kPi / std::sinh(kPi * s)); }, 5.0, 64);
  CHECK(sinh_kernel.value.norm() < 1e-14);

  auto osc = pv_integral([](double s) { return Vector::Constant(1, std::exp(Complex(0, s)) / s); }, 50.0, 800);
  const Complex expected(0.0, 2.0 * sine_integral(50.0));
  CHECK(std::abs(osc.value(0) - expected) < 1e-10);
  CHECK(std::abs(expected.imag() - 3.1032341449718718) < 1e-12);

  CHECK_THROWS_AS(pv_integral([](double s) { return Vector::Constant(1, 1.0 / std::abs(s)); }, 1.0, 64), Error);
}
