#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sectorsum/tsector.hpp"

using namespace sectorsum;
using oracle::diag;

namespace {

Vector vec(std::initializer_list<Complex> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (Complex c : v) x(i++) = c;
  return x;
}

TrigPolynomial poly(std::vector<Vector> xs, int n_t = 64, double p = 2.0) {
  TrigPolynomial q;
  q.coefficients = std::move(xs);
  q.n_t = n_t;
  q.p = p;
  return q;
}

Vector grid_function(int n, const std::function<Complex(double)>& f) {
  Vector v(n);
  for (int j = 0; j < n; ++j) v(j) = f(2.0 * kPi * j / n);
  return v;
}

}  // namespace

TEST_CASE("trigonometric resolvent sums") {
  const Matrix id = Matrix::Identity(2, 2);
  CHECK(lhs_norm(id, 0.0, 1.0, poly({vec({1, 0})})) == doctest::Approx(std::sqrt(2.0 * kPi) * 0.5).epsilon(1e-14));

  const double second = 1.0 / (1.0 + std::exp(-1.0));
  const double parseval = std::sqrt(2.0 * kPi * (0.25 + second * second));
  CHECK(lhs_norm(Matrix::Identity(1, 1), 0.0, 1.0, poly({vec({1}), vec({1})})) ==
        doctest::Approx(parseval).epsilon(1e-13));

  CHECK_THROWS_AS(lhs_norm(id, 0.0, 0.3, poly({vec({1, 0})})), Error);
  CHECK_NOTHROW(lhs_norm(id, 0.0, 0.5, poly({vec({1, 0})})));
  CHECK_THROWS_AS(lhs_norm(id, 0.0, 1.0, poly({vec({1, 0}), vec({0, 1})}, 6)), Error);
  CHECK_THROWS_AS(lhs_norm(MatrixOperator(id, SectorSpec{0.2, 1.0}), 0.5, 1.0, poly({vec({1, 0})})), Error);
}

TEST_CASE("witness search") {
  const MatrixOperator a(diag({1, 2, 4}));
  const auto xs = poly({vec({1, 0.5, 0}), vec({0, 1, 0.2}), vec({0.3, 0, 1})});
  const double k_hat = certify_sector(a, 0.0).k_hat;
  for (auto kind : {FamilyKind::pure_harmonics, FamilyKind::piecewise_constant, FamilyKind::proof_derived}) {
    auto rep = witness_search(a, 0.0, 1.0, xs, {kind, 8});
    CHECK(rep.c_hat <= k_hat);
    CHECK(rep.members >= 2);
  }
  auto harmonic = witness_search(a, 0.0, 1.0, xs, {FamilyKind::pure_harmonics});
  CHECK(harmonic.members == 16);
  CHECK(harmonic.grid_error <= 1e-12);

  const Vector x0 = vec({1, -1, 2});
  const Complex c = 0.6 * std::polar(1.0, 0.3);
  const double expect = ShiftedLU(a.matrix(), 1.0 / c).solve(x0).norm() / std::abs(c) / x0.norm();
  for (auto kind : {FamilyKind::pure_harmonics, FamilyKind::piecewise_constant, FamilyKind::proof_derived})
    CHECK(witness_search(a, 0.3, 0.6, poly({x0}), {kind}).c_hat == doctest::Approx(expect).epsilon(1e-13));

  CHECK_THROWS_AS(witness_search(a, 0.0, 1.0, poly({Vector::Zero(3), Vector::Zero(3)}), {}), Error);
  try {
    witness_search(a, 0.0, 1.0, poly({Vector::Zero(3)}), {});
  } catch (const Error& e) {
    CHECK(e.code() == Errc::denominator_degenerate);
  }
}

TEST_CASE("multipliers are unimodular") {
  const auto xs = poly({vec({1}), vec({1}), vec({1})}, 48);
  for (auto kind : {FamilyKind::pure_harmonics, FamilyKind::piecewise_constant, FamilyKind::proof_derived})
    for (const auto& m : family_members({kind, 4}, xs))
      for (const auto& row : m.values)
        for (Complex v : row) CHECK(std::abs(std::abs(v) - 1.0) <= 1e-15);
}

TEST_CASE("Parseval check for normal operators") {
  const auto basis = poly({vec({1, 0, 0}), vec({0, 1, 0}), vec({0, 0, 1})});
  auto rep = parseval_tsector_check(diag({1, 2, 4}), 0.0, 1.0, basis);
  CHECK(rep.pass);
  CHECK(rep.outputs["margin"].get<double>() >= 0.0);

  rep = parseval_tsector_check(Matrix::Identity(3, 3), 0.0, 1.0, basis);
  CHECK(rep.pass);
  const double worst = rep.outputs["worst_term"].get<double>();
  CHECK(worst == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))).epsilon(1e-14));
  CHECK(worst < 1.0);
  CHECK(rep.outputs["k_hat"].get<double>() >= 1.0);

  CHECK_THROWS_AS(parseval_tsector_check(diag({1, 2, 4}), 0.0, 1.0, poly(basis.coefficients, 8)), Error);
  CHECK_THROWS_AS(parseval_tsector_check(diag({1, 2, 4}), 0.0, 1.0, poly(basis.coefficients, 64, 3.0)), Error);
}

TEST_CASE("real-line resolvent representation") {
  const Matrix one = Matrix::Identity(1, 1);
  const BipFit flat = bip_fit(one, 4.0, 17);
  CHECK(std::abs(resolvent_rep_real(one, flat, 1.0, vec({1})).value(0) - 0.5) <= 1e-10);

  const Matrix four = Matrix::Constant(1, 1, 4.0);
  CHECK(std::abs(resolvent_rep_real(four, bip_fit(four, 4.0, 17), 1.0, vec({1})).value(0) - 0.2) <= 1e-5);

  const Matrix a = diag({1, 9});
  const auto r = resolvent_rep_real(a, bip_fit(a, 4.0, 17), 0.5, vec({1, 1}));
  CHECK(std::abs(r.value(0) - 2.0 / 3.0) <= 1e-5);
  CHECK(std::abs(r.value(1) - 2.0 / 11.0) <= 1e-5);

  RepresentationOptions short_cut;
  short_cut.cutoff = 2.0;
  CHECK_THROWS_AS(resolvent_rep_real(a, bip_fit(a, 4.0, 17), 0.5, vec({1, 1}), short_cut), Error);
}

TEST_CASE("rotated resolvent representation") {
  const Matrix one = Matrix::Identity(1, 1);
  const BipFit flat = bip_fit(one, 4.0, 17);
  const Complex v = resolvent_rep_rotated(one, flat, 1.0, kPi / 4, vec({1})).value(0);
  CHECK(std::abs(v - Complex(0.5, -0.5 * std::tan(kPi / 8))) <= 1e-5);

  const Matrix a = diag({1, 9});
  const BipFit fit = bip_fit(a, 4.0, 17);
  CHECK(resolvent_rep_rotated(a, fit, 0.5, 0.0, vec({1, 1})).value ==
        resolvent_rep_real(a, fit, 0.5, vec({1, 1})).value);
  const auto rot = resolvent_rep_rotated(a, fit, 0.5, -1.0, vec({1, 1}));
  const Vector direct = shifted_inverse(a, 2.0 * std::polar(1.0, 1.0)) * vec({1, 1}) * 2.0 * std::polar(1.0, 1.0);
  CHECK((rot.value - direct).norm() <= 1e-5);

  const Matrix rotated = Matrix::Constant(1, 1, Complex(0.0, 1.0));
  const BipFit tilted = bip_fit(rotated, 4.0, 17);
  CHECK(tilted.phi == doctest::Approx(kPi / 2).epsilon(1e-3));
  try {
    resolvent_rep_rotated(rotated, tilted, 1.0, 3 * kPi / 4, vec({1}));
    FAIL("expected AngleOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::angle_out_of_range);
  }
}

TEST_CASE("discrete Hilbert transform") {
  const int n = 32;
  const Vector e1 = grid_function(n, [](double t) { return std::polar(1.0, t); });
  CHECK((discrete_hilbert(e1) - Complex(0.0, -1.0) * e1).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(discrete_hilbert(Vector::Ones(n)).cwiseAbs().maxCoeff() <= 1e-15);
  const Vector c2 = grid_function(n, [](double t) { return std::cos(2 * t); });
  const Vector s2 = grid_function(n, [](double t) { return std::sin(2 * t); });
  CHECK((discrete_hilbert(c2) - s2).cwiseAbs().maxCoeff() <= 1e-12);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> d;
  std::vector<Complex> coef(n / 2);
  for (auto& c : coef) c = Complex(d(rng), d(rng));
  const Vector f = grid_function(n, [&](double t) {
    Complex s = 0.0;
    for (int k = -n / 2 + 1; k < n / 2; ++k) s += coef[std::abs(k)] * std::polar(1.0 / (1 + k * k), k * t);
    return s;
  });
  const Vector twice = discrete_hilbert(discrete_hilbert(f));
  CHECK((twice + f - Vector::Constant(n, f.mean())).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK_THROWS_AS(discrete_hilbert(Vector::Ones(7)), Error);
}

TEST_CASE("rotation transference weights") {
  const Matrix a = diag({1, 3});
  const BipFit fit = bip_fit(a, 4.0, 17);
  CHECK(rotation_transference(a, fit, 0.0) == 0.0);
  double last = 0.0;
  for (double theta : {0.3, 0.8, 1.5, 2.5}) {
    const double w = rotation_transference(a, fit, theta);
    CHECK(std::isfinite(w));
    CHECK(w > last);
    last = w;
  }
}

TEST_CASE("four-term assembly of the rotated resolvent sum") {
  const Matrix one = Matrix::Identity(1, 1);
  const BipFit flat = bip_fit(one, 4.0, 17);
  auto rep = bip_tsector_bound_assembly(one, flat, kPi / 3, 1.0, poly({vec({1}), vec({1})}));
  CHECK(rep.pass);
  CHECK(std::isfinite(rep.outputs["pv_term"].get<double>()));
  CHECK(std::isfinite(rep.outputs["rotation_term"].get<double>()));
  const Complex e3 = std::polar(1.0, kPi / 3);
  const double oracle = std::sqrt(2.0 * kPi * (std::norm(1.0 / (1.0 + e3)) + std::norm(1.0 / (1.0 + std::exp(-1.0) * e3))));
  CHECK(rep.outputs["lhs"].get<double>() == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(rep.outputs["split_defect"].get<double>() <= 1e-8);

  rep = bip_tsector_bound_assembly(one, flat, 0.0, 1.0, poly({vec({1}), vec({1})}));
  CHECK(rep.pass);
  CHECK(rep.outputs["rotation_term"].get<double>() == 0.0);

  const Matrix a = diag({1, 3});
  rep = bip_tsector_bound_assembly(a, bip_fit(a, 4.0, 17), 0.5, 0.7, poly({vec({1, 1})}, 16, 3.0));
  CHECK(rep.pass);
  CHECK(rep.outputs["split_defect"].get<double>() <= 1e-8);
  int nonzero = 0;
  for (const char* key : {"smoothed_term", "pv_term", "half_term", "rotation_term"})
    nonzero += rep.outputs[key].get<double>() > 1e-12;
  CHECK(nonzero >= 3);
}
