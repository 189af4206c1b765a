#include "sectorsum/sum.hpp"

#include <cmath>
#include <random>

namespace sectorsum {

namespace {
const Complex kTwoPiI{0.0, 2.0 * kPi};

int geometric_panels(double from, double to) {
  return std::max(2, static_cast<int>(std::ceil(std::log2(to / from))));
}

// (A - z)^{-1} (B + z)^{-1}
Matrix resolvent_product(const Matrix& a, const Matrix& b, Complex z) {
  return ShiftedLU(a, -z).solve(ShiftedLU(b, z).inverse());
}
}  // namespace

double resolvent_commute_check(const Matrix& a, const Matrix& b, Complex lambda, Complex mu) {
  if (a.rows() != b.rows()) fail(Errc::dimension_mismatch, "A and B must have the same size");
  const Matrix ra = shifted_inverse(a, lambda), rb = shifted_inverse(b, mu);
  return operator_norm(ra * rb - rb * ra);
}

CommutingPair::CommutingPair(MatrixOperator a, double theta_a, MatrixOperator b, double theta_b,
                             double commute_tolerance)
    : a_(std::move(a)), b_(std::move(b)), theta_a_(theta_a), theta_b_(theta_b) {
  if (a_.dim() != b_.dim()) fail(Errc::dimension_mismatch, "A and B must have the same size");
  for (double th : {theta_a, theta_b})
    if (!(th > 0.0 && th < kPi)) fail(Errc::invalid_argument, "sector angles must lie in (0, pi)");
  if (!(theta_a + theta_b > kPi)) fail(Errc::invalid_argument, "angles must satisfy theta_A + theta_B > pi");
  for (const auto& [op, th, name] : {std::tuple{&a_, theta_a, "A"}, std::tuple{&b_, theta_b, "B"}}) {
    if (op->certified() && op->certified()->theta < th)
      fail(Errc::invalid_argument, std::string(name) + " is certified below the requested angle");
    const SpectrumInfo info = spectrum_info(op->matrix());
    if (!(info.max_abs_arg < kPi - th))
      fail(Errc::not_sectorial_at_angle, std::string(name) + " has spectrum inside the sector of its negative");
    if (!(info.min_modulus > 0.0)) fail(Errc::invalid_argument, std::string(name) + " must be invertible");
  }
  const SpectrumInfo ia = spectrum_info(a_.matrix()), ib = spectrum_info(b_.matrix());
  gap_ = std::min(ia.min_modulus, ib.min_modulus);
  scale_ = std::max(ia.max_modulus, ib.max_modulus);
  commutator_ = resolvent_commute_check(a_.matrix(), b_.matrix(), 1.0, 1.0);
  if (commutator_ > commute_tolerance)
    fail(Errc::invalid_argument, "resolvents do not commute (commutator norm " + std::to_string(commutator_) + ")");
}

ContourSpec sum_contour(const CommutingPair& pair) {
  const double offset = pair.default_offset();
  ContourSpec spec;
  spec.theta = pair.theta_b() - offset;
  spec.delta = -offset;
  spec.rho = 0.0;
  spec.r_inner = 0.25 * pair.spectral_gap();
  spec.R = 1e6 * std::max(1.0, pair.scale());
  spec.n_ray = spec.order * (1 + geometric_panels(spec.r_inner, spec.R));
  spec.tail_exponent = Complex(-2.0);
  return spec;
}

SumInverse sum_inverse(const CommutingPair& pair, const ContourSpec& spec) {
  const Matrix& a = pair.a().matrix();
  const Matrix& b = pair.b().matrix();
  auto r = dunford(spec, [&](Complex z) { return resolvent_product(a, b, z); });
  SumInverse s;
  s.value = std::move(r.value);
  s.tail_estimate = r.tail_estimate;
  s.nodes = r.nodes;
  s.spec = spec;
  const Matrix sum = a + b;
  const Matrix id = Matrix::Identity(a.rows(), a.cols());
  s.residual_left = operator_norm(s.value * sum - id);
  s.residual_right = operator_norm(sum * s.value - id);
  return s;
}

SumInverse sum_inverse(const CommutingPair& pair) { return sum_inverse(pair, sum_contour(pair)); }

namespace {

void require_weight(Complex w) {
  if (!is_finite(w) || !(w.real() < 0.0)) fail(Errc::invalid_argument, "weight exponent needs Re w < 0");
}

ContourSpec identity_contour(const CommutingPair& pair, Complex w, double theta, bool reflected) {
  ContourSpec spec;
  spec.theta = theta;
  spec.reflected = reflected;
  spec.rho = 0.5 * pair.spectral_gap();
  spec.R = 1e6 * std::max(1.0, pair.scale());
  spec.n_arc = 32;
  spec.n_ray = spec.order * geometric_panels(spec.rho, spec.R);
  spec.tail_exponent = w - 1.0;
  return spec;
}

Matrix left_integral(const CommutingPair& pair, Complex w, const ContourSpec& spec) {
  const Matrix& a = pair.a().matrix();
  const Matrix& b = pair.b().matrix();
  return dunford(spec, [&](Complex mu) -> Matrix { return resolvent_product(a, b, mu) * std::pow(mu, 1.0 + w); })
      .value;
}

Matrix right_integral(const CommutingPair& pair, Complex w, const ContourSpec& spec) {
  const Matrix& a = pair.a().matrix();
  const Matrix& b = pair.b().matrix();
  return dunford(spec, [&](Complex l) -> Matrix { return resolvent_product(a, b, l) * std::pow(-l, 1.0 + w); })
      .value;
}

}  // namespace

ContourSpec identity_contour_left(const CommutingPair& pair, Complex w) {
  return identity_contour(pair, w, pair.theta_a(), true);
}

ContourSpec identity_contour_right(const CommutingPair& pair, Complex w) {
  return identity_contour(pair, w, pair.theta_b(), false);
}

IdentityCheck weighted_identity_left(const CommutingPair& pair, Complex w) {
  require_weight(w);
  const Matrix k = sum_inverse(pair).value;
  IdentityCheck c;
  c.lhs = pair.a().matrix() * k * complex_power(pair.a(), w);
  c.rhs = left_integral(pair, w, identity_contour_left(pair, w));
  c.diff = operator_norm(c.lhs - c.rhs);
  return c;
}

IdentityCheck weighted_identity_right(const CommutingPair& pair, Complex w) {
  require_weight(w);
  const Matrix k = sum_inverse(pair).value;
  const Matrix bw = complex_power(pair.b(), w);
  IdentityCheck c;
  c.lhs = pair.a().matrix() * k * bw;
  c.rhs = bw - right_integral(pair, w, identity_contour_right(pair, w));
  c.diff = operator_norm(c.lhs - c.rhs);
  return c;
}

namespace {

void require_split_args(double theta, double phi, int n) {
  if (!(theta > 0.0 && theta < 1.0) || !(phi > 0.0 && phi < 1.0) || !(theta + phi < 1.0))
    fail(Errc::invalid_argument, "split needs theta, phi in (0, 1) with theta + phi < 1");
  if (n < 0) fail(Errc::invalid_argument, "n must be non-negative");
}

// phi-th power as A * A^{phi - 1}
Matrix fractional_power(const MatrixOperator& op, double phi) {
  return op.matrix() * complex_power(op, Complex(phi - 1.0, 0.0));
}

double tilde_theta_b(const CommutingPair& pair) { return pair.theta_b() - pair.default_offset(); }

}  // namespace

SplitPieces split_integral_eval(const CommutingPair& pair, double theta, double phi, double t, int n,
                                SplitVariant variant, const SplitOptions& opts) {
  require_split_args(theta, phi, n);
  const Complex w(-(theta + phi), t);
  const Matrix& a = pair.a().matrix();
  const Matrix& b = pair.b().matrix();
  const bool left = variant == SplitVariant::left;

  ContourSpec spec;
  spec.rho = 0.0;
  spec.theta = left ? pair.theta_a() : tilde_theta_b(pair);
  spec.reflected = left;
  spec.R = 1e6 * std::max({1.0, pair.scale(), std::exp(double(n)) * 4.0});
  spec.tail_exponent = w - 1.0;

  const Matrix power = fractional_power(left ? pair.a() : pair.b(), phi);
  NodeIntegrand f;
  if (left)
    f = [&](Complex mu) -> Matrix { return power * resolvent_product(a, b, mu) * std::pow(mu, 1.0 + w); };
  else
    f = [&](Complex l) -> Matrix {
      return -(ShiftedLU(a, -l).solve(Matrix(power * ShiftedLU(b, l).inverse()))) * std::pow(-l, 1.0 + w);
    };

  auto band = [&](double lo, double hi, int panels, Grading g) { return integrate(ray_band_nodes(spec, lo, hi, panels, g), f).value; };

  SplitPieces p;
  const double floor = opts.inner_floor;
  p.inner = band(0.0, floor, 1, Grading::uniform) + band(floor, 1.0, geometric_panels(floor, 1.0), Grading::geometric);
  p.middle = Matrix::Zero(a.rows(), a.cols());
  for (int k = 0; k < n; ++k)
    p.middle += band(std::exp(double(k)), std::exp(double(k + 1)), opts.panels_per_band, Grading::uniform);
  const double start = std::exp(double(n));
  p.tail = band(start, std::numeric_limits<double>::infinity(), geometric_panels(start, spec.R), Grading::geometric);

  p.total = p.inner + p.middle + p.tail;
  if (left) {
    p.reference = power * weighted_identity_left(pair, w).rhs;
  } else {
    p.total += complex_power(pair.b(), Complex(-theta, t));
    p.reference = power * weighted_identity_right(pair, w).rhs;
  }
  p.diff = operator_norm(p.total - p.reference);
  return p;
}

EadicSummand eadic_summand(const CommutingPair& pair, double theta, double phi, double t, int k,
                           const SplitOptions& opts) {
  require_split_args(theta, phi, k);
  const Matrix& a = pair.a().matrix();
  const Matrix& b = pair.b().matrix();
  const Matrix b_phi = fractional_power(pair.b(), phi);
  const double tt = tilde_theta_b(pair);
  const double tp = theta + phi;
  const Complex i(0.0, 1.0);
  const Complex c_plus = std::exp(i * tt) * std::exp(i * (kPi - tt) * tp) * std::exp((kPi - tt) * t) / kTwoPiI;
  const Complex c_minus = std::exp(-i * tt) * std::exp(i * (tt - kPi) * tp) * std::exp((tt - kPi) * t) / kTwoPiI;
  const double ek = std::exp(double(k));

  const auto rule = radial_rule(1.0, std::exp(1.0), opts.panels_per_band, 8, false);
  Matrix plus = Matrix::Zero(a.rows(), a.cols()), minus = plus;
  for (const auto& [x, wx] : rule) {
    const double c = 1.0 / (x * ek);
    const Complex weight = std::pow(x, Complex(1.0 - theta, t)) * wx / x;
    for (int side : {1, -1}) {
      const Complex dir = std::polar(1.0, side * tt);
      // B^{+-}(x) = (c B)^phi (c B + e^{+-i tt})^{-1}
      Matrix cb = c * b;
      cb.diagonal().array() += dir;
      const Matrix b_factor = std::pow(c, phi) * b_phi * cb.inverse();
      const Matrix term = ShiftedLU(a, -x * ek * dir).solve(b_factor) * (weight * dir);
      (side > 0 ? plus : minus) += term;
    }
  }
  EadicSummand s;
  s.scale = std::exp((1.0 - theta) * k) * std::polar(1.0, k * t);
  s.op = c_plus * plus - c_minus * minus;
  return s;
}

Matrix eadic_middle_eval(const CommutingPair& pair, double theta, double phi, double t, int n,
                         const SplitOptions& opts) {
  require_split_args(theta, phi, n);
  Matrix sum = Matrix::Zero(pair.a().dim(), pair.a().dim());
  for (int k = 0; k < n; ++k) {
    const EadicSummand s = eadic_summand(pair, theta, phi, t, k, opts);
    sum += s.scale * s.op;
  }
  return sum;
}

std::vector<Vector> default_probes(Eigen::Index n, std::uint64_t seed, int random_count) {
  std::vector<Vector> probes;
  for (Eigen::Index i = 0; i < n; ++i) probes.push_back(Vector::Unit(n, i));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  for (int r = 0; r < random_count; ++r) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(d(rng), d(rng));
    probes.push_back(v.normalized());
  }
  return probes;
}

ClosednessCertificate closedness_certificate(const CommutingPair& pair, const std::vector<Vector>& probes,
                                             const std::vector<double>& theta_grid, std::uint64_t seed) {
  if (probes.empty()) fail(Errc::invalid_argument, "closedness certificate needs probes");
  for (const auto& v : probes) {
    if (v.size() != pair.a().dim()) fail(Errc::dimension_mismatch, "probe size does not match operators");
    if (v.norm() == 0.0) fail(Errc::invalid_argument, "probes must be nonzero");
  }
  const SumInverse k = sum_inverse(pair);
  const Matrix ak = pair.a().matrix() * k.value;

  ClosednessCertificate c;
  c.seed = seed;
  c.spec = k.spec;
  c.probe_count = probes.size();
  c.residual_k = std::max(k.residual_left, k.residual_right);
  for (const auto& v : probes) c.c_ab = std::max(c.c_ab, (ak * v).norm() / v.norm());
  for (double th : theta_grid) {
    if (!(th > 0.0 && th < 1.0)) fail(Errc::invalid_argument, "theta grid values must lie in (0, 1)");
    const Matrix m = ak * complex_power(pair.b(), Complex(-th, 0.0));
    double best = 0.0;
    for (const auto& u : probes) best = std::max(best, (m * u).norm() / u.norm());
    c.theta_grid.push_back(th);
    c.theta_values.push_back(best);
    c.theta_sup = std::max(c.theta_sup, best);
  }
  return c;
}

}  // namespace sectorsum
