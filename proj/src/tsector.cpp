#include "sectorsum/tsector.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>

#include "sectorsum/parallel.hpp"

namespace sectorsum {

namespace {

const Complex kTwoPiI{0.0, 2.0 * kPi};
constexpr double kMaxCutoff = 60.0;

Json vectors_to_json(const std::vector<Vector>& xs) {
  Json out = Json::array();
  for (const auto& x : xs) {
    Json v = Json::array();
    for (Eigen::Index i = 0; i < x.size(); ++i) v.push_back(complex_to_json(x(i)));
    out.push_back(v);
  }
  return out;
}

void require_radius(double r) {
  if (!(r >= std::exp(-1.0) * (1.0 - 1e-15) && r <= 1.0)) fail(Errc::invalid_argument, "r must lie in [1/e, 1]");
}

void require_angle(const MatrixOperator& a, double phi) {
  if (!std::isfinite(phi) || !(std::abs(phi) < kPi)) fail(Errc::invalid_argument, "angle must lie in (-pi, pi)");
  if (a.certified() && std::abs(phi) > a.certified()->theta)
    fail(Errc::invalid_argument, "angle exceeds the certified sector");
}

// (I + c A)^{-1} x
Vector scaled_resolvent(const Matrix& a, Complex c, const Vector& x) { return ShiftedLU(a, 1.0 / c).solve(x) / c; }

std::vector<Vector> combine(const std::vector<Vector>& terms, const std::vector<std::vector<Complex>>& mult,
                            std::size_t n_t) {
  std::vector<Vector> out(n_t, Vector::Zero(terms.front().size()));
  for (std::size_t j = 0; j < n_t; ++j)
    for (std::size_t k = 0; k < terms.size(); ++k) out[j] += mult[k][j] * terms[k];
  return out;
}

std::vector<std::vector<Complex>> harmonics(const TrigPolynomial& poly) {
  const auto t = poly.grid();
  std::vector<std::vector<Complex>> h(poly.coefficients.size(), std::vector<Complex>(t.size()));
  for (std::size_t k = 0; k < h.size(); ++k)
    for (std::size_t j = 0; j < t.size(); ++j) h[k][j] = std::polar(1.0, double(poly.frequency) * double(k) * t[j]);
  return h;
}

// (1/2 pi i) int_{-S}^{S} (rho A)^{-is} kernel(s) x ds, where `reduced` is
// kernel(s) sinh(pi s)/(pi s) so the table's unscaled integral can be used.
PvResult line_integral(const ImaginaryPowerTable& table, double rho, const Vector& x,
                       const std::function<double(double)>& reduced, double S, int n_nodes,
                       const std::vector<double>& breakpoints = {}) {
  const double log_rho = std::log(rho);
  auto r = pv_integral(
      [&](double s) -> Vector { return (std::polar(reduced(s), -s * log_rho) * table.unscaled(-s)) * x; }, S,
      n_nodes, breakpoints);
  r.value /= kTwoPiI;
  r.error_estimate /= 2.0 * kPi;
  return r;
}

// Reduced forms of pi/sinh(pi s), pi(e^{theta s} - 1)/sinh(pi s), the
// smoothed kernel pi/sinh(pi s) - chi(s)/s and the truncated chi(s)/s.
double sinh_kernel(double s) { return 1.0 / s; }

double rotation_kernel(double theta, double s) { return std::expm1(theta * s) / s; }

double pv_kernel(double s) { return imaginary_power_prefactor(s) / s; }

double smoothed_kernel(double s) { return std::abs(s) <= kPi ? (1.0 - imaginary_power_prefactor(s)) / s : 1.0 / s; }

ImaginaryPowerTable table_up_to(const MatrixOperator& a, double S) {
  ImaginaryPowerOptions opts;
  opts.max_frequency = S;
  return ImaginaryPowerTable(a, opts);
}

double checked_cutoff(const BipFit& fit, double theta, const RepresentationOptions& opts) {
  if (!(std::abs(theta) < kPi - fit.phi))
    fail(Errc::angle_out_of_range, "rotation angle must satisfy |theta| < pi - phi");
  if (!(opts.tol_tail > 0.0) || opts.n_nodes < 2) fail(Errc::invalid_argument, "invalid representation options");
  double S = representation_cutoff(fit, theta, opts.tol_tail);
  if (opts.cutoff) {
    if (!(*opts.cutoff > 0.0)) fail(Errc::invalid_argument, "cutoff must be positive");
    S = *opts.cutoff;
    const double tail = fit.M * std::exp(-(kPi - fit.phi - std::abs(theta)) * S);
    if (tail > opts.tol_tail * (1.0 + 1e-9))
      fail(Errc::truncation_not_converged, "cutoff leaves a tail of " + std::to_string(tail));
  }
  if (S > kMaxCutoff) fail(Errc::truncation_not_converged, "required cutoff is beyond the imaginary-power range");
  return S;
}

void require_vector(const MatrixOperator& a, const Vector& x, double rho) {
  if (x.size() != a.dim()) fail(Errc::dimension_mismatch, "vector size does not match operator");
  if (!(rho > 0.0) || !std::isfinite(rho)) fail(Errc::invalid_argument, "rho must be positive");
}

}  // namespace

std::vector<double> TrigPolynomial::grid() const {
  std::vector<double> t(static_cast<std::size_t>(n_t));
  for (int j = 0; j < n_t; ++j) t[static_cast<std::size_t>(j)] = 2.0 * kPi * j / n_t;
  return t;
}

void validate(const TrigPolynomial& poly) {
  if (poly.coefficients.empty()) fail(Errc::invalid_argument, "trigonometric polynomial needs coefficients");
  const auto dim = poly.coefficients.front().size();
  for (const auto& x : poly.coefficients) {
    if (x.size() != dim || dim == 0) fail(Errc::dimension_mismatch, "coefficients must share a nonzero size");
    if (!x.allFinite()) fail(Errc::invalid_argument, "coefficients must be finite");
  }
  if (!(poly.p >= 1.0) || !std::isfinite(poly.p)) fail(Errc::invalid_argument, "p must be finite and >= 1");
  if (poly.frequency < 1) fail(Errc::invalid_argument, "frequency must be >= 1");
  if (poly.n_t < 4 * (poly.frequency * poly.degree() + 1))
    fail(Errc::invalid_argument, "grid too coarse: n_t must be at least 4 (m n + 1)");
}

double lp_norm(const std::vector<Vector>& samples, double p) {
  if (samples.empty()) fail(Errc::invalid_argument, "lp_norm needs samples");
  std::vector<double> terms;
  terms.reserve(samples.size());
  for (const auto& v : samples) terms.push_back(std::pow(v.norm(), p));
  return std::pow(2.0 * kPi / double(samples.size()) * pairwise_sum(terms, 0.0), 1.0 / p);
}

std::vector<Vector> resolvent_sum_samples(const MatrixOperator& a, double phi, double r, const TrigPolynomial& poly) {
  validate(poly);
  require_radius(r);
  require_angle(a, phi);
  if (poly.coefficients.front().size() != a.dim()) fail(Errc::dimension_mismatch, "coefficients do not match operator");
  std::vector<Vector> terms;
  for (std::size_t k = 0; k < poly.coefficients.size(); ++k)
    terms.push_back(scaled_resolvent(a.matrix(), r * std::exp(-double(k)) * std::polar(1.0, phi), poly.coefficients[k]));
  return combine(terms, harmonics(poly), static_cast<std::size_t>(poly.n_t));
}

double lhs_norm(const MatrixOperator& a, double phi, double r, const TrigPolynomial& poly) {
  return lp_norm(resolvent_sum_samples(a, phi, r, poly), poly.p);
}

FamilyKind family_kind_from_string(const std::string& name) {
  if (name == "pure-harmonics") return FamilyKind::pure_harmonics;
  if (name == "piecewise-constant") return FamilyKind::piecewise_constant;
  if (name == "proof-derived") return FamilyKind::proof_derived;
  fail(Errc::invalid_argument, "unknown multiplier family '" + name + "'");
}

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::pure_harmonics: return "pure-harmonics";
    case FamilyKind::piecewise_constant: return "piecewise-constant";
    case FamilyKind::proof_derived: return "proof-derived";
  }
  return "unknown";
}

std::vector<Multiplier> family_members(const MultiplierFamily& family, const TrigPolynomial& poly) {
  validate(poly);
  const auto t = poly.grid();
  const std::size_t terms = poly.coefficients.size();
  const double m = poly.frequency;
  std::vector<Multiplier> members;
  auto build = [&](auto&& phase, Json params) {
    Multiplier a;
    a.parameters = std::move(params);
    a.values.assign(terms, std::vector<Complex>(t.size()));
    for (std::size_t k = 0; k < terms; ++k)
      for (std::size_t j = 0; j < t.size(); ++j) a.values[k][j] = std::polar(1.0, phase(k, t[j]));
    members.push_back(std::move(a));
  };

  switch (family.kind) {
    case FamilyKind::pure_harmonics: {
      constexpr std::size_t kMaxMembers = 4096;
      const std::size_t free = terms - 1;
      std::size_t count = 1;
      bool full = true;
      for (std::size_t i = 0; i < free; ++i) {
        count *= 4;
        if (count > kMaxMembers) {
          full = false;
          break;
        }
      }
      const std::size_t total = full ? count : 4;
      for (std::size_t code = 0; code < total; ++code) {
        std::vector<double> beta(terms, 0.0);
        std::size_t c = code;
        for (std::size_t k = 1; k < terms; ++k) {
          beta[k] = (full ? c % 4 : code) * kPi / 2.0;
          if (full) c /= 4;
        }
        build([&](std::size_t k, double tj) { return m * k * tj + beta[k]; }, {{"betas", beta}});
      }
      break;
    }
    case FamilyKind::piecewise_constant: {
      if (family.segments != 4 && family.segments != 8)
        fail(Errc::invalid_argument, "piecewise-constant family uses 4 or 8 segments");
      const double seg = family.segments;
      for (double shift : {0.0, 0.5})
        build(
            [&](std::size_t k, double tj) {
              const double level = 2.0 * kPi * (std::floor(seg * tj / (2.0 * kPi)) + shift) / seg;
              return m * k * level;
            },
            {{"segments", family.segments}, {"shift", shift}});
      break;
    }
    case FamilyKind::proof_derived:
      for (int j = 0; j < 8; ++j) {
        const double s = 2.0 * kPi * j / 8.0;
        build([&](std::size_t k, double tj) { return m * k * (tj + s); }, {{"shift", s}});
      }
      break;
  }
  return members;
}

Json to_json(const TSectorReport& r) {
  return {{"c_hat", r.c_hat},   {"witness", r.witness}, {"lhs", r.lhs},           {"denominator", r.denominator},
          {"grid_error", r.grid_error}, {"members", r.members}, {"phi", r.phi}, {"r", r.r},
          {"p", r.p},           {"n", r.n},             {"n_t", r.n_t},
          {"family", to_string(r.family.kind)},         {"segments", r.family.segments}};
}

TSectorReport witness_search(const MatrixOperator& a, double phi, double r, const TrigPolynomial& poly,
                             const MultiplierFamily& family) {
  TSectorReport rep;
  rep.phi = phi;
  rep.r = r;
  rep.p = poly.p;
  rep.n = poly.degree();
  rep.n_t = poly.n_t;
  rep.family = family;
  rep.lhs = lhs_norm(a, phi, r, poly);
  TrigPolynomial fine = poly;
  fine.n_t *= 2;
  rep.grid_error = std::abs(lhs_norm(a, phi, r, fine) - rep.lhs);

  double size = 0.0;
  for (const auto& x : poly.coefficients) size += x.norm();
  const auto members = family_members(family, poly);
  rep.members = members.size();
  double best_den = -1.0;
  for (const auto& m : members) {
    const double den = lp_norm(combine(poly.coefficients, m.values, static_cast<std::size_t>(poly.n_t)), poly.p);
    if (den > best_den) {
      best_den = den;
      rep.witness = m.parameters;
    }
  }
  if (!(best_den >= 1e-12 * size) || size == 0.0)
    fail(Errc::denominator_degenerate, "every witness in the family has a vanishing denominator");
  rep.denominator = best_den;
  rep.c_hat = rep.lhs / best_den;
  return rep;
}

CertificateReport parseval_tsector_check(const MatrixOperator& a, double phi, double r, const TrigPolynomial& poly) {
  validate(poly);
  if (poly.p != 2.0) fail(Errc::invalid_argument, "the Parseval check needs p = 2");
  const Matrix& m = a.matrix();
  const double scale = std::max(1.0, operator_norm(m) * operator_norm(m));
  if (operator_norm(m * m.adjoint() - m.adjoint() * m) > 1e-10 * scale)
    fail(Errc::invalid_argument, "the Parseval check needs a normal operator");

  const double grid_lhs = lhs_norm(a, phi, r, poly);
  double lhs_sq = 0.0, rhs_sq = 0.0, worst_term = 0.0;
  for (std::size_t k = 0; k < poly.coefficients.size(); ++k) {
    const Vector& x = poly.coefficients[k];
    const Vector y = scaled_resolvent(m, r * std::exp(-double(k)) * std::polar(1.0, phi), x);
    lhs_sq += 2.0 * kPi * y.squaredNorm();
    rhs_sq += 2.0 * kPi * x.squaredNorm();
    if (x.norm() > 0.0) worst_term = std::max(worst_term, y.norm() / x.norm());
  }
  const double k_hat = certify_sector(a, std::abs(phi)).k_hat;

  Json inputs = {{"matrix", matrix_to_json(m)}, {"phi", phi},       {"r", r},
                 {"p", poly.p},                 {"n_t", poly.n_t},  {"frequency", poly.frequency},
                 {"coefficients", vectors_to_json(poly.coefficients)}};
  auto report = make_report("parseval-t-sector", std::move(inputs));
  report.tolerances["grid_consistency"] = 1e-10;
  report.node_counts["grid"] = poly.n_t;
  const double grid_gap = std::abs(grid_lhs * grid_lhs - lhs_sq) / std::max(lhs_sq, 1e-300);
  report.outputs = {{"lhs_sq", lhs_sq},
                    {"rhs_sq", rhs_sq},
                    {"k_hat", k_hat},
                    {"ratio", rhs_sq > 0.0 ? std::sqrt(lhs_sq / rhs_sq) : 0.0},
                    {"worst_term", worst_term},
                    {"margin", k_hat * k_hat * rhs_sq - lhs_sq},
                    {"grid_lhs", grid_lhs},
                    {"grid_gap", grid_gap}};
  report.pass = lhs_sq <= k_hat * k_hat * rhs_sq * (1.0 + 1e-12) && grid_gap <= 1e-10;
  return report;
}

double representation_cutoff(const BipFit& fit, double theta, double tol_tail) {
  const double decay = kPi - fit.phi - std::abs(theta);
  if (!(decay > 0.0)) fail(Errc::angle_out_of_range, "rotation angle must satisfy |theta| < pi - phi");
  return std::log(std::max(fit.M, 1.0) / tol_tail) / decay;
}

RepresentationResult resolvent_rep_real(const MatrixOperator& a, const BipFit& fit, double rho, const Vector& x,
                                        const RepresentationOptions& opts) {
  require_vector(a, x, rho);
  const double S = checked_cutoff(fit, 0.0, opts);
  const ImaginaryPowerTable table = table_up_to(a, S);
  const auto pv = line_integral(table, rho, x, sinh_kernel, S, opts.n_nodes);
  RepresentationResult r;
  r.value = pv.value + 0.5 * x;
  r.cutoff = S;
  r.error_estimate = pv.error_estimate;
  r.nodes = pv.nodes;
  return r;
}

RepresentationResult resolvent_rep_rotated(const MatrixOperator& a, const BipFit& fit, double rho, double theta,
                                           const Vector& x, const RepresentationOptions& opts) {
  require_vector(a, x, rho);
  const double S = checked_cutoff(fit, theta, opts);
  RepresentationOptions base = opts;
  base.cutoff = S;
  RepresentationResult r = resolvent_rep_real(a, fit, rho, x, base);
  if (theta == 0.0) return r;
  const ImaginaryPowerTable table = table_up_to(a, S);
  const auto rot = line_integral(table, rho, x, [&](double s) { return rotation_kernel(theta, s); }, S, opts.n_nodes);
  r.value += rot.value;
  r.error_estimate += rot.error_estimate;
  r.nodes += rot.nodes;
  return r;
}

Vector discrete_hilbert(const Vector& f) {
  const auto n = static_cast<std::size_t>(f.size());
  if (n < 2 || n % 2 != 0) fail(Errc::invalid_argument, "discrete_hilbert needs an even number of samples");
  if (!f.allFinite()) fail(Errc::invalid_argument, "discrete_hilbert needs finite samples");
  Eigen::FFT<double> fft;
  std::vector<Complex> in(f.data(), f.data() + n), spec, out;
  fft.fwd(spec, in);
  const Complex minus_i(0.0, -1.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0 || k == n / 2)
      spec[k] = 0.0;
    else
      spec[k] *= k < n / 2 ? minus_i : -minus_i;
  }
  fft.inv(out, spec);
  return Eigen::Map<const Vector>(out.data(), static_cast<Eigen::Index>(n));
}

double rotation_transference(const MatrixOperator& a, const BipFit& fit, double theta,
                             const RepresentationOptions& opts) {
  const double S = checked_cutoff(fit, theta, opts);
  if (theta == 0.0) return 0.0;
  const ImaginaryPowerTable table = table_up_to(a, S);
  auto r = pv_integral(
      [&](double s) -> Vector {
        const double w = operator_norm(table.unscaled(-s)) * std::abs(rotation_kernel(theta, s)) * (1.0 + std::abs(s));
        return Vector::Constant(1, w);
      },
      S, opts.n_nodes);
  return r.value(0).real();
}

CertificateReport bip_tsector_bound_assembly(const MatrixOperator& a, const BipFit& fit, double theta, double r,
                                             const TrigPolynomial& poly, const RepresentationOptions& opts) {
  const auto lhs_samples = resolvent_sum_samples(a, theta, r, poly);
  const double lhs = lp_norm(lhs_samples, poly.p);
  const double S = checked_cutoff(fit, theta, opts);
  const ImaginaryPowerTable table = table_up_to(a, S);
  const std::vector<double> breaks = S > kPi ? std::vector<double>{kPi} : std::vector<double>{};

  const std::size_t terms = poly.coefficients.size();
  std::vector<Vector> smoothed(terms), pv(terms), half(terms), rotation(terms);
  double split_defect = 0.0, error_estimate = 0.0;
  std::size_t nodes = 0;
  for (std::size_t k = 0; k < terms; ++k) {
    const Vector& x = poly.coefficients[k];
    const double rho = r * std::exp(-double(k));
    const auto v1 = line_integral(table, rho, x, smoothed_kernel, S, opts.n_nodes, breaks);
    const auto v2 = line_integral(table, rho, x, pv_kernel, kPi, opts.n_nodes);
    smoothed[k] = v1.value;
    pv[k] = v2.value;
    half[k] = 0.5 * x;
    rotation[k] = Vector::Zero(x.size());
    error_estimate += v1.error_estimate + v2.error_estimate;
    nodes += v1.nodes + v2.nodes;
    if (theta != 0.0) {
      const auto v4 = line_integral(table, rho, x, [&](double s) { return rotation_kernel(theta, s); }, S,
                                    opts.n_nodes);
      rotation[k] = v4.value;
      error_estimate += v4.error_estimate;
      nodes += v4.nodes;
    }
    const Vector real_line = scaled_resolvent(a.matrix(), rho, x);
    split_defect = std::max(split_defect, (smoothed[k] + pv[k] + half[k] - real_line).norm());
  }

  const auto h = harmonics(poly);
  const auto n_t = static_cast<std::size_t>(poly.n_t);
  const auto t1 = combine(smoothed, h, n_t), t2 = combine(pv, h, n_t), t3 = combine(half, h, n_t),
             t4 = combine(rotation, h, n_t);
  double reconstruction = 0.0, scale = 0.0;
  for (std::size_t j = 0; j < n_t; ++j) {
    reconstruction = std::max(reconstruction, (t1[j] + t2[j] + t3[j] + t4[j] - lhs_samples[j]).norm());
    scale = std::max(scale, lhs_samples[j].norm());
  }
  const double norms[] = {lp_norm(t1, poly.p), lp_norm(t2, poly.p), lp_norm(t3, poly.p), lp_norm(t4, poly.p)};
  const double bound = norms[0] + norms[1] + norms[2] + norms[3];

  Json inputs = {{"matrix", matrix_to_json(a.matrix())},
                 {"fit", to_json(fit)},
                 {"theta", theta},
                 {"r", r},
                 {"p", poly.p},
                 {"n_t", poly.n_t},
                 {"frequency", poly.frequency},
                 {"coefficients", vectors_to_json(poly.coefficients)}};
  auto report = make_report("t-sector-assembly", std::move(inputs));
  const double tol = 1e-6 * std::max(1.0, scale);
  report.tolerances["tol_tail"] = opts.tol_tail;
  report.tolerances["reconstruction"] = tol;
  report.node_counts["line_nodes"] = static_cast<long long>(nodes);
  report.node_counts["grid"] = poly.n_t;
  report.outputs = {{"lhs", lhs},
                    {"smoothed_term", norms[0]},
                    {"pv_term", norms[1]},
                    {"half_term", norms[2]},
                    {"rotation_term", norms[3]},
                    {"bound", bound},
                    {"cutoff", S},
                    {"split_defect", split_defect},
                    {"reconstruction_error", reconstruction},
                    {"error_estimate", error_estimate}};
  report.pass = std::isfinite(bound) && bound >= lhs * (1.0 - 1e-8) && reconstruction <= tol;
  return report;
}

}  // namespace sectorsum
