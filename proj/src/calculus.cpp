#include "sectorsum/calculus.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

#include "sectorsum/parallel.hpp"

namespace sectorsum {

SpectrumInfo spectrum_info(const Matrix& a) {
  require_square(a, "operator matrix");
  Eigen::ComplexEigenSolver<Matrix> es(a, false);
  if (es.info() != Eigen::Success) fail(Errc::invalid_argument, "eigenvalue computation did not converge");
  SpectrumInfo info;
  info.min_modulus = std::numeric_limits<double>::infinity();
  for (Complex ev : es.eigenvalues()) {
    info.min_modulus = std::min(info.min_modulus, std::abs(ev));
    info.max_modulus = std::max(info.max_modulus, std::abs(ev));
    info.max_abs_arg = std::max(info.max_abs_arg, std::abs(std::arg(ev)));
  }
  return info;
}

namespace {

int geometric_panels(double from, double to) {
  return std::max(2, static_cast<int>(std::ceil(std::log2(to / from))));
}

void require_invertible_sectorial(const SpectrumInfo& info) {
  if (!(info.min_modulus > 0.0)) fail(Errc::invalid_argument, "operator must be invertible");
  if (!(info.max_abs_arg < kPi * (1.0 - 1e-12))) fail(Errc::invalid_argument, "spectrum touches the negative axis");
}

void check_certified_angle(const MatrixOperator& a, double theta) {
  if (a.certified() && theta > a.certified()->theta * (1.0 + 1e-12))
    fail(Errc::invalid_argument, "contour angle exceeds the certified sector angle");
}

}  // namespace

ContourSpec power_contour(const Matrix& a, Complex z) {
  const SpectrumInfo info = spectrum_info(a);
  require_invertible_sectorial(info);
  ContourSpec spec;
  spec.theta = 0.5 * (kPi - info.max_abs_arg);
  spec.rho = 0.5 * info.min_modulus;
  spec.R = 1e6 * std::max(1.0, info.max_modulus);
  spec.n_arc = 32;
  spec.n_ray = spec.order * geometric_panels(spec.rho, spec.R);
  spec.tail_exponent = z - 1.0;
  return spec;
}

PowerResult complex_power(const MatrixOperator& a, Complex z, const ContourSpec& spec) {
  if (!is_finite(z)) fail(Errc::invalid_argument, "exponent must be finite");
  if (z == Complex(0.0)) return {Matrix::Identity(a.dim(), a.dim()), 0.0, 0};
  if (!(z.real() < 0.0)) fail(Errc::invalid_argument, "complex_power needs Re z < 0");
  check_certified_angle(a, spec.theta);
  const Matrix& m = a.matrix();
  auto r = dunford(spec, [&](Complex lam) -> Matrix { return std::pow(-lam, z) * ShiftedLU(m, lam).inverse(); });
  return {std::move(r.value), r.tail_estimate, r.nodes};
}

Matrix complex_power(const MatrixOperator& a, Complex z) {
  if (z == Complex(0.0)) return Matrix::Identity(a.dim(), a.dim());
  ContourSpec spec = power_contour(a.matrix(), z);
  if (a.certified()) spec.theta = std::min(spec.theta, a.certified()->theta);
  return complex_power(a, z, spec).value;
}

double imaginary_power_prefactor(double t) {
  const double x = kPi * t;
  if (std::abs(x) < 1e-4) return 1.0 + x * x / 6.0;
  return std::sinh(x) / x;
}

ImaginaryPowerTable::ImaginaryPowerTable(const MatrixOperator& a, const ImaginaryPowerOptions& opts) {
  const SpectrumInfo info = spectrum_info(a.matrix());
  require_invertible_sectorial(info);
  if (opts.order < 1 || !(opts.max_panel_width > 0.0) || !(opts.margin > 0.0) || !(opts.max_frequency >= 0.0))
    fail(Errc::invalid_argument, "invalid imaginary-power options");
  const double lo = std::log(info.min_modulus) - opts.margin;
  const double hi = std::log(info.max_modulus) + opts.margin;
  // poles of the s-integrand sit at distance pi - |arg| from the real axis
  double width = std::min(opts.max_panel_width, 0.5 * (kPi - info.max_abs_arg));
  if (opts.max_frequency > 0.0) width = std::min(width, 3.0 / opts.max_frequency);
  const int panels = static_cast<int>(std::ceil((hi - lo) / width));
  const auto rule = radial_rule(lo, hi, panels, opts.order, false);

  const Matrix& m = a.matrix();
  s_.resize(rule.size());
  w_.resize(rule.size());
  g_.resize(rule.size());
  parallel_for(rule.size(), [&](std::size_t j) {
    const double s = rule[j].first;
    const double lam = std::exp(s);
    const ShiftedLU lu(m, lam);
    s_[j] = s;
    w_[j] = rule[j].second;
    g_[j] = lu.solve(lu.solve(m)) * lam;  // dl = l ds
  });
}

Matrix ImaginaryPowerTable::unscaled(double t) const {
  if (!std::isfinite(t)) fail(Errc::invalid_argument, "t must be finite");
  std::vector<Matrix> terms(s_.size());
  for (std::size_t j = 0; j < s_.size(); ++j) terms[j] = (w_[j] * std::polar(1.0, t * s_[j])) * g_[j];
  return pairwise_sum(terms, Matrix());
}

Matrix ImaginaryPowerTable::at(double t) const { return imaginary_power_prefactor(t) * unscaled(t); }

Matrix imaginary_power(const MatrixOperator& a, double t, const ImaginaryPowerOptions& opts) {
  if (t == 0.0) return Matrix::Identity(a.dim(), a.dim());
  return ImaginaryPowerTable(a, opts).at(t);
}

BipFit bip_fit(const MatrixOperator& a, double t_max, int n_t, const ImaginaryPowerOptions& opts) {
  if (!(t_max > 0.0) || n_t < 2) fail(Errc::invalid_argument, "bip_fit needs t_max > 0 and n_t >= 2");
  const ImaginaryPowerTable table(a, opts);
  BipFit fit;
  fit.t_grid.resize(static_cast<std::size_t>(n_t));
  fit.norms.resize(static_cast<std::size_t>(n_t));
  for (int j = 0; j < n_t; ++j) fit.t_grid[static_cast<std::size_t>(j)] = -t_max + 2.0 * t_max * j / (n_t - 1);
  parallel_for(fit.t_grid.size(), [&](std::size_t j) {
    const double t = fit.t_grid[j];
    fit.norms[j] = t == 0.0 ? 1.0 : operator_norm(table.at(t));
  });

  // the bound is symmetric in t, so fit the envelope max(||A^{it}||, ||A^{-it}||)
  const std::size_t n = fit.t_grid.size();
  std::vector<double> envelope(n);
  for (std::size_t j = 0; j < n; ++j) envelope[j] = std::log(std::max(fit.norms[j], fit.norms[n - 1 - j]));
  double mx = 0.0, my = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    mx += std::abs(fit.t_grid[j]);
    my += envelope[j];
  }
  mx /= n_t;
  my /= n_t;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double dx = std::abs(fit.t_grid[j]) - mx;
    sxx += dx * dx;
    sxy += dx * (envelope[j] - my);
  }
  fit.phi = sxx > 0.0 ? std::max(0.0, sxy / sxx) : 0.0;
  fit.M = 1.0;
  for (std::size_t j = 0; j < fit.t_grid.size(); ++j)
    fit.M = std::max(fit.M, fit.norms[j] * std::exp(-fit.phi * std::abs(fit.t_grid[j])));
  return fit;
}

Json to_json(const BipFit& fit) {
  return {{"M", fit.M}, {"phi", fit.phi}, {"t_grid", fit.t_grid}, {"norms", fit.norms}};
}

double decay_bound(const DecayClass& cls, double r) {
  if (cls.kind == DecayKind::h0_infinity) return cls.c * std::pow(r / (1.0 + r * r), cls.eta);
  return cls.c * std::pow(r, cls.eta) / (1.0 + r);
}

std::vector<std::string> builtin_symbol_names() { return {"sqrt-over-1minus", "cayley-squared", "rational-eta"}; }

HolomorphicSymbol builtin_symbol(std::string_view name, double theta) {
  if (!(theta > 0.0 && theta < kPi)) fail(Errc::invalid_argument, "symbol angle must lie in (0, pi)");
  constexpr double kSlack = 1.01;
  // sup over |arg l| >= theta of (1+|l|^2)/|1-l|^2, attained at |l| = 1
  const double near_one = std::max(1.0, 1.0 / (1.0 - std::cos(theta)));
  HolomorphicSymbol f;
  f.name = std::string(name);
  f.theta = theta;
  if (name == "sqrt-over-1minus") {
    f.eval = [](Complex l) { return std::sqrt(-l) / (1.0 - l); };
    f.decay = {DecayKind::extended, kSlack / std::sin(0.5 * theta), 0.5};
    f.tail_exponent = Complex(-1.5);
  } else if (name == "cayley-squared") {
    f.eval = [](Complex l) { return -l / ((1.0 - l) * (1.0 - l)); };
    f.decay = {DecayKind::h0_infinity, kSlack * near_one, 1.0};
    f.tail_exponent = Complex(-2.0);
  } else if (name == "rational-eta") {
    static constexpr double eta = 1.0 / 3.0;
    f.eval = [](Complex l) { return std::pow(-l, eta) / std::pow(1.0 - l, 2.0 * eta); };
    f.decay = {DecayKind::h0_infinity, kSlack * std::pow(near_one, eta), eta};
    f.tail_exponent = Complex(-1.0 - eta);
  } else {
    fail(Errc::invalid_argument, "unknown symbol '" + std::string(name) + "'");
  }
  return f;
}

std::vector<Complex> off_sector_samples(double theta, const SymbolSampling& s) {
  if (s.radii < 2 || s.angles < 2 || !(s.r_min > 0.0) || !(s.r_max > s.r_min))
    fail(Errc::invalid_argument, "invalid symbol sampling");
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(2 * s.radii * s.angles));
  const double a = std::log(s.r_min), b = std::log(s.r_max);
  for (int i = 0; i < s.radii; ++i) {
    const double r = std::exp(a + (b - a) * i / (s.radii - 1));
    for (int j = 0; j < s.angles; ++j) {
      const double ang = theta + (kPi - theta) * j / (s.angles - 1);
      out.push_back(std::polar(r, ang));
      if (j + 1 < s.angles) out.push_back(std::polar(r, -ang));
    }
  }
  return out;
}

CertificateReport symbol_class_check(const HolomorphicSymbol& f, const SymbolSampling& sampling) {
  if (!f.eval) fail(Errc::invalid_argument, "symbol has no evaluator");
  double worst = 0.0;
  Complex worst_at{};
  const auto zs = off_sector_samples(f.theta, sampling);
  for (Complex l : zs) {
    const Complex v = f.eval(l);
    if (!is_finite(v)) fail(Errc::class_violated, "symbol is not finite off the sector", l);
    const double ratio = std::abs(v) / decay_bound(f.decay, std::abs(l));
    if (ratio > 1.0 + 1e-9) fail(Errc::class_violated, "decay bound exceeded (ratio " + std::to_string(ratio) + ")", l);
    if (ratio > worst) {
      worst = ratio;
      worst_at = l;
    }
  }
  auto report = make_report("symbol-class-check",
                            {{"symbol", f.name},
                             {"theta", f.theta},
                             {"class", f.decay.kind == DecayKind::h0_infinity ? "H0inf" : "extended"},
                             {"c", f.decay.c},
                             {"eta", f.decay.eta},
                             {"sampling",
                              {{"radii", sampling.radii}, {"angles", sampling.angles},
                               {"r_min", sampling.r_min}, {"r_max", sampling.r_max}}}});
  report.node_counts["samples"] = static_cast<long long>(zs.size());
  report.outputs = {{"worst_ratio", worst}, {"worst_at", complex_to_json(worst_at)}, {"margin", 1.0 - worst}};
  report.pass = true;
  return report;
}

double sampled_sup(const HolomorphicSymbol& f, const SymbolSampling& sampling) {
  double sup = 0.0;
  for (Complex l : off_sector_samples(f.theta, sampling)) sup = std::max(sup, std::abs(f.eval(l)));
  return sup;
}

ContourSpec hinf_contour(const Matrix& a, const HolomorphicSymbol& f) {
  const SpectrumInfo info = spectrum_info(a);
  require_invertible_sectorial(info);
  if (!(info.max_abs_arg < kPi - f.theta)) fail(Errc::invalid_argument, "-sigma(A) is not inside the symbol's contour");
  ContourSpec spec;
  spec.theta = f.theta;
  spec.rho = 0.0;
  spec.r_inner = 1e-10 * std::min(1.0, info.min_modulus);
  spec.R = 1e6 * std::max(1.0, info.max_modulus);
  spec.n_ray = spec.order * (1 + geometric_panels(spec.r_inner, spec.R));
  spec.tail_exponent = f.tail_exponent;
  return spec;
}

PowerResult hinf_apply(const HolomorphicSymbol& f, const MatrixOperator& a, const ContourSpec& spec) {
  if (a.certified() && !(a.certified()->theta > spec.theta))
    fail(Errc::invalid_argument, "operator must be certified at an angle above the contour angle");
  if (spec.theta < f.theta) fail(Errc::invalid_argument, "contour angle is below the symbol's sector angle");
  HolomorphicSymbol at_contour = f;
  at_contour.theta = spec.theta;
  symbol_class_check(at_contour, SymbolSampling{41, 9});
  const Matrix& m = a.matrix();
  auto r = dunford(spec, [&](Complex lam) -> Matrix { return f.eval(lam) * ShiftedLU(m, lam).inverse(); });
  return {std::move(r.value), r.tail_estimate, r.nodes};
}

Matrix hinf_apply(const HolomorphicSymbol& f, const MatrixOperator& a) {
  return hinf_apply(f, a, hinf_contour(a.matrix(), f)).value;
}

HinfEstimate hinf_constant(const MatrixOperator& a, double theta, const std::vector<HolomorphicSymbol>& family) {
  if (family.empty()) fail(Errc::invalid_argument, "symbol family is empty");
  HinfEstimate est;
  for (const auto& member : family) {
    if (member.theta > theta) fail(Errc::invalid_argument, "family member is not holomorphic off the sector");
    HolomorphicSymbol f = member;
    f.theta = theta;
    symbol_class_check(f);
    const double value = operator_norm(hinf_apply(f, a));
    const double sup = sampled_sup(f);
    est.ratios.push_back(value / sup);
    est.c_hat = std::max(est.c_hat, value / sup);
  }
  return est;
}

}  // namespace sectorsum
