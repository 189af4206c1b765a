#pragma once

// Functional calculus on sectorial matrices: complex and imaginary powers,
// growth fits for imaginary powers, decaying symbols and f(-A).

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "sectorsum/contour.hpp"
#include "sectorsum/sector.hpp"

namespace sectorsum {

/// Eigenvalue summary used to place contours.
struct SpectrumInfo {
  double min_modulus = 0.0;
  double max_modulus = 0.0;
  double max_abs_arg = 0.0;  // largest |arg| over the spectrum
};
SpectrumInfo spectrum_info(const Matrix& a);

/// Default path for A^z: rho = min|eig|/2, angle halfway between the branch
/// cut and -sigma(A), tail closure with exponent z - 1.
ContourSpec power_contour(const Matrix& a, Complex z);

struct PowerResult {
  Matrix value;
  double tail_estimate = 0.0;
  std::size_t nodes = 0;
};

/// A^z for Re z < 0 by the Dunford integral of (-l)^z (A+l)^{-1}; A^0 = I.
PowerResult complex_power(const MatrixOperator& a, Complex z, const ContourSpec& spec);
Matrix complex_power(const MatrixOperator& a, Complex z);

struct ImaginaryPowerOptions {
  int order = 8;
  double max_panel_width = 0.5;  // in s = log(l)
  double margin = 40.0;          // s-range beyond the spectral log-moduli
  double max_frequency = 0.0;    // largest |t| to resolve; narrows panels to 3 / max_frequency
};

/// Precomputed nodes of the real-axis formula
///   A^{it} = sinh(pi t)/(pi t) * int_0^inf l^{it} (A+l)^{-2} A dl
/// in the variable s = log l, so A^{it} for many t costs one weighted sum each.
class ImaginaryPowerTable {
 public:
  explicit ImaginaryPowerTable(const MatrixOperator& a, const ImaginaryPowerOptions& opts = {});

  Matrix at(double t) const;
  /// The integral without the sinh(pi t)/(pi t) factor. Callers that divide
  /// by sinh(pi t) anyway avoid its exponential amplification of round-off.
  Matrix unscaled(double t) const;
  std::size_t nodes() const noexcept { return s_.size(); }

 private:
  std::vector<double> s_;
  std::vector<double> w_;
  std::vector<Matrix> g_;  // (A+l)^{-2} A l at l = e^s
};

Matrix imaginary_power(const MatrixOperator& a, double t, const ImaginaryPowerOptions& opts = {});

/// sinh(pi t)/(pi t), equal to 1 at t = 0.
double imaginary_power_prefactor(double t);

struct BipFit {
  double M = 1.0;
  double phi = 0.0;
  std::vector<double> t_grid;
  std::vector<double> norms;
};

/// Least-squares slope of log max(||A^{it}||, ||A^{-it}||) against |t| on n_t points of
/// [-t_max, t_max], clipped at 0; M is the smallest constant making the bound
/// hold at every sample.
BipFit bip_fit(const MatrixOperator& a, double t_max, int n_t, const ImaginaryPowerOptions& opts = {});
Json to_json(const BipFit& fit);

enum class DecayKind { h0_infinity, extended };

/// |f(l)| <= c (|l|/(1+|l|^2))^eta  (h0_infinity), or c |l|^eta/(1+|l|) (extended).
struct DecayClass {
  DecayKind kind = DecayKind::h0_infinity;
  double c = 1.0;
  double eta = 1.0;
};
double decay_bound(const DecayClass& cls, double modulus);

struct HolomorphicSymbol {
  std::string name;
  std::function<Complex(Complex)> eval;
  double theta = kPi / 2;  // f is holomorphic off the closed sector of this angle
  DecayClass decay;
  // integrand f(l)(A+l)^{-1} ~ |l|^k at infinity, used for the tail closure
  std::optional<Complex> tail_exponent;
};

std::vector<std::string> builtin_symbol_names();
HolomorphicSymbol builtin_symbol(std::string_view name, double theta);

struct SymbolSampling {
  int radii = 161;
  int angles = 33;  // per half-plane, spanning [theta, pi]
  double r_min = 1e-8;
  double r_max = 1e8;
};

/// Sample points of C \ sector(theta), both half planes, in a fixed order.
std::vector<Complex> off_sector_samples(double theta, const SymbolSampling& s);

/// Checks the declared decay inequality on the samples; ClassViolated at the
/// first offending point. The report carries the worst ratio |f|/bound.
CertificateReport symbol_class_check(const HolomorphicSymbol& f, const SymbolSampling& sampling = {});

/// Sampled sup of |f| off the sector.
double sampled_sup(const HolomorphicSymbol& f, const SymbolSampling& sampling = {});

/// Default path for f(-A): the two rays at angle theta (no arc).
ContourSpec hinf_contour(const Matrix& a, const HolomorphicSymbol& f);

PowerResult hinf_apply(const HolomorphicSymbol& f, const MatrixOperator& a, const ContourSpec& spec);
Matrix hinf_apply(const HolomorphicSymbol& f, const MatrixOperator& a);

struct HinfEstimate {
  double c_hat = 0.0;
  std::vector<double> ratios;  // ||f(-A)|| / sampled sup |f| per family member
};

/// Lower bound for the H-infinity constant of A over a symbol family.
HinfEstimate hinf_constant(const MatrixOperator& a, double theta, const std::vector<HolomorphicSymbol>& family);

}  // namespace sectorsum
