#pragma once

// T-sectoriality on a uniform t-grid: the trigonometric resolvent sums, a
// searchable family of unimodular multipliers, the Parseval check for normal
// operators, the real-line resolvent representations built from imaginary
// powers, and the periodic Hilbert transform.

#include <optional>
#include <string>
#include <vector>

#include "sectorsum/calculus.hpp"

namespace sectorsum {

/// Coefficients x_0..x_n sampled on t_j = 2 pi j / n_t. `frequency` m turns
/// e^{ikt} into e^{imkt}.
struct TrigPolynomial {
  std::vector<Vector> coefficients;
  int n_t = 64;
  double p = 2.0;
  int frequency = 1;

  int degree() const { return static_cast<int>(coefficients.size()) - 1; }
  std::vector<double> grid() const;
};

/// Requires p >= 1, at least one coefficient of a common size and
/// n_t >= 4 (m n + 1).
void validate(const TrigPolynomial& poly);

/// Trapezoid L^p(0, 2 pi) norm of grid samples.
double lp_norm(const std::vector<Vector>& samples, double p);

/// Samples of sum_k e^{imkt} (I + r e^{-k + i phi} A)^{-1} x_k.
std::vector<Vector> resolvent_sum_samples(const MatrixOperator& a, double phi, double r, const TrigPolynomial& poly);

/// L^p norm of the resolvent sum. Requires r in [1/e, 1] and |phi| within
/// the certified angle when there is one.
double lhs_norm(const MatrixOperator& a, double phi, double r, const TrigPolynomial& poly);

enum class FamilyKind { pure_harmonics, piecewise_constant, proof_derived };

struct MultiplierFamily {
  FamilyKind kind = FamilyKind::pure_harmonics;
  int segments = 4;  // piecewise_constant only: 4 or 8
};

FamilyKind family_kind_from_string(const std::string& name);
std::string to_string(FamilyKind kind);

/// One member: a_k(t) at the grid, plus a JSON description of its parameters.
struct Multiplier {
  std::vector<std::vector<Complex>> values;  // [k][j]
  Json parameters;
};

/// Every member has |a_k(t)| = 1 on the grid.
std::vector<Multiplier> family_members(const MultiplierFamily& family, const TrigPolynomial& poly);

struct TSectorReport {
  double c_hat = 0.0;
  Json witness;
  double lhs = 0.0;
  double denominator = 0.0;
  double grid_error = 0.0;  // |lhs(n_t) - lhs(2 n_t)|
  std::size_t members = 0;
  double phi = 0.0;
  double r = 1.0;
  double p = 2.0;
  int n = 0;
  int n_t = 0;
  MultiplierFamily family;
};

Json to_json(const TSectorReport& report);

/// Smallest lhs_norm / ||sum a_k x_k||_p over the family.
TSectorReport witness_search(const MatrixOperator& a, double phi, double r, const TrigPolynomial& poly,
                             const MultiplierFamily& family);

/// For normal A and p = 2: lhs^2 <= K^2 ||sum e^{ikt} x_k||^2 with both sides
/// by Parseval and K from certify_sector at |phi|.
CertificateReport parseval_tsector_check(const MatrixOperator& a, double phi, double r, const TrigPolynomial& poly);

struct RepresentationOptions {
  double tol_tail = 1e-10;
  std::optional<double> cutoff;  // derived from the fit when absent
  int n_nodes = 512;
};

struct RepresentationResult {
  Vector value;
  double cutoff = 0.0;
  double error_estimate = 0.0;
  std::size_t nodes = 0;
};

/// log(M / tol) / (pi - phi - |theta|).
double representation_cutoff(const BipFit& fit, double theta, double tol_tail);

/// (I + rho A)^{-1} x = 1/2 x + (1/2 pi i) PV int (rho A)^{-is} pi / sinh(pi s) x ds.
RepresentationResult resolvent_rep_real(const MatrixOperator& a, const BipFit& fit, double rho, const Vector& x,
                                        const RepresentationOptions& opts = {});

/// (I + rho e^{i theta} A)^{-1} x as the real-line value plus
/// (1/2 pi i) int (rho A)^{-is} pi (e^{theta s} - 1) / sinh(pi s) x ds.
RepresentationResult resolvent_rep_rotated(const MatrixOperator& a, const BipFit& fit, double rho, double theta,
                                           const Vector& x, const RepresentationOptions& opts = {});

/// Periodic conjugate function: harmonic k -> -i sgn(k); the mean and the
/// Nyquist harmonic map to 0. Requires an even sample count.
Vector discrete_hilbert(const Vector& f);

/// int ||A^{-is}|| |pi (e^{theta s} - 1) / sinh(pi s)| (1 + |s|) ds.
double rotation_transference(const MatrixOperator& a, const BipFit& fit, double theta,
                             const RepresentationOptions& opts = {});

/// The four pieces of the rotated representation (smoothed kernel, PV on
/// [-pi, pi], half term, rotation) assembled into t-grid functions; passes
/// when their L^p norms dominate lhs_norm(A, theta, r, poly).
CertificateReport bip_tsector_bound_assembly(const MatrixOperator& a, const BipFit& fit, double theta, double r,
                                             const TrigPolynomial& poly, const RepresentationOptions& opts = {});

}  // namespace sectorsum
