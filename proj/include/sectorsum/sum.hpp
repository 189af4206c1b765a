#pragma once

// Inverse of A + B for resolvent-commuting sectorial pairs via the contour
// formula K = (1/2 pi i) int (A - z)^{-1} (B + z)^{-1} dz, the weighted
// contour identities built on it, their split and e-adic forms, and
// closedness certificates.

#include <cstdint>
#include <optional>
#include <vector>

#include "sectorsum/calculus.hpp"

namespace sectorsum {

/// ||[(A+lambda)^{-1}, (B+mu)^{-1}]||.
double resolvent_commute_check(const Matrix& a, const Matrix& b, Complex lambda, Complex mu);

class CommutingPair {
 public:
  /// Requires theta_a + theta_b > pi, spectra outside the respective sectors
  /// of -A and -B, and commuting resolvents (checked at lambda = mu = 1) up
  /// to `commute_tolerance`.
  CommutingPair(MatrixOperator a, double theta_a, MatrixOperator b, double theta_b,
                double commute_tolerance = 1e-10);

  const MatrixOperator& a() const noexcept { return a_; }
  const MatrixOperator& b() const noexcept { return b_; }
  double theta_a() const noexcept { return theta_a_; }
  double theta_b() const noexcept { return theta_b_; }
  double commutator() const noexcept { return commutator_; }
  /// Smallest modulus over both spectra.
  double spectral_gap() const noexcept { return gap_; }
  double scale() const noexcept { return scale_; }
  /// The shift/narrowing used for Gamma_{theta_B}: 0.05 min(1, gap).
  double default_offset() const noexcept { return 0.05 * std::min(1.0, gap_); }

 private:
  MatrixOperator a_, b_;
  double theta_a_, theta_b_;
  double commutator_ = 0.0;
  double gap_ = 0.0;
  double scale_ = 0.0;
};

/// -delta + Gamma_{theta_B - eps}, rho = 0, tail exponent -2.
ContourSpec sum_contour(const CommutingPair& pair);

struct SumInverse {
  Matrix value;
  double residual_left = 0.0;   // ||K (A+B) - I||
  double residual_right = 0.0;  // ||(A+B) K - I||
  double tail_estimate = 0.0;
  std::size_t nodes = 0;
  ContourSpec spec;
};

SumInverse sum_inverse(const CommutingPair& pair, const ContourSpec& spec);
SumInverse sum_inverse(const CommutingPair& pair);

struct IdentityCheck {
  Matrix lhs;
  Matrix rhs;
  double diff = 0.0;
};

/// A K A^w against (1/2 pi i) int_{-Gamma_{rho,theta_A}} (A-l)^{-1} (B+l)^{-1} l^{1+w} dl.
IdentityCheck weighted_identity_left(const CommutingPair& pair, Complex w);
/// A K B^w against B^w - (1/2 pi i) int_{Gamma_{rho,theta_B}} (A-l)^{-1} (B+l)^{-1} (-l)^{1+w} dl.
IdentityCheck weighted_identity_right(const CommutingPair& pair, Complex w);

/// Path for the left contour integral (-Gamma_{rho,theta_A}) and for the right one.
ContourSpec identity_contour_left(const CommutingPair& pair, Complex w);
ContourSpec identity_contour_right(const CommutingPair& pair, Complex w);

enum class SplitVariant {
  left,   // A^phi (A-l)^{-1} (B+l)^{-1} l^{1+w} over -Gamma_{theta_A}
  right,  // -(A-l)^{-1} B^phi (B+l)^{-1} (-l)^{1+w} over Gamma_{theta_B - eps}
};

struct SplitPieces {
  Matrix inner;   // |l| <= 1
  Matrix middle;  // 1 < |l| < e^n
  Matrix tail;    // |l| >= e^n
  Matrix total;       // pieces (plus B^{-theta+it} for the right variant)
  Matrix reference;   // A^phi * left rhs(w), or B^phi * right rhs(w)
  double diff = 0.0;
};

struct SplitOptions {
  int panels_per_band = 4;  // uniform panels on each [e^k, e^{k+1}]
  double inner_floor = 1e-12;
};

/// Weighted integrand at w = -(theta + phi) + it split by modulus.
SplitPieces split_integral_eval(const CommutingPair& pair, double theta, double phi, double t, int n,
                                SplitVariant variant = SplitVariant::right, const SplitOptions& opts = {});

/// k-th term of the e-adic form of the right middle piece:
/// middle = sum_k scale_k * operator_k with scale_k = e^{(1-theta)k} e^{ikt}.
struct EadicSummand {
  Complex scale;
  Matrix op;
};
EadicSummand eadic_summand(const CommutingPair& pair, double theta, double phi, double t, int k,
                           const SplitOptions& opts = {});

/// Right middle piece by summing e-adic terms over k = 0..n-1.
Matrix eadic_middle_eval(const CommutingPair& pair, double theta, double phi, double t, int n,
                         const SplitOptions& opts = {});

struct ClosednessCertificate {
  double c_ab = 0.0;          // max over probes of ||A K v|| / ||v||
  std::size_t probe_count = 0;
  double residual_k = 0.0;    // max of both inverse residuals
  std::vector<double> theta_grid;
  std::vector<double> theta_values;  // max over probes of ||A K B^{-theta} u|| / ||u||
  double theta_sup = 0.0;
  std::uint64_t seed = 0;
  ContourSpec spec;
};

/// Canonical basis plus `random_count` unit vectors drawn with `seed`.
std::vector<Vector> default_probes(Eigen::Index n, std::uint64_t seed, int random_count = 16);

ClosednessCertificate closedness_certificate(const CommutingPair& pair, const std::vector<Vector>& probes,
                                             const std::vector<double>& theta_grid, std::uint64_t seed = 0);

}  // namespace sectorsum
