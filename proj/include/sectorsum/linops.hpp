#pragma once

// Dense complex linear algebra substrate: shifted solves, spectral norms,
// matrix exponentials and the plain-text matrix file format.

#include <Eigen/Dense>

#include <complex>
#include <iosfwd>
#include <string>
#include <string_view>

#include "sectorsum/errors.hpp"

namespace sectorsum {

using Real = double;
using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

inline constexpr double kPi = 3.14159265358979323846;

/// Relative pivot threshold below which a shifted matrix counts as singular.
inline constexpr double kSingularPivot = 1e-13;
/// Largest dimension for which operator_norm uses a full SVD.
inline constexpr Eigen::Index kSvdCutoff = 64;
/// matrix_exp refuses arguments whose 1-norm exceeds this.
inline constexpr double kExpScalingBudget = 1e6;

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0)
    fail(Errc::dimension_mismatch, std::string(what) + " must be a non-empty square matrix");
}

/// LU factorization of M + zI with the singularity test applied once.
/// Cached per (operator, shift) by callers that re-use a shift inside one
/// integral.
class ShiftedLU {
 public:
  ShiftedLU(const Matrix& m, Complex z);

  Complex shift() const noexcept { return z_; }
  Eigen::Index dim() const noexcept { return lu_.rows(); }

  Vector solve(const Vector& rhs) const;
  Matrix solve(const Matrix& rhs) const;
  Matrix inverse() const;

 private:
  Eigen::PartialPivLU<Matrix> lu_;
  Complex z_;
};

/// x with (M + zI) x = rhs. Throws SingularShift / DimensionMismatch.
Vector solve_shifted(const Matrix& m, Complex z, const Vector& rhs);

/// (M + zI)^{-1}.
Matrix shifted_inverse(const Matrix& m, Complex z);

/// Spectral norm. Full SVD up to `svd_cutoff`, power iteration on the Gram
/// operator above it.
template <typename Derived>
typename Derived::RealScalar operator_norm(const Eigen::MatrixBase<Derived>& m,
                                           Eigen::Index svd_cutoff = kSvdCutoff) {
  using RealScalar = typename Derived::RealScalar;
  using Plain = typename Derived::PlainObject;
  if (!m.allFinite()) fail(Errc::invalid_argument, "operator_norm: non-finite entries");
  if (m.size() == 0) return RealScalar(0);
  if (std::max(m.rows(), m.cols()) <= svd_cutoff) {
    Eigen::JacobiSVD<Plain> svd(m.eval());
    return svd.singularValues()(0);
  }
  using Scalar = typename Derived::Scalar;
  DenseVector<Scalar> v = DenseVector<Scalar>::Ones(m.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) += Scalar(RealScalar(i % 7) * RealScalar(0.01));
  v.normalize();
  RealScalar estimate = 0;
  for (int it = 0; it < 2000; ++it) {
    DenseVector<Scalar> w = m.adjoint() * (m * v);
    RealScalar nw = w.norm();
    if (nw == RealScalar(0)) return RealScalar(0);
    RealScalar next = std::sqrt(nw);
    v = w / nw;
    if (it > 3 && std::abs(next - estimate) <= RealScalar(1e-15) * next) {
      estimate = next;
      break;
    }
    estimate = next;
  }
  return estimate;
}

/// Smallest singular value.
template <typename Derived>
typename Derived::RealScalar min_singular_value(const Eigen::MatrixBase<Derived>& m) {
  Eigen::JacobiSVD<typename Derived::PlainObject> svd(m.eval());
  return svd.singularValues()(svd.singularValues().size() - 1);
}

/// exp(M) by scaling and squaring (Pade 13). exp(0) is the identity exactly.
Matrix matrix_exp(const Matrix& m, double scaling_budget = kExpScalingBudget);

// ---- matrix file format -------------------------------------------------
// First line "n", then n rows of n comma-separated entries written "re±imi"
// with 17 significant digits, e.g. "1.5-0.25i".

std::string format_complex(Complex z);
Complex parse_complex(std::string_view text);

void write_matrix_csv(std::ostream& os, const Matrix& m);
Matrix read_matrix_csv(std::istream& is);
void save_matrix(const std::string& path, const Matrix& m);
Matrix load_matrix(const std::string& path);

}  // namespace sectorsum
