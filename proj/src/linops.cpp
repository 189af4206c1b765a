#include "sectorsum/linops.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace sectorsum {

ShiftedLU::ShiftedLU(const Matrix& m, Complex z) : z_(z) {
  require_square(m, "shifted solve operator");
  if (!m.allFinite() || !is_finite(z)) fail(Errc::invalid_argument, "shifted solve: non-finite input");
  Matrix shifted = m;
  shifted.diagonal().array() += z;
  const double scale = shifted.cwiseAbs().rowwise().sum().maxCoeff();
  lu_.compute(shifted);
  const double pivot = lu_.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (pivot <= kSingularPivot * scale)
    fail(Errc::singular_shift, "M + zI is numerically singular (pivot " + std::to_string(pivot) + ")", z);
}

Vector ShiftedLU::solve(const Vector& rhs) const {
  if (rhs.size() != lu_.rows()) fail(Errc::dimension_mismatch, "right-hand side size does not match operator");
  return lu_.solve(rhs);
}

Matrix ShiftedLU::solve(const Matrix& rhs) const {
  if (rhs.rows() != lu_.rows()) fail(Errc::dimension_mismatch, "right-hand side rows do not match operator");
  return lu_.solve(rhs);
}

Matrix ShiftedLU::inverse() const { return lu_.inverse(); }

Vector solve_shifted(const Matrix& m, Complex z, const Vector& rhs) {
  if (rhs.size() != m.rows()) fail(Errc::dimension_mismatch, "right-hand side size does not match operator");
  return ShiftedLU(m, z).solve(rhs);
}

Matrix shifted_inverse(const Matrix& m, Complex z) { return ShiftedLU(m, z).inverse(); }

Matrix matrix_exp(const Matrix& m, double scaling_budget) {
  require_square(m, "matrix_exp argument");
  if (!m.allFinite()) fail(Errc::invalid_argument, "matrix_exp: non-finite entries");
  const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 == 0.0) return Matrix::Identity(m.rows(), m.cols());
  if (norm1 > scaling_budget)
    fail(Errc::overflow_risk, "matrix_exp: norm " + std::to_string(norm1) + " exceeds scaling budget");
  Matrix result = m.exp();
  if (!result.allFinite()) fail(Errc::overflow_risk, "matrix_exp: result overflowed");
  return result;
}

std::string format_complex(Complex z) {
  if (!is_finite(z)) fail(Errc::invalid_argument, "cannot serialize a non-finite entry");
  char buf[80];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
  return buf;
}

Complex parse_complex(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (text.empty()) fail(Errc::parse_error, "empty matrix entry");
  auto to_double = [&](std::string_view s) {
    std::string tmp(s);
    if (tmp == "+" || tmp.empty()) return 1.0;
    if (tmp == "-") return -1.0;
    char* end = nullptr;
    double v = std::strtod(tmp.c_str(), &end);
    if (end != tmp.c_str() + tmp.size()) fail(Errc::parse_error, "malformed number '" + tmp + "'");
    return v;
  };
  Complex z;
  if (text.back() != 'i') {
    z = {to_double(text), 0.0};
  } else {
    std::string_view body = text.substr(0, text.size() - 1);
    std::size_t split = std::string_view::npos;
    for (std::size_t i = body.size(); i-- > 1;) {
      if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
        split = i;
        break;
      }
    }
    if (split == std::string_view::npos)
      z = {0.0, to_double(body)};
    else
      z = {to_double(body.substr(0, split)), to_double(body.substr(split))};
  }
  if (!is_finite(z)) fail(Errc::parse_error, "non-finite matrix entry '" + std::string(text) + "'");
  return z;
}

void write_matrix_csv(std::ostream& os, const Matrix& m) {
  require_square(m, "serialized matrix");
  os << m.rows() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << format_complex(m(i, j));
    }
    os << '\n';
  }
}

Matrix read_matrix_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) fail(Errc::parse_error, "missing dimension line");
  long n = 0;
  try {
    std::size_t used = 0;
    n = std::stol(line, &used);
    if (line.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    fail(Errc::parse_error, "dimension line must be a positive integer");
  }
  if (n <= 0) fail(Errc::parse_error, "dimension must be positive");
  Matrix m(n, n);
  for (long i = 0; i < n; ++i) {
    if (!std::getline(is, line)) fail(Errc::parse_error, "expected " + std::to_string(n) + " rows");
    std::stringstream row(line);
    std::string cell;
    long j = 0;
    while (std::getline(row, cell, ',')) {
      if (j >= n) fail(Errc::parse_error, "row " + std::to_string(i) + " has too many entries");
      m(i, j++) = parse_complex(cell);
    }
    if (j != n) fail(Errc::parse_error, "row " + std::to_string(i) + " has " + std::to_string(j) + " entries");
  }
  return m;
}

void save_matrix(const std::string& path, const Matrix& m) {
  std::ofstream os(path);
  if (!os) fail(Errc::invalid_argument, "cannot open '" + path + "' for writing");
  write_matrix_csv(os, m);
}

Matrix load_matrix(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(Errc::invalid_argument, "cannot open '" + path + "'");
  return read_matrix_csv(is);
}

}  // namespace sectorsum
