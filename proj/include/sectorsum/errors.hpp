#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sectorsum {

enum class Errc {
  invalid_argument,
  dimension_mismatch,
  parse_error,
  singular_shift,
  overflow_risk,
  not_sectorial_at_angle,
  extension_violated,
  unbounded_suspected,
  invalid_contour,
  truncation_not_converged,
  asymmetry_detected,
  class_violated,
  denominator_degenerate,
  angle_out_of_range,
  bound_violated,
  invalid_recipe,
  config_invalid,
  incompatible_reports,
};

std::string_view to_string(Errc code) noexcept;

/// Library-wide exception. `where()` carries the offending point in the
/// complex plane for the shift/sector/contour failures that have one.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message,
        std::optional<std::complex<double>> where = std::nullopt);

  Errc code() const noexcept { return code_; }
  const std::optional<std::complex<double>>& where() const noexcept { return where_; }

 private:
  Errc code_;
  std::optional<std::complex<double>> where_;
};

[[noreturn]] void fail(Errc code, const std::string& message,
                       std::optional<std::complex<double>> where = std::nullopt);

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(Errc::invalid_argument, message);
}

}  // namespace sectorsum
