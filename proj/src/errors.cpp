#include "sectorsum/errors.hpp"

#include <sstream>

namespace sectorsum {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::parse_error: return "ParseError";
    case Errc::singular_shift: return "SingularShift";
    case Errc::overflow_risk: return "OverflowRisk";
    case Errc::not_sectorial_at_angle: return "NotSectorialAtAngle";
    case Errc::extension_violated: return "ExtensionViolated";
    case Errc::unbounded_suspected: return "UnboundedSuspected";
    case Errc::invalid_contour: return "InvalidContour";
    case Errc::truncation_not_converged: return "TruncationNotConverged";
    case Errc::asymmetry_detected: return "AsymmetryDetected";
    case Errc::class_violated: return "ClassViolated";
    case Errc::denominator_degenerate: return "DenominatorDegenerate";
    case Errc::angle_out_of_range: return "AngleOutOfRange";
    case Errc::bound_violated: return "BoundViolated";
    case Errc::invalid_recipe: return "InvalidRecipe";
    case Errc::config_invalid: return "ConfigInvalid";
    case Errc::incompatible_reports: return "IncompatibleReports";
  }
  return "Unknown";
}

namespace {
std::string compose(Errc code, const std::string& message,
                    const std::optional<std::complex<double>>& where) {
  std::ostringstream os;
  os << to_string(code) << ": " << message;
  if (where) os << " (at z = " << where->real() << (where->imag() < 0 ? "" : "+") << where->imag() << "i)";
  return os.str();
}
}  // namespace

Error::Error(Errc code, const std::string& message, std::optional<std::complex<double>> where)
    : std::runtime_error(compose(code, message, where)), code_(code), where_(where) {}

void fail(Errc code, const std::string& message, std::optional<std::complex<double>> where) {
  throw Error(code, message, where);
}

}  // namespace sectorsum
