#pragma once

// Persisted certification records and their field-wise comparison.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sectorsum/linops.hpp"

namespace sectorsum {

using Json = nlohmann::json;

inline constexpr std::uint64_t kDefaultSeed = 0x5EC7'0A11'2024'0001ULL;

struct CertificateReport {
  std::string run_id;
  std::string operation;
  std::string inputs_digest;
  Json inputs = Json::object();
  std::map<std::string, double> tolerances;
  std::map<std::string, long long> node_counts;
  Json outputs = Json::object();
  bool pass = false;
  std::uint64_t seed = kDefaultSeed;

  friend bool operator==(const CertificateReport&, const CertificateReport&) = default;
};

/// Builds a report whose digest and run id are derived from `inputs`.
CertificateReport make_report(std::string operation, Json inputs);

/// FNV-1a (64 bit) of the canonical (sorted-key, compact) dump, as hex.
std::string digest(const Json& value);

Json to_json(const CertificateReport& report);
CertificateReport report_from_json(const Json& j);

/// File layout: {"report": {...}, "envelope": {"timestamp": ...}}. The
/// envelope is the only part that varies between identical runs.
std::string serialize_report(const CertificateReport& report,
                             std::optional<std::string> timestamp = std::nullopt);
CertificateReport parse_report(const std::string& text);
void save_report(const std::string& path, const CertificateReport& report);
CertificateReport load_report(const std::string& path);

struct FieldDiff {
  std::string field;
  double a = 0.0;
  double b = 0.0;
  double abs_diff = 0.0;
  double tolerance = 0.0;
  bool within = true;
};

struct ReportDiff {
  std::string operation;
  std::vector<FieldDiff> numeric;
  std::vector<std::string> mismatched;  // non-numeric fields that differ or exist on one side only
  bool all_within = true;
};

/// Compares every numeric leaf of inputs/outputs/tolerances/node_counts.
/// A field passes when |a-b| <= tol * max(1, |a|, |b|); `field_tolerances`
/// overrides `default_tolerance` per flattened path (e.g. "outputs.k_hat").
ReportDiff report_diff(const CertificateReport& a, const CertificateReport& b,
                       double default_tolerance = 0.0,
                       const std::map<std::string, double>& field_tolerances = {});
Json to_json(const ReportDiff& diff);

// JSON helpers for numeric payloads.
Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j);
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

}  // namespace sectorsum
