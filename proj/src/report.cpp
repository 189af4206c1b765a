#include "sectorsum/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

namespace sectorsum {

std::string digest(const Json& value) {
  const std::string text = value.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

CertificateReport make_report(std::string operation, Json inputs) {
  CertificateReport r;
  r.operation = std::move(operation);
  r.inputs = std::move(inputs);
  r.inputs_digest = digest(r.inputs);
  r.run_id = r.operation + "-" + r.inputs_digest.substr(0, 12);
  return r;
}

Json to_json(const CertificateReport& r) {
  return Json{{"run_id", r.run_id},         {"operation", r.operation},
              {"inputs_digest", r.inputs_digest}, {"inputs", r.inputs},
              {"tolerances", r.tolerances}, {"node_counts", r.node_counts},
              {"outputs", r.outputs},       {"pass", r.pass},
              {"seed", r.seed}};
}

CertificateReport report_from_json(const Json& j) {
  try {
    CertificateReport r;
    r.run_id = j.at("run_id").get<std::string>();
    r.operation = j.at("operation").get<std::string>();
    r.inputs_digest = j.at("inputs_digest").get<std::string>();
    r.inputs = j.at("inputs");
    r.tolerances = j.at("tolerances").get<std::map<std::string, double>>();
    r.node_counts = j.at("node_counts").get<std::map<std::string, long long>>();
    r.outputs = j.at("outputs");
    r.pass = j.at("pass").get<bool>();
    r.seed = j.at("seed").get<std::uint64_t>();
    return r;
  } catch (const Json::exception& e) {
    fail(Errc::parse_error, std::string("malformed report: ") + e.what());
  }
}

namespace {
std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}
}  // namespace

std::string serialize_report(const CertificateReport& report, std::optional<std::string> timestamp) {
  Json file{{"report", to_json(report)}, {"envelope", {{"timestamp", timestamp.value_or(utc_now())}}}};
  return file.dump(2) + "\n";
}

CertificateReport parse_report(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    fail(Errc::parse_error, std::string("report is not valid JSON: ") + e.what());
  }
  return report_from_json(j.contains("report") ? j.at("report") : j);
}

void save_report(const std::string& path, const CertificateReport& report) {
  std::ofstream os(path);
  if (!os) fail(Errc::invalid_argument, "cannot open '" + path + "' for writing");
  os << serialize_report(report);
}

CertificateReport load_report(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(Errc::invalid_argument, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_report(ss.str());
}

namespace {

void flatten(const Json& j, const std::string& prefix, std::map<std::string, Json>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out[prefix] = j;
  }
}

}  // namespace

ReportDiff report_diff(const CertificateReport& a, const CertificateReport& b, double default_tolerance,
                       const std::map<std::string, double>& field_tolerances) {
  if (a.operation != b.operation)
    fail(Errc::incompatible_reports, "cannot compare '" + a.operation + "' with '" + b.operation + "'");
  auto payload = [](const CertificateReport& r) {
    return Json{{"inputs", r.inputs},
                {"outputs", r.outputs},
                {"tolerances", r.tolerances},
                {"node_counts", r.node_counts},
                {"pass", r.pass}};
  };
  std::map<std::string, Json> fa, fb;
  flatten(payload(a), "", fa);
  flatten(payload(b), "", fb);

  ReportDiff diff;
  diff.operation = a.operation;
  for (const auto& [key, va] : fa) {
    auto it = fb.find(key);
    if (it == fb.end()) {
      diff.mismatched.push_back(key);
      continue;
    }
    const Json& vb = it->second;
    if (va.is_number() && vb.is_number() && !va.is_boolean()) {
      FieldDiff f;
      f.field = key;
      f.a = va.get<double>();
      f.b = vb.get<double>();
      f.abs_diff = std::abs(f.a - f.b);
      auto tol = field_tolerances.find(key);
      f.tolerance = tol == field_tolerances.end() ? default_tolerance : tol->second;
      f.within = f.abs_diff <= f.tolerance * std::max({1.0, std::abs(f.a), std::abs(f.b)});
      diff.all_within = diff.all_within && f.within;
      diff.numeric.push_back(f);
    } else if (va != vb) {
      diff.mismatched.push_back(key);
    }
  }
  for (const auto& [key, vb] : fb)
    if (!fa.count(key)) diff.mismatched.push_back(key);
  if (!diff.mismatched.empty()) diff.all_within = false;
  return diff;
}

Json to_json(const ReportDiff& diff) {
  Json fields = Json::array();
  double max_abs = 0.0;
  for (const auto& f : diff.numeric) {
    max_abs = std::max(max_abs, f.abs_diff);
    fields.push_back({{"field", f.field}, {"a", f.a}, {"b", f.b}, {"abs_diff", f.abs_diff},
                      {"tolerance", f.tolerance}, {"within", f.within}});
  }
  return Json{{"operation", diff.operation}, {"numeric", fields}, {"mismatched", diff.mismatched},
              {"max_abs_diff", max_abs}, {"all_within", diff.all_within}};
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  fail(Errc::parse_error, "complex value must be a number or [re, im]");
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) fail(Errc::parse_error, "matrix must be a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      fail(Errc::parse_error, "matrix rows must have length " + std::to_string(n));
    for (Eigen::Index k = 0; k < n; ++k) m(i, k) = complex_from_json(row[static_cast<std::size_t>(k)]);
  }
  return m;
}

}  // namespace sectorsum
