#pragma once

// Operator generators, report-producing pipelines shared by the CLI and the
// batch runner, and JSON experiment configs.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sectorsum/maxreg.hpp"
#include "sectorsum/sum.hpp"
#include "sectorsum/tsector.hpp"

namespace sectorsum {

enum class RecipeKind { diag_positive, diag_rotated, jordan, laplacian_1d, commuting_pair };

/// Parameters not used by a kind are ignored.
struct OperatorRecipe {
  RecipeKind kind = RecipeKind::diag_positive;
  std::vector<double> entries{1.0, 2.0, 3.0};  // diag-positive, diag-rotated
  double psi = 0.0;                            // diag-rotated
  Complex a = 2.0;                             // jordan
  int size = 2;                                // jordan, commuting-pair
  int m = 8;                                   // laplacian-1d
  std::uint64_t seed = kDefaultSeed;           // commuting-pair
};

RecipeKind recipe_kind_from_string(const std::string& name);
std::string to_string(RecipeKind kind);

/// Strict: unknown keys and wrong types raise InvalidRecipe.
OperatorRecipe recipe_from_json(const Json& j);
Json to_json(const OperatorRecipe& recipe);

/// diag-positive: diag(entries); diag-rotated: diag(e^{i psi} entries) with an
/// attached sector certificate; jordan: a single Jordan block;
/// laplacian-1d: (m+1)^2 tridiag(-1, 2, -1); commuting-pair: the A factor.
MatrixOperator generate(const OperatorRecipe& recipe);

/// A = V diag(a) V^{-1}, B = V diag(b) V^{-1} with a shared seeded basis V and
/// spectra within pi/6 of the positive axis.
std::pair<MatrixOperator, MatrixOperator> generate_pair(const OperatorRecipe& recipe);

/// 4 (m+1)^2 sin^2(k pi / (2 (m+1))), k = 1..m.
std::vector<double> laplacian_eigenvalues(int m);

// Pipelines. Each returns a report whose `pass` decides the exit code.
CertificateReport certify_pipeline(const MatrixOperator& a, double theta);
CertificateReport power_pipeline(const MatrixOperator& a, Complex z);
CertificateReport hinf_pipeline(const MatrixOperator& a, const std::string& symbol, double theta);

struct SumRequest {
  double theta_a = 0.0;
  double theta_b = 0.0;
  std::vector<Complex> identities;  // weights w for the identity checks
  bool certify = false;
  std::uint64_t seed = kDefaultSeed;
};
CertificateReport sum_pipeline(const MatrixOperator& a, const MatrixOperator& b, const SumRequest& request);

struct TSectorRequest {
  double phi = 0.0;
  double r = 1.0;
  double p = 2.0;
  int n = 1;
  int n_t = 64;
  MultiplierFamily family;
  std::uint64_t seed = kDefaultSeed;
};
/// Coefficients are seeded random unit vectors.
CertificateReport tsector_pipeline(const MatrixOperator& a, const TSectorRequest& request);

CertificateReport rep_check_pipeline(const MatrixOperator& a, double rho, double theta);

struct MaxRegRequest {
  TimeGrid grid;
  bool adversarial = true;
  bool sweep_p = false;
  int refine_levels = 1;
  std::uint64_t seed = kDefaultSeed;
};
CertificateReport maxreg_pipeline(const MatrixOperator& a, const MaxRegRequest& request);

/// Sweep CSV: header row plus one row per operator.
struct SweepResult {
  CertificateReport report;
  std::string csv;
};
SweepResult maxreg_sweep(const std::vector<OperatorRecipe>& recipes, const MaxRegRequest& request);

struct ExperimentResult {
  int exit_code = 0;  // 0 pass, 1 numeric failure, 2 config error
  std::optional<CertificateReport> report;
  std::vector<std::string> written;
  std::string message;
};

constexpr int kSchemaVersion = 1;

/// Validates the config (ConfigInvalid) and runs its pipeline.
CertificateReport run_config(const Json& config, std::string* csv = nullptr);

/// Runs a config file, writing <out_dir>/<run_id>.json (and .csv for sweeps).
/// Errors become exit codes instead of exceptions.
ExperimentResult run_experiment(const std::string& config_path, const std::string& out_dir);

/// Current UTC time in ISO 8601.
std::string utc_timestamp();

}  // namespace sectorsum
