#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "sectorsum/harness.hpp"

using namespace sectorsum;

namespace {

constexpr int kNumericFailure = 1;
constexpr int kConfigError = 2;

int emit(const CertificateReport& report, const std::string& out_dir, const std::string& csv = {}) {
  const std::string text = serialize_report(report, utc_timestamp());
  if (out_dir.empty()) {
    std::cout << text << '\n';
  } else {
    std::filesystem::create_directories(out_dir);
    const auto base = (std::filesystem::path(out_dir) / report.run_id).string();
    std::ofstream(base + ".json") << text << '\n';
    if (!csv.empty()) std::ofstream(base + ".csv") << csv;
    std::cout << base << ".json\n";
  }
  return report.pass ? 0 : kNumericFailure;
}

MatrixOperator load(const std::string& path) { return MatrixOperator(load_matrix(path)); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sectorial operator calculus: certificates, powers, sums, T-sectoriality, maximal regularity"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config, out_dir;
  app.add_option("--config", config, "Run a JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Directory for report files (stdout when absent)");

  std::string matrix, matrix_b;
  double theta = 0.0;

  auto* certify = app.add_subcommand("certify-sector", "Sampled sector constant at an angle");
  certify->add_option("--matrix", matrix, "Matrix CSV")->required();
  certify->add_option("--theta", theta, "Sector angle")->required();

  double z_re = 0.0, z_im = 0.0;
  auto* power = app.add_subcommand("power", "Complex power A^z by contour quadrature");
  power->add_option("--matrix", matrix, "Matrix CSV")->required();
  power->add_option("--z-re", z_re, "Real part of z (< 0)")->required();
  power->add_option("--z-im", z_im, "Imaginary part of z");

  std::string symbol;
  auto* hinf = app.add_subcommand("hinf", "Apply a builtin holomorphic symbol f(-A)");
  hinf->add_option("--matrix", matrix, "Matrix CSV")->required();
  hinf->add_option("--symbol", symbol, "Builtin symbol")->required()->check(CLI::IsMember(builtin_symbol_names()));
  hinf->add_option("--theta", theta, "Sector angle of the symbol")->required();

  SumRequest sum_req;
  std::vector<double> identity_w;
  auto* sum = app.add_subcommand("sum-inverse", "Contour inverse of A + B for a commuting pair");
  sum->add_option("--matrix-a", matrix, "Matrix CSV for A")->required();
  sum->add_option("--matrix-b", matrix_b, "Matrix CSV for B")->required();
  sum->add_option("--theta-a", sum_req.theta_a, "Sector angle of A")->required();
  sum->add_option("--theta-b", sum_req.theta_b, "Sector angle of B")->required();
  sum->add_option("--check-identities", identity_w, "Weight w as: re im")->expected(2);
  sum->add_flag("--certify", sum_req.certify, "Add a closedness certificate");
  sum->add_option("--seed", sum_req.seed, "Probe seed");

  TSectorRequest ts_req;
  std::string family = "pure-harmonics";
  auto* tsec = app.add_subcommand("t-sector", "Witness search for the trigonometric resolvent bound");
  tsec->add_option("--matrix", matrix, "Matrix CSV")->required();
  tsec->add_option("--phi", ts_req.phi, "Rotation angle")->required();
  tsec->add_option("--r", ts_req.r, "Radius in [1/e, 1]")->required();
  tsec->add_option("--p", ts_req.p, "Norm exponent")->required();
  tsec->add_option("--n", ts_req.n, "Highest harmonic")->required();
  tsec->add_option("--family", family, "Multiplier family")
      ->check(CLI::IsMember({"pure-harmonics", "piecewise-constant", "proof-derived"}));
  tsec->add_option("--segments", ts_req.family.segments, "Segments for piecewise-constant (4 or 8)");
  tsec->add_option("--nt", ts_req.n_t, "Grid size");
  tsec->add_option("--seed", ts_req.seed, "Coefficient seed");

  double rho = 1.0;
  auto* rep = app.add_subcommand("rep-check", "Real-line resolvent representations against direct solves");
  rep->add_option("--matrix", matrix, "Matrix CSV")->required();
  rep->add_option("--rho", rho, "Resolvent scale")->required();
  rep->add_option("--theta", theta, "Rotation angle")->required();

  MaxRegRequest mr_req;
  bool refine = false, no_adversarial = false;
  auto* maxreg = app.add_subcommand("maxreg", "Maximal-regularity constants of f' + Af = g");
  maxreg->add_option("--matrix", matrix, "Matrix CSV")->required();
  maxreg->add_option("--tau", mr_req.grid.tau, "Time horizon")->required();
  maxreg->add_option("--p", mr_req.grid.p, "Norm exponent")->required();
  maxreg->add_option("--nt", mr_req.grid.n_t, "Time intervals")->required();
  maxreg->add_flag("--sweep-p", mr_req.sweep_p, "Repeat for p in {1.5, 2, 3, 4}");
  maxreg->add_flag("--refine", refine, "Grid refinement ladder (3 levels) with CSV output");
  maxreg->add_flag("--no-adversarial", no_adversarial, "Skip power-iteration probes");
  maxreg->add_option("--seed", mr_req.seed, "Probe seed");

  std::string report_a, report_b;
  double tolerance = 0.0;
  auto* diff = app.add_subcommand("report-diff", "Field-wise numeric diff of two reports");
  diff->add_option("a", report_a, "First report")->required()->check(CLI::ExistingFile);
  diff->add_option("b", report_b, "Second report")->required()->check(CLI::ExistingFile);
  diff->add_option("--tol", tolerance, "Relative tolerance per field");

  std::string recipe_json, output, output_b;
  auto* gen = app.add_subcommand("generate", "Write a generated operator as matrix CSV");
  gen->add_option("--recipe", recipe_json, R"(Recipe JSON, e.g. {"kind": "laplacian-1d", "m": 8})")->required();
  gen->add_option("--output", output, "Matrix CSV path (stdout when absent)");
  gen->add_option("--output-b", output_b, "Second matrix for commuting-pair recipes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (!config.empty()) {
      const auto result = run_experiment(config, out_dir.empty() ? "." : out_dir);
      for (const auto& path : result.written) std::cout << path << '\n';
      if (result.exit_code != 0) std::cerr << result.message << '\n';
      return result.exit_code;
    }
    if (*certify) return emit(certify_pipeline(load(matrix), theta), out_dir);
    if (*power) return emit(power_pipeline(load(matrix), {z_re, z_im}), out_dir);
    if (*hinf) return emit(hinf_pipeline(load(matrix), symbol, theta), out_dir);
    if (*sum) {
      if (!identity_w.empty()) sum_req.identities.emplace_back(identity_w[0], identity_w[1]);
      return emit(sum_pipeline(load(matrix), load(matrix_b), sum_req), out_dir);
    }
    if (*tsec) {
      ts_req.family.kind = family_kind_from_string(family);
      return emit(tsector_pipeline(load(matrix), ts_req), out_dir);
    }
    if (*rep) return emit(rep_check_pipeline(load(matrix), rho, theta), out_dir);
    if (*maxreg) {
      mr_req.adversarial = !no_adversarial;
      mr_req.refine_levels = refine ? 3 : 1;
      const auto report = maxreg_pipeline(load(matrix), mr_req);
      std::string csv;
      if (refine) {
        csv = "n_t,constant_fprime,constant_af\n";
        for (const auto& row : report.outputs["ladder"])
          csv += std::to_string(row["n_t"].get<int>()) + "," + row["constant_fprime"].dump() + "," +
                 row["constant_af"].dump() + "\n";
      }
      return emit(report, out_dir, csv);
    }
    if (*diff) {
      const auto d = report_diff(load_report(report_a), load_report(report_b), tolerance);
      std::cout << to_json(d).dump(2) << '\n';
      return d.all_within ? 0 : kNumericFailure;
    }
    if (*gen) {
      const auto recipe = recipe_from_json(Json::parse(recipe_json));
      if (recipe.kind == RecipeKind::commuting_pair) {
        const auto [a, b] = generate_pair(recipe);
        if (output.empty() || output_b.empty())
          fail(Errc::config_invalid, "commuting-pair recipes need --output and --output-b");
        save_matrix(output, a.matrix());
        save_matrix(output_b, b.matrix());
      } else if (output.empty()) {
        write_matrix_csv(std::cout, generate(recipe).matrix());
      } else {
        save_matrix(output, generate(recipe).matrix());
      }
      return 0;
    }
    std::cout << app.help();
    return 0;
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    const bool input_error = e.code() == Errc::config_invalid || e.code() == Errc::invalid_recipe ||
                             e.code() == Errc::parse_error || e.code() == Errc::incompatible_reports;
    return input_error ? kConfigError : kNumericFailure;
  } catch (const Json::exception& e) {
    std::cerr << "parse_error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kNumericFailure;
  }
}
