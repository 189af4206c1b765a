#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "sectorsum/harness.hpp"

using namespace sectorsum;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("sectorsum-" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }

  std::string write(const std::string& file, const std::string& text) const {
    const auto p = (path / file).string();
    std::ofstream(p) << text;
    return p;
  }
};

std::string read(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::invalid_argument;
}

}  // namespace

TEST_CASE("generated operators") {
  OperatorRecipe lap;
  lap.kind = RecipeKind::laplacian_1d;
  lap.m = 3;
  const Matrix l = generate(lap).matrix();
  CHECK(l(0, 0) == Complex(32.0));
  CHECK(l(0, 1) == Complex(-16.0));
  CHECK((l - l.adjoint()).norm() == 0.0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(l);
  const auto expect = laplacian_eigenvalues(3);
  for (int k = 0; k < 3; ++k) CHECK(es.eigenvalues()(k) == doctest::Approx(expect[k]).epsilon(1e-13));
  CHECK(expect[0] == doctest::Approx(16.0 * (2.0 - std::sqrt(2.0))).epsilon(1e-14));
  CHECK(es.eigenvalues().minCoeff() > 0.0);

  OperatorRecipe rot;
  rot.kind = RecipeKind::diag_rotated;
  rot.psi = kPi / 4;
  const MatrixOperator r = generate(rot);
  for (int j = 0; j < 3; ++j) CHECK(std::abs(r.matrix()(j, j) - std::polar(j + 1.0, kPi / 4)) <= 1e-15);
  REQUIRE(r.certified());
  CHECK(r.certified()->theta >= kPi / 2);
  CHECK(certify_sector(r, r.certified()->theta).k_hat <= r.certified()->K);

  OperatorRecipe jordan;
  jordan.kind = RecipeKind::jordan;
  Matrix j(2, 2);
  j << 2, 1, 0, 2;
  CHECK(generate(jordan).matrix() == j);

  OperatorRecipe pair;
  pair.kind = RecipeKind::commuting_pair;
  pair.size = 6;
  pair.seed = 42;
  const auto [a, b] = generate_pair(pair);
  CHECK(resolvent_commute_check(a.matrix(), b.matrix(), 1.0, 1.0) <= 1e-12);
  CHECK(generate_pair(pair).first.matrix() == a.matrix());
  CHECK_NOTHROW(CommutingPair(a, 0.6 * kPi, b, 0.6 * kPi));

  lap.m = 0;
  CHECK(code_of([&] { generate(lap); }) == Errc::invalid_recipe);
}

TEST_CASE("recipes from JSON are strict") {
  auto r = recipe_from_json(Json::parse(R"({"kind": "jordan", "a": [2, 0.5], "size": 3})"));
  CHECK(r.a == Complex(2.0, 0.5));
  CHECK(recipe_from_json(to_json(r)).size == 3);
  CHECK(code_of([] { recipe_from_json(Json::parse(R"({"kind": "laplacian-1d", "m": 4, "extra": 1})")); }) ==
        Errc::invalid_recipe);
  CHECK(code_of([] { recipe_from_json(Json::parse(R"({"kind": "circle"})")); }) == Errc::invalid_recipe);
  CHECK(code_of([] { recipe_from_json(Json::parse(R"({"kind": "laplacian-1d", "m": "8"})")); }) ==
        Errc::invalid_recipe);
}

TEST_CASE("experiments from config files") {
  TempDir dir("experiments");
  const auto out = (dir.path / "out").string();

  const auto certify = dir.write("certify.json", R"({"schema_version": 1, "pipeline": "certify",
    "operator": {"kind": "diag-positive", "entries": [1, 2]}, "theta": 1.0})");
  auto res = run_experiment(certify, out);
  CHECK(res.exit_code == 0);
  REQUIRE(res.written.size() == 1);
  const auto first = load_report(res.written[0]);
  CHECK(first.pass);
  CHECK(first.operation == "certify-sector");

  // identical config and seed give an identical report payload
  const auto again = run_experiment(certify, (dir.path / "again").string());
  CHECK(serialize_report(load_report(again.written[0])) == serialize_report(first));
  CHECK(Json::parse(read(res.written[0])).contains("envelope"));

  const auto sweep = dir.write("sweep.json", R"({"schema_version": 1, "pipeline": "sweep",
    "operators": [{"kind": "laplacian-1d", "m": 8}, {"kind": "laplacian-1d", "m": 16},
                  {"kind": "laplacian-1d", "m": 32}],
    "tau": 1.0, "p": 2.0, "n_t": 128, "adversarial": false})");
  res = run_experiment(sweep, out);
  CHECK(res.exit_code == 0);
  REQUIRE(res.written.size() == 2);
  std::istringstream csv(read(res.written[1]));
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(csv, line)) lines.push_back(line);
  CHECK(lines.size() == 4);
  CHECK(lines[0] == "index,kind,dim,n_t,p,constant_fprime,constant_af");

  const auto missing = dir.write("missing.json", R"({"schema_version": 1, "pipeline": "certify",
    "operator": {"kind": "diag-positive"}})");
  res = run_experiment(missing, out);
  CHECK(res.exit_code == 2);
  CHECK(res.message.find("theta") != std::string::npos);

  const auto unknown = dir.write("unknown.json", R"({"schema_version": 1, "pipeline": "certify",
    "operator": {"kind": "diag-positive"}, "theta": 1.0, "verbose": true})");
  CHECK(run_experiment(unknown, out).exit_code == 2);
  CHECK(run_experiment(dir.write("version.json", R"({"schema_version": 7, "pipeline": "certify"})"), out).exit_code == 2);
  CHECK(run_experiment(dir.write("broken.json", "{not json"), out).exit_code == 2);
  CHECK(run_experiment((dir.path / "absent.json").string(), out).exit_code == 2);

  const auto failing = dir.write("failing.json", R"({"schema_version": 1, "pipeline": "power",
    "operator": {"kind": "diag-positive"}, "z": 0.5})");
  CHECK(run_experiment(failing, out).exit_code == 1);
}

TEST_CASE("other pipelines run from configs") {
  const Json sum = Json::parse(R"({"schema_version": 1, "pipeline": "sum",
    "operator_a": {"kind": "diag-positive", "entries": [1, 2]},
    "operator_b": {"kind": "diag-positive", "entries": [3, 4]},
    "theta_a": 1.9, "theta_b": 1.9, "identities": [-0.5, [-0.5, 1]], "certify": true})");
  auto r = run_config(sum);
  CHECK(r.pass);
  CHECK(r.outputs["identities"].size() == 2);

  const Json power = Json::parse(R"({"schema_version": 1, "pipeline": "power",
    "operator": {"kind": "jordan", "a": 2, "size": 3}, "z": [-0.5, 0.3]})");
  CHECK(run_config(power).pass);

  const Json hinf = Json::parse(R"({"schema_version": 1, "pipeline": "hinf",
    "operator": {"kind": "diag-positive"}, "symbol": "cayley-squared", "theta": 1.0})");
  CHECK(run_config(hinf).pass);

  const Json ts = Json::parse(R"({"schema_version": 1, "pipeline": "t-sector", "seed": 9,
    "operator": {"kind": "diag-positive"}, "phi": 0.3, "r": 0.8, "p": 2, "n": 2, "n_t": 64,
    "family": "piecewise-constant", "segments": 8})");
  r = run_config(ts);
  CHECK(r.pass);
  CHECK(r.seed == 9);

  const Json rep = Json::parse(R"({"schema_version": 1, "pipeline": "rep-check",
    "operator": {"kind": "diag-positive"}, "rho": 0.5, "theta": 0.7})");
  CHECK(run_config(rep).pass);
}

TEST_CASE("report round trip and diffs") {
  MaxRegRequest req;
  req.grid = {1.0, 128, 2.0};
  req.adversarial = false;
  OperatorRecipe lap;
  lap.kind = RecipeKind::laplacian_1d;
  const MatrixOperator a = generate(lap);
  const auto coarse = maxreg_pipeline(a, req);
  CHECK(parse_report(serialize_report(coarse, "2026-01-01T00:00:00Z")) == coarse);

  const auto same = report_diff(coarse, maxreg_pipeline(a, req));
  CHECK(same.all_within);
  for (const auto& f : same.numeric) CHECK(f.abs_diff == 0.0);

  req.grid.n_t = 256;
  const auto fine = maxreg_pipeline(a, req);
  const double model = coarse.tolerances.at("grid_error");
  std::map<std::string, double> tol{{"outputs.constant_fprime", model}, {"outputs.constant_af", model}};
  const auto d = report_diff(coarse, fine, 1e300, tol);
  for (const auto& f : d.numeric)
    if (f.field == "outputs.constant_fprime" || f.field == "outputs.constant_af") CHECK(f.within);

  CHECK(code_of([&] { report_diff(coarse, certify_pipeline(a, 1.0)); }) == Errc::incompatible_reports);
}
