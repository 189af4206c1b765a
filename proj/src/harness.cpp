#include "sectorsum/harness.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace sectorsum {

namespace {

constexpr double kRepTolerance = 1e-5;
constexpr double kResidualTolerance = 1e-6;

// Strict reader over a JSON object: every key must be consumed or declared.
class Fields {
 public:
  Fields(const Json& j, std::string context, Errc code) : j_(j), context_(std::move(context)), code_(code) {
    if (!j.is_object()) bad("must be a JSON object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const Json& at(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) bad("missing field '" + key + "'");
    return j_.at(key);
  }

  template <typename T>
  T get(const std::string& key) {
    const Json& v = at(key);
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw std::invalid_argument("not a number");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw std::invalid_argument("not a boolean");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw std::invalid_argument("not a string");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw std::invalid_argument("not an integer");
      }
      return v.get<T>();
    } catch (const std::exception&) {
      bad("field '" + key + "' has the wrong type");
    }
  }

  template <typename T>
  T get_or(const std::string& key, T fallback) {
    return has(key) ? get<T>(key) : fallback;
  }

  Complex complex(const std::string& key) {
    try {
      return complex_from_json(at(key));
    } catch (const Error&) {
      bad("field '" + key + "' must be a number or [re, im]");
    }
  }

  void finish() const {
    for (const auto& [key, _] : j_.items())
      if (!seen_.count(key)) bad("unknown field '" + key + "'");
  }

  [[noreturn]] void bad(const std::string& what) const { fail(code_, context_ + ": " + what); }

 private:
  const Json& j_;
  std::string context_;
  Errc code_;
  std::set<std::string> seen_;
};

Vector random_unit(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(d(rng), d(rng));
  return v.normalized();
}

Json summary(const Matrix& m) { return {{"value", matrix_to_json(m)}, {"norm", operator_norm(m)}}; }

Json operator_inputs(const MatrixOperator& a) {
  Json j = {{"matrix", matrix_to_json(a.matrix())}};
  if (a.certified()) j["certified"] = {{"theta", a.certified()->theta}, {"K", a.certified()->K}};
  return j;
}

}  // namespace

RecipeKind recipe_kind_from_string(const std::string& name) {
  if (name == "diag-positive") return RecipeKind::diag_positive;
  if (name == "diag-rotated") return RecipeKind::diag_rotated;
  if (name == "jordan") return RecipeKind::jordan;
  if (name == "laplacian-1d") return RecipeKind::laplacian_1d;
  if (name == "commuting-pair") return RecipeKind::commuting_pair;
  fail(Errc::invalid_recipe, "unknown operator recipe '" + name + "'");
}

std::string to_string(RecipeKind kind) {
  switch (kind) {
    case RecipeKind::diag_positive: return "diag-positive";
    case RecipeKind::diag_rotated: return "diag-rotated";
    case RecipeKind::jordan: return "jordan";
    case RecipeKind::laplacian_1d: return "laplacian-1d";
    case RecipeKind::commuting_pair: return "commuting-pair";
  }
  return "unknown";
}

OperatorRecipe recipe_from_json(const Json& j) {
  Fields f(j, "operator recipe", Errc::invalid_recipe);
  OperatorRecipe r;
  r.kind = recipe_kind_from_string(f.get<std::string>("kind"));
  switch (r.kind) {
    case RecipeKind::diag_rotated:
      r.psi = f.get<double>("psi");
      [[fallthrough]];
    case RecipeKind::diag_positive:
      if (f.has("entries")) {
        try {
          r.entries = f.at("entries").get<std::vector<double>>();
        } catch (const Json::exception&) {
          f.bad("entries must be an array of numbers");
        }
      }
      break;
    case RecipeKind::jordan:
      r.a = f.complex("a");
      r.size = f.get<int>("size");
      break;
    case RecipeKind::laplacian_1d:
      r.m = f.get<int>("m");
      break;
    case RecipeKind::commuting_pair:
      r.size = f.get<int>("size");
      r.seed = f.get_or<std::uint64_t>("seed", kDefaultSeed);
      break;
  }
  f.finish();
  return r;
}

Json to_json(const OperatorRecipe& r) {
  Json j = {{"kind", to_string(r.kind)}};
  switch (r.kind) {
    case RecipeKind::diag_rotated:
      j["psi"] = r.psi;
      [[fallthrough]];
    case RecipeKind::diag_positive:
      j["entries"] = r.entries;
      break;
    case RecipeKind::jordan:
      j["a"] = complex_to_json(r.a);
      j["size"] = r.size;
      break;
    case RecipeKind::laplacian_1d:
      j["m"] = r.m;
      break;
    case RecipeKind::commuting_pair:
      j["size"] = r.size;
      j["seed"] = r.seed;
      break;
  }
  return j;
}

MatrixOperator generate(const OperatorRecipe& r) {
  auto require_size = [](int n, const char* what) {
    if (n < 1 || n > 4096) fail(Errc::invalid_recipe, std::string(what) + " must lie in [1, 4096]");
  };
  switch (r.kind) {
    case RecipeKind::diag_positive:
    case RecipeKind::diag_rotated: {
      if (r.entries.empty()) fail(Errc::invalid_recipe, "diagonal recipes need entries");
      for (double e : r.entries)
        if (!(e > 0.0) || !std::isfinite(e)) fail(Errc::invalid_recipe, "diagonal entries must be positive");
      Vector d(static_cast<Eigen::Index>(r.entries.size()));
      const bool rotated = r.kind == RecipeKind::diag_rotated;
      if (rotated && !(r.psi >= 0.0 && r.psi < kPi)) fail(Errc::invalid_recipe, "psi must lie in [0, pi)");
      const Complex phase = rotated ? std::polar(1.0, r.psi) : Complex(1.0);
      for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = phase * r.entries[static_cast<std::size_t>(i)];
      MatrixOperator op(Matrix(d.asDiagonal()));
      if (!rotated) return op;
      const double room = kPi - r.psi;
      const double theta = r.psi < kPi / 2 ? 0.5 * room + kPi / 4 : 0.5 * room;
      return op.with_certificate({theta, std::max(1.0, certify_sector(op, theta).k_hat)});
    }
    case RecipeKind::jordan: {
      require_size(r.size, "jordan size");
      if (!(std::abs(r.a) > 0.0) || !is_finite(r.a)) fail(Errc::invalid_recipe, "jordan eigenvalue must be nonzero");
      Matrix m = r.a * Matrix::Identity(r.size, r.size);
      for (int i = 0; i + 1 < r.size; ++i) m(i, i + 1) = 1.0;
      return m;
    }
    case RecipeKind::laplacian_1d: {
      require_size(r.m, "laplacian size m");
      const double h2 = (r.m + 1.0) * (r.m + 1.0);
      Matrix l = Matrix::Zero(r.m, r.m);
      for (int i = 0; i < r.m; ++i) {
        l(i, i) = 2.0 * h2;
        if (i + 1 < r.m) l(i, i + 1) = l(i + 1, i) = -h2;
      }
      return l;
    }
    case RecipeKind::commuting_pair:
      return generate_pair(r).first;
  }
  fail(Errc::invalid_recipe, "unknown operator recipe");
}

std::pair<MatrixOperator, MatrixOperator> generate_pair(const OperatorRecipe& r) {
  if (r.kind != RecipeKind::commuting_pair) fail(Errc::invalid_recipe, "generate_pair needs a commuting-pair recipe");
  if (r.size < 1 || r.size > 512) fail(Errc::invalid_recipe, "commuting-pair size must lie in [1, 512]");
  const Eigen::Index n = r.size;
  std::mt19937_64 rng(r.seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> radius(1.0, 5.0), angle(-kPi / 6, kPi / 6);
  Matrix v = Matrix::Identity(n, n);
  const double spread = 0.3 / std::sqrt(double(n));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) v(i, j) += spread * Complex(normal(rng), normal(rng));
  Vector da(n), db(n);
  for (Eigen::Index i = 0; i < n; ++i) da(i) = std::polar(radius(rng), angle(rng));
  for (Eigen::Index i = 0; i < n; ++i) db(i) = std::polar(radius(rng), angle(rng));
  const Matrix vinv = v.inverse();
  return {MatrixOperator(Matrix(v * da.asDiagonal() * vinv)), MatrixOperator(Matrix(v * db.asDiagonal() * vinv))};
}

std::vector<double> laplacian_eigenvalues(int m) {
  std::vector<double> out;
  for (int k = 1; k <= m; ++k) {
    const double s = std::sin(k * kPi / (2.0 * (m + 1)));
    out.push_back(4.0 * (m + 1.0) * (m + 1.0) * s * s);
  }
  return out;
}

CertificateReport certify_pipeline(const MatrixOperator& a, double theta) {
  const SectorSampling sampling;
  return certificate_report(a, theta, sampling, certify_sector(a, theta, sampling));
}

CertificateReport power_pipeline(const MatrixOperator& a, Complex z) {
  const ContourSpec spec = power_contour(a.matrix(), z);
  const PowerResult r = complex_power(a, z, spec);
  const Matrix half = complex_power(a, z / 2.0);
  const double semigroup = operator_norm(half * half - r.value);
  auto report = make_report("power", {{"operator", operator_inputs(a)}, {"z", complex_to_json(z)}, {"contour", to_json(spec)}});
  report.tolerances["tol_tail"] = spec.tol_tail;
  report.tolerances["semigroup"] = kResidualTolerance;
  report.node_counts["contour"] = static_cast<long long>(r.nodes);
  report.outputs = summary(r.value);
  report.outputs["tail_estimate"] = r.tail_estimate;
  report.outputs["semigroup_residual"] = semigroup;
  report.pass = r.value.allFinite() && semigroup <= kResidualTolerance * std::max(1.0, operator_norm(r.value));
  return report;
}

CertificateReport hinf_pipeline(const MatrixOperator& a, const std::string& symbol, double theta) {
  const HolomorphicSymbol f = builtin_symbol(symbol, theta);
  const ContourSpec spec = hinf_contour(a.matrix(), f);
  const PowerResult r = hinf_apply(f, a, spec);
  const double sup = sampled_sup(f);
  auto report = make_report("hinf", {{"operator", operator_inputs(a)},
                                     {"symbol", symbol},
                                     {"theta", theta},
                                     {"contour", to_json(spec)}});
  report.tolerances["tol_tail"] = spec.tol_tail;
  report.node_counts["contour"] = static_cast<long long>(r.nodes);
  report.outputs = summary(r.value);
  report.outputs["tail_estimate"] = r.tail_estimate;
  report.outputs["sampled_sup"] = sup;
  report.outputs["ratio"] = operator_norm(r.value) / sup;
  report.pass = r.value.allFinite();
  return report;
}

CertificateReport sum_pipeline(const MatrixOperator& a, const MatrixOperator& b, const SumRequest& req) {
  const CommutingPair pair(a, req.theta_a, b, req.theta_b);
  const SumInverse k = sum_inverse(pair);
  Json ids = Json::array();
  for (Complex w : req.identities) ids.push_back(complex_to_json(w));
  auto report = make_report("sum-inverse", {{"operator_a", operator_inputs(a)},
                                            {"operator_b", operator_inputs(b)},
                                            {"theta_a", req.theta_a},
                                            {"theta_b", req.theta_b},
                                            {"identities", ids},
                                            {"certify", req.certify}});
  report.seed = req.seed;
  report.tolerances["residual"] = kResidualTolerance;
  report.tolerances["identity"] = kResidualTolerance;
  report.node_counts["contour"] = static_cast<long long>(k.nodes);
  report.outputs = summary(k.value);
  report.outputs["contour"] = to_json(k.spec);
  report.outputs["commutator"] = pair.commutator();
  report.outputs["residual_left"] = k.residual_left;
  report.outputs["residual_right"] = k.residual_right;
  report.outputs["tail_estimate"] = k.tail_estimate;
  bool pass = k.residual_left <= kResidualTolerance && k.residual_right <= kResidualTolerance;

  Json checks = Json::array();
  for (Complex w : req.identities) {
    const double left = weighted_identity_left(pair, w).diff;
    const double right = weighted_identity_right(pair, w).diff;
    checks.push_back({{"w", complex_to_json(w)}, {"left_diff", left}, {"right_diff", right}});
    pass = pass && left <= kResidualTolerance && right <= kResidualTolerance;
  }
  report.outputs["identities"] = checks;

  if (req.certify) {
    const auto c = closedness_certificate(pair, default_probes(a.dim(), req.seed), {0.4, 0.2, 0.1, 0.05}, req.seed);
    report.node_counts["probes"] = static_cast<long long>(c.probe_count);
    report.outputs["closedness"] = {{"c_ab", c.c_ab},
                                    {"residual_k", c.residual_k},
                                    {"theta_grid", c.theta_grid},
                                    {"theta_values", c.theta_values},
                                    {"theta_sup", c.theta_sup}};
    pass = pass && std::isfinite(c.c_ab) && c.residual_k <= kResidualTolerance && c.theta_sup <= 1.1 * c.c_ab;
  }
  report.pass = pass;
  return report;
}

CertificateReport tsector_pipeline(const MatrixOperator& a, const TSectorRequest& req) {
  if (req.n < 0) fail(Errc::invalid_argument, "number of terms must be non-negative");
  std::mt19937_64 rng(req.seed);
  TrigPolynomial poly;
  poly.n_t = req.n_t;
  poly.p = req.p;
  for (int k = 0; k <= req.n; ++k) poly.coefficients.push_back(random_unit(a.dim(), rng));
  const TSectorReport t = witness_search(a, req.phi, req.r, poly, req.family);
  auto report = make_report("t-sector", {{"operator", operator_inputs(a)},
                                         {"phi", req.phi},
                                         {"r", req.r},
                                         {"p", req.p},
                                         {"n", req.n},
                                         {"n_t", req.n_t},
                                         {"family", to_string(req.family.kind)},
                                         {"segments", req.family.segments}});
  report.seed = req.seed;
  report.node_counts["grid"] = req.n_t;
  report.node_counts["members"] = static_cast<long long>(t.members);
  report.outputs = to_json(t);
  report.pass = std::isfinite(t.c_hat);
  return report;
}

CertificateReport rep_check_pipeline(const MatrixOperator& a, double rho, double theta) {
  const BipFit fit = bip_fit(a, 4.0, 33);
  const Vector x = Vector::Ones(a.dim()) / std::sqrt(double(a.dim()));
  const auto real = resolvent_rep_real(a, fit, rho, x);
  const Vector direct_real = ShiftedLU(a.matrix(), 1.0 / rho).solve(x) / rho;
  const Complex c = rho * std::polar(1.0, theta);
  const auto rotated = resolvent_rep_rotated(a, fit, rho, theta, x);
  const Vector direct_rotated = ShiftedLU(a.matrix(), 1.0 / c).solve(x) / c;
  const double err_real = (real.value - direct_real).norm();
  const double err_rot = (rotated.value - direct_rotated).norm();

  auto report = make_report("rep-check", {{"operator", operator_inputs(a)}, {"rho", rho}, {"theta", theta}});
  report.tolerances["representation"] = kRepTolerance;
  report.node_counts["line_real"] = static_cast<long long>(real.nodes);
  report.node_counts["line_rotated"] = static_cast<long long>(rotated.nodes);
  report.outputs = {{"fit", to_json(fit)},
                    {"cutoff", rotated.cutoff},
                    {"error_real", err_real},
                    {"error_rotated", err_rot},
                    {"error_estimate", rotated.error_estimate}};
  report.pass = err_real <= kRepTolerance && err_rot <= kRepTolerance;
  return report;
}

namespace {

ProbeFactory probe_factory(const MatrixOperator& a, const MaxRegRequest& req) {
  return [a, adversarial = req.adversarial, seed = req.seed](const TimeGrid& g) {
    auto probes = standard_probes(a.dim(), g);
    if (adversarial)
      for (auto& p : adversarial_probes(a, g, seed)) probes.push_back(std::move(p));
    return probes;
  };
}

}  // namespace

CertificateReport maxreg_pipeline(const MatrixOperator& a, const MaxRegRequest& req) {
  validate(req.grid);
  const ProbeFactory probes = probe_factory(a, req);
  const MaxRegReport main = maxreg_constant(a, req.grid, probes(req.grid));

  auto report = make_report("maxreg", {{"operator", operator_inputs(a)},
                                       {"tau", req.grid.tau},
                                       {"p", req.grid.p},
                                       {"n_t", req.grid.n_t},
                                       {"adversarial", req.adversarial},
                                       {"sweep_p", req.sweep_p},
                                       {"refine_levels", req.refine_levels}});
  report.seed = req.seed;
  report.node_counts["grid"] = req.grid.n_t + 1;
  report.node_counts["probes"] = static_cast<long long>(main.probe_count);
  report.outputs = to_json(main);

  // Richardson model for an O(dt^2) method: the error at n_t is about a third
  // of the change from n_t / 2.
  if (req.grid.n_t / 2 >= 16 && req.grid.n_t % 2 == 0) {
    TimeGrid coarse = req.grid;
    coarse.n_t /= 2;
    const MaxRegReport c = maxreg_constant(a, coarse, probes(coarse));
    report.tolerances["grid_error"] =
        std::max(std::abs(main.constant_fprime - c.constant_fprime), std::abs(main.constant_af - c.constant_af)) / 3.0;
  }
  bool pass = std::isfinite(main.constant_fprime) && std::isfinite(main.constant_af);
  if (req.refine_levels > 1) {
    Json ladder = Json::array();
    for (const auto& r : refinement_ladder(a, req.grid, req.refine_levels, probes)) ladder.push_back(to_json(r));
    report.outputs["ladder"] = ladder;
  }
  if (req.sweep_p) {
    const auto sweep = p_independence_probe(a, req.grid, {1.5, 2.0, 3.0, 4.0}, probes);
    report.outputs["p_sweep"] = sweep.outputs;
    pass = pass && sweep.pass;
  }
  report.pass = pass;
  return report;
}

SweepResult maxreg_sweep(const std::vector<OperatorRecipe>& recipes, const MaxRegRequest& req) {
  if (recipes.empty()) fail(Errc::invalid_argument, "sweep needs operators");
  validate(req.grid);
  std::ostringstream csv;
  csv.precision(17);
  csv << "index,kind,dim,n_t,p,constant_fprime,constant_af\n";
  Json rows = Json::array(), inputs = Json::array();
  bool pass = true;
  for (std::size_t i = 0; i < recipes.size(); ++i) {
    const MatrixOperator a = generate(recipes[i]);
    const MaxRegReport r = maxreg_constant(a, req.grid, probe_factory(a, req)(req.grid));
    csv << i << ',' << to_string(recipes[i].kind) << ',' << a.dim() << ',' << req.grid.n_t << ',' << req.grid.p << ','
        << r.constant_fprime << ',' << r.constant_af << '\n';
    rows.push_back(to_json(r));
    inputs.push_back(to_json(recipes[i]));
    pass = pass && std::isfinite(r.constant_fprime) && std::isfinite(r.constant_af);
  }
  SweepResult out{make_report("sweep", {{"operators", inputs},
                                        {"tau", req.grid.tau},
                                        {"p", req.grid.p},
                                        {"n_t", req.grid.n_t},
                                        {"adversarial", req.adversarial}}),
                  csv.str()};
  out.report.seed = req.seed;
  out.report.node_counts["grid"] = req.grid.n_t + 1;
  out.report.outputs = {{"rows", rows}};
  out.report.pass = pass;
  return out;
}

namespace {

MatrixOperator config_operator(const Json& j) {
  if (j.is_object() && j.contains("matrix_file")) {
    Fields f(j, "operator", Errc::config_invalid);
    const auto path = f.get<std::string>("matrix_file");
    f.finish();
    return load_matrix(path);
  }
  return generate(recipe_from_json(j));
}

MultiplierFamily config_family(Fields& f) {
  MultiplierFamily fam;
  fam.kind = family_kind_from_string(f.get_or<std::string>("family", "pure-harmonics"));
  fam.segments = f.get_or<int>("segments", 4);
  return fam;
}

MaxRegRequest config_maxreg(Fields& f, std::uint64_t seed) {
  MaxRegRequest req;
  req.grid = {f.get<double>("tau"), f.get<int>("n_t"), f.get<double>("p")};
  req.adversarial = f.get_or<bool>("adversarial", true);
  req.seed = seed;
  return req;
}

}  // namespace

CertificateReport run_config(const Json& config, std::string* csv) {
  Fields f(config, "config", Errc::config_invalid);
  const int version = f.get<int>("schema_version");
  if (version != kSchemaVersion)
    f.bad("unsupported schema_version " + std::to_string(version) + " (expected " + std::to_string(kSchemaVersion) + ")");
  const auto pipeline = f.get<std::string>("pipeline");
  const auto seed = f.get_or<std::uint64_t>("seed", kDefaultSeed);

  CertificateReport report;
  if (pipeline == "certify") {
    const auto a = config_operator(f.at("operator"));
    const double theta = f.get<double>("theta");
    f.finish();
    report = certify_pipeline(a, theta);
  } else if (pipeline == "power") {
    const auto a = config_operator(f.at("operator"));
    const Complex z = f.complex("z");
    f.finish();
    report = power_pipeline(a, z);
  } else if (pipeline == "hinf") {
    const auto a = config_operator(f.at("operator"));
    const auto symbol = f.get<std::string>("symbol");
    const double theta = f.get<double>("theta");
    f.finish();
    report = hinf_pipeline(a, symbol, theta);
  } else if (pipeline == "sum") {
    const auto a = config_operator(f.at("operator_a"));
    const auto b = config_operator(f.at("operator_b"));
    SumRequest req;
    req.theta_a = f.get<double>("theta_a");
    req.theta_b = f.get<double>("theta_b");
    req.certify = f.get_or<bool>("certify", false);
    req.seed = seed;
    if (f.has("identities")) {
      const Json& ids = f.at("identities");
      if (!ids.is_array()) f.bad("identities must be an array");
      for (const auto& w : ids) {
        try {
          req.identities.push_back(complex_from_json(w));
        } catch (const std::exception&) {
          f.bad("identity weights must be numbers or [re, im]");
        }
      }
    }
    f.finish();
    report = sum_pipeline(a, b, req);
  } else if (pipeline == "t-sector") {
    const auto a = config_operator(f.at("operator"));
    TSectorRequest req;
    req.phi = f.get<double>("phi");
    req.r = f.get<double>("r");
    req.p = f.get<double>("p");
    req.n = f.get<int>("n");
    req.n_t = f.get<int>("n_t");
    req.family = config_family(f);
    req.seed = seed;
    f.finish();
    report = tsector_pipeline(a, req);
  } else if (pipeline == "rep-check") {
    const auto a = config_operator(f.at("operator"));
    const double rho = f.get<double>("rho");
    const double theta = f.get<double>("theta");
    f.finish();
    report = rep_check_pipeline(a, rho, theta);
  } else if (pipeline == "maxreg") {
    const auto a = config_operator(f.at("operator"));
    MaxRegRequest req = config_maxreg(f, seed);
    req.sweep_p = f.get_or<bool>("sweep_p", false);
    req.refine_levels = f.get_or<int>("refine", 1);
    f.finish();
    report = maxreg_pipeline(a, req);
  } else if (pipeline == "sweep") {
    const Json& ops = f.at("operators");
    if (!ops.is_array() || ops.empty()) f.bad("operators must be a non-empty array of recipes");
    std::vector<OperatorRecipe> recipes;
    for (const auto& r : ops) recipes.push_back(recipe_from_json(r));
    const MaxRegRequest req = config_maxreg(f, seed);
    f.finish();
    auto sweep = maxreg_sweep(recipes, req);
    if (csv) *csv = sweep.csv;
    report = std::move(sweep.report);
  } else {
    f.bad("unknown pipeline '" + pipeline + "'");
  }
  report.seed = seed;
  return report;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ExperimentResult run_experiment(const std::string& config_path, const std::string& out_dir) {
  ExperimentResult result;
  try {
    std::ifstream in(config_path);
    if (!in) fail(Errc::config_invalid, "cannot open config '" + config_path + "'");
    Json config;
    try {
      config = Json::parse(in);
    } catch (const Json::parse_error& e) {
      fail(Errc::config_invalid, std::string("config is not valid JSON: ") + e.what());
    }
    std::string csv;
    CertificateReport report = run_config(config, &csv);

    std::filesystem::create_directories(out_dir);
    const auto base = std::filesystem::path(out_dir) / report.run_id;
    const std::string json_path = base.string() + ".json";
    std::ofstream(json_path) << serialize_report(report, utc_timestamp());
    result.written.push_back(json_path);
    if (!csv.empty()) {
      const std::string csv_path = base.string() + ".csv";
      std::ofstream(csv_path) << csv;
      result.written.push_back(csv_path);
    }
    result.exit_code = report.pass ? 0 : 1;
    result.message = report.pass ? "pass" : "numeric check failed";
    result.report = std::move(report);
  } catch (const Error& e) {
    const bool config_error =
        e.code() == Errc::config_invalid || e.code() == Errc::invalid_recipe || e.code() == Errc::parse_error;
    result.exit_code = config_error ? 2 : 1;
    result.message = std::string(to_string(e.code())) + ": " + e.what();
  } catch (const std::exception& e) {
    result.exit_code = 1;
    result.message = e.what();
  }
  return result;
}

}  // namespace sectorsum
