#include "sectorsum/maxreg.hpp"

#include <cmath>
#include <random>

#include "sectorsum/parallel.hpp"

namespace sectorsum {

namespace {

// One step f_{j+1} = E f_j + P0 g_j + P1 g_{j+1} of f' = Xf/h + g, exact for
// linear g on the step.
struct Integrator {
  Matrix e, p0, p1;
};

Complex phi_function(Complex x, int order) {
  if (std::abs(x) < 0.5) {
    Complex term = 1.0, sum = 0.0;
    double fact = 1.0;
    for (int k = 1; k < order; ++k) fact *= k;
    for (int k = 0; k < 25; ++k) {
      fact *= (k + order);
      sum += term / fact;
      term *= x;
    }
    return sum;
  }
  const Complex ex = std::exp(x);
  return order == 1 ? (ex - 1.0) / x : (ex - 1.0 - x) / (x * x);
}

Integrator scalar_integrator(Complex x, double h, Eigen::Index n) {
  const Complex p1 = phi_function(x, 1), p2 = phi_function(x, 2);
  const Matrix id = Matrix::Identity(n, n);
  return {std::exp(x) * id, h * (p1 - p2) * id, h * p2 * id};
}

Integrator matrix_integrator(const Matrix& x, double h) {
  const Eigen::Index n = x.rows();
  Matrix block = Matrix::Zero(3 * n, 3 * n);
  block.topLeftCorner(n, n) = x;
  block.block(0, n, n, n) = Matrix::Identity(n, n);
  block.block(n, 2 * n, n, n) = Matrix::Identity(n, n);
  const Matrix ex = matrix_exp(block);
  const Matrix phi1 = ex.block(0, n, n, n), phi2 = ex.block(0, 2 * n, n, n);
  return {ex.topLeftCorner(n, n), h * (phi1 - phi2), h * phi2};
}

GridFunction integrate(const Integrator& in, const GridFunction& g) {
  GridFunction f;
  f.grid = g.grid;
  f.zero_start = true;
  f.values.assign(g.values.size(), Vector::Zero(g.dim()));
  for (std::size_t j = 0; j + 1 < g.values.size(); ++j)
    f.values[j + 1] = in.e * f.values[j] + in.p0 * g.values[j] + in.p1 * g.values[j + 1];
  return f;
}

GridFunction integrate_adjoint(const Integrator& in, const GridFunction& y) {
  const std::size_t n = y.values.size() - 1;
  std::vector<Vector> mu(n + 1);
  mu[n] = y.values[n];
  for (std::size_t j = n - 1; j >= 1; --j) mu[j] = y.values[j] + in.e.adjoint() * mu[j + 1];
  GridFunction z = y;
  z.zero_start = false;
  const Matrix p0h = in.p0.adjoint(), p1h = in.p1.adjoint();
  for (std::size_t i = 0; i <= n; ++i) {
    z.values[i] = Vector::Zero(y.dim());
    if (i + 1 <= n) z.values[i] += p0h * mu[i + 1];
    if (i >= 1) z.values[i] += p1h * mu[i];
  }
  return z;
}

struct Stencil {
  std::size_t index;
  double coeff;
};

std::vector<Stencil> derivative_row(std::size_t j, std::size_t n, double h) {
  const double c = 1.0 / (2.0 * h);
  if (j == 0) return {{0, -3 * c}, {1, 4 * c}, {2, -c}};
  if (j == n) return {{n, 3 * c}, {n - 1, -4 * c}, {n - 2, c}};
  return {{j + 1, c}, {j - 1, -c}};
}

GridFunction derivative_adjoint(const GridFunction& y) {
  const std::size_t n = y.values.size() - 1;
  GridFunction z = y;
  z.zero_start = false;
  for (auto& v : z.values) v.setZero();
  for (std::size_t j = 0; j <= n; ++j)
    for (const auto& s : derivative_row(j, n, y.grid.step())) z.values[s.index] += s.coeff * y.values[j];
  return z;
}

std::vector<double> trapezoid_weights(const TimeGrid& grid) {
  std::vector<double> w(static_cast<std::size_t>(grid.n_t) + 1, grid.step());
  w.front() = w.back() = 0.5 * grid.step();
  return w;
}

void scale_by(GridFunction& f, const std::vector<double>& w, bool inverse) {
  for (std::size_t j = 0; j < f.values.size(); ++j) f.values[j] *= inverse ? 1.0 / w[j] : w[j];
}

GridFunction random_function(const TimeGrid& grid, Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  GridFunction g;
  g.grid = grid;
  for (int j = 0; j <= grid.n_t; ++j) {
    Vector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = Complex(d(rng), d(rng));
    g.values.push_back(v);
  }
  return g;
}

// Maximizer of ||T g|| / ||g|| in the trapezoid L^2 inner product.
GridFunction power_iteration(const std::function<GridFunction(const GridFunction&)>& op,
                             const std::function<GridFunction(const GridFunction&)>& adjoint, GridFunction g,
                             int iterations) {
  const auto w = trapezoid_weights(g.grid);
  for (int it = 0; it < iterations; ++it) {
    GridFunction y = op(g);
    scale_by(y, w, false);
    g = adjoint(y);
    scale_by(g, w, true);
    const double norm = grid_norm(g, 2.0);
    if (!(norm > 0.0)) fail(Errc::invalid_argument, "power iteration collapsed to zero");
    g = (1.0 / norm) * g;
  }
  g.zero_start = false;
  return g;
}

void require_right_half_plane(const MatrixOperator& a) {
  if (a.certified() && !(a.certified()->theta > kPi / 2))
    fail(Errc::invalid_argument, "the Cauchy solver needs a sector angle above pi/2");
  const auto eig = a.matrix().eigenvalues();
  for (Eigen::Index i = 0; i < eig.size(); ++i)
    if (!(eig(i).real() > 0.0)) fail(Errc::invalid_argument, "spectrum must lie in the open right half-plane");
}

void require_same_grid(const TimeGrid& a, const TimeGrid& b) {
  if (a.n_t != b.n_t || a.tau != b.tau) fail(Errc::dimension_mismatch, "grid functions live on different grids");
}

}  // namespace

void validate(const TimeGrid& grid) {
  if (!(grid.tau > 0.0) || !std::isfinite(grid.tau)) fail(Errc::invalid_argument, "tau must be positive");
  if (grid.n_t < 16) fail(Errc::invalid_argument, "time grid needs at least 16 intervals");
  if (!(grid.p > 1.0) || !std::isfinite(grid.p)) fail(Errc::invalid_argument, "p must lie in (1, inf)");
}

GridFunction sample(const TimeGrid& grid, const std::function<Vector(double)>& f) {
  validate(grid);
  GridFunction g;
  g.grid = grid;
  for (int j = 0; j <= grid.n_t; ++j) g.values.push_back(f(grid.at(j)));
  validate(g);
  return g;
}

void validate(const GridFunction& f) {
  validate(f.grid);
  if (f.values.size() != static_cast<std::size_t>(f.grid.n_t) + 1)
    fail(Errc::dimension_mismatch, "grid function needs one value per node");
  for (const auto& v : f.values) {
    if (v.size() != f.dim() || v.size() == 0) fail(Errc::dimension_mismatch, "grid values must share a nonzero size");
    if (!v.allFinite()) fail(Errc::invalid_argument, "grid function has non-finite values");
  }
}

double grid_norm(const GridFunction& f, double p) {
  if (p == 0.0) p = f.grid.p;
  if (!(p >= 1.0)) fail(Errc::invalid_argument, "norm exponent must be >= 1");
  const auto w = trapezoid_weights(f.grid);
  std::vector<double> terms(f.values.size());
  for (std::size_t j = 0; j < terms.size(); ++j) terms[j] = w[j] * std::pow(f.values[j].norm(), p);
  return std::pow(pairwise_sum(terms, 0.0), 1.0 / p);
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a.grid, b.grid);
  GridFunction r = a;
  for (std::size_t j = 0; j < r.values.size(); ++j) r.values[j] -= b.values[j];
  r.zero_start = a.zero_start && b.zero_start;
  return r;
}

GridFunction operator*(Complex c, const GridFunction& f) {
  GridFunction r = f;
  for (auto& v : r.values) v *= c;
  return r;
}

GridFunction time_derivative(const GridFunction& f) {
  validate(f);
  const std::size_t n = f.values.size() - 1;
  GridFunction d = f;
  d.zero_start = false;
  for (std::size_t j = 0; j <= n; ++j) {
    d.values[j].setZero();
    for (const auto& s : derivative_row(j, n, f.grid.step())) d.values[j] += s.coeff * f.values[s.index];
  }
  return d;
}

GridFunction deriv_resolvent(Complex lambda, const GridFunction& g) {
  validate(g);
  if (!is_finite(lambda)) fail(Errc::invalid_argument, "lambda must be finite");
  const double h = g.grid.step();
  return integrate(scalar_integrator(-lambda * h, h, g.dim()), g);
}

CertificateReport deriv_resolvent_bound_check(Complex lambda, const TimeGrid& grid, std::uint64_t seed, int dim) {
  validate(grid);
  if (!(lambda.real() > 0.0)) fail(Errc::invalid_argument, "the Young bound needs Re lambda > 0");
  if (dim < 1) fail(Errc::invalid_argument, "dimension must be positive");
  const double h = grid.step();
  const Integrator in = scalar_integrator(-lambda * h, h, dim);
  std::mt19937_64 rng(seed);

  std::vector<GridFunction> probes;
  probes.push_back(sample(grid, [&](double) { return Vector::Ones(dim).eval(); }));
  probes.push_back(power_iteration([&](const GridFunction& g) { return integrate(in, g); },
                                   [&](const GridFunction& y) { return integrate_adjoint(in, y); },
                                   random_function(grid, dim, rng), 10));
  double measured = 0.0;
  for (const auto& g : probes) measured = std::max(measured, grid_norm(integrate(in, g)) / grid_norm(g));

  const double re = lambda.real();
  const double bound = -std::expm1(-re * grid.tau) / re;
  const double allowed = bound * (1.0 + 5.0 * h);

  auto report = make_report("deriv-resolvent-bound", {{"lambda", complex_to_json(lambda)},
                                                      {"tau", grid.tau},
                                                      {"n_t", grid.n_t},
                                                      {"p", grid.p},
                                                      {"dim", dim}});
  report.seed = seed;
  report.tolerances["grid_factor"] = 5.0 * h;
  report.node_counts["grid"] = grid.n_t + 1;
  report.node_counts["probes"] = static_cast<long long>(probes.size());
  report.outputs = {{"measured", measured}, {"bound", bound}, {"ratio", measured / bound}};
  report.pass = measured <= allowed;
  if (!report.pass)
    fail(Errc::bound_violated, "resolvent gain " + std::to_string(measured) + " exceeds the Young bound " +
                                   std::to_string(bound));
  return report;
}

GridFunction solve_cauchy(const MatrixOperator& a, const GridFunction& g) {
  validate(g);
  if (g.dim() != a.dim()) fail(Errc::dimension_mismatch, "forcing does not match operator size");
  require_right_half_plane(a);
  const double h = g.grid.step();
  return integrate(matrix_integrator(-h * a.matrix(), h), g);
}

double cauchy_residual(const MatrixOperator& a, const GridFunction& f, const GridFunction& g) {
  require_same_grid(f.grid, g.grid);
  return grid_norm(time_derivative(f) - (g - extend_operator_to_lp(a, f)));
}

GridFunction extend_operator_to_lp(const MatrixOperator& a, const GridFunction& f) {
  validate(f);
  if (f.dim() != a.dim()) fail(Errc::dimension_mismatch, "grid function does not match operator size");
  GridFunction r = f;
  for (auto& v : r.values) v = a.matrix() * v;
  return r;
}

Json to_json(const MaxRegReport& r) {
  return {{"constant_fprime", r.constant_fprime},
          {"constant_af", r.constant_af},
          {"probe_count", r.probe_count},
          {"worst_fprime", r.worst_fprime},
          {"worst_af", r.worst_af},
          {"tau", r.grid.tau},
          {"n_t", r.grid.n_t},
          {"p", r.grid.p}};
}

MaxRegReport maxreg_constant(const MatrixOperator& a, const TimeGrid& grid, const std::vector<GridFunction>& probes) {
  validate(grid);
  if (probes.empty()) fail(Errc::invalid_argument, "maxreg_constant needs probes");
  require_right_half_plane(a);
  const double h = grid.step();
  const Integrator in = matrix_integrator(-h * a.matrix(), h);

  std::vector<double> fprime(probes.size()), af(probes.size());
  parallel_for(probes.size(), [&](std::size_t i) {
    const GridFunction& g = probes[i];
    validate(g);
    require_same_grid(g.grid, grid);
    if (g.dim() != a.dim()) fail(Errc::dimension_mismatch, "probe does not match operator size");
    const double gn = grid_norm(g, grid.p);
    if (!(gn > 0.0)) fail(Errc::invalid_argument, "probes must be nonzero");
    const GridFunction f = integrate(in, g);
    fprime[i] = grid_norm(time_derivative(f), grid.p) / gn;
    af[i] = grid_norm(extend_operator_to_lp(a, f), grid.p) / gn;
  });

  MaxRegReport r;
  r.grid = grid;
  r.probe_count = probes.size();
  for (std::size_t i = 0; i < probes.size(); ++i) {
    if (fprime[i] > r.constant_fprime) r.constant_fprime = fprime[i], r.worst_fprime = i;
    if (af[i] > r.constant_af) r.constant_af = af[i], r.worst_af = i;
  }
  return r;
}

std::vector<GridFunction> standard_probes(Eigen::Index dim, const TimeGrid& grid) {
  std::vector<GridFunction> probes;
  const double omega = 2.0 * kPi / grid.tau;
  for (Eigen::Index i = 0; i < dim; ++i) {
    probes.push_back(sample(grid, [&](double) { return Vector::Unit(dim, i).eval(); }));
    probes.push_back(sample(grid, [&](double t) { return (std::sin(omega * t) * Vector::Unit(dim, i)).eval(); }));
  }
  probes.push_back(sample(grid, [&](double) { return (Vector::Ones(dim) / std::sqrt(double(dim))).eval(); }));
  return probes;
}

std::vector<GridFunction> adversarial_probes(const MatrixOperator& a, const TimeGrid& grid, std::uint64_t seed,
                                             int iterations) {
  validate(grid);
  require_right_half_plane(a);
  const double h = grid.step();
  const Integrator in = matrix_integrator(-h * a.matrix(), h);
  const Matrix ah = a.matrix().adjoint();
  std::mt19937_64 rng(seed);

  auto solve = [&](const GridFunction& g) { return integrate(in, g); };
  auto solve_adjoint = [&](const GridFunction& y) { return integrate_adjoint(in, y); };
  std::vector<GridFunction> probes;
  probes.push_back(power_iteration([&](const GridFunction& g) { return time_derivative(solve(g)); },
                                   [&](const GridFunction& y) { return solve_adjoint(derivative_adjoint(y)); },
                                   random_function(grid, a.dim(), rng), iterations));
  probes.push_back(power_iteration(
      [&](const GridFunction& g) { return extend_operator_to_lp(a, solve(g)); },
      [&](const GridFunction& y) { return solve_adjoint(extend_operator_to_lp(MatrixOperator(ah), y)); },
      random_function(grid, a.dim(), rng), iterations));
  return probes;
}

std::vector<MaxRegReport> refinement_ladder(const MatrixOperator& a, const TimeGrid& grid, int levels,
                                            const ProbeFactory& probes) {
  if (levels < 1) fail(Errc::invalid_argument, "refinement ladder needs at least one level");
  std::vector<MaxRegReport> out;
  TimeGrid g = grid;
  for (int l = 0; l < levels; ++l, g.n_t *= 2) out.push_back(maxreg_constant(a, g, probes(g)));
  return out;
}

CertificateReport p_independence_probe(const MatrixOperator& a, const TimeGrid& grid, const std::vector<double>& ps,
                                       const ProbeFactory& probes) {
  if (ps.empty()) fail(Errc::invalid_argument, "p_independence_probe needs exponents");
  std::vector<double> fprime, af;
  for (double p : ps) {
    TimeGrid g = grid;
    g.p = p;
    validate(g);
    const auto r = maxreg_constant(a, g, probes(g));
    fprime.push_back(r.constant_fprime);
    af.push_back(r.constant_af);
  }
  auto spread = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
  };
  auto report = make_report("maxreg-p-independence", {{"matrix", matrix_to_json(a.matrix())},
                                                      {"tau", grid.tau},
                                                      {"n_t", grid.n_t},
                                                      {"p", ps}});
  report.node_counts["grid"] = grid.n_t + 1;
  report.outputs = {{"constant_fprime", fprime},
                    {"constant_af", af},
                    {"spread_fprime", spread(fprime)},
                    {"spread_af", spread(af)}};
  bool finite = true;
  for (std::size_t i = 0; i < ps.size(); ++i) finite = finite && std::isfinite(fprime[i]) && std::isfinite(af[i]);
  report.pass = finite;
  return report;
}

}  // namespace sectorsum
