#include "sectorsum/contour.hpp"

#include <cmath>
#include <algorithm>
#include <array>
#include <map>
#include <mutex>

#include "sectorsum/parallel.hpp"

namespace sectorsum {

namespace {
constexpr Complex kI{0.0, 1.0};
const Complex kTwoPiI{0.0, 2.0 * kPi};

bool arc_only(const ContourSpec& s) { return s.rho > 0.0 && s.R == s.rho; }
}  // namespace

void validate(const ContourSpec& s) {
  auto bad = [](const std::string& why) { fail(Errc::invalid_contour, why); };
  if (!(s.theta > 0.0 && s.theta < kPi)) bad("theta must lie in (0, pi)");
  if (!(s.rho >= 0.0) || !std::isfinite(s.rho)) bad("rho must be >= 0");
  if (!std::isfinite(s.delta)) bad("delta must be finite");
  if (s.order < 1 || s.order > 64) bad("panel order must lie in [1, 64]");
  if (arc_only(s)) {
    if (s.n_arc < 4) bad("arc rule needs n_arc >= 4");
    return;
  }
  if (!(s.R > std::max(s.rho, 1.0)) || !std::isfinite(s.R)) bad("truncation radius must exceed max(rho, 1)");
  if (s.n_ray < 4) bad("n_ray must be >= 4");
  if (s.rho == 0.0 && s.n_arc != 0) bad("rho = 0 admits no arc nodes");
  if (s.rho > 0.0 && s.n_arc < 4) bad("n_arc must be >= 4");
  if (s.r_inner < 0.0 || (s.rho == 0.0 && s.r_inner >= s.R)) bad("r_inner must lie in [0, R)");
  if (s.tail_exponent && !(s.tail_exponent->real() < -1.0)) bad("tail exponent needs real part < -1");
  if (!(s.tol_tail > 0.0)) bad("tol_tail must be positive");
}

Json to_json(const ContourSpec& s) {
  Json j{{"rho", s.rho},
         {"theta", s.theta},
         {"delta", s.delta},
         {"R", s.R},
         {"n_ray", s.n_ray},
         {"n_arc", s.n_arc},
         {"orientation", s.orientation == Orientation::standard ? "standard" : "negated"},
         {"reflected", s.reflected},
         {"order", s.order},
         {"r_inner", s.r_inner},
         {"tol_tail", s.tol_tail}};
  if (s.tail_exponent) j["tail_exponent"] = complex_to_json(*s.tail_exponent);
  return j;
}

const GaussRule& gauss_legendre(int order) {
  static std::map<int, GaussRule> cache;
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  auto legendre = [order](double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= order; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    return std::pair{p1, order * (x * p1 - p0) / (x * x - 1.0)};
  };
  GaussRule rule;
  rule.x.resize(static_cast<std::size_t>(order));
  rule.w.resize(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(x).second;
    const auto slot = static_cast<std::size_t>(order - 1 - i);
    rule.x[slot] = x;
    rule.w[slot] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return cache.emplace(order, std::move(rule)).first->second;
}

std::vector<std::pair<double, double>> radial_rule(double a, double b, int panels, int order, bool geometric) {
  if (!(b > a) || panels < 1) fail(Errc::invalid_contour, "radial rule needs a < b and panels >= 1");
  if (geometric && !(a > 0.0)) fail(Errc::invalid_contour, "geometric grading needs a > 0");
  const GaussRule& g = gauss_legendre(order);
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(panels * order));
  const double ratio = geometric ? std::pow(b / a, 1.0 / panels) : 0.0;
  for (int p = 0; p < panels; ++p) {
    double lo, hi;
    if (geometric) {
      lo = a * std::pow(ratio, p);
      hi = p + 1 == panels ? b : a * std::pow(ratio, p + 1);
    } else {
      lo = a + (b - a) * p / panels;
      hi = p + 1 == panels ? b : a + (b - a) * (p + 1) / panels;
    }
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int k = 0; k < order; ++k) out.emplace_back(mid + half * g.x[static_cast<std::size_t>(k)], half * g.w[static_cast<std::size_t>(k)]);
  }
  return out;
}

namespace {

int panels_for(int nodes, int order) { return std::max(1, (nodes + order - 1) / order); }

// Weights c (value) and e (error estimate) such that sum c_i G(R u_i)
// integrates the model sum_m a_m r^(k-m) over [R, inf), per unit R.
struct TailClosure {
  std::array<double, 3> u{};
  std::array<Complex, 3> value{};
  std::array<Complex, 3> estimate{};
};

TailClosure tail_closure(Complex kappa, double q) {
  TailClosure t;
  t.u = {1.0, 1.0 / q, 1.0 / (q * q)};
  auto solve = [&](int terms) {
    Eigen::MatrixXcd v(terms, terms);
    Eigen::VectorXcd b(terms);
    for (int m = 0; m < terms; ++m) {
      b(m) = -1.0 / (kappa - double(m) + 1.0);
      for (int i = 0; i < terms; ++i) v(i, m) = std::pow(t.u[static_cast<std::size_t>(i)], kappa - double(m));
    }
    return Eigen::VectorXcd(v.transpose().fullPivLu().solve(b));
  };
  const Eigen::VectorXcd c3 = solve(3), c2 = solve(2);
  for (int i = 0; i < 3; ++i) {
    t.value[static_cast<std::size_t>(i)] = c3(i);
    t.estimate[static_cast<std::size_t>(i)] = c3(i) - (i < 2 ? c2(i) : Complex(0.0));
  }
  return t;
}

// Lower ray (inward) then upper ray (outward) on the given radial rule, then
// tail-closure nodes when the ContourSpec carries a decay exponent.
void append_rays(std::vector<QuadNode>& raw, const ContourSpec& spec,
                 const std::vector<std::pair<double, double>>& rule, double last_ratio, double floor,
                 bool bounded = false) {
  const std::size_t last_panel_start = rule.size() - static_cast<std::size_t>(spec.order);
  const bool closed = spec.tail_exponent.has_value();
  for (int side : {-1, 1}) {
    const Complex dir = std::polar(1.0, side * spec.theta);
    const Complex sign = side > 0 ? 1.0 : -1.0;
    for (std::size_t j = 0; j < rule.size(); ++j) {
      const Complex w = sign * dir * rule[j].second / kTwoPiI;
      const bool estimate = !closed && !bounded && j >= last_panel_start;
      raw.push_back({rule[j].first * dir, w, estimate ? w : Complex(0.0)});
    }
  }
  if (!closed) return;
  const double q = std::clamp(last_ratio, 1.25, 2.0);
  if (!(spec.R / (q * q) > floor)) fail(Errc::invalid_contour, "truncation radius too close to the inner radius for the tail closure");
  const TailClosure t = tail_closure(*spec.tail_exponent, q);
  for (int side : {-1, 1}) {
    const Complex dir = std::polar(1.0, side * spec.theta);
    const Complex scale = (side > 0 ? 1.0 : -1.0) * dir * spec.R / kTwoPiI;
    for (std::size_t i = 0; i < 3; ++i) raw.push_back({spec.R * t.u[i] * dir, scale * t.value[i], scale * t.estimate[i]});
  }
}

void place(std::vector<QuadNode>& raw, const ContourSpec& spec) {
  const double flip = spec.orientation == Orientation::negated ? -1.0 : 1.0;
  for (auto& n : raw) {
    n.lambda = (spec.reflected ? -n.lambda : n.lambda) + spec.delta;
    n.weight *= flip;
    n.tail_weight *= flip;
  }
}

}  // namespace

std::vector<QuadNode> build_nodes(const ContourSpec& spec) {
  validate(spec);
  std::vector<QuadNode> raw;  // before reflection / shift / orientation

  if (spec.rho > 0.0) {
    const GaussRule& g = gauss_legendre(spec.order);
    const int panels = panels_for(spec.n_arc, spec.order);
    const double from = 2.0 * kPi - spec.theta, to = spec.theta;
    for (int p = 0; p < panels; ++p) {
      const double a = from + (to - from) * p / panels, b = from + (to - from) * (p + 1) / panels;
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);  // half < 0: decreasing angle
      for (int k = 0; k < spec.order; ++k) {
        const double phi = mid + half * g.x[static_cast<std::size_t>(k)];
        const Complex lam = std::polar(spec.rho, phi);
        raw.push_back({lam, kI * lam * (half * g.w[static_cast<std::size_t>(k)]) / kTwoPiI, 0.0});
      }
    }
  }

  if (!arc_only(spec)) {
    const int panels = panels_for(spec.n_ray, spec.order);
    std::vector<std::pair<double, double>> rule;
    double last_ratio;
    if (spec.rho > 0.0) {
      rule = radial_rule(spec.rho, spec.R, panels, spec.order, true);
      last_ratio = std::pow(spec.R / spec.rho, 1.0 / panels);
    } else {
      const double r0 = spec.r_inner > 0.0 ? spec.r_inner : spec.R / std::pow(2.0, panels - 1);
      rule = radial_rule(0.0, r0, 1, spec.order, false);
      if (panels > 1) {
        auto rest = radial_rule(r0, spec.R, panels - 1, spec.order, true);
        rule.insert(rule.end(), rest.begin(), rest.end());
        last_ratio = std::pow(spec.R / r0, 1.0 / (panels - 1));
      } else {
        last_ratio = 2.0;
      }
    }
    append_rays(raw, spec, rule, last_ratio, spec.rho);
  }

  place(raw, spec);
  return raw;
}

std::vector<QuadNode> ray_band_nodes(const ContourSpec& spec, double a, double b, int panels, Grading grading) {
  if (!(spec.theta > 0.0 && spec.theta < kPi)) fail(Errc::invalid_contour, "theta must lie in (0, pi)");
  if (!(a >= 0.0) || !(b > a) || panels < 1) fail(Errc::invalid_contour, "band needs 0 <= a < b and panels >= 1");
  std::vector<QuadNode> raw;
  const bool to_infinity = std::isinf(b);
  if (to_infinity) {
    if (!spec.tail_exponent) fail(Errc::invalid_contour, "an unbounded band needs a tail exponent");
    if (!(spec.R > a) || !(a > 0.0)) fail(Errc::invalid_contour, "unbounded band needs 0 < a < R");
    b = spec.R;
  }
  const bool geometric = grading == Grading::geometric;
  auto rule = radial_rule(a, b, panels, spec.order, geometric);
  ContourSpec band = spec;
  if (!to_infinity) band.tail_exponent.reset();
  const double last_ratio = geometric ? std::pow(b / a, 1.0 / panels) : b / (b - (b - a) / panels);
  append_rays(raw, band, rule, last_ratio, a, !to_infinity);
  place(raw, spec);
  return raw;
}

DunfordResult integrate(const std::vector<QuadNode>& nodes, const NodeIntegrand& integrand) {
  if (nodes.empty()) fail(Errc::invalid_contour, "empty quadrature rule");
  std::vector<Matrix> values(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) { values[i] = integrand(nodes[i].lambda); });

  const Matrix zero = Matrix::Zero(values[0].rows(), values[0].cols());
  std::vector<Matrix> terms(nodes.size()), tails;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (values[i].rows() != zero.rows() || values[i].cols() != zero.cols())
      fail(Errc::dimension_mismatch, "integrand changed shape between nodes");
    terms[i] = nodes[i].weight * values[i];
    if (nodes[i].tail_weight != Complex(0.0)) tails.push_back(nodes[i].tail_weight * values[i]);
  }
  DunfordResult r;
  r.value = pairwise_sum(terms, zero);
  r.tail_estimate = tails.empty() ? 0.0 : operator_norm(pairwise_sum(tails, zero));
  r.nodes = nodes.size();
  return r;
}

DunfordResult dunford(const ContourSpec& spec, const NodeIntegrand& integrand) {
  DunfordResult r = integrate(build_nodes(spec), integrand);
  const double scale = std::max(1.0, operator_norm(r.value));
  if (r.tail_estimate > spec.tol_tail * scale)
    fail(Errc::truncation_not_converged,
         "tail estimate " + std::to_string(r.tail_estimate) + " exceeds tolerance at R = " + std::to_string(spec.R));
  return r;
}

namespace {

Vector mirrored_sum(const LineKernel& kernel, const std::vector<double>& cuts, const std::vector<int>& panels,
                    int order, std::size_t& evaluations) {
  std::vector<std::pair<double, double>> rule;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    auto part = radial_rule(cuts[s], cuts[s + 1], panels[s], order, false);
    rule.insert(rule.end(), part.begin(), part.end());
  }
  std::vector<Vector> terms(rule.size());
  parallel_for(rule.size(), [&](std::size_t i) {
    const auto [s, w] = rule[i];
    terms[i] = w * (kernel(s) + kernel(-s));
  });
  evaluations = 2 * rule.size();
  return pairwise_sum(terms, Vector());
}

}  // namespace

PvResult pv_integral(const LineKernel& kernel, double S, int n_nodes, const std::vector<double>& breakpoints) {
  if (!(S > 0.0) || !std::isfinite(S)) fail(Errc::invalid_argument, "cutoff S must be positive");
  if (n_nodes < 2) fail(Errc::invalid_argument, "pv_integral needs at least 2 nodes");

  const double probe = 1e-6 * S;
  auto even_part = [&](double s) { return (kernel(s) + kernel(-s)).norm(); };
  const double e1 = even_part(probe), e2 = even_part(100.0 * probe);
  if (e1 > 10.0 * e2 + 1e-300 && probe * e1 > 1e-3 * probe * kernel(probe).norm())
    fail(Errc::asymmetry_detected, "kernel has a non-cancelling singular part at s = 0");

  std::vector<double> cuts{0.0};
  for (double b : breakpoints) {
    if (!(b > cuts.back() && b < S)) fail(Errc::invalid_argument, "breakpoints must be increasing inside (0, S)");
    cuts.push_back(b);
  }
  cuts.push_back(S);

  constexpr int kOrder = 8;
  const int total = std::max(2 * static_cast<int>(cuts.size() - 1), (n_nodes + kOrder - 1) / kOrder);
  std::vector<int> fine(cuts.size() - 1), coarse(cuts.size() - 1);
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const int p = std::max(2, static_cast<int>(std::lround(total * (cuts[s + 1] - cuts[s]) / S)));
    fine[s] = p;
    coarse[s] = std::max(1, p / 2);
  }
  PvResult r;
  std::size_t coarse_evals = 0;
  r.value = mirrored_sum(kernel, cuts, fine, kOrder, r.nodes);
  const Vector rough = mirrored_sum(kernel, cuts, coarse, kOrder, coarse_evals);
  r.error_estimate = (r.value - rough).norm();
  return r;
}

}  // namespace sectorsum
