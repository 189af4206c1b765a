#pragma once

// Sector-boundary paths, their composite Gauss-Legendre rules, the Dunford
// integral engine and symmetric principal-value line integrals.

#include <functional>
#include <optional>
#include <vector>

#include "sectorsum/linops.hpp"
#include "sectorsum/report.hpp"

namespace sectorsum {

enum class Orientation { standard, negated };

/// The path {rho e^{i phi}: theta <= phi <= 2pi - theta} u {r e^{+-i theta}: r >= rho},
/// truncated at R and traversed with the region |arg l| > theta on its left.
/// `reflected` maps every node l to -l with unchanged weights, so the rule
/// integrates F(-l) dl over the path; integrals over -Gamma are taken in this
/// sense. `delta` then translates the nodes.
struct ContourSpec {
  double rho = 0.0;
  double theta = kPi / 2;
  double delta = 0.0;
  double R = 1e4;
  int n_ray = 128;   // nodes per ray
  int n_arc = 0;     // nodes on the arc (0 when rho = 0)
  Orientation orientation = Orientation::standard;
  bool reflected = false;
  int order = 8;            // Gauss-Legendre nodes per panel
  double r_inner = 0.0;     // rho = 0: first ray panel is [0, r_inner]; 0 picks ratio-2 grading
  // Complex exponent k with integrand ~ |l|^k along the rays (Re k < -1).
  // When set, the truncated tail is closed by fitting c r^k + d r^(k-1) + e r^(k-2).
  std::optional<Complex> tail_exponent;
  double tol_tail = 1e-8;
};

void validate(const ContourSpec& spec);
Json to_json(const ContourSpec& spec);

struct QuadNode {
  Complex lambda;
  Complex weight;       // includes dl/ds and 1/(2 pi i)
  Complex tail_weight;  // weight of this node in the truncation-error estimate
};

/// Nodes for arc then lower ray then upper ray, then tail-closure nodes.
std::vector<QuadNode> build_nodes(const ContourSpec& spec);

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};
const GaussRule& gauss_legendre(int order);

/// Ray panels between radii a < b: geometric grading when `geometric`,
/// uniform otherwise. Returns (r, dr-weight) pairs.
std::vector<std::pair<double, double>> radial_rule(double a, double b, int panels, int order, bool geometric);

enum class Grading { uniform, geometric };

/// Both rays of `spec` restricted to radii in [a, b] with `panels` panels per
/// ray (same orientation, reflection and shift as build_nodes). With
/// b = +infinity the band runs to spec.R geometrically and is closed with
/// spec.tail_exponent, which must then be set.
std::vector<QuadNode> ray_band_nodes(const ContourSpec& spec, double a, double b, int panels, Grading grading);

using NodeIntegrand = std::function<Matrix(Complex)>;

struct DunfordResult {
  Matrix value;
  double tail_estimate = 0.0;
  std::size_t nodes = 0;
};

/// Sum of weight_j * F(l_j) over the rule (nodes evaluated in parallel,
/// pairwise reduction). TruncationNotConverged when the tail estimate exceeds
/// tol_tail * max(1, ||value||).
DunfordResult dunford(const ContourSpec& spec, const NodeIntegrand& integrand);

/// Same reduction over an explicit node list; no convergence check.
DunfordResult integrate(const std::vector<QuadNode>& nodes, const NodeIntegrand& integrand);

/// Quadrature of a vector-valued kernel on [-S, S] \ {0} in the symmetric
/// (principal-value) sense: the integrand on [0, S] is k(s) + k(-s), so the odd
/// singular part cancels node by node.
struct PvResult {
  Vector value;
  double error_estimate = 0.0;  // against the rule with half the panels
  std::size_t nodes = 0;
};

using LineKernel = std::function<Vector(double)>;

/// `breakpoints` are interior points of (0, S) where the kernel has kinks or
/// jumps; panels never straddle them.
PvResult pv_integral(const LineKernel& kernel, double S, int n_nodes,
                     const std::vector<double>& breakpoints = {});

}  // namespace sectorsum
