#pragma once

// Time-derivative operator on a uniform grid of [0, tau] with zero initial
// value: its resolvent, the Cauchy problem f' + Af = g, discrete derivative
// norms and maximal-regularity constant estimates.

#include <cstdint>
#include <functional>
#include <vector>

#include "sectorsum/report.hpp"
#include "sectorsum/sector.hpp"

namespace sectorsum {

/// n_t intervals of width tau / n_t; n_t + 1 nodes.
struct TimeGrid {
  double tau = 1.0;
  int n_t = 256;
  double p = 2.0;

  double step() const { return tau / n_t; }
  double at(int j) const { return tau * j / n_t; }
};

void validate(const TimeGrid& grid);

struct GridFunction {
  TimeGrid grid;
  std::vector<Vector> values;  // one per node
  bool zero_start = false;     // member of the derivative's domain (f(0) = 0)

  Eigen::Index dim() const { return values.empty() ? 0 : values.front().size(); }
};

GridFunction sample(const TimeGrid& grid, const std::function<Vector(double)>& f);
void validate(const GridFunction& f);

/// Trapezoid L^p(0, tau) norm at exponent p (defaults to the grid's).
double grid_norm(const GridFunction& f, double p = 0.0);
GridFunction operator-(const GridFunction& a, const GridFunction& b);
GridFunction operator*(Complex c, const GridFunction& f);

/// Second-order centered differences, one-sided second order at the ends.
GridFunction time_derivative(const GridFunction& f);

/// f(t) = int_0^t e^{lambda (x - t)} g(x) dx, exact for piecewise-linear g.
GridFunction deriv_resolvent(Complex lambda, const GridFunction& g);

/// Worst-case L^2 gain of the resolvent over a constant probe and a seeded
/// power iteration, against (1 - e^{-Re lambda tau}) / Re lambda. Throws
/// BoundViolated when the gain exceeds the bound by more than 5 dt.
CertificateReport deriv_resolvent_bound_check(Complex lambda, const TimeGrid& grid,
                                              std::uint64_t seed = kDefaultSeed, int dim = 1);

/// f' + Af = g, f(0) = 0, by the exact exponential integrator for
/// piecewise-linear g. Requires the spectrum of A in the open right half-plane.
GridFunction solve_cauchy(const MatrixOperator& a, const GridFunction& g);

/// ||D_t f + Af - g||_p.
double cauchy_residual(const MatrixOperator& a, const GridFunction& f, const GridFunction& g);

/// (Af)(t) = A f(t).
GridFunction extend_operator_to_lp(const MatrixOperator& a, const GridFunction& f);

struct MaxRegReport {
  double constant_fprime = 0.0;  // max ||D_t f||_p / ||g||_p
  double constant_af = 0.0;      // max ||A f||_p / ||g||_p
  std::size_t probe_count = 0;
  std::size_t worst_fprime = 0;  // probe index
  std::size_t worst_af = 0;
  TimeGrid grid;
};

Json to_json(const MaxRegReport& report);

MaxRegReport maxreg_constant(const MatrixOperator& a, const TimeGrid& grid, const std::vector<GridFunction>& probes);

/// Constant and single-frequency probes along each basis direction.
std::vector<GridFunction> standard_probes(Eigen::Index dim, const TimeGrid& grid);

/// Probes maximizing the L^2 gain of g -> D_t f and g -> Af, by weighted
/// power iteration on the solution map from a seeded random start.
std::vector<GridFunction> adversarial_probes(const MatrixOperator& a, const TimeGrid& grid, std::uint64_t seed,
                                             int iterations = 10);

using ProbeFactory = std::function<std::vector<GridFunction>(const TimeGrid&)>;

/// maxreg_constant on grids with n_t, 2 n_t, ..., 2^{levels-1} n_t.
std::vector<MaxRegReport> refinement_ladder(const MatrixOperator& a, const TimeGrid& grid, int levels,
                                            const ProbeFactory& probes);

/// maxreg_constant for each p on probes built per grid; all p must exceed 1.
CertificateReport p_independence_probe(const MatrixOperator& a, const TimeGrid& grid, const std::vector<double>& ps,
                                       const ProbeFactory& probes);

}  // namespace sectorsum
