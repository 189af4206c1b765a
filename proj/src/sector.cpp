#include "sectorsum/sector.hpp"

#include <cmath>

#include "sectorsum/calculus.hpp"
#include "sectorsum/parallel.hpp"

namespace sectorsum {

void validate(const SectorSpec& spec) {
  if (!(spec.theta >= 0.0 && spec.theta < kPi)) fail(Errc::invalid_argument, "sector angle must lie in [0, pi)");
  if (!(spec.K >= 1.0) || !std::isfinite(spec.K)) fail(Errc::invalid_argument, "sector constant must be >= 1");
}

MatrixOperator::MatrixOperator(Matrix m, std::optional<SectorSpec> certified)
    : m_(std::move(m)), certified_(certified) {
  require_square(m_, "operator matrix");
  if (!m_.allFinite()) fail(Errc::invalid_argument, "operator matrix has non-finite entries");
  if (certified_) validate(*certified_);
}

void validate(const SectorSampling& s) {
  if (s.ray_nodes < 1 || s.arc_nodes < 1 || s.interior_radii < 1)
    fail(Errc::invalid_argument, "sampling counts must be >= 1");
  if (!(s.r_min > 0.0) || !(s.r_max > s.r_min)) fail(Errc::invalid_argument, "sampling needs 0 < r_min < r_max");
}

Json to_json(const SectorSampling& s) {
  return {{"ray_nodes", s.ray_nodes}, {"arc_nodes", s.arc_nodes}, {"interior_radii", s.interior_radii},
          {"r_min", s.r_min},         {"r_max", s.r_max}};
}

namespace {

std::vector<double> log_radii(double r_min, double r_max, int count) {
  std::vector<double> r(static_cast<std::size_t>(count));
  if (count == 1) {
    r[0] = std::sqrt(r_min * r_max);
    return r;
  }
  const double a = std::log(r_min), b = std::log(r_max);
  for (int i = 0; i < count; ++i) r[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (count - 1));
  // exp(log) is not exact at the symmetric midpoint; pin r = 1 when it is on the grid
  if (count % 2 == 1 && std::abs(a + b) < 1e-12) r[static_cast<std::size_t>(count / 2)] = 1.0;
  return r;
}

}  // namespace

std::vector<Complex> sector_samples(double theta, const SectorSampling& s) {
  validate(s);
  std::vector<Complex> z;
  z.emplace_back(0.0, 0.0);
  const auto ray_r = log_radii(s.r_min, s.r_max, s.ray_nodes);
  const Complex up = std::polar(1.0, theta), down = std::polar(1.0, -theta);
  for (double r : ray_r) {
    z.push_back(r * up);
    if (theta > 0.0) z.push_back(r * down);
  }
  if (theta > 0.0) {
    for (double r : log_radii(s.r_min, s.r_max, s.interior_radii))
      for (int j = 1; j <= s.arc_nodes; ++j) {
        const double ang = -theta + 2.0 * theta * j / (s.arc_nodes + 1);
        z.push_back(std::polar(r, ang));
      }
  }
  return z;
}

Vector resolvent_apply(const MatrixOperator& a, Complex z, const Vector& x) {
  return solve_shifted(a.matrix(), z, x);
}

double resolvent_profile(const Matrix& a, Complex z) {
  return (1.0 + std::abs(z)) * operator_norm(shifted_inverse(a, z));
}

namespace {

// Evaluates the profile at every sample; singular samples are reported as
// +infinity so the caller decides which error to raise.
std::vector<double> profile_at(const Matrix& a, const std::vector<Complex>& zs) {
  std::vector<double> values(zs.size());
  parallel_for(zs.size(), [&](std::size_t i) {
    try {
      values[i] = resolvent_profile(a, zs[i]);
    } catch (const Error& e) {
      if (e.code() != Errc::singular_shift) throw;
      values[i] = std::numeric_limits<double>::infinity();
    }
  });
  return values;
}

}  // namespace

SectorCertificate certify_sector(const MatrixOperator& a, double theta, const SectorSampling& sampling) {
  if (!(theta >= 0.0 && theta < kPi)) fail(Errc::invalid_argument, "theta must lie in [0, pi)");
  const auto zs = sector_samples(theta, sampling);
  const auto values = profile_at(a.matrix(), zs);

  SectorCertificate c;
  c.samples = zs.size();
  for (std::size_t i = 0; i < zs.size(); ++i) {
    if (std::isinf(values[i]))
      fail(Errc::not_sectorial_at_angle, "resolvent of -A fails at a sampled point of the sector", zs[i]);
    if (values[i] > c.k_hat) {
      c.k_hat = values[i];
      c.argmax = zs[i];
    }
  }
  // ray samples follow the apex: index 1.. alternate up/down when theta > 0
  const std::size_t per_radius = theta > 0.0 ? 2 : 1;
  const std::size_t last = 1 + per_radius * (static_cast<std::size_t>(sampling.ray_nodes) - 1);
  for (std::size_t k = 0; k < per_radius; ++k) {
    c.edge_min = std::max(c.edge_min, values[1 + k]);
    c.edge_max = std::max(c.edge_max, values[last + k]);
  }
  return c;
}

CertificateReport certificate_report(const MatrixOperator& a, double theta, const SectorSampling& sampling,
                                     const SectorCertificate& c) {
  auto report = make_report("certify-sector",
                            {{"matrix", matrix_to_json(a.matrix())}, {"theta", theta}, {"sampling", to_json(sampling)}});
  report.node_counts["samples"] = static_cast<long long>(c.samples);
  report.outputs = {{"k_hat", c.k_hat},
                    {"argmax", complex_to_json(c.argmax)},
                    {"edge_min", c.edge_min},
                    {"edge_max", c.edge_max}};
  report.pass = std::isfinite(c.k_hat);
  return report;
}

CertificateReport extended_sector_check(const MatrixOperator& a, const SectorSpec& spec,
                                        const SectorSampling& sampling) {
  validate(spec);
  double k_hat = 0.0;
  bool k_consistent = false;
  try {
    k_hat = certify_sector(a, spec.theta, sampling).k_hat;
    k_consistent = k_hat <= spec.K;
  } catch (const Error& e) {
    if (e.code() != Errc::not_sectorial_at_angle) throw;
    fail(Errc::extension_violated, "operator is not sectorial at the requested angle", e.where());
  }

  constexpr int kDiskAngles = 16;
  std::vector<Complex> zs;
  for (Complex lam : sector_samples(spec.theta, sampling)) {
    const double radius = (1.0 + std::abs(lam)) / (2.0 * spec.K);
    for (double frac : {0.5, 1.0})
      for (int j = 0; j < kDiskAngles; ++j) zs.push_back(lam + std::polar(frac * radius, 2.0 * kPi * j / kDiskAngles));
  }
  const auto values = profile_at(a.matrix(), zs);
  const double bound = 2.0 * spec.K + 1.0;
  double worst = 0.0;
  Complex worst_z{};
  for (std::size_t i = 0; i < zs.size(); ++i) {
    if (values[i] > bound)
      fail(Errc::extension_violated,
           "thickened-sector bound 2K+1 = " + std::to_string(bound) + " exceeded (value " +
               std::to_string(values[i]) + (k_consistent ? ")" : "; K is below the sampled sector constant)"),
           zs[i]);
    if (values[i] > worst) {
      worst = values[i];
      worst_z = zs[i];
    }
  }

  auto report = make_report("extended-sector-check", {{"matrix", matrix_to_json(a.matrix())},
                                                      {"theta", spec.theta},
                                                      {"K", spec.K},
                                                      {"sampling", to_json(sampling)}});
  report.node_counts["samples"] = static_cast<long long>(zs.size());
  report.outputs = {{"k_hat", k_hat},
                    {"k_consistent", k_consistent},
                    {"bound", bound},
                    {"worst", worst},
                    {"worst_z", complex_to_json(worst_z)},
                    {"margin", bound - worst}};
  report.pass = k_consistent;
  return report;
}

DecayProbe decay_probe(const MatrixOperator& a, double phi, double eta, double theta_prime, const Vector& y,
                       const SectorSampling& sampling) {
  if (!(phi > 0.0 && phi < 1.0)) fail(Errc::invalid_argument, "phi must lie in (0, 1)");
  if (!(eta >= 0.0 && eta < phi)) fail(Errc::invalid_argument, "eta must lie in [0, phi)");
  if (!(theta_prime >= 0.0 && theta_prime < kPi)) fail(Errc::invalid_argument, "theta' must lie in [0, pi)");
  if (a.certified() && theta_prime >= a.certified()->theta)
    fail(Errc::invalid_argument, "theta' must be below the certified angle");
  if (y.size() != a.dim()) fail(Errc::dimension_mismatch, "probe vector size does not match operator");
  if (sampling.r_max < 1e6) fail(Errc::invalid_argument, "decay probe needs r_max >= 1e6");

  const Vector x = complex_power(a, Complex(-phi, 0.0)) * y;
  const Vector ax = a.matrix() * x;
  const auto zs = sector_samples(theta_prime, sampling);
  std::vector<double> values(zs.size());
  parallel_for(zs.size(), [&](std::size_t i) {
    const Complex z = zs[i];
    const Complex weight = z == Complex(0.0) ? Complex(eta == 0.0 ? 1.0 : 0.0) : std::pow(z, eta);
    values[i] = std::abs(weight) * solve_shifted(a.matrix(), z, ax).norm();
  });

  DecayProbe probe;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    if (values[i] > probe.sup) {
      probe.sup = values[i];
      probe.argmax = zs[i];
    }
    if (std::abs(zs[i]) <= sampling.r_max / 10.0 * (1.0 + 1e-12)) probe.sup_reduced = std::max(probe.sup_reduced, values[i]);
  }
  if (probe.sup > 2.0 * probe.sup_reduced)
    fail(Errc::unbounded_suspected, "sup grows with the sampled radius", probe.argmax);
  return probe;
}

}  // namespace sectorsum
