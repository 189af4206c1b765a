#pragma once

// Sectorial operators: resolvents, sampled certification of the sector
// constant, the thickened-sector bound and the fractional-domain decay probe.

#include <optional>
#include <vector>

#include "sectorsum/linops.hpp"
#include "sectorsum/report.hpp"

namespace sectorsum {

/// Resolvent set of -A contains the closed sector |arg z| <= theta (plus 0)
/// with (1+|z|) ||(A+z)^{-1}|| <= K there.
struct SectorSpec {
  double theta = 0.0;
  double K = 1.0;
};

void validate(const SectorSpec& spec);

class MatrixOperator {
 public:
  MatrixOperator(Matrix m, std::optional<SectorSpec> certified = std::nullopt);
  template <typename Derived>
  MatrixOperator(const Eigen::MatrixBase<Derived>& m) : MatrixOperator(Matrix(m)) {}

  const Matrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }
  const std::optional<SectorSpec>& certified() const noexcept { return certified_; }
  MatrixOperator with_certificate(SectorSpec spec) const { return {m_, spec}; }

 private:
  Matrix m_;
  std::optional<SectorSpec> certified_;
};

/// Discretization of the supremum over the sector: two boundary rays with
/// log-spaced radii, an interior polar grid and the apex z = 0.
struct SectorSampling {
  int ray_nodes = 241;       // per ray; odd keeps r = 1 on the grid
  int arc_nodes = 24;        // interior angles per circle
  int interior_radii = 41;   // log-spaced circles for the interior grid
  double r_min = 1e-6;
  double r_max = 1e6;
};

void validate(const SectorSampling& s);
Json to_json(const SectorSampling& s);

/// Sample points of the closed sector |arg z| <= theta in a fixed order.
std::vector<Complex> sector_samples(double theta, const SectorSampling& s);

Vector resolvent_apply(const MatrixOperator& a, Complex z, const Vector& x);

/// (1+|z|) ||(A+z)^{-1}||.
double resolvent_profile(const Matrix& a, Complex z);

struct SectorCertificate {
  double k_hat = 0.0;        // a lower bound for the true sector constant
  Complex argmax{};
  double edge_min = 0.0;     // profile at the smallest sampled radius (worst over the rays)
  double edge_max = 0.0;     // and at the largest one; ~1 means saturation
  std::size_t samples = 0;
};

/// Sampled sector constant. A singular sample raises NotSectorialAtAngle with
/// the offending z.
SectorCertificate certify_sector(const MatrixOperator& a, double theta,
                                 const SectorSampling& sampling = {});
CertificateReport certificate_report(const MatrixOperator& a, double theta,
                                     const SectorSampling& sampling, const SectorCertificate& c);

/// Checks (1+|z|)||(A+z)^{-1}|| <= 2K+1 on disks of radius (1+|l|)/(2K)
/// around sampled l in the sector. Throws ExtensionViolated at the first
/// offending z in sample order.
CertificateReport extended_sector_check(const MatrixOperator& a, const SectorSpec& spec,
                                        const SectorSampling& sampling = {});

struct DecayProbe {
  double sup = 0.0;          // over all sampled radii up to r_max
  double sup_reduced = 0.0;  // radii up to r_max / 10
  Complex argmax{};
};

/// sup over the sector of angle theta_prime of ||z^eta A (A+z)^{-1} x|| with
/// x = A^{-phi} y. Requires 0 <= eta < phi < 1. UnboundedSuspected when the
/// sup more than doubles between r_max/10 and r_max.
DecayProbe decay_probe(const MatrixOperator& a, double phi, double eta, double theta_prime,
                       const Vector& y, const SectorSampling& sampling = {});

}  // namespace sectorsum
