#ifndef STRAINBAND_VALIDATION_HPP
#define STRAINBAND_VALIDATION_HPP

#include <vector>

#include "strainband/dirac1d.hpp"
#include "strainband/hamiltonian.hpp"
#include "strainband/spectra.hpp"

namespace strainband {

// Two-component Dirac eigenfunction on the staggered grids of a
// DiracDiscretization.
struct DiracGridFunction {
  std::vector<double> agrid, bgrid;
  std::vector<cdouble> a, b;
};

// Leading-order two-scale eigenstate ansatz evaluated on the supercell:
//   psi_{m,n} = delta^{1/2} e^{iK.x} e^{i k_par X2/3} U Psi0(X1),
//   U = diag(e^{-i pi/6}, e^{i pi/6}),
// mapped onto the 4-node AC layout; q_par = delta k_par / (3 pi).
struct EnvelopeAnsatz {
  double k_parallel = 0.0;
  double delta = 0.0;
  double q_parallel = 0.0;
  double e1 = 0.0;  // Dirac eigenvalue paired with Psi0
  std::vector<cdouble> values;
};

// Fails with a domain-coverage error when the envelope has not decayed below
// 1e-8 (relative to its peak) at the truncation edge, or the grid does not
// reach the edge.  AC orientation only; delta > 0.
EnvelopeAnsatz build_ansatz(const DiracGridFunction& psi0, double e1, double k_parallel,
                            double delta, const SupercellSpec& spec);

struct ResidualReport {
  double delta = 0.0;
  double residual = 0.0;     // ||(H - delta E1) psi|| / ||psi||
  double energy_used = 0.0;  // delta E1
};

ResidualReport residual(const EnvelopeAnsatz& ansatz, const SupercellSpec& spec);

// Second eigenvalue corrector from the solvability quadrature
//   -E2 ||Psi0||^2 = <Psi0^A, R2^A> + <Psi0^B, R2^B>,
// with the remainder terms R2 built from spectral derivatives of Psi0 and
// f2 = -(sqrt(3)/4) d'.  Psi0 is normalized to ||.||^2 = sqrt(3)/2
// internally.  Grids must be uniform with a power-of-two point count.
cdouble compute_E2(const DiracGridFunction& psi0, double e1, const KappaProfile& profile);

struct RateEstimate {
  std::vector<double> deltas;
  std::vector<double> values;
  double fitted_order = 0.0;
  double r_squared = 0.0;
};

// Log-log least-squares slope; rejects nonpositive values and needs >= 3
// points.
RateEstimate rate_fit(const std::vector<double>& deltas, const std::vector<double>& values);

// l2 distance between the normalized ansatz and the nearest (max overlap,
// phase aligned) normalized eigenvector column of `modes`.
double nearest_eigenvector_distance(const EnvelopeAnsatz& ansatz, const EigenResult& modes);

// Orchestration of the multiscale validation for the regularized AC profile:
// residual rates for the zero mode, zero-band eigenvalue decay, and the
// first-nonzero-level eigenvalue corrector versus E2.
struct ValidationReport {
  std::vector<double> deltas;
  std::vector<double> residuals;
  double residual_order = 0.0;
  std::vector<double> zero_band_abs_e;
  double zero_band_order = 0.0;
  double e1_first_level = 0.0;
  double e2_first_level = 0.0;
  double e2_zero_mode_abs = 0.0;
  std::vector<double> corrector_ratio;  // |E^d - d E1| / d^2 per delta
};

struct ValidationConfig {
  double L = 1.0;
  double mollifier_width = 0.2;
  double t1 = -2.0;
  double k_parallel = 0.0;
  std::vector<double> deltas = {0.08, 0.04, 0.02};
  double dirac_half_width = 40.0;
  int dirac_cells = 8192;
  double coverage_x = 12.0;        // supercell reach for the zero-mode runs
  double coverage_x_level = 16.0;  // reach for the first-level eigenvalue runs
  int threads = 0;
};

ValidationReport run_regularized_validation(const ValidationConfig& cfg);

}  // namespace strainband

#endif
