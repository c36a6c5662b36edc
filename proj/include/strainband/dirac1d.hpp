#ifndef STRAINBAND_DIRAC1D_HPP
#define STRAINBAND_DIRAC1D_HPP

#include <functional>
#include <optional>
#include <vector>

#include "strainband/deformation.hpp"
#include "strainband/linalg.hpp"

namespace strainband {

// Domain-wall coefficient of the effective 1D Dirac operator
//   D(k_par) = (3/2) [ -i d/dX1 sigma_1 + kappa(X1) sigma_2 ],
//   kappa(X1) = k_par/3 - (t1/2) d'(X1).
struct KappaProfile {
  double k_parallel = 0.0;
  double t1 = -2.0;
  std::function<double(double)> d_prime;
  std::optional<double> kappa_plus;   // limit at +infinity, when it exists
  std::optional<double> kappa_minus;  // limit at -infinity

  double kappa(double x) const { return k_parallel / 3.0 - 0.5 * t1 * d_prime(x); }

  static KappaProfile from_profile(const UnidirectionalProfile& p, double k_parallel, double t1);
};

// Staggered-grid discretization of D(k_par) on [-W, W]: Psi^A on the n_cells
// points x_j = -W + j h, Psi^B on x_j + h/2 (h = 2W/n_cells); kappa enters at
// the A-B bond midpoints.  The matrix is Hermitian tridiagonal in the
// interleaved (a_0, b_0, a_1, b_1, ...) layout and anticommutes with
// diag(+1 on A, -1 on B) exactly.
struct DiracDiscretization {
  double half_width = 0.0;
  int n_cells = 0;
  double h = 0.0;
  bool periodic = false;
  std::vector<double> agrid, bgrid;
  std::vector<double> diag;      // all zeros (kept explicit for the solver)
  std::vector<cdouble> offdiag;  // offdiag[i] couples i and i+1
  cdouble wrap = 0.0;            // coupling (2n-1, 0) when periodic

  int dim() const { return 2 * n_cells; }

  // y = D x for interleaved x.
  std::vector<cdouble> apply(const std::vector<cdouble>& x) const;

  // Apply to a staggered two-component function given as separate A/B grids.
  void apply_components(const std::vector<cdouble>& a, const std::vector<cdouble>& b,
                        std::vector<cdouble>& out_a, std::vector<cdouble>& out_b) const;
};

DiracDiscretization discretize(const KappaProfile& profile, double half_width, int n_cells,
                               bool periodic = false);

// Essential-spectrum edge a = (3/2) min(|kappa_+|, |kappa_-|).  Fails when
// the limits are not set.
double essential_gap(const KappaProfile& profile);

// Closed-form zero mode exp(-+ int_0^x kappa): lives on B when
// kappa_+ > 0 > kappa_-, on A when kappa_+ < 0 < kappa_-.  Cumulative Simpson
// on the given uniform grid; normalized to ||Psi||_L2^2 = sqrt(3)/2.
// When the profile has no stated limits the signs are taken from kappa at the
// grid ends.  Fails if kappa does not change sign.
struct ZeroMode {
  bool on_b = true;  // component carrying the mode
  std::vector<double> values;
};
ZeroMode zero_mode_closed_form(const KappaProfile& profile, const std::vector<double>& grid);

// Landau levels +-(3 sqrt(2)/2) sqrt(|t1| s), s = 0..s_max, deduplicated at
// zero and sorted ascending.
std::vector<double> landau_levels(double t1, int s_max);

// Harmonic-oscillator eigenfunction of D(k_par) for the quadratic profile
// (d' = 2 X1): Hermite function components centered at the kappa zero
// crossing, normalized to ||psi||_L2^2 = sqrt(3)/2 on the grid.
struct LandauMode {
  std::vector<cdouble> a, b;
  double omega = 0.0;
};
LandauMode landau_eigenfunction(int s, int branch, double k_parallel, double t1,
                                const std::vector<double>& grid);

struct DiracSpectrumResult {
  double gap_edge_a = 0.0;
  std::vector<double> in_gap_eigenvalues;  // ascending, inside (-0.95a, 0.95a)
  // eigenfunctions[i] pairs with in_gap_eigenvalues[i]
  std::vector<std::vector<cdouble>> eigenfunctions_a;
  std::vector<std::vector<cdouble>> eigenfunctions_b;
};

// Eigensolve of the discretized operator filtered to the interior of the
// essential gap (5% margin keeps box-discretized continuum states out); the
// numerically degenerate zero cluster is rotated into the sublattice basis
// and the box-edge artifact member is dropped.  Checks the chiral +-E
// pairing of the returned list.  max_count > 0 trims to that many
// smallest-magnitude states (complete tie groups are kept); useful for
// unbounded profiles whose box-effective gap holds many Landau levels.
DiracSpectrumResult in_gap_spectrum(const DiracDiscretization& disc, const KappaProfile& profile,
                                    int max_count = 0);

}  // namespace strainband

#endif
