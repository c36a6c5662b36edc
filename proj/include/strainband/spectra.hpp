#ifndef STRAINBAND_SPECTRA_HPP
#define STRAINBAND_SPECTRA_HPP

#include <optional>
#include <string>
#include <vector>

#include "strainband/hamiltonian.hpp"
#include "strainband/linalg.hpp"

namespace strainband {

struct EigenResult {
  double q_parallel = 0.0;
  std::vector<double> eigenvalues;  // ascending
  std::vector<cdouble> vectors;     // row-major dim x count, empty if not requested
  int dim = 0;

  bool has_vectors() const { return !vectors.empty(); }
  cdouble vec(int row, int col) const {
    return vectors[static_cast<size_t>(row) * eigenvalues.size() + col];
  }
};

// Eigensolve of an assembled Bloch matrix.  If num_lowest_abs is set, only
// that many smallest-magnitude eigenpairs are kept (still ascending).
EigenResult eig_supercell(const BlochMatrix& H, bool want_vectors,
                          std::optional<int> num_lowest_abs = std::nullopt);

struct BandSweep {
  std::vector<double> q_grid;
  std::vector<std::vector<double>> curves;  // curves[qi][band], ascending per row
  SupercellSpec spec;
};

// Per-q eigensolves over the grid, parallel across q points.  num_bands
// smallest-magnitude eigenvalues per q (ascending per row); num_bands <= 0
// keeps the full spectrum.  Deterministic: results land in slots indexed by
// q position, so the thread count never changes the output.
BandSweep sweep(const SupercellSpec& spec, const std::vector<double>& q_grid, int num_bands,
                int threads = 0);

enum class ModeLabel { Bulk, LeftBoundary, RightBoundary };

struct ModeClassification {
  ModeLabel label = ModeLabel::Bulk;
  double boundary_weight = 0.0;  // in [0,1]
  double eigenvalue = 0.0;
  std::vector<double> profile;  // per-cell magnitudes
};

std::string mode_label_name(ModeLabel label);

// Gathers the eigenspace {|E| <= abs_tol} and classifies it into boundary
// and bulk modes by eigen-decomposing the Gram matrices V^H P V of the
// projectors onto the leftmost/rightmost layer_cells cells.  The returned
// modes are orthonormal combinations within the subspace.
std::vector<ModeClassification> classify_degenerate_subspace(const EigenResult& result,
                                                             double abs_tol, int layer_cells);

enum class DecayModel { Gaussian, Exponential, Mixed };

struct DecayFit {
  double gaussian_curvature = 0.0;  // |c2| of the quadratic log-fit
  double exp_rate = 0.0;            // mean |slope| of the outer-tail linear fits
  DecayModel model = DecayModel::Gaussian;
};

// Least-squares classification of log(profile) tails against linear and
// quadratic models.  Requires >= 8 usable points per tail.
DecayFit decay_fit(const std::vector<double>& profile, int center_window);

// max - min of one sorted-index band over a q window.
double flatness(const BandSweep& sweep, int band_index, double q_min, double q_max);

}  // namespace strainband

#endif
