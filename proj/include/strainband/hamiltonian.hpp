#ifndef STRAINBAND_HAMILTONIAN_HPP
#define STRAINBAND_HAMILTONIAN_HPP

#include <array>
#include <complex>
#include <vector>

#include "strainband/deformation.hpp"
#include "strainband/geometry.hpp"

namespace strainband {

using cdouble = std::complex<double>;

enum class HoppingMode { ExactDistance, FiniteDiffStrain, CellLinearized };
enum class Orientation { AC, ZZ };
enum class BoundaryCondition { ZeroTruncation, Periodic };

// Ribbon supercell description.  Cells s in [-N_T, N_T], four nodes per
// cell (A_s, B_s, C_s, D_s); matrix dimension 4*(2 N_T + 1).
struct SupercellSpec {
  Orientation orientation = Orientation::AC;
  int n_t = 2;
  BoundaryCondition boundary = BoundaryCondition::ZeroTruncation;
  double delta = 0.0;
  HoppingMode hopping = HoppingMode::FiniteDiffStrain;
  DisplacementField field = DisplacementField::none();
  double t1 = -2.0;

  int dim() const { return 4 * (2 * n_t + 1); }
};

// Hermitian Bloch matrix at one quasi-momentum.  Assembled upper triangle
// first and mirrored, so entry(i,j) == conj(entry(j,i)) bit-for-bit.
// Nearest-neighbor stencils keep |i-j| <= 7.
class BlochMatrix {
 public:
  BlochMatrix(int dim, double q_parallel)
      : dim_(dim), q_parallel_(q_parallel), a_(static_cast<size_t>(dim) * dim) {}

  int dim() const { return dim_; }
  double q_parallel() const { return q_parallel_; }

  cdouble operator()(int i, int j) const { return a_[static_cast<size_t>(i) * dim_ + j]; }
  cdouble& at(int i, int j) { return a_[static_cast<size_t>(i) * dim_ + j]; }
  const std::vector<cdouble>& data() const { return a_; }

  // Copy each strict upper-triangle entry onto its conjugate mirror.
  void mirror_upper();

  std::vector<cdouble> apply(const std::vector<cdouble>& v) const;

 private:
  int dim_;
  double q_parallel_;
  std::vector<cdouble> a_;  // row-major
};

// Bulk 2x2 Bloch matrix of the undeformed lattice: zero diagonal,
// off-diagonal sum_nu exp(i k.w_nu).
std::array<cdouble, 4> bulk_bloch(const Vec2& k);

// Band dispersion E_-(k) <= 0 <= E_+(k) = |sum_nu exp(i k.w_nu)|.
std::pair<double, double> bulk_dispersion(const Vec2& k);

// Hopping coefficient between undeformed nearest-neighbor positions X, Y
// with X - Y = bond (X is the A-type endpoint; |bond| = 1):
//   ExactDistance   : h(|X + u(dX) - Y - u(dY)|), h(r) = 1 + t1 (r - 1)
//   FiniteDiffStrain: 1 + t1 <u(dX) - u(dY), bond>
//   CellLinearized  : 1 + d t1 bond^T grad u(d X) bond
double hopping(const Vec2& X, const Vec2& Y, const Vec2& bond, double delta,
               const DisplacementField& field, double t1, HoppingMode mode);

// Assembles the Hermitian Bloch Hamiltonian of the truncated ribbon at one
// quasi-momentum.  Wrap-around bonds along the ribbon period carry phase
// exp(+-i 3 pi q) for AC and exp(+-i 2 pi q) for ZZ.  Rejects q outside the
// orientation's fundamental interval and N_T < 2.
BlochMatrix assemble_supercell(const SupercellSpec& spec, double q_parallel);

// Node bookkeeping shared with the validation module: position and
// honeycomb cell index of each supercell node.  Index layout is
// 4*(s + N_T) + {0:A, 1:B, 2:C, 3:D}.
struct SupercellNode {
  Vec2 pos;
  CellIndex cell;
  Sublattice sub;
};
std::vector<SupercellNode> supercell_nodes(const SupercellSpec& spec);

// +1 on A-sublattice rows, -1 on B-sublattice rows; conjugating the
// assembled matrix by these signs flips its sign exactly (bipartite
// chiral symmetry).
std::vector<int> chiral_signs(const SupercellSpec& spec);

}  // namespace strainband

#endif
