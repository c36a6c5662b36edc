#ifndef STRAINBAND_GEOMETRY_HPP
#define STRAINBAND_GEOMETRY_HPP

#include <array>
#include <complex>

#include "strainband/vec2.hpp"

namespace strainband {

// Cell coordinates (m,n) in the v1/v2 lattice basis.
struct CellIndex {
  int m = 0;
  int n = 0;
};

enum class Sublattice { A, B };

struct Neighbor {
  CellIndex cell;
  Sublattice sub;
  Vec2 bond;  // center position minus neighbor position, unit length
};

// Honeycomb lattice constants: lattice basis v1,v2, dual basis a1,a2 with
// v_i . a_j = 2*pi*delta_ij, unit bond directions e1,e2,e3, the cell-offset
// vectors w_nu = e1 - e_nu = m_nu v1 + n_nu v2, and the Brillouin-zone
// vertices K, Kp.  All values are closed-form doubles evaluated once.
class HoneycombGeometry {
 public:
  HoneycombGeometry();

  Vec2 v1, v2;
  Vec2 a1, a2;
  std::array<Vec2, 3> e;          // e1,e2,e3
  std::array<Vec2, 3> w;          // w1,w2,w3
  std::array<CellIndex, 3> nn;    // (m_nu, n_nu)
  Vec2 K, Kp;

  Vec2 base_a() const { return {0.0, 0.0}; }
  Vec2 base_b() const { return b0_; }

  Vec2 node_position(CellIndex idx, Sublattice sub) const;

  // The three nearest neighbors of a node; bond = center - neighbor.
  std::array<Neighbor, 3> neighbors_of(CellIndex idx, Sublattice sub) const;

  // sum_nu exp(i k.w_nu); vanishes exactly at K and Kp.
  std::complex<double> structure_factor(const Vec2& k) const;

 private:
  Vec2 b0_;
};

// Shared immutable instance.
const HoneycombGeometry& honeycomb();

}  // namespace strainband

#endif
