#include "strainband/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>

namespace strainband {

namespace {
constexpr double kPi = 3.14159265358979323846;
const double kSqrt3 = std::sqrt(3.0);
}  // namespace

void BlochMatrix::mirror_upper() {
  for (int i = 0; i < dim_; ++i)
    for (int j = i + 1; j < dim_; ++j) at(j, i) = std::conj((*this)(i, j));
}

std::vector<cdouble> BlochMatrix::apply(const std::vector<cdouble>& v) const {
  std::vector<cdouble> out(dim_, cdouble(0.0, 0.0));
  for (int i = 0; i < dim_; ++i) {
    cdouble acc = 0.0;
    const cdouble* row = a_.data() + static_cast<size_t>(i) * dim_;
    for (int j = 0; j < dim_; ++j) acc += row[j] * v[j];
    out[i] = acc;
  }
  return out;
}

std::array<cdouble, 4> bulk_bloch(const Vec2& k) {
  cdouble s = honeycomb().structure_factor(k);
  // row-major 2x2: [0 s; conj(s) 0]
  return {cdouble(0.0), s, std::conj(s), cdouble(0.0)};
}

std::pair<double, double> bulk_dispersion(const Vec2& k) {
  double m = std::abs(honeycomb().structure_factor(k));
  return {-m, m};
}

double hopping(const Vec2& X, const Vec2& Y, const Vec2& bond, double delta,
               const DisplacementField& field, double t1, HoppingMode mode) {
  switch (mode) {
    case HoppingMode::ExactDistance: {
      Vec2 sep = bond + field.u(X * delta) - field.u(Y * delta);
      return 1.0 + t1 * (sep.norm() - 1.0);
    }
    case HoppingMode::FiniteDiffStrain: {
      Vec2 du = field.u(X * delta) - field.u(Y * delta);
      return 1.0 + t1 * du.dot(bond);
    }
    case HoppingMode::CellLinearized: {
      Mat2 g = field.grad(X * delta);
      return 1.0 + delta * t1 * g.quad(bond);
    }
  }
  return 1.0;
}

std::vector<SupercellNode> supercell_nodes(const SupercellSpec& spec) {
  const HoneycombGeometry& geo = honeycomb();
  const int nt = spec.n_t;
  std::vector<SupercellNode> nodes;
  nodes.reserve(4 * (2 * nt + 1));
  auto push = [&](CellIndex c, Sublattice sub) {
    nodes.push_back({geo.node_position(c, sub), c, sub});
  };
  for (int s = -nt; s <= nt; ++s) {
    if (spec.orientation == Orientation::AC) {
      // A_s = A_{2s,s} at (sqrt3 s, 0) (the s = 0 A-node sits at X1 = 0),
      // B_s = B_{2s,s}, C_s = A_{2s-1,s-1}, D_s = B_{2s-1,s-1}.
      push({2 * s, s}, Sublattice::A);
      push({2 * s, s}, Sublattice::B);
      push({2 * s - 1, s - 1}, Sublattice::A);
      if (s == -nt && spec.boundary == BoundaryCondition::ZeroTruncation) {
        // Mirror-symmetric truncation: the leftmost D slot holds an A-type
        // node attached to B_{-NT}, the mirror image of the dangling A_{NT}
        // on the right.  Both edges then carry the same pair of
        // boundary-localized zero modes.
        push({-2 * nt - 2, -nt - 1}, Sublattice::A);
      } else {
        push({2 * s - 1, s - 1}, Sublattice::B);
      }
    } else {
      // ZZ: cells stack vertically with the single inter-cell bond vertical,
      // so zero truncation exposes zigzag edges (each edge atom keeps its two
      // in-row diagonals).  A_s = A_{1,s+1} at (sqrt3/2, 3s+3/2),
      // B_s = B_{1,s+1} at (0, 3s+1), C_s = A_{0,s+1} at (0, 3s+3),
      // D_s = B_{2,s+2} at (sqrt3/2, 3s+5/2).
      push({1, s + 1}, Sublattice::A);
      push({1, s + 1}, Sublattice::B);
      push({0, s + 1}, Sublattice::A);
      push({2, s + 2}, Sublattice::B);
    }
  }
  return nodes;
}

std::vector<int> chiral_signs(const SupercellSpec& spec) {
  std::vector<SupercellNode> nodes = supercell_nodes(spec);
  std::vector<int> s(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i)
    s[i] = (nodes[i].sub == Sublattice::A) ? 1 : -1;
  return s;
}

BlochMatrix assemble_supercell(const SupercellSpec& spec, double q_parallel) {
  const HoneycombGeometry& geo = honeycomb();
  const int nt = spec.n_t;
  if (nt < 2) throw std::invalid_argument("assemble_supercell: N_T must be >= 2");
  if (spec.delta < 0.0) throw std::invalid_argument("assemble_supercell: delta must be >= 0");

  const bool ac = spec.orientation == Orientation::AC;
  const double qlo = ac ? -1.0 / 3.0 : -0.5;
  const double qhi = ac ? 1.0 / 3.0 : 0.5;
  if (!(q_parallel >= qlo && q_parallel < qhi))
    throw std::invalid_argument("assemble_supercell: q_parallel outside fundamental interval");

  const double phase_unit = (ac ? 3.0 : 2.0) * kPi * q_parallel;

  std::vector<SupercellNode> nodes = supercell_nodes(spec);
  const int ncell = 2 * nt + 1;
  BlochMatrix H(4 * ncell, q_parallel);

  const Vec2 e1 = geo.e[0], e2 = geo.e[1], e3 = geo.e[2];

  // Per-cell bond stencil.  The first endpoint (c, na) is the A-type node;
  // its physical neighbor is at X - bond, which equals the representative of
  // cell c+ds, node nb, displaced by wrap*v_par.  The row of the A-type node
  // picks up the Bloch factor exp(i*wrap*phase_unit); the mirror entry is
  // the conjugate.
  auto add_bond = [&](int c, int na, int ds, int nb, int wrap, const Vec2& bond) {
    int cb = c + ds;
    double ring_sign = 1.0;
    if (spec.boundary == BoundaryCondition::ZeroTruncation) {
      if (cb < 0 || cb >= ncell) return;
    } else if (cb < 0 || cb >= ncell) {
      // Antiperiodic ring closure: the plain-periodic ring leaves the
      // self-conjugate ring momentum unpaired, which would break the exact
      // supercell-folding degeneracy of the undeformed ring.
      cb = ((cb % ncell) + ncell) % ncell;
      ring_sign = -1.0;
    }
    const int ia = 4 * c + na;
    const int ib = 4 * cb + nb;
    const Vec2 X = nodes[static_cast<size_t>(4 * c + na)].pos;
    const Vec2 Y = X - bond;
    double t = ring_sign *
               hopping(X, Y, bond, spec.delta, spec.field, spec.t1, spec.hopping);
    cdouble ph = std::exp(cdouble(0.0, wrap * phase_unit));
    if (ia <= ib) {
      H.at(ia, ib) += t * ph;
    } else {
      H.at(ib, ia) += std::conj(t * ph);
    }
  };

  const bool left_dangler =
      ac && spec.boundary == BoundaryCondition::ZeroTruncation;
  for (int c = 0; c < ncell; ++c) {
    if (ac) {
      add_bond(c, 0, 0, 1, 0, e1);    // A_s - B_s
      add_bond(c, 0, 1, 1, 0, e2);    // A_s - B_{s+1}
      add_bond(c, 0, 1, 3, 1, e3);    // A_s - (D_{s+1} + v_par), phase e^{+i 3 pi q}
      add_bond(c, 2, 0, 1, 0, e3);    // C_s - B_s
      if (!(left_dangler && c == 0)) {
        add_bond(c, 2, 0, 3, 0, e1);  // C_s - D_s
      }
      add_bond(c, 2, 1, 3, 0, e2);    // C_s - D_{s+1}
    } else {
      add_bond(c, 0, 0, 1, 0, e1);     // A_s - B_s
      add_bond(c, 0, 0, 1, 1, e2);     // A_s - (B_s + v_par)
      add_bond(c, 0, 0, 3, 0, e3);     // A_s - D_s (vertical)
      add_bond(c, 2, 0, 3, -1, e1);    // C_s - (D_s - v_par)
      add_bond(c, 2, 0, 3, 0, e2);     // C_s - D_s
      add_bond(c, 2, 1, 1, 0, e3);     // C_s - B_{s+1} (vertical)
    }
  }
  if (left_dangler) {
    // The A-type node in the leftmost D slot couples only to B_{-NT}.
    add_bond(0, 3, 0, 1, 0, e2);
  }

  H.mirror_upper();
  return H;
}

}  // namespace strainband
