#include "strainband/geometry.hpp"

#include <cmath>

namespace strainband {

namespace {
constexpr double kPi = 3.14159265358979323846;
const double kSqrt3 = std::sqrt(3.0);
}  // namespace

HoneycombGeometry::HoneycombGeometry() {
  v1 = {kSqrt3 / 2.0, -1.5};
  v2 = {0.0, 3.0};

  a1 = {4.0 * kPi / kSqrt3, 0.0};
  a2 = {(4.0 * kPi / 3.0) * (kSqrt3 / 2.0), (4.0 * kPi / 3.0) * 0.5};

  e[0] = {kSqrt3 / 2.0, 0.5};
  e[1] = {-kSqrt3 / 2.0, 0.5};
  e[2] = {0.0, -1.0};

  nn[0] = {0, 0};
  nn[1] = {2, 1};
  nn[2] = {1, 1};

  for (int nu = 0; nu < 3; ++nu) w[nu] = e[0] - e[nu];

  K = a1 * (1.0 / 3.0);
  Kp = a1 * (-1.0 / 3.0) + a2;

  b0_ = {-kSqrt3 / 2.0, -0.5};
}

Vec2 HoneycombGeometry::node_position(CellIndex idx, Sublattice sub) const {
  Vec2 base = (sub == Sublattice::A) ? base_a() : base_b();
  return base + v1 * static_cast<double>(idx.m) + v2 * static_cast<double>(idx.n);
}

std::array<Neighbor, 3> HoneycombGeometry::neighbors_of(CellIndex idx,
                                                        Sublattice sub) const {
  std::array<Neighbor, 3> out;
  for (int nu = 0; nu < 3; ++nu) {
    Neighbor nb;
    if (sub == Sublattice::A) {
      nb.cell = {idx.m + nn[nu].m, idx.n + nn[nu].n};
      nb.sub = Sublattice::B;
      nb.bond = e[nu];  // A_{m,n} - B_{m+m_nu,n+n_nu} = e_nu
    } else {
      nb.cell = {idx.m - nn[nu].m, idx.n - nn[nu].n};
      nb.sub = Sublattice::A;
      nb.bond = -e[nu];  // B_{m,n} - A_{m-m_nu,n-n_nu} = -e_nu
    }
    out[nu] = nb;
  }
  return out;
}

std::complex<double> HoneycombGeometry::structure_factor(const Vec2& k) const {
  std::complex<double> sum = 0.0;
  for (int nu = 0; nu < 3; ++nu) {
    sum += std::exp(std::complex<double>(0.0, k.dot(w[nu])));
  }
  return sum;
}

const HoneycombGeometry& honeycomb() {
  static const HoneycombGeometry g;
  return g;
}

}  // namespace strainband
