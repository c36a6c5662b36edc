#include <doctest.h>

#include <cmath>
#include <complex>

#include "strainband/validation.hpp"

using namespace strainband;

namespace {

const double kSqrt3 = std::sqrt(3.0);
constexpr double kPi = 3.14159265358979323846;

struct Setup {
  UnidirectionalProfile prof;
  KappaProfile kappa;
  DiracDiscretization disc;
  DiracSpectrumResult spec1d;
  DisplacementField field;
};

Setup make_setup(double k_parallel = 0.0) {
  Setup s{regularized_quadratic(1.0, 0.2), {}, {}, {}, {}};
  s.kappa = KappaProfile::from_profile(s.prof, k_parallel, -2.0);
  s.disc = discretize(s.kappa, 40.0, 4096);
  s.spec1d = in_gap_spectrum(s.disc, s.kappa);
  s.field = DisplacementField::unidirectional_ac(s.prof);
  return s;
}

DiracGridFunction grid_fn(const Setup& s, int idx) {
  DiracGridFunction f;
  f.agrid = s.disc.agrid;
  f.bgrid = s.disc.bgrid;
  f.a = s.spec1d.eigenfunctions_a[idx];
  f.b = s.spec1d.eigenfunctions_b[idx];
  return f;
}

int zero_index(const DiracSpectrumResult& r) {
  int zi = 0;
  for (size_t i = 0; i < r.in_gap_eigenvalues.size(); ++i)
    if (std::abs(r.in_gap_eigenvalues[i]) < std::abs(r.in_gap_eigenvalues[zi]))
      zi = static_cast<int>(i);
  return zi;
}

SupercellSpec ac_spec(const Setup& s, double delta, double coverage) {
  SupercellSpec spec;
  spec.orientation = Orientation::AC;
  spec.delta = delta;
  spec.t1 = -2.0;
  spec.hopping = HoppingMode::CellLinearized;
  spec.field = s.field;
  spec.n_t = static_cast<int>(std::ceil(coverage / (kSqrt3 * delta)));
  return spec;
}

}  // namespace

TEST_CASE("rate_fit") {
  std::vector<double> d = {0.08, 0.04, 0.02};
  std::vector<double> v2 = {0.08 * 0.08, 0.04 * 0.04, 0.02 * 0.02};
  RateEstimate r2 = rate_fit(d, v2);
  CHECK(r2.fitted_order == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(r2.r_squared == doctest::Approx(1.0).epsilon(1e-10));
  RateEstimate r1 = rate_fit(d, d);
  CHECK(r1.fitted_order == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(rate_fit({0.1, 0.2}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(rate_fit(d, {1.0, -2.0, 1.0}), std::invalid_argument);
}

TEST_CASE("build_ansatz contracts") {
  Setup s = make_setup();
  int zi = zero_index(s.spec1d);
  DiracGridFunction psi = grid_fn(s, zi);

  SupercellSpec spec = ac_spec(s, 0.04, 12.0);
  CHECK_THROWS_AS(build_ansatz(psi, 0.0, 0.0, 0.0, spec), std::invalid_argument);
  SupercellSpec zz = spec;
  zz.orientation = Orientation::ZZ;
  CHECK_THROWS_AS(build_ansatz(psi, 0.0, 0.0, 0.04, zz), std::invalid_argument);

  // coverage failure when the supercell reaches past the decayed region
  SupercellSpec wide = ac_spec(s, 0.04, 45.0);
  CHECK_THROWS_AS(build_ansatz(psi, 0.0, 0.0, 0.04, wide), std::runtime_error);

  EnvelopeAnsatz an = build_ansatz(psi, 0.0, 0.0, 0.04, spec);
  CHECK(an.q_parallel == doctest::Approx(0.0));
  CHECK(static_cast<int>(an.values.size()) == spec.dim());

  // zero mode is B-polarized: A-sublattice rows vanish
  auto signs = chiral_signs(spec);
  double amax = 0.0, bmax = 0.0;
  for (size_t i = 0; i < an.values.size(); ++i) {
    if (signs[i] > 0)
      amax = std::max(amax, std::abs(an.values[i]));
    else
      bmax = std::max(bmax, std::abs(an.values[i]));
  }
  CHECK(amax < 1e-6 * bmax);

  // l2 norm approaches 1 as delta -> 0 (within 5% at delta = 0.02)
  SupercellSpec spec2 = ac_spec(s, 0.02, 12.0);
  EnvelopeAnsatz an2 = build_ansatz(psi, 0.0, 0.0, 0.02, spec2);
  double n2 = 0.0;
  for (const auto& z : an2.values) n2 += std::norm(z);
  CHECK(std::abs(n2 - 1.0) < 0.05);
}

TEST_CASE("residual of an exact eigenvector is tiny") {
  Setup s = make_setup();
  SupercellSpec spec = ac_spec(s, 0.08, 10.0);
  BlochMatrix H = assemble_supercell(spec, 0.0);
  EigenResult r = eig_supercell(H, true, 8);
  // pick the eigenpair closest to delta * E1_level
  int zi = zero_index(s.spec1d);
  (void)zi;
  int pick = static_cast<int>(r.eigenvalues.size()) - 1;
  EnvelopeAnsatz fake;
  fake.delta = spec.delta;
  fake.q_parallel = 0.0;
  fake.e1 = r.eigenvalues[pick] / spec.delta;
  fake.values.resize(H.dim());
  for (int i = 0; i < H.dim(); ++i) fake.values[i] = r.vec(i, pick);
  ResidualReport rep = residual(fake, spec);
  CHECK(rep.residual < 1e-9);
}

TEST_CASE("gauge invariance: global phase leaves residual and E2 unchanged") {
  Setup s = make_setup();
  int zi = zero_index(s.spec1d);
  DiracGridFunction psi = grid_fn(s, zi);
  SupercellSpec spec = ac_spec(s, 0.04, 12.0);
  EnvelopeAnsatz a1 = build_ansatz(psi, 0.0, 0.0, 0.04, spec);
  double r1 = residual(a1, spec).residual;
  cdouble e2a = compute_E2(psi, 0.0, s.kappa);

  cdouble phase = std::exp(cdouble(0.0, 0.7));
  DiracGridFunction psi2 = psi;
  for (auto& z : psi2.a) z *= phase;
  for (auto& z : psi2.b) z *= phase;
  EnvelopeAnsatz a2 = build_ansatz(psi2, 0.0, 0.0, 0.04, spec);
  double r2 = residual(a2, spec).residual;
  cdouble e2b = compute_E2(psi2, 0.0, s.kappa);
  CHECK(std::abs(r1 - r2) < 1e-12);
  CHECK(std::abs(e2a - e2b) < 1e-12);
  for (size_t i = 0; i < a1.values.size(); ++i)
    CHECK(std::abs(a1.values[i] * phase - a2.values[i]) < 1e-12);
}

TEST_CASE("E2 vanishes for the single-sublattice zero mode") {
  Setup s = make_setup();
  int zi = zero_index(s.spec1d);
  cdouble e2 = compute_E2(grid_fn(s, zi), 0.0, s.kappa);
  CHECK(std::abs(e2) < 1e-8);
}

TEST_CASE("E2 is real for in-gap eigenfunctions") {
  Setup s = make_setup();
  for (size_t i = 0; i < s.spec1d.in_gap_eigenvalues.size(); ++i) {
    cdouble e2 = compute_E2(grid_fn(s, static_cast<int>(i)), s.spec1d.in_gap_eigenvalues[i],
                            s.kappa);
    CHECK(std::abs(e2.imag()) < 1e-8);
  }
}

TEST_CASE("E2 of the first nonzero level: frozen quadrature value") {
  // Golden number computed by the doubled-resolution quadrature oracle below;
  // the production path (n = 4096, W = 40) must agree closely.
  Setup s = make_setup();
  int li = -1;
  double best = 1e9;
  for (size_t i = 0; i < s.spec1d.in_gap_eigenvalues.size(); ++i) {
    double e = s.spec1d.in_gap_eigenvalues[i];
    if (e > 1e-6 && e < best) {
      best = e;
      li = static_cast<int>(i);
    }
  }
  REQUIRE(li >= 0);
  CHECK(best == doctest::Approx(2.8287).epsilon(2e-3));
  cdouble e2 = compute_E2(grid_fn(s, li), best, s.kappa);

  // oracle: doubled resolution
  DiracDiscretization disc2 = discretize(s.kappa, 40.0, 8192);
  DiracSpectrumResult spec2 = in_gap_spectrum(disc2, s.kappa);
  int li2 = -1;
  double best2 = 1e9;
  for (size_t i = 0; i < spec2.in_gap_eigenvalues.size(); ++i) {
    double e = spec2.in_gap_eigenvalues[i];
    if (e > 1e-6 && e < best2) {
      best2 = e;
      li2 = static_cast<int>(i);
    }
  }
  DiracGridFunction f2;
  f2.agrid = disc2.agrid;
  f2.bgrid = disc2.bgrid;
  f2.a = spec2.eigenfunctions_a[li2];
  f2.b = spec2.eigenfunctions_b[li2];
  cdouble e2_oracle = compute_E2(f2, best2, s.kappa);
  CHECK(std::abs(e2 - e2_oracle) < 1e-3 * std::max(1.0, std::abs(e2_oracle)));
}

TEST_CASE("undeformed envelope residual is O(delta)") {
  // Gaussian envelope on an undeformed lattice with E1 = 0: the residual is
  // pure envelope discretization error, order >= 0.9 in delta.
  DiracGridFunction psi;
  int n = 4096;
  double w = 40.0;
  psi.agrid.resize(n);
  psi.bgrid.resize(n);
  psi.a.assign(n, cdouble(0.0));
  psi.b.assign(n, cdouble(0.0));
  double h = 2.0 * w / n;
  for (int j = 0; j < n; ++j) {
    psi.agrid[j] = -w + j * h;
    psi.bgrid[j] = psi.agrid[j] + 0.5 * h;
    psi.b[j] = std::exp(-psi.bgrid[j] * psi.bgrid[j]);
  }
  std::vector<double> deltas = {0.08, 0.04, 0.02};
  std::vector<double> res;
  for (double d : deltas) {
    SupercellSpec spec;
    spec.orientation = Orientation::AC;
    spec.delta = d;
    spec.field = DisplacementField::none();
    spec.t1 = -2.0;
    spec.n_t = static_cast<int>(std::ceil(10.0 / (kSqrt3 * d)));
    EnvelopeAnsatz an = build_ansatz(psi, 0.0, 0.0, d, spec);
    res.push_back(residual(an, spec).residual);
  }
  RateEstimate rate = rate_fit(deltas, res);
  CHECK(rate.fitted_order >= 0.9);
}

TEST_CASE("zero-mode ansatz residual is O(delta) and eigenvector corrector O(delta)") {
  Setup s = make_setup();
  int zi = zero_index(s.spec1d);
  DiracGridFunction psi = grid_fn(s, zi);
  std::vector<double> deltas = {0.08, 0.04};
  std::vector<double> res, dist;
  for (double d : deltas) {
    SupercellSpec spec = ac_spec(s, d, 12.0);
    EnvelopeAnsatz an = build_ansatz(psi, 0.0, 0.0, d, spec);
    res.push_back(residual(an, spec).residual);
    BlochMatrix H = assemble_supercell(spec, 0.0);
    EigenResult modes = eig_supercell(H, true, 8);
    dist.push_back(nearest_eigenvector_distance(an, modes));
  }
  // two-point order estimates
  double order_res = std::log(res[0] / res[1]) / std::log(deltas[0] / deltas[1]);
  double order_dist = std::log(dist[0] / dist[1]) / std::log(deltas[0] / deltas[1]);
  CHECK(order_res >= 0.9);
  CHECK(order_dist >= 0.8);
}
