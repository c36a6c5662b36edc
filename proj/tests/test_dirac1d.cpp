#include <doctest.h>

#include <cmath>
#include <complex>

#include "strainband/dirac1d.hpp"
#include "strainband/linalg.hpp"

using namespace strainband;

namespace {

const double kSqrt3 = std::sqrt(3.0);

std::vector<double> uniform_grid(double w, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = -w + 2.0 * w * i / (n - 1);
  return g;
}

double fit_order(const std::vector<double>& h, const std::vector<double>& err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  size_t n = h.size();
  for (size_t i = 0; i < n; ++i) {
    double x = std::log(h[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("kappa profile and essential gap") {
  UnidirectionalProfile p = regularized_quadratic(1.0, 0.2);
  KappaProfile k = KappaProfile::from_profile(p, 0.0, -2.0);
  REQUIRE(k.kappa_plus.has_value());
  CHECK(*k.kappa_plus == doctest::Approx(2.0));
  CHECK(*k.kappa_minus == doctest::Approx(-2.0));
  CHECK(essential_gap(k) == doctest::Approx(3.0));

  // threshold |k_par| = 3 |t1 d_inf| / 2 = 6 closes the gap
  KappaProfile kt = KappaProfile::from_profile(p, 6.0, -2.0);
  CHECK(essential_gap(kt) == doctest::Approx(0.0).epsilon(1e-12));

  // same-sign limits still return the formula value
  KappaProfile ks = KappaProfile::from_profile(p, 9.0, -2.0);
  CHECK((*ks.kappa_plus) * (*ks.kappa_minus) > 0.0);
  CHECK(essential_gap(ks) == doctest::Approx(1.5 * 1.0));

  KappaProfile missing;
  missing.d_prime = [](double) { return 0.0; };
  CHECK_THROWS_AS(essential_gap(missing), std::runtime_error);
}

TEST_CASE("closed-form zero mode of the quadratic profile") {
  // t1 = -2, k_par = 0: kappa = 2 X1, mode on B proportional to exp(-X1^2)
  KappaProfile k = KappaProfile::from_profile(quadratic_profile(), 0.0, -2.0);
  auto grid = uniform_grid(8.0, 1601);
  ZeroMode zm = zero_mode_closed_form(k, grid);
  CHECK(zm.on_b);
  // profile proportional to exp(-x^2): check the ratio at two points
  int i0 = 800;  // x = 0
  int i1 = 900;  // x = 0.5
  double x1 = grid[i1];
  CHECK(zm.values[i1] / zm.values[i0] == doctest::Approx(std::exp(-x1 * x1)).epsilon(1e-8));
  // normalization ||psi||^2 = sqrt(3)/2
  double nrm = 0.0;
  for (size_t j = 0; j + 1 < grid.size(); ++j)
    nrm += 0.5 * (grid[j + 1] - grid[j]) *
           (zm.values[j] * zm.values[j] + zm.values[j + 1] * zm.values[j + 1]);
  CHECK(nrm == doctest::Approx(kSqrt3 / 2.0).epsilon(1e-10));

  // t1 > 0 swaps the support to A
  KappaProfile kp = KappaProfile::from_profile(quadratic_profile(), 0.0, 2.0);
  ZeroMode zma = zero_mode_closed_form(kp, grid);
  CHECK(!zma.on_b);

  // k_par shifts the center: kappa = k/3 + 2 X1 vanishes at -k/6
  KappaProfile ks = KappaProfile::from_profile(quadratic_profile(), 1.2, -2.0);
  ZeroMode zs = zero_mode_closed_form(ks, grid);
  int imax = 0;
  for (size_t j = 0; j < zs.values.size(); ++j)
    if (zs.values[j] > zs.values[imax]) imax = static_cast<int>(j);
  CHECK(grid[imax] == doctest::Approx(-1.2 / 6.0).epsilon(0.05));

  // non-sign-changing kappa fails
  KappaProfile flat;
  flat.d_prime = [](double) { return 1.0; };
  flat.t1 = -2.0;
  flat.k_parallel = 0.0;
  CHECK_THROWS_AS(zero_mode_closed_form(flat, grid), std::runtime_error);
}

TEST_CASE("landau levels") {
  auto lv = landau_levels(-2.0, 3);
  REQUIRE(lv.size() == 7);
  CHECK(lv[3] == doctest::Approx(0.0));
  CHECK(lv[4] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(lv[5] == doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(lv[6] == doctest::Approx(3.0 * std::sqrt(3.0)).epsilon(1e-14));
  CHECK(landau_levels(-2.0, 0) == std::vector<double>{0.0});
  CHECK(landau_levels(0.0, 5) == std::vector<double>{0.0});
  CHECK_THROWS_AS(landau_levels(-2.0, -1), std::invalid_argument);
}

TEST_CASE("staggered discretization: plane-wave dispersion and no doubling") {
  // kappa = 1 constant, periodic wrap
  KappaProfile k;
  k.k_parallel = 3.0;  // kappa = k/3 - 0 = 1
  k.t1 = -2.0;
  k.d_prime = [](double) { return 0.0; };
  const int n = 512;
  const double W = 32.0;
  DiracDiscretization disc = discretize(k, W, n, true);
  // dense build from apply()
  std::vector<cdouble> dense(4 * n * n, cdouble(0.0));
  std::vector<cdouble> basis(2 * n, cdouble(0.0));
  for (int j = 0; j < 2 * n; ++j) {
    basis.assign(2 * n, cdouble(0.0));
    basis[j] = 1.0;
    auto col = disc.apply(basis);
    for (int i = 0; i < 2 * n; ++i) dense[static_cast<size_t>(i) * 2 * n + j] = col[i];
  }
  EigenDecomposition d = eig_hermitian(dense.data(), 2 * n, false);
  // no spurious zero: min |eigenvalue| >= (3/2)*0.99
  double minabs = 1e9;
  for (double e : d.eigenvalues) minabs = std::min(minabs, std::abs(e));
  CHECK(minabs >= 1.5 * 0.99);
  // resolved plane waves match (3/2) sqrt(xi^2 + 1) to 1% for xi <= 0.1/h
  double h = disc.h;
  for (int m = 1; m <= 8; ++m) {
    double xi = 2.0 * 3.14159265358979323846 * m / (2.0 * W);
    if (xi > 0.1 / h) break;
    double expect = 1.5 * std::sqrt(xi * xi + 1.0);
    // nearest eigenvalue above the gap
    double best = 1e9;
    for (double e : d.eigenvalues) best = std::min(best, std::abs(e - expect));
    CHECK(best < 1e-2 * expect);
  }
}

TEST_CASE("discretized operator annihilates the closed-form zero mode at O(h^2)") {
  UnidirectionalProfile p = regularized_quadratic(1.0, 0.2);
  KappaProfile k = KappaProfile::from_profile(p, 0.0, -2.0);
  std::vector<double> hs, errs;
  for (int n : {512, 1024, 2048}) {
    DiracDiscretization disc = discretize(k, 16.0, n);
    // sample the closed form on the staggered grids
    ZeroMode za = zero_mode_closed_form(k, disc.agrid);
    ZeroMode zb = zero_mode_closed_form(k, disc.bgrid);
    std::vector<cdouble> a(n, cdouble(0.0)), b(n);
    for (int j = 0; j < n; ++j) b[j] = zb.values[j];
    (void)za;
    std::vector<cdouble> oa, ob;
    disc.apply_components(a, b, oa, ob);
    double num = 0.0, den = 0.0;
    for (int j = 0; j < n; ++j) {
      num += std::norm(oa[j]) + std::norm(ob[j]);
      den += std::norm(b[j]);
    }
    hs.push_back(disc.h);
    errs.push_back(std::sqrt(num / den));
  }
  CHECK(fit_order(hs, errs) >= 1.8);
}

TEST_CASE("landau oracle: lowest levels of the discretized quadratic profile") {
  KappaProfile k = KappaProfile::from_profile(quadratic_profile(), 0.0, -2.0);
  DiracDiscretization disc = discretize(k, 20.0, 4096);
  DiracSpectrumResult res = in_gap_spectrum(disc, k, 7);
  auto expect = landau_levels(-2.0, 3);
  REQUIRE(res.in_gap_eigenvalues.size() == expect.size());
  for (size_t i = 0; i < expect.size(); ++i) {
    double scale = std::max(1.0, std::abs(expect[i]));
    CHECK(std::abs(res.in_gap_eigenvalues[i] - expect[i]) < 1e-2 * scale);
  }
}

TEST_CASE("landau eigenfunctions") {
  KappaProfile k = KappaProfile::from_profile(quadratic_profile(), 0.0, -2.0);
  DiracDiscretization disc = discretize(k, 20.0, 4096);

  // s = 0 matches the closed-form zero mode on a shared grid
  LandauMode m0 = landau_eigenfunction(0, +1, 0.0, -2.0, disc.bgrid);
  ZeroMode zm = zero_mode_closed_form(k, disc.bgrid);
  for (int j = 0; j < disc.n_cells; j += 97) {
    CHECK(std::abs(m0.b[j] - zm.values[j]) < 1e-10);
    CHECK(std::abs(m0.a[j]) == 0.0);
  }

  // s = 1: residual of the discretized operator
  LandauMode m1a = landau_eigenfunction(1, +1, 0.0, -2.0, disc.agrid);
  LandauMode m1b = landau_eigenfunction(1, +1, 0.0, -2.0, disc.bgrid);
  std::vector<cdouble> oa, ob;
  disc.apply_components(m1a.a, m1b.b, oa, ob);
  double num = 0.0, den = 0.0;
  for (int j = 0; j < disc.n_cells; ++j) {
    num += std::norm(oa[j] - m1a.omega * m1a.a[j]) + std::norm(ob[j] - m1b.omega * m1b.b[j]);
    den += std::norm(m1a.a[j]) + std::norm(m1b.b[j]);
  }
  CHECK(std::sqrt(num / den) < 1e-3);

  // parity: the s-th Hermite factor has s sign changes
  for (int s = 1; s <= 3; ++s) {
    LandauMode ms = landau_eigenfunction(s, +1, 0.0, -2.0, disc.bgrid);
    int changes = 0;
    double prev = 0.0;
    for (int j = 0; j < disc.n_cells; ++j) {
      double v = ms.b[j].real();
      if (std::abs(v) < 1e-12) continue;
      if (prev != 0.0 && v * prev < 0.0) ++changes;
      prev = v;
    }
    CHECK(changes == s);
  }
}

TEST_CASE("landau levels are independent of k_parallel") {
  std::vector<double> ref;
  for (double kpar : {-0.5, 0.0, 0.5}) {
    KappaProfile k = KappaProfile::from_profile(quadratic_profile(), kpar, -2.0);
    DiracDiscretization disc = discretize(k, 20.0, 2048);
    DiracSpectrumResult res = in_gap_spectrum(disc, k, 7);
    REQUIRE(res.in_gap_eigenvalues.size() == 7);
    if (ref.empty()) {
      ref = res.in_gap_eigenvalues;
    } else {
      for (size_t i = 0; i < ref.size(); ++i)
        CHECK(std::abs(res.in_gap_eigenvalues[i] - ref[i]) < 1e-3);
    }
  }
}

TEST_CASE("in-gap spectrum of the regularized profile") {
  UnidirectionalProfile p = regularized_quadratic(1.0, 0.2);
  KappaProfile k = KappaProfile::from_profile(p, 0.0, -2.0);
  DiracDiscretization disc = discretize(k, 40.0, 4096);
  DiracSpectrumResult res = in_gap_spectrum(disc, k);
  CHECK(res.gap_edge_a == doctest::Approx(3.0));

  // contains a zero eigenvalue with eigenfunction supported on B
  int zi = -1;
  double best = 1e9;
  for (size_t i = 0; i < res.in_gap_eigenvalues.size(); ++i) {
    if (std::abs(res.in_gap_eigenvalues[i]) < best) {
      best = std::abs(res.in_gap_eigenvalues[i]);
      zi = static_cast<int>(i);
    }
  }
  REQUIRE(zi >= 0);
  CHECK(best < 1e-6);
  double amax = 0.0, bmax = 0.0;
  for (int j = 0; j < disc.n_cells; ++j) {
    amax = std::max(amax, std::abs(res.eigenfunctions_a[zi][j]));
    bmax = std::max(bmax, std::abs(res.eigenfunctions_b[zi][j]));
  }
  CHECK(amax < 1e-8 * bmax);

  // symmetric list, all inside the filtered gap
  for (double e : res.in_gap_eigenvalues) {
    CHECK(std::abs(e) < res.gap_edge_a);
    double match = 1e9;
    for (double f : res.in_gap_eigenvalues) match = std::min(match, std::abs(e + f));
    CHECK(match < 1e-10);
  }
}

TEST_CASE("zero-mode tail decay rates equal |kappa_pm| (closed form)") {
  UnidirectionalProfile p = regularized_quadratic(1.0, 0.2);
  KappaProfile k = KappaProfile::from_profile(p, 0.0, -2.0);
  auto grid = uniform_grid(20.0, 4001);
  ZeroMode zm = zero_mode_closed_form(k, grid);
  // fitted tail slope of log|psi| on [8, 16] should be -kappa_plus = -2
  auto slope = [&](double lo, double hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (size_t j = 0; j < grid.size(); ++j) {
      if (grid[j] < lo || grid[j] > hi) continue;
      double x = grid[j], y = std::log(zm.values[j]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  CHECK(std::abs(-slope(8.0, 16.0) - 2.0) < 0.05 * 2.0);
  CHECK(std::abs(slope(-16.0, -8.0) - 2.0) < 0.05 * 2.0);
}

TEST_CASE("in-gap eigenvalues converge in grid and domain size") {
  UnidirectionalProfile p = regularized_quadratic(1.0, 0.2);
  KappaProfile k = KappaProfile::from_profile(p, 0.0, -2.0);

  auto levels = [&](double w, int n) {
    DiracDiscretization disc = discretize(k, w, n);
    return in_gap_spectrum(disc, k, 3).in_gap_eigenvalues;
  };
  // doubling n at fixed W
  auto a = levels(24.0, 1024);
  auto b = levels(24.0, 2048);
  for (size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-3);
  // doubling W at fixed h
  auto c = levels(48.0, 4096);
  for (size_t i = 0; i < b.size(); ++i) CHECK(std::abs(b[i] - c[i]) < 1e-3);
}
