#include "strainband/dirac1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace strainband {

namespace {
const double kSqrt3 = std::sqrt(3.0);
}

KappaProfile KappaProfile::from_profile(const UnidirectionalProfile& p, double k_parallel,
                                        double t1) {
  KappaProfile k;
  k.k_parallel = k_parallel;
  k.t1 = t1;
  k.d_prime = p.d_prime;
  if (p.d_infinity) {
    k.kappa_plus = k_parallel / 3.0 - 0.5 * t1 * (*p.d_infinity);
    k.kappa_minus = k_parallel / 3.0 + 0.5 * t1 * (*p.d_infinity);
  }
  return k;
}

std::vector<cdouble> DiracDiscretization::apply(const std::vector<cdouble>& x) const {
  const int n = dim();
  std::vector<cdouble> y(n, cdouble(0.0));
  for (int i = 0; i < n; ++i) {
    cdouble acc = diag[i] * x[i];
    if (i > 0) acc += std::conj(offdiag[i - 1]) * x[i - 1];
    if (i + 1 < n) acc += offdiag[i] * x[i + 1];
    y[i] = acc;
  }
  if (periodic && wrap != cdouble(0.0)) {
    y[n - 1] += wrap * x[0];
    y[0] += std::conj(wrap) * x[n - 1];
  }
  return y;
}

void DiracDiscretization::apply_components(const std::vector<cdouble>& a,
                                           const std::vector<cdouble>& b,
                                           std::vector<cdouble>& out_a,
                                           std::vector<cdouble>& out_b) const {
  std::vector<cdouble> x(dim());
  for (int j = 0; j < n_cells; ++j) {
    x[2 * j] = a[j];
    x[2 * j + 1] = b[j];
  }
  std::vector<cdouble> y = apply(x);
  out_a.resize(n_cells);
  out_b.resize(n_cells);
  for (int j = 0; j < n_cells; ++j) {
    out_a[j] = y[2 * j];
    out_b[j] = y[2 * j + 1];
  }
}

DiracDiscretization discretize(const KappaProfile& profile, double half_width, int n_cells,
                               bool periodic) {
  if (half_width <= 0.0) throw std::invalid_argument("discretize: half_width must be > 0");
  if (n_cells < 16) throw std::invalid_argument("discretize: n_cells must be >= 16");

  DiracDiscretization d;
  d.half_width = half_width;
  d.n_cells = n_cells;
  d.h = 2.0 * half_width / n_cells;
  d.periodic = periodic;
  d.agrid.resize(n_cells);
  d.bgrid.resize(n_cells);
  for (int j = 0; j < n_cells; ++j) {
    d.agrid[j] = -half_width + j * d.h;
    d.bgrid[j] = d.agrid[j] + 0.5 * d.h;
  }
  d.diag.assign(2 * n_cells, 0.0);
  d.offdiag.assign(2 * n_cells - 1, cdouble(0.0));

  const double c = 1.5;
  const double inv_h = 1.0 / d.h;
  // A row j couples b_{j-1}, b_j:  -(3/2) i [ (b_j - b_{j-1})/h
  //   + (kappa(x_j + h/4) b_j + kappa(x_j - h/4) b_{j-1}) / 2 ].
  for (int j = 0; j < n_cells; ++j) {
    double kp = profile.kappa(d.agrid[j] + 0.25 * d.h);
    d.offdiag[2 * j] = cdouble(0.0, -c) * (inv_h + 0.5 * kp);
    if (j + 1 < n_cells) {
      double km = profile.kappa(d.agrid[j + 1] - 0.25 * d.h);
      // H(2j+1, 2j+2) = conj(H(a_{j+1} row, b_j col))
      d.offdiag[2 * j + 1] = cdouble(0.0, c) * (-inv_h + 0.5 * km);
    }
  }
  if (periodic) {
    // b_{n-1} couples to a_0 across the wrap: A row 0 sees b_{n-1} with the
    // same stencil; entry (2n-1, 0) is its conjugate.
    double km = profile.kappa(d.agrid[0] - 0.25 * d.h);
    d.wrap = cdouble(0.0, c) * (-inv_h + 0.5 * km);
  }
  return d;
}

double essential_gap(const KappaProfile& profile) {
  if (!profile.kappa_plus || !profile.kappa_minus)
    throw std::runtime_error("essential_gap: kappa limits are not set");
  return 1.5 * std::min(std::abs(*profile.kappa_plus), std::abs(*profile.kappa_minus));
}

ZeroMode zero_mode_closed_form(const KappaProfile& profile, const std::vector<double>& grid) {
  const size_t n = grid.size();
  if (n < 2) throw std::invalid_argument("zero_mode_closed_form: grid too small");
  double kp = profile.kappa_plus ? *profile.kappa_plus : profile.kappa(grid.back());
  double km = profile.kappa_minus ? *profile.kappa_minus : profile.kappa(grid.front());
  if (!(kp * km < 0.0))
    throw std::runtime_error("zero_mode_closed_form: kappa does not change sign");
  const bool on_b = kp > 0.0;

  // Cumulative integral of kappa along the grid, referenced to X1 = 0;
  // Simpson per interval with a midpoint evaluation.
  std::vector<double> I(n, 0.0);
  for (size_t j = 0; j + 1 < n; ++j) {
    double h = grid[j + 1] - grid[j];
    double mid = 0.5 * (grid[j] + grid[j + 1]);
    I[j + 1] = I[j] + h / 6.0 * (profile.kappa(grid[j]) + 4.0 * profile.kappa(mid) +
                                 profile.kappa(grid[j + 1]));
  }
  // int_0^{x_j} = I[j] - I0 with I0 = int_{x_0}^0 by composite Simpson.
  double I0 = 0.0;
  {
    double a = grid.front(), b = 0.0;
    int steps = std::max(64, static_cast<int>(std::ceil(std::abs(b - a) / 0.01)));
    double h = (b - a) / steps;
    double sum = profile.kappa(a) + profile.kappa(b);
    for (int i = 1; i < steps; ++i)
      sum += profile.kappa(a + i * h) * ((i % 2) ? 4.0 : 2.0);
    I0 = sum * h / 3.0;
  }

  ZeroMode zm;
  zm.on_b = on_b;
  zm.values.resize(n);
  for (size_t j = 0; j < n; ++j) {
    double integral = I[j] - I0;
    zm.values[j] = std::exp(on_b ? -integral : integral);
  }
  // Normalize ||Psi||_L2^2 = sqrt(3)/2.
  double nrm2 = 0.0;
  for (size_t j = 0; j + 1 < n; ++j) {
    double h = grid[j + 1] - grid[j];
    nrm2 += 0.5 * h * (zm.values[j] * zm.values[j] + zm.values[j + 1] * zm.values[j + 1]);
  }
  double scale = std::sqrt(kSqrt3 / 2.0 / nrm2);
  for (double& v : zm.values) v *= scale;
  return zm;
}

std::vector<double> landau_levels(double t1, int s_max) {
  if (s_max < 0) throw std::invalid_argument("landau_levels: s_max must be >= 0");
  std::vector<double> out;
  out.push_back(0.0);
  for (int s = 1; s <= s_max; ++s) {
    double w = 1.5 * std::sqrt(2.0 * std::abs(t1) * s);
    if (w == 0.0) continue;  // t1 = 0: every level collapses to zero
    out.push_back(-w);
    out.push_back(w);
  }
  std::sort(out.begin(), out.end());
  return out;
}

LandauMode landau_eigenfunction(int s, int branch, double k_parallel, double t1,
                                const std::vector<double>& grid) {
  if (s < 0) throw std::invalid_argument("landau_eigenfunction: s must be >= 0");
  if (t1 == 0.0) throw std::invalid_argument("landau_eigenfunction: t1 must be nonzero");
  const size_t n = grid.size();
  const double a = std::abs(t1);
  const double center = k_parallel / (3.0 * t1);  // zero of kappa = k_par/3 - t1 X1
  const bool mode_on_b = t1 < 0.0;                // sign of kappa' = -t1
  const double omega = (s == 0) ? 0.0
                                : (branch >= 0 ? 1.5 * std::sqrt(2.0 * a * s)
                                               : -1.5 * std::sqrt(2.0 * a * s));

  auto hermite = [](int deg, double xi) {
    double h0 = 1.0, h1 = 2.0 * xi;
    if (deg == 0) return h0;
    if (deg == 1) return h1;
    for (int k = 2; k <= deg; ++k) {
      double h2 = 2.0 * xi * h1 - 2.0 * (k - 1) * h0;
      h0 = h1;
      h1 = h2;
    }
    return h1;
  };

  LandauMode m;
  m.omega = omega;
  m.a.assign(n, cdouble(0.0));
  m.b.assign(n, cdouble(0.0));
  const cdouble companion =
      (s > 0) ? cdouble(0.0, -3.0 * std::sqrt(a) * s / omega) : cdouble(0.0);
  for (size_t j = 0; j < n; ++j) {
    double xi = std::sqrt(a) * (grid[j] - center);
    double gs = std::exp(-0.5 * xi * xi);
    double main = hermite(s, xi) * gs;
    double other = (s > 0) ? hermite(s - 1, xi) * gs : 0.0;
    if (mode_on_b) {
      m.b[j] = main;
      m.a[j] = companion * other;
    } else {
      m.a[j] = main;
      m.b[j] = companion * other;
    }
  }
  // Normalize ||psi||^2 = sqrt(3)/2 on the grid.
  double nrm2 = 0.0;
  for (size_t j = 0; j + 1 < n; ++j) {
    double h = grid[j + 1] - grid[j];
    nrm2 += 0.5 * h *
            (std::norm(m.a[j]) + std::norm(m.b[j]) + std::norm(m.a[j + 1]) +
             std::norm(m.b[j + 1]));
  }
  double scale = std::sqrt(kSqrt3 / 2.0 / nrm2);
  for (auto& v : m.a) v *= scale;
  for (auto& v : m.b) v *= scale;
  return m;
}

DiracSpectrumResult in_gap_spectrum(const DiracDiscretization& disc,
                                    const KappaProfile& profile, int max_count) {
  if (disc.periodic)
    throw std::invalid_argument("in_gap_spectrum: zero-truncated discretization expected");
  DiracSpectrumResult out;
  double a_edge;
  if (profile.kappa_plus && profile.kappa_minus) {
    a_edge = essential_gap(profile);
  } else {
    // Box-effective edge for profiles without limits (e.g. quadratic).
    a_edge = 1.5 * std::min(std::abs(profile.kappa(-disc.half_width)),
                            std::abs(profile.kappa(disc.half_width)));
  }
  out.gap_edge_a = a_edge;

  EigenDecomposition vals = eig_hermitian_tridiag(disc.diag, disc.offdiag, false);
  const double cut = 0.95 * a_edge;
  int count = 0;
  for (double e : vals.eigenvalues)
    if (std::abs(e) < cut) ++count;
  if (count == 0) return out;
  if (max_count > 0) count = std::min(count, max_count + 4);

  EigenDecomposition sel = eig_hermitian_tridiag(disc.diag, disc.offdiag, true, count);
  double scale = 0.0;
  for (const auto& t : disc.offdiag) scale = std::max(scale, std::abs(t));

  // The truncated operator is nonsingular, so the physical zero mode shows
  // up as a numerically degenerate +-eps pair mixing the bulk B-mode with an
  // A-polarized spike pinned at the box edge.  Rotate that cluster into the
  // chiral (sublattice) basis and drop the edge artifact.
  const int k = static_cast<int>(sel.eigenvalues.size());
  const int n = disc.n_cells;
  std::vector<int> zero_idx;
  for (int c = 0; c < k; ++c)
    if (std::abs(sel.eigenvalues[c]) < 1e-9 * std::max(scale, 1.0))
      zero_idx.push_back(c);
  if (zero_idx.size() > 1) {
    const int kc = static_cast<int>(zero_idx.size());
    // S in the cluster basis; S = +1 on A rows, -1 on B rows.
    std::vector<cdouble> smat(static_cast<size_t>(kc) * kc, cdouble(0.0));
    for (int p = 0; p < kc; ++p)
      for (int q = 0; q < kc; ++q) {
        cdouble acc = 0.0;
        for (int j = 0; j < n; ++j) {
          acc += std::conj(sel.vec(2 * j, zero_idx[p])) * sel.vec(2 * j, zero_idx[q]);
          acc -= std::conj(sel.vec(2 * j + 1, zero_idx[p])) * sel.vec(2 * j + 1, zero_idx[q]);
        }
        smat[static_cast<size_t>(p) * kc + q] = acc;
      }
    EigenDecomposition rot = eig_hermitian(smat.data(), kc, true);
    std::vector<cdouble> rotated(static_cast<size_t>(2 * n) * kc);
    for (int r = 0; r < 2 * n; ++r)
      for (int q = 0; q < kc; ++q) {
        cdouble acc = 0.0;
        for (int p = 0; p < kc; ++p) acc += sel.vec(r, zero_idx[p]) * rot.vec(p, q);
        rotated[static_cast<size_t>(r) * kc + q] = acc;
      }
    for (int q = 0; q < kc; ++q) {
      sel.eigenvalues[zero_idx[q]] = 0.0;
      for (int r = 0; r < 2 * n; ++r)
        sel.vectors[static_cast<size_t>(r) * k + zero_idx[q]] =
            rotated[static_cast<size_t>(r) * kc + q];
    }
  }

  auto edge_weight = [&](int c) {
    const int edge = std::max(1, n / 20);
    double outer = 0.0, total = 0.0;
    for (int j = 0; j < n; ++j) {
      double w = std::norm(sel.vec(2 * j, c)) + std::norm(sel.vec(2 * j + 1, c));
      total += w;
      if (j < edge || j >= n - edge) outer += w;
    }
    return outer / total;
  };

  std::vector<int> keep;
  for (int c = 0; c < k; ++c) {
    bool zeroish = std::abs(sel.eigenvalues[c]) < 1e-9 * std::max(scale, 1.0);
    if (zeroish && edge_weight(c) > 0.5) continue;  // truncation artifact
    keep.push_back(c);
  }
  if (max_count > 0 && static_cast<int>(keep.size()) > max_count) {
    std::vector<int> order = keep;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(sel.eigenvalues[a]) < std::abs(sel.eigenvalues[b]);
    });
    double edge_mag = std::abs(sel.eigenvalues[order[max_count - 1]]);
    std::vector<int> trimmed;
    for (int c : keep)
      if (std::abs(sel.eigenvalues[c]) <= edge_mag * (1.0 + 1e-9)) trimmed.push_back(c);
    keep = std::move(trimmed);
  }

  for (int c : keep) {
    out.in_gap_eigenvalues.push_back(sel.eigenvalues[c]);
    std::vector<cdouble> fa(n), fb(n);
    for (int j = 0; j < n; ++j) {
      fa[j] = sel.vec(2 * j, c);
      fb[j] = sel.vec(2 * j + 1, c);
    }
    out.eigenfunctions_a.push_back(std::move(fa));
    out.eigenfunctions_b.push_back(std::move(fb));
  }

  // Chiral pairing: for each E the value -E must be present.
  for (double e : out.in_gap_eigenvalues) {
    double best = std::numeric_limits<double>::max();
    for (double f : out.in_gap_eigenvalues) best = std::min(best, std::abs(e + f));
    if (best > 1e-7 * std::max(scale, 1.0))
      throw std::runtime_error("in_gap_spectrum: chiral pairing violated");
  }
  return out;
}

}  // namespace strainband
