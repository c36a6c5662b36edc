#include "strainband/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "strainband/fft.hpp"

namespace strainband {

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kSqrt3 = std::sqrt(3.0);

// Cubic-spline interpolation of a complex grid function.
class ComplexSpline {
 public:
  ComplexSpline(const std::vector<double>& x, const std::vector<cdouble>& y)
      : re_(x, real_part(y)), im_(x, imag_part(y)) {}
  cdouble eval(double x) const { return {re_.eval(x), im_.eval(x)}; }

 private:
  static std::vector<double> real_part(const std::vector<cdouble>& y) {
    std::vector<double> v(y.size());
    for (size_t i = 0; i < y.size(); ++i) v[i] = y[i].real();
    return v;
  }
  static std::vector<double> imag_part(const std::vector<cdouble>& y) {
    std::vector<double> v(y.size());
    for (size_t i = 0; i < y.size(); ++i) v[i] = y[i].imag();
    return v;
  }
  CubicSpline re_, im_;
};

double max_abs(const std::vector<cdouble>& v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

// Spectral derivative of order p on a uniform periodic grid, optionally
// shifted by `shift` grid units (used to move between the staggered A and B
// grids).
std::vector<cdouble> spectral_transform(const std::vector<cdouble>& f, double h, int p,
                                        double shift_units) {
  const size_t n = f.size();
  std::vector<cdouble> spec = f;
  fft_inplace(spec, false);
  const double dk = 2.0 * kPi / (static_cast<double>(n) * h);
  for (size_t m = 0; m < n; ++m) {
    double km = dk * ((m <= n / 2) ? static_cast<double>(m)
                                   : static_cast<double>(m) - static_cast<double>(n));
    if (m == n / 2 && p % 2 == 1) {
      spec[m] = 0.0;  // Nyquist mode has no well-defined odd derivative
      continue;
    }
    cdouble factor = std::exp(cdouble(0.0, km * shift_units * h));
    for (int q = 0; q < p; ++q) factor *= cdouble(0.0, km);
    spec[m] *= factor;
  }
  fft_inplace(spec, true);
  return spec;
}

}  // namespace

EnvelopeAnsatz build_ansatz(const DiracGridFunction& psi0, double e1, double k_parallel,
                            double delta, const SupercellSpec& spec) {
  if (spec.orientation != Orientation::AC)
    throw std::invalid_argument("build_ansatz: AC orientation required");
  if (delta <= 0.0) throw std::invalid_argument("build_ansatz: delta must be > 0");

  std::vector<SupercellNode> cells_probe = supercell_nodes(spec);
  double x_edge = 0.0;
  for (const auto& nd : cells_probe)
    x_edge = std::max(x_edge, std::abs(kSqrt3 / 2.0 * delta * nd.cell.m));
  const double cover = std::min(std::min(-psi0.agrid.front(), psi0.agrid.back()),
                                std::min(-psi0.bgrid.front(), psi0.bgrid.back()));
  if (cover < x_edge)
    throw std::runtime_error("build_ansatz: Dirac grid does not cover the truncation edge");

  const double peak = std::max(max_abs(psi0.a), max_abs(psi0.b));
  ComplexSpline sa(psi0.agrid, psi0.a), sb(psi0.bgrid, psi0.b);
  double edge_mag = std::max(std::max(std::abs(sa.eval(x_edge)), std::abs(sa.eval(-x_edge))),
                             std::max(std::abs(sb.eval(x_edge)), std::abs(sb.eval(-x_edge))));
  if (edge_mag > 1e-8 * peak)
    throw std::runtime_error("build_ansatz: envelope has not decayed at the truncation edge");

  EnvelopeAnsatz out;
  out.k_parallel = k_parallel;
  out.delta = delta;
  out.q_parallel = delta * k_parallel / (3.0 * kPi);
  out.e1 = e1;
  out.values.assign(spec.dim(), cdouble(0.0));

  // Normalize the envelope to ||Psi0||_L2^2 = sqrt(3)/2 so the delta^{1/2}
  // prefactor makes the l2 norm of the ansatz approach 1.
  double l2 = 0.0;
  const double ha = psi0.agrid[1] - psi0.agrid[0];
  for (size_t j = 0; j < psi0.a.size(); ++j) l2 += std::norm(psi0.a[j]) + std::norm(psi0.b[j]);
  l2 *= ha;
  const double env_scale = std::sqrt(kSqrt3 / 2.0 / l2);

  // Per honeycomb cell (m,n) the two-scale ansatz carries the phase
  // e^{i 2 pi m/3} e^{i k_par delta (n - m/2)} (this is e^{i K.x} times the
  // vertical quasi-periodic factor evaluated at the cell anchor) and the
  // envelope argument X1 = sqrt(3)/2 delta m.
  const cdouble ua = std::exp(cdouble(0.0, -kPi / 6.0));
  const cdouble ub = std::exp(cdouble(0.0, kPi / 6.0));
  const double root_delta = std::sqrt(delta);
  std::vector<SupercellNode> nodes = supercell_nodes(spec);
  for (size_t i = 0; i < nodes.size(); ++i) {
    const double m = nodes[i].cell.m;
    const double n = nodes[i].cell.n;
    const double x1 = kSqrt3 / 2.0 * delta * m;
    const cdouble ph = std::exp(
        cdouble(0.0, 2.0 * kPi * m / 3.0 + k_parallel * delta * (n - 0.5 * m)));
    if (nodes[i].sub == Sublattice::A) {
      out.values[i] = env_scale * root_delta * ph * ua * sa.eval(x1);
    } else {
      out.values[i] = env_scale * root_delta * ph * ub * sb.eval(x1);
    }
  }
  return out;
}

ResidualReport residual(const EnvelopeAnsatz& ansatz, const SupercellSpec& spec) {
  if (std::abs(spec.delta - ansatz.delta) > 1e-12)
    throw std::invalid_argument("residual: spec delta does not match the ansatz");
  BlochMatrix H = assemble_supercell(spec, ansatz.q_parallel);
  if (H.dim() != static_cast<int>(ansatz.values.size()))
    throw std::invalid_argument("residual: dimension mismatch");
  std::vector<cdouble> hv = H.apply(ansatz.values);
  const double e = ansatz.delta * ansatz.e1;
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < hv.size(); ++i) {
    num += std::norm(hv[i] - e * ansatz.values[i]);
    den += std::norm(ansatz.values[i]);
  }
  ResidualReport r;
  r.delta = ansatz.delta;
  r.energy_used = e;
  r.residual = std::sqrt(num / den);
  return r;
}

cdouble compute_E2(const DiracGridFunction& psi0, double e1, const KappaProfile& profile) {
  (void)e1;
  const size_t n = psi0.a.size();
  if (n != psi0.b.size() || n != psi0.agrid.size() || n != psi0.bgrid.size())
    throw std::invalid_argument("compute_E2: inconsistent grid function");
  const double h = psi0.agrid[1] - psi0.agrid[0];

  // Normalize to ||Psi0||^2 = sqrt(3)/2.
  double nrm2 = 0.0;
  for (size_t j = 0; j < n; ++j) nrm2 += std::norm(psi0.a[j]) + std::norm(psi0.b[j]);
  nrm2 *= h;
  const double scale = std::sqrt(kSqrt3 / 2.0 / nrm2);
  std::vector<cdouble> A(n), B(n);
  for (size_t j = 0; j < n; ++j) {
    A[j] = scale * psi0.a[j];
    B[j] = scale * psi0.b[j];
  }

  const double kpar = profile.k_parallel;
  const double t1 = profile.t1;
  const cdouble e5 = std::exp(cdouble(0.0, 5.0 * kPi / 3.0));
  const cdouble e5c = std::conj(e5);

  // B-grid functions shifted to the A grid (B points sit +h/2 to the right).
  std::vector<cdouble> B_onA = spectral_transform(B, h, 0, +0.5);
  std::vector<cdouble> dB_onA = spectral_transform(B, h, 1, +0.5);
  std::vector<cdouble> d2B_onA = spectral_transform(B, h, 2, +0.5);
  // A-grid functions shifted to the B grid.
  std::vector<cdouble> A_onB = spectral_transform(A, h, 0, -0.5);
  std::vector<cdouble> dA_onB = spectral_transform(A, h, 1, -0.5);
  std::vector<cdouble> d2A_onB = spectral_transform(A, h, 2, -0.5);
  // d/dX1 (f2 Psi^A), computed on the A grid then shifted.
  std::vector<cdouble> f2A(n);
  for (size_t j = 0; j < n; ++j) {
    double f2 = -kSqrt3 / 4.0 * profile.d_prime(psi0.agrid[j]);
    f2A[j] = f2 * A[j];
  }
  std::vector<cdouble> df2A_onB = spectral_transform(f2A, h, 1, -0.5);

  cdouble ip_a = 0.0, ip_b = 0.0;
  for (size_t j = 0; j < n; ++j) {
    double f2a = -kSqrt3 / 4.0 * profile.d_prime(psi0.agrid[j]);
    cdouble r2a = -0.125 * kpar * kpar * B_onA[j] -
                  (kSqrt3 * e5 * t1 * f2a - cdouble(0.0, kSqrt3 / 4.0 * kpar)) * dB_onA[j] -
                  (1.5 * e5 - 0.375) * d2B_onA[j];
    ip_a += std::conj(A[j]) * r2a;

    cdouble r2b = -0.125 * kpar * kpar * A_onB[j] +
                  cdouble(0.0, kSqrt3 / 4.0 * kpar) * dA_onB[j] +
                  kSqrt3 * e5c * t1 * df2A_onB[j] - (1.5 * e5c - 0.375) * d2A_onB[j];
    ip_b += std::conj(B[j]) * r2b;
  }
  ip_a *= h;
  ip_b *= h;
  return -(ip_a + ip_b) / (kSqrt3 / 2.0);
}

RateEstimate rate_fit(const std::vector<double>& deltas, const std::vector<double>& values) {
  if (deltas.size() != values.size() || deltas.size() < 3)
    throw std::invalid_argument("rate_fit: need >= 3 matching points");
  for (double v : values)
    if (v <= 0.0) throw std::invalid_argument("rate_fit: values must be positive");
  for (double d : deltas)
    if (d <= 0.0) throw std::invalid_argument("rate_fit: deltas must be positive");

  const size_t n = deltas.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double x = std::log(deltas[i]), y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  double den = n * sxx - sx * sx;
  RateEstimate r;
  r.deltas = deltas;
  r.values = values;
  r.fitted_order = (n * sxy - sx * sy) / den;
  double ss_tot = syy - sy * sy / n;
  double intercept = (sy - r.fitted_order * sx) / n;
  double ss_res = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double pred = intercept + r.fitted_order * std::log(deltas[i]);
    double d = std::log(values[i]) - pred;
    ss_res += d * d;
  }
  r.r_squared = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
  return r;
}

double nearest_eigenvector_distance(const EnvelopeAnsatz& ansatz, const EigenResult& modes) {
  if (!modes.has_vectors())
    throw std::invalid_argument("nearest_eigenvector_distance: eigenvectors required");
  const int dim = modes.dim;
  if (dim != static_cast<int>(ansatz.values.size()))
    throw std::invalid_argument("nearest_eigenvector_distance: dimension mismatch");
  const int k = static_cast<int>(modes.eigenvalues.size());

  double anorm = 0.0;
  for (const auto& z : ansatz.values) anorm += std::norm(z);
  anorm = std::sqrt(anorm);

  // Degenerate eigenvalues make single columns basis-dependent; compare
  // against the projection onto each (near-)degenerate eigenspace instead.
  double escale = 1.0;
  for (double e : modes.eigenvalues) escale = std::max(escale, std::abs(e));
  const double cluster_tol = 1e-8 * escale;

  std::vector<cdouble> ov(k);
  for (int c = 0; c < k; ++c) {
    cdouble acc = 0.0;
    for (int r = 0; r < dim; ++r) acc += std::conj(modes.vec(r, c)) * ansatz.values[r] / anorm;
    ov[c] = acc;
  }

  double best_w2 = -1.0;
  int best_lo = 0, best_hi = 0;
  int lo = 0;
  while (lo < k) {
    int hi = lo + 1;
    while (hi < k && modes.eigenvalues[hi] - modes.eigenvalues[hi - 1] <= cluster_tol) ++hi;
    double w2 = 0.0;
    for (int c = lo; c < hi; ++c) w2 += std::norm(ov[c]);
    if (w2 > best_w2) {
      best_w2 = w2;
      best_lo = lo;
      best_hi = hi;
    }
    lo = hi;
  }

  // normalized projection, phase-aligned by construction
  double dist2 = 0.0;
  const double wnorm = std::sqrt(best_w2);
  for (int r = 0; r < dim; ++r) {
    cdouble proj = 0.0;
    for (int c = best_lo; c < best_hi; ++c) proj += modes.vec(r, c) * ov[c];
    dist2 += std::norm(proj / wnorm - ansatz.values[r] / anorm);
  }
  return std::sqrt(dist2);
}

ValidationReport run_regularized_validation(const ValidationConfig& cfg) {
  ValidationReport rep;
  rep.deltas = cfg.deltas;

  UnidirectionalProfile prof = regularized_quadratic(cfg.L, cfg.mollifier_width);
  KappaProfile kappa = KappaProfile::from_profile(prof, cfg.k_parallel, cfg.t1);
  DiracDiscretization disc = discretize(kappa, cfg.dirac_half_width, cfg.dirac_cells);
  DiracSpectrumResult spec1d = in_gap_spectrum(disc, kappa);

  // Zero mode and first nonzero level from the 1D operator.
  int zero_idx = -1, level_idx = -1;
  double zero_best = std::numeric_limits<double>::max();
  for (size_t i = 0; i < spec1d.in_gap_eigenvalues.size(); ++i) {
    double e = spec1d.in_gap_eigenvalues[i];
    if (std::abs(e) < zero_best) {
      zero_best = std::abs(e);
      zero_idx = static_cast<int>(i);
    }
  }
  double level_best = std::numeric_limits<double>::max();
  for (size_t i = 0; i < spec1d.in_gap_eigenvalues.size(); ++i) {
    double e = spec1d.in_gap_eigenvalues[i];
    if (static_cast<int>(i) == zero_idx || e <= 0.0) continue;
    if (e < level_best) {
      level_best = e;
      level_idx = static_cast<int>(i);
    }
  }
  if (zero_idx < 0) throw std::runtime_error("validation: no zero mode found in the gap");

  auto grid_fn = [&](int idx) {
    DiracGridFunction f;
    f.agrid = disc.agrid;
    f.bgrid = disc.bgrid;
    f.a = spec1d.eigenfunctions_a[idx];
    f.b = spec1d.eigenfunctions_b[idx];
    return f;
  };
  DiracGridFunction psi_zero = grid_fn(zero_idx);
  rep.e2_zero_mode_abs = std::abs(compute_E2(psi_zero, 0.0, kappa));

  DisplacementField field = DisplacementField::unidirectional_ac(prof);
  auto make_spec = [&](double delta, double coverage) {
    SupercellSpec s;
    s.orientation = Orientation::AC;
    s.boundary = BoundaryCondition::ZeroTruncation;
    s.delta = delta;
    s.hopping = HoppingMode::CellLinearized;
    s.field = field;
    s.t1 = cfg.t1;
    s.n_t = static_cast<int>(std::ceil(coverage / (kSqrt3 * delta)));
    return s;
  };

  // (a) zero-mode ansatz residual rate.
  for (double delta : cfg.deltas) {
    SupercellSpec s = make_spec(delta, cfg.coverage_x);
    EnvelopeAnsatz an = build_ansatz(psi_zero, spec1d.in_gap_eigenvalues[zero_idx],
                                     cfg.k_parallel, delta, s);
    rep.residuals.push_back(residual(an, s).residual);
  }
  rep.residual_order = rate_fit(cfg.deltas, rep.residuals).fitted_order;

  // (b) zero-band eigenvalue decay and (c) first-level corrector ratio.
  double e1_level = (level_idx >= 0) ? spec1d.in_gap_eigenvalues[level_idx] : 0.0;
  rep.e1_first_level = e1_level;
  if (level_idx >= 0) {
    DiracGridFunction psi_lvl = grid_fn(level_idx);
    rep.e2_first_level = compute_E2(psi_lvl, e1_level, kappa).real();
  }
  for (double delta : cfg.deltas) {
    SupercellSpec s = make_spec(delta, cfg.coverage_x_level);
    const double q_delta = delta * cfg.k_parallel / (3.0 * kPi);
    BlochMatrix H = assemble_supercell(s, q_delta);
    EigenResult r = eig_supercell(H, false);
    double emin = std::numeric_limits<double>::max();
    for (double e : r.eigenvalues) emin = std::min(emin, std::abs(e));
    rep.zero_band_abs_e.push_back(emin);
    if (level_idx >= 0) {
      double target = delta * e1_level;
      double best = std::numeric_limits<double>::max();
      double ed = 0.0;
      for (double e : r.eigenvalues) {
        if (std::abs(e - target) < best) {
          best = std::abs(e - target);
          ed = e;
        }
      }
      rep.corrector_ratio.push_back(std::abs(ed - target) / (delta * delta));
    }
  }
  rep.zero_band_order = rate_fit(cfg.deltas, rep.zero_band_abs_e).fitted_order;
  return rep;
}

}  // namespace strainband
