#include "strainband/spectra.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace strainband {

EigenResult eig_supercell(const BlochMatrix& H, bool want_vectors,
                          std::optional<int> num_lowest_abs) {
  EigenDecomposition dec =
      eig_hermitian(H.data().data(), H.dim(), want_vectors, num_lowest_abs);
  EigenResult r;
  r.q_parallel = H.q_parallel();
  r.dim = H.dim();
  r.eigenvalues = std::move(dec.eigenvalues);
  r.vectors = std::move(dec.vectors);
  return r;
}

BandSweep sweep(const SupercellSpec& spec, const std::vector<double>& q_grid, int num_bands,
                int threads) {
  BandSweep out;
  out.q_grid = q_grid;
  out.spec = spec;
  out.curves.resize(q_grid.size());

  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  threads = std::min<int>(threads, std::max<size_t>(q_grid.size(), 1));

  std::atomic<size_t> next{0};
  std::vector<std::string> errors(q_grid.size());
  auto worker = [&]() {
    for (;;) {
      size_t qi = next.fetch_add(1);
      if (qi >= q_grid.size()) return;
      try {
        BlochMatrix H = assemble_supercell(spec, q_grid[qi]);
        std::optional<int> nb =
            (num_bands > 0 && num_bands < H.dim()) ? std::optional<int>(num_bands) : std::nullopt;
        EigenResult r = eig_supercell(H, false, nb);
        out.curves[qi] = std::move(r.eigenvalues);
      } catch (const std::exception& ex) {
        errors[qi] = ex.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (size_t qi = 0; qi < q_grid.size(); ++qi) {
    if (!errors[qi].empty())
      throw std::runtime_error("sweep failed at q index " + std::to_string(qi) + " (q=" +
                               std::to_string(q_grid[qi]) + "): " + errors[qi]);
  }
  return out;
}

std::string mode_label_name(ModeLabel label) {
  switch (label) {
    case ModeLabel::LeftBoundary:
      return "left";
    case ModeLabel::RightBoundary:
      return "right";
    default:
      return "bulk";
  }
}

namespace {

std::vector<double> cell_profile(const std::vector<cdouble>& v) {
  const size_t ncell = v.size() / 4;
  std::vector<double> p(ncell);
  for (size_t c = 0; c < ncell; ++c) {
    double s = 0.0;
    for (int k = 0; k < 4; ++k) s += std::norm(v[4 * c + k]);
    p[c] = std::sqrt(s);
  }
  return p;
}

}  // namespace

std::vector<ModeClassification> classify_degenerate_subspace(const EigenResult& result,
                                                             double abs_tol, int layer_cells) {
  if (!result.has_vectors())
    throw std::invalid_argument("classify_degenerate_subspace: eigenvectors required");
  const int dim = result.dim;
  const int ncell = dim / 4;
  if (layer_cells < 1 || layer_cells > ncell)
    throw std::invalid_argument("classify_degenerate_subspace: bad layer_cells");

  std::vector<int> sel;
  for (size_t i = 0; i < result.eigenvalues.size(); ++i)
    if (std::abs(result.eigenvalues[i]) <= abs_tol) sel.push_back(static_cast<int>(i));
  const int d = static_cast<int>(sel.size());
  if (d == 0) return {};

  const int cols = static_cast<int>(result.eigenvalues.size());
  auto column = [&](int j, std::vector<cdouble>& buf) {
    buf.resize(dim);
    for (int r = 0; r < dim; ++r) buf[r] = result.vectors[static_cast<size_t>(r) * cols + j];
  };

  // Subspace basis V (dim x d).
  std::vector<cdouble> V(static_cast<size_t>(dim) * d);
  std::vector<cdouble> tmp;
  for (int j = 0; j < d; ++j) {
    column(sel[j], tmp);
    for (int r = 0; r < dim; ++r) V[static_cast<size_t>(r) * d + j] = tmp[r];
  }

  // Gram matrix of a boundary projector restricted to span(V).
  auto gram = [&](bool left) {
    std::vector<cdouble> G(static_cast<size_t>(d) * d, cdouble(0.0));
    const int r0 = left ? 0 : dim - 4 * layer_cells;
    const int r1 = left ? 4 * layer_cells : dim;
    for (int p = 0; p < d; ++p)
      for (int q = 0; q < d; ++q) {
        cdouble acc = 0.0;
        for (int r = r0; r < r1; ++r)
          acc += std::conj(V[static_cast<size_t>(r) * d + p]) * V[static_cast<size_t>(r) * d + q];
        G[static_cast<size_t>(p) * d + q] = acc;
      }
    return G;
  };

  // Coefficients (in the V basis) of each classified mode.
  struct Pending {
    std::vector<cdouble> coeff;
    ModeLabel label;
    double weight;
  };
  std::vector<Pending> picked;

  // Maximize the left-boundary weight over the subspace; eigenvectors of the
  // Gram matrix in decreasing weight order solve the program exactly.
  std::vector<cdouble> Gl = gram(true);
  EigenDecomposition el = eig_hermitian(Gl.data(), d, true);
  std::vector<std::vector<cdouble>> remainder;  // coefficients of the non-left modes
  for (int j = d - 1; j >= 0; --j) {
    std::vector<cdouble> c(d);
    for (int p = 0; p < d; ++p) c[p] = el.vec(p, j);
    double wgt = el.eigenvalues[j];
    if (wgt > 0.5) {
      picked.push_back({std::move(c), ModeLabel::LeftBoundary, wgt});
    } else {
      remainder.push_back(std::move(c));
    }
  }

  // Within the orthogonal complement of the left modes, repeat on the right.
  if (!remainder.empty()) {
    const int dr = static_cast<int>(remainder.size());
    std::vector<cdouble> Gr = gram(false);
    // Project the right Gram matrix onto the remainder coefficients.
    std::vector<cdouble> Grr(static_cast<size_t>(dr) * dr, cdouble(0.0));
    for (int p = 0; p < dr; ++p)
      for (int q = 0; q < dr; ++q) {
        cdouble acc = 0.0;
        for (int s = 0; s < d; ++s)
          for (int t = 0; t < d; ++t)
            acc += std::conj(remainder[p][s]) * Gr[static_cast<size_t>(s) * d + t] *
                   remainder[q][t];
        Grr[static_cast<size_t>(p) * dr + q] = acc;
      }
    EigenDecomposition er = eig_hermitian(Grr.data(), dr, true);
    for (int j = dr - 1; j >= 0; --j) {
      std::vector<cdouble> c(d, cdouble(0.0));
      for (int p = 0; p < dr; ++p)
        for (int s = 0; s < d; ++s) c[s] += er.vec(p, j) * remainder[p][s];
      double wgt = er.eigenvalues[j];
      ModeLabel label = (wgt > 0.5) ? ModeLabel::RightBoundary : ModeLabel::Bulk;
      picked.push_back({std::move(c), label, wgt});
    }
  }

  std::vector<ModeClassification> out;
  out.reserve(picked.size());
  std::vector<cdouble> mode(dim);
  for (const auto& p : picked) {
    ModeClassification mc;
    mc.label = p.label;
    mc.boundary_weight = p.weight;
    double ev = 0.0;
    for (int s = 0; s < d; ++s) ev += std::norm(p.coeff[s]) * result.eigenvalues[sel[s]];
    mc.eigenvalue = ev;
    for (int r = 0; r < dim; ++r) {
      cdouble acc = 0.0;
      for (int s = 0; s < d; ++s) acc += V[static_cast<size_t>(r) * d + s] * p.coeff[s];
      mode[r] = acc;
    }
    mc.profile = cell_profile(mode);
    out.push_back(std::move(mc));
  }
  return out;
}

namespace {

// Least-squares polynomial fit of degree deg (<=2) to (x, y); returns
// coefficients c0..c_deg and the residual sum of squares.
struct PolyFit {
  double c[3] = {0.0, 0.0, 0.0};
  double rss = 0.0;
};

PolyFit polyfit(const std::vector<double>& x, const std::vector<double>& y, int deg) {
  const int m = deg + 1;
  double ata[3][3] = {};
  double atb[3] = {};
  for (size_t i = 0; i < x.size(); ++i) {
    double pw[3] = {1.0, x[i], x[i] * x[i]};
    for (int r = 0; r < m; ++r) {
      atb[r] += pw[r] * y[i];
      for (int c = 0; c < m; ++c) ata[r][c] += pw[r] * pw[c];
    }
  }
  // Gaussian elimination on the tiny normal system.
  for (int k = 0; k < m; ++k) {
    int piv = k;
    for (int r = k + 1; r < m; ++r)
      if (std::abs(ata[r][k]) > std::abs(ata[piv][k])) piv = r;
    std::swap(ata[k], ata[piv]);
    std::swap(atb[k], atb[piv]);
    for (int r = k + 1; r < m; ++r) {
      double f = ata[r][k] / ata[k][k];
      for (int c = k; c < m; ++c) ata[r][c] -= f * ata[k][c];
      atb[r] -= f * atb[k];
    }
  }
  PolyFit fit;
  for (int k = m - 1; k >= 0; --k) {
    double s = atb[k];
    for (int c = k + 1; c < m; ++c) s -= ata[k][c] * fit.c[c];
    fit.c[k] = s / ata[k][k];
  }
  for (size_t i = 0; i < x.size(); ++i) {
    double pred = fit.c[0] + fit.c[1] * x[i] + fit.c[2] * x[i] * x[i];
    double rloc = y[i] - pred;
    fit.rss += rloc * rloc;
  }
  return fit;
}

// true if the segment's log-profile prefers a quadratic over a linear model
bool prefers_quadratic(const std::vector<double>& x, const std::vector<double>& y) {
  PolyFit lin = polyfit(x, y, 1);
  PolyFit quad = polyfit(x, y, 2);
  const double floor_abs = 1e-18 * static_cast<double>(x.size());
  if (lin.rss <= floor_abs) return false;  // exactly linear data
  if (quad.rss <= floor_abs) return true;
  return lin.rss / quad.rss > 4.0;
}

}  // namespace

DecayFit decay_fit(const std::vector<double>& profile, int center_window) {
  const int n = static_cast<int>(profile.size());
  double peak = 0.0;
  int peak_idx = 0;
  for (int i = 0; i < n; ++i) {
    if (profile[i] < 0.0) throw std::invalid_argument("decay_fit: profile must be nonnegative");
    if (profile[i] > peak) {
      peak = profile[i];
      peak_idx = i;
    }
  }
  if (peak <= 0.0) throw std::invalid_argument("decay_fit: profile must have a positive peak");

  const double floor_val = peak * 1e-13;
  auto usable = [&](int i) { return profile[i] > floor_val; };

  // Tail index ranges walking outward from the peak.
  std::vector<int> left, right;
  for (int i = peak_idx - center_window; i >= 0 && usable(i); --i) left.push_back(i);
  for (int i = peak_idx + center_window; i < n && usable(i); ++i) right.push_back(i);
  if (static_cast<int>(left.size()) < 8 || static_cast<int>(right.size()) < 8)
    throw std::runtime_error("decay_fit: fewer than 8 usable points per tail");

  auto seg_xy = [&](const std::vector<int>& idx, size_t lo, size_t hi) {
    std::vector<double> x, y;
    for (size_t k = lo; k < hi; ++k) {
      x.push_back(static_cast<double>(idx[k]));
      y.push_back(std::log(profile[idx[k]]));
    }
    return std::make_pair(x, y);
  };

  // Compare a short segment adjacent to the peak (where a Gaussian core
  // shows curvature) against the far end of the tail.
  auto clampi = [](size_t v, size_t lo, size_t hi) { return std::min(std::max(v, lo), hi); };
  auto side_state = [&](const std::vector<int>& idx) {
    size_t inner_len = clampi(idx.size() / 16, 8, 24);
    size_t outer_len = clampi(idx.size() / 4, 8, idx.size());
    auto [xi, yi] = seg_xy(idx, 0, inner_len);
    auto [xo, yo] = seg_xy(idx, idx.size() - outer_len, idx.size());
    bool inner_quad = prefers_quadratic(xi, yi);
    bool outer_quad = prefers_quadratic(xo, yo);
    if (inner_quad && outer_quad) return DecayModel::Gaussian;
    if (!inner_quad && !outer_quad) return DecayModel::Exponential;
    return DecayModel::Mixed;
  };
  DecayModel ml = side_state(left);
  DecayModel mr = side_state(right);

  DecayFit out;
  out.model = (ml == mr) ? ml : DecayModel::Mixed;

  // Curvature from a quadratic fit over all usable tail points.
  {
    std::vector<double> x, y;
    for (int i : left) {
      x.push_back(i);
      y.push_back(std::log(profile[i]));
    }
    for (int i : right) {
      x.push_back(i);
      y.push_back(std::log(profile[i]));
    }
    PolyFit q = polyfit(x, y, 2);
    out.gaussian_curvature = std::abs(q.c[2]);
  }
  // Exponential rate from the outer halves.
  {
    auto rate = [&](const std::vector<int>& idx) {
      size_t half = idx.size() / 2;
      auto [x, y] = seg_xy(idx, idx.size() - std::max<size_t>(half, 8), idx.size());
      PolyFit l = polyfit(x, y, 1);
      return std::abs(l.c[1]);
    };
    out.exp_rate = 0.5 * (rate(left) + rate(right));
  }
  return out;
}

double flatness(const BandSweep& sw, int band_index, double q_min, double q_max) {
  double lo = std::numeric_limits<double>::max();
  double hi = -std::numeric_limits<double>::max();
  bool any = false;
  for (size_t qi = 0; qi < sw.q_grid.size(); ++qi) {
    double q = sw.q_grid[qi];
    if (q < q_min || q > q_max) continue;
    if (band_index < 0 || band_index >= static_cast<int>(sw.curves[qi].size()))
      throw std::invalid_argument("flatness: band index out of range");
    double v = sw.curves[qi][band_index];
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    any = true;
  }
  if (!any) throw std::invalid_argument("flatness: no q points inside window");
  return hi - lo;
}

}  // namespace strainband
