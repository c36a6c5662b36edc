#include "strainband/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace strainband {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Householder reduction of a Hermitian matrix (row-major, lower triangle
// significant) to real symmetric tridiagonal form; a is overwritten with the
// reflector vectors, stored below the first subdiagonal.  On exit
// d[i] = T(i,i) and e[i] = T(i+1,i) for i < n-1.
void householder_tridiag(std::vector<cdouble>& a, int n, std::vector<double>& d,
                         std::vector<double>& e, std::vector<cdouble>& tau) {
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  tau.assign(n, cdouble(0.0));
  auto A = [&](int i, int j) -> cdouble& { return a[static_cast<size_t>(i) * n + j]; };

  std::vector<cdouble> w(n), v(n);
  for (int k = 0; k + 1 < n; ++k) {
    cdouble alpha = A(k + 1, k);
    double xnorm2 = 0.0;
    for (int i = k + 2; i < n; ++i) xnorm2 += std::norm(A(i, k));
    if (xnorm2 == 0.0 && alpha.imag() == 0.0) {
      tau[k] = 0.0;
      e[k] = alpha.real();
      continue;
    }
    double anorm = std::sqrt(std::norm(alpha) + xnorm2);
    double beta = (alpha.real() >= 0.0) ? -anorm : anorm;
    tau[k] = cdouble((beta - alpha.real()) / beta, -alpha.imag() / beta);
    cdouble scal = 1.0 / (alpha - beta);
    for (int i = k + 2; i < n; ++i) A(i, k) *= scal;
    e[k] = beta;

    // v = [1, A(k+2..n-1, k)] on rows k+1..n-1
    v[k + 1] = 1.0;
    for (int i = k + 2; i < n; ++i) v[i] = A(i, k);

    // w = tau * A_sub * v, reading only the lower triangle.
    for (int i = k + 1; i < n; ++i) w[i] = 0.0;
    for (int r = k + 1; r < n; ++r) {
      const cdouble vr = v[r];
      cdouble acc = A(r, r).real() * vr;
      const cdouble* row = a.data() + static_cast<size_t>(r) * n;
      for (int c = k + 1; c < r; ++c) {
        acc += row[c] * v[c];
        w[c] += std::conj(row[c]) * vr;
      }
      w[r] += acc;
    }
    for (int i = k + 1; i < n; ++i) w[i] *= tau[k];

    cdouble wv = 0.0;  // w^H v
    for (int i = k + 1; i < n; ++i) wv += std::conj(w[i]) * v[i];
    cdouble corr = -0.5 * tau[k] * wv;
    for (int i = k + 1; i < n; ++i) w[i] += corr * v[i];

    // A_sub -= v w^H + w v^H (lower triangle only)
    for (int r = k + 1; r < n; ++r) {
      cdouble* row = a.data() + static_cast<size_t>(r) * n;
      const cdouble vr = v[r], wr = w[r];
      for (int c = k + 1; c <= r; ++c) {
        row[c] -= vr * std::conj(w[c]) + wr * std::conj(v[c]);
      }
    }
  }
  for (int i = 0; i < n; ++i) d[i] = a[static_cast<size_t>(i) * n + i].real();
}

// Accumulate Q = H_0 H_1 ... H_{n-2} into z (row-major n x n), given the
// reflectors left by householder_tridiag.
void accumulate_q(const std::vector<cdouble>& a, const std::vector<cdouble>& tau, int n,
                  std::vector<cdouble>& z) {
  z.assign(static_cast<size_t>(n) * n, cdouble(0.0));
  for (int i = 0; i < n; ++i) z[static_cast<size_t>(i) * n + i] = 1.0;
  std::vector<cdouble> v(n), w(n);
  for (int k = n - 2; k >= 0; --k) {
    if (tau[k] == cdouble(0.0)) continue;
    v[k + 1] = 1.0;
    for (int i = k + 2; i < n; ++i) v[i] = a[static_cast<size_t>(i) * n + k];
    // w^H = v^H Z  (w_c = sum_i conj(v_i) Z(i,c)), then Z -= tau v w^H
    std::fill(w.begin(), w.end(), cdouble(0.0));
    for (int i = k + 1; i < n; ++i) {
      const cdouble vi = std::conj(v[i]);
      const cdouble* row = z.data() + static_cast<size_t>(i) * n;
      for (int c = 0; c < n; ++c) w[c] += vi * row[c];
    }
    for (int i = k + 1; i < n; ++i) {
      const cdouble f = tau[k] * v[i];
      cdouble* row = z.data() + static_cast<size_t>(i) * n;
      for (int c = 0; c < n; ++c) row[c] -= f * w[c];
    }
  }
}

// Implicit-shift QL on a real symmetric tridiagonal, optionally rotating the
// columns of z (row-major zrows x n complex).  d becomes the (unsorted)
// eigenvalues.  Shared budget of 30*n sweeps.
void tqli(std::vector<double>& d, std::vector<double>& e, int n, cdouble* z, int zrows) {
  long budget = 30L * n;
  e.resize(n, 0.0);
  for (int l = 0; l < n; ++l) {
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= kEps * dd) break;
      }
      if (m != l) {
        if (budget-- <= 0)
          throw std::runtime_error("eig_hermitian: QL failed to converge at index " +
                                   std::to_string(l));
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        for (i = m - 1; i >= l; --i) {
          double f = s * e[i];
          double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          if (z) {
            for (int row = 0; row < zrows; ++row) {
              cdouble* zr = z + static_cast<size_t>(row) * n;
              cdouble zf = zr[i + 1];
              zr[i + 1] = s * zr[i] + c * zf;
              zr[i] = c * zr[i] - s * zf;
            }
          }
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

struct Lcg {
  uint64_t state;
  explicit Lcg(uint64_t seed) : state(seed * 6364136223846793005ULL + 1442695040888963407ULL) {}
  double next() {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(state >> 11) / 9007199254740992.0 - 0.5;
  }
};

}  // namespace

void tridiag_ql(std::vector<double>& d, std::vector<double>& e) {
  tqli(d, e, static_cast<int>(d.size()), nullptr, 0);
}

BandedLU::BandedLU(int n, int bw, const std::function<cdouble(int, int)>& get, cdouble shift)
    : n_(n), kl_(bw), ku_(bw), ldab_(3 * bw + 1), ipiv_(n) {
  ab_.assign(static_cast<size_t>(ldab_) * n_, cdouble(0.0));
  const int kv = kl_ + ku_;
  auto AB = [&](int r, int j) -> cdouble& { return ab_[static_cast<size_t>(j) * ldab_ + r]; };
  for (int j = 0; j < n_; ++j) {
    int ilo = std::max(0, j - ku_), ihi = std::min(n_ - 1, j + kl_);
    for (int i = ilo; i <= ihi; ++i) {
      cdouble v = get(i, j);
      if (i == j) v -= shift;
      AB(kv + i - j, j) = v;
    }
  }
  // zgbtf2-style factorization with partial pivoting.
  int ju = 0;
  double scale = 0.0;
  for (size_t idx = 0; idx < ab_.size(); ++idx) scale = std::max(scale, std::abs(ab_[idx]));
  const double tiny = std::max(scale, 1.0) * kEps * 1e-2;
  for (int j = 0; j < n_; ++j) {
    const int km = std::min(kl_, n_ - 1 - j);
    int jp = 0;
    double amax = std::abs(AB(kv, j));
    for (int p = 1; p <= km; ++p) {
      double t = std::abs(AB(kv + p, j));
      if (t > amax) {
        amax = t;
        jp = p;
      }
    }
    ipiv_[j] = j + jp;
    ju = std::max(ju, std::min(j + ku_ + jp, n_ - 1));
    if (amax == 0.0) {
      AB(kv + jp, j) = tiny;  // keep the solve usable for inverse iteration
    }
    if (jp != 0) {
      for (int k = j; k <= ju; ++k) std::swap(AB(kv + j - k, k), AB(kv + j + jp - k, k));
    }
    if (km > 0) {
      cdouble piv = AB(kv, j);
      if (std::abs(piv) < tiny) piv = AB(kv, j) = tiny;
      for (int p = 1; p <= km; ++p) AB(kv + p, j) /= piv;
      for (int k = j + 1; k <= ju; ++k) {
        cdouble f = AB(kv + j - k, k);
        if (f != cdouble(0.0)) {
          for (int p = 1; p <= km; ++p) AB(kv + j + p - k, k) -= AB(kv + p, j) * f;
        }
      }
    } else if (std::abs(AB(kv, j)) < tiny) {
      AB(kv, j) = tiny;
    }
  }
}

void BandedLU::solve(std::vector<cdouble>& b) const {
  const int kv = kl_ + ku_;
  auto AB = [&](int r, int j) -> const cdouble& {
    return ab_[static_cast<size_t>(j) * ldab_ + r];
  };
  for (int j = 0; j < n_ - 1; ++j) {
    const int lm = std::min(kl_, n_ - 1 - j);
    int l = ipiv_[j];
    if (l != j) std::swap(b[l], b[j]);
    for (int p = 1; p <= lm; ++p) b[j + p] -= AB(kv + p, j) * b[j];
  }
  for (int j = n_ - 1; j >= 0; --j) {
    b[j] /= AB(kv, j);
    const int lm = std::min(kl_ + ku_, j);
    for (int p = 1; p <= lm; ++p) b[j - p] -= AB(kv - p, j) * b[j];
  }
}

namespace {

// Cluster-blocked inverse (subspace) iteration plus a global Rayleigh-Ritz
// refinement for a set of target eigenvalues of a Hermitian operator given
// by banded element access.  Clustered shifts share one factorization and
// are iterated as a block, which keeps tightly degenerate eigenspaces
// well-conditioned.
void selected_eigenvectors(int n, int bw, const std::function<cdouble(int, int)>& get,
                           std::vector<double>& lambdas, std::vector<cdouble>& vectors) {
  const int k = static_cast<int>(lambdas.size());
  vectors.assign(static_cast<size_t>(n) * k, cdouble(0.0));
  double scale = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - bw); j <= std::min(n - 1, i + bw); ++j)
      scale = std::max(scale, std::abs(get(i, j)));
  if (scale == 0.0) scale = 1.0;

  auto matvec = [&](const std::vector<cdouble>& x, std::vector<cdouble>& y) {
    y.assign(n, cdouble(0.0));
    for (int i = 0; i < n; ++i) {
      cdouble acc = 0.0;
      for (int j = std::max(0, i - bw); j <= std::min(n - 1, i + bw); ++j)
        acc += get(i, j) * x[j];
      y[i] = acc;
    }
  };
  auto dot = [&](const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
    cdouble s = 0.0;
    for (int i = 0; i < n; ++i) s += std::conj(a[i]) * b[i];
    return s;
  };
  auto nrm = [&](const std::vector<cdouble>& a) { return std::sqrt(std::abs(dot(a, a))); };

  std::vector<std::vector<cdouble>> basis;
  basis.reserve(k);

  const double cluster_tol = 1e-6 * scale;
  int c0 = 0;
  while (c0 < k) {
    int c1 = c0 + 1;
    while (c1 < k && lambdas[c1] - lambdas[c1 - 1] <= cluster_tol) ++c1;
    const int kc = c1 - c0;
    double shift = 0.0;
    for (int m = c0; m < c1; ++m) shift += lambdas[m];
    shift /= kc;

    BandedLU lu(n, bw, get, cdouble(shift, 0.0));
    std::vector<std::vector<cdouble>> block(kc, std::vector<cdouble>(n));
    Lcg rng(static_cast<uint64_t>(n) * 1000003u + c0);
    for (auto& col : block)
      for (int i = 0; i < n; ++i) col[i] = cdouble(rng.next(), rng.next());

    std::vector<cdouble> y(n);
    for (int sweep = 0; sweep < 8; ++sweep) {
      double worst = 0.0;
      for (int m = 0; m < kc; ++m) {
        lu.solve(block[m]);
        for (const auto& b : basis) {
          cdouble ov = dot(b, block[m]);
          for (int i = 0; i < n; ++i) block[m][i] -= ov * b[i];
        }
        for (int p = 0; p < m; ++p) {
          cdouble ov = dot(block[p], block[m]);
          for (int i = 0; i < n; ++i) block[m][i] -= ov * block[p][i];
        }
        double norm = nrm(block[m]);
        if (norm == 0.0) {
          for (int i = 0; i < n; ++i) block[m][i] = cdouble(rng.next(), rng.next());
          norm = nrm(block[m]);
        }
        for (int i = 0; i < n; ++i) block[m][i] /= norm;
      }
      for (int m = 0; m < kc; ++m) {
        matvec(block[m], y);
        double r2 = 0.0;
        for (int i = 0; i < n; ++i) r2 += std::norm(y[i] - shift * block[m][i]);
        // distance to the cluster, not to the mean shift
        double res = std::sqrt(r2);
        double spread = lambdas[c1 - 1] - lambdas[c0];
        worst = std::max(worst, std::max(0.0, res - spread));
      }
      if (sweep >= 1 && worst <= 1e-11 * scale) break;
    }
    for (int m = 0; m < kc; ++m) basis.push_back(std::move(block[m]));
    c0 = c1;
  }

  // Re-orthonormalize (twice) and project H onto the basis.
  for (int pass = 0; pass < 2; ++pass) {
    for (int m = 0; m < k; ++m) {
      for (int p = 0; p < m; ++p) {
        cdouble ov = dot(basis[p], basis[m]);
        for (int i = 0; i < n; ++i) basis[m][i] -= ov * basis[p][i];
      }
      double norm = nrm(basis[m]);
      for (int i = 0; i < n; ++i) basis[m][i] /= norm;
    }
  }
  std::vector<std::vector<cdouble>> hbasis(k);
  for (int m = 0; m < k; ++m) matvec(basis[m], hbasis[m]);
  std::vector<cdouble> small(static_cast<size_t>(k) * k);
  for (int p = 0; p < k; ++p)
    for (int q = 0; q < k; ++q) small[static_cast<size_t>(p) * k + q] = dot(basis[p], hbasis[q]);
  EigenDecomposition ritz = eig_hermitian(small.data(), k, true);
  for (int i = 0; i < n; ++i) {
    for (int q = 0; q < k; ++q) {
      cdouble acc = 0.0;
      for (int p = 0; p < k; ++p) acc += basis[p][i] * ritz.vec(p, q);
      vectors[static_cast<size_t>(i) * k + q] = acc;
    }
  }
  lambdas = ritz.eigenvalues;
}

EigenDecomposition finalize_selection(int n, std::vector<double> all_sorted,
                                      std::optional<int> num_lowest_abs, bool want_vectors,
                                      int bw, const std::function<cdouble(int, int)>& get) {
  EigenDecomposition out;
  out.dim = n;
  if (!num_lowest_abs) {
    out.eigenvalues = std::move(all_sorted);
    return out;
  }
  int k = std::min<int>(*num_lowest_abs, n);
  std::vector<int> idx(all_sorted.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::abs(all_sorted[a]) < std::abs(all_sorted[b]);
  });
  std::vector<double> sel;
  sel.reserve(k);
  for (int i = 0; i < k; ++i) sel.push_back(all_sorted[idx[i]]);
  std::sort(sel.begin(), sel.end());
  if (want_vectors && k > 0) {
    selected_eigenvectors(n, bw, get, sel, out.vectors);
  }
  out.eigenvalues = std::move(sel);
  return out;
}

}  // namespace

EigenDecomposition eig_hermitian(const cdouble* a, int n, bool want_vectors,
                                 std::optional<int> num_lowest_abs) {
  std::vector<cdouble> work(a, a + static_cast<size_t>(n) * n);
  std::vector<double> d, e;
  std::vector<cdouble> tau;
  householder_tridiag(work, n, d, e, tau);

  if (want_vectors && !num_lowest_abs) {
    EigenDecomposition out;
    out.dim = n;
    std::vector<cdouble> z;
    accumulate_q(work, tau, n, z);
    tqli(d, e, n, z.data(), n);
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int p, int q) { return d[p] < d[q]; });
    out.eigenvalues.resize(n);
    out.vectors.assign(static_cast<size_t>(n) * n, cdouble(0.0));
    for (int c = 0; c < n; ++c) {
      out.eigenvalues[c] = d[idx[c]];
      for (int r = 0; r < n; ++r)
        out.vectors[static_cast<size_t>(r) * n + c] = z[static_cast<size_t>(r) * n + idx[c]];
    }
    return out;
  }

  tqli(d, e, n, nullptr, 0);
  std::sort(d.begin(), d.end());
  int bw = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      if (a[static_cast<size_t>(i) * n + j] != cdouble(0.0)) bw = std::max(bw, i - j);
  bw = std::max(bw, 1);
  auto get = [a, n](int i, int j) {
    return (j <= i) ? a[static_cast<size_t>(i) * n + j]
                    : std::conj(a[static_cast<size_t>(j) * n + i]);
  };
  return finalize_selection(n, std::move(d), num_lowest_abs, want_vectors, bw, get);
}

EigenDecomposition eig_hermitian_tridiag(const std::vector<double>& diag,
                                         const std::vector<cdouble>& offdiag,
                                         bool want_vectors,
                                         std::optional<int> num_lowest_abs) {
  const int n = static_cast<int>(diag.size());
  if (static_cast<int>(offdiag.size()) != n - 1)
    throw std::invalid_argument("eig_hermitian_tridiag: offdiag size must be n-1");

  // Diagonal phase rotation making the off-diagonal real.
  std::vector<cdouble> phase(n, cdouble(1.0, 0.0));
  std::vector<double> e(n, 0.0);
  for (int i = 0; i + 1 < n; ++i) {
    double m = std::abs(offdiag[i]);
    e[i] = m;
    phase[i + 1] = (m > 0.0) ? phase[i] * (std::conj(offdiag[i]) / m) : phase[i];
  }

  auto get = [&](int i, int j) -> cdouble {
    if (i == j) return cdouble(diag[i], 0.0);
    if (j == i + 1) return offdiag[i];
    if (i == j + 1) return std::conj(offdiag[j]);
    return cdouble(0.0);
  };

  if (want_vectors && !num_lowest_abs) {
    EigenDecomposition out;
    out.dim = n;
    std::vector<double> d = diag;
    std::vector<cdouble> z(static_cast<size_t>(n) * n, cdouble(0.0));
    for (int i = 0; i < n; ++i) z[static_cast<size_t>(i) * n + i] = phase[i];
    std::vector<double> ework = e;
    tqli(d, ework, n, z.data(), n);
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int p, int q) { return d[p] < d[q]; });
    out.eigenvalues.resize(n);
    out.vectors.assign(static_cast<size_t>(n) * n, cdouble(0.0));
    for (int c = 0; c < n; ++c) {
      out.eigenvalues[c] = d[idx[c]];
      for (int r = 0; r < n; ++r)
        out.vectors[static_cast<size_t>(r) * n + c] = z[static_cast<size_t>(r) * n + idx[c]];
    }
    return out;
  }

  std::vector<double> d = diag;
  std::vector<double> ework = e;
  tqli(d, ework, n, nullptr, 0);
  std::sort(d.begin(), d.end());
  return finalize_selection(n, std::move(d), num_lowest_abs, want_vectors, 1, get);
}

}  // namespace strainband
