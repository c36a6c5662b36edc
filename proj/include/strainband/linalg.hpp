#ifndef STRAINBAND_LINALG_HPP
#define STRAINBAND_LINALG_HPP

#include <complex>
#include <functional>
#include <optional>
#include <vector>

namespace strainband {

using cdouble = std::complex<double>;

// Eigen-decomposition of a Hermitian matrix.  Eigenvalues ascending; when
// vectors are requested, column i of `vectors` (row-major dim x count)
// pairs with eigenvalues[i].
struct EigenDecomposition {
  int dim = 0;
  std::vector<double> eigenvalues;
  std::vector<cdouble> vectors;  // empty unless requested
  bool has_vectors() const { return !vectors.empty(); }
  cdouble vec(int row, int col) const {
    return vectors[static_cast<size_t>(row) * eigenvalues.size() + col];
  }
};

// Dense Hermitian eigensolver: Householder tridiagonalization followed by
// implicit-shift QL iteration.  Deterministic.  `a` is row-major n x n and
// is read from its lower triangle (the strict upper triangle is ignored).
// If num_lowest_abs is set, only that many eigenpairs of smallest magnitude
// are returned (ascending); their eigenvectors come from inverse iteration
// plus a Rayleigh-Ritz refinement instead of full accumulation.
// Throws std::runtime_error on QL non-convergence, naming the index.
EigenDecomposition eig_hermitian(const cdouble* a, int n, bool want_vectors,
                                 std::optional<int> num_lowest_abs = std::nullopt);

// Hermitian tridiagonal eigensolver (diag real, offdiag complex), same
// contract as above.  Used for large 1D discretizations where dense storage
// is wasteful.
EigenDecomposition eig_hermitian_tridiag(const std::vector<double>& diag,
                                         const std::vector<cdouble>& offdiag,
                                         bool want_vectors,
                                         std::optional<int> num_lowest_abs = std::nullopt);

// Implicit-shift QL on a real symmetric tridiagonal; d is overwritten with
// the (unsorted) eigenvalues.  e[i] couples i and i+1; e is destroyed.
// The shared rotation budget is 30*n full sweeps.
void tridiag_ql(std::vector<double>& d, std::vector<double>& e);

// LAPACK-style banded LU with partial pivoting (zgbtrf/zgbtrs, unblocked).
class BandedLU {
 public:
  // Factor (A - shift I) where A(i,j) = get(i,j) within |i-j| <= bw.
  BandedLU(int n, int bw, const std::function<cdouble(int, int)>& get, cdouble shift);
  void solve(std::vector<cdouble>& b) const;

 private:
  int n_, kl_, ku_, ldab_;
  std::vector<cdouble> ab_;  // column-major, ldab x n
  std::vector<int> ipiv_;
};

}  // namespace strainband

#endif
