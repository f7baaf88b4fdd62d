#pragma once

#include <cstddef>
#include <vector>

namespace ftscert::linalg {

// Dense matrices are row-major vectors of doubles, dimension passed alongside.

// In-place Cholesky A = L L^T on the lower triangle. Returns false if a pivot
// drops below `tol` (matrix not positive definite to working precision).
bool cholesky(std::vector<double>& a, size_t n, double tol = 0.0);

// Solve L L^T x = b given the factor from cholesky(). b is overwritten with x.
void chol_solve(const std::vector<double>& l, size_t n, std::vector<double>& b);

// Eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.
// On return eigvals holds the eigenvalues (ascending) and eigvecs the
// corresponding eigenvectors as rows. Deterministic: fixed sweep order,
// fixed tolerance, no pivot searching.
void jacobi_eigensym(const std::vector<double>& a, size_t n,
                     std::vector<double>& eigvals, std::vector<double>& eigvecs);

// Smallest eigenvalue of a symmetric matrix.
double sym_min_eig(const std::vector<double>& a, size_t n);

// LU with partial pivoting: A -> L\U packed in place, perm records row swaps.
// Returns false on exact singularity.
bool lu_factor(std::vector<double>& a, size_t n, std::vector<int>& perm);

// Solve with the packed factor. b is overwritten with x.
void lu_solve(const std::vector<double>& lu, size_t n, const std::vector<int>& perm,
              std::vector<double>& b);

}  // namespace ftscert::linalg
