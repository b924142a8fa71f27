#pragma once

#include "spgep/matrix.hpp"

namespace spgep::linalg {

// Deterministic sign convention used by every factorization here: the
// largest-magnitude entry of each returned vector is made positive, ties
// broken toward the lowest index.

struct EigResult {
  Vector values;   // descending
  Matrix vectors;  // orthonormal columns, values[j] goes with column j
};

// Symmetric eigendecomposition by cyclic Jacobi rotations.
EigResult sym_eig(const Matrix& s);

struct QrResult {
  Matrix q;  // p x d, orthonormal columns
  Matrix r;  // d x d, upper triangular, nonnegative diagonal
};

// Thin Householder QR of a p x d matrix (p >= d). Throws RankDeficient with
// the numerical rank attached when sigma_min <= 1e-12 * sigma_max.
QrResult qr_thin(const Matrix& z);

struct SmallGepResult {
  Matrix t;       // d x d, columns satisfy T^T Bt T = I
  Vector values;  // descending
};

// Solves At T = Bt T diag(values) for symmetric At and SPD Bt by Cholesky
// whitening. Throws NotPositiveDefinite when Bt fails its Cholesky.
SmallGepResult small_gep(const Matrix& at, const Matrix& bt);

// Largest principal-angle sine between the column spans of u1 and u2.
// Handles different column counts via the min(d1, d2) principal angles;
// inputs with non-orthonormal columns are orthonormalized first.
double projection_distance(const Matrix& u1, const Matrix& u2);

// Singular values of a real matrix, descending (one-sided Jacobi).
Vector singular_values(const Matrix& m);

// Lower Cholesky factor of an SPD matrix; throws NotPositiveDefinite.
Matrix cholesky_lower(const Matrix& s);

// In-place triangular solves against every column of x.
void solve_lower_inplace(const Matrix& l, Matrix& x);            // L y = x
void solve_lower_transposed_inplace(const Matrix& l, Matrix& x); // L^T y = x

// S^{-1} x for SPD s, via Cholesky.
Matrix spd_solve(const Matrix& s, const Matrix& x);

}  // namespace spgep::linalg
