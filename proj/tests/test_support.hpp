#pragma once

// Shared builders and reference computations for the test suites. Everything
// here is deliberately independent of the solver code paths it checks.

#include <cmath>

#include "spgep/gep.hpp"
#include "spgep/kernels.hpp"
#include "spgep/linalg.hpp"
#include "spgep/matrix.hpp"
#include "spgep/penalty.hpp"
#include "spgep/rng.hpp"

namespace testsup {

inline spgep::Matrix random_matrix(int rows, int cols, spgep::rng::Stream& s) {
  spgep::Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = s.normal();
  return m;
}

inline spgep::Matrix random_spd(int p, spgep::rng::Stream& s, double ridge = 0.5) {
  const spgep::Matrix g = random_matrix(p, p, s);
  spgep::Matrix out = spgep::kernels::gram(g);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) out(i, j) /= p;
    out(i, i) += ridge;
  }
  return out;
}

inline spgep::Matrix random_orthonormal(int p, int d, spgep::rng::Stream& s) {
  return spgep::linalg::qr_thin(random_matrix(p, d, s)).q;
}

inline double max_abs_diff(const spgep::Matrix& a, const spgep::Matrix& b) {
  double m = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m = std::fmax(m, std::fabs(a(i, j) - b(i, j)));
  return m;
}

// Orthonormal basis of the d leading generalized eigenvectors, computed the
// textbook way: whiten with the Cholesky factor of B, eigendecompose, map
// back. The solvers under test never call this.
inline spgep::Matrix dense_gep_basis(const spgep::Matrix& a, const spgep::Matrix& b, int d) {
  using namespace spgep;
  const Matrix l = linalg::cholesky_lower(b);
  Matrix c = a;
  linalg::solve_lower_inplace(l, c);
  c = c.transposed();
  linalg::solve_lower_inplace(l, c);
  symmetrize(c);
  const linalg::EigResult eig = linalg::sym_eig(c);
  Matrix w = eig.vectors.cols_slice(0, d);
  linalg::solve_lower_transposed_inplace(l, w);
  return linalg::qr_thin(w).q;
}

// Proximal-gradient reference for
//   min_Z 1/2 tr(Z^T B Z) - tr(Z^T M) + p(Z),
// run to stationarity. Shares nothing with the coordinate-descent solver.
inline spgep::Matrix prox_gradient_oracle(const spgep::Matrix& b, const spgep::Matrix& m,
                                          const spgep::PenaltySpec& pen,
                                          int max_iters = 200000, double tol = 1e-13) {
  using namespace spgep;
  const double step = 1.0 / linalg::sym_eig(b).values[0];
  const int p = m.rows(), d = m.cols();
  Matrix z(p, d);
  for (int it = 0; it < max_iters; ++it) {
    Matrix g = kernels::matmul(b, z);
    double change = 0.0;
    for (int i = 0; i < p; ++i) {
      double next_row[16];
      if (pen.kind == PenaltyKind::ElementLasso) {
        for (int j = 0; j < d; ++j)
          next_row[j] = soft_threshold(z(i, j) - step * (g(i, j) - m(i, j)),
                                       step * pen.lambda(j));
      } else {
        double norm = 0.0;
        for (int j = 0; j < d; ++j) {
          next_row[j] = z(i, j) - step * (g(i, j) - m(i, j));
          norm += next_row[j] * next_row[j];
        }
        norm = std::sqrt(norm);
        const double shrink = norm > step * pen.lambda(0)
                                  ? 1.0 - step * pen.lambda(0) / norm
                                  : 0.0;
        for (int j = 0; j < d; ++j) next_row[j] *= shrink;
      }
      for (int j = 0; j < d; ++j) {
        change = std::fmax(change, std::fabs(next_row[j] - z(i, j)));
        z(i, j) = next_row[j];
      }
    }
    if (change < tol) break;
  }
  return z;
}

}  // namespace testsup
