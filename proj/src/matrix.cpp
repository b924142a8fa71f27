#include "spgep/matrix.hpp"

#include <cmath>

#include "spgep/errors.hpp"

namespace spgep {

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(int rows, int cols, std::initializer_list<double> v) {
  if (static_cast<int>(v.size()) != rows * cols)
    fail(ErrorKind::InvalidInput, "from_rows: size mismatch");
  Matrix m(rows, cols);
  int k = 0;
  for (double x : v) m.data_[k++] = x;
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::cols_slice(int first, int count) const {
  if (first < 0 || count < 0 || first + count > cols_)
    fail(ErrorKind::InvalidInput, "cols_slice: out of range");
  Matrix s(rows_, count);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < count; ++j) s(i, j) = (*this)(i, first + j);
  return s;
}

bool all_finite(const Matrix& m) {
  const double* p = m.data();
  const size_t n = static_cast<size_t>(m.rows()) * m.cols();
  for (size_t k = 0; k < n; ++k)
    if (!std::isfinite(p[k])) return false;
  return true;
}

bool is_symmetric(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i + 1; j < m.cols(); ++j)
      if (std::fabs(m(i, j) - m(j, i)) > tol) return false;
  return true;
}

void symmetrize(Matrix& m) {
  if (m.rows() != m.cols()) fail(ErrorKind::InvalidInput, "symmetrize: not square");
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i + 1; j < m.cols(); ++j) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = v;
      m(j, i) = v;
    }
}

double max_abs(const Matrix& m) {
  double best = 0.0;
  const double* p = m.data();
  const size_t n = static_cast<size_t>(m.rows()) * m.cols();
  for (size_t k = 0; k < n; ++k) best = std::fmax(best, std::fabs(p[k]));
  return best;
}

double frobenius_norm(const Matrix& m) {
  double s = 0.0;
  const double* p = m.data();
  const size_t n = static_cast<size_t>(m.rows()) * m.cols();
  for (size_t k = 0; k < n; ++k) s += p[k] * p[k];
  return std::sqrt(s);
}

}  // namespace spgep
