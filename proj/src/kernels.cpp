#include "spgep/kernels.hpp"

#include "spgep/errors.hpp"
#include "spgep/threads.hpp"

namespace spgep::kernels {
namespace {

void check_mul(int ak, int bk, const char* what) {
  if (ak != bk) fail(ErrorKind::InvalidInput, std::string(what) + ": inner dimensions differ");
}

inline double dot_row_col(const Matrix& a, int i, const Matrix& b, int j) {
  const double* ar = a.row_ptr(i);
  double s = 0.0;
  for (int k = 0; k < a.cols(); ++k) s += ar[k] * b(k, j);
  return s;
}

inline double dot_cols(const Matrix& a, int i, const Matrix& b, int j) {
  double s = 0.0;
  for (int k = 0; k < a.rows(); ++k) s += a(k, i) * b(k, j);
  return s;
}

inline double dot_rows(const Matrix& a, int i, const Matrix& b, int j) {
  const double* ar = a.row_ptr(i);
  const double* br = b.row_ptr(j);
  double s = 0.0;
  for (int k = 0; k < a.cols(); ++k) s += ar[k] * br[k];
  return s;
}

// Work below this many multiply-adds is not worth a parallel region.
constexpr long long kMinParallelWork = 1 << 16;

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  check_mul(a.cols(), b.rows(), "matmul");
  Matrix c(a.rows(), b.cols());
  const long long work = 1LL * a.rows() * a.cols() * b.cols();
  const int nt = threads::count();
#pragma omp parallel for schedule(static) num_threads(nt) \
    if (nt > 1 && work > kMinParallelWork)
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) c(i, j) = dot_row_col(a, i, b, j);
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  check_mul(a.rows(), b.rows(), "matmul_tn");
  Matrix c(a.cols(), b.cols());
  const long long work = 1LL * a.cols() * a.rows() * b.cols();
  const int nt = threads::count();
#pragma omp parallel for schedule(static) num_threads(nt) \
    if (nt > 1 && work > kMinParallelWork)
  for (int i = 0; i < a.cols(); ++i)
    for (int j = 0; j < b.cols(); ++j) c(i, j) = dot_cols(a, i, b, j);
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  check_mul(a.cols(), b.cols(), "matmul_nt");
  Matrix c(a.rows(), b.rows());
  const long long work = 1LL * a.rows() * a.cols() * b.rows();
  const int nt = threads::count();
#pragma omp parallel for schedule(static) num_threads(nt) \
    if (nt > 1 && work > kMinParallelWork)
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.rows(); ++j) c(i, j) = dot_rows(a, i, b, j);
  return c;
}

Matrix gram(const Matrix& x) {
  Matrix c(x.cols(), x.cols());
  const long long work = 1LL * x.cols() * (x.cols() + 1) / 2 * x.rows();
  const int nt = threads::count();
#pragma omp parallel for schedule(dynamic, 4) num_threads(nt) \
    if (nt > 1 && work > kMinParallelWork)
  for (int i = 0; i < x.cols(); ++i)
    for (int j = i; j < x.cols(); ++j) {
      const double v = dot_cols(x, i, x, j);
      c(i, j) = v;
      c(j, i) = v;
    }
  return c;
}

namespace serial {

Matrix matmul(const Matrix& a, const Matrix& b) {
  check_mul(a.cols(), b.rows(), "matmul");
  Matrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) c(i, j) = dot_row_col(a, i, b, j);
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  check_mul(a.rows(), b.rows(), "matmul_tn");
  Matrix c(a.cols(), b.cols());
  for (int i = 0; i < a.cols(); ++i)
    for (int j = 0; j < b.cols(); ++j) c(i, j) = dot_cols(a, i, b, j);
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  check_mul(a.cols(), b.cols(), "matmul_nt");
  Matrix c(a.rows(), b.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.rows(); ++j) c(i, j) = dot_rows(a, i, b, j);
  return c;
}

Matrix gram(const Matrix& x) {
  Matrix c(x.cols(), x.cols());
  for (int i = 0; i < x.cols(); ++i)
    for (int j = i; j < x.cols(); ++j) {
      const double v = dot_cols(x, i, x, j);
      c(i, j) = v;
      c(j, i) = v;
    }
  return c;
}

}  // namespace serial
}  // namespace spgep::kernels
