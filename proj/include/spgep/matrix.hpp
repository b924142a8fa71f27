#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace spgep {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles. The only data structure the solvers use.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}

  static Matrix identity(int n);
  static Matrix from_rows(int rows, int cols, std::initializer_list<double> v);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

  double* row_ptr(int i) { return data_.data() + static_cast<size_t>(i) * cols_; }
  const double* row_ptr(int i) const { return data_.data() + static_cast<size_t>(i) * cols_; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  Matrix transposed() const;
  Matrix cols_slice(int first, int count) const;  // copy of columns [first, first+count)

  bool operator==(const Matrix& o) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

bool all_finite(const Matrix& m);
bool is_symmetric(const Matrix& m, double tol);
void symmetrize(Matrix& m);                       // m <- (m + m^T)/2, square only
double max_abs(const Matrix& m);
double frobenius_norm(const Matrix& m);

}  // namespace spgep
