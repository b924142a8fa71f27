#pragma once

#include "spgep/matrix.hpp"

namespace spgep::kernels {

// Dense products used on the hot paths. The default entry points split work
// across rows (or row pairs) with OpenMP; each output element is accumulated
// by a single thread in a fixed order, so results are bit-identical to the
// serial reference for any thread count.

Matrix matmul(const Matrix& a, const Matrix& b);     // A * B
Matrix matmul_tn(const Matrix& a, const Matrix& b);  // A^T * B
Matrix matmul_nt(const Matrix& a, const Matrix& b);  // A * B^T
Matrix gram(const Matrix& x);                        // X^T * X (symmetric)

// Serial reference implementations, kept for parity tests and benchmarks.
namespace serial {
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_tn(const Matrix& a, const Matrix& b);
Matrix matmul_nt(const Matrix& a, const Matrix& b);
Matrix gram(const Matrix& x);
}  // namespace serial

}  // namespace spgep::kernels
