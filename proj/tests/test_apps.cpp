#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "spgep/apps.hpp"
#include "spgep/errors.hpp"
#include "spgep/kernels.hpp"
#include "spgep/linalg.hpp"
#include "test_support.hpp"

using namespace spgep;

namespace {

Matrix hand_covariance(const Matrix& x) {
  const int n = x.rows(), p = x.cols();
  Vector mean(p, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) mean[j] += x(i, j) / n;
  Matrix c(p, p);
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += (x(i, a) - mean[a]) * (x(i, b) - mean[b]);
      c(a, b) = s / (n - 1);
    }
  return c;
}

}  // namespace

TEST_CASE("pca_pair matches the hand covariance") {
  Matrix x = Matrix::from_rows(4, 2, {1, 2, 3, 5, 2, 4, 6, 1});
  const GepPair pair = pca_pair(x);
  const Matrix c = hand_covariance(x);
  CHECK(testsup::max_abs_diff(pair.a, c) < 1e-12);
  CHECK(pair.b == Matrix::identity(2));
  CHECK(pair.epsilon_used == 0.0);

  const GepPair gram = pca_pair(x, true);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(gram.a(i, j) == doctest::Approx(c(i, j) * 3.0).epsilon(1e-12));
}

TEST_CASE("pca_pair input validation") {
  CHECK_THROWS_AS(pca_pair(Matrix(1, 3)), Error);  // one row has no covariance
  Matrix bad(3, 2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(pca_pair(bad), Error);
}

TEST_CASE("lda_pair hand example") {
  // Two classes of four points each, separated along the first coordinate.
  LabeledData data;
  data.x = Matrix::from_rows(8, 2,
                             {0, 0, 2, 0, 1, 1, 1, -1,
                              10, 0, 12, 0, 11, 1, 11, -1});
  data.y = {0, 0, 0, 0, 1, 1, 1, 1};
  const GepPair pair = lda_pair(data);

  // class means (1, 0) and (11, 0), grand mean (6, 0):
  // A = sum_k (n_k / n) (mu_k - mu)(mu_k - mu)^T = 25 e1 e1^T
  CHECK(pair.a(0, 0) == doctest::Approx(25.0).epsilon(1e-12));
  CHECK(std::fabs(pair.a(0, 1)) < 1e-12);
  CHECK(std::fabs(pair.a(1, 1)) < 1e-12);

  // each class scatters [[2,0],[0,2]] about its mean; pooled divisor n - K = 6
  CHECK(pair.b(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(pair.b(1, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(std::fabs(pair.b(0, 1)) < 1e-12);
  CHECK(pair.epsilon_used == 0.0);
}

TEST_CASE("lda_pair rejects singleton classes") {
  LabeledData data;
  data.x = Matrix::from_rows(3, 2, {0, 0, 1, 1, 2, 2});
  data.y = {0, 0, 1};
  CHECK_THROWS_AS(lda_pair(data), Error);
  try {
    lda_pair(data);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidInput);
  }
}

TEST_CASE("sir_pair on a discrete response is a weighted between-slice scatter") {
  rng::Stream st(501);
  const int n = 400, p = 5;
  Matrix x(n, p);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    const int cls = i % 2;
    y[i] = cls;
    for (int j = 0; j < p; ++j) x(i, j) = st.normal() + (j == 0 ? 3.0 * cls : 0.0);
  }
  const GepPair pair = sir_pair({x, y}, 2);

  // two slices: A has rank 1 and B is the plain covariance of x
  const auto eig = linalg::sym_eig(pair.a);
  CHECK(eig.values[0] > 0.5);
  for (int j = 1; j < p; ++j) CHECK(std::fabs(eig.values[j]) < 1e-10);
  CHECK(testsup::max_abs_diff(pair.b, hand_covariance(x)) < 1e-10);

  // the leading eigenvector concentrates on the shifted coordinate
  const Matrix v = eig.vectors.cols_slice(0, 1);
  CHECK(std::fabs(v(0, 0)) > 0.95);
}

TEST_CASE("sir_pair slices a continuous response by quantiles") {
  rng::Stream st(502);
  const int n = 600, p = 4;
  Matrix x(n, p);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) x(i, j) = st.normal();
    y[i] = x(i, 1) + 0.1 * st.normal();
  }
  const GepPair pair = sir_pair({x, y}, 10);
  const auto eig = linalg::sym_eig(pair.a);
  const Matrix v = eig.vectors.cols_slice(0, 1);
  CHECK(std::fabs(v(1, 0)) > 0.9);  // direction e2 drives the response
  CHECK(eig.values[0] > 5.0 * std::fabs(eig.values[1]));
}

TEST_CASE("sir_pair auto kind matches the discrete path on few-valued y") {
  rng::Stream st(503);
  const int n = 60, p = 3;
  Matrix x(n, p);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    y[i] = static_cast<double>(i % 3);
    for (int j = 0; j < p; ++j) x(i, j) = st.normal();
  }
  const GepPair auto_pair = sir_pair({x, y}, 5, SliceKind::Auto);
  const GepPair disc_pair = sir_pair({x, y}, 5, SliceKind::Discrete);
  CHECK(auto_pair.a == disc_pair.a);
  CHECK(auto_pair.b == disc_pair.b);
  CHECK_THROWS_AS(sir_pair({x, y}, 1), Error);  // need >= 2 slices
}

TEST_CASE("cca_pairs identity variant") {
  rng::Stream st(504);
  const int n = 300, p = 4, q = 3;
  Matrix x(n, p), y(n, q);
  for (int i = 0; i < n; ++i) {
    const double shared = st.normal();
    for (int j = 0; j < p; ++j) x(i, j) = st.normal() + (j == 0 ? shared : 0.0);
    for (int j = 0; j < q; ++j) y(i, j) = st.normal() + (j == 0 ? shared : 0.0);
  }
  const CcaPairs pairs = cca_pairs(x, y);
  CHECK(pairs.x_side.a.rows() == p);
  CHECK(pairs.y_side.a.rows() == q);
  CHECK(pairs.x_side.b == Matrix::identity(p));
  CHECK(pairs.y_side.b == Matrix::identity(q));

  // both sides carry the same nonzero spectrum (squared cross-correlations)
  const auto ex = linalg::sym_eig(pairs.x_side.a);
  const auto ey = linalg::sym_eig(pairs.y_side.a);
  const int r = std::min(p, q);
  for (int j = 0; j < r; ++j)
    CHECK(ex.values[j] == doctest::Approx(ey.values[j]).epsilon(1e-10));
  CHECK(ex.values[0] <= 1.0 + 1e-10);  // correlations are bounded by one
  CHECK(ex.values[0] > 0.1);           // the planted shared signal shows up
}

TEST_CASE("cca_pairs covariance variant keeps B as the standardized covariance") {
  rng::Stream st(505);
  const int n = 200, p = 3, q = 3;
  Matrix x = testsup::random_matrix(n, p, st);
  Matrix y = testsup::random_matrix(n, q, st);
  const CcaPairs pairs = cca_pairs(x, y, false);

  Matrix xs = x;
  standardize_columns(xs);
  const Matrix s1 = hand_covariance(xs);
  CHECK(testsup::max_abs_diff(pairs.x_side.b, s1) < 1e-8);
  CHECK(all_finite(pairs.x_side.a));
  CHECK(is_symmetric(pairs.x_side.a, 1e-10));
}

TEST_CASE("standardize_columns") {
  rng::Stream st(506);
  Matrix x = testsup::random_matrix(50, 3, st);
  standardize_columns(x);
  for (int j = 0; j < 3; ++j) {
    double mean = 0.0, var = 0.0;
    for (int i = 0; i < 50; ++i) mean += x(i, j) / 50;
    for (int i = 0; i < 50; ++i) var += (x(i, j) - mean) * (x(i, j) - mean) / 49;
    CHECK(std::fabs(mean) < 1e-12);
    CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
  }

  Matrix flat(10, 2, 1.0);  // zero-variance columns are an error
  CHECK_THROWS_AS(standardize_columns(flat), Error);
}
