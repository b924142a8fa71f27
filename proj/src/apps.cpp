#include "spgep/apps.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "spgep/errors.hpp"
#include "spgep/kernels.hpp"

namespace spgep {
namespace {

void check_data(const Matrix& x, const char* what, int min_rows) {
  if (x.rows() < min_rows || x.cols() < 1)
    fail(ErrorKind::InvalidInput, std::string(what) + ": need at least " +
                                      std::to_string(min_rows) + " observations");
  if (!all_finite(x)) fail(ErrorKind::InvalidInput, std::string(what) + ": non-finite entries");
}

Vector column_means(const Matrix& x) {
  Vector mu(static_cast<size_t>(x.cols()), 0.0);
  for (int i = 0; i < x.rows(); ++i) {
    const double* r = x.row_ptr(i);
    for (int j = 0; j < x.cols(); ++j) mu[static_cast<size_t>(j)] += r[j];
  }
  for (double& v : mu) v /= x.rows();
  return mu;
}

Matrix centered(const Matrix& x) {
  const Vector mu = column_means(x);
  Matrix c = x;
  for (int i = 0; i < c.rows(); ++i) {
    double* r = c.row_ptr(i);
    for (int j = 0; j < c.cols(); ++j) r[j] -= mu[static_cast<size_t>(j)];
  }
  return c;
}

// Groups row indices by label value, keys ascending.
std::map<double, std::vector<int>> group_by_label(const Vector& y, int n) {
  if (static_cast<int>(y.size()) != n)
    fail(ErrorKind::InvalidInput, "labels and observations count differ");
  std::map<double, std::vector<int>> groups;
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(y[static_cast<size_t>(i)]))
      fail(ErrorKind::InvalidInput, "non-finite label at row " + std::to_string(i));
    groups[y[static_cast<size_t>(i)]].push_back(i);
  }
  return groups;
}

// A = sum_h w_h (mean_h - mean)(mean_h - mean)^T assembled as a Gram product
// of sqrt(w_h)-scaled centered group means.
Matrix between_scatter(const Matrix& x, const std::vector<std::vector<int>>& groups,
                       const std::vector<double>& weights) {
  const int p = x.cols();
  const Vector mu = column_means(x);
  Matrix rows(static_cast<int>(groups.size()), p);
  for (size_t g = 0; g < groups.size(); ++g) {
    Vector gm(static_cast<size_t>(p), 0.0);
    for (int i : groups[g])
      for (int j = 0; j < p; ++j) gm[static_cast<size_t>(j)] += x(i, j);
    const double ng = static_cast<double>(groups[g].size());
    const double w = std::sqrt(weights[g]);
    for (int j = 0; j < p; ++j)
      rows(static_cast<int>(g), j) = w * (gm[static_cast<size_t>(j)] / ng - mu[static_cast<size_t>(j)]);
  }
  return kernels::gram(rows);
}

}  // namespace

GepPair pca_pair(const Matrix& x, bool gram_scaling) {
  check_data(x, "pca_pair", 2);
  const Matrix c = centered(x);
  Matrix a = kernels::gram(c);
  if (!gram_scaling) {
    const double div = static_cast<double>(x.rows() - 1);
    for (int i = 0; i < a.rows(); ++i)
      for (int j = 0; j < a.cols(); ++j) a(i, j) /= div;
  }
  return GepPair::with_identity_b(std::move(a));
}

GepPair lda_pair(const LabeledData& data) {
  check_data(data.x, "lda_pair", 4);
  const int n = data.x.rows(), p = data.x.cols();
  const auto grouped = group_by_label(data.y, n);
  const int k = static_cast<int>(grouped.size());
  if (k < 2) fail(ErrorKind::InvalidInput, "lda_pair: need at least 2 classes");
  if (n - k < 1) fail(ErrorKind::InvalidInput, "lda_pair: too few observations for K classes");

  std::vector<std::vector<int>> groups;
  std::vector<double> weights;
  for (const auto& [label, idx] : grouped) {
    if (idx.size() < 2)
      fail(ErrorKind::InvalidInput, "lda_pair: class " + std::to_string(label) +
                                        " has fewer than 2 observations");
    groups.push_back(idx);
    weights.push_back(static_cast<double>(idx.size()) / n);
  }

  Matrix a = between_scatter(data.x, groups, weights);

  // Pooled within-class scatter via per-class centering.
  Matrix w(n, p);
  int row = 0;
  for (const auto& idx : groups) {
    Vector gm(static_cast<size_t>(p), 0.0);
    for (int i : idx)
      for (int j = 0; j < p; ++j) gm[static_cast<size_t>(j)] += data.x(i, j);
    for (double& v : gm) v /= static_cast<double>(idx.size());
    for (int i : idx) {
      for (int j = 0; j < p; ++j) w(row, j) = data.x(i, j) - gm[static_cast<size_t>(j)];
      ++row;
    }
  }
  Matrix b = kernels::gram(w);
  const double div = static_cast<double>(n - k);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) b(i, j) /= div;

  return GepPair::make(std::move(a), std::move(b));
}

GepPair sir_pair(const LabeledData& data, int n_slices, SliceKind kind) {
  check_data(data.x, "sir_pair", 4);
  if (n_slices < 2) fail(ErrorKind::InvalidInput, "sir_pair: need at least 2 slices");
  const int n = data.x.rows();
  const auto grouped = group_by_label(data.y, n);
  const int distinct = static_cast<int>(grouped.size());

  const bool discrete =
      kind == SliceKind::Discrete || (kind == SliceKind::Auto && distinct <= n_slices);

  std::vector<std::vector<int>> slices;
  if (discrete) {
    if (distinct < 2)
      fail(ErrorKind::InvalidInput, "sir_pair: discrete response needs >= 2 distinct values");
    for (const auto& [label, idx] : grouped) slices.push_back(idx);
  } else {
    if (n < n_slices) fail(ErrorKind::InvalidInput, "sir_pair: more slices than observations");
    Vector sorted = data.y;
    std::sort(sorted.begin(), sorted.end());
    Vector cuts;
    for (int h = 1; h < n_slices; ++h) {
      const double c = sorted[static_cast<size_t>(h * n / n_slices)];
      if (cuts.empty() || c > cuts.back()) cuts.push_back(c);  // equal cuts merge bins
    }
    slices.assign(cuts.size() + 1, {});
    for (int i = 0; i < n; ++i) {
      const double yi = data.y[static_cast<size_t>(i)];
      const size_t s =
          std::lower_bound(cuts.begin(), cuts.end(), yi) - cuts.begin();
      slices[s].push_back(i);
    }
    std::erase_if(slices, [](const std::vector<int>& s) { return s.empty(); });
    if (slices.size() < 2)
      fail(ErrorKind::InvalidInput, "sir_pair: slicing collapsed to a single slice");
  }

  std::vector<double> weights;
  weights.reserve(slices.size());
  for (const auto& s : slices) weights.push_back(static_cast<double>(s.size()) / n);

  Matrix a = between_scatter(data.x, slices, weights);

  const Matrix c = centered(data.x);
  Matrix b = kernels::gram(c);
  const double div = static_cast<double>(n - 1);
  for (int i = 0; i < b.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) b(i, j) /= div;

  return GepPair::make(std::move(a), std::move(b));
}

void standardize_columns(Matrix& x) {
  if (x.rows() < 2) fail(ErrorKind::InvalidInput, "standardize: need at least 2 rows");
  const Vector mu = column_means(x);
  for (int j = 0; j < x.cols(); ++j) {
    double ss = 0.0;
    for (int i = 0; i < x.rows(); ++i) {
      const double c = x(i, j) - mu[static_cast<size_t>(j)];
      ss += c * c;
    }
    const double sd = std::sqrt(ss / (x.rows() - 1));
    if (!(sd > 0.0))
      fail(ErrorKind::InvalidInput, "standardize: column " + std::to_string(j) +
                                        " has zero variance");
    for (int i = 0; i < x.rows(); ++i) x(i, j) = (x(i, j) - mu[static_cast<size_t>(j)]) / sd;
  }
}

CcaPairs cca_pairs(const Matrix& x_in, const Matrix& y_in, bool identity_variant) {
  check_data(x_in, "cca_pairs", 3);
  check_data(y_in, "cca_pairs", 3);
  if (x_in.rows() != y_in.rows())
    fail(ErrorKind::InvalidInput, "cca_pairs: x and y row counts differ");

  Matrix x = x_in, y = y_in;
  standardize_columns(x);
  standardize_columns(y);
  const double div = static_cast<double>(x.rows() - 1);

  Matrix c12 = kernels::matmul_tn(x, y);  // p x q
  for (int i = 0; i < c12.rows(); ++i)
    for (int j = 0; j < c12.cols(); ++j) c12(i, j) /= div;

  CcaPairs out;
  if (identity_variant) {
    Matrix ax = kernels::matmul_nt(c12, c12);
    Matrix ay = kernels::matmul_tn(c12, c12);
    symmetrize(ax);
    symmetrize(ay);
    out.x_side = GepPair::with_identity_b(std::move(ax));
    out.y_side = GepPair::with_identity_b(std::move(ay));
    return out;
  }

  Matrix s1 = kernels::gram(x);
  Matrix s2 = kernels::gram(y);
  for (int i = 0; i < s1.rows(); ++i)
    for (int j = 0; j < s1.cols(); ++j) s1(i, j) /= div;
  for (int i = 0; i < s2.rows(); ++i)
    for (int j = 0; j < s2.cols(); ++j) s2(i, j) /= div;

  auto [s2r, e2] = regularize_b(s2);
  auto [s1r, e1] = regularize_b(s1);

  Matrix ax = kernels::matmul(c12, linalg::spd_solve(s2r, c12.transposed()));
  Matrix ay = kernels::matmul(c12.transposed(), linalg::spd_solve(s1r, c12));
  symmetrize(ax);
  symmetrize(ay);
  out.x_side = GepPair::make(std::move(ax), std::move(s1));
  out.y_side = GepPair::make(std::move(ay), std::move(s2));
  return out;
}

}  // namespace spgep
