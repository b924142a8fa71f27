#include "spgep/tuning.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "spgep/errors.hpp"
#include "spgep/kernels.hpp"
#include "spgep/threads.hpp"

namespace spgep {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

PenaltySpec make_pen(PenaltyKind kind, double lambda, int d) {
  return kind == PenaltyKind::GroupRow ? PenaltySpec::group_row(lambda)
                                       : PenaltySpec::element_lasso(lambda, d);
}

SubspaceEstimate fit(const GepPair& pair, int d, PenaltyKind kind, Method method,
                     double lambda, const OuterConfig& cfg) {
  const PenaltySpec pen = make_pen(kind, lambda, d);
  return method == Method::Poi ? poi(pair, d, pen, cfg) : fast_poi(pair, d, pen, cfg);
}

}  // namespace

double cv_score(const Matrix& u, const Matrix& a2, const Matrix& b2) {
  if (u.empty() || u.rows() != a2.rows() || a2.rows() != a2.cols() ||
      b2.rows() != b2.cols() || b2.rows() != u.rows())
    fail(ErrorKind::InvalidInput, "cv_score: inconsistent dimensions");
  if (!all_finite(u) || !all_finite(a2) || !all_finite(b2))
    fail(ErrorKind::InvalidInput, "cv_score: non-finite inputs");

  Matrix s = kernels::matmul_tn(u, kernels::matmul(b2, u));
  Matrix g = kernels::matmul_tn(u, kernels::matmul(a2, u));
  symmetrize(s);
  const linalg::EigResult se = linalg::sym_eig(s);
  const double lmax = se.values.front(), lmin = se.values.back();
  if (!(lmin > 0.0) || lmax / lmin >= 1e12) return kNaN;

  const Matrix x = linalg::spd_solve(s, g);
  double tr = 0.0;
  for (int i = 0; i < x.rows(); ++i) tr += x(i, i);
  return std::isfinite(tr) ? tr : kNaN;
}

Vector lambda_grid(double lambda_max_value, double ratio, int t) {
  if (!(lambda_max_value > 0.0) || !std::isfinite(lambda_max_value))
    fail(ErrorKind::InvalidInput, "lambda_grid: lambda_max must be positive and finite");
  if (!(ratio > 0.0 && ratio < 1.0))
    fail(ErrorKind::InvalidInput, "lambda_grid: ratio must lie in (0, 1)");
  if (t < 0) fail(ErrorKind::InvalidInput, "lambda_grid: t must be nonnegative");
  Vector grid(static_cast<size_t>(t) + 2);
  for (int i = 0; i <= t; ++i)
    grid[static_cast<size_t>(i)] = lambda_max_value * std::pow(ratio, i);
  grid.back() = kInf;
  return grid;
}

SelectResult select_lambda(const GepPair& train, const GepPair& tune, int d,
                           PenaltyKind kind, Method method, const OuterConfig& cfg,
                           double grid_ratio, int grid_len) {
  if (train.dim() != tune.dim())
    fail(ErrorKind::InvalidInput, "select_lambda: train and tune dimensions differ");

  const linalg::EigResult eig_a = linalg::sym_eig(train.a);
  OuterConfig run_cfg = cfg;
  run_cfg.eig_a = &eig_a;

  const double lmax =
      method == Method::Poi
          ? lambda_max(train.a, kind, method, d)
          : lambda_max(eig_a.vectors.cols_slice(0, d), kind, method, d);
  const Vector grid = lambda_grid(lmax, grid_ratio, grid_len);
  const int n_grid = static_cast<int>(grid.size());

  Vector scores(grid.size(), kNaN);
  std::vector<std::optional<SubspaceEstimate>> fits(grid.size());
  const int nt = threads::count();
#pragma omp parallel for schedule(dynamic) num_threads(nt) if (nt > 1)
  for (int i = 0; i < n_grid; ++i) {
    if (std::isinf(grid[static_cast<size_t>(i)])) {
      scores[static_cast<size_t>(i)] = -kInf;
      continue;
    }
    try {
      SubspaceEstimate est = fit(train, d, kind, method, grid[static_cast<size_t>(i)], run_cfg);
      scores[static_cast<size_t>(i)] = cv_score(est.u, tune.a, tune.b);
      fits[static_cast<size_t>(i)] = std::move(est);
    } catch (const Error&) {
      // over-penalized or otherwise unusable at this level: score stays NaN
    }
  }

  int best = -1;
  double best_score = -kInf;
  for (int i = 0; i < n_grid; ++i) {
    const double s = scores[static_cast<size_t>(i)];
    if (std::isfinite(s) && s > best_score && fits[static_cast<size_t>(i)].has_value()) {
      best_score = s;
      best = i;
    }
  }
  if (best < 0)
    fail(ErrorKind::TuningFailure, "select_lambda: no usable score on the whole grid");

  SelectResult out;
  out.report.grid = grid;
  out.report.scores = scores;
  out.report.selected_index = best;
  out.report.selected_lambda = grid[static_cast<size_t>(best)];
  out.report.per_split_scores = Matrix(1, n_grid);
  for (int i = 0; i < n_grid; ++i) out.report.per_split_scores(0, i) = scores[static_cast<size_t>(i)];
  out.estimate = std::move(*fits[static_cast<size_t>(best)]);
  return out;
}

Matrix cv_score_grid(const std::vector<std::pair<GepPair, GepPair>>& splits,
                     const Vector& grid, int d, PenaltyKind kind, Method method,
                     const OuterConfig& cfg) {
  if (splits.empty()) fail(ErrorKind::InvalidInput, "cv_score_grid: no splits");
  const int m = static_cast<int>(splits.size());
  const int n_grid = static_cast<int>(grid.size());
  Matrix out(m, n_grid, kNaN);
  const int nt = threads::count();
#pragma omp parallel for schedule(dynamic) collapse(2) num_threads(nt) if (nt > 1)
  for (int s = 0; s < m; ++s) {
    for (int i = 0; i < n_grid; ++i) {
      const double lam = grid[static_cast<size_t>(i)];
      if (std::isinf(lam)) {
        out(s, i) = -kInf;
        continue;
      }
      try {
        const SubspaceEstimate est = fit(splits[static_cast<size_t>(s)].first, d, kind,
                                         method, lam, cfg);
        out(s, i) = cv_score(est.u, splits[static_cast<size_t>(s)].second.a,
                             splits[static_cast<size_t>(s)].second.b);
      } catch (const Error&) {
      }
    }
  }
  return out;
}

int one_se_select(const Matrix& per_split_scores, const Vector& grid) {
  const int m = per_split_scores.rows();
  const int n_grid = per_split_scores.cols();
  if (m < 2) fail(ErrorKind::InvalidInput, "one_se_select: need at least 2 splits");
  if (n_grid != static_cast<int>(grid.size()))
    fail(ErrorKind::InvalidInput, "one_se_select: grid length mismatch");

  Vector mean(static_cast<size_t>(n_grid), kNaN);
  for (int j = 0; j < n_grid; ++j) {
    double s = 0.0;
    bool ok = true;
    for (int i = 0; i < m; ++i) {
      const double v = per_split_scores(i, j);
      if (!std::isfinite(v)) {
        ok = false;
        break;
      }
      s += v;
    }
    if (ok) mean[static_cast<size_t>(j)] = s / m;
  }

  int best = -1;
  for (int j = 0; j < n_grid; ++j)
    if (std::isfinite(mean[static_cast<size_t>(j)]) &&
        (best < 0 || mean[static_cast<size_t>(j)] > mean[static_cast<size_t>(best)]))
      best = j;
  if (best < 0) fail(ErrorKind::TuningFailure, "one_se_select: no finite mean score");

  double var = 0.0;
  for (int i = 0; i < m; ++i) {
    const double dlt = per_split_scores(i, best) - mean[static_cast<size_t>(best)];
    var += dlt * dlt;
  }
  const double se = std::sqrt(var / (m - 1)) / std::sqrt(static_cast<double>(m));
  const double floor_score = mean[static_cast<size_t>(best)] - se;

  for (int j = 0; j < n_grid; ++j)
    if (std::isfinite(mean[static_cast<size_t>(j)]) && mean[static_cast<size_t>(j)] >= floor_score)
      return j;  // grid is descending: first hit is the largest lambda
  return best;
}

}  // namespace spgep
