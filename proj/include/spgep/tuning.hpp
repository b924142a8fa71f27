#pragma once

#include "spgep/gep.hpp"

namespace spgep {

// trace[(U^T B2 U)^{-1} (U^T A2 U)]: variance the estimated span retains on a
// held-out pair. Returns NaN (never throws) when the inner d x d matrix is
// singular or badly conditioned; NaN sorts below every real score.
double cv_score(const Matrix& u, const Matrix& a2, const Matrix& b2);

// Descending geometric grid {lambda_max * ratio^i : i = 0..t} with a trailing
// +infinity sentinel standing for the all-zero estimate.
Vector lambda_grid(double lambda_max_value, double ratio = 0.75, int t = 31);

struct CvReport {
  Vector grid;
  Vector scores;  // NaN = fit or scoring failed at that level; -inf = sentinel
  int selected_index = -1;
  double selected_lambda = 0.0;
  Matrix per_split_scores;  // splits x grid; single row for the plain path
};

struct SelectResult {
  CvReport report;
  SubspaceEstimate estimate;  // the fit at the selected level
};

// Fits the full grid on the training pair (levels are independent and run in
// parallel; every level starts cold), scores each fit on the tuning pair, and
// picks the best score. Ties and one-SE fallbacks prefer the larger lambda.
// Throws TuningFailure when no level produces a usable score.
SelectResult select_lambda(const GepPair& train, const GepPair& tune, int d,
                           PenaltyKind kind, Method method, const OuterConfig& cfg = {},
                           double grid_ratio = 0.75, int grid_len = 31);

// Per-split score matrix over a fixed grid, for multi-split selection.
Matrix cv_score_grid(const std::vector<std::pair<GepPair, GepPair>>& splits,
                     const Vector& grid, int d, PenaltyKind kind, Method method,
                     const OuterConfig& cfg = {});

// One-standard-error rule over >= 2 splits: index of the largest lambda whose
// mean score is within one standard error (taken at the argmax) of the best.
int one_se_select(const Matrix& per_split_scores, const Vector& grid);

}  // namespace spgep
