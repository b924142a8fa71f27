#pragma once

#include "spgep/matrix.hpp"

namespace spgep {

enum class PenaltyKind { ElementLasso, GroupRow };

// Penalty attached to the inner problem
//   min_Z  1/2 tr(Z^T B Z) - tr(Z^T M) + p(Z).
// ElementLasso: p(Z) = sum_j lambda_j ||z_col_j||_1 (one weight per column,
// columns decouple). GroupRow: p(Z) = lambda * sum_i ||z_row_i||_2 (rows are
// selected or dropped jointly across columns).
struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::ElementLasso;
  Vector lambdas;  // d entries for ElementLasso, exactly one for GroupRow

  static PenaltySpec element_lasso(double lambda, int d);
  static PenaltySpec element_lasso(Vector per_column);
  static PenaltySpec group_row(double lambda);

  double lambda(int col = 0) const;
  void validate(int d) const;
};

struct InnerSolveConfig {
  double tol = 1e-7;      // largest absolute entry change over one full sweep
  int max_sweeps = 5000;
};

struct InnerResult {
  Matrix z;
  bool converged = false;
  int sweeps = 0;
};

double soft_threshold(double z, double lambda);

// Cyclic coordinate descent for one lasso column (ascending index order,
// warm start 0 unless given). B must be symmetric with positive diagonal.
InnerResult solve_lasso_column(const Matrix& b, const Vector& m, double lambda,
                               const InnerSolveConfig& cfg, const Vector* warm = nullptr);

// Cyclic block coordinate descent over rows for the group penalty.
InnerResult solve_group_rows(const Matrix& b, const Matrix& m, double lambda,
                             const InnerSolveConfig& cfg, const Matrix* warm = nullptr);

// Dispatches on pen.kind; ElementLasso columns are independent and solved in
// parallel. converged is the AND over columns, sweeps the maximum.
InnerResult solve_penalized(const Matrix& b, const Matrix& m, const PenaltySpec& pen,
                            const InnerSolveConfig& cfg, const Matrix* warm = nullptr);

double penalized_objective(const Matrix& z, const Matrix& b, const Matrix& m,
                           const PenaltySpec& pen);

// Largest violation of the subgradient optimality conditions; 0 at an exact
// solution. Callers compare against 1e-6 * (1 + max|M|).
double kkt_residual(const Matrix& z, const Matrix& b, const Matrix& m,
                    const PenaltySpec& pen);

}  // namespace spgep
