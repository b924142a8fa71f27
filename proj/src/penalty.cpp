#include "spgep/penalty.hpp"

#include <cmath>

#include "spgep/errors.hpp"
#include "spgep/kernels.hpp"
#include "spgep/threads.hpp"

namespace spgep {
namespace {

void check_problem(const Matrix& b, int m_rows, const char* what) {
  if (b.rows() != b.cols() || b.rows() == 0)
    fail(ErrorKind::InvalidInput, std::string(what) + ": B must be square");
  if (b.rows() != m_rows)
    fail(ErrorKind::InvalidInput, std::string(what) + ": B and M dimensions differ");
  for (int i = 0; i < b.rows(); ++i)
    if (!(b(i, i) > 0.0))
      fail(ErrorKind::NotPositiveDefinite,
           std::string(what) + ": nonpositive diagonal in B at " + std::to_string(i));
}

double row_norm(const Matrix& z, int i) {
  double s = 0.0;
  for (int j = 0; j < z.cols(); ++j) s += z(i, j) * z(i, j);
  return std::sqrt(s);
}

}  // namespace

PenaltySpec PenaltySpec::element_lasso(double lambda, int d) {
  return PenaltySpec{PenaltyKind::ElementLasso, Vector(static_cast<size_t>(d), lambda)};
}

PenaltySpec PenaltySpec::element_lasso(Vector per_column) {
  return PenaltySpec{PenaltyKind::ElementLasso, std::move(per_column)};
}

PenaltySpec PenaltySpec::group_row(double lambda) {
  return PenaltySpec{PenaltyKind::GroupRow, Vector(1, lambda)};
}

double PenaltySpec::lambda(int col) const {
  if (kind == PenaltyKind::GroupRow) return lambdas[0];
  return lambdas[static_cast<size_t>(col)];
}

void PenaltySpec::validate(int d) const {
  const size_t want = kind == PenaltyKind::GroupRow ? 1 : static_cast<size_t>(d);
  if (lambdas.size() != want)
    fail(ErrorKind::InvalidInput, "penalty: expected " + std::to_string(want) +
                                      " lambda value(s), got " + std::to_string(lambdas.size()));
  for (double l : lambdas)
    if (!(l >= 0.0) || !std::isfinite(l))
      fail(ErrorKind::InvalidInput, "penalty: lambda must be finite and nonnegative");
}

double soft_threshold(double z, double lambda) {
  if (z > lambda) return z - lambda;
  if (z < -lambda) return z + lambda;
  return 0.0;
}

InnerResult solve_lasso_column(const Matrix& b, const Vector& m, double lambda,
                               const InnerSolveConfig& cfg, const Vector* warm) {
  check_problem(b, static_cast<int>(m.size()), "solve_lasso_column");
  const int p = b.rows();

  InnerResult out;
  out.z = Matrix(p, 1);
  Vector z(p, 0.0);
  if (warm) {
    if (static_cast<int>(warm->size()) != p)
      fail(ErrorKind::InvalidInput, "solve_lasso_column: warm start size mismatch");
    z = *warm;
  }

  Vector g(p, 0.0);  // g = B z, maintained incrementally
  if (warm) {
    for (int i = 0; i < p; ++i) {
      const double* bi = b.row_ptr(i);
      double s = 0.0;
      for (int k = 0; k < p; ++k) s += bi[k] * z[k];
      g[i] = s;
    }
  }

  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (int i = 0; i < p; ++i) {
      const double bii = b(i, i);
      const double u = m[i] - g[i] + bii * z[i];
      const double zi = soft_threshold(u, lambda) / bii;
      const double delta = zi - z[i];
      if (delta != 0.0) {
        z[i] = zi;
        const double* bi = b.row_ptr(i);
        for (int k = 0; k < p; ++k) g[k] += delta * bi[k];
        max_change = std::fmax(max_change, std::fabs(delta));
      }
    }
    out.sweeps = sweep;
    if (max_change < cfg.tol) {
      out.converged = true;
      break;
    }
  }
  for (int i = 0; i < p; ++i) out.z(i, 0) = z[i];
  return out;
}

InnerResult solve_group_rows(const Matrix& b, const Matrix& m, double lambda,
                             const InnerSolveConfig& cfg, const Matrix* warm) {
  check_problem(b, m.rows(), "solve_group_rows");
  const int p = b.rows(), d = m.cols();

  InnerResult out;
  out.z = Matrix(p, d);
  if (warm) {
    if (warm->rows() != p || warm->cols() != d)
      fail(ErrorKind::InvalidInput, "solve_group_rows: warm start shape mismatch");
    out.z = *warm;
  }
  Matrix& z = out.z;

  Matrix g = warm ? kernels::matmul(b, z) : Matrix(p, d);  // g = B Z
  Vector a(d), delta(d);

  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (int i = 0; i < p; ++i) {
      const double bii = b(i, i);
      double anorm = 0.0;
      for (int j = 0; j < d; ++j) {
        a[j] = m(i, j) - g(i, j) + bii * z(i, j);
        anorm += a[j] * a[j];
      }
      anorm = std::sqrt(anorm);
      const double scale = anorm > lambda ? (1.0 - lambda / anorm) / bii : 0.0;
      bool moved = false;
      for (int j = 0; j < d; ++j) {
        const double zij = scale * a[j];
        delta[j] = zij - z(i, j);
        if (delta[j] != 0.0) {
          z(i, j) = zij;
          max_change = std::fmax(max_change, std::fabs(delta[j]));
          moved = true;
        }
      }
      if (moved) {
        for (int k = 0; k < p; ++k) {
          const double bki = b(k, i);
          if (bki == 0.0) continue;
          double* gk = g.row_ptr(k);
          for (int j = 0; j < d; ++j) gk[j] += bki * delta[j];
        }
      }
    }
    out.sweeps = sweep;
    if (max_change < cfg.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

InnerResult solve_penalized(const Matrix& b, const Matrix& m, const PenaltySpec& pen,
                            const InnerSolveConfig& cfg, const Matrix* warm) {
  pen.validate(m.cols());
  if (pen.kind == PenaltyKind::GroupRow)
    return solve_group_rows(b, m, pen.lambda(), cfg, warm);

  check_problem(b, m.rows(), "solve_penalized");
  const int p = m.rows(), d = m.cols();
  InnerResult out;
  out.z = Matrix(p, d);
  out.converged = true;
  std::vector<InnerResult> cols(static_cast<size_t>(d));
  const int nt = threads::count();
#pragma omp parallel for schedule(dynamic) num_threads(nt) if (nt > 1 && d > 1)
  for (int j = 0; j < d; ++j) {
    Vector mj(p), wj(p);
    for (int i = 0; i < p; ++i) mj[i] = m(i, j);
    const Vector* wp = nullptr;
    if (warm) {
      for (int i = 0; i < p; ++i) wj[i] = (*warm)(i, j);
      wp = &wj;
    }
    cols[static_cast<size_t>(j)] = solve_lasso_column(b, mj, pen.lambda(j), cfg, wp);
  }
  for (int j = 0; j < d; ++j) {
    const InnerResult& c = cols[static_cast<size_t>(j)];
    for (int i = 0; i < p; ++i) out.z(i, j) = c.z(i, 0);
    out.converged = out.converged && c.converged;
    out.sweeps = std::max(out.sweeps, c.sweeps);
  }
  return out;
}

double penalized_objective(const Matrix& z, const Matrix& b, const Matrix& m,
                           const PenaltySpec& pen) {
  pen.validate(m.cols());
  check_problem(b, m.rows(), "penalized_objective");
  const Matrix bz = kernels::matmul(b, z);
  double quad = 0.0, lin = 0.0;
  for (int i = 0; i < z.rows(); ++i)
    for (int j = 0; j < z.cols(); ++j) {
      quad += z(i, j) * bz(i, j);
      lin += z(i, j) * m(i, j);
    }
  double penal = 0.0;
  if (pen.kind == PenaltyKind::ElementLasso) {
    for (int j = 0; j < z.cols(); ++j) {
      double l1 = 0.0;
      for (int i = 0; i < z.rows(); ++i) l1 += std::fabs(z(i, j));
      penal += pen.lambda(j) * l1;
    }
  } else {
    for (int i = 0; i < z.rows(); ++i) penal += row_norm(z, i);
    penal *= pen.lambda();
  }
  return 0.5 * quad - lin + penal;
}

double kkt_residual(const Matrix& z, const Matrix& b, const Matrix& m,
                    const PenaltySpec& pen) {
  pen.validate(m.cols());
  check_problem(b, m.rows(), "kkt_residual");
  const Matrix bz = kernels::matmul(b, z);
  double worst = 0.0;
  if (pen.kind == PenaltyKind::ElementLasso) {
    for (int j = 0; j < z.cols(); ++j) {
      const double lam = pen.lambda(j);
      for (int i = 0; i < z.rows(); ++i) {
        const double r = bz(i, j) - m(i, j);
        const double v = z(i, j) != 0.0
                             ? std::fabs(r + lam * (z(i, j) > 0.0 ? 1.0 : -1.0))
                             : std::fmax(std::fabs(r) - lam, 0.0);
        worst = std::fmax(worst, v);
      }
    }
  } else {
    const double lam = pen.lambda();
    for (int i = 0; i < z.rows(); ++i) {
      const double zn = row_norm(z, i);
      double v;
      if (zn > 0.0) {
        double s = 0.0;
        for (int j = 0; j < z.cols(); ++j) {
          const double r = bz(i, j) - m(i, j) + lam * z(i, j) / zn;
          s += r * r;
        }
        v = std::sqrt(s);
      } else {
        double s = 0.0;
        for (int j = 0; j < z.cols(); ++j) {
          const double r = bz(i, j) - m(i, j);
          s += r * r;
        }
        v = std::fmax(std::sqrt(s) - lam, 0.0);
      }
      worst = std::fmax(worst, v);
    }
  }
  return worst;
}

}  // namespace spgep
