#include "spgep/gep.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "spgep/errors.hpp"
#include "spgep/kernels.hpp"
#include "spgep/rng.hpp"

namespace spgep {
namespace {

void check_symmetric_input(Matrix& m, const char* name) {
  if (m.rows() != m.cols() || m.rows() == 0)
    fail(ErrorKind::InvalidInput, std::string(name) + " must be square and nonempty");
  if (!all_finite(m))
    fail(ErrorKind::InvalidInput, std::string(name) + " has non-finite entries");
  double asym = 0.0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i + 1; j < m.cols(); ++j)
      asym = std::fmax(asym, std::fabs(m(i, j) - m(j, i)));
  if (asym > 1e-8 * (1.0 + max_abs(m)))
    fail(ErrorKind::InvalidInput, std::string(name) + " is not symmetric");
  symmetrize(m);
}

void check_d(const GepPair& pair, int d) {
  if (d < 1 || d > pair.dim())
    fail(ErrorKind::InvalidInput, "d must be between 1 and p");
}

Matrix leading_eigvecs(const linalg::EigResult& eig, int d) {
  return eig.vectors.cols_slice(0, d);
}

Matrix random_ortho(int p, int d, uint64_t seed) {
  rng::Stream stream(seed);
  Matrix g(p, d);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = stream.normal();
  return linalg::qr_thin(g).q;
}

// Orthonormal basis of span(z), padded to d columns from the eigenvectors of
// A when z is numerically rank-deficient. Deterministic: columns of z in
// order, then eigenvectors in order, accepted by a twice-reorthogonalized
// Gram-Schmidt residual test.
Matrix basis_with_padding(const Matrix& z, const linalg::EigResult& eig_a, bool& padded) {
  const int p = z.rows(), d = z.cols();
  try {
    Matrix q = linalg::qr_thin(z).q;
    padded = false;
    return q;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::RankDeficient) throw;
  }
  padded = true;

  const Vector sv = linalg::singular_values(z);
  const double accept_tol = std::fmax(1e-10 * sv[0], 1e-300);
  Matrix basis(p, d);
  int got = 0;
  auto try_accept = [&](const Vector& col, double tol) {
    Vector v = col;
    for (int pass = 0; pass < 2; ++pass) {
      for (int k = 0; k < got; ++k) {
        double dot = 0.0;
        for (int i = 0; i < p; ++i) dot += basis(i, k) * v[i];
        for (int i = 0; i < p; ++i) v[i] -= dot * basis(i, k);
      }
    }
    double norm = 0.0;
    for (int i = 0; i < p; ++i) norm += v[i] * v[i];
    norm = std::sqrt(norm);
    if (norm <= tol) return false;
    for (int i = 0; i < p; ++i) basis(i, got) = v[i] / norm;
    ++got;
    return true;
  };

  Vector col(p);
  for (int j = 0; j < d && got < d; ++j) {
    for (int i = 0; i < p; ++i) col[i] = z(i, j);
    try_accept(col, accept_tol);
  }
  for (int j = 0; j < eig_a.vectors.cols() && got < d; ++j) {
    for (int i = 0; i < p; ++i) col[i] = eig_a.vectors(i, j);
    try_accept(col, 1e-6);
  }
  if (got < d) {
    Error e(ErrorKind::RankDeficient, "could not assemble a rank-d basis even with padding");
    e.numerical_rank = got;
    throw e;
  }
  return linalg::qr_thin(basis).q;
}

std::vector<int> support_rows(const Matrix& q, double tol) {
  std::vector<int> s;
  for (int i = 0; i < q.rows(); ++i) {
    double n = 0.0;
    for (int j = 0; j < q.cols(); ++j) n += q(i, j) * q(i, j);
    if (std::sqrt(n) > tol) s.push_back(i);
  }
  return s;
}

[[noreturn]] void throw_over_penalized(double lambda) {
  Error e(ErrorKind::OverPenalized,
          "penalty level zeroed the entire estimate (lambda = " + std::to_string(lambda) + ")");
  e.lambda = lambda;
  throw e;
}

// Lazy sym_eig(A): reuse the caller's cache when provided.
class EigCache {
 public:
  EigCache(const GepPair& pair, const OuterConfig& cfg) : pair_(pair), cfg_(cfg) {}
  const linalg::EigResult& get() {
    if (cfg_.eig_a) return *cfg_.eig_a;
    if (!local_) local_ = linalg::sym_eig(pair_.a);
    return *local_;
  }

 private:
  const GepPair& pair_;
  const OuterConfig& cfg_;
  std::optional<linalg::EigResult> local_;
};

Matrix initial_basis(const GepPair& pair, int d, const OuterConfig& cfg, EigCache& eig) {
  switch (cfg.init) {
    case InitKind::TopEigvecsOfA:
      return leading_eigvecs(eig.get(), d);
    case InitKind::Given: {
      if (cfg.q0.rows() != pair.dim() || cfg.q0.cols() != d)
        fail(ErrorKind::InvalidInput, "q0 must be p x d");
      const Matrix g = kernels::serial::gram(cfg.q0);
      double dev = 0.0;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) dev = std::fmax(dev, std::fabs(g(i, j) - (i == j)));
      return dev <= 1e-10 ? cfg.q0 : linalg::qr_thin(cfg.q0).q;
    }
    case InitKind::RandomOrtho:
      return random_ortho(pair.dim(), d, cfg.seed);
  }
  fail(ErrorKind::InvalidInput, "unknown init kind");
}

SubspaceEstimate finish_estimate(Matrix q, const GepPair& pair, const PenaltySpec& pen,
                                 const OuterConfig& cfg, int iters, bool converged,
                                 bool padded) {
  SubspaceEstimate est;
  auto [u, vals] = recover_pair(q, pair);
  est.q = std::move(q);
  est.u = std::move(u);
  est.eigenvalues = std::move(vals);
  est.support = support_rows(est.q, cfg.support_tol);
  est.lambda = pen.lambda(0);
  est.outer_iters = iters;
  est.converged = converged;
  est.padded = padded;
  return est;
}

}  // namespace

GepPair GepPair::make(Matrix a, Matrix b) {
  check_symmetric_input(a, "A");
  check_symmetric_input(b, "B");
  if (a.rows() != b.rows()) fail(ErrorKind::InvalidInput, "A and B dimensions differ");
  GepPair pair;
  pair.a = std::move(a);
  auto [breg, eps] = regularize_b(b);
  pair.b = std::move(breg);
  pair.epsilon_used = eps;
  pair.regularized = eps > 0.0;
  return pair;
}

GepPair GepPair::with_identity_b(Matrix a) {
  check_symmetric_input(a, "A");
  GepPair pair;
  pair.b = Matrix::identity(a.rows());
  pair.a = std::move(a);
  return pair;
}

std::pair<Matrix, double> regularize_b(const Matrix& b_in) {
  Matrix b = b_in;
  check_symmetric_input(b, "B");
  const int p = b.rows();
  const linalg::EigResult eig = linalg::sym_eig(b);
  const double lmax = eig.values.front();
  const double lmin = eig.values.back();
  const double spectral = std::fmax(std::fabs(lmax), std::fabs(lmin));

  if (lmin < -1e-8 * spectral)
    fail(ErrorKind::InvalidInput, "B has a negative eigenvalue; not positive semidefinite");

  const double tau = 1e-10 * lmax;
  int rank = 0;
  double sigma_min_pos = 0.0;
  for (double v : eig.values)
    if (v > tau && tau > 0.0) {
      ++rank;
      sigma_min_pos = v;  // values are descending; last one above tau wins
    }
  if (rank == 0) {
    Error e(ErrorKind::RankDeficient, "B has no positive eigenvalues; cannot regularize");
    e.numerical_rank = 0;
    throw e;
  }
  if (lmin > tau) return {std::move(b), 0.0};

  const double eps = std::fmin(std::log(static_cast<double>(p)) / rank, sigma_min_pos / 2.0);
  if (!(eps > 0.0))
    fail(ErrorKind::RankDeficient, "regularization level collapsed to zero");
  for (int i = 0; i < p; ++i) b(i, i) += eps;
  return {std::move(b), eps};
}

SubspaceEstimate poi(const GepPair& pair, int d, const PenaltySpec& pen,
                     const OuterConfig& cfg) {
  check_d(pair, d);
  pen.validate(d);
  if (cfg.max_outer < 1 || !(cfg.outer_tol > 0.0))
    fail(ErrorKind::InvalidInput, "bad outer loop configuration");

  EigCache eig(pair, cfg);
  Matrix q = initial_basis(pair, d, cfg, eig);

  bool converged = false;
  bool padded_any = false;
  int iters = 0;
  for (int r = 1; r <= cfg.max_outer; ++r) {
    const Matrix m = kernels::matmul(pair.a, q);
    InnerResult inner = solve_penalized(pair.b, m, pen, cfg.inner, &q);
    if (max_abs(inner.z) == 0.0) throw_over_penalized(pen.lambda(0));

    bool padded = false;
    Matrix q_new = basis_with_padding(inner.z, eig.get(), padded);
    padded_any = padded_any || padded;

    const double dist = linalg::projection_distance(q, q_new);
    q = std::move(q_new);
    iters = r;
    if (dist < cfg.outer_tol) {
      converged = true;
      break;
    }
  }
  return finish_estimate(std::move(q), pair, pen, cfg, iters, converged, padded_any);
}

SubspaceEstimate fast_poi(const GepPair& pair, int d, const PenaltySpec& pen,
                          const OuterConfig& cfg) {
  check_d(pair, d);
  pen.validate(d);

  EigCache eig(pair, cfg);
  const Matrix v = leading_eigvecs(eig.get(), d);
  InnerResult inner = solve_penalized(pair.b, v, pen, cfg.inner, &v);
  if (max_abs(inner.z) == 0.0) throw_over_penalized(pen.lambda(0));

  bool padded = false;
  Matrix q = basis_with_padding(inner.z, eig.get(), padded);
  return finish_estimate(std::move(q), pair, pen, cfg, 1, inner.converged, padded);
}

double lambda_max(const Matrix& a_or_v, PenaltyKind kind, Method method, int d) {
  if (a_or_v.empty() || !all_finite(a_or_v))
    fail(ErrorKind::InvalidInput, "lambda_max: bad matrix");
  if (d < 1) fail(ErrorKind::InvalidInput, "lambda_max: d must be positive");

  if (method == Method::FastPoi) {
    if (a_or_v.cols() != d)
      fail(ErrorKind::InvalidInput, "lambda_max: V must have exactly d columns");
    if (kind == PenaltyKind::ElementLasso) return max_abs(a_or_v);
    double best = 0.0;
    for (int i = 0; i < a_or_v.rows(); ++i) {
      double s = 0.0;
      for (int j = 0; j < d; ++j) s += a_or_v(i, j) * a_or_v(i, j);
      best = std::fmax(best, std::sqrt(s));
    }
    return best;
  }

  if (a_or_v.rows() != a_or_v.cols())
    fail(ErrorKind::InvalidInput, "lambda_max: A must be square for Poi");
  if (d > a_or_v.cols()) fail(ErrorKind::InvalidInput, "lambda_max: d exceeds p");
  if (kind == PenaltyKind::ElementLasso) return max_abs(a_or_v);

  // Row-wise l2 norm of the d largest-magnitude entries.
  double best = 0.0;
  Vector row(static_cast<size_t>(a_or_v.cols()));
  for (int i = 0; i < a_or_v.rows(); ++i) {
    for (int j = 0; j < a_or_v.cols(); ++j) row[static_cast<size_t>(j)] = std::fabs(a_or_v(i, j));
    std::partial_sort(row.begin(), row.begin() + d, row.end(), std::greater<double>());
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += row[static_cast<size_t>(j)] * row[static_cast<size_t>(j)];
    best = std::fmax(best, std::sqrt(s));
  }
  return best;
}

double lambda_max(const GepPair& pair, PenaltyKind kind, Method method, int d) {
  check_d(pair, d);
  if (method == Method::Poi) return lambda_max(pair.a, kind, method, d);
  const linalg::EigResult eig = linalg::sym_eig(pair.a);
  return lambda_max(leading_eigvecs(eig, d), kind, method, d);
}

std::pair<Matrix, Vector> recover_pair(const Matrix& q, const GepPair& pair) {
  if (q.rows() != pair.dim() || q.cols() < 1 || q.cols() > q.rows())
    fail(ErrorKind::InvalidInput, "recover_pair: basis shape mismatch");
  const Matrix aq = kernels::matmul(pair.a, q);
  const Matrix bq = kernels::matmul(pair.b, q);
  Matrix at = kernels::matmul_tn(q, aq);
  Matrix bt = kernels::matmul_tn(q, bq);
  symmetrize(at);
  symmetrize(bt);
  linalg::SmallGepResult sg = linalg::small_gep(at, bt);
  return {kernels::matmul(q, sg.t), std::move(sg.values)};
}

Vector eigenvalues_ls(const Matrix& u, const GepPair& pair) {
  if (u.rows() != pair.dim() || u.cols() < 1)
    fail(ErrorKind::InvalidInput, "eigenvalues_ls: shape mismatch");
  const Matrix alpha = kernels::matmul(pair.a, u);
  const Matrix beta = kernels::matmul(pair.b, u);
  Vector out(static_cast<size_t>(u.cols()));
  for (int j = 0; j < u.cols(); ++j) {
    double bb = 0.0, ba = 0.0;
    for (int i = 0; i < u.rows(); ++i) {
      bb += beta(i, j) * beta(i, j);
      ba += beta(i, j) * alpha(i, j);
    }
    if (std::sqrt(bb) <= 1e-12)
      fail(ErrorKind::DegenerateColumn,
           "eigenvalues_ls: column " + std::to_string(j) + " has near-zero B image");
    out[static_cast<size_t>(j)] = ba / bb;
  }
  return out;
}

Vector eigenvalues_rayleigh(const Matrix& u, const GepPair& pair) {
  if (u.rows() != pair.dim() || u.cols() < 1)
    fail(ErrorKind::InvalidInput, "eigenvalues_rayleigh: shape mismatch");
  const Matrix au = kernels::matmul(pair.a, u);
  const Matrix bu = kernels::matmul(pair.b, u);
  Vector out(static_cast<size_t>(u.cols()));
  for (int j = 0; j < u.cols(); ++j) {
    double ua = 0.0, ub = 0.0;
    for (int i = 0; i < u.rows(); ++i) {
      ua += u(i, j) * au(i, j);
      ub += u(i, j) * bu(i, j);
    }
    if (std::fabs(ub) <= 1e-300)
      fail(ErrorKind::DegenerateColumn,
           "eigenvalues_rayleigh: column " + std::to_string(j) + " has zero B energy");
    out[static_cast<size_t>(j)] = ua / ub;
  }
  return out;
}

}  // namespace spgep
