#include "spgep/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spgep/errors.hpp"
#include "spgep/kernels.hpp"

namespace spgep::linalg {
namespace {

void require_square_sym(const Matrix& s, const char* what) {
  if (s.rows() != s.cols() || s.rows() == 0)
    fail(ErrorKind::InvalidInput, std::string(what) + ": matrix must be square and nonempty");
  if (!all_finite(s))
    fail(ErrorKind::InvalidInput, std::string(what) + ": non-finite entries");
}

// Largest-|entry| of column j made positive, ties toward the lowest index.
void fix_column_sign(Matrix& v, int j) {
  int arg = 0;
  double best = std::fabs(v(0, j));
  for (int i = 1; i < v.rows(); ++i) {
    const double a = std::fabs(v(i, j));
    if (a > best) {
      best = a;
      arg = i;
    }
  }
  if (v(arg, j) < 0.0)
    for (int i = 0; i < v.rows(); ++i) v(i, j) = -v(i, j);
}

void fix_all_column_signs(Matrix& v) {
  for (int j = 0; j < v.cols(); ++j) fix_column_sign(v, j);
}

}  // namespace

EigResult sym_eig(const Matrix& s_in) {
  require_square_sym(s_in, "sym_eig");
  const int n = s_in.rows();
  Matrix s = s_in;
  symmetrize(s);
  Matrix v = Matrix::identity(n);

  const double scale = frobenius_norm(s);
  if (scale > 0.0) {
    const double stop = 1e-14 * scale;
    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      double off = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) off += 2.0 * s(i, j) * s(i, j);
      if (std::sqrt(off) <= stop) break;
      for (int i = 0; i < n - 1; ++i) {
        for (int j = i + 1; j < n; ++j) {
          const double aij = s(i, j);
          if (std::fabs(aij) <= 1e-300) continue;
          const double theta = (s(j, j) - s(i, i)) / (2.0 * aij);
          const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
          const double c = 1.0 / std::sqrt(t * t + 1.0);
          const double sn = t * c;
          for (int k = 0; k < n; ++k) {
            const double ski = s(k, i), skj = s(k, j);
            s(k, i) = c * ski - sn * skj;
            s(k, j) = sn * ski + c * skj;
          }
          for (int k = 0; k < n; ++k) {
            const double sik = s(i, k), sjk = s(j, k);
            s(i, k) = c * sik - sn * sjk;
            s(j, k) = sn * sik + c * sjk;
          }
          for (int k = 0; k < n; ++k) {
            const double vki = v(k, i), vkj = v(k, j);
            v(k, i) = c * vki - sn * vkj;
            v(k, j) = sn * vki + c * vkj;
          }
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return s(a, a) > s(b, b); });

  EigResult out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (int j = 0; j < n; ++j) {
    out.values[j] = s(order[j], order[j]);
    for (int i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  if (!all_finite(out.vectors) ||
      std::any_of(out.values.begin(), out.values.end(),
                  [](double x) { return !std::isfinite(x); }))
    fail(ErrorKind::InvalidInput, "sym_eig: decomposition produced non-finite values");
  fix_all_column_signs(out.vectors);
  return out;
}

Vector singular_values(const Matrix& m_in) {
  if (m_in.empty()) fail(ErrorKind::InvalidInput, "singular_values: empty matrix");
  Matrix w = m_in.rows() >= m_in.cols() ? m_in : m_in.transposed();
  const int n = w.rows(), d = w.cols();

  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (int i = 0; i < d - 1; ++i) {
      for (int j = i + 1; j < d; ++j) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (int k = 0; k < n; ++k) {
          alpha += w(k, i) * w(k, i);
          beta += w(k, j) * w(k, j);
          gamma += w(k, i) * w(k, j);
        }
        if (std::fabs(gamma) <= 1e-15 * std::sqrt(alpha * beta) || gamma == 0.0) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = c * t;
        for (int k = 0; k < n; ++k) {
          const double wi = w(k, i), wj = w(k, j);
          w(k, i) = c * wi - sn * wj;
          w(k, j) = sn * wi + c * wj;
        }
      }
    }
    if (!rotated) break;
  }

  Vector sv(d);
  for (int j = 0; j < d; ++j) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += w(k, j) * w(k, j);
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<double>());
  return sv;
}

QrResult qr_thin(const Matrix& z) {
  const int p = z.rows(), d = z.cols();
  if (d < 1 || p < d) fail(ErrorKind::InvalidInput, "qr_thin: need p >= d >= 1");
  if (!all_finite(z)) fail(ErrorKind::InvalidInput, "qr_thin: non-finite entries");

  const Vector sv = singular_values(z);
  if (sv[0] <= 0.0 || sv[d - 1] <= 1e-12 * sv[0]) {
    int rank = 0;
    for (double s : sv)
      if (s > 1e-12 * sv[0]) ++rank;
    Error e(ErrorKind::RankDeficient, "qr_thin: numerically rank-deficient input");
    e.numerical_rank = rank;
    throw e;
  }

  Matrix w = z;
  std::vector<Vector> reflectors;
  reflectors.reserve(d);
  Vector taus(d, 0.0);
  for (int k = 0; k < d; ++k) {
    double norm = 0.0;
    for (int i = k; i < p; ++i) norm += w(i, k) * w(i, k);
    norm = std::sqrt(norm);
    Vector vk(p, 0.0);
    double tau = 0.0;
    if (norm > 0.0) {
      const double alpha = w(k, k) >= 0.0 ? -norm : norm;
      double vnorm2 = 0.0;
      vk[k] = w(k, k) - alpha;
      vnorm2 += vk[k] * vk[k];
      for (int i = k + 1; i < p; ++i) {
        vk[i] = w(i, k);
        vnorm2 += vk[i] * vk[i];
      }
      if (vnorm2 > 0.0) {
        tau = 2.0 / vnorm2;
        for (int j = k; j < d; ++j) {
          double s = 0.0;
          for (int i = k; i < p; ++i) s += vk[i] * w(i, j);
          s *= tau;
          for (int i = k; i < p; ++i) w(i, j) -= s * vk[i];
        }
        w(k, k) = alpha;
        for (int i = k + 1; i < p; ++i) w(i, k) = 0.0;
      }
    }
    reflectors.push_back(std::move(vk));
    taus[k] = tau;
  }

  QrResult out;
  out.r = Matrix(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) out.r(i, j) = w(i, j);

  out.q = Matrix(p, d);
  for (int j = 0; j < d; ++j) out.q(j, j) = 1.0;
  for (int k = d - 1; k >= 0; --k) {
    if (taus[k] == 0.0) continue;
    const Vector& vk = reflectors[k];
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int i = k; i < p; ++i) s += vk[i] * out.q(i, j);
      s *= taus[k];
      for (int i = k; i < p; ++i) out.q(i, j) -= s * vk[i];
    }
  }

  for (int k = 0; k < d; ++k) {
    if (out.r(k, k) < 0.0) {
      for (int j = k; j < d; ++j) out.r(k, j) = -out.r(k, j);
      for (int i = 0; i < p; ++i) out.q(i, k) = -out.q(i, k);
    }
  }
  return out;
}

Matrix cholesky_lower(const Matrix& s) {
  require_square_sym(s, "cholesky_lower");
  const int n = s.rows();
  Matrix l(n, n);
  for (int j = 0; j < n; ++j) {
    double diag = s(j, j);
    for (int k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0) || !std::isfinite(diag))
      fail(ErrorKind::NotPositiveDefinite, "cholesky_lower: pivot " + std::to_string(j) +
                                               " is not positive");
    l(j, j) = std::sqrt(diag);
    for (int i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (int k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
    }
  }
  return l;
}

void solve_lower_inplace(const Matrix& l, Matrix& x) {
  if (l.rows() != x.rows()) fail(ErrorKind::InvalidInput, "solve_lower: dimension mismatch");
  const int n = l.rows(), m = x.cols();
  for (int i = 0; i < n; ++i) {
    const double* li = l.row_ptr(i);
    for (int j = 0; j < m; ++j) {
      double v = x(i, j);
      for (int k = 0; k < i; ++k) v -= li[k] * x(k, j);
      x(i, j) = v / li[i];
    }
  }
}

void solve_lower_transposed_inplace(const Matrix& l, Matrix& x) {
  if (l.rows() != x.rows()) fail(ErrorKind::InvalidInput, "solve_lower_t: dimension mismatch");
  const int n = l.rows(), m = x.cols();
  for (int i = n - 1; i >= 0; --i) {
    for (int j = 0; j < m; ++j) {
      double v = x(i, j);
      for (int k = i + 1; k < n; ++k) v -= l(k, i) * x(k, j);
      x(i, j) = v / l(i, i);
    }
  }
}

Matrix spd_solve(const Matrix& s, const Matrix& x) {
  const Matrix l = cholesky_lower(s);
  Matrix y = x;
  solve_lower_inplace(l, y);
  solve_lower_transposed_inplace(l, y);
  return y;
}

SmallGepResult small_gep(const Matrix& at, const Matrix& bt) {
  require_square_sym(at, "small_gep");
  require_square_sym(bt, "small_gep");
  if (at.rows() != bt.rows()) fail(ErrorKind::InvalidInput, "small_gep: dimension mismatch");

  const Matrix l = cholesky_lower(bt);
  Matrix c = at;
  solve_lower_inplace(l, c);      // L^{-1} At
  c = c.transposed();
  solve_lower_inplace(l, c);      // L^{-1} At L^{-T}, transposed view cancels by symmetry
  symmetrize(c);
  EigResult eig = sym_eig(c);

  SmallGepResult out;
  out.values = std::move(eig.values);
  out.t = eig.vectors;
  solve_lower_transposed_inplace(l, out.t);  // T = L^{-T} W
  fix_all_column_signs(out.t);
  return out;
}

double projection_distance(const Matrix& u1_in, const Matrix& u2_in) {
  if (u1_in.empty() || u2_in.empty())
    fail(ErrorKind::InvalidInput, "projection_distance: empty basis");
  if (u1_in.rows() != u2_in.rows())
    fail(ErrorKind::InvalidInput, "projection_distance: ambient dimensions differ");
  if (u1_in.cols() > u1_in.rows() || u2_in.cols() > u2_in.rows())
    fail(ErrorKind::InvalidInput, "projection_distance: more columns than rows");

  auto orthonormalized = [](const Matrix& u) {
    const Matrix g = kernels::serial::gram(u);
    double dev = 0.0;
    for (int i = 0; i < g.rows(); ++i)
      for (int j = 0; j < g.cols(); ++j)
        dev = std::fmax(dev, std::fabs(g(i, j) - (i == j ? 1.0 : 0.0)));
    if (dev <= 1e-10) return u;
    return qr_thin(u).q;
  };

  Matrix u1 = orthonormalized(u1_in);
  Matrix u2 = orthonormalized(u2_in);
  if (u1.cols() < u2.cols()) std::swap(u1, u2);

  // max sin(theta_i) = sigma_max(U2 - U1 (U1^T U2)); exact for small angles,
  // unlike sqrt(1 - cos^2) from the singular values of U1^T U2.
  const Matrix c = kernels::matmul_tn(u1, u2);
  Matrix w = kernels::matmul(u1, c);
  for (int i = 0; i < w.rows(); ++i)
    for (int j = 0; j < w.cols(); ++j) w(i, j) = u2(i, j) - w(i, j);
  const Vector sv = singular_values(w);
  return std::clamp(sv[0], 0.0, 1.0);
}

}  // namespace spgep::linalg
