#include "spgep/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

#include <json.hpp>

#include "spgep/errors.hpp"
#include "spgep/kernels.hpp"
#include "spgep/threads.hpp"

namespace spgep::sim {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 6.283185307179586476925286766559;

Matrix compound_symmetry(int p, double rho) {
  Matrix s(p, p, rho);
  for (int i = 0; i < p; ++i) s(i, i) = 1.0;
  return s;
}

Matrix ar1(int p, double rho) {
  Matrix s(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) s(i, j) = std::pow(rho, std::abs(i - j));
  return s;
}

PenaltySpec make_pen(PenaltyKind kind, double lambda, int d) {
  return kind == PenaltyKind::GroupRow ? PenaltySpec::group_row(lambda)
                                       : PenaltySpec::element_lasso(lambda, d);
}

SubspaceEstimate fit_one(const GepPair& pair, int d, PenaltyKind kind, Method method,
                         double lambda, const OuterConfig& cfg) {
  const PenaltySpec pen = make_pen(kind, lambda, d);
  return method == Method::Poi ? poi(pair, d, pen, cfg) : fast_poi(pair, d, pen, cfg);
}

std::vector<int> rows_above(const Matrix& m, double tol) {
  std::vector<int> s;
  for (int i = 0; i < m.rows(); ++i) {
    double n = 0.0;
    for (int j = 0; j < m.cols(); ++j) n += m(i, j) * m(i, j);
    if (std::sqrt(n) > tol) s.push_back(i);
  }
  return s;
}

void fill_support_metrics(const SubspaceEstimate& est, const Matrix& u_true,
                          RepetitionResult& out) {
  const std::vector<int> truth = rows_above(u_true, 1e-8);
  out.support_size = static_cast<int>(est.support.size());
  int tp = 0;
  for (int i : est.support)
    if (std::binary_search(truth.begin(), truth.end(), i)) ++tp;
  out.true_positives = tp;
  out.false_positives = out.support_size - tp;
}

// Fits the whole grid on train, tracking the best score on tune and the best
// distance to the truth. Failures at single levels (over-penalization and the
// like) are skipped; a grid with no usable level is a tuning failure.
SubspaceEstimate grid_and_select(const GepPair& train, const GepPair& tune,
                                 const Matrix& u_true, const ExperimentSpec& spec,
                                 RepetitionResult& out) {
  const linalg::EigResult eig_a = linalg::sym_eig(train.a);
  OuterConfig cfg;
  cfg.eig_a = &eig_a;

  const double lmax =
      spec.method == Method::Poi
          ? lambda_max(train.a, spec.penalty, Method::Poi, spec.d)
          : lambda_max(eig_a.vectors.cols_slice(0, spec.d), spec.penalty, Method::FastPoi,
                       spec.d);
  const Vector grid = lambda_grid(lmax, spec.grid_ratio, spec.grid_len);

  double min_dist = kInf;
  double best_score = -kInf;
  int best_i = -1;
  double best_dist = kNaN;
  std::optional<SubspaceEstimate> best;
  for (size_t i = 0; i < grid.size(); ++i) {
    if (std::isinf(grid[i])) continue;  // sentinel: zero estimate, score -inf
    try {
      SubspaceEstimate est = fit_one(train, spec.d, spec.penalty, spec.method, grid[i], cfg);
      const double dist = linalg::projection_distance(est.q, u_true);
      min_dist = std::fmin(min_dist, dist);
      const double score = cv_score(est.u, tune.a, tune.b);
      if (std::isfinite(score) && score > best_score) {
        best_score = score;
        best_i = static_cast<int>(i);
        best_dist = dist;
        best = std::move(est);
      }
    } catch (const Error&) {
      continue;
    }
  }
  if (best_i < 0) fail(ErrorKind::TuningFailure, "no usable fit anywhere on the grid");

  out.min_distance = min_dist;
  out.cv_distance = best_dist;
  out.selected_lambda = grid[static_cast<size_t>(best_i)];
  fill_support_metrics(*best, u_true, out);
  return std::move(*best);
}

void run_pca_rep(const ExperimentSpec& spec, rng::Stream& stream, RepetitionResult& out) {
  const PcaInstance inst =
      make_pca_instance(static_cast<PcaModel>(spec.model), spec.d, spec.p, stream);
  const Matrix xtr = sample_gaussian_rows(inst.sigma_chol, spec.n_train, stream);
  const Matrix xtu = sample_gaussian_rows(inst.sigma_chol, spec.n_tune, stream);
  const GepPair train = pca_pair(xtr);
  const GepPair tune = pca_pair(xtu, /*gram_scaling=*/true);
  grid_and_select(train, tune, inst.u_true, spec, out);
}

void run_lda_rep(const ExperimentSpec& spec, const LdaInstance& inst, rng::Stream& stream,
                 RepetitionResult& out) {
  const LabeledData tr = sample_lda(inst, spec.n_train, stream);
  const LabeledData tu = sample_lda(inst, spec.n_tune, stream);
  const LabeledData te = sample_lda(inst, spec.n_test, stream);
  const GepPair train = lda_pair(tr);
  const GepPair tune = lda_pair(tu);
  const SubspaceEstimate best = grid_and_select(train, tune, inst.u_true, spec, out);

  const LabeledData reduced_train{kernels::matmul(tr.x, best.u), tr.y};
  const LabeledData reduced_test{kernels::matmul(te.x, best.u), te.y};
  out.misclass_rate = classify_lda(reduced_train, reduced_test).error_rate;
}

void run_taichi_rep(const ExperimentSpec& spec, rng::Stream& stream, RepetitionResult& out) {
  const LabeledData data = gen_taichi(spec.n_train, spec.p, stream);
  const GepPair pair = sir_pair(data, 2);

  const linalg::EigResult eig_a = linalg::sym_eig(pair.a);
  OuterConfig cfg;
  cfg.eig_a = &eig_a;
  const double lmax =
      spec.method == Method::Poi
          ? lambda_max(pair.a, spec.penalty, Method::Poi, spec.d)
          : lambda_max(eig_a.vectors.cols_slice(0, spec.d), spec.penalty, Method::FastPoi,
                       spec.d);
  const double lambda = lmax / 2.0;
  const SubspaceEstimate est = fit_one(pair, spec.d, spec.penalty, spec.method, lambda, cfg);

  Matrix u_true(spec.p, 2);
  u_true(0, 0) = 1.0;
  u_true(1, 1) = 1.0;
  out.min_distance = linalg::projection_distance(est.q, u_true);
  out.cv_distance = kNaN;  // no cross-validation in this protocol
  out.selected_lambda = lambda;
  fill_support_metrics(est, u_true, out);
}

MetricSummary summarize(const std::vector<double>& values) {
  Vector v;
  for (double x : values)
    if (std::isfinite(x)) v.push_back(x);
  if (v.empty()) return {kNaN, kNaN};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= static_cast<double>(v.size() - 1);
  return {mean, std::sqrt(var / static_cast<double>(v.size()))};
}

const char* method_name(Method m) { return m == Method::Poi ? "poi" : "fastpoi"; }
const char* penalty_name(PenaltyKind k) {
  return k == PenaltyKind::GroupRow ? "group" : "lasso";
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const char* family_name(ExperimentSpec::Family f) {
  switch (f) {
    case ExperimentSpec::Family::Pca: return "pca";
    case ExperimentSpec::Family::Lda: return "lda";
    case ExperimentSpec::Family::TaiChi: return "taichi";
  }
  return "?";
}

PcaInstance make_pca_instance(PcaModel model, int d, int p, rng::Stream& rng) {
  if (d < 1 || d > 5)
    fail(ErrorKind::InvalidInput, "pca models define between 1 and 5 spiked directions");
  const int s = model == PcaModel::I ? 10 : 5;
  const int need = model == PcaModel::I ? s : s * d;
  if (p < need)
    fail(ErrorKind::InvalidInput, "pca model needs p >= " + std::to_string(need));

  Matrix u(p, d);
  switch (model) {
    case PcaModel::I:
      for (int j = 0; j < d; ++j) {
        double norm = 0.0;
        while (norm < 1e-12) {
          norm = 0.0;
          for (int i = 0; i < s; ++i) {
            u(i, j) = rng.normal();
            norm += u(i, j) * u(i, j);
          }
          norm = std::sqrt(norm);
        }
        for (int i = 0; i < s; ++i) u(i, j) /= norm;
      }
      break;
    case PcaModel::II:
      for (int j = 0; j < d; ++j)
        for (int i = 0; i < s; ++i) u(j * s + i, j) = 1.0 / std::sqrt(5.0);
      break;
    case PcaModel::III: {
      Matrix k(s * d, d);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c <= r; ++c)
          for (int t = 0; t < s; ++t) k(r * s + t, c) = 1.0;
      const Matrix q = linalg::qr_thin(k).q;
      for (int i = 0; i < s * d; ++i)
        for (int j = 0; j < d; ++j) u(i, j) = q(i, j);
      break;
    }
  }

  Matrix w = u;
  for (int j = 0; j < d; ++j) {
    const double spike = 3.0 * (5.0 - j);  // eigenvalues 15, 12, 9, ...
    for (int i = 0; i < p; ++i) w(i, j) *= std::sqrt(spike);
  }
  Matrix sigma = kernels::matmul_nt(w, w);
  for (int i = 0; i < p; ++i) sigma(i, i) += 1.0;
  symmetrize(sigma);

  PcaInstance inst;
  inst.sigma_chol = linalg::cholesky_lower(sigma);
  inst.u_true = linalg::qr_thin(u).q;
  return inst;
}

Matrix sample_gaussian_rows(const Matrix& chol_lower, int n, rng::Stream& rng) {
  if (n < 1) fail(ErrorKind::InvalidInput, "sample_gaussian_rows: n must be positive");
  const int p = chol_lower.rows();
  Matrix g(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) g(i, j) = rng.normal();
  return kernels::matmul_nt(g, chol_lower);
}

PcaSample gen_pca(PcaModel model, int d, int p, int n, rng::Stream& rng) {
  const PcaInstance inst = make_pca_instance(model, d, p, rng);
  return {sample_gaussian_rows(inst.sigma_chol, n, rng), inst.u_true};
}

LdaInstance make_lda_instance(LdaModel model, int p) {
  if (p < 5) fail(ErrorKind::InvalidInput, "lda models need p >= 5");

  auto vec = [p](std::initializer_list<double> head) {
    Vector v(static_cast<size_t>(p), 0.0);
    size_t i = 0;
    for (double x : head) v[i++] = x;
    return v;
  };
  const Vector v1 = vec({2, 1, 2, 1, 2});
  const Vector v2 = vec({1, -1, 1, -1, 1});
  const Vector v3 = vec({0, 1, -1, 1, 0});
  const Vector w1 = vec({-1, 1, 1, 1, 1});
  const Vector w2 = vec({1, -1, 1, -1, 1});
  const Vector w3 = vec({1, 1, -1, 1, 0});

  LdaInstance inst;
  Matrix sigma;
  std::vector<Vector> cols;
  switch (model) {
    case LdaModel::I:
      sigma = Matrix::identity(p);
      cols = {v1, v2, v3};
      break;
    case LdaModel::II:
      sigma = compound_symmetry(p, 0.5);
      cols = {v1, v2, v3};
      break;
    case LdaModel::III:
      sigma = ar1(p, 0.5);
      cols = {v1, v2, v3};
      break;
    case LdaModel::IV:
      sigma = compound_symmetry(p, 0.5);
      cols = {w1, w2, w3};
      break;
    case LdaModel::V: {
      sigma = compound_symmetry(p, 0.5);
      Vector wbar(static_cast<size_t>(p), 0.0);
      for (int i = 0; i < p; ++i)
        wbar[static_cast<size_t>(i)] =
            (w1[static_cast<size_t>(i)] + w2[static_cast<size_t>(i)] + w3[static_cast<size_t>(i)]) / 3.0;
      cols = {w1, w2, w3, wbar};
      for (auto& c : cols)
        for (double& x : c) x *= 2.0;
      break;
    }
    default:
      fail(ErrorKind::InvalidInput, "unknown lda model");
  }

  inst.k = static_cast<int>(cols.size());
  inst.means = Matrix(inst.k, p);
  const bool identity_sigma = model == LdaModel::I;
  for (int k = 0; k < inst.k; ++k) {
    if (identity_sigma) {
      for (int j = 0; j < p; ++j) inst.means(k, j) = cols[static_cast<size_t>(k)][static_cast<size_t>(j)];
    } else {
      for (int i = 0; i < p; ++i) {
        double s = 0.0;
        for (int j = 0; j < p; ++j) s += sigma(i, j) * cols[static_cast<size_t>(k)][static_cast<size_t>(j)];
        inst.means(k, i) = s;
      }
    }
  }

  // Population pencil: between-mean scatter against the shared covariance.
  Vector mbar(static_cast<size_t>(p), 0.0);
  for (int k = 0; k < inst.k; ++k)
    for (int j = 0; j < p; ++j) mbar[static_cast<size_t>(j)] += inst.means(k, j);
  for (double& x : mbar) x /= inst.k;
  Matrix rows(inst.k, p);
  for (int k = 0; k < inst.k; ++k)
    for (int j = 0; j < p; ++j)
      rows(k, j) = (inst.means(k, j) - mbar[static_cast<size_t>(j)]) / std::sqrt(static_cast<double>(inst.k));
  Matrix a_pop = kernels::gram(rows);

  const linalg::SmallGepResult sol = linalg::small_gep(a_pop, sigma);
  Matrix top(p, 2);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < 2; ++j) top(i, j) = sol.t(i, j);
  inst.u_true = linalg::qr_thin(top).q;
  inst.sigma_chol = linalg::cholesky_lower(sigma);
  return inst;
}

LabeledData sample_lda(const LdaInstance& inst, int n_per_class, rng::Stream& rng) {
  if (n_per_class < 1) fail(ErrorKind::InvalidInput, "sample_lda: n_per_class must be positive");
  const int p = inst.means.cols();
  LabeledData out;
  out.x = Matrix(inst.k * n_per_class, p);
  out.y.resize(static_cast<size_t>(inst.k) * n_per_class);
  int row = 0;
  for (int k = 0; k < inst.k; ++k) {
    const Matrix noise = sample_gaussian_rows(inst.sigma_chol, n_per_class, rng);
    for (int i = 0; i < n_per_class; ++i, ++row) {
      for (int j = 0; j < p; ++j) out.x(row, j) = inst.means(k, j) + noise(i, j);
      out.y[static_cast<size_t>(row)] = static_cast<double>(k + 1);
    }
  }
  return out;
}

LdaSample gen_lda(LdaModel model, int p, int n_per_class, rng::Stream& rng) {
  const LdaInstance inst = make_lda_instance(model, p);
  return {sample_lda(inst, n_per_class, rng), inst.u_true};
}

LabeledData gen_taichi(int n, int p, rng::Stream& rng) {
  if (n < 1 || p < 2) fail(ErrorKind::InvalidInput, "gen_taichi: need n >= 1 and p >= 2");
  LabeledData out;
  out.x = Matrix(n, p);
  out.y.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double r = 2.0 * std::sqrt(rng.uniform());
    const double th = kTwoPi * rng.uniform();
    const double x1 = r * std::cos(th);
    const double x2 = r * std::sin(th);
    out.x(i, 0) = x1;
    out.x(i, 1) = x2;
    for (int j = 2; j < p; ++j) out.x(i, j) = rng.normal();

    const auto in_circle = [x1, x2](double cy, double rad) {
      const double dy = x2 - cy;
      return x1 * x1 + dy * dy <= rad * rad;
    };
    // Classic taijitu on the radius-2 disk, lobes on the dividing diameter:
    // the upper unit circle is the yang head (with a yin eye), the lower one
    // the yin head (with a yang eye), and the rest splits at x1 = 0.
    bool yin;
    if (in_circle(1.0, 1.0))
      yin = in_circle(1.0, 0.25);
    else if (in_circle(-1.0, 1.0))
      yin = !in_circle(-1.0, 0.25);
    else
      yin = x1 > 0.0;
    out.y[static_cast<size_t>(i)] = yin ? 1.0 : 0.0;
  }
  return out;
}

ClassifyResult classify_lda(const LabeledData& train, const LabeledData& test) {
  const int n = train.x.rows(), d = train.x.cols();
  if (n < 2 || d < 1) fail(ErrorKind::InvalidInput, "classify_lda: bad training data");
  if (test.x.cols() != d) fail(ErrorKind::InvalidInput, "classify_lda: feature count mismatch");
  if (static_cast<int>(train.y.size()) != n || static_cast<int>(test.y.size()) != test.x.rows())
    fail(ErrorKind::InvalidInput, "classify_lda: label count mismatch");

  std::map<double, std::vector<int>> groups;
  for (int i = 0; i < n; ++i) groups[train.y[static_cast<size_t>(i)]].push_back(i);
  const int k = static_cast<int>(groups.size());
  if (k < 2) fail(ErrorKind::InvalidInput, "classify_lda: need >= 2 classes");
  if (n - k < 1) fail(ErrorKind::InvalidInput, "classify_lda: no residual degrees of freedom");

  std::vector<double> labels;
  Matrix means(k, d);
  Vector log_prior(static_cast<size_t>(k));
  {
    int g = 0;
    for (const auto& [label, idx] : groups) {
      labels.push_back(label);
      for (int i : idx)
        for (int j = 0; j < d; ++j) means(g, j) += train.x(i, j);
      for (int j = 0; j < d; ++j) means(g, j) /= static_cast<double>(idx.size());
      log_prior[static_cast<size_t>(g)] =
          std::log(static_cast<double>(idx.size()) / static_cast<double>(n));
      ++g;
    }
  }

  Matrix pooled(d, d);
  {
    int g = 0;
    for (const auto& [label, idx] : groups) {
      for (int i : idx)
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b)
            pooled(a, b) += (train.x(i, a) - means(g, a)) * (train.x(i, b) - means(g, b));
      ++g;
    }
    const double div = static_cast<double>(n - k);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) pooled(a, b) /= div;
  }

  ClassifyResult out;
  Matrix l;
  try {
    l = linalg::cholesky_lower(pooled);
  } catch (const Error&) {
    double tr = 0.0;
    for (int a = 0; a < d; ++a) tr += pooled(a, a);
    const double ridge = 1e-8 * tr / d;
    for (int a = 0; a < d; ++a) pooled(a, a) += ridge;
    l = linalg::cholesky_lower(pooled);  // second failure propagates
    out.ridged = true;
  }

  Matrix omega = means.transposed();  // d x k, solve pooled * omega = means^T
  linalg::solve_lower_inplace(l, omega);
  linalg::solve_lower_transposed_inplace(l, omega);
  Vector offset(static_cast<size_t>(k));
  for (int g = 0; g < k; ++g) {
    double mo = 0.0;
    for (int j = 0; j < d; ++j) mo += means(g, j) * omega(j, g);
    offset[static_cast<size_t>(g)] = -0.5 * mo + log_prior[static_cast<size_t>(g)];
  }

  out.predicted.resize(static_cast<size_t>(test.x.rows()));
  int wrong = 0;
  for (int i = 0; i < test.x.rows(); ++i) {
    int arg = 0;
    double best = -kInf;
    for (int g = 0; g < k; ++g) {
      double s = offset[static_cast<size_t>(g)];
      for (int j = 0; j < d; ++j) s += test.x(i, j) * omega(j, g);
      if (s > best) {
        best = s;
        arg = g;
      }
    }
    out.predicted[static_cast<size_t>(i)] = labels[static_cast<size_t>(arg)];
    if (labels[static_cast<size_t>(arg)] != test.y[static_cast<size_t>(i)]) ++wrong;
  }
  out.error_rate = test.x.rows() > 0
                       ? static_cast<double>(wrong) / static_cast<double>(test.x.rows())
                       : kNaN;
  return out;
}

void ExperimentSpec::validate() const {
  if (repetitions < 1) fail(ErrorKind::InvalidInput, "experiment: repetitions must be >= 1");
  if (d < 1 || p < 2 || d > p) fail(ErrorKind::InvalidInput, "experiment: need 1 <= d <= p");
  if (!(grid_ratio > 0.0 && grid_ratio < 1.0) || grid_len < 0)
    fail(ErrorKind::InvalidInput, "experiment: bad grid parameters");
  switch (family) {
    case Family::Pca:
      if (model < 1 || model > 3) fail(ErrorKind::InvalidInput, "pca model must be 1..3");
      if (n_train < 2 || n_tune < 2)
        fail(ErrorKind::InvalidInput, "pca experiment: need n_train, n_tune >= 2");
      break;
    case Family::Lda:
      if (model < 1 || model > 5) fail(ErrorKind::InvalidInput, "lda model must be 1..5");
      if (n_train < 2 || n_tune < 2 || n_test < 1)
        fail(ErrorKind::InvalidInput,
             "lda experiment: need per-class n_train, n_tune >= 2 and n_test >= 1");
      break;
    case Family::TaiChi:
      if (n_train < 4) fail(ErrorKind::InvalidInput, "taichi experiment: need n_train >= 4");
      break;
  }
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentReport report;
  report.spec = spec;
  report.repetitions.resize(static_cast<size_t>(spec.repetitions));

  std::optional<LdaInstance> lda_inst;
  if (spec.family == ExperimentSpec::Family::Lda)
    lda_inst = make_lda_instance(static_cast<LdaModel>(spec.model), spec.p);

  const int reps = spec.repetitions;
  const int nt = threads::count();
#pragma omp parallel for schedule(dynamic) num_threads(nt) if (nt > 1 && reps > 1)
  for (int r = 0; r < reps; ++r) {
    RepetitionResult& out = report.repetitions[static_cast<size_t>(r)];
    out.rep = r;
    out.misclass_rate = kNaN;
    try {
      rng::Stream stream = rng::Stream::for_repetition(spec.seed, r);
      switch (spec.family) {
        case ExperimentSpec::Family::Pca:
          run_pca_rep(spec, stream, out);
          break;
        case ExperimentSpec::Family::Lda:
          run_lda_rep(spec, *lda_inst, stream, out);
          break;
        case ExperimentSpec::Family::TaiChi:
          run_taichi_rep(spec, stream, out);
          break;
      }
      out.ok = true;
    } catch (const std::exception& e) {
      out.ok = false;
      out.error = e.what();
      out.min_distance = kNaN;
      out.cv_distance = kNaN;
      out.selected_lambda = kNaN;
      out.misclass_rate = kNaN;
      out.support_size = -1;
      out.true_positives = -1;
      out.false_positives = -1;
    }
  }

  std::vector<double> mind, cvd, lam, supp, tp, fp, mis;
  for (const RepetitionResult& r : report.repetitions) {
    if (!r.ok) continue;
    ++report.ok_count;
    mind.push_back(r.min_distance);
    cvd.push_back(r.cv_distance);
    lam.push_back(r.selected_lambda);
    supp.push_back(r.support_size);
    tp.push_back(r.true_positives);
    fp.push_back(r.false_positives);
    mis.push_back(r.misclass_rate);
  }
  report.min_distance = summarize(mind);
  report.cv_distance = summarize(cvd);
  report.selected_lambda = summarize(lam);
  report.support_size = summarize(supp);
  report.true_positives = summarize(tp);
  report.false_positives = summarize(fp);
  report.misclass_rate = summarize(mis);
  return report;
}

namespace {

ExperimentSpec::Family family_from_name(const std::string& s) {
  if (s == "pca") return ExperimentSpec::Family::Pca;
  if (s == "lda") return ExperimentSpec::Family::Lda;
  if (s == "taichi") return ExperimentSpec::Family::TaiChi;
  fail(ErrorKind::ParseError, "unknown family '" + s + "'");
}

Method method_from_name(const std::string& s) {
  if (s == "poi") return Method::Poi;
  if (s == "fastpoi") return Method::FastPoi;
  fail(ErrorKind::ParseError, "unknown method '" + s + "'");
}

PenaltyKind penalty_from_name(const std::string& s) {
  if (s == "lasso") return PenaltyKind::ElementLasso;
  if (s == "group") return PenaltyKind::GroupRow;
  fail(ErrorKind::ParseError, "unknown penalty '" + s + "'");
}

void apply_spec_key(ExperimentSpec& spec, const std::string& key, const std::string& value) {
  try {
    if (key == "family") spec.family = family_from_name(value);
    else if (key == "model") spec.model = std::stoi(value);
    else if (key == "method") spec.method = method_from_name(value);
    else if (key == "penalty") spec.penalty = penalty_from_name(value);
    else if (key == "d") spec.d = std::stoi(value);
    else if (key == "p") spec.p = std::stoi(value);
    else if (key == "n_train") spec.n_train = std::stoi(value);
    else if (key == "n_tune") spec.n_tune = std::stoi(value);
    else if (key == "n_test") spec.n_test = std::stoi(value);
    else if (key == "repetitions") spec.repetitions = std::stoi(value);
    else if (key == "seed") spec.seed = std::stoull(value);
    else if (key == "grid_ratio") spec.grid_ratio = std::stod(value);
    else if (key == "grid_len") spec.grid_len = std::stoi(value);
    else fail(ErrorKind::ParseError, "unknown spec key '" + key + "'");
  } catch (const std::invalid_argument&) {
    fail(ErrorKind::ParseError, "bad value '" + value + "' for spec key '" + key + "'");
  } catch (const std::out_of_range&) {
    fail(ErrorKind::ParseError, "value out of range for spec key '" + key + "'");
  }
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::string spec_to_kv(const ExperimentSpec& spec) {
  std::string out;
  out += std::string("family = ") + family_name(spec.family) + '\n';
  out += "model = " + std::to_string(spec.model) + '\n';
  out += std::string("method = ") + method_name(spec.method) + '\n';
  out += std::string("penalty = ") + penalty_name(spec.penalty) + '\n';
  out += "d = " + std::to_string(spec.d) + '\n';
  out += "p = " + std::to_string(spec.p) + '\n';
  out += "n_train = " + std::to_string(spec.n_train) + '\n';
  out += "n_tune = " + std::to_string(spec.n_tune) + '\n';
  out += "n_test = " + std::to_string(spec.n_test) + '\n';
  out += "repetitions = " + std::to_string(spec.repetitions) + '\n';
  out += "seed = " + std::to_string(spec.seed) + '\n';
  out += "grid_ratio = " + format_double(spec.grid_ratio) + '\n';
  out += "grid_len = " + std::to_string(spec.grid_len) + '\n';
  return out;
}

ExperimentSpec spec_from_kv(const std::string& text) {
  ExperimentSpec spec;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty() || line[0] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::ParseError, "expected 'key = value', got '" + line + "'");
    apply_spec_key(spec, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return spec;
}

std::string spec_to_json(const ExperimentSpec& spec) {
  nlohmann::ordered_json j = {{"family", family_name(spec.family)},
                              {"model", spec.model},
                              {"method", method_name(spec.method)},
                              {"penalty", penalty_name(spec.penalty)},
                              {"d", spec.d},
                              {"p", spec.p},
                              {"n_train", spec.n_train},
                              {"n_tune", spec.n_tune},
                              {"n_test", spec.n_test},
                              {"repetitions", spec.repetitions},
                              {"seed", spec.seed},
                              {"grid_ratio", spec.grid_ratio},
                              {"grid_len", spec.grid_len}};
  return j.dump(2);
}

ExperimentSpec spec_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, std::string("spec json: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorKind::ParseError, "spec json: expected an object");
  ExperimentSpec spec;
  for (const auto& [key, value] : j.items()) {
    std::string v;
    if (value.is_string()) v = value.get<std::string>();
    else if (value.is_number_unsigned()) v = std::to_string(value.get<uint64_t>());
    else if (value.is_number_integer()) v = std::to_string(value.get<int64_t>());
    else if (value.is_number_float()) v = format_double(value.get<double>());
    else fail(ErrorKind::ParseError, "spec json: bad value for key '" + key + "'");
    apply_spec_key(spec, key, v);
  }
  return spec;
}

std::string ExperimentReport::to_json() const {
  nlohmann::ordered_json j;
  j["spec"] = {{"family", family_name(spec.family)},
               {"model", spec.model},
               {"method", method_name(spec.method)},
               {"penalty", penalty_name(spec.penalty)},
               {"d", spec.d},
               {"p", spec.p},
               {"n_train", spec.n_train},
               {"n_tune", spec.n_tune},
               {"n_test", spec.n_test},
               {"repetitions", spec.repetitions},
               {"seed", spec.seed},
               {"grid_ratio", spec.grid_ratio},
               {"grid_len", spec.grid_len}};
  auto metric = [](const MetricSummary& m) {
    return nlohmann::ordered_json{{"mean", m.mean}, {"se", m.se}};
  };
  j["aggregate"] = {{"repetitions_ok", ok_count},
                    {"repetitions_failed", spec.repetitions - ok_count},
                    {"min_distance", metric(min_distance)},
                    {"cv_distance", metric(cv_distance)},
                    {"selected_lambda", metric(selected_lambda)},
                    {"support_size", metric(support_size)},
                    {"true_positives", metric(true_positives)},
                    {"false_positives", metric(false_positives)},
                    {"misclass_rate", metric(misclass_rate)}};
  nlohmann::ordered_json reps = nlohmann::ordered_json::array();
  for (const RepetitionResult& r : repetitions) {
    nlohmann::ordered_json jr = {{"rep", r.rep},
                                 {"ok", r.ok},
                                 {"min_distance", r.min_distance},
                                 {"cv_distance", r.cv_distance},
                                 {"selected_lambda", r.selected_lambda},
                                 {"support_size", r.support_size},
                                 {"true_positives", r.true_positives},
                                 {"false_positives", r.false_positives},
                                 {"misclass_rate", r.misclass_rate}};
    if (!r.ok) jr["error"] = r.error;
    reps.push_back(std::move(jr));
  }
  j["repetitions"] = std::move(reps);
  return j.dump(2);
}

std::string ExperimentReport::to_csv() const {
  std::string out =
      "rep,ok,min_distance,cv_distance,selected_lambda,support_size,"
      "true_positives,false_positives,misclass_rate,error\n";
  auto csv_safe = [](std::string s) {
    for (char& c : s)
      if (c == ',' || c == '\n' || c == '"') c = ';';
    return s;
  };
  for (const RepetitionResult& r : repetitions) {
    out += std::to_string(r.rep) + ',' + (r.ok ? "1" : "0") + ',' +
           format_double(r.min_distance) + ',' + format_double(r.cv_distance) + ',' +
           format_double(r.selected_lambda) + ',' + std::to_string(r.support_size) + ',' +
           std::to_string(r.true_positives) + ',' + std::to_string(r.false_positives) + ',' +
           format_double(r.misclass_rate) + ',' + csv_safe(r.error) + '\n';
  }
  out += "aggregate," + std::to_string(ok_count) + ',' + format_double(min_distance.mean) +
         ',' + format_double(cv_distance.mean) + ',' + format_double(selected_lambda.mean) +
         ',' + format_double(support_size.mean) + ',' + format_double(true_positives.mean) +
         ',' + format_double(false_positives.mean) + ',' + format_double(misclass_rate.mean) +
         ",\n";
  return out;
}

}  // namespace spgep::sim
