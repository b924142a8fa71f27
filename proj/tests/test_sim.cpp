#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "spgep/errors.hpp"
#include "spgep/kernels.hpp"
#include "spgep/linalg.hpp"
#include "spgep/sim.hpp"
#include "spgep/threads.hpp"
#include "test_support.hpp"

using namespace spgep;
using namespace spgep::sim;

namespace {

std::vector<int> nonzero_rows(const Matrix& m, double tol = 1e-8) {
  std::vector<int> out;
  for (int i = 0; i < m.rows(); ++i) {
    double n = 0.0;
    for (int j = 0; j < m.cols(); ++j) n += m(i, j) * m(i, j);
    if (std::sqrt(n) > tol) out.push_back(i);
  }
  return out;
}

Matrix population_sigma(const PcaInstance& inst) {
  return kernels::matmul_nt(inst.sigma_chol, inst.sigma_chol);
}

}  // namespace

TEST_CASE("pca model I: shared block of ten rows, spikes 15/12/9") {
  rng::Stream st(11);
  const PcaInstance inst = make_pca_instance(PcaModel::I, 3, 30, st);
  CHECK(inst.u_true.rows() == 30);
  CHECK(inst.u_true.cols() == 3);
  CHECK(testsup::max_abs_diff(kernels::gram(inst.u_true), Matrix::identity(3)) < 1e-12);
  CHECK(nonzero_rows(inst.u_true) == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});

  const Matrix sigma = population_sigma(inst);
  const auto eig = linalg::sym_eig(sigma);
  CHECK(eig.values[0] + eig.values[1] + eig.values[2] ==
        doctest::Approx(15.0 + 12.0 + 9.0 + 3.0).epsilon(1e-9));
  for (int i = 3; i < 30; ++i) CHECK(eig.values[i] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("pca model II: disjoint five-row blocks reconstruct sigma exactly") {
  rng::Stream st(12);
  const PcaInstance inst = make_pca_instance(PcaModel::II, 3, 25, st);
  const std::vector<int> rows = nonzero_rows(inst.u_true);
  REQUIRE(rows.size() == 15);
  for (int i = 0; i < 15; ++i) CHECK(rows[static_cast<size_t>(i)] == i);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 25; ++i) {
      const bool in_block = i >= 5 * j && i < 5 * (j + 1);
      if (in_block)
        CHECK(std::fabs(inst.u_true(i, j)) == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-12));
      else
        CHECK(std::fabs(inst.u_true(i, j)) < 1e-12);
    }

  // Sigma = U diag(15, 12, 9) U^T + I, recoverable from u_true because the
  // blocks are exactly orthonormal.
  Matrix w = inst.u_true;
  const double spikes[3] = {15.0, 12.0, 9.0};
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 25; ++i) w(i, j) *= std::sqrt(spikes[j]);
  Matrix expect = kernels::matmul_nt(w, w);
  for (int i = 0; i < 25; ++i) expect(i, i) += 1.0;
  CHECK(testsup::max_abs_diff(population_sigma(inst), expect) < 1e-9);

  const auto eig = linalg::sym_eig(population_sigma(inst));
  CHECK(eig.values[0] == doctest::Approx(16.0).epsilon(1e-9));
  CHECK(eig.values[1] == doctest::Approx(13.0).epsilon(1e-9));
  CHECK(eig.values[2] == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(eig.values[3] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("pca model III: fifteen rows with overlapping columns") {
  rng::Stream st(13);
  const PcaInstance inst = make_pca_instance(PcaModel::III, 3, 40, st);
  const std::vector<int> rows = nonzero_rows(inst.u_true);
  REQUIRE(rows.size() == 15);
  CHECK(testsup::max_abs_diff(kernels::gram(inst.u_true), Matrix::identity(3)) < 1e-12);
  // the first column loads every active row, so blocks overlap
  CHECK(std::fabs(inst.u_true(7, 0)) > 1e-3);
  CHECK(std::fabs(inst.u_true(12, 0)) > 1e-3);
}

TEST_CASE("make_pca_instance validation") {
  rng::Stream st(14);
  CHECK_THROWS_AS(make_pca_instance(PcaModel::I, 0, 30, st), Error);
  CHECK_THROWS_AS(make_pca_instance(PcaModel::I, 6, 30, st), Error);
  CHECK_THROWS_AS(make_pca_instance(PcaModel::II, 3, 14, st), Error);  // needs p >= 15
}

TEST_CASE("sampled covariance converges to the population sigma") {
  rng::Stream st(15);
  const PcaInstance inst = make_pca_instance(PcaModel::I, 3, 20, st);
  const Matrix sigma = population_sigma(inst);
  const Matrix x = sample_gaussian_rows(inst.sigma_chol, 50000, st);
  const Matrix cov = pca_pair(x).a;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j)
      CHECK(std::fabs(cov(i, j) - sigma(i, j)) < 0.05 * (1.0 + std::fabs(sigma(i, j))));
}

TEST_CASE("gaussian sampling is a pure function of the stream") {
  rng::Stream a(77), b(77), c(78);
  const Matrix chol = Matrix::identity(4);
  const Matrix xa = sample_gaussian_rows(chol, 6, a);
  const Matrix xb = sample_gaussian_rows(chol, 6, b);
  CHECK(xa == xb);
  CHECK_FALSE(xa == sample_gaussian_rows(chol, 6, c));

  rng::Stream r0 = rng::Stream::for_repetition(99, 0);
  rng::Stream r1 = rng::Stream::for_repetition(99, 1);
  CHECK_FALSE(sample_gaussian_rows(chol, 6, r0) == sample_gaussian_rows(chol, 6, r1));
}

TEST_CASE("lda model I: identity covariance, means on the first five coordinates") {
  const LdaInstance inst = make_lda_instance(LdaModel::I, 12);
  CHECK(inst.k == 3);
  CHECK(inst.means.rows() == 3);
  CHECK(inst.means.cols() == 12);
  const double v1[5] = {2, 1, 2, 1, 2};
  const double v2[5] = {1, -1, 1, -1, 1};
  const double v3[5] = {0, 1, -1, 1, 0};
  for (int j = 0; j < 12; ++j) {
    CHECK(inst.means(0, j) == (j < 5 ? v1[j] : 0.0));
    CHECK(inst.means(1, j) == (j < 5 ? v2[j] : 0.0));
    CHECK(inst.means(2, j) == (j < 5 ? v3[j] : 0.0));
  }
  CHECK(testsup::max_abs_diff(population_sigma({inst.means, inst.sigma_chol}),
                              Matrix::identity(12)) < 1e-12);

  CHECK(inst.u_true.cols() == 2);
  CHECK(testsup::max_abs_diff(kernels::gram(inst.u_true), Matrix::identity(2)) < 1e-10);
  for (int i = 5; i < 12; ++i)
    for (int j = 0; j < 2; ++j) CHECK(std::fabs(inst.u_true(i, j)) < 1e-8);
}

TEST_CASE("lda model II: compound-symmetry covariance spectrum") {
  const int p = 10;
  const LdaInstance inst = make_lda_instance(LdaModel::II, p);
  const Matrix sigma = kernels::matmul_nt(inst.sigma_chol, inst.sigma_chol);
  const auto eig = linalg::sym_eig(sigma);
  CHECK(eig.values[0] == doctest::Approx(1.0 + 0.5 * (p - 1)).epsilon(1e-10));
  for (int i = 1; i < p; ++i) CHECK(eig.values[i] == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("lda model V: four classes, fourth mean is the average of the others") {
  const LdaInstance inst = make_lda_instance(LdaModel::V, 15);
  CHECK(inst.k == 4);
  for (int j = 0; j < 15; ++j) {
    const double avg = (inst.means(0, j) + inst.means(1, j) + inst.means(2, j)) / 3.0;
    CHECK(inst.means(3, j) == doctest::Approx(avg).epsilon(1e-12));
  }
  // model V doubles the model IV mean directions
  const LdaInstance iv = make_lda_instance(LdaModel::IV, 15);
  for (int j = 0; j < 15; ++j)
    CHECK(inst.means(0, j) == doctest::Approx(2.0 * iv.means(0, j)).epsilon(1e-12));
  CHECK(inst.u_true.cols() == 2);  // still a rank-2 discriminant space
}

TEST_CASE("sample_lda layout and determinism") {
  const LdaInstance inst = make_lda_instance(LdaModel::I, 8);
  rng::Stream a(5), b(5);
  const LabeledData da = sample_lda(inst, 4, a);
  CHECK(da.x.rows() == 12);
  CHECK(da.y.size() == 12);
  for (int i = 0; i < 12; ++i) CHECK(da.y[static_cast<size_t>(i)] == 1.0 + i / 4);
  CHECK(da.x == sample_lda(inst, 4, b).x);
}

TEST_CASE("taichi sample matches its analytic moments") {
  rng::Stream st(314);
  const int n = 200000, p = 4;
  const LabeledData data = gen_taichi(n, p, st);

  int yin = 0, inner_half = 0;
  double sx1 = 0.0, sx2 = 0.0, snoise = 0.0, snoise2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x1 = data.x(i, 0), x2 = data.x(i, 1);
    CHECK(x1 * x1 + x2 * x2 <= 4.0 + 1e-12);
    if (x1 * x1 + x2 * x2 <= 2.0) ++inner_half;
    if (data.y[static_cast<size_t>(i)] == 1.0) {
      ++yin;
      sx1 += x1;
      sx2 += x2;
    }
    snoise += data.x(i, 3);
    snoise2 += data.x(i, 3) * data.x(i, 3);
  }
  const double frac = static_cast<double>(yin) / n;
  CHECK(std::fabs(frac - 0.5) < 0.01);                          // balanced classes
  CHECK(std::fabs(sx1 / yin - 2.0 / 3.14159265358979) < 0.02);  // E[x1 | yin] = 2/pi
  CHECK(std::fabs(sx2 / yin + 7.0 / 16.0) < 0.02);              // E[x2 | yin] = -7/16
  CHECK(std::fabs(static_cast<double>(inner_half) / n - 0.5) < 0.01);  // uniform in r^2
  CHECK(std::fabs(snoise / n) < 0.02);
  CHECK(std::fabs(snoise2 / n - 1.0) < 0.05);

  CHECK_THROWS_AS(gen_taichi(10, 1, st), Error);
}

TEST_CASE("classify_lda separates separated clusters") {
  LabeledData train;
  train.x = Matrix::from_rows(6, 2, {0, 0, 1, 0, 0, 1, 10, 10, 11, 10, 10, 11});
  train.y = {1, 1, 1, 2, 2, 2};
  LabeledData test;
  test.x = Matrix::from_rows(4, 2, {0.5, 0.5, -1, 0, 10.5, 10.5, 12, 11});
  test.y = {1, 1, 2, 2};
  const ClassifyResult res = classify_lda(train, test);
  CHECK(res.error_rate == 0.0);
  CHECK_FALSE(res.ridged);
  CHECK(res.predicted == std::vector<double>{1, 1, 2, 2});
}

TEST_CASE("classify_lda ridges a singular pooled covariance") {
  LabeledData train;
  train.x = Matrix::from_rows(6, 2, {0, 0, 1, 0, 2, 0, 10, 5, 11, 5, 12, 5});
  train.y = {0, 0, 0, 1, 1, 1};  // no within-class spread along x2
  LabeledData test;
  test.x = Matrix::from_rows(2, 2, {1, 0, 11, 5});
  test.y = {0, 1};
  const ClassifyResult res = classify_lda(train, test);
  CHECK(res.ridged);
  CHECK(res.error_rate == 0.0);

  LabeledData bad = train;
  bad.y.pop_back();
  CHECK_THROWS_AS(classify_lda(bad, test), Error);
}

TEST_CASE("run_experiment aggregates its repetitions") {
  ExperimentSpec spec;
  spec.family = ExperimentSpec::Family::Pca;
  spec.model = 2;
  spec.method = Method::FastPoi;
  spec.penalty = PenaltyKind::GroupRow;
  spec.d = 2;
  spec.p = 12;
  spec.n_train = 60;
  spec.n_tune = 60;
  spec.repetitions = 3;
  spec.seed = 4242;
  spec.grid_len = 8;

  const ExperimentReport rep = run_experiment(spec);
  REQUIRE(rep.repetitions.size() == 3);
  CHECK(rep.ok_count == 3);
  double mean = 0.0;
  for (const RepetitionResult& r : rep.repetitions) {
    CHECK(r.ok);
    CHECK(std::isfinite(r.min_distance));
    CHECK(r.min_distance <= r.cv_distance + 1e-15);
    CHECK(std::isnan(r.misclass_rate));  // no classifier outside the lda family
    CHECK(r.support_size >= r.true_positives);
    mean += r.min_distance / 3.0;
  }
  CHECK(rep.min_distance.mean == doctest::Approx(mean).epsilon(1e-14));
  CHECK(std::isnan(rep.misclass_rate.mean));

  const nlohmann::json j = nlohmann::json::parse(rep.to_json());
  CHECK(j["spec"]["family"] == "pca");
  CHECK(j["spec"]["seed"] == 4242);
  CHECK(j["aggregate"]["repetitions_ok"] == 3);
  CHECK(j["repetitions"].size() == 3);
  CHECK(j["repetitions"][0]["misclass_rate"].is_null());  // NaN serializes as null

  const std::string csv = rep.to_csv();
  int lines = 0;
  for (char c : csv)
    if (c == '\n') ++lines;
  CHECK(lines == 3 + 2);  // header, one row per repetition, aggregate
  CHECK(csv.rfind("rep,ok,min_distance", 0) == 0);
  CHECK(csv.find("\naggregate,3,") != std::string::npos);
}

TEST_CASE("lda experiment reports a misclassification rate") {
  ExperimentSpec spec;
  spec.family = ExperimentSpec::Family::Lda;
  spec.model = 1;
  spec.method = Method::FastPoi;
  spec.penalty = PenaltyKind::GroupRow;
  spec.d = 2;
  spec.p = 10;
  spec.n_train = 20;
  spec.n_tune = 20;
  spec.n_test = 40;
  spec.repetitions = 2;
  spec.seed = 777;
  spec.grid_len = 8;

  const ExperimentReport rep = run_experiment(spec);
  CHECK(rep.ok_count == 2);
  CHECK(std::isfinite(rep.misclass_rate.mean));
  CHECK(rep.misclass_rate.mean >= 0.0);
  CHECK(rep.misclass_rate.mean < 0.5);  // three well-separated classes
}

TEST_CASE("taichi experiment skips cross-validation") {
  ExperimentSpec spec;
  spec.family = ExperimentSpec::Family::TaiChi;
  spec.method = Method::Poi;
  spec.penalty = PenaltyKind::GroupRow;
  spec.d = 1;
  spec.p = 8;
  spec.n_train = 400;
  spec.repetitions = 2;
  spec.seed = 99;

  const ExperimentReport rep = run_experiment(spec);
  CHECK(rep.ok_count == 2);
  CHECK(std::isnan(rep.cv_distance.mean));
  CHECK(rep.selected_lambda.mean > 0.0);
  for (const RepetitionResult& r : rep.repetitions) CHECK(std::isnan(r.cv_distance));
}

TEST_CASE("reports are byte-identical for any thread count") {
  ExperimentSpec spec;
  spec.family = ExperimentSpec::Family::Pca;
  spec.model = 1;
  spec.method = Method::Poi;
  spec.penalty = PenaltyKind::ElementLasso;
  spec.d = 2;
  spec.p = 15;
  spec.n_train = 40;
  spec.n_tune = 40;
  spec.repetitions = 4;
  spec.seed = 1234;
  spec.grid_len = 6;

  threads::set_count_for_testing(1);
  const ExperimentReport serial = run_experiment(spec);
  threads::set_count_for_testing(4);
  const ExperimentReport parallel = run_experiment(spec);
  threads::set_count_for_testing(0);

  CHECK(serial.to_json() == parallel.to_json());
  CHECK(serial.to_csv() == parallel.to_csv());
}

TEST_CASE("spec round trips through kv and json") {
  ExperimentSpec spec;
  spec.family = ExperimentSpec::Family::Lda;
  spec.model = 4;
  spec.method = Method::FastPoi;
  spec.penalty = PenaltyKind::ElementLasso;
  spec.d = 2;
  spec.p = 123;
  spec.n_train = 31;
  spec.n_tune = 32;
  spec.n_test = 33;
  spec.repetitions = 7;
  spec.seed = 987654321;
  spec.grid_ratio = 0.6;
  spec.grid_len = 12;

  const std::string kv = spec_to_kv(spec);
  CHECK(spec_to_kv(spec_from_kv(kv)) == kv);
  const std::string js = spec_to_json(spec);
  CHECK(spec_to_json(spec_from_json(js)) == js);

  // comments and blank lines are fine; unknown keys and bad values are not
  const ExperimentSpec partial = spec_from_kv("# comment\n\nd = 4\nmethod = fastpoi\n");
  CHECK(partial.d == 4);
  CHECK(partial.method == Method::FastPoi);
  CHECK(partial.p == 200);  // untouched fields keep their defaults
  CHECK_THROWS_AS(spec_from_kv("banana = 3\n"), Error);
  CHECK_THROWS_AS(spec_from_kv("d = banana\n"), Error);
  CHECK_THROWS_AS(spec_from_kv("d 4\n"), Error);
  CHECK_THROWS_AS(spec_from_json("[1, 2]"), Error);
  CHECK_THROWS_AS(spec_from_json("{\"d\": true}"), Error);

  ExperimentSpec bad;
  bad.repetitions = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
}
