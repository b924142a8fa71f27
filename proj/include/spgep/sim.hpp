#pragma once

#include <cstdint>
#include <string>

#include "spgep/apps.hpp"
#include "spgep/rng.hpp"
#include "spgep/tuning.hpp"

namespace spgep::sim {

// ---- synthetic data generators -------------------------------------------

enum class PcaModel { I = 1, II = 2, III = 3 };

// Population: Sigma = U diag(lambda) U^T + I with lambda_j = 3(5-j+1), so up
// to 5 spikes. Model I: one shared block of 10 rows, each column an
// independently drawn unit vector on it. Model II: d disjoint blocks of 5
// rows, constant loading 5^{-1/2}. Model III: d blocks of 5 rows carrying an
// orthonormalized lower-triangular pattern, so columns overlap.
struct PcaInstance {
  Matrix u_true;      // p x d, column-orthonormalized span of the spike
  Matrix sigma_chol;  // lower Cholesky factor of the population covariance
};

PcaInstance make_pca_instance(PcaModel model, int d, int p, rng::Stream& rng);

// n rows drawn from N(0, L L^T).
Matrix sample_gaussian_rows(const Matrix& chol_lower, int n, rng::Stream& rng);

struct PcaSample {
  Matrix x;
  Matrix u_true;
};
PcaSample gen_pca(PcaModel model, int d, int p, int n, rng::Stream& rng);

enum class LdaModel { I = 1, II = 2, III = 3, IV = 4, V = 5 };

// Gaussian mixture with shared covariance; class means live on the first 5
// coordinates. The true discriminant subspace always has dimension 2, also
// for the K = 4 variant (model V), whose fourth mean is the average of the
// other three.
struct LdaInstance {
  int k = 0;
  Matrix means;       // k x p
  Matrix sigma_chol;  // lower Cholesky factor of the shared covariance
  Matrix u_true;      // p x 2, orthonormal
};

LdaInstance make_lda_instance(LdaModel model, int p);
LabeledData sample_lda(const LdaInstance& inst, int n_per_class, rng::Stream& rng);

struct LdaSample {
  LabeledData data;
  Matrix u_true;
};
LdaSample gen_lda(LdaModel model, int p, int n_per_class, rng::Stream& rng);

// Binary response determined by the first two coordinates, which are uniform
// on the disk of radius 2; remaining coordinates are standard normal noise.
// The label-1 ("yin") region is the classic taijitu: the unit circle at
// (0, 1) is entirely label 0 except for a label-1 eye of radius 1/4 at its
// center, the unit circle at (0, -1) is entirely label 1 except for a label-0
// eye, and everything else splits at x1 > 0. Classes are balanced in
// expectation, E[x1 | yin] = 2/pi, E[x2 | yin] = -7/16, and the informative
// subspace is span(e1, e2).
LabeledData gen_taichi(int n, int p, rng::Stream& rng);

// ---- reduced-space classification ----------------------------------------

struct ClassifyResult {
  std::vector<double> predicted;  // one training-class label per test row
  double error_rate = 0.0;
  bool ridged = false;  // pooled covariance needed a ridge to factor
};

// Standard linear discriminant classifier fit on (train.x, train.y) with
// class-frequency priors and pooled covariance (n - K divisor), evaluated on
// test. A singular pooled covariance falls back once to a ridge of
// 1e-8 * trace / d before giving up.
ClassifyResult classify_lda(const LabeledData& train, const LabeledData& test);

// ---- experiment harness ----------------------------------------------------

struct ExperimentSpec {
  enum class Family { Pca, Lda, TaiChi };
  Family family = Family::Pca;
  int model = 1;
  Method method = Method::Poi;
  PenaltyKind penalty = PenaltyKind::GroupRow;
  int d = 3;
  int p = 200;
  int n_train = 100;  // per class for Lda; total otherwise
  int n_tune = 100;
  int n_test = 0;     // per class; only used by Lda
  int repetitions = 30;
  uint64_t seed = 20240601;
  double grid_ratio = 0.75;
  int grid_len = 31;

  void validate() const;
};

struct RepetitionResult {
  int rep = 0;
  bool ok = false;
  std::string error;
  double min_distance = 0.0;    // best distance to truth over the whole grid
  double cv_distance = 0.0;     // distance at the cross-validated level
  double selected_lambda = 0.0;
  int support_size = 0;
  int true_positives = 0;
  int false_positives = 0;
  double misclass_rate = 0.0;   // NaN outside the Lda family
};

struct MetricSummary {
  double mean = 0.0;
  double se = 0.0;
};

struct ExperimentReport {
  ExperimentSpec spec;
  std::vector<RepetitionResult> repetitions;
  int ok_count = 0;
  MetricSummary min_distance, cv_distance, selected_lambda, support_size,
      true_positives, false_positives, misclass_rate;

  std::string to_json() const;
  std::string to_csv() const;
};

// Runs every repetition on its own RNG substream (repetitions are
// independent and execute in parallel; reports are byte-identical for a
// fixed spec regardless of thread count). Per-repetition failures are
// recorded, not thrown. The taichi family fits once per repetition at
// lambda_max / 2 instead of cross-validating, and ignores n_tune / n_test.
ExperimentReport run_experiment(const ExperimentSpec& spec);

const char* family_name(ExperimentSpec::Family f);

// Plain-text round trip: one "key = value" per line, all keys optional,
// unknown keys rejected. The JSON form accepts/produces a flat object with
// the same keys.
std::string spec_to_kv(const ExperimentSpec& spec);
ExperimentSpec spec_from_kv(const std::string& text);
std::string spec_to_json(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(const std::string& text);

}  // namespace spgep::sim
