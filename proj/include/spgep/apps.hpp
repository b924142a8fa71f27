#pragma once

#include "spgep/gep.hpp"

namespace spgep {

// Rows of x are observations; y holds one label (or response) per row.
struct LabeledData {
  Matrix x;
  Vector y;
};

// Principal components: A = sample covariance (n-1 divisor), B = identity.
// gram_scaling swaps A for the centered cross-product X^T X (no divisor),
// the form the cross-validation score expects on held-out data.
GepPair pca_pair(const Matrix& x, bool gram_scaling = false);

// Discriminant pencil: A = between-class scatter (divisor n), B = pooled
// within-class covariance (divisor n - K), ridge-regularized when singular.
// Labels group by exact value; every class needs at least 2 members.
GepPair lda_pair(const LabeledData& data);

enum class SliceKind { Auto, Discrete, Continuous };

// Inverse-regression pencil: A = between-slice scatter of slice means
// (weights n_h / n), B = covariance of x. Discrete responses slice by class;
// continuous ones by quantile bins (empty bins merge into a neighbor). Auto
// treats y as discrete when it has at most n_slices distinct values.
GepPair sir_pair(const LabeledData& data, int n_slices, SliceKind kind = SliceKind::Auto);

struct CcaPairs {
  GepPair x_side;  // p-dimensional pencil, eigenvectors weight x columns
  GepPair y_side;  // q-dimensional pencil, eigenvectors weight y columns
};

// Canonical correlation pencils on column-standardized data. The default
// identity variant uses (C12 C12^T, I_p) and (C12^T C12, I_q) with C12 the
// cross-correlation matrix; identity_variant = false substitutes the
// covariance-weighted pencils (C12 S2^{-1} C21, S1) and its mirror, with the
// inner covariances regularized before inversion.
CcaPairs cca_pairs(const Matrix& x, const Matrix& y, bool identity_variant = true);

// Column-standardizes in place (center, unit n-1 variance); throws on a
// zero-variance column. Exposed for reuse by the cca tests.
void standardize_columns(Matrix& x);

}  // namespace spgep
