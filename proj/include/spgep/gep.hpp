#pragma once

#include <cstdint>
#include <utility>

#include "spgep/linalg.hpp"
#include "spgep/matrix.hpp"
#include "spgep/penalty.hpp"

namespace spgep {

// Symmetric pencil (A, B) with B made positive definite on construction.
struct GepPair {
  Matrix a;
  Matrix b;
  bool regularized = false;  // true when a ridge was added to B
  double epsilon_used = 0.0;

  int dim() const { return a.rows(); }

  // Validates shapes/finiteness, symmetrizes (rejecting asymmetry beyond
  // 1e-8 relative), then passes B through regularize_b.
  static GepPair make(Matrix a, Matrix b);
  static GepPair with_identity_b(Matrix a);
};

// Returns (B + eps I, eps). eps = 0 when B is already positive definite;
// otherwise eps = min(log(p) / rank(B), sigma_min_pos / 2) where rank and the
// smallest positive eigenvalue use the threshold 1e-10 * largest eigenvalue.
// Eigenvalues below -1e-8 * ||B||_2 reject the input; rank 0 is an error.
std::pair<Matrix, double> regularize_b(const Matrix& b);

enum class Method { Poi, FastPoi };

enum class InitKind { TopEigvecsOfA, Given, RandomOrtho };

struct OuterConfig {
  int max_outer = 100;
  double outer_tol = 1e-5;  // projection distance between consecutive bases
  InitKind init = InitKind::TopEigvecsOfA;
  Matrix q0;                // initial basis when init == Given
  uint64_t seed = 0;        // RNG seed when init == RandomOrtho
  InnerSolveConfig inner{};
  double support_tol = 1e-8;

  // Optional precomputed sym_eig(A); lets callers fitting many penalty levels
  // on one pair skip repeating the eigendecomposition. Purely a cache: results
  // are identical with or without it.
  const linalg::EigResult* eig_a = nullptr;
};

struct SubspaceEstimate {
  Matrix q;                  // p x d orthonormal basis of the estimated span
  Matrix u;                  // recovered eigenvectors, U^T B U = I
  Vector eigenvalues;        // descending
  std::vector<int> support;  // 0-based indices of rows with ||q_row|| > support_tol
  double lambda = 0.0;
  int outer_iters = 0;
  bool converged = false;
  bool padded = false;       // rank-deficient iterate was padded from eigvecs of A
};

// Penalized orthogonal iteration: alternate the penalized linear solve
// against M = A Q with a QR re-orthonormalization until the span settles.
SubspaceEstimate poi(const GepPair& pair, int d, const PenaltySpec& pen,
                     const OuterConfig& cfg = {});

// One-shot variant: single penalized solve against M = V, the top-d
// eigenvectors of A, followed by QR.
SubspaceEstimate fast_poi(const GepPair& pair, int d, const PenaltySpec& pen,
                          const OuterConfig& cfg = {});

// Smallest penalty level at which the inner solve returns the zero matrix
// (exact for ElementLasso and for GroupRow under FastPoi; an upper bound for
// GroupRow under Poi). For Method::Poi pass A; for Method::FastPoi pass V.
double lambda_max(const Matrix& a_or_v, PenaltyKind kind, Method method, int d);
double lambda_max(const GepPair& pair, PenaltyKind kind, Method method, int d);

// Rotation fix-up: solves the compressed d x d pencil (Q^T A Q, Q^T B Q) and
// maps the result back, giving B-orthonormal eigenvector estimates and
// descending eigenvalue estimates.
std::pair<Matrix, Vector> recover_pair(const Matrix& q, const GepPair& pair);

// Per-column least-squares eigenvalue estimates (B u_j) \ (A u_j).
Vector eigenvalues_ls(const Matrix& u, const GepPair& pair);

// Per-column Rayleigh quotients u_j^T A u_j / u_j^T B u_j.
Vector eigenvalues_rayleigh(const Matrix& u, const GepPair& pair);

}  // namespace spgep
