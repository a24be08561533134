#pragma once

#include "steklov/assembly.hpp"
#include "steklov/mesh.hpp"
#include "steklov/sparse.hpp"

#include <vector>

namespace steklov {

/// Discrete eigenpair with ||u||_a = 1.
struct DiscreteEigenpair {
  double lambda = 0.0;
  Vector coeffs;
  /// ||K u - lambda M u||_2 / ||K u||_2.
  double residual = 0.0;
  /// Linear solves spent producing this pair.
  int linear_solves = 0;
};

/// a-orthonormal eigenpairs in ascending lambda.
struct EigenBasis {
  std::vector<DiscreteEigenpair> pairs;

  std::size_t size() const { return pairs.size(); }
  const DiscreteEigenpair& operator[](std::size_t i) const { return pairs[i]; }
};

/// Indices (0-based) of the eigenvalues clustered with pairs[index] and their mean.
struct Cluster {
  int first = 0;
  int last = 0; // inclusive
  double mean_lambda = 0.0;

  int multiplicity() const { return last - first + 1; }
};

/// Eigenvalues within rel_gap of pairs[index].lambda, grown contiguously.
Cluster find_cluster(const EigenBasis& basis, int index, double rel_gap);

/// Smallest `count` eigenvalues of K u = lambda M u.
///
/// Block Krylov iteration on f -> K^{-1} M f in the a-inner product (where the
/// map is self-adjoint) with full reorthogonalization and explicit
/// Rayleigh-Ritz, restarted with the wanted Ritz vectors when the basis is
/// full. The largest Ritz values mu give lambda = 1/mu.
EigenBasis solve_coarse(const FormPair& forms, int count, const SolverTolerances& tol = {});

/// Eigenpair whose eigenvalue is closest to sigma (shift-invert Krylov from `start`).
DiscreteEigenpair solve_nearest(const FormPair& forms, double sigma, const Vector& start,
                                const SolverTolerances& tol = {});

/// One solve of (K - shift M) u = M start, normalized in the a-norm, with its
/// Rayleigh quotient.
DiscreteEigenpair shifted_inverse_step(const FormPair& forms, double shift, const Vector& start,
                                       const SolverTolerances& tol = {});

/// One solve of K u = M start, normalized in the a-norm, with its Rayleigh quotient.
DiscreteEigenpair inverse_step(const FormPair& forms, const Vector& start,
                               const SolverTolerances& tol = {});

/// (u^T K u) / (u^T M u). Throws BoundaryNullError when u^T M u = 0.
double rayleigh_quotient(const FormPair& forms, const Vector& u);

/// ||K u - lambda M u|| / ||K u||.
double eigen_residual(const FormPair& forms, double lambda, const Vector& u);

/// P1 interpolation of coarse coefficients onto a mesh obtained from `coarse`
/// by bisection.
Vector prolong(const TriangleMesh& coarse, const TriangleMesh& fine, const Vector& coarse_coeffs);

/// Flips u so that its boundary mean 1^T M u is nonnegative; when that mean
/// vanishes, the largest-magnitude entry is made positive.
void apply_sign_convention(const FormPair& forms, Vector& u);

} // namespace steklov
