#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <memory>
#include <span>
#include <vector>

namespace steklov {

using Vector = Eigen::VectorXd;

struct Triplet {
  int row;
  int col;
  double value;
};

/// Compressed sparse row matrix holding symmetric content in full (both
/// triangles). Column indices are sorted per row with no duplicates.
class SparseSymMatrix {
public:
  SparseSymMatrix() = default;
  /// Takes ownership of CSR arrays; validates shape and sortedness.
  SparseSymMatrix(int dim, std::vector<int> row_ptr, std::vector<int> col_idx,
                  std::vector<double> values);

  /// Duplicates are summed. Structural symmetry is required; the caller
  /// supplies both (i,j) and (j,i).
  static SparseSymMatrix from_triplets(int dim, std::span<const Triplet> entries);
  static SparseSymMatrix identity(int dim);

  int dim() const { return dim_; }
  std::size_t nnz() const { return values_.size(); }
  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Stored value at (i, j), zero when structurally absent.
  double coeff(int i, int j) const;
  /// Position of (i, j) in the value array, or -1.
  std::ptrdiff_t find(int i, int j) const;
  /// x^T A y.
  double bilinear(const Vector& x, const Vector& y) const;
  double quadratic(const Vector& x) const { return bilinear(x, x); }
  /// Maximum absolute column sum.
  double norm1() const;
  Eigen::MatrixXd to_dense() const;

private:
  int dim_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_idx_;
  std::vector<double> values_;
};

Vector matvec(const SparseSymMatrix& a, const Vector& x);

/// a + alpha * b, merging sparsity patterns.
SparseSymMatrix add_scaled(const SparseSymMatrix& a, double alpha, const SparseSymMatrix& b);

/// Coordinate text dump, one "i j value" line per stored entry.
void dump_matrix(const SparseSymMatrix& a, const std::filesystem::path& path);

enum class SpdMethod { direct, conjugate_gradient };

/// Every tolerance the linear-algebra and eigensolver layers use.
struct SolverTolerances {
  double eig_residual = 1e-10;
  double cluster_rel_gap = 1e-8;
  /// Coarse eigensolve expansion cap is coarse_steps_per_eig * count + coarse_steps_base.
  int coarse_steps_per_eig = 5;
  int coarse_steps_base = 50;
  int shift_invert_max_restarts = 3;
  /// Lanczos vectors built per shift-invert cycle before the convergence test
  /// (ARPACK's default subspace size for a single eigenpair).
  int shift_invert_basis_size = 20;
  int shift_retries = 3;
  double shift_retry_scale = 1e-8;
  /// Pivots below this fraction of the largest pivot count as singular.
  double singular_pivot_rel = 1e-14;
  SpdMethod spd_method = SpdMethod::direct;
  double cg_rel_tol = 1e-10;
  int cg_max_iter_factor = 10;
};

struct CgResult {
  Vector x;
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

/// Jacobi-preconditioned conjugate gradients.
CgResult cg_solve(const SparseSymMatrix& a, const Vector& b, double rel_tol, int max_iter);

/// Factored (or, for the CG kind, wrapped) matrix ready for repeated solves.
/// Immutable after construction; solve() may be called concurrently.
class Factorization {
public:
  enum class Kind { spd, symmetric_indefinite, conjugate_gradient };

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  /// Shift actually factored (after perturbation retries); 0 for SPD.
  double shift() const { return shift_; }
  int retries() const { return retries_; }
  /// Number of negative pivots, i.e. the inertia of the factored matrix.
  int negative_pivots() const { return negative_pivots_; }

  Vector solve(const Vector& b) const;

private:
  friend Factorization factor_spd(const SparseSymMatrix&, const SolverTolerances&);
  friend Factorization factor_shifted(const SparseSymMatrix&, const SparseSymMatrix&, double,
                                      const SolverTolerances&);
  struct Impl;

  Kind kind_ = Kind::spd;
  int dim_ = 0;
  double shift_ = 0.0;
  int retries_ = 0;
  int negative_pivots_ = 0;
  std::shared_ptr<const Impl> impl_;
};

/// Throws NotSpdError on a non-positive pivot.
Factorization factor_spd(const SparseSymMatrix& a, const SolverTolerances& tol = {});

/// LDL^T of K - sigma*M. On a singular pivot, retries sigma*(1 + scale*j)
/// for j = 1..retries, then throws ShiftSingularError.
Factorization factor_shifted(const SparseSymMatrix& k, const SparseSymMatrix& m, double sigma,
                             const SolverTolerances& tol = {});

} // namespace steklov
