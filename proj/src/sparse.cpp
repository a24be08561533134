#include "steklov/sparse.hpp"

#include "steklov/errors.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <string>

namespace steklov {

// ---------------------------------------------------------------------------
// SparseSymMatrix
// ---------------------------------------------------------------------------

SparseSymMatrix::SparseSymMatrix(int dim, std::vector<int> row_ptr, std::vector<int> col_idx,
                                 std::vector<double> values)
    : dim_(dim), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (dim_ < 0 || row_ptr_.size() != static_cast<std::size_t>(dim_) + 1 || row_ptr_.front() != 0 ||
      static_cast<std::size_t>(row_ptr_.back()) != col_idx_.size() ||
      col_idx_.size() != values_.size())
    throw DimensionError("inconsistent CSR arrays");
  for (int i = 0; i < dim_; ++i) {
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
      const int j = col_idx_[p];
      if (j < 0 || j >= dim_) throw DimensionError("column index out of range");
      if (p > row_ptr_[i] && col_idx_[p - 1] >= j)
        throw DimensionError("column indices must be strictly increasing within a row");
    }
  }
  for (int i = 0; i < dim_; ++i)
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      if (find(col_idx_[p], i) < 0)
        throw DimensionError("matrix is not structurally symmetric at (" + std::to_string(i) +
                             "," + std::to_string(col_idx_[p]) + ")");
}

SparseSymMatrix SparseSymMatrix::from_triplets(int dim, std::span<const Triplet> entries) {
  std::vector<Triplet> sorted(entries.begin(), entries.end());
  for (const Triplet& t : sorted)
    if (t.row < 0 || t.row >= dim || t.col < 0 || t.col >= dim)
      throw DimensionError("triplet index out of range");
  std::sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<int> row_ptr(dim + 1, 0);
  std::vector<int> cols;
  std::vector<double> vals;
  for (std::size_t s = 0; s < sorted.size(); ++s) {
    if (!cols.empty() && s > 0 && sorted[s].row == sorted[s - 1].row &&
        sorted[s].col == sorted[s - 1].col) {
      vals.back() += sorted[s].value;
      continue;
    }
    cols.push_back(sorted[s].col);
    vals.push_back(sorted[s].value);
    ++row_ptr[sorted[s].row + 1];
  }
  for (int i = 0; i < dim; ++i) row_ptr[i + 1] += row_ptr[i];
  return SparseSymMatrix(dim, std::move(row_ptr), std::move(cols), std::move(vals));
}

SparseSymMatrix SparseSymMatrix::identity(int dim) {
  std::vector<int> row_ptr(dim + 1);
  std::vector<int> cols(dim);
  for (int i = 0; i <= dim; ++i) row_ptr[i] = i;
  for (int i = 0; i < dim; ++i) cols[i] = i;
  return SparseSymMatrix(dim, std::move(row_ptr), std::move(cols), std::vector<double>(dim, 1.0));
}

std::ptrdiff_t SparseSymMatrix::find(int i, int j) const {
  const auto first = col_idx_.begin() + row_ptr_[i];
  const auto last = col_idx_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return -1;
  return it - col_idx_.begin();
}

double SparseSymMatrix::coeff(int i, int j) const {
  const auto p = find(i, j);
  return p < 0 ? 0.0 : values_[p];
}

double SparseSymMatrix::bilinear(const Vector& x, const Vector& y) const {
  if (x.size() != dim_ || y.size() != dim_) throw DimensionError("bilinear: dimension mismatch");
  double sum = 0.0;
  for (int i = 0; i < dim_; ++i) {
    double row = 0.0;
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) row += values_[p] * y[col_idx_[p]];
    sum += x[i] * row;
  }
  return sum;
}

double SparseSymMatrix::norm1() const {
  // Symmetric: column sums equal row sums.
  double best = 0.0;
  for (int i = 0; i < dim_; ++i) {
    double s = 0.0;
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) s += std::abs(values_[p]);
    best = std::max(best, s);
  }
  return best;
}

Eigen::MatrixXd SparseSymMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) d(i, col_idx_[p]) = values_[p];
  return d;
}

Vector matvec(const SparseSymMatrix& a, const Vector& x) {
  if (x.size() != a.dim()) throw DimensionError("matvec: dimension mismatch");
  Vector y(a.dim());
  const auto& rp = a.row_ptr();
  const auto& ci = a.col_idx();
  const auto& v = a.values();
  for (int i = 0; i < a.dim(); ++i) {
    double s = 0.0;
    for (int p = rp[i]; p < rp[i + 1]; ++p) s += v[p] * x[ci[p]];
    y[i] = s;
  }
  return y;
}

SparseSymMatrix add_scaled(const SparseSymMatrix& a, double alpha, const SparseSymMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionError("add_scaled: dimension mismatch");
  const int n = a.dim();
  std::vector<int> row_ptr(n + 1, 0);
  std::vector<int> cols;
  std::vector<double> vals;
  cols.reserve(a.nnz());
  vals.reserve(a.nnz());
  for (int i = 0; i < n; ++i) {
    int p = a.row_ptr()[i], pe = a.row_ptr()[i + 1];
    int q = b.row_ptr()[i], qe = b.row_ptr()[i + 1];
    while (p < pe || q < qe) {
      const int ja = p < pe ? a.col_idx()[p] : n;
      const int jb = q < qe ? b.col_idx()[q] : n;
      if (ja == jb) {
        cols.push_back(ja);
        vals.push_back(a.values()[p++] + alpha * b.values()[q++]);
      } else if (ja < jb) {
        cols.push_back(ja);
        vals.push_back(a.values()[p++]);
      } else {
        cols.push_back(jb);
        vals.push_back(alpha * b.values()[q++]);
      }
    }
    row_ptr[i + 1] = static_cast<int>(cols.size());
  }
  return SparseSymMatrix(n, std::move(row_ptr), std::move(cols), std::move(vals));
}

void dump_matrix(const SparseSymMatrix& a, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(17);
  for (int i = 0; i < a.dim(); ++i)
    for (int p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p)
      out << i << ' ' << a.col_idx()[p] << ' ' << a.values()[p] << '\n';
}

// ---------------------------------------------------------------------------
// Conjugate gradients
// ---------------------------------------------------------------------------

CgResult cg_solve(const SparseSymMatrix& a, const Vector& b, double rel_tol, int max_iter) {
  if (b.size() != a.dim()) throw DimensionError("cg_solve: dimension mismatch");
  const int n = a.dim();
  Vector inv_diag(n);
  for (int i = 0; i < n; ++i) {
    const double d = a.coeff(i, i);
    if (!(d > 0.0)) throw NotSpdError("cg_solve: non-positive diagonal entry");
    inv_diag[i] = 1.0 / d;
  }
  CgResult result;
  result.x = Vector::Zero(n);
  const double b_norm = b.norm();
  if (b_norm == 0.0) {
    result.converged = true;
    return result;
  }
  Vector r = b;
  Vector z = inv_diag.cwiseProduct(r);
  Vector p = z;
  double rz = r.dot(z);
  for (int it = 1; it <= max_iter; ++it) {
    const Vector ap = matvec(a, p);
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) throw NotSpdError("cg_solve: matrix is not positive definite");
    const double alpha = rz / pap;
    result.x += alpha * p;
    r -= alpha * ap;
    result.iterations = it;
    result.rel_residual = r.norm() / b_norm;
    if (result.rel_residual <= rel_tol) {
      result.converged = true;
      return result;
    }
    z = inv_diag.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Factorizations
// ---------------------------------------------------------------------------

using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Ldlt = Eigen::SimplicialLDLT<EigenSparse, Eigen::Lower, Eigen::AMDOrdering<int>>;

struct Factorization::Impl {
  Ldlt ldlt;
  // Conjugate-gradient kind only.
  SparseSymMatrix matrix;
  double cg_tol = 0.0;
  int cg_max_iter = 0;
};

namespace {

EigenSparse to_eigen(const SparseSymMatrix& a) {
  // Symmetric CSR arrays read as CSC describe the same matrix.
  return Eigen::Map<const EigenSparse>(a.dim(), a.dim(), static_cast<int>(a.nnz()),
                                       a.row_ptr().data(), a.col_idx().data(),
                                       a.values().data());
}

struct PivotSummary {
  bool singular = false;
  int negative = 0;
  double min_abs = 0.0;
};

PivotSummary inspect_pivots(const Ldlt& ldlt, double rel) {
  PivotSummary s;
  if (ldlt.info() != Eigen::Success) {
    s.singular = true;
    return s;
  }
  const Vector d = ldlt.vectorD();
  if (d.size() == 0) return s;
  const double max_abs = d.cwiseAbs().maxCoeff();
  s.min_abs = d.cwiseAbs().minCoeff();
  s.singular = !std::isfinite(max_abs) || !(s.min_abs > rel * max_abs);
  s.negative = static_cast<int>((d.array() < 0.0).count());
  return s;
}

} // namespace

Vector Factorization::solve(const Vector& b) const {
  if (b.size() != dim_) throw DimensionError("solve: dimension mismatch");
  if (kind_ == Kind::conjugate_gradient) {
    CgResult r = cg_solve(impl_->matrix, b, impl_->cg_tol, impl_->cg_max_iter);
    if (!r.converged)
      throw StagnationError("conjugate gradients stopped at relative residual " +
                            std::to_string(r.rel_residual) + " after " +
                            std::to_string(r.iterations) + " iterations");
    return std::move(r.x);
  }
  return impl_->ldlt.solve(b);
}

Factorization factor_spd(const SparseSymMatrix& a, const SolverTolerances& tol) {
  Factorization f;
  f.dim_ = a.dim();
  auto impl = std::make_shared<Factorization::Impl>();
  if (tol.spd_method == SpdMethod::conjugate_gradient) {
    f.kind_ = Factorization::Kind::conjugate_gradient;
    impl->matrix = a;
    impl->cg_tol = tol.cg_rel_tol;
    impl->cg_max_iter = std::max(1, tol.cg_max_iter_factor * a.dim());
    f.impl_ = std::move(impl);
    return f;
  }
  f.kind_ = Factorization::Kind::spd;
  impl->ldlt.compute(to_eigen(a));
  const PivotSummary s = inspect_pivots(impl->ldlt, 0.0);
  if (impl->ldlt.info() != Eigen::Success || s.negative > 0 || !(s.min_abs > 0.0))
    throw NotSpdError("factor_spd: matrix is not positive definite");
  f.impl_ = std::move(impl);
  return f;
}

Factorization factor_shifted(const SparseSymMatrix& k, const SparseSymMatrix& m, double sigma,
                             const SolverTolerances& tol) {
  if (k.dim() != m.dim()) throw DimensionError("factor_shifted: dimension mismatch");
  if (sigma == 0.0) {
    SolverTolerances direct = tol;
    direct.spd_method = SpdMethod::direct;
    return factor_spd(k, direct);
  }
  for (int attempt = 0; attempt <= tol.shift_retries; ++attempt) {
    const double shift = sigma * (1.0 + tol.shift_retry_scale * attempt);
    auto impl = std::make_shared<Factorization::Impl>();
    impl->ldlt.compute(to_eigen(add_scaled(k, -shift, m)));
    const PivotSummary s = inspect_pivots(impl->ldlt, tol.singular_pivot_rel);
    if (s.singular) continue;
    Factorization f;
    f.kind_ = Factorization::Kind::symmetric_indefinite;
    f.dim_ = k.dim();
    f.shift_ = shift;
    f.retries_ = attempt;
    f.negative_pivots_ = s.negative;
    f.impl_ = std::move(impl);
    return f;
  }
  throw ShiftSingularError("K - sigma*M is singular for sigma = " + std::to_string(sigma) +
                           " after " + std::to_string(tol.shift_retries) + " perturbed retries");
}

} // namespace steklov
