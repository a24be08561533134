#include "steklov/eigensolve.hpp"

#include "steklov/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace steklov {

double rayleigh_quotient(const FormPair& forms, const Vector& u) {
  const double b = forms.M.quadratic(u);
  if (!(b > 0.0)) throw BoundaryNullError("Rayleigh quotient undefined: u vanishes on the boundary");
  return forms.K.quadratic(u) / b;
}

double eigen_residual(const FormPair& forms, double lambda, const Vector& u) {
  const Vector ku = matvec(forms.K, u);
  const double denom = ku.norm();
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return (ku - lambda * matvec(forms.M, u)).norm() / denom;
}

void apply_sign_convention(const FormPair& forms, Vector& u) {
  const Vector mu = matvec(forms.M, u);
  const double mean = mu.sum();
  const double scale = mu.cwiseAbs().sum();
  if (std::abs(mean) > 1e-10 * scale) {
    if (mean < 0.0) u = -u;
    return;
  }
  Eigen::Index at = 0;
  u.cwiseAbs().maxCoeff(&at);
  if (u[at] < 0.0) u = -u;
}

Cluster find_cluster(const EigenBasis& basis, int index, double rel_gap) {
  if (index < 0 || index >= static_cast<int>(basis.size()))
    throw std::out_of_range("cluster index out of range");
  const double target = basis[index].lambda;
  Cluster c{index, index, 0.0};
  while (c.first > 0 && std::abs(basis[c.first - 1].lambda - target) <= rel_gap * target) --c.first;
  while (c.last + 1 < static_cast<int>(basis.size()) &&
         std::abs(basis[c.last + 1].lambda - target) <= rel_gap * target)
    ++c.last;
  double sum = 0.0;
  for (int j = c.first; j <= c.last; ++j) sum += basis[j].lambda;
  c.mean_lambda = sum / c.multiplicity();
  return c;
}

namespace {

/// Deterministic pseudo-random block; column 0 is all ones.
Eigen::MatrixXd start_block(int n, int p, std::uint32_t seed) {
  std::mt19937 gen(seed);
  Eigen::MatrixXd x(n, p);
  x.col(0).setOnes();
  for (int c = 1; c < p; ++c)
    for (int i = 0; i < n; ++i)
      x(i, c) = 2.0 * (static_cast<double>(gen()) / 4294967295.0) - 1.0;
  return x;
}

/// Basis kept orthonormal in the K-inner product, with K*V and M*V cached so
/// Rayleigh-Ritz needs no extra sparse products.
class KrylovBasis {
public:
  explicit KrylovBasis(const FormPair& forms) : forms_(forms) {}

  int size() const { return static_cast<int>(v_.cols()); }
  const Eigen::MatrixXd& v() const { return v_; }
  const Eigen::MatrixXd& kv() const { return kv_; }
  const Eigen::MatrixXd& mv() const { return mv_; }

  /// Orthogonalizes each column of w against the basis (two passes) and
  /// appends it unless it is numerically dependent. Returns how many were kept.
  int append(const Eigen::MatrixXd& w) {
    int kept = 0;
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      Vector x = w.col(c);
      Vector kx = matvec(forms_.K, x);
      const double initial = std::sqrt(std::max(0.0, x.dot(kx)));
      if (!(initial > 0.0) || !std::isfinite(initial)) continue;
      for (int pass = 0; pass < 2 && size() > 0; ++pass) {
        const Vector coef = kv_.transpose() * x;
        x -= v_ * coef;
        kx -= kv_ * coef;
      }
      const double len = std::sqrt(std::max(0.0, x.dot(kx)));
      if (!(len > 1e-8 * initial)) continue;
      x /= len;
      kx /= len;
      push(x, kx, matvec(forms_.M, x));
      ++kept;
    }
    return kept;
  }

  /// Replaces the basis by V*Y (Y with orthonormal columns).
  void rotate(const Eigen::MatrixXd& y) {
    v_ = v_ * y;
    kv_ = kv_ * y;
    mv_ = mv_ * y;
  }

  Eigen::MatrixXd projected_m() const {
    Eigen::MatrixXd h = v_.transpose() * mv_;
    return 0.5 * (h + h.transpose());
  }

private:
  void push(const Vector& x, const Vector& kx, const Vector& mx) {
    const Eigen::Index m = v_.cols();
    const Eigen::Index n = x.size();
    v_.conservativeResize(n, m + 1);
    kv_.conservativeResize(n, m + 1);
    mv_.conservativeResize(n, m + 1);
    v_.col(m) = x;
    kv_.col(m) = kx;
    mv_.col(m) = mx;
  }

  const FormPair& forms_;
  Eigen::MatrixXd v_, kv_, mv_;
};

double ritz_residual(const KrylovBasis& basis, const Vector& y, double lambda) {
  const Vector kx = basis.kv() * y;
  const Vector mx = basis.mv() * y;
  const double denom = kx.norm();
  return denom > 0.0 ? (kx - lambda * mx).norm() / denom : std::numeric_limits<double>::infinity();
}

DiscreteEigenpair finish_pair(const FormPair& forms, Vector x, int solves) {
  const double e = forms.energy_norm(x);
  x /= e;
  DiscreteEigenpair pair;
  pair.lambda = rayleigh_quotient(forms, x);
  pair.residual = eigen_residual(forms, pair.lambda, x);
  pair.coeffs = std::move(x);
  pair.linear_solves = solves;
  return pair;
}

Eigen::MatrixXd apply_operator(const Factorization& f, const FormPair& forms,
                               const Eigen::MatrixXd& block, int& solves) {
  Eigen::MatrixXd out(block.rows(), block.cols());
  for (Eigen::Index c = 0; c < block.cols(); ++c) {
    out.col(c) = f.solve(matvec(forms.M, block.col(c)));
    ++solves;
  }
  return out;
}

int boundary_rank(const FormPair& forms) {
  int rank = 0;
  for (int i = 0; i < forms.M.dim(); ++i)
    if (forms.M.row_ptr()[i + 1] > forms.M.row_ptr()[i]) ++rank;
  return rank;
}

} // namespace

EigenBasis solve_coarse(const FormPair& forms, int count, const SolverTolerances& tol) {
  const int n = forms.K.dim();
  if (count < 1) throw std::invalid_argument("solve_coarse: count must be >= 1");
  if (n < count + 2)
    throw std::invalid_argument("solve_coarse: problem dimension " + std::to_string(n) +
                                " too small for " + std::to_string(count) + " eigenpairs");
  const int boundary_rank = steklov::boundary_rank(forms);
  if (count > boundary_rank)
    throw std::invalid_argument("solve_coarse: only " + std::to_string(boundary_rank) +
                                " boundary degrees of freedom");

  const Factorization f = factor_spd(forms.K, tol);
  const int block = std::min(count + 2, boundary_rank);
  // K^{-1} M has rank boundary_rank, so no Krylov space can be larger.
  const int max_basis = std::min(boundary_rank, std::max(10 * block, 80));
  const int max_steps = tol.coarse_steps_per_eig * count + tol.coarse_steps_base;

  int solves = 0;
  KrylovBasis basis(forms);
  Eigen::MatrixXd last = apply_operator(f, forms, start_block(n, block, 5489u), solves);
  basis.append(last);
  last = basis.v();

  for (int step = 0; step <= max_steps; ++step) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(basis.projected_m());
    const Eigen::VectorXd& mu = ritz.eigenvalues(); // ascending
    const Eigen::MatrixXd& y = ritz.eigenvectors();
    const int m = basis.size();

    bool converged = m >= count;
    for (int j = 0; j < count && converged; ++j) {
      const int col = m - 1 - j;
      const double mu_j = mu[col];
      converged = mu_j > 0.0 && ritz_residual(basis, y.col(col), 1.0 / mu_j) <= tol.eig_residual;
    }
    if (converged) {
      EigenBasis out;
      for (int j = 0; j < count; ++j) {
        const int col = m - 1 - j;
        Vector x = basis.v() * y.col(col);
        apply_sign_convention(forms, x);
        out.pairs.push_back(finish_pair(forms, std::move(x), solves));
      }
      return out;
    }
    if (step == max_steps) break;

    const int wanted = std::min(m, count + block);
    if (m >= max_basis) {
      basis.rotate(y.rightCols(wanted));
      last = basis.v().rightCols(std::min(block, wanted));
    }
    Eigen::MatrixXd next = apply_operator(f, forms, last, solves);
    const int before = basis.size();
    const int kept = basis.append(next);
    if (kept == 0) {
      // Invariant subspace without convergence: inject fresh directions.
      next = apply_operator(f, forms, start_block(n, block, 5489u + step + 1), solves);
      if (basis.append(next) == 0) break;
    }
    last = basis.v().rightCols(basis.size() - before);
  }
  throw StagnationError("coarse eigensolver did not reach residual " +
                        std::to_string(tol.eig_residual) + " within " +
                        std::to_string(max_steps) + " block steps");
}

DiscreteEigenpair solve_nearest(const FormPair& forms, double sigma, const Vector& start,
                                const SolverTolerances& tol) {
  const int n = forms.K.dim();
  if (start.size() != n) throw DimensionError("solve_nearest: start has wrong dimension");
  const Factorization f = factor_shifted(forms.K, forms.M, sigma, tol);
  int solves = 0;

  Vector seed = start;
  for (int restart = 0; restart <= tol.shift_invert_max_restarts; ++restart) {
    KrylovBasis basis(forms);
    Eigen::MatrixXd next = apply_operator(f, forms, seed, solves);
    if (basis.append(next) == 0)
      throw DegenerateStartError("solve_nearest: start vector has no boundary trace");
    // Fill the whole cycle like an implicitly restarted Lanczos code does: on
    // breakdown continue from a fresh pseudo-random direction in the range.
    const int cycle = std::min(tol.shift_invert_basis_size, boundary_rank(forms));
    for (std::uint32_t fresh = 1; basis.size() < cycle;) {
      next = apply_operator(f, forms, basis.v().rightCols(1), solves);
      while (basis.append(next) == 0 && fresh < 64)
        next = apply_operator(f, forms, start_block(n, 2, 7919u * fresh++).col(1), solves);
      if (fresh >= 64) break;
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(basis.projected_m());
    const Eigen::VectorXd& mu = ritz.eigenvalues();
    int pick = -1;
    double dist = std::numeric_limits<double>::infinity();
    for (int j = 0; j < basis.size(); ++j) {
      if (!(mu[j] > 0.0)) continue;
      const double d = std::abs(1.0 / mu[j] - f.shift());
      if (d < dist) {
        dist = d;
        pick = j;
      }
    }
    if (pick < 0) throw DegenerateStartError("solve_nearest: no positive Ritz value");
    const Vector y = ritz.eigenvectors().col(pick);
    seed = basis.v() * y;
    if (ritz_residual(basis, y, 1.0 / mu[pick]) <= tol.eig_residual) {
      if (seed.dot(matvec(forms.M, start)) < 0.0) seed = -seed;
      return finish_pair(forms, std::move(seed), solves);
    }
  }
  throw StagnationError("shift-invert eigensolve near " + std::to_string(sigma) +
                        " did not converge after " +
                        std::to_string(tol.shift_invert_max_restarts) + " restarts");
}

DiscreteEigenpair shifted_inverse_step(const FormPair& forms, double shift, const Vector& start,
                                       const SolverTolerances& tol) {
  if (start.size() != forms.K.dim()) throw DimensionError("shifted_inverse_step: bad start");
  if (!(shift > 0.0)) throw std::invalid_argument("shifted_inverse_step: shift must be positive");
  const Vector rhs = matvec(forms.M, start);
  if (rhs.cwiseAbs().maxCoeff() == 0.0)
    throw DegenerateStartError("shifted_inverse_step: start vanishes on the boundary");
  const Factorization f = factor_shifted(forms.K, forms.M, shift, tol);
  Vector u = f.solve(rhs);
  const double e = forms.energy_norm(u);
  if (!(e > 0.0) || !std::isfinite(e))
    throw DegenerateStartError("shifted_inverse_step: solution has zero energy norm");
  if (u.dot(rhs) < 0.0) u = -u;
  return finish_pair(forms, std::move(u), 1);
}

DiscreteEigenpair inverse_step(const FormPair& forms, const Vector& start,
                               const SolverTolerances& tol) {
  if (start.size() != forms.K.dim()) throw DimensionError("inverse_step: bad start");
  const Vector rhs = matvec(forms.M, start);
  if (rhs.cwiseAbs().maxCoeff() == 0.0)
    throw DegenerateStartError("inverse_step: start vanishes on the boundary");
  const Factorization f = factor_spd(forms.K, tol);
  Vector u = f.solve(rhs);
  const double e = forms.energy_norm(u);
  if (!(e > 0.0) || !std::isfinite(e))
    throw DegenerateStartError("inverse_step: solution has zero energy norm");
  return finish_pair(forms, std::move(u), 1);
}

Vector prolong(const TriangleMesh& coarse, const TriangleMesh& fine, const Vector& coarse_coeffs) {
  const std::size_t nc = coarse.num_vertices();
  const std::size_t nf = fine.num_vertices();
  if (static_cast<std::size_t>(coarse_coeffs.size()) != nc)
    throw DimensionError("prolong: coefficient vector does not match the coarse mesh");
  if (nf < nc) throw StructuralError("prolong: fine mesh has fewer vertices than coarse mesh");
  for (std::size_t v = 0; v < nc; ++v)
    if (!(coarse.vertices()[v] == fine.vertices()[v]))
      throw StructuralError("prolong: meshes are not nested (vertex " + std::to_string(v) +
                            " moved)");
  Vector out(nf);
  out.head(nc) = coarse_coeffs;
  const auto& parents = fine.vertex_parents();
  for (std::size_t v = nc; v < nf; ++v) {
    const auto [a, b] = parents[v];
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= v || static_cast<std::size_t>(b) >= v)
      throw StructuralError("prolong: vertex " + std::to_string(v) + " has no bisection parent");
    const Point2 mid = 0.5 * (fine.vertices()[a] + fine.vertices()[b]);
    if (norm(mid - fine.vertices()[v]) > 1e-12 * (1.0 + norm(mid)))
      throw StructuralError("prolong: vertex " + std::to_string(v) +
                            " is not the midpoint of its parents");
    out[v] = 0.5 * (out[a] + out[b]);
  }
  return out;
}

} // namespace steklov
