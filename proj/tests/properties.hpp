#pragma once

// Invariant checks shared by the property tests and the acceptance runner.
// Each returns ok plus a one-line summary of the worst case seen.

#include "steklov/assembly.hpp"
#include "steklov/eigensolve.hpp"
#include "steklov/estimator.hpp"
#include "steklov/marking.hpp"
#include "steklov/mesh.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace props {

using namespace steklov;

struct Outcome {
  bool ok = true;
  std::string detail;
};

inline std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

inline std::vector<TriangleMesh> oracle_meshes() {
  std::vector<TriangleMesh> out;
  out.push_back(generate_uniform(DomainSpec::unit_square(), std::sqrt(2.0)));
  out.push_back(generate_uniform(DomainSpec::unit_square(), std::sqrt(2.0) / 4));
  out.push_back(generate_uniform(DomainSpec::unit_square(), std::sqrt(2.0) / 12));
  out.push_back(generate_uniform(DomainSpec::l_shape(), std::sqrt(2.0) / 8));
  out.push_back(generate_uniform(DomainSpec::l_shape(), std::sqrt(2.0) / 14));
  TriangleMesh g = generate_uniform(DomainSpec::l_shape(), std::sqrt(2.0) / 4);
  for (int pass = 0; pass < 8; ++pass) {
    std::vector<int> marked;
    for (std::size_t t = 0; t < g.num_triangles(); ++t)
      for (const Point2& c : g.corners(static_cast<int>(t)))
        if (norm(c - Point2{0.5, 0.5}) < 1e-12) marked.push_back(static_cast<int>(t));
    g = bisect(g, marked).mesh;
  }
  out.push_back(std::move(g));
  return out;
}

/// Coarse eigensolver against the dense generalized eigensolver on meshes
/// with at most 200 vertices.
inline Outcome coarse_vs_dense(double tol = 1e-10) {
  Outcome o;
  double worst = 0;
  int meshes = 0;
  for (const TriangleMesh& mesh : oracle_meshes()) {
    if (mesh.num_vertices() > 200) continue;
    ++meshes;
    const FormPair forms = assemble(mesh);
    Eigen::MatrixXd k, m;
    oracle::dense_forms(mesh, k, m);
    const auto spectrum = oracle::dense_steklov(k, m);
    const int count = std::min<int>(6, static_cast<int>(mesh.num_vertices()) - 2);
    const EigenBasis basis = solve_coarse(forms, count);
    for (int j = 0; j < count; ++j)
      worst = std::max(worst, std::abs(basis[j].lambda - spectrum.lambda[j]) / spectrum.lambda[j]);
  }
  o.ok = worst <= tol && meshes > 0;
  o.detail = fmt("%.0f meshes, max rel eigenvalue error %.2e", meshes, worst);
  return o;
}

/// dist_after <= (4/rho) max|mu0 - mu_j| dist_before for one shifted inverse
/// step, with mu = 1/lambda and distances in the a-norm to the discrete eigenspace.
inline Outcome shifted_step_contraction() {
  Outcome o;
  std::mt19937 gen(2024);
  std::normal_distribution<double> nd;
  double worst_ratio = 0;
  int cases = 0;
  for (const TriangleMesh& mesh : oracle_meshes()) {
    if (mesh.num_vertices() > 200 || mesh.num_vertices() < 20) continue;
    const FormPair forms = assemble(mesh);
    Eigen::MatrixXd kd, md;
    oracle::dense_forms(mesh, kd, md);
    const auto sp = oracle::dense_steklov(kd, md);
    const auto dist = [&](const Vector& u, int first, int last) {
      const Vector ku = matvec(forms.K, u);
      Vector r = u;
      for (int j = first; j <= last; ++j) r -= sp.vectors.col(j).dot(ku) * sp.vectors.col(j);
      return std::sqrt(forms.K.quadratic(r) / u.dot(ku));
    };
    for (int k = 0; k < 3; ++k) {
      // Treat eigenvalues within 1e-8 as one eigenspace.
      int first = k, last = k;
      while (first > 0 && std::abs(sp.lambda[first - 1] - sp.lambda[k]) <= 1e-8 * sp.lambda[k]) --first;
      while (last + 1 < sp.lambda.size() && std::abs(sp.lambda[last + 1] - sp.lambda[k]) <= 1e-8 * sp.lambda[k]) ++last;
      const double mu_k = 1.0 / sp.lambda[k];
      double rho = std::numeric_limits<double>::infinity();
      for (int j = 0; j < sp.lambda.size(); ++j)
        if (j < first || j > last) rho = std::min(rho, std::abs(1.0 / sp.lambda[j] - mu_k));
      for (double eps : {0.2, 0.05, 1e-2, 1e-3, 1e-4}) {
        Vector noise(sp.vectors.rows());
        for (auto& x : noise) x = nd(gen);
        Vector u0 = sp.vectors.col(k) + eps * noise / forms.energy_norm(noise);
        u0 /= forms.energy_norm(u0);
        const double before = dist(u0, first, last);
        const double sigma = rayleigh_quotient(forms, u0);
        const double mu0 = 1.0 / sigma;
        if (before > 0.5 || std::abs(mu0 - mu_k) > rho / 4) continue; // outside the lemma's hypotheses
        double gap = 0;
        for (int j = first; j <= last; ++j) gap = std::max(gap, std::abs(mu0 - 1.0 / sp.lambda[j]));
        const auto out = shifted_inverse_step(forms, sigma, u0);
        const double after = dist(out.coeffs, first, last);
        const double bound = 4.0 / rho * gap * before;
        // Below 1e-13 the distance is pure rounding.
        const double ratio = after <= 1e-13 ? 0.0 : after / bound;
        worst_ratio = std::max(worst_ratio, ratio);
        ++cases;
      }
    }
  }
  o.ok = cases > 0 && worst_ratio <= 1.0;
  o.detail = fmt("%.0f cases, max dist_after/bound %.3f", cases, worst_ratio);
  return o;
}

inline Outcome element_matrices_vs_quadrature(int trials = 1000, double tol = 1e-13) {
  std::mt19937 gen(99);
  std::uniform_real_distribution<double> u(-3, 3);
  double worst = 0;
  int used = 0;
  while (used < trials) {
    std::array<Point2, 3> p{{{u(gen), u(gen)}, {u(gen), u(gen)}, {u(gen), u(gen)}}};
    if (oracle::signed_area(p) < 0) std::swap(p[1], p[2]);
    if (oracle::signed_area(p) < 1e-2) continue;
    ++used;
    Eigen::Matrix3d g, m;
    oracle::element_by_quadrature(p, g, m);
    worst = std::max(worst, (element_gradient_matrix(p) - g).norm() / std::max(1.0, g.norm()));
    worst = std::max(worst, (element_mass_matrix(p) - m).norm() / std::max(1.0, m.norm()));
    const Eigen::Matrix2d em = oracle::edge_mass_by_quadrature(p[0], p[1]);
    worst = std::max(worst, (edge_boundary_mass(p[0], p[1]) - em).norm() / std::max(1.0, em.norm()));
  }
  return {worst <= tol, fmt("%.0f triangles, max rel deviation %.2e", used, worst)};
}

/// RQ(v) - lambda == ||v-u||_a^2/||v||_b^2 - lambda ||v-u||_b^2/||v||_b^2.
inline Outcome rayleigh_identity(double tol = 1e-11) {
  std::mt19937 gen(7);
  std::normal_distribution<double> nd;
  double worst = 0;
  int cases = 0;
  for (const TriangleMesh& mesh : oracle_meshes()) {
    if (mesh.num_vertices() > 200) continue;
    const FormPair forms = assemble(mesh);
    const int count = std::min<int>(4, static_cast<int>(mesh.num_vertices()) - 2);
    const EigenBasis basis = solve_coarse(forms, count);
    for (const auto& pair : basis.pairs) {
      for (int trial = 0; trial < 20; ++trial) {
        Vector v(pair.coeffs.size());
        for (auto& x : v) x = nd(gen);
        if (trial % 2) v = pair.coeffs + 1e-1 * v;
        const double bv = forms.M.quadratic(v);
        const Vector d = v - pair.coeffs;
        const double lhs = forms.K.quadratic(v) / bv - pair.lambda;
        const double ad = forms.K.quadratic(d) / bv;
        const double rhs = ad - pair.lambda * forms.M.quadratic(d) / bv;
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(lhs), ad));
        ++cases;
      }
    }
  }
  return {worst <= tol, fmt("%.0f cases, max rel defect %.2e", cases, worst)};
}

/// Every edge with a single triangle must lie on the domain boundary;
/// otherwise some neighbor was split and left a hanging vertex.
inline bool conforming(const TriangleMesh& mesh, const DomainSpec& domain, double area) {
  const auto on_polygon = [&](Point2 p) {
    const auto& poly = domain.polygon;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point2 a = poly[i], b = poly[(i + 1) % poly.size()];
      const double len2 = dot(b - a, b - a);
      const double t = dot(p - a, b - a) / len2;
      if (t < -1e-12 || t > 1 + 1e-12) continue;
      if (std::abs(cross(b - a, p - a)) <= 1e-12 * len2) return true;
    }
    return false;
  };
  for (const Edge& e : mesh.edges()) {
    if (!e.boundary()) continue;
    const Point2 a = mesh.vertices()[e.vertices[0]], b = mesh.vertices()[e.vertices[1]];
    if (!on_polygon(a) || !on_polygon(b) || !on_polygon(0.5 * (a + b))) return false;
  }
  double sum = 0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double at = mesh.area(static_cast<int>(t));
    if (!(at > 0)) return false;
    sum += at;
  }
  return std::abs(sum - area) <= 1e-12 * area;
}

/// Ten levels of bisection with random and corner-focused marking.
inline Outcome nvb_invariants(int levels = 10) {
  std::mt19937 gen(31);
  bool ok = true;
  double worst_angle_ratio = std::numeric_limits<double>::infinity();
  std::size_t final_triangles = 0;
  for (const DomainSpec& d : {DomainSpec::unit_square(), DomainSpec::l_shape()}) {
    for (int mode = 0; mode < 2; ++mode) {
      TriangleMesh mesh = generate_uniform(d, std::sqrt(2.0) / 4);
      const double angle0 = mesh.min_angle();
      for (int level = 0; level < levels; ++level) {
        std::vector<int> marked;
        for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
          const bool pick = mode == 0 ? gen() % 5 == 0
                                      : norm(mesh.corners(static_cast<int>(t))[0] - Point2{0.5, 0.5}) < 0.2;
          if (pick) marked.push_back(static_cast<int>(t));
        }
        if (marked.empty()) marked.push_back(0);
        const BisectResult r = bisect(mesh, marked);
        ok = ok && r.refined && r.mesh.num_triangles() > mesh.num_triangles();
        for (std::size_t v = 0; v < mesh.num_vertices() && ok; ++v)
          ok = r.mesh.vertices()[v] == mesh.vertices()[v]; // nested
        ok = ok && conforming(r.mesh, d, d.area());
        worst_angle_ratio = std::min(worst_angle_ratio, r.mesh.min_angle() / angle0);
        mesh = r.mesh;
      }
      final_triangles = std::max(final_triangles, mesh.num_triangles());
    }
  }
  ok = ok && worst_angle_ratio >= 1.0 - 1e-12;
  return {ok, fmt("%.0f levels, up to %.0f triangles, min angle / initial %.6f", levels,
                  static_cast<double>(final_triangles), worst_angle_ratio)};
}

/// Bulk criterion and minimality of the marked set on random indicator fields.
inline Outcome dorfler_random(int cases = 1000) {
  std::mt19937 gen(12345);
  std::uniform_real_distribution<double> ud(0, 1);
  int failures = 0;
  for (int c = 0; c < cases; ++c) {
    const int n = 1 + static_cast<int>(gen() % 60);
    std::vector<double> eta(n);
    for (auto& e : eta) {
      const unsigned kind = gen() % 4;
      e = kind == 0 ? 0.0 : kind == 1 ? std::floor(ud(gen) * 4) : ud(gen) * std::pow(10.0, -3.0 * ud(gen));
    }
    const double omega = 0.01 + 0.98 * ud(gen);
    const IndicatorField field = global_indicator(eta);
    const MarkResult r = mark(field, MarkParams(omega));
    const double total = field.eta_global * field.eta_global;
    if (total == 0) {
      failures += r.converged && r.marked.empty() ? 0 : 1;
      continue;
    }
    std::vector<double> sq(n);
    for (int i = 0; i < n; ++i) sq[i] = eta[i] * eta[i];
    double got = 0;
    std::vector<bool> seen(n, false);
    bool valid = !r.marked.empty();
    for (int id : r.marked) {
      valid = valid && id >= 0 && id < n && !seen[id];
      if (!valid) break;
      seen[id] = true;
      got += sq[id];
    }
    // Minimality: the |marked|-1 largest squares stay below the threshold.
    std::vector<double> sorted = sq;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const double best_smaller = std::accumulate(sorted.begin(), sorted.begin() + (r.marked.size() - 1), 0.0);
    const double threshold = omega * total;
    valid = valid && got >= threshold * (1 - 1e-14) && best_smaller < threshold;
    failures += valid ? 0 : 1;
  }
  return {failures == 0, fmt("%.0f cases, %.0f violations", cases, failures)};
}

/// lambda_{k,h} decreases under uniform refinement and stays above the reference.
inline Outcome monotone_from_above() {
  struct Case {
    DomainSpec domain;
    int k;
    double ref;
  };
  bool ok = true;
  double worst_increase = -std::numeric_limits<double>::infinity();
  double min_margin = std::numeric_limits<double>::infinity();
  for (const Case& c : {Case{DomainSpec::unit_square(), 1, 0.24007909},
                        Case{DomainSpec::unit_square(), 2, 1.49230397},
                        Case{DomainSpec::l_shape(), 1, 0.18296424},
                        Case{DomainSpec::l_shape(), 3, 1.68860181}}) {
    TriangleMesh mesh = generate_uniform(c.domain, std::sqrt(2.0) / 4);
    double prev = std::numeric_limits<double>::infinity();
    for (int level = 0; level < 5; ++level) {
      const double lambda = solve_coarse(assemble(mesh), c.k)[c.k - 1].lambda;
      worst_increase = std::max(worst_increase, lambda - prev);
      min_margin = std::min(min_margin, lambda - c.ref);
      ok = ok && lambda <= prev + 1e-12 && lambda >= c.ref - 1e-12;
      prev = lambda;
      mesh = refine_all(refine_all(mesh));
    }
  }
  return {ok, fmt("largest step change %.2e, smallest margin above reference %.2e", worst_increase, min_margin)};
}

} // namespace props
