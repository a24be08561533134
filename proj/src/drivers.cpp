#include "steklov/drivers.hpp"

#include "steklov/assembly.hpp"
#include "steklov/errors.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace steklov {

std::string_view to_string(Algorithm a) {
  switch (a) {
  case Algorithm::full_resolve: return "1";
  case Algorithm::inverse: return "2";
  case Algorithm::shifted_inverse: return "3";
  case Algorithm::scheme1: return "scheme1";
  }
  return "?";
}

std::string_view to_string(StopReason r) {
  switch (r) {
  case StopReason::max_dof: return "max_dof";
  case StopReason::max_iters: return "max_iters";
  case StopReason::eta_tol: return "eta_tol";
  case StopReason::converged: return "converged";
  case StopReason::failure: return "failure";
  }
  return "?";
}

std::optional<double> default_lambda_ref(std::string_view domain, int k) {
  if (domain == "square") {
    switch (k) {
    case 1: return 0.24007909;
    case 2: return 1.49230397;
    case 4: return 2.08265094;
    default: return std::nullopt;
    }
  }
  if (domain == "lshape") {
    switch (k) {
    case 1: return 0.18296424;
    case 2: return 0.89364690;
    case 3: return 1.68860181;
    default: return std::nullopt;
    }
  }
  return std::nullopt;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Iterate {
  double lambda;
  Vector u;
  int solves;
};

Iterate level_step(Algorithm algorithm, const FormPair& forms, double lambda_prev,
                   const Vector& start, const SolverTolerances& tol) {
  DiscreteEigenpair pair;
  switch (algorithm) {
  case Algorithm::full_resolve: pair = solve_nearest(forms, lambda_prev, start, tol); break;
  case Algorithm::inverse: pair = inverse_step(forms, start, tol); break;
  case Algorithm::shifted_inverse: pair = shifted_inverse_step(forms, lambda_prev, start, tol); break;
  case Algorithm::scheme1: throw std::invalid_argument("scheme1 is not an adaptive algorithm");
  }
  return {pair.lambda, std::move(pair.coeffs), pair.linear_solves};
}

ConvergenceHistory run_loop(const RunConfig& config, Algorithm algorithm) {
  if (config.k < 1) throw std::invalid_argument("k must be >= 1");
  if (config.initial_mesh.num_triangles() == 0) throw std::invalid_argument("empty initial mesh");
  const auto started = Clock::now();
  const auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - started).count(); };

  ConvergenceHistory history;
  history.algorithm = algorithm;
  history.k = config.k;

  TriangleMesh mesh = config.initial_mesh;
  int level = 1;
  try {
    FormPair forms = assemble(mesh);
    const EigenBasis basis = solve_coarse(forms, config.k + 1, config.tolerances);
    const DiscreteEigenpair& coarse = basis[config.k - 1];
    const Cluster cluster = find_cluster(basis, config.k - 1, config.tolerances.cluster_rel_gap);
    Iterate it{coarse.lambda, coarse.coeffs, coarse.linear_solves};
    // Clustered coarse eigenvalues: boundary residuals use the cluster mean.
    double lambda_for_estimator = cluster.multiplicity() > 1 ? cluster.mean_lambda : coarse.lambda;

    for (;; ++level) {
      const IndicatorField field = compute_indicators(mesh, it.u, lambda_for_estimator);
      const MarkResult marks = mark(field, config.marking);

      IterationRecord rec;
      rec.level = level;
      rec.dofs = static_cast<long>(mesh.num_vertices());
      rec.lambda = it.lambda;
      rec.eta_global = field.eta_global;
      if (config.lambda_ref) rec.abs_error = std::abs(it.lambda - *config.lambda_ref);
      rec.marked_count = static_cast<int>(marks.marked.size());
      rec.linear_solves = it.solves;
      rec.wall_time_s = elapsed();
      history.records.push_back(rec);
      if (config.on_level) config.on_level({level, mesh, field, it.u, it.lambda});

      if (marks.converged) {
        history.stop_reason = StopReason::converged;
        break;
      }
      if (config.stop.eta_tol && field.eta_global <= *config.stop.eta_tol) {
        history.stop_reason = StopReason::eta_tol;
        break;
      }
      if (config.stop.max_iters && level >= *config.stop.max_iters) {
        history.stop_reason = StopReason::max_iters;
        break;
      }
      BisectResult refined = bisect(mesh, marks.marked);
      if (config.stop.max_dof && static_cast<long>(refined.mesh.num_vertices()) > *config.stop.max_dof) {
        history.stop_reason = StopReason::max_dof;
        break;
      }
      const Vector start = prolong(mesh, refined.mesh, it.u);
      mesh = std::move(refined.mesh);
      forms = assemble(mesh);
      it = level_step(algorithm, forms, it.lambda, start, config.tolerances);
      lambda_for_estimator = it.lambda;
    }
    history.final_mesh = std::move(mesh);
    history.final_u = std::move(it.u);
  } catch (const Error& e) {
    history.stop_reason = StopReason::failure;
    history.failure = "level " + std::to_string(level) + " (" +
                      std::to_string(mesh.num_vertices()) + " dofs): " + e.what();
  }
  return history;
}

} // namespace

ConvergenceHistory run_algorithm_1(const RunConfig& config) {
  return run_loop(config, Algorithm::full_resolve);
}

ConvergenceHistory run_algorithm_2(const RunConfig& config) {
  return run_loop(config, Algorithm::inverse);
}

ConvergenceHistory run_algorithm_3(const RunConfig& config) {
  return run_loop(config, Algorithm::shifted_inverse);
}

ConvergenceHistory run_adaptive(const RunConfig& config) {
  if (config.algorithm == Algorithm::scheme1)
    throw std::invalid_argument("scheme1 needs an explicit mesh sequence");
  return run_loop(config, config.algorithm);
}

DiscreteEigenpair run_scheme_1(const RunConfig& config, std::span<const TriangleMesh> meshes) {
  if (meshes.empty()) throw std::invalid_argument("scheme1 needs at least one mesh");
  if (config.k < 1) throw std::invalid_argument("k must be >= 1");
  FormPair forms = assemble(meshes[0]);
  const EigenBasis basis = solve_coarse(forms, config.k, config.tolerances);
  DiscreteEigenpair current = basis[config.k - 1];
  for (std::size_t i = 1; i < meshes.size(); ++i) {
    const Vector start = prolong(meshes[i - 1], meshes[i], current.coeffs);
    forms = assemble(meshes[i]);
    current = shifted_inverse_step(forms, current.lambda, start, config.tolerances);
  }
  return current;
}

} // namespace steklov
