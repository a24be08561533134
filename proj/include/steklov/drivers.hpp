#pragma once

#include "steklov/eigensolve.hpp"
#include "steklov/estimator.hpp"
#include "steklov/marking.hpp"
#include "steklov/mesh.hpp"
#include "steklov/sparse.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace steklov {

enum class Algorithm {
  full_resolve = 1,    ///< eigensolve on every level
  inverse = 2,         ///< one K u = M u_prev solve per level
  shifted_inverse = 3, ///< one (K - lambda_prev M) u = M u_prev solve per level
  scheme1 = 4,         ///< non-adaptive multiscale run on a given mesh sequence
};

std::string_view to_string(Algorithm a);

/// All limits are optional; the first one that triggers ends the run.
struct StopRule {
  /// Stop before solving on a mesh with more DOFs than this.
  std::optional<long> max_dof = 400000;
  std::optional<int> max_iters;
  std::optional<double> eta_tol;
};

enum class StopReason { max_dof, max_iters, eta_tol, converged, failure };

std::string_view to_string(StopReason r);

struct LevelSnapshot {
  int level;
  const TriangleMesh& mesh;
  const IndicatorField& indicators;
  const Vector& u;
  double lambda;
};

struct RunConfig {
  Algorithm algorithm = Algorithm::shifted_inverse;
  /// 1-based eigenvalue index.
  int k = 1;
  MarkParams marking{0.25};
  StopRule stop;
  std::optional<double> lambda_ref;
  TriangleMesh initial_mesh;
  SolverTolerances tolerances;
  /// Called once per level after the indicators are computed.
  std::function<void(const LevelSnapshot&)> on_level;
};

struct IterationRecord {
  int level = 0;
  long dofs = 0;
  double lambda = 0.0;
  double eta_global = 0.0;
  std::optional<double> abs_error;
  int marked_count = 0;
  double wall_time_s = 0.0;
  int linear_solves = 0;
};

struct ConvergenceHistory {
  Algorithm algorithm = Algorithm::shifted_inverse;
  int k = 1;
  std::vector<IterationRecord> records;
  StopReason stop_reason = StopReason::max_dof;
  /// Error message with level context when stop_reason == failure.
  std::string failure;
  /// Final iterate (last recorded level); empty after a failure.
  TriangleMesh final_mesh;
  Vector final_u;

  bool ok() const { return stop_reason != StopReason::failure; }
  const IterationRecord& last() const { return records.back(); }
};

/// High-accuracy reference eigenvalues for the built-in domains, where known.
std::optional<double> default_lambda_ref(std::string_view domain, int k);

ConvergenceHistory run_algorithm_1(const RunConfig& config);
ConvergenceHistory run_algorithm_2(const RunConfig& config);
ConvergenceHistory run_algorithm_3(const RunConfig& config);
/// Dispatches on config.algorithm (scheme1 is not adaptive and is rejected).
ConvergenceHistory run_adaptive(const RunConfig& config);

/// Coarse eigensolve on meshes[0], then one shifted-inverse solve per finer
/// mesh. Meshes must be nested.
DiscreteEigenpair run_scheme_1(const RunConfig& config, std::span<const TriangleMesh> meshes);

} // namespace steklov
