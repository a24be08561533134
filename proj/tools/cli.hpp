#pragma once

#include "steklov/drivers.hpp"
#include "steklov/mesh.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace steklov::cli {

enum class Subcommand { solve, compare, mesh_gen };

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

struct CliInvocation {
  Subcommand subcommand = Subcommand::solve;
  /// "square", "lshape" or "file:PATH".
  std::string domain = "square";
  Algorithm algorithm = Algorithm::shifted_inverse;
  int k = 1;
  double omega = 0.25;
  long max_dof = 400000;
  std::optional<int> max_iters;
  std::optional<double> eta_tol;
  std::optional<double> lambda_ref;
  /// Initial uniform mesh diameter for built-in domains.
  double diameter = 0.011048543456039806; // sqrt(2)/128
  /// Uniform refinements after the coarse mesh for scheme1.
  int levels = 2;
  std::optional<std::filesystem::path> history;
  std::optional<std::filesystem::path> mesh_out;
  std::optional<std::filesystem::path> indicators_out;
  /// mesh-gen output file.
  std::optional<std::filesystem::path> out;
};

struct ParseResult {
  std::optional<CliInvocation> invocation;
  int exit_code = kExitOk;
  /// Help text or usage error.
  std::string message;
};

/// Flags may also come from `--config FILE` (key=value lines mirroring the
/// long flag names); command-line flags override the file.
ParseResult parse_args(const std::vector<std::string>& args);
ParseResult parse_args(int argc, const char* const* argv);

TriangleMesh initial_mesh(const std::string& domain, double diameter);

/// Runs the invocation; returns the process exit code.
int execute(const CliInvocation& inv, std::ostream& out, std::ostream& err);

} // namespace steklov::cli
