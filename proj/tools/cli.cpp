#include "cli.hpp"

#include "steklov/errors.hpp"
#include "steklov/io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace steklov::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

/// key=value lines -> "--key=value" arguments. Blank lines and '#' comments are skipped.
std::vector<std::string> read_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot read config file " + path.string());
  std::vector<std::string> flags;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--config", "expected key=value, got '" + line + "'");
    flags.push_back("--" + trim(line.substr(0, eq)) + "=" + trim(line.substr(eq + 1)));
  }
  return flags;
}

/// Pulls `--config FILE` out of args and splices the file's flags in right
/// after the subcommand, so later command-line flags win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::optional<std::string> config;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config = args[i + 1];
      args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
      args.erase(args.begin() + static_cast<long>(i));
      break;
    }
  }
  if (!config || args.size() < 2) return args;
  const auto flags = read_config(*config);
  args.insert(args.begin() + 2, flags.begin(), flags.end());
  return args;
}

void add_run_options(CLI::App* sub, CliInvocation& inv) {
  sub->add_option("--domain", inv.domain, "square | lshape | file:PATH")
      ->check([](const std::string& d) -> std::string {
        if (d == "square" || d == "lshape" || (d.rfind("file:", 0) == 0 && d.size() > 5)) return {};
        return "domain must be square, lshape or file:PATH";
      })
      ->capture_default_str();
  sub->add_option("--k", inv.k, "1-based eigenvalue index")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--omega", inv.omega, "Doerfler bulk parameter in (0,1)")
      ->check([](const std::string& s) -> std::string {
        try {
          const double w = std::stod(s);
          if (w > 0.0 && w < 1.0) return {};
        } catch (const std::exception&) {
        }
        return "omega must lie strictly between 0 and 1";
      })
      ->capture_default_str();
  sub->add_option("--max-dof", inv.max_dof, "never solve on meshes with more DOFs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--max-iters", inv.max_iters, "maximum number of adaptive levels")
      ->check(CLI::PositiveNumber);
  sub->add_option("--eta-tol", inv.eta_tol, "stop once the global estimator drops below this")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--lambda-ref", inv.lambda_ref,
                  "reference eigenvalue for the abs_error column (built-in defaults otherwise)");
  sub->add_option("--diameter", inv.diameter, "initial uniform mesh diameter")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--history", inv.history, "convergence history CSV");
  sub->add_option("--mesh-out", inv.mesh_out, "directory for per-level meshes");
  sub->add_option("--indicators-out", inv.indicators_out, "directory for per-level indicator CSVs");
}

std::string domain_name(const std::string& domain) {
  return domain.rfind("file:", 0) == 0 ? std::string("file") : domain;
}

std::filesystem::path with_suffix(const std::filesystem::path& path, const std::string& suffix) {
  std::filesystem::path out = path;
  out.replace_filename(path.stem().string() + suffix + path.extension().string());
  return out;
}

RunConfig make_config(const CliInvocation& inv, Algorithm algorithm) {
  RunConfig config;
  config.algorithm = algorithm;
  config.k = inv.k;
  config.marking = MarkParams(inv.omega);
  config.stop.max_dof = inv.max_dof;
  config.stop.max_iters = inv.max_iters;
  config.stop.eta_tol = inv.eta_tol;
  config.lambda_ref = inv.lambda_ref ? inv.lambda_ref : default_lambda_ref(domain_name(inv.domain), inv.k);
  config.initial_mesh = initial_mesh(inv.domain, inv.diameter);
  return config;
}

void print_history(const ConvergenceHistory& h, std::ostream& out) {
  char line[160];
  std::snprintf(line, sizeof line, "%5s %10s %14s %14s %14s %9s\n", "iter", "dofs", "lambda",
                "eta", "abs_error", "time_s");
  out << line;
  for (const auto& r : h.records) {
    char err[32] = "-";
    if (r.abs_error) std::snprintf(err, sizeof err, "%.3e", *r.abs_error);
    std::snprintf(line, sizeof line, "%5d %10ld %14.8f %14.6e %14s %9.2f\n", r.level, r.dofs,
                  r.lambda, r.eta_global, err, r.wall_time_s);
    out << line;
  }
}

int run_solve(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  RunConfig config = make_config(inv, inv.algorithm);

  if (inv.algorithm == Algorithm::scheme1) {
    std::vector<TriangleMesh> meshes{config.initial_mesh};
    for (int l = 0; l < inv.levels; ++l) meshes.push_back(refine_all(meshes.back()));
    const DiscreteEigenpair pair = run_scheme_1(config, meshes);
    ConvergenceHistory h;
    h.algorithm = Algorithm::scheme1;
    h.k = inv.k;
    IterationRecord rec;
    rec.level = static_cast<int>(meshes.size());
    rec.dofs = static_cast<long>(meshes.back().num_vertices());
    rec.lambda = pair.lambda;
    rec.eta_global = compute_indicators(meshes.back(), pair.coeffs, pair.lambda).eta_global;
    if (config.lambda_ref) rec.abs_error = std::abs(pair.lambda - *config.lambda_ref);
    h.records.push_back(rec);
    print_history(h, out);
    if (inv.history) write_history(h, *inv.history);
    return kExitOk;
  }

  if (inv.mesh_out) std::filesystem::create_directories(*inv.mesh_out);
  if (inv.indicators_out) std::filesystem::create_directories(*inv.indicators_out);
  config.on_level = [&](const LevelSnapshot& s) {
    char line[128];
    std::snprintf(line, sizeof line, "level %3d  dofs %9zu  lambda %.10f  eta %.4e\n", s.level,
                  s.mesh.num_vertices(), s.lambda, s.indicators.eta_global);
    out << line << std::flush;
    const std::string tag = "_l" + std::to_string(s.level);
    if (inv.mesh_out) write_mesh(s.mesh, *inv.mesh_out / ("mesh" + tag + ".txt"));
    if (inv.indicators_out) write_indicators(s.indicators, *inv.indicators_out / ("eta" + tag + ".csv"));
  };
  const ConvergenceHistory h = run_adaptive(config);
  out << "stopped: " << to_string(h.stop_reason) << '\n';
  if (!h.records.empty() && inv.history) write_history(h, *inv.history);
  if (!h.ok()) {
    err << "numerical failure at " << h.failure << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

int run_compare(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  int code = kExitOk;
  for (Algorithm a : {Algorithm::full_resolve, Algorithm::inverse, Algorithm::shifted_inverse}) {
    const RunConfig config = make_config(inv, a);
    const ConvergenceHistory h = run_adaptive(config);
    out << "== algorithm " << to_string(a) << " (stopped: " << to_string(h.stop_reason) << ")\n";
    print_history(h, out);
    if (!h.records.empty() && inv.history)
      write_history(h, with_suffix(*inv.history, "_alg" + std::string(to_string(a))));
    if (!h.ok()) {
      err << "algorithm " << to_string(a) << ": numerical failure at " << h.failure << '\n';
      code = kExitNumerical;
    }
  }
  return code;
}

int run_mesh_gen(const CliInvocation& inv, std::ostream& out) {
  const TriangleMesh mesh = initial_mesh(inv.domain, inv.diameter);
  write_mesh(mesh, *inv.out);
  out << "wrote " << inv.out->string() << ": " << mesh.num_vertices() << " vertices, "
      << mesh.num_triangles() << " triangles\n";
  return kExitOk;
}

} // namespace

ParseResult parse_args(const std::vector<std::string>& raw) {
  CliInvocation inv;
  CLI::App app{"Adaptive P1 finite elements for the Steklov eigenvalue problem", "steklov"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.add_option("--config", "key=value file mirroring the long flags");

  std::string algorithm = "3";
  auto* solve = app.add_subcommand("solve", "run one adaptive algorithm");
  add_run_options(solve, inv);
  solve->add_option("--algorithm", algorithm, "1 | 2 | 3 | scheme1")
      ->check(CLI::IsMember({"1", "2", "3", "scheme1"}))
      ->capture_default_str();
  solve->add_option("--levels", inv.levels, "uniform refinements for scheme1")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  auto* compare = app.add_subcommand("compare", "run algorithms 1, 2 and 3 on the same problem");
  add_run_options(compare, inv);

  auto* mesh_gen = app.add_subcommand("mesh-gen", "write the initial uniform mesh");
  mesh_gen->add_option("--domain", inv.domain, "square | lshape")
      ->check(CLI::IsMember({"square", "lshape"}))
      ->capture_default_str();
  mesh_gen->add_option("--diameter", inv.diameter, "target element diameter")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  mesh_gen->add_option("--out", inv.out, "output mesh file")->required();

  ParseResult result;
  std::ostringstream out_text, err_text;
  try {
    std::vector<std::string> args = expand_config(raw);
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out_text, err_text);
    result.exit_code = code == 0 ? kExitOk : kExitUsage;
    result.message = out_text.str() + err_text.str();
    return result;
  }
  if (solve->parsed()) {
    inv.subcommand = Subcommand::solve;
    inv.algorithm = algorithm == "1"       ? Algorithm::full_resolve
                    : algorithm == "2"     ? Algorithm::inverse
                    : algorithm == "3"     ? Algorithm::shifted_inverse
                                           : Algorithm::scheme1;
  } else if (compare->parsed()) {
    inv.subcommand = Subcommand::compare;
  } else {
    inv.subcommand = Subcommand::mesh_gen;
  }
  result.invocation = inv;
  return result;
}

ParseResult parse_args(int argc, const char* const* argv) {
  return parse_args(std::vector<std::string>(argv, argv + argc));
}

TriangleMesh initial_mesh(const std::string& domain, double diameter) {
  if (domain == "square") return generate_uniform(DomainSpec::unit_square(), diameter);
  if (domain == "lshape") return generate_uniform(DomainSpec::l_shape(), diameter);
  if (domain.rfind("file:", 0) == 0) return read_mesh(domain.substr(5));
  throw std::invalid_argument("unknown domain '" + domain + "'");
}

int execute(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  try {
    switch (inv.subcommand) {
    case Subcommand::solve: return run_solve(inv, out, err);
    case Subcommand::compare: return run_compare(inv, out, err);
    case Subcommand::mesh_gen: return run_mesh_gen(inv, out);
    }
  } catch (const UnsupportedDomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const StructuralError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

} // namespace steklov::cli
