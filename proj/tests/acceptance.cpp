// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance [criterion numbers...]   (default: all)

#include "properties.hpp"

#include "steklov/drivers.hpp"

#include <cmath>
#include <limits>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

using namespace steklov;

namespace {

struct Result {
  bool pass = false;
  std::string detail;
};

TriangleMesh initial(const std::string& domain) {
  const double h = std::sqrt(2.0) / 128;
  return generate_uniform(domain == "square" ? DomainSpec::unit_square() : DomainSpec::l_shape(), h);
}

/// Runs are cached so criteria that share a run (1, 6, 7, 10) pay for it once.
const ConvergenceHistory& run(Algorithm a, const std::string& domain, int k, long max_dof) {
  static std::map<std::string, ConvergenceHistory> cache;
  const std::string key = std::string(to_string(a)) + domain + std::to_string(k) + "/" + std::to_string(max_dof);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  RunConfig config;
  config.algorithm = a;
  config.k = k;
  config.stop.max_dof = max_dof;
  config.lambda_ref = default_lambda_ref(domain, k);
  config.initial_mesh = initial(domain);
  ConvergenceHistory h = run_adaptive(config);
  std::printf("  [run] algorithm %s, %s, k=%d: %zu levels, N=%ld, lambda=%.10f, %.1f s%s%s\n",
              std::string(to_string(a)).c_str(), domain.c_str(), k, h.records.size(),
              h.records.empty() ? 0L : h.last().dofs, h.records.empty() ? 0.0 : h.last().lambda,
              h.records.empty() ? 0.0 : h.last().wall_time_s, h.ok() ? "" : ", failure: ",
              h.failure.c_str());
  std::fflush(stdout);
  return cache.emplace(key, std::move(h)).first->second;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[320];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Result criterion_lambda(Algorithm a, const std::string& domain, int k, long max_dof, double target,
                        double tol) {
  const auto& h = run(a, domain, k, max_dof);
  if (!h.ok() || h.records.empty()) return {false, "run failed: " + h.failure};
  const double err = std::abs(h.last().lambda - target);
  char buf[320];
  std::snprintf(buf, sizeof buf, "%s k=%d: lambda=%.10f at N=%ld, |lambda-%.8g|=%.2e (tol %.0e)",
                domain.c_str(), k, h.last().lambda, h.last().dofs, target, err, tol);
  return {err <= tol, buf};
}

Result misconvergence(const std::string& domain, int k, double lowest) {
  const auto& h = run(Algorithm::inverse, domain, k, 400000);
  if (!h.ok() || h.records.empty()) return {false, "run failed: " + h.failure};
  int reached = -1;
  for (std::size_t i = 0; i < h.records.size(); ++i)
    if (std::abs(h.records[i].lambda - lowest) < 1e-2) {
      reached = static_cast<int>(i);
      break;
    }
  bool stayed = reached >= 0;
  for (std::size_t i = std::max(reached, 0); stayed && i < h.records.size(); ++i)
    stayed = h.records[i].lambda <= 1.0;
  char buf[320];
  if (reached < 0) {
    std::snprintf(buf, sizeof buf, "%s k=%d: never came within 1e-2 of %.7f (final %.8f)", domain.c_str(),
                  k, lowest, h.last().lambda);
  } else {
    std::snprintf(buf, sizeof buf,
                  "%s k=%d: started %.8f, within 1e-2 of %.7f from level %d (N=%ld), final %.8f%s",
                  domain.c_str(), k, h.records.front().lambda, lowest, h.records[reached].level,
                  h.records[reached].dofs, h.last().lambda, stayed ? "" : ", but later exceeded 1.0");
  }
  return {stayed, buf};
}

Result both(Result a, Result b) { return {a.pass && b.pass, a.detail + "; " + b.detail}; }

Result rate() {
  const auto& h = run(Algorithm::shifted_inverse, "square", 1, 400000);
  if (!h.ok()) return {false, "run failed: " + h.failure};
  const double ref = *default_lambda_ref("square", 1);
  std::vector<double> x, y;
  const double top = static_cast<double>(h.last().dofs);
  for (const auto& r : h.records) {
    if (r.dofs < 1e4 || r.dofs > 4e5 || r.dofs < top / 10) continue;
    x.push_back(std::log(static_cast<double>(r.dofs)));
    y.push_back(std::log(std::abs(r.lambda - ref)));
  }
  if (x.size() < 3) return {false, "fewer than 3 levels in the final decade"};
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {std::abs(slope + 1.0) <= 0.25,
          fmt("slope %.3f over %.0f levels, N in [%.0f, %.0f], lambda_ref 0.24007909", slope, n,
              std::exp(x.front()), std::exp(x.back()))};
}

Result effectivity() {
  const auto& h = run(Algorithm::shifted_inverse, "square", 1, 400000);
  if (!h.ok()) return {false, "run failed: " + h.failure};
  const double ref = *default_lambda_ref("square", 1);
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  int used = 0;
  for (const auto& r : h.records) {
    if (r.level < 5) continue;
    const double ratio = r.eta_global * r.eta_global / std::abs(r.lambda - ref);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    ++used;
  }
  if (used == 0) return {false, "fewer than 5 levels"};
  return {hi / lo <= 10.0, fmt("eta^2/|lambda-lambda_ref| in [%.1f, %.1f] over %.0f levels, band %.2fx", lo,
                               hi, used, hi / lo)};
}

Result from(const props::Outcome& o) { return {o.ok, o.detail}; }

Result invariants() {
  const struct {
    const char* name;
    std::function<props::Outcome()> check;
  } checks[] = {{"element matrices", [] { return props::element_matrices_vs_quadrature(); }},
                {"Rayleigh identity", [] { return props::rayleigh_identity(); }},
                {"bisection", [] { return props::nvb_invariants(10); }},
                {"marking", [] { return props::dorfler_random(1000); }},
                {"monotone", [] { return props::monotone_from_above(); }}};
  Result r{true, ""};
  for (const auto& c : checks) {
    const auto o = c.check();
    r.pass = r.pass && o.ok;
    r.detail += std::string(r.detail.empty() ? "" : "; ") + c.name + (o.ok ? " ok (" : " FAILED (") +
                o.detail + ")";
  }
  return r;
}

Result timing() {
  const auto& h3 = run(Algorithm::shifted_inverse, "square", 1, 400000);
  const auto& h1 = run(Algorithm::full_resolve, "square", 1, 400000);
  if (!h3.ok() || !h1.ok()) return {false, "run failed: " + h3.failure + h1.failure};
  const double e3 = std::abs(h3.last().lambda - 0.24007910);
  const double e1 = std::abs(h1.last().lambda - 0.24007910);
  const bool matched = e3 <= 5e-7 && e1 <= 5e-7;
  const double t3 = h3.last().wall_time_s, t1 = h1.last().wall_time_s;
  int solves1 = 0, solves3 = 0;
  for (const auto& r : h1.records) solves1 += r.linear_solves;
  for (const auto& r : h3.records) solves3 += r.linear_solves;
  return {matched && t3 <= t1,
          fmt("algorithm 3: %.2f s (%.0f solves), algorithm 1: %.2f s (%.0f solves)", t3, solves3, t1,
              solves1) +
              (matched ? ", both within 5e-7" : ", accuracy not matched")};
}

} // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  const std::vector<std::pair<int, std::function<Result()>>> criteria = {
      {1, [] { return criterion_lambda(Algorithm::shifted_inverse, "square", 1, 400000, 0.24007910, 5e-7); }},
      {2, [] { return criterion_lambda(Algorithm::shifted_inverse, "square", 2, 500000, 1.4923040, 5e-6); }},
      {3, [] { return criterion_lambda(Algorithm::shifted_inverse, "square", 4, 400000, 2.082655, 2e-5); }},
      {4, [] {
         return both(criterion_lambda(Algorithm::shifted_inverse, "lshape", 1, 400000, 0.1829642, 1e-6),
                     criterion_lambda(Algorithm::shifted_inverse, "lshape", 3, 450000, 1.688602, 5e-6));
       }},
      {5, [] { return both(misconvergence("square", 2, 0.2400791), misconvergence("lshape", 3, 0.1829642)); }},
      {6, rate},
      {7, effectivity},
      {8, [] { return both(from(props::coarse_vs_dense()), from(props::shifted_step_contraction())); }},
      {9, invariants},
      {10, timing},
  };

  int failed = 0;
  for (const auto& [id, check] : criteria) {
    if (!wanted.empty() && !wanted.count(id)) continue;
    Result r;
    try {
      r = check();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failed += r.pass ? 0 : 1;
    std::printf("%s criterion %d: %s\n", r.pass ? "PASS" : "FAIL", id, r.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
