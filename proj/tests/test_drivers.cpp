#include "steklov/drivers.hpp"
#include "steklov/io.hpp"

#include <doctest.h>

#include <cmath>

using namespace steklov;

namespace {

RunConfig small_config(Algorithm a, const DomainSpec& d, int k, long max_dof) {
  RunConfig c;
  c.algorithm = a;
  c.k = k;
  c.stop.max_dof = max_dof;
  c.initial_mesh = generate_uniform(d, std::sqrt(2.0) / 16);
  return c;
}

void check_integrity(const ConvergenceHistory& h, long max_dof) {
  REQUIRE_FALSE(h.records.empty());
  for (std::size_t i = 0; i < h.records.size(); ++i) {
    const auto& r = h.records[i];
    CHECK(r.level == static_cast<int>(i) + 1);
    CHECK(r.dofs <= max_dof);
    if (i > 0) {
      CHECK(r.dofs > h.records[i - 1].dofs);
      CHECK(r.wall_time_s >= h.records[i - 1].wall_time_s);
    }
  }
}

/// History CSV with the wall-time column dropped.
std::string without_times(const ConvergenceHistory& h) {
  std::string csv = history_csv(h), out;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    const std::size_t end = csv.find('\n', pos);
    const std::string line = csv.substr(pos, end - pos);
    out += line.substr(0, line.rfind(',')) + '\n';
    pos = end + 1;
  }
  return out;
}

} // namespace

TEST_CASE("reference eigenvalue defaults") {
  CHECK(*default_lambda_ref("square", 1) == 0.24007909);
  CHECK(*default_lambda_ref("square", 2) == 1.49230397);
  CHECK(*default_lambda_ref("square", 4) == 2.08265094);
  CHECK(*default_lambda_ref("lshape", 1) == 0.18296424);
  CHECK(*default_lambda_ref("lshape", 2) == 0.89364690);
  CHECK(*default_lambda_ref("lshape", 3) == 1.68860181);
  CHECK_FALSE(default_lambda_ref("square", 3));
  CHECK_FALSE(default_lambda_ref("file", 1));
}

TEST_CASE("algorithm 3 history") {
  auto config = small_config(Algorithm::shifted_inverse, DomainSpec::unit_square(), 1, 6000);
  config.lambda_ref = 0.24007909;
  int callbacks = 0;
  config.on_level = [&](const LevelSnapshot& s) {
    ++callbacks;
    CHECK(s.u.size() == static_cast<Eigen::Index>(s.mesh.num_vertices()));
    CHECK(s.indicators.eta.size() == s.mesh.num_triangles());
  };
  const auto h = run_algorithm_3(config);
  CHECK(h.ok());
  CHECK(h.stop_reason == StopReason::max_dof);
  check_integrity(h, 6000);
  CHECK(callbacks == static_cast<int>(h.records.size()));
  for (std::size_t i = 1; i < h.records.size(); ++i) CHECK(h.records[i].linear_solves == 1);
  CHECK(h.records.front().abs_error);
  CHECK(h.last().abs_error.value() < h.records.front().abs_error.value());
  CHECK(h.final_mesh.num_vertices() == static_cast<std::size_t>(h.last().dofs));
  CHECK(h.final_u.size() == h.last().dofs);
}

TEST_CASE("algorithms 1 and 3 agree") {
  const auto c1 = small_config(Algorithm::full_resolve, DomainSpec::unit_square(), 1, 8000);
  const auto c3 = small_config(Algorithm::shifted_inverse, DomainSpec::unit_square(), 1, 8000);
  const auto h1 = run_algorithm_1(c1);
  const auto h3 = run_algorithm_3(c3);
  CHECK(h1.records.front().lambda == doctest::Approx(h3.records.front().lambda).epsilon(1e-14));
  // Marking near ties can pick slightly different meshes; the eigenvalues still agree.
  CHECK(std::abs(h1.last().lambda - h3.last().lambda) <= 1e-6);
  CHECK(std::abs(static_cast<double>(h1.last().dofs - h3.last().dofs)) <= 0.05 * h3.last().dofs);
}

TEST_CASE("algorithm 2 drifts to the lowest eigenvalue") {
  auto config = small_config(Algorithm::inverse, DomainSpec::l_shape(), 3, 30000);
  const auto h = run_algorithm_2(config);
  check_integrity(h, 30000);
  CHECK(h.records.front().lambda > 1.6);
  CHECK(std::abs(h.last().lambda - 0.1829642) < 1e-3);
}

TEST_CASE("stop rules") {
  auto config = small_config(Algorithm::shifted_inverse, DomainSpec::l_shape(), 1, 1000000);
  config.stop.max_iters = 3;
  const auto h = run_adaptive(config);
  CHECK(h.stop_reason == StopReason::max_iters);
  CHECK(h.records.size() == 3);

  config.stop.max_iters.reset();
  config.stop.eta_tol = 0.02;
  const auto e = run_adaptive(config);
  CHECK(e.stop_reason == StopReason::eta_tol);
  CHECK(e.last().eta_global <= 0.02);
  CHECK(e.records[e.records.size() - 2].eta_global > 0.02);

  config.algorithm = Algorithm::scheme1;
  CHECK_THROWS_AS(run_adaptive(config), std::invalid_argument);
}

TEST_CASE("numerical failures give a partial history") {
  auto config = small_config(Algorithm::shifted_inverse, DomainSpec::unit_square(), 1, 6000);
  config.tolerances.coarse_steps_base = 0;
  config.tolerances.coarse_steps_per_eig = 0;
  const auto h = run_algorithm_3(config);
  CHECK_FALSE(h.ok());
  CHECK(h.stop_reason == StopReason::failure);
  CHECK(h.failure.find("level 1") != std::string::npos);
  CHECK(h.records.empty());
}

TEST_CASE("runs are deterministic") {
  const auto config = small_config(Algorithm::shifted_inverse, DomainSpec::l_shape(), 2, 5000);
  CHECK(without_times(run_algorithm_3(config)) == without_times(run_algorithm_3(config)));
}

TEST_CASE("scheme 1") {
  RunConfig config;
  config.k = 1;
  const auto m0 = generate_uniform(DomainSpec::unit_square(), std::sqrt(2.0) / 8);
  const auto m1 = refine_all(refine_all(m0));
  const auto m2 = refine_all(refine_all(m1));

  const TriangleMesh one[] = {m0};
  CHECK(run_scheme_1(config, one).lambda == solve_coarse(assemble(m0), 1)[0].lambda);

  const TriangleMesh two[] = {m0, m1};
  const double direct = solve_coarse(assemble(m1), 1)[0].lambda;
  CHECK(std::abs(run_scheme_1(config, two).lambda - direct) <= 1e-9);

  const TriangleMesh three[] = {m0, m1, m2};
  const double fine_ref = solve_coarse(assemble(refine_all(refine_all(m2))), 1)[0].lambda;
  const double l2 = run_scheme_1(config, two).lambda;
  const double l3 = run_scheme_1(config, three).lambda;
  CHECK(std::abs(l3 - fine_ref) < std::abs(l2 - fine_ref));
}
