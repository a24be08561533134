#include "properties.hpp"

#include <doctest.h>

namespace {

void expect(const props::Outcome& o) {
  INFO(o.detail);
  CHECK(o.ok);
}

} // namespace

TEST_CASE("element matrices agree with quadrature") { expect(props::element_matrices_vs_quadrature()); }
TEST_CASE("Rayleigh quotient identity for discrete eigenpairs") { expect(props::rayleigh_identity()); }
TEST_CASE("coarse eigensolver agrees with dense solver") { expect(props::coarse_vs_dense()); }
TEST_CASE("shifted inverse step contracts toward the eigenspace") { expect(props::shifted_step_contraction()); }
TEST_CASE("bisection stays conforming, nested and shape regular") { expect(props::nvb_invariants()); }
TEST_CASE("Doerfler marking reaches the bulk with a minimal set") { expect(props::dorfler_random()); }
TEST_CASE("eigenvalues decrease monotonically under uniform refinement") { expect(props::monotone_from_above()); }
