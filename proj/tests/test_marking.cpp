#include "steklov/marking.hpp"

#include <doctest.h>

using namespace steklov;

TEST_CASE("bulk examples") {
  const auto r = mark(global_indicator({3, 2, 1}), MarkParams(0.25));
  CHECK(r.marked == std::vector<int>{0});
  CHECK_FALSE(r.converged);

  const auto all = mark(global_indicator({1, 1, 1, 1}), MarkParams(0.99));
  CHECK(all.marked == std::vector<int>{0, 1, 2, 3});

  for (double omega : {0.01, 0.5, 0.99})
    CHECK(mark(global_indicator({5, 0, 0}), MarkParams(omega)).marked == std::vector<int>{0});
}

TEST_CASE("ties are broken by id and order is by descending eta") {
  const auto r = mark(global_indicator({1, 2, 2, 1}), MarkParams(0.6));
  CHECK(r.marked == std::vector<int>{1, 2});
  const auto s = mark(global_indicator({1, 3, 2}), MarkParams(0.9));
  CHECK(s.marked == std::vector<int>{1, 2});
}

TEST_CASE("zero estimator means converged") {
  const auto r = mark(global_indicator({0, 0}), MarkParams());
  CHECK(r.converged);
  CHECK(r.marked.empty());
}

TEST_CASE("omega range") {
  CHECK_THROWS_AS(MarkParams(0.0), std::invalid_argument);
  CHECK_THROWS_AS(MarkParams(1.0), std::invalid_argument);
  CHECK_THROWS_AS(MarkParams(1.5), std::invalid_argument);
  CHECK(MarkParams().omega == 0.25);
}
