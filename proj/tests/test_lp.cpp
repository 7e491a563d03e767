#include <catch2/catch_amalgamated.hpp>

#include <rag/rag.hpp>

#include "lp_oracle.hpp"

#include <array>
#include <cmath>
#include <vector>

using namespace rag;
using Catch::Approx;

TEST_CASE("simplex basics") {
  SECTION("max x s.t. x <= 1") {
    LpProblem p;
    p.sense = LpSense::maximize;
    p.objective = {1.0};
    p.add({1.0}, LpRelation::less_equal, 1.0);
    LpSolution s = solve(p);
    REQUIRE(s.status == LpStatus::optimal);
    REQUIRE(s.value == Approx(1.0));
    REQUIRE(s.x[0] == Approx(1.0));
  }

  SECTION("min beta s.t. beta >= 2") {
    LpProblem p;
    p.objective = {1.0};
    p.add({1.0}, LpRelation::greater_equal, 2.0);
    LpSolution s = solve(p);
    REQUIRE(s.status == LpStatus::optimal);
    REQUIRE(s.value == Approx(2.0));
  }

  SECTION("infeasible") {
    LpProblem p;
    p.objective = {1.0};
    p.add({1.0}, LpRelation::less_equal, -1.0);
    REQUIRE(solve(p).status == LpStatus::infeasible);
  }

  SECTION("unbounded") {
    LpProblem p;
    p.sense = LpSense::maximize;
    p.objective = {1.0};
    p.add({1.0}, LpRelation::greater_equal, 1.0);
    REQUIRE(solve(p).status == LpStatus::unbounded);
  }

  SECTION("equality mix") {
    LpProblem p;
    p.sense = LpSense::maximize;
    p.objective = {1.0, 2.0};
    p.add({1.0, 1.0}, LpRelation::equal, 4.0);
    p.add({1.0, 0.0}, LpRelation::less_equal, 3.0);
    LpSolution s = solve(p);
    REQUIRE(s.status == LpStatus::optimal);
    REQUIRE(s.value == Approx(8.0));  // x = (0, 4)
    REQUIRE(s.x[1] == Approx(4.0));
  }

  SECTION("duals on a tight pair") {
    // max 3x + 2y s.t. x + y <= 4, x <= 2  ->  optimum (2,2), duals (2,1)
    LpProblem p;
    p.sense = LpSense::maximize;
    p.objective = {3.0, 2.0};
    p.add({1.0, 1.0}, LpRelation::less_equal, 4.0);
    p.add({1.0, 0.0}, LpRelation::less_equal, 2.0);
    LpSolution s = solve(p);
    REQUIRE(s.value == Approx(10.0));
    REQUIRE(s.dual[0] == Approx(2.0));
    REQUIRE(s.dual[1] == Approx(1.0));
  }
}

TEST_CASE("scale invariance") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    LpProblem p;
    p.sense = LpSense::maximize;
    int nv = 2 + static_cast<int>(rng.below(3));
    for (int j = 0; j < nv; ++j) p.objective.push_back(rng.uniform01());
    for (int i = 0; i < nv + 1; ++i) {
      std::vector<double> row;
      for (int j = 0; j < nv; ++j) row.push_back(0.2 + rng.uniform01());
      p.add(std::move(row), LpRelation::less_equal, 1.0 + rng.uniform01());
    }
    LpSolution s1 = solve(p);
    double t = 0.5 + 3.0 * rng.uniform01();
    LpProblem p2 = p;
    for (auto& c : p2.objective) c *= t;
    LpSolution s2 = solve(p2);
    REQUIRE(s2.value == Approx(t * s1.value));
  }
}

TEST_CASE("random LPs match vertex enumeration") {
  SplitMix64 rng(777);
  for (int trial = 0; trial < 60; ++trial) {
    LpProblem p = ragtest::random_bounded_lp(rng);
    LpSolution s = solve(p);
    REQUIRE(s.status == LpStatus::optimal);
    REQUIRE(s.value == Approx(ragtest::vertex_enumeration_value(p)).margin(1e-6));
  }
}

TEST_CASE("exact rational mode") {
  // the one-round design program for b_covering(1, 1/2), small truncation:
  // binding constraints already give beta = 4/3 exactly
  const int Y = 12, Z = 12;
  WelfareRule w = b_covering(1, 0.5, Y + 2);
  ExactLpProblem p;
  p.sense = LpSense::minimize;
  p.objective.assign(static_cast<std::size_t>(Y) + 1, Rational(0));
  p.objective[0] = 1;
  for (int y = 1; y <= Y; ++y)
    for (int z = 1; z <= Z; ++z) {
      std::vector<Rational> row(static_cast<std::size_t>(Y) + 1, Rational(0));
      row[0] = Rational(w.value(y));
      for (int i = 2; i <= y; ++i) row[static_cast<std::size_t>(i - 1)] = -1;
      row[static_cast<std::size_t>(y)] += z;
      p.add(std::move(row), LpRelation::greater_equal, Rational(1) + Rational(w.value(z)));
    }
  {  // f(2) <= 1 and monotone rows keep the truncation bounded
    std::vector<Rational> row(static_cast<std::size_t>(Y) + 1, Rational(0));
    row[1] = 1;
    p.add(std::move(row), LpRelation::less_equal, Rational(1));
  }
  for (int j = 2; j <= Y; ++j) {
    std::vector<Rational> row(static_cast<std::size_t>(Y) + 1, Rational(0));
    row[static_cast<std::size_t>(j)] = 1;
    row[static_cast<std::size_t>(j - 1)] -= 1;
    p.add(std::move(row), LpRelation::less_equal, Rational(0));
  }
  ExactLpSolution s = solve(p);
  REQUIRE(s.status == LpStatus::optimal);
  REQUIRE(s.value == Rational(4) / 3);
  REQUIRE(s.x[1] == Rational(2) / 3);  // f(2)
}

TEST_CASE("variable bounds") {
  // max x + y s.t. x + y <= 10, with 1 <= x <= 2, y <= 3
  LpProblem p;
  p.sense = LpSense::maximize;
  p.objective = {1.0, 1.0};
  p.add({1.0, 1.0}, LpRelation::less_equal, 10.0);
  p.lower = {1.0, 0.0};
  p.upper = {std::optional<double>(2.0), std::optional<double>(3.0)};
  LpSolution s = solve(p);
  REQUIRE(s.status == LpStatus::optimal);
  REQUIRE(s.value == Approx(5.0));
  REQUIRE(s.x[0] >= 1.0 - 1e-9);
  REQUIRE(s.x[0] <= 2.0 + 1e-9);
}

TEST_CASE("redundant and inconsistent equalities") {
  SECTION("redundant rows are absorbed") {
    LpProblem p;
    p.sense = LpSense::maximize;
    p.objective = {1.0, 0.0};
    p.add({1.0, 1.0}, LpRelation::equal, 2.0);
    p.add({2.0, 2.0}, LpRelation::equal, 4.0);
    LpSolution s = solve(p);
    REQUIRE(s.status == LpStatus::optimal);
    REQUIRE(s.value == Approx(2.0));
  }

  SECTION("inconsistent rows are infeasible") {
    LpProblem p;
    p.objective = {1.0, 1.0};
    p.add({1.0, 1.0}, LpRelation::equal, 2.0);
    p.add({1.0, 1.0}, LpRelation::equal, 3.0);
    REQUIRE(solve(p).status == LpStatus::infeasible);
  }
}

TEST_CASE("negative rhs flips") {
  LpProblem p;
  p.sense = LpSense::maximize;
  p.objective = {1.0};
  p.add({-1.0}, LpRelation::greater_equal, -5.0);  // x <= 5
  LpSolution s = solve(p);
  REQUIRE(s.status == LpStatus::optimal);
  REQUIRE(s.value == Approx(5.0));
  REQUIRE(s.dual[0] == Approx(-1.0));  // binding with the flipped sign
}

TEST_CASE("degenerate pivoting terminates (Beale)") {
  LpProblem p;
  p.objective = {-0.75, 150.0, -0.02, 6.0};
  p.add({0.25, -60.0, -0.04, 9.0}, LpRelation::less_equal, 0.0);
  p.add({0.5, -90.0, -0.02, 3.0}, LpRelation::less_equal, 0.0);
  p.add({0.0, 0.0, 1.0, 0.0}, LpRelation::less_equal, 1.0);
  LpSolution s = solve(p);
  REQUIRE(s.status == LpStatus::optimal);
  REQUIRE(s.value == Approx(-0.05));
}

TEST_CASE("exact mode status classification") {
  ExactLpProblem unbounded;
  unbounded.sense = LpSense::maximize;
  unbounded.objective = {Rational(1)};
  unbounded.add({Rational(1)}, LpRelation::greater_equal, Rational(1));
  REQUIRE(solve(unbounded).status == LpStatus::unbounded);

  ExactLpProblem infeasible;
  infeasible.objective = {Rational(1)};
  infeasible.add({Rational(1)}, LpRelation::less_equal, Rational(-1));
  REQUIRE(solve(infeasible).status == LpStatus::infeasible);
}
