#include <catch2/catch_amalgamated.hpp>

#include <rag/rag.hpp>

using namespace rag;
using Catch::Approx;

TEST_CASE("b_covering tables") {
  // direct substitution: w(j) = j for j <= b, b + (1-c)(j-b) beyond
  WelfareRule w = b_covering(2, 0.5, 4);
  REQUIRE(w.values == std::vector<double>{0.0, 1.0, 2.0, 2.5, 3.0});

  WelfareRule sc = set_covering(6);
  for (int j = 1; j <= 6; ++j) REQUIRE(sc.value(j) == 1.0);
  REQUIRE(sc.value(0) == 0.0);

  WelfareRule add = b_covering(1, 0.0, 5);
  for (int j = 0; j <= 5; ++j) REQUIRE(add.value(j) == Approx(j));

  REQUIRE_THROWS_AS(b_covering(0, 0.5), ValidationError);
  REQUIRE_THROWS_AS(b_covering(1, 1.5), ValidationError);
  REQUIRE_THROWS_AS(b_covering(8, 1.0, 8), ValidationError);
}

TEST_CASE("rule validation") {
  WelfareRule w;
  w.n_max = 2;
  w.values = {0.0, 1.0, 2.0};
  REQUIRE_NOTHROW(w.validate());
  w.values[0] = 0.5;
  REQUIRE_THROWS_AS(w.validate(), ValidationError);
  w.values = {0.0, 1.0, 0.0};
  REQUIRE_THROWS_AS(w.validate(), ValidationError);

  WelfareRule bad_sub;
  bad_sub.n_max = 3;
  bad_sub.submodular = true;
  bad_sub.values = {0.0, 1.0, 1.5, 2.5};  // increments 1, .5, 1: not non-increasing
  REQUIRE_THROWS_AS(bad_sub.validate(), ValidationError);

  WelfareRule super;
  super.n_max = 3;
  super.supermodular = true;
  super.values = {0.0, 1.0, 4.0, 9.0};
  REQUIRE_NOTHROW(super.validate());

  UtilityRule f;
  f.n_max = 2;
  f.values = {0.0, 1.0, -0.1};
  REQUIRE_THROWS_AS(f.validate(), ValidationError);
}

TEST_CASE("curvature") {
  REQUIRE(curvature(set_covering()) == Approx(1.0));
  REQUIRE(curvature(additive_rule()) == Approx(0.0));
  REQUIRE(curvature(b_covering(2, 0.5, 10)) == Approx(0.5));

  WelfareRule not_flagged;
  not_flagged.n_max = 2;
  not_flagged.values = {0.0, 1.0, 2.0};
  REQUIRE_THROWS_AS(curvature(not_flagged), ValidationError);
}

TEST_CASE("steepness") {
  // submodular with w(1)=1 always 1, attained at j=1
  REQUIRE(steepness(set_covering()) == Approx(1.0));
  REQUIRE(steepness(b_covering(3, 0.7, 20)) == Approx(1.0));

  WelfareRule sq;
  sq.n_max = 3;
  sq.supermodular = true;
  sq.values = {0.0, 1.0, 4.0, 9.0};
  REQUIRE(steepness(sq) == Approx(3.0));  // max of {1, 2, 3}

  WelfareRule one;
  one.n_max = 1;
  one.values = {0.0, 1.0};
  REQUIRE(steepness(one) == Approx(1.0));
}

namespace {

// independent reconstruction oracle: sum_b alpha_b * b_covering(b,c)(j)
double reconstruct(const std::vector<double>& alpha, double c, int j, int n_max) {
  double total = 0.0;
  for (int b = 1; b < n_max; ++b) {
    double wbj = j <= b ? j : b + (1.0 - c) * (j - b);
    total += alpha[static_cast<std::size_t>(b)] * wbj;
  }
  return total;
}

}  // namespace

TEST_CASE("basis_decompose") {
  SECTION("basis element maps to itself") {
    WelfareRule w = b_covering(3, 0.6, 16);
    std::vector<double> alpha = basis_decompose(w);
    for (int b = 1; b < 16; ++b) REQUIRE(alpha[static_cast<std::size_t>(b)] == Approx(b == 3 ? 1.0 : 0.0).margin(1e-12));
  }

  SECTION("set covering concentrates on b = 1") {
    std::vector<double> alpha = basis_decompose(set_covering(16));
    REQUIRE(alpha[1] == Approx(1.0));
    for (int b = 2; b < 16; ++b) REQUIRE(alpha[static_cast<std::size_t>(b)] == Approx(0.0).margin(1e-12));
  }

  SECTION("sensor rule has alpha_b = 2^-b") {
    WelfareRule w = sensor_base_rule(0.5, 40);
    std::vector<double> alpha = basis_decompose(w);
    double total = 0.0;
    for (int b = 1; b < 40; ++b) {
      // oracle: second difference of w over the measured curvature
      double second_diff = 2.0 * w.value(b) - w.value(b - 1) - w.value(b + 1);
      REQUIRE(alpha[static_cast<std::size_t>(b)] == Approx(second_diff / curvature(w)));
      REQUIRE(alpha[static_cast<std::size_t>(b)] == Approx(std::pow(2.0, -b)).epsilon(1e-9));
      total += alpha[static_cast<std::size_t>(b)];
    }
    REQUIRE(total == Approx(1.0).epsilon(1e-9));
  }

  SECTION("reconstruction matches pointwise on random submodular rules") {
    SplitMix64 rng(12345);
    for (int trial = 0; trial < 40; ++trial) {
      int n = 6 + static_cast<int>(rng.below(10));
      WelfareRule w;
      w.n_max = n;
      w.submodular = true;
      w.values.assign(static_cast<std::size_t>(n) + 1, 0.0);
      double inc = 1.0;
      w.values[1] = 1.0;
      for (int j = 2; j <= n; ++j) {
        inc *= 0.3 + 0.7 * rng.uniform01();  // shrinking increments
        w.values[static_cast<std::size_t>(j)] = w.values[static_cast<std::size_t>(j - 1)] + inc;
      }
      w.validate();
      double c = curvature(w);
      if (c <= 1e-9) continue;
      std::vector<double> alpha = basis_decompose(w);
      for (int b = 1; b < n; ++b) REQUIRE(alpha[static_cast<std::size_t>(b)] >= 0.0);
      for (int j = 0; j <= n - 1; ++j)
        REQUIRE(reconstruct(alpha, c, j, n) == Approx(w.value(j)).margin(1e-9));
    }
  }

  SECTION("zero curvature is rejected") {
    REQUIRE_THROWS_AS(basis_decompose(additive_rule()), InfeasibleError);
  }
}

TEST_CASE("tail extensions") {
  WelfareRule w = b_covering(2, 0.25, 6);
  REQUIRE(welfare_tail(w, 6) == Approx(w.value(6)));
  REQUIRE(welfare_tail(w, 9) == Approx(2.0 + 0.75 * 7));  // affine continuation

  UtilityRule f;
  f.n_max = 3;
  f.values = {0.0, 1.0, 0.5, 0.25};
  REQUIRE(utility_tail(f, 3) == Approx(0.25));
  REQUIRE(utility_tail(f, 10) == Approx(0.25));
}
