#include <catch2/catch_amalgamated.hpp>

#include <rag/rag.hpp>

#include <cmath>

#include "support.hpp"

using namespace rag;
using Catch::Approx;

TEST_CASE("sensor base rule") {
  WelfareRule w = sensor_base_rule(0.5, 8);
  // geometric oracle: w(j) = 2 (1 - 2^-j)
  std::vector<double> expect{0.0, 1.0, 1.5, 1.75, 1.875, 1.9375, 1.96875, 1.984375, 1.9921875};
  for (int j = 0; j <= 8; ++j) REQUIRE(w.value(j) == Approx(expect[static_cast<std::size_t>(j)]));
  REQUIRE(curvature(sensor_base_rule(0.5, 64)) == Approx(1.0));
}

TEST_CASE("sensor instance") {
  SensorConfig cfg;
  cfg.n_instances = 1;
  UtilityRule f = constant_utility(24);

  SECTION("event probabilities form a distribution") {
    for (int inst : {0, 7, 42}) {
      ResourceGame g = sensor_instance(cfg, inst, f);
      double total = 0.0;
      for (const auto& r : g.resources) total += r.scale / cfg.detect_prob;
      REQUIRE(total == Approx(1.0).margin(1e-12));
      REQUIRE(static_cast<int>(g.resources.size()) == cfg.n_resources);
    }
  }

  SECTION("actions are consecutive runs") {
    ResourceGame g = sensor_instance(cfg, 3, f);
    for (int i = 0; i < g.n_players; ++i) {
      REQUIRE(g.n_actions(i) == cfg.actions_per_agent + 1);
      for (int a = 1; a < g.n_actions(i); ++a) {
        const auto& act = g.action(i, a);
        REQUIRE(static_cast<int>(act.size()) == cfg.action_width);
        for (std::size_t t = 1; t < act.size(); ++t) REQUIRE(act[t] == act[t - 1] + 1);
        REQUIRE(act.back() < cfg.n_resources);
      }
    }
  }

  SECTION("same index twice gives the same game") {
    ResourceGame a = sensor_instance(cfg, 5, f);
    ResourceGame b = sensor_instance(cfg, 5, f);
    REQUIRE(a.action_sets == b.action_sets);
    for (std::size_t r = 0; r < a.resources.size(); ++r)
      REQUIRE(a.resources[r].scale == b.resources[r].scale);
  }
}

TEST_CASE("interval DP equals brute force on shrunk configs") {
  for (int trial = 0; trial < 12; ++trial) {
    SensorConfig cfg;
    cfg.seed = 1000 + static_cast<std::uint64_t>(trial);
    cfg.n_agents = 5 + trial % 4;  // up to 8
    cfg.n_resources = 10;
    UtilityRule f = constant_utility(16);
    ResourceGame g = sensor_instance(cfg, 0, f);
    double dp = sensor_optimal_welfare(g, cfg);
    double brute = optimal_welfare(g).first;
    REQUIRE(dp == Approx(brute).margin(1e-12));
  }
}

TEST_CASE("sensor design tables") {
  UtilityRule f_opt = sensor_design_rule(SensorDesign::one_round_optimal, 0.5, 24);
  UtilityRule f_mc = sensor_design_rule(SensorDesign::marginal_contribution, 0.5, 24);
  UtilityRule f_poa = sensor_design_rule(SensorDesign::poa_optimal, 0.5, 24);
  REQUIRE(f_opt.value(1) == Approx(1.0).margin(1e-9));
  REQUIRE(f_mc.value(1) == Approx(1.0));
  REQUIRE(f_poa.value(1) == Approx(1.0).margin(1e-9));
  // mc is the geometric tail; the one-round table undercuts it, the
  // asymptotic table overshoots it
  for (int j = 2; j <= 8; ++j) {
    REQUIRE(f_mc.value(j) == Approx(std::pow(0.5, j - 1)));
    REQUIRE(f_opt.value(j) < f_mc.value(j));
    REQUIRE(f_poa.value(j) > f_mc.value(j));
  }
  REQUIRE(is_non_increasing(f_opt, 1e-9));
  REQUIRE(is_non_increasing(f_poa, 1e-9));
}

TEST_CASE("experiment determinism and sanity") {
  SensorConfig cfg;
  cfg.n_instances = 6;
  cfg.n_agents = 6;
  cfg.n_resources = 12;
  cfg.rounds = 3;
  ExperimentReport a = run_sensor_experiment(cfg);
  ExperimentReport b = run_sensor_experiment(cfg);
  REQUIRE(a.ratios == b.ratios);
  REQUIRE(a.instance_keys == b.instance_keys);

  for (const auto& per_design : a.ratios)
    for (const auto& per_instance : per_design)
      for (double r : per_instance) {
        REQUIRE(r <= 1.0 + 1e-9);
        REQUIRE(r >= 0.0);
      }

  RoundStats s = round_stats(a.ratios[0], 0);
  REQUIRE(s.worst <= s.q1);
  REQUIRE(s.q1 <= s.median);
  REQUIRE(s.median <= s.q3);
}

TEST_CASE("converged play is a Nash equilibrium") {
  SensorConfig cfg;
  cfg.n_agents = 8;
  cfg.n_resources = 14;
  UtilityRule f = sensor_design_rule(SensorDesign::one_round_optimal, 0.5, 16);
  for (int inst = 0; inst < 10; ++inst) {
    ResourceGame g = sensor_instance(cfg, inst, f);
    JointAction fixed = ragtest::strict_improvement_fixed_point(g);
    REQUIRE(is_nash(g, fixed, 0.0));
  }
}

TEST_CASE("non-default action counts fall back to exhaustive search") {
  SensorConfig cfg;
  cfg.n_agents = 5;
  cfg.n_resources = 10;
  cfg.actions_per_agent = 3;
  UtilityRule f = constant_utility(12);
  ResourceGame g = sensor_instance(cfg, 2, f);
  REQUIRE(g.n_actions(0) == 4);
  REQUIRE(sensor_optimal_welfare(g, cfg) == Approx(optimal_welfare(g).first));
}

TEST_CASE("sharded runs match serial runs") {
  SensorConfig cfg;
  cfg.n_instances = 9;
  cfg.n_agents = 6;
  cfg.n_resources = 12;
  cfg.rounds = 2;
  auto designs = std::vector<SensorDesign>{SensorDesign::one_round_optimal,
                                           SensorDesign::marginal_contribution};
  ExperimentReport serial = run_sensor_experiment(cfg, designs, 1);
  ExperimentReport sharded = run_sensor_experiment(cfg, designs, 3);
  REQUIRE(serial.ratios == sharded.ratios);
  REQUIRE(serial.instance_keys == sharded.instance_keys);
}
