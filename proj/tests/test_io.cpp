#include <catch2/catch_amalgamated.hpp>

#include <rag/rag.hpp>

#include <sstream>

#include "support.hpp"

using namespace rag;
using ragtest::make_game;
using ragtest::table;
using Catch::Approx;

TEST_CASE("game json round trip") {
  Construction con = ci_chain_game(3, 0.75);
  json j = game_to_json(con.game, &con.spec);
  ResourceGame back = game_from_json(j);
  REQUIRE(back.n_players == con.game.n_players);
  REQUIRE(back.resources.size() == con.game.resources.size());
  REQUIRE(back.action_sets == con.game.action_sets);
  // semantic equality: same welfare and utilities everywhere
  SplitMix64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    JointAction a = all_empty(back);
    for (int i = 0; i < back.n_players; ++i)
      a.choices[static_cast<std::size_t>(i)] =
          static_cast<int>(rng.below(static_cast<std::uint64_t>(back.n_actions(i))));
    REQUIRE(welfare(back, a) == Approx(welfare(con.game, a)));
    for (int i = 0; i < back.n_players; ++i)
      REQUIRE(utility(back, i, a) == Approx(utility(con.game, i, a)));
  }
  REQUIRE(j.at("construction").at("family") == "ci-chain");
}

TEST_CASE("game json validation") {
  Construction con = two_agent_curvature_game(1.0, 1.0, 4);
  json good = game_to_json(con.game);

  SECTION("missing empty action") {
    json bad = good;
    bad["actions"][0].erase(0);
    REQUIRE_THROWS_AS(game_from_json(bad), ValidationError);
  }

  SECTION("unknown rule name") {
    json bad = good;
    bad["resources"][0]["welfare"] = "nope";
    REQUIRE_THROWS_AS(game_from_json(bad), ValidationError);
  }

  SECTION("resource index out of range") {
    json bad = good;
    bad["actions"][0][1] = {99};
    REQUIRE_THROWS_AS(game_from_json(bad), ValidationError);
  }

  SECTION("missing fields") {
    json bad = good;
    bad.erase("players");
    REQUIRE_THROWS_AS(game_from_json(bad), ValidationError);
  }
}

TEST_CASE("report and design serialization") {
  Construction con = two_agent_curvature_game(1.0, 1.0, 8);
  EfficiencyReport rep = pob_exhaustive(con.game, 1);
  json jr = report_to_json(rep);
  REQUIRE(jr.at("metric") == "pob_k");
  REQUIRE(jr.at("value").get<double>() == Approx(0.5));
  REQUIRE(jr.at("exact") == true);

  DesignResult d = bcovering_optimal_f(1, 0.5, 6);
  json jd = design_to_json(d);
  REQUIRE(jd.at("beta").get<double>() == Approx(4.0 / 3.0));
  REQUIRE(jd.at("guarantee").get<double>() == Approx(0.75));
  REQUIRE(jd.at("f").size() == 6);

  std::ostringstream csv;
  design_to_csv(d, csv);
  REQUIRE(csv.str().rfind("j,f\n1,1\n", 0) == 0);
}

TEST_CASE("trajectory csv") {
  ResourceGame g = make_game(2, set_covering(4), table({1.0, 0.5}), {1.0},
                             {{{}, {0}}, {{}, {0}}});
  auto traj = round_robin_walk(g, 1);
  std::ostringstream out;
  trajectory_to_csv(g, traj, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  REQUIRE(line == "step,player,action_index,welfare,potential");
  std::getline(in, line);
  REQUIRE(line.rfind("0,-1,-1,", 0) == 0);
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  REQUIRE(rows == static_cast<int>(traj.size()));
}

TEST_CASE("experiment csv shape") {
  SensorConfig cfg;
  cfg.n_instances = 3;
  cfg.n_agents = 4;
  cfg.n_resources = 8;
  cfg.rounds = 2;
  ExperimentReport rep = run_sensor_experiment(cfg);
  std::ostringstream out;
  experiment_to_csv(rep, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  REQUIRE(line == "design,round,worst,q1,median,q3,mean");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  REQUIRE(rows == 3 * cfg.rounds);

  std::ostringstream rp;
  replay_to_csv(rep, rp);
  REQUIRE(rp.str().rfind("instance,stream_key\n", 0) == 0);
}
