#pragma once

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "rag/constructions.hpp"
#include "rag/design.hpp"
#include "rag/dynamics.hpp"
#include "rag/efficiency.hpp"
#include "rag/experiments.hpp"
#include "rag/game.hpp"

namespace rag {

using nlohmann::json;

// Game files:
//   players:   integer
//   rules:     { welfare: [{name, values (w(0..N)), flags}], utility: [{name, values (f(1..N))}] }
//   resources: [{welfare: name, utility: name, scale}]
//   actions:   per player, list of resource-index arrays; entry 0 must be []
// Construction metadata rides along under "construction" when present.

inline json welfare_to_json(const WelfareRule& w, const std::string& name) {
  json flags = json::array();
  if (w.submodular) flags.push_back("submodular");
  if (w.supermodular) flags.push_back("supermodular");
  return json{{"name", name}, {"values", w.values}, {"flags", flags}};
}

inline json game_to_json(const ResourceGame& game, const ConstructionSpec* spec = nullptr) {
  json j;
  j["players"] = game.n_players;
  json welfare = json::array(), utility = json::array();
  for (std::size_t i = 0; i < game.welfare_rules.size(); ++i) {
    std::string name = game.welfare_rules[i].label.empty() ? "w" + std::to_string(i)
                                                           : game.welfare_rules[i].label;
    welfare.push_back(welfare_to_json(game.welfare_rules[i], name));
  }
  for (std::size_t i = 0; i < game.utility_rules.size(); ++i) {
    const auto& f = game.utility_rules[i];
    std::vector<double> vals(f.values.begin() + 1, f.values.end());
    utility.push_back(json{{"name", "f" + std::to_string(i)}, {"values", vals}});
  }
  j["rules"] = json{{"welfare", welfare}, {"utility", utility}};
  json resources = json::array();
  for (const auto& r : game.resources)
    resources.push_back(json{{"welfare", welfare[static_cast<std::size_t>(r.welfare_rule)]["name"]},
                             {"utility", utility[static_cast<std::size_t>(r.utility_rule)]["name"]},
                             {"scale", r.scale}});
  j["resources"] = resources;
  j["actions"] = game.action_sets;
  if (spec) {
    json params(spec->params);
    j["construction"] = json{{"family", spec->family},
                             {"params", params},
                             {"claimed_bound", spec->claimed_bound},
                             {"bound_kind", spec->bound_kind == BoundKind::pob_upper ? "pob_upper"
                                            : spec->bound_kind == BoundKind::poa_value ? "poa_value"
                                                                                       : "pob_value"}};
  }
  return j;
}

inline ResourceGame game_from_json(const json& j) {
  try {
    ResourceGame game;
    game.n_players = j.at("players").get<int>();
    std::map<std::string, int> w_index, f_index;
    for (const auto& wj : j.at("rules").at("welfare")) {
      WelfareRule w;
      w.values = wj.at("values").get<std::vector<double>>();
      w.n_max = static_cast<int>(w.values.size()) - 1;
      w.label = wj.at("name").get<std::string>();
      if (wj.contains("flags"))
        for (const auto& fl : wj.at("flags")) {
          if (fl == "submodular") w.submodular = true;
          if (fl == "supermodular") w.supermodular = true;
        }
      w_index[w.label] = static_cast<int>(game.welfare_rules.size());
      game.welfare_rules.push_back(std::move(w));
    }
    for (const auto& fj : j.at("rules").at("utility")) {
      UtilityRule f;
      std::vector<double> vals = fj.at("values").get<std::vector<double>>();
      f.values.assign(1, 0.0);
      f.values.insert(f.values.end(), vals.begin(), vals.end());
      f.n_max = static_cast<int>(vals.size());
      f_index[fj.at("name").get<std::string>()] = static_cast<int>(game.utility_rules.size());
      game.utility_rules.push_back(std::move(f));
    }
    for (const auto& rj : j.at("resources")) {
      Resource r;
      auto wi = w_index.find(rj.at("welfare").get<std::string>());
      auto fi = f_index.find(rj.at("utility").get<std::string>());
      if (wi == w_index.end() || fi == f_index.end())
        throw ValidationError("game file: resource references unknown rule name");
      r.welfare_rule = wi->second;
      r.utility_rule = fi->second;
      r.scale = rj.value("scale", 1.0);
      game.resources.push_back(r);
    }
    game.action_sets = j.at("actions").get<std::vector<std::vector<std::vector<int>>>>();
    game.validate();
    return game;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("game file: ") + e.what());
  }
}

inline void save_game(const std::string& path, const ResourceGame& game,
                      const ConstructionSpec* spec = nullptr) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open output file: " + path);
  out << game_to_json(game, spec).dump(2) << "\n";
}

inline ResourceGame load_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open game file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("game file: ") + e.what());
  }
  return game_from_json(j);
}

// ---------------------------------------------------------------------------
// reports

inline json report_to_json(const EfficiencyReport& rep) {
  return json{{"metric", rep.metric == EfficiencyMetric::pob_k ? "pob_k" : "poa"},
              {"value", rep.value},
              {"k", rep.k},
              {"witness_worst", rep.witness_worst.choices},
              {"witness_opt", rep.witness_opt.choices},
              {"exact", rep.exact}};
}

inline json design_to_json(const DesignResult& d) {
  std::vector<double> vals(d.f.values.begin() + 1, d.f.values.end());
  return json{{"method", d.method},
              {"beta", d.beta},
              {"guarantee", d.guarantee()},
              {"params", json(d.params)},
              {"f", vals}};
}

inline void design_to_csv(const DesignResult& d, std::ostream& out) {
  out << "j,f\n";
  for (int j = 1; j <= d.f.n_max; ++j) out << j << "," << d.f.value(j) << "\n";
}

// Trajectory dump: (step, player, action_index, welfare, potential); the
// starting row carries player -1.
inline void trajectory_to_csv(const ResourceGame& game, const std::vector<JointAction>& traj,
                              std::ostream& out) {
  out << "step,player,action_index,welfare,potential\n";
  for (std::size_t t = 0; t < traj.size(); ++t) {
    int player = t == 0 ? -1 : static_cast<int>((t - 1) % static_cast<std::size_t>(game.n_players));
    int action = player < 0 ? -1 : traj[t].choices[static_cast<std::size_t>(player)];
    out << t << "," << player << "," << action << "," << welfare(game, traj[t]) << ","
        << potential(game, traj[t]) << "\n";
  }
}

inline void experiment_to_csv(const ExperimentReport& rep, std::ostream& out) {
  out << "design,round,worst,q1,median,q3,mean\n";
  for (std::size_t d = 0; d < rep.designs.size(); ++d) {
    std::vector<RoundStats> per_round = round_summaries(rep, d);
    for (int r = 0; r < rep.config.rounds; ++r) {
      const RoundStats& s = per_round[static_cast<std::size_t>(r)];
      out << design_name(rep.designs[d]) << "," << (r + 1) << "," << s.worst << "," << s.q1 << ","
          << s.median << "," << s.q3 << "," << s.mean << "\n";
    }
  }
}

inline void replay_to_csv(const ExperimentReport& rep, std::ostream& out) {
  out << "instance,stream_key\n";
  for (std::size_t i = 0; i < rep.instance_keys.size(); ++i)
    out << i << "," << rep.instance_keys[i] << "\n";
}

}  // namespace rag
