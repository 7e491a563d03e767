#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

#include "rag/errors.hpp"
#include "rag/rules.hpp"

namespace rag {

// A resource binds one welfare rule and one utility rule by index, plus a
// non-negative scale that multiplies both identically.  An integer scale k
// is equivalent to k identical unit resources.
struct Resource {
  int welfare_rule = 0;
  int utility_rule = 0;
  double scale = 1.0;
};

struct ResourceGame {
  int n_players = 0;
  std::vector<WelfareRule> welfare_rules;
  std::vector<UtilityRule> utility_rules;
  std::vector<Resource> resources;
  // action_sets[i][a] is the set of resource indices of player i's action a;
  // action 0 is always the empty action.
  std::vector<std::vector<std::vector<int>>> action_sets;

  int n_actions(int player) const { return static_cast<int>(action_sets[static_cast<std::size_t>(player)].size()); }

  const std::vector<int>& action(int player, int a) const {
    return action_sets[static_cast<std::size_t>(player)][static_cast<std::size_t>(a)];
  }

  void validate() const {
    if (n_players < 1) throw ValidationError("game requires at least one player");
    if (action_sets.size() != static_cast<std::size_t>(n_players))
      throw ValidationError("action_sets size must equal n_players");
    for (const auto& w : welfare_rules) w.validate();
    for (const auto& f : utility_rules) f.validate();
    for (const auto& r : resources) {
      if (r.welfare_rule < 0 || r.welfare_rule >= static_cast<int>(welfare_rules.size()))
        throw ValidationError("resource references unknown welfare rule");
      if (r.utility_rule < 0 || r.utility_rule >= static_cast<int>(utility_rules.size()))
        throw ValidationError("resource references unknown utility rule");
      if (!(r.scale >= 0.0)) throw ValidationError("resource scale must be non-negative");
    }
    for (int i = 0; i < n_players; ++i) {
      const auto& acts = action_sets[static_cast<std::size_t>(i)];
      if (acts.empty() || !acts[0].empty())
        throw ValidationError("every player needs the empty action at index 0");
      for (std::size_t a = 1; a < acts.size(); ++a)
        if (acts[a].empty())
          throw ValidationError("empty action must appear exactly once, at index 0");
      for (const auto& act : acts) {
        std::set<int> seen;
        for (int r : act) {
          if (r < 0 || r >= static_cast<int>(resources.size()))
            throw ValidationError("action references unknown resource");
          if (!seen.insert(r).second) throw ValidationError("action lists a resource twice");
        }
      }
    }
  }
};

struct JointAction {
  std::vector<int> choices;  // one action index per player

  auto operator<=>(const JointAction&) const = default;
};

inline JointAction all_empty(const ResourceGame& game) {
  return JointAction{std::vector<int>(static_cast<std::size_t>(game.n_players), 0)};
}

inline void check_valid(const ResourceGame& game, const JointAction& a) {
  if (a.choices.size() != static_cast<std::size_t>(game.n_players))
    throw ValidationError("joint action length does not match player count");
  for (int i = 0; i < game.n_players; ++i)
    if (a.choices[static_cast<std::size_t>(i)] < 0 || a.choices[static_cast<std::size_t>(i)] >= game.n_actions(i))
      throw ValidationError("joint action index out of range");
}

// |a|_r for every resource.
inline std::vector<int> load_count(const ResourceGame& game, const JointAction& a) {
  check_valid(game, a);
  std::vector<int> count(game.resources.size(), 0);
  for (int i = 0; i < game.n_players; ++i)
    for (int r : game.action(i, a.choices[static_cast<std::size_t>(i)]))
      ++count[static_cast<std::size_t>(r)];
  return count;
}

inline double welfare_from_counts(const ResourceGame& game, const std::vector<int>& count) {
  double total = 0.0;
  for (std::size_t r = 0; r < game.resources.size(); ++r) {
    if (count[r] == 0) continue;
    const Resource& res = game.resources[r];
    const WelfareRule& w = game.welfare_rules[static_cast<std::size_t>(res.welfare_rule)];
    if (count[r] > w.n_max) throw ResourceLimitError("resource load exceeds welfare truncation");
    total += res.scale * w.values[static_cast<std::size_t>(count[r])];
  }
  return total;
}

inline double welfare(const ResourceGame& game, const JointAction& a) {
  return welfare_from_counts(game, load_count(game, a));
}

inline double utility_from_counts(const ResourceGame& game, int player, const JointAction& a,
                                  const std::vector<int>& count) {
  double total = 0.0;
  for (int r : game.action(player, a.choices[static_cast<std::size_t>(player)])) {
    const Resource& res = game.resources[static_cast<std::size_t>(r)];
    const UtilityRule& f = game.utility_rules[static_cast<std::size_t>(res.utility_rule)];
    int c = count[static_cast<std::size_t>(r)];
    if (c > f.n_max) throw ResourceLimitError("resource load exceeds utility truncation");
    total += res.scale * f.values[static_cast<std::size_t>(c)];
  }
  return total;
}

inline double utility(const ResourceGame& game, int player, const JointAction& a) {
  return utility_from_counts(game, player, a, load_count(game, a));
}

// Relabels players: player i of the result is player perm[i] of the input.
// Welfare is symmetric, so this only changes who moves when.
inline ResourceGame permute_players(const ResourceGame& game, const std::vector<int>& perm) {
  if (perm.size() != static_cast<std::size_t>(game.n_players))
    throw ValidationError("permutation length does not match player count");
  ResourceGame out = game;
  for (int i = 0; i < game.n_players; ++i) {
    int p = perm[static_cast<std::size_t>(i)];
    if (p < 0 || p >= game.n_players) throw ValidationError("permutation entry out of range");
    out.action_sets[static_cast<std::size_t>(i)] = game.action_sets[static_cast<std::size_t>(p)];
  }
  return out;
}

// Product |A_1| * ... * |A_n|, saturating at cap.
inline std::uint64_t joint_space_size(const ResourceGame& game, std::uint64_t cap) {
  std::uint64_t total = 1;
  for (int i = 0; i < game.n_players; ++i) {
    total *= static_cast<std::uint64_t>(game.n_actions(i));
    if (total > cap) return cap + 1;
  }
  return total;
}

}  // namespace rag
