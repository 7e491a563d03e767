#pragma once

#include <rag/rag.hpp>

#include <vector>

namespace ragtest {

inline rag::UtilityRule table(std::vector<double> vals) {
  rag::UtilityRule f;
  f.n_max = static_cast<int>(vals.size());
  f.values.assign(1, 0.0);
  f.values.insert(f.values.end(), vals.begin(), vals.end());
  return f;
}

inline rag::ResourceGame make_game(int n_players, const rag::WelfareRule& w,
                                   const rag::UtilityRule& f, std::vector<double> scales,
                                   std::vector<std::vector<std::vector<int>>> actions) {
  rag::ResourceGame g;
  g.n_players = n_players;
  g.welfare_rules = {w};
  g.utility_rules = {f};
  for (double s : scales) g.resources.push_back({0, 0, s});
  g.action_sets = std::move(actions);
  g.validate();
  return g;
}

// Arbitrary small game: random positive welfare table, random non-negative
// utility table, random scaled resources and random action subsets.
inline rag::ResourceGame random_game(rag::SplitMix64& rng, int max_players = 4,
                                     int max_resources = 6, int max_actions = 3) {
  rag::ResourceGame g;
  g.n_players = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_players)));
  int n_res = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_resources)));
  int n_max = g.n_players + 1;

  rag::WelfareRule w;
  w.n_max = n_max;
  w.values.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (int j = 1; j <= n_max; ++j)
    w.values[static_cast<std::size_t>(j)] =
        w.values[static_cast<std::size_t>(j - 1)] + 0.05 + rng.uniform01();
  g.welfare_rules = {w};

  rag::UtilityRule f;
  f.n_max = n_max;
  f.values.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (int j = 1; j <= n_max; ++j) f.values[static_cast<std::size_t>(j)] = rng.uniform01();
  g.utility_rules = {f};

  for (int r = 0; r < n_res; ++r) g.resources.push_back({0, 0, 0.25 + 1.75 * rng.uniform01()});

  g.action_sets.resize(static_cast<std::size_t>(g.n_players));
  for (int i = 0; i < g.n_players; ++i) {
    auto& acts = g.action_sets[static_cast<std::size_t>(i)];
    acts.push_back({});
    int extra = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_actions - 1)));
    for (int a = 0; a < extra; ++a) {
      std::vector<int> subset;
      for (int r = 0; r < n_res; ++r)
        if (rng.below(2)) subset.push_back(r);
      if (subset.empty()) subset.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(n_res))));
      acts.push_back(std::move(subset));
    }
  }
  g.validate();
  return g;
}

// Strict-improvement best-response sweep to a fixed point (potential ascent);
// returns the final profile.
inline rag::JointAction strict_improvement_fixed_point(const rag::ResourceGame& g,
                                                       int max_rounds = 1000) {
  rag::JointAction cur = rag::all_empty(g);
  for (int round = 0; round < max_rounds; ++round) {
    bool moved = false;
    for (int i = 0; i < g.n_players; ++i) {
      double own = rag::utility(g, i, cur);
      int best_a = cur.choices[static_cast<std::size_t>(i)];
      double best_u = own;
      rag::JointAction probe = cur;
      for (int ai = 0; ai < g.n_actions(i); ++ai) {
        probe.choices[static_cast<std::size_t>(i)] = ai;
        double u = rag::utility(g, i, probe);
        if (u > best_u) { best_u = u; best_a = ai; }
      }
      if (best_a != cur.choices[static_cast<std::size_t>(i)]) {
        cur.choices[static_cast<std::size_t>(i)] = best_a;
        moved = true;
      }
    }
    if (!moved) return cur;
  }
  throw std::runtime_error("strict improvement did not converge");
}

}  // namespace ragtest
