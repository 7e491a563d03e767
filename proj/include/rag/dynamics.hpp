#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "rag/game.hpp"

namespace rag {

enum class TieMode { first_index, worst_welfare, enumerate_all };

// Best-response ties are resolved by an explicit policy; worst-case analyses
// should enumerate every branch.  `tolerance` is in utility units.
struct TiePolicy {
  TieMode mode = TieMode::first_index;
  double tolerance = 1e-9;
};

inline constexpr std::size_t kDefaultBranchCap = 1'000'000;

// All actions within `tol` of player i's best achievable utility against
// a_{-i}; the exact argmax is always a member.
inline std::vector<int> best_responses(const ResourceGame& game, int player, const JointAction& a,
                                       double tol) {
  check_valid(game, a);
  JointAction probe = a;
  double best = 0.0;
  std::vector<double> vals(static_cast<std::size_t>(game.n_actions(player)));
  for (int ai = 0; ai < game.n_actions(player); ++ai) {
    probe.choices[static_cast<std::size_t>(player)] = ai;
    double u = utility(game, player, probe);
    vals[static_cast<std::size_t>(ai)] = u;
    if (ai == 0 || u > best) best = u;
  }
  std::vector<int> out;
  for (int ai = 0; ai < game.n_actions(player); ++ai)
    if (vals[static_cast<std::size_t>(ai)] >= best - tol) out.push_back(ai);
  return out;
}

namespace detail {

inline int pick_response(const ResourceGame& game, int player, const JointAction& a,
                         const TiePolicy& policy) {
  if (policy.mode == TieMode::enumerate_all)
    throw ValidationError("enumerate-all ties have no single trajectory; use enumerate_outcomes");
  std::vector<int> cands = best_responses(game, player, a, policy.tolerance);
  if (policy.mode == TieMode::worst_welfare) {
    JointAction probe = a;
    int best_a = cands.front();
    double worst = 0.0;
    bool first = true;
    for (int ai : cands) {
      probe.choices[static_cast<std::size_t>(player)] = ai;
      double w = welfare(game, probe);
      if (first || w < worst) { worst = w; best_a = ai; first = false; }
    }
    return best_a;
  }
  return cands.front();  // first_index (ties resolved toward the lowest index)
}

}  // namespace detail

// One k-round round-robin trajectory from the empty allocation: step tau
// updates player (tau mod n).  Length k*n + 1.
inline std::vector<JointAction> round_robin_walk(const ResourceGame& game, int k,
                                                 const TiePolicy& policy = TiePolicy{}) {
  if (k < 1) throw ValidationError("round_robin_walk requires k >= 1");
  std::vector<JointAction> traj;
  traj.reserve(static_cast<std::size_t>(k) * game.n_players + 1);
  JointAction cur = all_empty(game);
  traj.push_back(cur);
  for (int tau = 0; tau < k * game.n_players; ++tau) {
    int player = tau % game.n_players;
    cur.choices[static_cast<std::size_t>(player)] = detail::pick_response(game, player, cur, policy);
    traj.push_back(cur);
  }
  return traj;
}

// The reachable outcome set S(k) with one witness trajectory per outcome.
struct WalkOutcome {
  std::vector<JointAction> outcomes;                 // sorted, deduplicated
  std::vector<std::vector<JointAction>> witnesses;   // parallel to outcomes
  std::size_t branch_count = 0;                      // expanded search nodes
  bool truncated = false;                            // branch cap hit: subset of S(k)
};

// Depth-first enumeration over every tie branch.  States are memoized by
// (step, joint action) so shared suffixes are expanded once.
inline WalkOutcome enumerate_outcomes(const ResourceGame& game, int k, double tol = 1e-9,
                                      std::size_t branch_cap = kDefaultBranchCap) {
  if (k < 1) throw ValidationError("enumerate_outcomes requires k >= 1");
  if (branch_cap < 1) throw ValidationError("enumerate_outcomes requires branch_cap >= 1");
  const int total_steps = k * game.n_players;
  WalkOutcome result;
  std::map<JointAction, std::vector<JointAction>> found;  // outcome -> witness
  std::set<std::pair<int, JointAction>> visited;
  std::vector<JointAction> stack_traj;
  stack_traj.push_back(all_empty(game));

  auto dfs = [&](auto&& self, int step, const JointAction& cur) -> void {
    if (result.truncated) return;
    if (!visited.insert({step, cur}).second) return;
    if (++result.branch_count > branch_cap) { result.truncated = true; return; }
    if (step == total_steps) {
      if (!found.count(cur)) found.emplace(cur, stack_traj);
      return;
    }
    int player = step % game.n_players;
    for (int ai : best_responses(game, player, cur, tol)) {
      JointAction next = cur;
      next.choices[static_cast<std::size_t>(player)] = ai;
      stack_traj.push_back(next);
      self(self, step + 1, next);
      stack_traj.pop_back();
    }
  };
  dfs(dfs, 0, all_empty(game));

  for (auto& [outcome, witness] : found) {
    result.outcomes.push_back(outcome);
    result.witnesses.push_back(std::move(witness));
  }
  return result;
}

// Sequential welfare maximization with first-index ties: agent i maximizes
// W(a_1..a_{i-1}, a_i, empty...) given the prefix.
inline JointAction greedy_solution(const ResourceGame& game) {
  JointAction cur = all_empty(game);
  for (int i = 0; i < game.n_players; ++i) {
    int best_a = 0;
    double best_w = -1.0;
    for (int ai = 0; ai < game.n_actions(i); ++ai) {
      cur.choices[static_cast<std::size_t>(i)] = ai;
      double w = welfare(game, cur);
      if (w > best_w) { best_w = w; best_a = ai; }
    }
    cur.choices[static_cast<std::size_t>(i)] = best_a;
  }
  return cur;
}

inline bool is_nash(const ResourceGame& game, const JointAction& a, double tol) {
  check_valid(game, a);
  JointAction probe = a;
  for (int i = 0; i < game.n_players; ++i) {
    double own = utility(game, i, a);
    for (int ai = 0; ai < game.n_actions(i); ++ai) {
      probe.choices[static_cast<std::size_t>(i)] = ai;
      if (utility(game, i, probe) > own + tol) return false;
    }
    probe.choices[static_cast<std::size_t>(i)] = a.choices[static_cast<std::size_t>(i)];
  }
  return true;
}

// Strict equilibrium: every player's action is the unique exact maximizer.
inline bool is_strict_nash(const ResourceGame& game, const JointAction& a) {
  check_valid(game, a);
  JointAction probe = a;
  for (int i = 0; i < game.n_players; ++i) {
    double own = utility(game, i, a);
    for (int ai = 0; ai < game.n_actions(i); ++ai) {
      if (ai == a.choices[static_cast<std::size_t>(i)]) continue;
      probe.choices[static_cast<std::size_t>(i)] = ai;
      if (utility(game, i, probe) >= own) return false;
    }
    probe.choices[static_cast<std::size_t>(i)] = a.choices[static_cast<std::size_t>(i)];
  }
  return true;
}

// Rosenthal-style potential Phi(a) = sum_r alpha_r sum_{j<=|a|_r} f_r(j):
// a unilateral deviation changes Phi by exactly the deviator's utility change.
inline double potential(const ResourceGame& game, const JointAction& a) {
  std::vector<int> count = load_count(game, a);
  double total = 0.0;
  for (std::size_t r = 0; r < game.resources.size(); ++r) {
    const Resource& res = game.resources[r];
    const UtilityRule& f = game.utility_rules[static_cast<std::size_t>(res.utility_rule)];
    if (count[r] > f.n_max) throw ResourceLimitError("resource load exceeds utility truncation");
    for (int j = 1; j <= count[r]; ++j) total += res.scale * f.values[static_cast<std::size_t>(j)];
  }
  return total;
}

}  // namespace rag
