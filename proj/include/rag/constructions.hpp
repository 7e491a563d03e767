#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "rag/design.hpp"
#include "rag/game.hpp"
#include "rag/rules.hpp"

namespace rag {

enum class BoundKind { pob_upper, poa_value, pob_value };

struct ConstructionSpec {
  std::string family;
  std::map<std::string, double> params;
  double claimed_bound = 1.0;
  BoundKind bound_kind = BoundKind::pob_value;
};

struct Construction {
  ResourceGame game;
  ConstructionSpec spec;
};

namespace detail {

// Integer block sizes stand in for sets of identical unit resources; the
// scale field keeps welfare and utility consistent with the expanded game.
inline int rounded_block(double target, double& worst_rel_err) {
  int size = static_cast<int>(std::llround(target));
  if (target > 0.0) {
    double err = std::abs(size - target) / target;
    worst_rel_err = std::max(worst_rel_err, err);
  }
  return size;
}

}  // namespace detail

// Two agents over resource blocks R1, R2 (both of size x) and R3 of size
// round(f2 * x), welfare b_covering(1, c).  The agent-2 action order follows
// the f2 regime: for f2 <= 1 the walk reaches the bad outcome through R3,
// for f2 > 1 through stacking first.  Worst reachable outcomes stay at or
// below welfare (2 - c) x while the optimum reaches 2x (or (1 + f2) x).
inline Construction two_agent_curvature_game(double c, double f2, int x = 8) {
  if (c < 0.0 || c > 1.0) throw ValidationError("two_agent_curvature_game requires c in [0,1]");
  if (f2 < 0.0) throw ValidationError("two_agent_curvature_game requires f2 >= 0");
  if (x < 1) throw ValidationError("two_agent_curvature_game requires x >= 1");
  double rel_err = 0.0;
  const int r3 = detail::rounded_block(f2 * x, rel_err);

  ResourceGame game;
  game.n_players = 2;
  game.welfare_rules = {b_covering(1, c, 4)};
  UtilityRule f;
  f.n_max = 4;
  f.values = {0.0, 1.0, f2, f2, f2};
  game.utility_rules = {f};
  game.resources = {{0, 0, static_cast<double>(x)}, {0, 0, static_cast<double>(x)}};
  if (r3 > 0) game.resources.push_back({0, 0, static_cast<double>(r3)});

  game.action_sets.resize(2);
  game.action_sets[0] = {{}, {0}, {1}};
  if (f2 <= 1.0) {
    game.action_sets[1] = r3 > 0 ? std::vector<std::vector<int>>{{}, {2}, {0}}
                                 : std::vector<std::vector<int>>{{}, {0}};
  } else {
    game.action_sets[1] = std::vector<std::vector<int>>{{}, {0}, {2}};
  }
  game.validate();

  ConstructionSpec spec;
  spec.family = "two-agent-curvature";
  spec.params = {{"c", c}, {"f2", f2}, {"x", static_cast<double>(x)},
                 {"r3", static_cast<double>(r3)}, {"rounding_error", rel_err}};
  spec.claimed_bound = 1.0 - c / 2.0;
  spec.bound_kind = BoundKind::pob_upper;
  return {std::move(game), std::move(spec)};
}

// Chain of shared resources under marginal-contribution utilities: agent j
// either keeps its own link or takes its predecessor's link plus a scaled
// private resource.  One-round outcomes bottom out at welfare n against an
// optimum of (n-1)(1+c) + c, tending to the greedy guarantee 1/(1+c).
inline Construction ci_chain_game(int n, double c) {
  if (n < 2) throw ValidationError("ci_chain_game requires n >= 2");
  if (c < 0.0 || c > 1.0) throw ValidationError("ci_chain_game requires c in [0,1]");
  ResourceGame game;
  game.n_players = n;
  game.welfare_rules = {b_covering(1, c, 4)};
  game.utility_rules = {mc_utility(game.welfare_rules[0])};
  // blocks 0..n-2: shared links; n-1: the last agent's own resource;
  // n..2n-1: private resources scaled by c
  for (int j = 0; j < n; ++j) game.resources.push_back({0, 0, 1.0});
  for (int j = 0; j < n; ++j) game.resources.push_back({0, 0, c});
  game.action_sets.resize(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    std::vector<int> own = {i <= n - 1 ? i - 1 : n - 1};
    std::vector<int> opt = i == 1 ? std::vector<int>{n} : std::vector<int>{n - 1 + i, i - 2};
    game.action_sets[static_cast<std::size_t>(i - 1)] = {{}, own, opt};
  }
  game.validate();

  double ratio = n / ((n - 1) * (1.0 + c) + c);
  ConstructionSpec spec;
  spec.family = "ci-chain";
  spec.params = {{"n", static_cast<double>(n)}, {"c", c}};
  spec.claimed_bound = std::min(1.0, ratio);
  spec.bound_kind = BoundKind::pob_value;
  return {std::move(game), std::move(spec)};
}

// Set-covering stack-or-spread game: everyone may pile onto R1 (size v) or
// cover a private block sized v f(i); the last agent only has R1.  All-stack
// is reachable in one round and the exact ratio is v / (v + sum sizes).
inline Construction setcover_stack_game(int n, const UtilityRule& f, int v = 1000) {
  if (n < 1) throw ValidationError("setcover_stack_game requires n >= 1");
  if (v < 1) throw ValidationError("setcover_stack_game requires v >= 1");
  if (std::abs(f.value(1) - 1.0) > 1e-9) throw ValidationError("setcover_stack_game requires f(1) = 1");
  if (!is_non_increasing(f, 1e-9)) throw ValidationError("setcover_stack_game requires non-increasing f");
  if (f.n_max < n) throw ValidationError("setcover_stack_game: utility table shorter than n");

  ResourceGame game;
  game.n_players = n;
  game.welfare_rules = {set_covering(std::max(4, n + 1))};
  game.utility_rules = {f};
  game.resources = {{0, 0, static_cast<double>(v)}};
  double rel_err = 0.0;
  std::vector<int> block_of_agent(static_cast<std::size_t>(n), -1);
  double size_sum = 0.0;
  for (int i = 1; i <= n - 1; ++i) {
    double target = v * f.value(i);
    int size = detail::rounded_block(target, rel_err);
    if (target > 0.0 && size == 0)
      throw InfeasibleError("setcover_stack_game: rounding degeneracy, increase v");
    if (size > 0) {
      block_of_agent[static_cast<std::size_t>(i - 1)] = static_cast<int>(game.resources.size());
      game.resources.push_back({0, 0, static_cast<double>(size)});
      size_sum += size;
    }
  }
  game.action_sets.resize(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    int blk = i <= n - 1 ? block_of_agent[static_cast<std::size_t>(i - 1)] : -1;
    game.action_sets[static_cast<std::size_t>(i - 1)] =
        blk >= 0 ? std::vector<std::vector<int>>{{}, {0}, {blk}}
                 : std::vector<std::vector<int>>{{}, {0}};
  }
  game.validate();

  ConstructionSpec spec;
  spec.family = "setcover-stack";
  spec.params = {{"n", static_cast<double>(n)}, {"v", static_cast<double>(v)},
                 {"rounding_error", rel_err}};
  spec.claimed_bound = v / (v + size_sum);
  spec.bound_kind = BoundKind::pob_value;
  return {std::move(game), std::move(spec)};
}

// Stack-or-spread layout for the asymptotically optimal rule on b-covering
// welfare with curvature 1: block i is sized v f(i+1), the last agent owns
// only the stack, and strict preferences drive everyone onto it.  The
// one-round efficiency is (within rounding) b / sum_{i<=n} f(i), which
// decays to zero as n grows.
inline Construction poa_design_bad_game(int n, int b = 1, int v = 1000) {
  if (n < 1) throw ValidationError("poa_design_bad_game requires n >= 1");
  if (b < 1) throw ValidationError("poa_design_bad_game requires b >= 1");
  if (v < 1) throw ValidationError("poa_design_bad_game requires v >= 1");
  DesignResult design = poa_optimal_f(b, n + 2);
  const UtilityRule& f = design.f;

  ResourceGame game;
  game.n_players = n;
  game.welfare_rules = {b_covering(b, 1.0, std::max(4, n + 1))};
  game.utility_rules = {f};
  game.resources = {{0, 0, static_cast<double>(v)}};
  double rel_err = 0.0;
  std::vector<int> block_of_agent(static_cast<std::size_t>(n), -1);
  for (int i = 1; i <= n - 1; ++i) {
    double target = v * f.value(i + 1);
    int size = detail::rounded_block(target, rel_err);
    if (target > 0.0 && size == 0)
      throw InfeasibleError("poa_design_bad_game: rounding degeneracy, increase v");
    if (size > 0) {
      block_of_agent[static_cast<std::size_t>(i - 1)] = static_cast<int>(game.resources.size());
      game.resources.push_back({0, 0, static_cast<double>(size)});
    }
  }
  game.action_sets.resize(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    int blk = i <= n - 1 ? block_of_agent[static_cast<std::size_t>(i - 1)] : -1;
    game.action_sets[static_cast<std::size_t>(i - 1)] =
        blk >= 0 ? std::vector<std::vector<int>>{{}, {0}, {blk}}
                 : std::vector<std::vector<int>>{{}, {0}};
  }
  game.validate();

  double fsum = 0.0;
  for (int i = 1; i <= n; ++i) fsum += f.value(i);
  ConstructionSpec spec;
  spec.family = "poa-design-bad";
  spec.params = {{"n", static_cast<double>(n)}, {"b", static_cast<double>(b)},
                 {"v", static_cast<double>(v)}, {"rounding_error", rel_err}};
  spec.claimed_bound = b / fsum;
  spec.bound_kind = BoundKind::pob_upper;
  return {std::move(game), std::move(spec)};
}

// n+1 identical supermodular resources; each agent is indifferent between
// its private resource and the never-yet-stacked first one, so full spread
// survives any number of rounds at welfare n against the stacked optimum
// w(n).  Any normalized utility rule shows the effect; Shapley is the
// default.
inline Construction supermodular_stack_game(int n, const WelfareRule& w,
                                            const UtilityRule* f_opt = nullptr) {
  if (n < 1) throw ValidationError("supermodular_stack_game requires n >= 1");
  if (!w.supermodular) throw ValidationError("supermodular_stack_game requires a supermodular rule");
  if (std::abs(w.value(1) - 1.0) > 1e-9)
    throw ValidationError("supermodular_stack_game requires w(1) = 1");
  if (w.n_max < n) throw ValidationError("supermodular_stack_game: welfare table shorter than n");
  UtilityRule f = f_opt ? *f_opt : shapley_utility(w);
  if (std::abs(f.value(1) - 1.0) > 1e-9)
    throw ValidationError("supermodular_stack_game requires f(1) = 1");

  ResourceGame game;
  game.n_players = n;
  game.welfare_rules = {w};
  game.utility_rules = {f};
  for (int r = 0; r <= n; ++r) game.resources.push_back({0, 0, 1.0});
  game.action_sets.resize(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i)
    game.action_sets[static_cast<std::size_t>(i - 1)] = {{}, {i}, {0}};
  game.validate();

  ConstructionSpec spec;
  spec.family = "supermodular-stack";
  spec.params = {{"n", static_cast<double>(n)}};
  spec.claimed_bound = n / w.value(n);
  spec.bound_kind = BoundKind::pob_value;
  return {std::move(game), std::move(spec)};
}

}  // namespace rag
