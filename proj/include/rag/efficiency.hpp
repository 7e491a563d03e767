#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "rag/dynamics.hpp"
#include "rag/game.hpp"
#include "rag/lp.hpp"
#include "rag/rules.hpp"

namespace rag {

inline constexpr std::uint64_t kEnumerationCap = 2'000'000;

enum class EfficiencyMetric { pob_k, poa };

struct EfficiencyReport {
  EfficiencyMetric metric = EfficiencyMetric::pob_k;
  double value = 0.0;
  int k = 0;                  // rounds, for pob_k
  JointAction witness_worst;
  JointAction witness_opt;
  bool exact = true;          // false when enumeration was truncated
};

namespace detail {

template <class Visit>
void scan_joint_actions(const ResourceGame& game, Visit&& visit) {
  JointAction cur = all_empty(game);
  while (true) {
    visit(cur);
    int i = 0;
    for (; i < game.n_players; ++i) {
      int& c = cur.choices[static_cast<std::size_t>(i)];
      if (++c < game.n_actions(i)) break;
      c = 0;
    }
    if (i == game.n_players) return;
  }
}

}  // namespace detail

// Exact welfare maximum by exhaustive product-space scan.
inline std::pair<double, JointAction> optimal_welfare(const ResourceGame& game,
                                                      std::uint64_t cap = kEnumerationCap) {
  if (joint_space_size(game, cap) > cap)
    throw ResourceLimitError("joint action space exceeds enumeration cap");
  double best = -1.0;
  JointAction arg;
  detail::scan_joint_actions(game, [&](const JointAction& a) {
    double w = welfare(game, a);
    if (w > best) { best = w; arg = a; }
  });
  return {best, arg};
}

// pob(G;k) = min_{a in S(k)} W(a) / max_a W(a), by full tie-branch
// enumeration.  exact=false when the branch cap truncated S(k).
inline EfficiencyReport pob_exhaustive(const ResourceGame& game, int k, double tol = 1e-9,
                                       std::size_t branch_cap = kDefaultBranchCap,
                                       std::uint64_t cap = kEnumerationCap) {
  WalkOutcome walk = enumerate_outcomes(game, k, tol, branch_cap);
  auto [wopt, aopt] = optimal_welfare(game, cap);
  if (!(wopt > 0.0)) throw InfeasibleError("optimal welfare is zero; efficiency undefined");
  EfficiencyReport rep;
  rep.metric = EfficiencyMetric::pob_k;
  rep.k = k;
  rep.witness_opt = aopt;
  rep.exact = !walk.truncated;
  double worst = 0.0;
  bool first = true;
  for (const JointAction& a : walk.outcomes) {
    double w = welfare(game, a);
    if (first || w < worst) { worst = w; rep.witness_worst = a; first = false; }
  }
  rep.value = worst / wopt;
  return rep;
}

inline std::vector<JointAction> nash_set(const ResourceGame& game, double tol = 0.0,
                                         std::uint64_t cap = kEnumerationCap) {
  if (joint_space_size(game, cap) > cap)
    throw ResourceLimitError("joint action space exceeds enumeration cap");
  std::vector<JointAction> out;
  detail::scan_joint_actions(game, [&](const JointAction& a) {
    if (is_nash(game, a, tol)) out.push_back(a);
  });
  return out;
}

inline EfficiencyReport poa_exact(const ResourceGame& game, double tol = 0.0,
                                  std::uint64_t cap = kEnumerationCap) {
  std::vector<JointAction> nes = nash_set(game, tol, cap);
  if (nes.empty()) throw InfeasibleError("empty Nash set under the given tolerance");
  auto [wopt, aopt] = optimal_welfare(game, cap);
  if (!(wopt > 0.0)) throw InfeasibleError("optimal welfare is zero; efficiency undefined");
  EfficiencyReport rep;
  rep.metric = EfficiencyMetric::poa;
  rep.witness_opt = aopt;
  double worst = 0.0;
  bool first = true;
  for (const JointAction& a : nes) {
    double w = welfare(game, a);
    if (first || w < worst) { worst = w; rep.witness_worst = a; first = false; }
  }
  rep.value = worst / wopt;
  return rep;
}

// One-round-walk hardness over the (w, f) game class:
//   beta = max_{1<=y<=Y, 0<=z<=Z} [H (sum_{i<=y} f(i) - z min_{i<=y+1} f(i)) + w(z)] / w(y)
// with H = max_j w(j)/j.  Each constraint of the underlying program binds
// independently, so the maximum of the ratios is the program's optimum.
// Returns beta; the guarantee is 1/beta.
inline double pob_dual_lp(const WelfareRule& w, const UtilityRule& f, int Y, int Z) {
  if (Y < 1 || Z < 0) throw ValidationError("pob_dual_lp requires Y >= 1, Z >= 0");
  const double H = steepness(w);
  double beta = 0.0;
  double fsum = 0.0;
  double fmin = utility_tail(f, 1);
  for (int y = 1; y <= Y; ++y) {
    fsum += utility_tail(f, y);
    fmin = std::min(fmin, utility_tail(f, y));
    double fmin_next = std::min(fmin, utility_tail(f, y + 1));
    double wy = welfare_tail(w, y);
    if (!(wy > 0.0)) throw InfeasibleError("degenerate welfare rule: w(y) = 0 for y >= 1");
    for (int z = 0; z <= Z; ++z) {
      double num = H * (fsum - z * fmin_next) + welfare_tail(w, z);
      beta = std::max(beta, num / wy);
    }
  }
  return beta;
}

// Doubles the truncation until the value is stable to 1e-9.  Rules whose
// program diverges (beta = infinity, efficiency 0) never settle and are
// reported as such.
inline double pob_dual_lp_adaptive(const WelfareRule& w, const UtilityRule& f, int start = 16,
                                   int limit = 4096) {
  double prev = pob_dual_lp(w, f, start, start);
  for (int t = start * 2; t <= limit; t *= 2) {
    double next = pob_dual_lp(w, f, t, t);
    if (std::abs(next - prev) < 1e-9) return next;
    prev = next;
  }
  throw InfeasibleError("pob_dual_lp did not converge under doubling; the program may diverge");
}

// Fixed-n worst-case game search over resource types
//   p in prod_i {0, {abr_i}, {aopt_i}, {abr_i, aopt_i}}
// posed as the exact maximization program over type masses nu(p) >= 0.
// Returns the efficiency 1/optimum.  Capped at n <= 3 (4^n types).
inline double pob_primal_lp(const WelfareRule& w, const UtilityRule& f, int n) {
  if (n < 1 || n > 3) throw ValidationError("pob_primal_lp supports 1 <= n <= 3");
  const int n_types = 1 << (2 * n);  // 4^n
  LpProblem lp;
  lp.sense = LpSense::maximize;
  lp.objective.resize(static_cast<std::size_t>(n_types));
  std::vector<double> eq_row(static_cast<std::size_t>(n_types));
  std::vector<std::vector<double>> br_rows(static_cast<std::size_t>(n),
                                           std::vector<double>(static_cast<std::size_t>(n_types), 0.0));
  for (int t = 0; t < n_types; ++t) {
    int abr_load = 0, aopt_load = 0;
    for (int i = 0; i < n; ++i) {
      if (t >> (2 * i) & 1) ++abr_load;
      if (t >> (2 * i) & 2) ++aopt_load;
    }
    lp.objective[static_cast<std::size_t>(t)] = aopt_load > 0 ? welfare_tail(w, aopt_load) : 0.0;
    eq_row[static_cast<std::size_t>(t)] = abr_load > 0 ? welfare_tail(w, abr_load) : 0.0;
    int abr_before = 0;
    for (int i = 0; i < n; ++i) {
      int in_abr = t >> (2 * i) & 1;
      int in_aopt = (t >> (2 * i) & 2) ? 1 : 0;
      if (in_abr != in_aopt)
        br_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] =
            (in_abr - in_aopt) * utility_tail(f, abr_before + 1);
      abr_before += in_abr;
    }
  }
  lp.add(std::move(eq_row), LpRelation::equal, 1.0);
  for (auto& row : br_rows) lp.add(std::move(row), LpRelation::greater_equal, 0.0);
  LpSolution sol = solve(lp);
  if (sol.status == LpStatus::infeasible) throw InfeasibleError("pob_primal_lp: program infeasible");
  if (sol.status == LpStatus::unbounded) throw InfeasibleError("pob_primal_lp: program unbounded");
  return 1.0 / sol.value;
}

// Set-covering one-round efficiency: 1 / (sum_{i<=N} f(i) - min_{i<=N} f(i) + 1).
inline double pob_setcover_formula(const UtilityRule& f, int N) {
  if (N < 1) throw ValidationError("pob_setcover_formula requires N >= 1");
  double fsum = 0.0, fmin = utility_tail(f, 1);
  for (int i = 1; i <= N; ++i) {
    double v = utility_tail(f, i);
    fsum += v;
    fmin = std::min(fmin, v);
  }
  return 1.0 / (fsum - fmin + 1.0);
}

// Asymptotic efficiency of (w, f) via the three-index program over
// theta(y, x, z) >= 0 with 1 <= y+x+z <= N1.  Requires non-increasing f.
inline double poa_lp(const WelfareRule& w, const UtilityRule& f, int N1) {
  if (N1 < 1) throw ValidationError("poa_lp requires N1 >= 1");
  if (!is_non_increasing(f, 1e-9))
    throw ValidationError("poa_lp requires a non-increasing utility rule");
  struct Triple { int y, x, z; };
  std::vector<Triple> idx;
  for (int y = 0; y <= N1; ++y)
    for (int x = 0; x + y <= N1; ++x)
      for (int z = 0; y + x + z <= N1; ++z)
        if (y + x + z >= 1) idx.push_back({y, x, z});
  LpProblem lp;
  lp.sense = LpSense::maximize;
  lp.objective.resize(idx.size());
  std::vector<double> br_row(idx.size()), eq_row(idx.size());
  for (std::size_t t = 0; t < idx.size(); ++t) {
    auto [y, x, z] = idx[t];
    lp.objective[t] = (z + x) > 0 ? welfare_tail(w, z + x) : 0.0;
    double coeff = 0.0;
    if (y > 0) coeff += y * utility_tail(f, y + x);
    if (z > 0) coeff -= z * utility_tail(f, y + x + 1);
    br_row[t] = coeff;
    eq_row[t] = (y + x) > 0 ? welfare_tail(w, y + x) : 0.0;
  }
  lp.add(std::move(br_row), LpRelation::greater_equal, 0.0);
  lp.add(std::move(eq_row), LpRelation::equal, 1.0);
  LpSolution sol = solve(lp);
  if (sol.status == LpStatus::infeasible) throw InfeasibleError("poa_lp: program infeasible");
  if (sol.status == LpStatus::unbounded) throw InfeasibleError("poa_lp: program unbounded");
  return 1.0 / sol.value;
}

// Set-covering price of anarchy:
//   1 / (1 + max_{1<=j<=n-1} {(j+1) f(j+1) - 1, j f(j) - f(j+1), j f(j+1)}).
inline double poa_setcover_formula(const UtilityRule& f, int n) {
  if (n < 2) throw ValidationError("poa_setcover_formula requires n >= 2");
  double best = -1e300;
  for (int j = 1; j <= n - 1; ++j) {
    double fj = utility_tail(f, j), fj1 = utility_tail(f, j + 1);
    best = std::max({best, (j + 1) * fj1 - 1.0, j * fj - fj1, j * fj1});
  }
  return 1.0 / (1.0 + best);
}

}  // namespace rag
