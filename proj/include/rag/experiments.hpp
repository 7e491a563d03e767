#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "rag/design.hpp"
#include "rag/dynamics.hpp"
#include "rag/efficiency.hpp"
#include "rag/game.hpp"

namespace rag {

// ---------------------------------------------------------------------------
// deterministic RNG: SplitMix64 with hashed stream keys

// One SplitMix64 step: advance by the golden-ratio increment, then finalize.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t key) : state(key) {}

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // 53-bit mantissa uniform in [0, 1)
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // unbiased-enough fixed-point draw in [0, m)
  std::uint64_t below(std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * m) >> 64);
  }
};

inline std::uint64_t splitmix_scramble(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Stream key for (seed, instance, purpose): purpose 0 draws the event
// probabilities, purpose 1 + i draws agent i's actions.
inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t instance, std::uint64_t purpose) {
  std::uint64_t k = splitmix_scramble(seed);
  k = splitmix_scramble(k ^ instance);
  k = splitmix_scramble(k ^ purpose);
  return k;
}

// ---------------------------------------------------------------------------
// sensor-coverage instances

struct SensorConfig {
  std::uint64_t seed = 0;
  int n_instances = 100;
  int n_agents = 20;
  int n_resources = 30;
  double detect_prob = 0.5;   // D
  int actions_per_agent = 2;  // non-empty actions
  int action_width = 2;       // consecutive resources per action
  int rounds = 5;             // k

  void validate() const {
    if (n_instances < 1 || n_agents < 1 || n_resources < 1 || actions_per_agent < 1 ||
        action_width < 1 || rounds < 1)
      throw ValidationError("sensor config requires positive counts");
    if (!(detect_prob > 0.0 && detect_prob < 1.0))
      throw ValidationError("sensor config requires D in (0,1)");
    if (action_width > n_resources)
      throw ValidationError("sensor config: action width exceeds resource count");
  }
};

// Normalized coverage rule w(j) = (1 - (1-D)^j) / D, so w(1) = 1; a resource
// with event probability p contributes p (1 - (1-D)^j) under scale p*D.
inline WelfareRule sensor_base_rule(double D, int n_max = kDefaultNMax) {
  if (!(D > 0.0 && D < 1.0)) throw ValidationError("sensor_base_rule requires D in (0,1)");
  WelfareRule w;
  w.n_max = n_max;
  w.label = "sensor(D=" + std::to_string(D) + ")";
  w.submodular = true;
  w.values.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  double miss = 1.0;
  for (int j = 1; j <= n_max; ++j) {
    miss *= 1.0 - D;
    w.values[static_cast<std::size_t>(j)] = (1.0 - miss) / D;
  }
  w.validate();
  return w;
}

// One random coverage game: event probabilities drawn uniform then
// normalized to a distribution, and per agent `actions_per_agent` random
// width-`action_width` runs of consecutive resources (plus the empty
// action).  The utility rule slot is filled by the caller's design.
inline ResourceGame sensor_instance(const SensorConfig& cfg, int instance_index,
                                    const UtilityRule& f) {
  cfg.validate();
  ResourceGame game;
  game.n_players = cfg.n_agents;
  game.welfare_rules = {sensor_base_rule(cfg.detect_prob)};
  game.utility_rules = {f};

  SplitMix64 prob_rng(stream_key(cfg.seed, static_cast<std::uint64_t>(instance_index), 0));
  std::vector<double> p(static_cast<std::size_t>(cfg.n_resources));
  double total = 0.0;
  for (auto& v : p) { v = prob_rng.uniform01(); total += v; }
  for (std::size_t r = 0; r < p.size(); ++r) {
    double pr = p[r] / total;
    game.resources.push_back({0, 0, pr * cfg.detect_prob});
  }

  game.action_sets.resize(static_cast<std::size_t>(cfg.n_agents));
  const std::uint64_t n_starts = static_cast<std::uint64_t>(cfg.n_resources - cfg.action_width + 1);
  for (int i = 0; i < cfg.n_agents; ++i) {
    SplitMix64 act_rng(stream_key(cfg.seed, static_cast<std::uint64_t>(instance_index),
                                  1 + static_cast<std::uint64_t>(i)));
    auto& acts = game.action_sets[static_cast<std::size_t>(i)];
    acts.push_back({});
    for (int a = 0; a < cfg.actions_per_agent; ++a) {
      int start = static_cast<int>(act_rng.below(n_starts));
      std::vector<int> run(static_cast<std::size_t>(cfg.action_width));
      for (int t = 0; t < cfg.action_width; ++t) run[static_cast<std::size_t>(t)] = start + t;
      acts.push_back(std::move(run));
    }
  }
  game.validate();
  return game;
}

// ---------------------------------------------------------------------------
// exact optimal welfare for interval games

namespace detail {

// Exact optimum when every non-empty action is a width-w run and each agent
// has at most two of them.  Scans start positions left to right; the state
// is the starts placed in the last w-1 positions plus, for agents that
// declined their first option, the start position of their remaining one.
// Agents with identical remaining options are interchangeable, so flights
// are tracked as (position, count) multisets.
inline double interval_optimum(const ResourceGame& game, int width) {
  const int n_res = static_cast<int>(game.resources.size());
  std::map<std::pair<int, int>, int> groups;  // (first, second) -> agents
  for (int i = 0; i < game.n_players; ++i) {
    if (game.n_actions(i) != 3) throw ValidationError("interval_optimum expects 2 runs + empty");
    for (int a : {1, 2}) {
      const auto& act = game.action(i, a);
      if (static_cast<int>(act.size()) != width) throw ValidationError("interval_optimum: run width mismatch");
      for (std::size_t t = 1; t < act.size(); ++t)
        if (act[t] != act[t - 1] + 1) throw ValidationError("interval_optimum: action is not a consecutive run");
    }
    int s1 = game.action(i, 1).front(), s2 = game.action(i, 2).front();
    groups[{std::min(s1, s2), std::max(s1, s2)}]++;
  }
  std::map<int, std::vector<std::pair<int, int>>> first_at;  // pos -> [(target, count)]
  for (const auto& [key, cnt] : groups) first_at[key.first].push_back({key.second, cnt});

  const WelfareRule& w = game.welfare_rules[0];

  // state = [carry m_{p-width+1..p-1} | (target, count)...], value = welfare
  using State = std::vector<int>;
  std::map<State, double> layer;
  layer[State(static_cast<std::size_t>(width - 1), 0)] = 0.0;

  for (int pos = 0; pos < n_res; ++pos) {
    std::map<State, double> next_layer;
    const double scale = game.resources[static_cast<std::size_t>(pos)].scale;
    auto phi = [&](int cnt) { return cnt > 0 ? scale * w.values[static_cast<std::size_t>(cnt)] : 0.0; };
    const auto newgroups_it = first_at.find(pos);
    const std::vector<std::pair<int, int>> empty_groups;
    const auto& newgroups = newgroups_it != first_at.end() ? newgroups_it->second : empty_groups;

    for (const auto& [state, value] : layer) {
      std::vector<int> carry(state.begin(), state.begin() + (width - 1));
      std::map<int, int> flights;
      for (std::size_t t = static_cast<std::size_t>(width - 1); t + 1 < state.size(); t += 2)
        flights[state[t]] = state[t + 1];
      int arrivals = 0;
      if (auto it = flights.find(pos); it != flights.end()) {
        arrivals = it->second;
        flights.erase(it);
      }
      int carry_sum = 0;
      for (int v : carry) carry_sum += v;

      auto commit = [&](int started, const std::map<int, int>& fl) {
        for (int extra = 0; extra <= arrivals; ++extra) {
          int m_p = started + extra;
          double val = value + phi(m_p + carry_sum);
          State key;
          key.reserve(static_cast<std::size_t>(width - 1) + 2 * fl.size());
          for (std::size_t t = 1; t < carry.size(); ++t) key.push_back(carry[t]);
          if (width > 1) key.push_back(m_p);
          for (const auto& [tgt, cnt] : fl) { key.push_back(tgt); key.push_back(cnt); }
          auto [it, inserted] = next_layer.try_emplace(std::move(key), val);
          if (!inserted && it->second < val) it->second = val;
        }
      };
      auto rec = [&](auto&& self, std::size_t gi, int started, std::map<int, int>& fl) -> void {
        if (gi == newgroups.size()) { commit(started, fl); return; }
        auto [target, cnt] = newgroups[gi];
        for (int k = 0; k <= cnt; ++k) {
          bool defer = target != pos && cnt - k > 0;
          if (defer) fl[target] += cnt - k;
          self(self, gi + 1, started + k, fl);
          if (defer) {
            fl[target] -= cnt - k;
            if (fl[target] == 0) fl.erase(target);
          }
        }
      };
      rec(rec, 0, 0, flights);
    }
    layer = std::move(next_layer);
  }
  double best = 0.0;
  for (const auto& [state, value] : layer) best = std::max(best, value);
  return best;
}

}  // namespace detail

// Exact optimal welfare of a sensor instance: the interval DP when the
// config has two runs per agent, product-space scan otherwise.
inline double sensor_optimal_welfare(const ResourceGame& game, const SensorConfig& cfg) {
  if (cfg.actions_per_agent == 2) return detail::interval_optimum(game, cfg.action_width);
  return optimal_welfare(game).first;
}

// ---------------------------------------------------------------------------
// the comparison experiment

enum class SensorDesign { one_round_optimal, marginal_contribution, poa_optimal };

inline std::string design_name(SensorDesign d) {
  switch (d) {
    case SensorDesign::one_round_optimal: return "one-round-optimal";
    case SensorDesign::marginal_contribution: return "marginal-contribution";
    case SensorDesign::poa_optimal: return "poa-optimal";
  }
  return "?";
}

// Basis-decomposed design tables for the sensor rule.
inline UtilityRule sensor_design_rule(SensorDesign design, double D, int n_max) {
  WelfareRule base = sensor_base_rule(D);
  if (design == SensorDesign::marginal_contribution) {
    UtilityRule f = mc_utility(base);
    double last = f.values.back();
    f.values.resize(static_cast<std::size_t>(n_max) + 1, last);
    f.n_max = n_max;
    return f;
  }
  const double c = curvature(base);
  std::vector<double> alpha = basis_decompose(base);
  std::vector<DesignResult> parts;
  std::vector<double> coeffs;
  for (int b = 1; b < base.n_max; ++b) {
    if (alpha[static_cast<std::size_t>(b)] <= 0.0) continue;
    parts.push_back(design == SensorDesign::one_round_optimal ? bcovering_optimal_f(b, c, n_max)
                                                              : poa_optimal_f(b, n_max));
    coeffs.push_back(alpha[static_cast<std::size_t>(b)]);
  }
  return linear_design(parts, coeffs).f;
}

struct RoundStats {
  double worst = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, mean = 0.0;
};

struct ExperimentReport {
  SensorConfig config;
  std::vector<SensorDesign> designs;
  // ratios[d][i][r]: welfare ratio of design d on instance i after round r+1
  std::vector<std::vector<std::vector<double>>> ratios;
  std::vector<std::uint64_t> instance_keys;  // replay: purpose-0 stream key
};

namespace detail {

inline double quantile(std::vector<double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  double idx = q * (static_cast<double>(sorted.size()) - 1.0);
  std::size_t lo = static_cast<std::size_t>(idx);
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = idx - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace detail

inline RoundStats round_stats(const std::vector<std::vector<double>>& design_ratios, int round) {
  std::vector<double> col;
  col.reserve(design_ratios.size());
  for (const auto& inst : design_ratios) col.push_back(inst[static_cast<std::size_t>(round)]);
  std::sort(col.begin(), col.end());
  RoundStats s;
  s.worst = col.front();
  s.q1 = detail::quantile(col, 0.25);
  s.median = detail::quantile(col, 0.5);
  s.q3 = detail::quantile(col, 0.75);
  double sum = 0.0;
  for (double v : col) sum += v;
  s.mean = sum / static_cast<double>(col.size());
  return s;
}

// Runs every requested design over the same instance set; ratios are against
// the exact optimum.  Instances shard across threads; results depend only on
// cfg, never on the schedule, because every cell is written by index.
inline ExperimentReport run_sensor_experiment(
    const SensorConfig& cfg,
    std::vector<SensorDesign> designs = {SensorDesign::one_round_optimal,
                                         SensorDesign::marginal_contribution,
                                         SensorDesign::poa_optimal},
    int n_threads = 1) {
  cfg.validate();
  ExperimentReport rep;
  rep.config = cfg;
  rep.designs = designs;
  const int table_n = std::max(cfg.n_agents + 4, 24);
  std::vector<UtilityRule> tables;
  for (SensorDesign d : designs) tables.push_back(sensor_design_rule(d, cfg.detect_prob, table_n));

  rep.ratios.assign(designs.size(), {});
  for (auto& r : rep.ratios) r.resize(static_cast<std::size_t>(cfg.n_instances));
  rep.instance_keys.resize(static_cast<std::size_t>(cfg.n_instances));

  TiePolicy policy{TieMode::first_index, 1e-9};
  auto run_instance = [&](int inst) {
    rep.instance_keys[static_cast<std::size_t>(inst)] =
        stream_key(cfg.seed, static_cast<std::uint64_t>(inst), 0);
    double wopt = 0.0;
    for (std::size_t d = 0; d < designs.size(); ++d) {
      ResourceGame game = sensor_instance(cfg, inst, tables[d]);
      if (d == 0) {
        wopt = sensor_optimal_welfare(game, cfg);
        if (!(wopt > 0.0)) throw InfeasibleError("sensor instance with zero optimal welfare");
      }
      std::vector<JointAction> traj = round_robin_walk(game, cfg.rounds, policy);
      auto& out = rep.ratios[d][static_cast<std::size_t>(inst)];
      out.resize(static_cast<std::size_t>(cfg.rounds));
      for (int r = 1; r <= cfg.rounds; ++r)
        out[static_cast<std::size_t>(r - 1)] =
            welfare(game, traj[static_cast<std::size_t>(r) * cfg.n_agents]) / wopt;
    }
  };

  n_threads = std::max(1, std::min(n_threads, cfg.n_instances));
  if (n_threads == 1) {
    for (int inst = 0; inst < cfg.n_instances; ++inst) run_instance(inst);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (int inst = t; inst < cfg.n_instances; inst += n_threads) run_instance(inst);
        } catch (...) {
          errors[static_cast<std::size_t>(t)] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return rep;
}

inline std::vector<RoundStats> round_summaries(const ExperimentReport& rep, std::size_t design_index) {
  std::vector<RoundStats> out;
  for (int r = 0; r < rep.config.rounds; ++r)
    out.push_back(round_stats(rep.ratios[design_index], r));
  return out;
}

}  // namespace rag
