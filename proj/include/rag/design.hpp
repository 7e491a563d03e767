#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "rag/efficiency.hpp"
#include "rag/lp.hpp"
#include "rag/rules.hpp"

namespace rag {

// A synthesized utility rule together with the efficiency value beta it was
// derived at (guarantee = 1/beta) and the parameters of the derivation.
struct DesignResult {
  UtilityRule f;
  double beta = 1.0;
  std::string method;
  std::map<std::string, double> params;

  double guarantee() const { return 1.0 / beta; }
};

// ---------------------------------------------------------------------------
// closed forms

// Optimal rule for the b-covering family:
//   beta^b = B^b / (B^b - c),  B = (b+1)/b
//   f(j)   = (1 - beta) B^{j-1} + beta   for j <= b+1
//   f(j)   = (1 - c) beta                for j >= b+1
// The two branches agree at j = b+1.
inline DesignResult bcovering_optimal_f(int b, double c, int n_max = kDefaultNMax) {
  if (b < 1 || c < 0.0 || c > 1.0) throw ValidationError("bcovering_optimal_f requires b >= 1, c in [0,1]");
  const double B = (b + 1.0) / b;
  const double Bb = std::pow(B, b);
  const double beta = Bb / (Bb - c);
  DesignResult out;
  out.beta = beta;
  out.method = "curvature-closed-form";
  out.params = {{"b", static_cast<double>(b)}, {"c", c}};
  out.f.n_max = n_max;
  out.f.values.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (int j = 1; j <= n_max; ++j) {
    double v = (j <= b + 1) ? (1.0 - beta) * std::pow(B, j - 1) + beta : (1.0 - c) * beta;
    out.f.values[static_cast<std::size_t>(j)] = std::max(v, 0.0);
  }
  const double join_a = (1.0 - beta) * Bb + beta;
  const double join_b = (1.0 - c) * beta;
  if (std::abs(join_a - join_b) > 1e-9 * (1.0 + std::abs(join_b)))
    throw NumericalError("bcovering_optimal_f: branch mismatch at j = b+1");
  return out;
}

// pob*(W;1) = 1 - c/2 for the curvature-c class (minimum of 1/beta^b at b=1).
inline double optimal_one_round_curvature(double c) {
  if (c < 0.0 || c > 1.0) throw ValidationError("curvature must lie in [0,1]");
  return 1.0 - c / 2.0;
}

// Greedy / common-interest guarantee 1/(1+c).
inline double greedy_guarantee(double c) {
  if (c < 0.0 || c > 1.0) throw ValidationError("curvature must lie in [0,1]");
  return 1.0 / (1.0 + c);
}

// Marginal contribution f(j) = w(j) - w(j-1); strategically equivalent to
// letting every agent maximize the system welfare directly.
inline UtilityRule mc_utility(const WelfareRule& w) {
  UtilityRule f;
  f.n_max = w.n_max;
  f.values.assign(static_cast<std::size_t>(w.n_max) + 1, 0.0);
  for (int j = 1; j <= w.n_max; ++j) f.values[static_cast<std::size_t>(j)] = w.increment(j);
  return f;
}

// Equal split f(j) = w(j)/j.
inline UtilityRule shapley_utility(const WelfareRule& w) {
  UtilityRule f;
  f.n_max = w.n_max;
  f.values.assign(static_cast<std::size_t>(w.n_max) + 1, 0.0);
  for (int j = 1; j <= w.n_max; ++j) {
    if (!(w.value(j) > 0.0)) throw ValidationError("shapley_utility requires w(j) > 0");
    f.values[static_cast<std::size_t>(j)] = w.value(j) / j;
  }
  return f;
}

inline UtilityRule constant_utility(int n_max) {
  if (n_max < 1) throw ValidationError("constant_utility requires n_max >= 1");
  UtilityRule f;
  f.n_max = n_max;
  f.values.assign(static_cast<std::size_t>(n_max) + 1, 1.0);
  f.values[0] = 0.0;
  return f;
}

// ---------------------------------------------------------------------------
// asymptotically optimal rules

// rho^b = (1 - b^b e^{-b} / b!)^{-1}, evaluated in the log domain so large b
// does not overflow the intermediate powers.
inline double poa_rho(int b) {
  double log_term = b * std::log(static_cast<double>(b)) - b - std::lgamma(b + 1.0);
  return 1.0 / (1.0 - std::exp(log_term));
}

// Asymptotically optimal rule for the b-covering family at curvature 1:
//   f(1) = 1,  f(j+1) = (1/b)[j f(j) - rho^b min(j, b)] + 1.
// The raw recursion amplifies rounding like j!/b^j, so entries past j = b+1
// are evaluated through the equivalent positive-term series
//   f(j) = (rho^b - 1) sum_{s>=1} b^s / [(j)(j+1)...(j+s-1)]
// which is stable at any depth.
inline DesignResult poa_optimal_f(int b, int n_max = kDefaultNMax) {
  if (b < 1) throw ValidationError("poa_optimal_f requires b >= 1");
  const double rho = poa_rho(b);
  DesignResult out;
  out.method = "poa-optimal";
  out.params = {{"b", static_cast<double>(b)}, {"rho", rho}};
  out.beta = 1.0 / (1.0 - std::exp(-1.0));  // context value, reported for b = 1
  out.f.n_max = n_max;
  out.f.values.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  out.f.values[1] = 1.0;
  for (int j = 1; j < std::min(b + 1, n_max); ++j)
    out.f.values[static_cast<std::size_t>(j + 1)] =
        (j * out.f.values[static_cast<std::size_t>(j)] - rho * std::min(j, b)) / b + 1.0;
  for (int j = b + 1; j <= n_max; ++j) {
    double sum = 0.0, term = 1.0;
    for (int s = 1; s <= 600; ++s) {
      term *= static_cast<double>(b) / (j - 1 + s);
      sum += term;
      if (term < 1e-18 * (sum + 1e-300)) break;
    }
    out.f.values[static_cast<std::size_t>(j)] = (rho - 1.0) * sum;
  }
  return out;
}

// Pareto-optimal set-covering rule for a price-of-anarchy target 1/(1+chi):
//   f(1) = 1,  f(j+1) = max{ j f(j) - chi, 0 }.
// Computed in exact rational arithmetic (chi taken as the exact binary
// rational of the given double) and verified against the closed form
//   f(j) = max[ (j-1)! (1 - chi sum_{tau<=j-1} 1/tau!), 0 ],
// which matches it term for term.
inline UtilityRule pareto_utility(double chi, int n_max = kDefaultNMax) {
  const double chi_min = 1.0 / (std::exp(1.0) - 1.0);
  if (chi < chi_min - 1e-12)
    throw InfeasibleError("chi below 1/(e-1): target price of anarchy not achievable");
  Rational x(chi);
  std::vector<Rational> rec(static_cast<std::size_t>(n_max) + 1, Rational(0));
  rec[1] = 1;
  for (int j = 1; j < n_max; ++j) {
    Rational raw = j * rec[static_cast<std::size_t>(j)] - x;
    rec[static_cast<std::size_t>(j + 1)] = raw > 0 ? raw : Rational(0);
  }
  // closed-form cross check
  Rational fact(1), inv_fact_sum(0);
  for (int j = 1; j <= n_max; ++j) {
    // fact = (j-1)!, inv_fact_sum = sum_{tau<=j-1} 1/tau!
    Rational closed = fact * (1 - x * inv_fact_sum);
    if (closed < 0) closed = 0;
    if (closed != rec[static_cast<std::size_t>(j)])
      throw NumericalError("pareto_utility: recursion and closed form disagree");
    fact *= j;
    inv_fact_sum += Rational(1) / fact;
  }
  UtilityRule f;
  f.n_max = n_max;
  f.values.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (int j = 1; j <= n_max; ++j)
    f.values[static_cast<std::size_t>(j)] = detail::to_double(rec[static_cast<std::size_t>(j)]);
  return f;
}

struct FrontierResult {
  double value = 0.0;
  bool diverged = false;
};

// Trade-off frontier for set covering: the best one-round efficiency under a
// price-of-anarchy target Q in [1/2, 1 - 1/e],
//   value = 1 / [ sum_{j=0}^{J} max{ j! (1 - chi sum_{tau<=j} 1/tau!), 0 } + 1 ],
// chi = (1-Q)/Q.  Terms are evaluated through the cancellation-free form
// j! chi (delta + tail_j), delta = 1/chi - (e-1).  At the right endpoint the
// series provably diverges (the terms decay harmonically), so the reported
// value is 0 with the diverged flag set; the detector also fires if the
// terms stop decreasing twice in a row.
inline FrontierResult pareto_frontier(double Q, int J = 200) {
  if (J < 1) throw ValidationError("pareto_frontier requires J >= 1");
  constexpr double kEndpointMargin = 1e-13;
  const double q_hi = 1.0 - 1.0 / std::exp(1.0);
  if (Q < 0.5 - 1e-12 || Q > q_hi + kEndpointMargin)
    throw ValidationError("pareto_frontier requires Q in [1/2, 1 - 1/e]");
  const double chi = (1.0 - Q) / Q;

  // inverse factorial tails, summed smallest-first
  const int tail_len = std::max(J + 2, 48);
  std::vector<double> inv_fact(static_cast<std::size_t>(tail_len) + 1);
  double fct = 1.0;
  for (int t = 1; t <= tail_len; ++t) {
    fct *= t;
    inv_fact[static_cast<std::size_t>(t)] = 1.0 / fct;
  }
  std::vector<double> tail(static_cast<std::size_t>(tail_len) + 1, 0.0);
  for (int t = tail_len - 1; t >= 0; --t)
    tail[static_cast<std::size_t>(t)] = tail[static_cast<std::size_t>(t + 1)] + inv_fact[static_cast<std::size_t>(t + 1)];

  const double delta = 1.0 / chi - tail[0];  // tail[0] = e - 1 to machine precision
  if (delta > -kEndpointMargin) {
    // at (or within representation error of) the divergent endpoint
    return {0.0, true};
  }

  double total = 0.0, log_fact = 0.0, prev = 1.0;
  int rising = 0;
  FrontierResult out;
  for (int j = 0; j <= J; ++j) {
    if (j > 0) log_fact += std::log(static_cast<double>(j));
    double bracket = chi * (delta + tail[static_cast<std::size_t>(std::min(j, tail_len))]);
    double term;
    if (bracket <= 0.0) {
      term = 0.0;
    } else if (j <= 20) {
      term = std::exp(log_fact) * bracket;
    } else {
      term = std::exp(std::min(log_fact + std::log(bracket), 700.0));
    }
    if (j > 0 && term > prev) {
      if (++rising >= 2) { out.diverged = true; break; }
    } else {
      rising = 0;
    }
    prev = term;
    total += term;
  }
  out.value = out.diverged ? 0.0 : 1.0 / (total + 1.0);
  return out;
}

// ---------------------------------------------------------------------------
// the one-round-optimal program

// Builds f from a candidate beta by the rearranged constraint
//   f(y+1) = max_{1<=z<=Z} (1/z) ( sum_{i<=y} f(i) + w(z) - beta w(y) ),
// clamped at 0.  At the optimal beta this reproduces the program's utility
// rule; below it the produced table turns increasing, which callers use as a
// truncation/feasibility detector.  The recursion amplifies perturbations of
// beta at a rate that grows with y, so checks against it belong on prefixes
// (or exact-arithmetic beta).
inline UtilityRule optimal_recursive_check(const WelfareRule& w, double beta, int Y, int Z) {
  if (Y < 1 || Z < 1) throw ValidationError("optimal_recursive_check requires Y, Z >= 1");
  UtilityRule f;
  f.n_max = Y + 1;
  f.values.assign(static_cast<std::size_t>(Y) + 2, 0.0);
  f.values[1] = 1.0;
  double fsum = 1.0;
  for (int y = 1; y <= Y; ++y) {
    double best = 0.0;
    for (int z = 1; z <= Z; ++z) {
      double v = (fsum + welfare_tail(w, z) - beta * welfare_tail(w, y)) / z;
      best = std::max(best, v);
    }
    f.values[static_cast<std::size_t>(y + 1)] = best;
    fsum += best;
  }
  return f;
}

namespace detail {

inline Rational rational_welfare(const WelfareRule& w, int j) {
  if (j <= w.n_max) return Rational(w.value(j));
  return Rational(w.value(w.n_max)) + Rational(j - w.n_max) * Rational(w.increment(w.n_max));
}

// Exact solve of a maximize/all-<= program by restricted pricing: a floating
// simplex proposes a support, the exact simplex runs on those columns only,
// and every column is priced exactly against the restricted duals; violated
// columns join the support until none remain.
inline ExactLpSolution solve_exact_pricing(const ExactLpProblem& full) {
  const std::size_t n_cols = full.n_vars();
  const std::size_t n_rows = full.constraints.size();

  LpProblem relaxed;
  relaxed.sense = LpSense::maximize;
  relaxed.objective.reserve(n_cols);
  for (const auto& c : full.objective) relaxed.objective.push_back(to_double(c));
  for (const auto& con : full.constraints) {
    std::vector<double> row(n_cols);
    for (std::size_t j = 0; j < n_cols; ++j) row[j] = to_double(con.coeffs[j]);
    relaxed.add(std::move(row), con.rel, to_double(con.rhs));
  }
  LpSolution seed = solve(relaxed);
  if (seed.status != LpStatus::optimal) {
    ExactLpSolution out;
    out.status = seed.status;
    return out;
  }

  std::vector<bool> active(n_cols, false);
  for (std::size_t j = 0; j < n_cols; ++j) active[j] = seed.x[j] > 1e-12;

  for (int round = 0; round < 50; ++round) {
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < n_cols; ++j)
      if (active[j]) cols.push_back(j);
    ExactLpProblem sub;
    sub.sense = LpSense::maximize;
    sub.objective.reserve(cols.size());
    for (std::size_t j : cols) sub.objective.push_back(full.objective[j]);
    for (const auto& con : full.constraints) {
      std::vector<Rational> row;
      row.reserve(cols.size());
      for (std::size_t j : cols) row.push_back(con.coeffs[j]);
      sub.add(std::move(row), con.rel, con.rhs);
    }
    ExactLpSolution part = solve(sub);
    if (part.status != LpStatus::optimal) return part;

    // exact pricing: for a maximize/<= program optimality needs
    // c_j - y'A_j <= 0 on every column
    bool clean = true;
    for (std::size_t j = 0; j < n_cols; ++j) {
      if (active[j]) continue;
      Rational reduced = full.objective[j];
      for (std::size_t i = 0; i < n_rows; ++i)
        if (full.constraints[i].coeffs[j] != 0)
          reduced -= part.dual[i] * full.constraints[i].coeffs[j];
      if (reduced > 0) {
        active[j] = true;
        clean = false;
      }
    }
    if (clean) {
      ExactLpSolution out;
      out.status = LpStatus::optimal;
      out.value = part.value;
      out.dual = part.dual;
      out.x.assign(n_cols, Rational(0));
      for (std::size_t t = 0; t < cols.size(); ++t) out.x[cols[t]] = part.x[t];
      return out;
    }
  }
  throw NumericalError("exact pricing did not settle");
}

}  // namespace detail

// Solves the truncated one-round design program
//   min beta  s.t.  beta w(y) >= sum_{i<=y} f(i) - z f(y+1) + w(z),
//                   1 <= y <= Y, 1 <= z <= Z,  f(1) = 1,  f >= 0,
// with the (optimal-solution-preserving) non-increasing rows f(j+1) <= f(j)
// that keep the finite truncation bounded.  The program is solved in exact
// rational arithmetic through its transpose, and the returned utility rule
// is the pointwise-minimal optimal f, extracted by running the constraint
// recursion at the exact optimum.  Tables are extended past Y+1 by the last
// value.
inline DesignResult optimal_utility_lp(const WelfareRule& w, int Y = 40, int Z = 40,
                                       int n_max = 0) {
  if (Y < 1 || Z < 1) throw ValidationError("optimal_utility_lp requires Y, Z >= 1");
  if (!w.submodular) throw ValidationError("optimal_utility_lp requires a submodular rule");
  if (std::abs(w.value(1) - 1.0) > 1e-9) throw ValidationError("optimal_utility_lp requires w(1) = 1");
  if (n_max <= 0) n_max = std::max(w.n_max, Y + 1);

  std::vector<Rational> wr(static_cast<std::size_t>(std::max(Y, Z)) + 1);
  for (int j = 0; j <= std::max(Y, Z); ++j) wr[static_cast<std::size_t>(j)] = detail::rational_welfare(w, j);

  // primal rows: (y,z) grid, then f(2) <= 1, then f(j) >= f(j+1) for j=2..Y
  const int n_rows = Y * Z + Y;
  const int n_vars = Y + 1;  // beta, f_2..f_{Y+1}
  auto row_coeff = [&](int row, int var) -> Rational {
    if (row < Y * Z) {
      int y = row / Z + 1, z = row % Z + 1;
      if (var == 0) return wr[static_cast<std::size_t>(y)];
      int i = var + 1;  // var v is f_{v+1}
      if (i <= y) return Rational(-1);
      if (i == y + 1) return Rational(z);
      return Rational(0);
    }
    int m = row - Y * Z;  // 0 -> -f2 >= -1 ; m>=1 -> f_{m+1} - f_{m+2} >= 0
    if (m == 0) return var == 1 ? Rational(-1) : Rational(0);
    if (var == m) return Rational(1);
    if (var == m + 1) return Rational(-1);
    return Rational(0);
  };
  auto row_rhs = [&](int row) -> Rational {
    if (row < Y * Z) {
      int z = row % Z + 1;
      return Rational(1) + wr[static_cast<std::size_t>(z)];
    }
    return row == Y * Z ? Rational(-1) : Rational(0);
  };

  // transpose: max rhs'mu  s.t.  R'mu <= e_beta, mu >= 0
  ExactLpProblem dual;
  dual.sense = LpSense::maximize;
  dual.objective.resize(static_cast<std::size_t>(n_rows));
  for (int r = 0; r < n_rows; ++r) dual.objective[static_cast<std::size_t>(r)] = row_rhs(r);
  for (int v = 0; v < n_vars; ++v) {
    std::vector<Rational> coeffs(static_cast<std::size_t>(n_rows));
    for (int r = 0; r < n_rows; ++r) coeffs[static_cast<std::size_t>(r)] = row_coeff(r, v);
    dual.add(std::move(coeffs), LpRelation::less_equal, v == 0 ? Rational(1) : Rational(0));
  }
  ExactLpSolution sol = detail::solve_exact_pricing(dual);
  if (sol.status == LpStatus::unbounded)
    throw InfeasibleError("optimal_utility_lp: transposed program unbounded (primal infeasible)");
  if (sol.status != LpStatus::optimal) throw InfeasibleError("optimal_utility_lp: no optimum");
  const Rational beta = sol.value;
  // the transposed duals are the primal variables; their first entry is beta
  if (sol.dual.size() != static_cast<std::size_t>(n_vars) || sol.dual[0] != beta)
    throw NumericalError("optimal_utility_lp: inconsistent primal recovery");

  // Preferred extraction: the pointwise-minimal optimal f from the exact
  // constraint recursion at beta.  For rules whose increments settle within
  // the truncation (the basis families) this is exact and canonical.  Rules
  // with never-settling increments have truncated optima strictly below the
  // untruncated value, which turns the recursion's tail upward; the vertex
  // solution (non-increasing by the monotone rows) is returned instead.
  std::vector<Rational> f_exact(static_cast<std::size_t>(Y) + 2, Rational(0));
  f_exact[1] = 1;
  Rational fsum(1);
  bool recursion_monotone = true;
  for (int y = 1; y <= Y; ++y) {
    Rational best(0);
    for (int z = 1; z <= Z; ++z) {
      Rational v = (fsum + wr[static_cast<std::size_t>(z)] - beta * wr[static_cast<std::size_t>(y)]) / z;
      if (v > best) best = v;
    }
    if (best > f_exact[static_cast<std::size_t>(y)]) recursion_monotone = false;
    f_exact[static_cast<std::size_t>(y + 1)] = best;
    fsum += best;
  }
  if (!recursion_monotone) {
    f_exact[1] = 1;
    for (int j = 2; j <= Y + 1; ++j) f_exact[static_cast<std::size_t>(j)] = sol.dual[static_cast<std::size_t>(j - 1)];
  }

  DesignResult out;
  out.beta = detail::to_double(beta);
  out.method = "one-round-optimal-lp";
  out.params = {{"Y", static_cast<double>(Y)}, {"Z", static_cast<double>(Z)}};
  out.f.n_max = n_max;
  out.f.values.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (int j = 1; j <= n_max; ++j)
    out.f.values[static_cast<std::size_t>(j)] =
        detail::to_double(f_exact[static_cast<std::size_t>(std::min(j, Y + 1))]);
  return out;
}

// Default-truncation solve plus a doubled-truncation convergence check (the
// doubled value is computed in floating point; the check is on beta only).
inline DesignResult optimal_utility_design(const WelfareRule& w, int Y = 40, int Z = 40) {
  DesignResult res = optimal_utility_lp(w, Y, Z);
  LpProblem check;
  check.sense = LpSense::maximize;
  const int Y2 = 2 * Y, Z2 = 2 * Z;
  const int n_rows = Y2 * Z2 + Y2, n_vars = Y2 + 1;
  check.objective.resize(static_cast<std::size_t>(n_rows));
  std::vector<std::vector<double>> cols(static_cast<std::size_t>(n_vars),
                                        std::vector<double>(static_cast<std::size_t>(n_rows), 0.0));
  for (int r = 0; r < n_rows; ++r) {
    if (r < Y2 * Z2) {
      int y = r / Z2 + 1, z = r % Z2 + 1;
      check.objective[static_cast<std::size_t>(r)] = 1.0 + welfare_tail(w, z);
      cols[0][static_cast<std::size_t>(r)] = welfare_tail(w, y);
      for (int v = 1; v < n_vars; ++v) {
        int i = v + 1;
        if (i <= y) cols[static_cast<std::size_t>(v)][static_cast<std::size_t>(r)] = -1.0;
        else if (i == y + 1) cols[static_cast<std::size_t>(v)][static_cast<std::size_t>(r)] = z;
      }
    } else {
      int m = r - Y2 * Z2;
      if (m == 0) {
        check.objective[static_cast<std::size_t>(r)] = -1.0;
        cols[1][static_cast<std::size_t>(r)] = -1.0;
      } else {
        cols[static_cast<std::size_t>(m)][static_cast<std::size_t>(r)] = 1.0;
        cols[static_cast<std::size_t>(m + 1)][static_cast<std::size_t>(r)] = -1.0;
      }
    }
  }
  for (int v = 0; v < n_vars; ++v)
    check.add(std::move(cols[static_cast<std::size_t>(v)]), LpRelation::less_equal, v == 0 ? 1.0 : 0.0);
  LpSolution doubled = solve(check);
  if (doubled.status == LpStatus::optimal && std::abs(doubled.value - res.beta) > 1e-7)
    throw InfeasibleError("optimal_utility_design: truncation not converged, increase Y/Z");
  return res;
}

// f = sum_b alpha_b f_b with the guarantee of the weakest contributing basis
// element.
inline DesignResult linear_design(const std::vector<DesignResult>& basis,
                                  const std::vector<double>& alpha) {
  if (basis.empty() || basis.size() != alpha.size())
    throw ValidationError("linear_design requires matching basis/coefficient counts");
  const int n_max = basis.front().f.n_max;
  for (const auto& d : basis)
    if (d.f.n_max != n_max) throw ValidationError("linear_design requires equal table sizes");
  DesignResult out;
  out.method = "linear";
  out.f.n_max = n_max;
  out.f.values.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
  out.beta = 1.0;
  for (std::size_t t = 0; t < basis.size(); ++t) {
    if (alpha[t] < 0.0) throw ValidationError("linear_design requires non-negative coefficients");
    if (alpha[t] == 0.0) continue;
    for (int j = 1; j <= n_max; ++j)
      out.f.values[static_cast<std::size_t>(j)] += alpha[t] * basis[t].f.value(j);
    out.beta = std::max(out.beta, basis[t].beta);
  }
  if (std::abs(out.f.value(1) - 1.0) > 1e-9)
    throw ValidationError("linear_design: combined rule must have f(1) = 1");
  return out;
}

}  // namespace rag
