#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <cmath>
#include <cstddef>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "rag/errors.hpp"

namespace rag {

using Rational = boost::multiprecision::mpq_rational;

enum class LpSense { minimize, maximize };
enum class LpRelation { less_equal, equal, greater_equal };
enum class LpStatus { optimal, infeasible, unbounded };

template <class T>
struct LpConstraintT {
  std::vector<T> coeffs;
  LpRelation rel = LpRelation::less_equal;
  T rhs = T(0);
};

// Dense LP.  Variables have lower bound 0 unless `lower` overrides it;
// `upper` adds optional upper bounds.
template <class T>
struct LpProblemT {
  LpSense sense = LpSense::minimize;
  std::vector<T> objective;
  std::vector<LpConstraintT<T>> constraints;
  std::vector<T> lower;                  // empty means all-zero lower bounds
  std::vector<std::optional<T>> upper;   // empty means no upper bounds

  std::size_t n_vars() const { return objective.size(); }

  void add(std::vector<T> coeffs, LpRelation rel, T rhs) {
    constraints.push_back(LpConstraintT<T>{std::move(coeffs), rel, std::move(rhs)});
  }
};

template <class T>
struct LpSolutionT {
  LpStatus status = LpStatus::optimal;
  std::vector<T> x;
  T value = T(0);
  std::vector<T> dual;  // one multiplier per constraint, in the posed orientation
};

using LpProblem = LpProblemT<double>;
using LpSolution = LpSolutionT<double>;
using ExactLpProblem = LpProblemT<Rational>;
using ExactLpSolution = LpSolutionT<Rational>;

struct LpOptions {
  double pivot_tol = 1e-10;
  int verbosity = 0;       // > 0 dumps tableau sizes and pivots to stderr
  std::size_t max_pivots = 200000;
};

namespace detail {

template <class T>
inline T lp_tol(const LpOptions&) { return T(0); }  // exact scalars compare exactly

template <>
inline double lp_tol<double>(const LpOptions& opt) { return opt.pivot_tol; }

// Dense two-phase simplex on the tableau
//   [ A | slack/surplus | artificial | rhs ]
// with Dantzig pricing and Bland's rule engaged after a degenerate streak.
template <class T>
class SimplexTableau {
 public:
  SimplexTableau(const LpProblemT<T>& p, const LpOptions& opt) : opt_(opt), tol_(lp_tol<T>(opt)) {
    build(p);
  }

  LpSolutionT<T> solve() {
    LpSolutionT<T> out;
    if (!phase1()) {
      out.status = LpStatus::infeasible;
      return out;
    }
    install_phase2_objective();
    if (!iterate()) {
      out.status = LpStatus::unbounded;
      return out;
    }
    extract(out);
    return out;
  }

 private:
  LpOptions opt_;
  T tol_;
  std::size_t rows_ = 0, n_ = 0, total_ = 0, art_begin_ = 0;
  std::vector<std::vector<T>> tab_;  // rows_ x (total_ + 1)
  std::vector<T> obj_;               // reduced-cost row, size total_ + 1
  std::vector<T> cost_;              // phase-2 costs per column (minimize)
  std::vector<int> basis_;
  std::vector<int> relation_;        // per original row: 0 <=, 1 ==, 2 >=
  std::vector<int> row_sign_;        // +1/-1 applied to make rhs non-negative
  std::vector<int> slack_col_;       // per original row, -1 if none
  std::vector<int> art_col_;         // per original row, -1 if none
  bool maximize_ = false;
  std::vector<T> shift_;             // lower-bound shifts
  std::size_t n_user_rows_ = 0;

  void build(const LpProblemT<T>& pin) {
    LpProblemT<T> p = pin;
    maximize_ = p.sense == LpSense::maximize;
    n_ = p.n_vars();
    shift_.assign(n_, T(0));
    if (!p.lower.empty()) {
      if (p.lower.size() != n_) throw ValidationError("lp: lower bound vector size mismatch");
      shift_ = p.lower;
    }
    n_user_rows_ = p.constraints.size();
    // upper bounds become rows so the core stays a pure >=0 simplex
    if (!p.upper.empty()) {
      if (p.upper.size() != n_) throw ValidationError("lp: upper bound vector size mismatch");
      for (std::size_t j = 0; j < n_; ++j) {
        if (!p.upper[j]) continue;
        std::vector<T> row(n_, T(0));
        row[j] = T(1);
        p.add(std::move(row), LpRelation::less_equal, *p.upper[j]);
      }
    }
    rows_ = p.constraints.size();
    relation_.resize(rows_);
    row_sign_.assign(rows_, 1);
    slack_col_.assign(rows_, -1);
    art_col_.assign(rows_, -1);

    std::size_t n_slack = 0, n_art = 0;
    for (std::size_t i = 0; i < rows_; ++i) {
      const auto& c = p.constraints[i];
      if (c.coeffs.size() != n_) throw ValidationError("lp: constraint width mismatch");
      T rhs = c.rhs;
      for (std::size_t j = 0; j < n_; ++j) rhs -= c.coeffs[j] * shift_[j];
      LpRelation rel = c.rel;
      if (rhs < T(0)) {
        row_sign_[i] = -1;
        if (rel == LpRelation::less_equal) rel = LpRelation::greater_equal;
        else if (rel == LpRelation::greater_equal) rel = LpRelation::less_equal;
      }
      relation_[i] = rel == LpRelation::less_equal ? 0 : rel == LpRelation::equal ? 1 : 2;
      if (relation_[i] != 1) ++n_slack;
      if (relation_[i] != 0) ++n_art;
    }
    art_begin_ = n_ + n_slack;
    total_ = n_ + n_slack + n_art;
    tab_.assign(rows_, std::vector<T>(total_ + 1, T(0)));
    basis_.assign(rows_, -1);
    cost_.assign(total_, T(0));

    std::size_t slack_at = n_, art_at = art_begin_;
    for (std::size_t i = 0; i < rows_; ++i) {
      const auto& c = p.constraints[i];
      T rhs = c.rhs;
      for (std::size_t j = 0; j < n_; ++j) rhs -= c.coeffs[j] * shift_[j];
      T sgn = T(row_sign_[i]);
      for (std::size_t j = 0; j < n_; ++j) tab_[i][j] = sgn * c.coeffs[j];
      tab_[i][total_] = sgn * rhs;
      if (relation_[i] == 0) {  // <=
        slack_col_[i] = static_cast<int>(slack_at);
        tab_[i][slack_at] = T(1);
        basis_[i] = static_cast<int>(slack_at);
        ++slack_at;
      } else if (relation_[i] == 2) {  // >=
        slack_col_[i] = static_cast<int>(slack_at);
        tab_[i][slack_at] = T(-1);
        ++slack_at;
      }
      if (relation_[i] != 0) {
        art_col_[i] = static_cast<int>(art_at);
        tab_[i][art_at] = T(1);
        basis_[i] = static_cast<int>(art_at);
        ++art_at;
      }
    }
    for (std::size_t j = 0; j < n_; ++j) {
      T cj = pin.objective[j];
      cost_[j] = maximize_ ? -cj : cj;
    }
    if (opt_.verbosity > 0)
      std::cerr << "[lp] rows=" << rows_ << " cols=" << total_ << "\n";
  }

  bool phase1() {
    bool need = false;
    for (std::size_t i = 0; i < rows_; ++i)
      if (art_col_[i] >= 0) need = true;
    if (!need) {
      obj_.assign(total_ + 1, T(0));
      return true;
    }
    // minimize sum of artificials
    obj_.assign(total_ + 1, T(0));
    for (std::size_t j = art_begin_; j < total_; ++j) obj_[j] = T(1);
    for (std::size_t i = 0; i < rows_; ++i)
      if (art_col_[i] >= 0) sub_row(obj_, tab_[i], T(1));
    if (!iterate(/*phase1=*/true)) throw NumericalError("lp: phase 1 unbounded");
    // -obj_[total_] is the attained sum of artificials
    if (obj_[total_] > tol_ * 10) throw NumericalError("lp: negative phase-1 objective");
    if (-obj_[total_] > tol_ * 10 + tol_) return false;  // infeasible
    // pivot leftover artificials out of the basis
    for (std::size_t i = 0; i < rows_; ++i) {
      if (basis_[i] < static_cast<int>(art_begin_)) continue;
      std::size_t enter = total_;
      for (std::size_t j = 0; j < art_begin_; ++j) {
        if (abs_val(tab_[i][j]) > tol_) { enter = j; break; }
      }
      if (enter == total_) continue;  // redundant row, leave degenerate artificial at zero
      pivot(i, enter);
    }
    return true;
  }

  void install_phase2_objective() {
    obj_.assign(total_ + 1, T(0));
    for (std::size_t j = 0; j < total_; ++j) obj_[j] = cost_[j];
    // artificials must not re-enter
    for (std::size_t j = art_begin_; j < total_; ++j) obj_[j] = T(0);
    for (std::size_t i = 0; i < rows_; ++i) {
      int b = basis_[i];
      if (b >= 0 && cost_[static_cast<std::size_t>(b)] != T(0))
        sub_row(obj_, tab_[i], cost_[static_cast<std::size_t>(b)]);
    }
  }

  // Dantzig pricing, Bland fallback after 5*(rows+cols) degenerate pivots.
  bool iterate(bool phase1 = false) {
    const std::size_t bland_after = 5 * (rows_ + total_);
    std::size_t degenerate_streak = 0, pivots = 0;
    while (true) {
      if (++pivots > opt_.max_pivots) throw NumericalError("lp: pivot limit reached");
      bool bland = degenerate_streak > bland_after;
      std::size_t enter = total_;
      std::size_t limit = phase1 ? total_ : art_begin_;
      if (bland) {
        for (std::size_t j = 0; j < limit; ++j)
          if (obj_[j] < -tol_) { enter = j; break; }
      } else {
        T best = -tol_;
        for (std::size_t j = 0; j < limit; ++j)
          if (obj_[j] < best) { best = obj_[j]; enter = j; }
      }
      if (enter == total_) return true;  // optimal
      std::size_t leave = rows_;
      T best_ratio = T(0);
      for (std::size_t i = 0; i < rows_; ++i) {
        if (tab_[i][enter] > tol_) {
          T ratio = tab_[i][total_] / tab_[i][enter];
          if (leave == rows_ || ratio < best_ratio ||
              (ratio == best_ratio && basis_[i] < basis_[leave]))
            { best_ratio = ratio; leave = i; }
        }
      }
      if (leave == rows_) return false;  // unbounded
      if (best_ratio == T(0)) ++degenerate_streak; else degenerate_streak = 0;
      pivot(leave, enter);
      if (opt_.verbosity > 1)
        std::cerr << "[lp] pivot enter=" << enter << " leave_row=" << leave << "\n";
      if (opt_.verbosity > 2) dump_tableau();
    }
  }

  void dump_tableau() const {
    for (std::size_t i = 0; i < rows_; ++i) {
      std::cerr << "[lp] row " << i << " basis=" << basis_[i] << ":";
      for (const auto& v : tab_[i]) std::cerr << " " << detail_to_double(v);
      std::cerr << "\n";
    }
  }

  static double detail_to_double(double v) { return v; }
  static double detail_to_double(const Rational& v) { return v.template convert_to<double>(); }

  void pivot(std::size_t row, std::size_t col) {
    T pv = tab_[row][col];
    if (abs_val(pv) <= tol_) throw NumericalError("lp: zero pivot");
    for (auto& v : tab_[row]) v /= pv;
    tab_[row][col] = T(1);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == row) continue;
      if (tab_[i][col] != T(0)) sub_row(tab_[i], tab_[row], tab_[i][col]);
    }
    if (obj_[col] != T(0)) sub_row(obj_, tab_[row], obj_[col]);
    basis_[row] = static_cast<int>(col);
  }

  static void sub_row(std::vector<T>& target, const std::vector<T>& src, T factor) {
    for (std::size_t j = 0; j < target.size(); ++j) target[j] -= factor * src[j];
  }

  static T abs_val(const T& v) { return v < T(0) ? T(-v) : v; }

  void extract(LpSolutionT<T>& out) {
    out.status = LpStatus::optimal;
    out.x.assign(n_, T(0));
    for (std::size_t i = 0; i < rows_; ++i) {
      int b = basis_[i];
      if (b >= 0 && b < static_cast<int>(n_)) out.x[static_cast<std::size_t>(b)] = tab_[i][total_];
    }
    for (std::size_t j = 0; j < n_; ++j) out.x[j] += shift_[j];
    out.value = T(0);
    // objective row of the canonical minimize problem sits in obj_[total_]
    // (negated accumulated value); recompute from x for the user's objective.
    // duals: read simplex multipliers off the reduced-cost row.
    out.dual.assign(n_user_rows_, T(0));
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i >= n_user_rows_) break;  // bound rows excluded from reported duals
      T y;
      if (slack_col_[i] >= 0) {
        T r = obj_[static_cast<std::size_t>(slack_col_[i])];
        T col_sign = relation_[i] == 0 ? T(1) : T(-1);
        y = -r * col_sign;
      } else {
        // equality row: artificial column carries the multiplier
        T r = obj_[static_cast<std::size_t>(art_col_[i])];
        y = -r;
      }
      y *= T(row_sign_[i]);
      out.dual[i] = maximize_ ? -y : y;
    }
  }
};

inline double to_double(double v) { return v; }
inline double to_double(const Rational& v) { return v.template convert_to<double>(); }

}  // namespace detail

// Two-phase dense simplex.  For T = double an optimality certificate is
// checked (objective consistency and weak duality within 1e-7); failure is a
// NumericalError, which callers can tell apart from infeasibility.
template <class T>
LpSolutionT<T> solve(const LpProblemT<T>& p, const LpOptions& opt = LpOptions{}) {
  for (const auto& c : p.constraints)
    if (c.coeffs.size() != p.n_vars()) throw ValidationError("lp: constraint width mismatch");
  detail::SimplexTableau<T> tableau(p, opt);
  LpSolutionT<T> sol = tableau.solve();
  if (sol.status != LpStatus::optimal) return sol;
  T value = T(0);
  for (std::size_t j = 0; j < p.n_vars(); ++j) value += p.objective[j] * sol.x[j];
  sol.value = value;
  if constexpr (std::is_same_v<T, double>) {
    double scale = 1.0;
    for (double cj : p.objective) scale = std::max(scale, std::abs(cj));
    for (std::size_t i = 0; i < p.constraints.size(); ++i) {
      const auto& c = p.constraints[i];
      double lhs = 0.0, rhs_scale = std::abs(c.rhs) + 1.0;
      for (std::size_t j = 0; j < p.n_vars(); ++j) lhs += c.coeffs[j] * sol.x[j];
      double viol = lhs - c.rhs;
      bool ok = (c.rel == LpRelation::less_equal && viol < 1e-7 * rhs_scale) ||
                (c.rel == LpRelation::greater_equal && viol > -1e-7 * rhs_scale) ||
                (c.rel == LpRelation::equal && std::abs(viol) < 1e-7 * rhs_scale);
      if (!ok) throw NumericalError("lp: solution violates constraint " + std::to_string(i));
    }
    // weak duality: b'y must match the primal value
    double by = 0.0;
    for (std::size_t i = 0; i < p.constraints.size(); ++i) by += p.constraints[i].rhs * sol.dual[i];
    if (!p.lower.empty() || !p.upper.empty()) {
      // bound shifts move constants into the dual objective; skip the strict
      // certificate for bounded problems and rely on the feasibility check.
    } else if (std::abs(by - sol.value) > 1e-7 * (std::abs(sol.value) + scale)) {
      throw NumericalError("lp: duality certificate failed");
    }
  }
  return sol;
}

}  // namespace rag
