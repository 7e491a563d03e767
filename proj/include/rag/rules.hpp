#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rag/errors.hpp"

namespace rag {

// Per-resource welfare table w(0..N).  w(0) is always 0; the table is the
// finite truncation of a rule defined on all counts.
struct WelfareRule {
  std::vector<double> values;  // size n_max + 1, values[0] == 0
  int n_max = 0;
  std::string label;
  bool submodular = false;
  bool supermodular = false;

  double value(int j) const {
    if (j < 0 || j > n_max) throw ValidationError("welfare index out of range: " + std::to_string(j));
    return values[static_cast<std::size_t>(j)];
  }

  // w(j) - w(j-1)
  double increment(int j) const { return value(j) - value(j - 1); }

  void validate() const {
    if (n_max < 1 || values.size() != static_cast<std::size_t>(n_max) + 1)
      throw ValidationError("welfare table size does not match n_max");
    if (values[0] != 0.0) throw ValidationError("welfare rule must have w(0) = 0");
    for (int j = 1; j <= n_max; ++j)
      if (!(values[static_cast<std::size_t>(j)] > 0.0) || !std::isfinite(values[static_cast<std::size_t>(j)]))
        throw ValidationError("welfare rule requires w(j) > 0 for j >= 1");
    constexpr double kTol = 1e-12;
    if (submodular) {
      for (int j = 1; j < n_max; ++j) {
        if (increment(j + 1) < -kTol) throw ValidationError("submodular rule must be non-decreasing");
        if (increment(j + 1) > increment(j) + kTol)
          throw ValidationError("submodular rule must have non-increasing increments");
      }
    }
    if (supermodular) {
      for (int j = 1; j <= n_max; ++j)
        if (increment(j) < -kTol) throw ValidationError("supermodular rule must be non-decreasing");
      for (int j = 1; j < n_max; ++j)
        if (increment(j + 1) < increment(j) - kTol)
          throw ValidationError("supermodular rule must have non-decreasing increments");
    }
  }
};

// Per-resource agent utility table f(1..N); the object utility design
// synthesizes.  Index 0 is kept as 0 so f and w share indexing.
struct UtilityRule {
  std::vector<double> values;  // size n_max + 1, values[0] == 0 by convention
  int n_max = 0;

  double value(int j) const {
    if (j < 1 || j > n_max) throw ValidationError("utility index out of range: " + std::to_string(j));
    return values[static_cast<std::size_t>(j)];
  }

  void validate() const {
    if (n_max < 1 || values.size() != static_cast<std::size_t>(n_max) + 1)
      throw ValidationError("utility table size does not match n_max");
    for (int j = 1; j <= n_max; ++j)
      if (values[static_cast<std::size_t>(j)] < 0.0 || !std::isfinite(values[static_cast<std::size_t>(j)]))
        throw ValidationError("utility rule requires f(j) >= 0");
  }
};

inline bool is_non_increasing(const UtilityRule& f, double tol = 1e-12) {
  for (int j = 1; j < f.n_max; ++j)
    if (f.value(j + 1) > f.value(j) + tol) return false;
  return true;
}

inline bool is_non_decreasing(const UtilityRule& f, double tol = 1e-12) {
  for (int j = 1; j < f.n_max; ++j)
    if (f.value(j + 1) < f.value(j) - tol) return false;
  return true;
}

// Tail extensions used by the truncated programs: welfare continues with its
// last increment (exact for eventually-affine rules), utility with its last
// value (the conservative non-increasing tail).
inline double welfare_tail(const WelfareRule& w, int j) {
  if (j <= w.n_max) return w.value(j);
  return w.value(w.n_max) + (j - w.n_max) * w.increment(w.n_max);
}

inline double utility_tail(const UtilityRule& f, int j) {
  if (j <= f.n_max) return f.value(j);
  return f.value(f.n_max);
}

inline constexpr int kDefaultNMax = 64;

// Slope-1 up to b, slope 1-c afterward (the curvature-c basis family).
inline WelfareRule b_covering(int b, double c, int n_max = kDefaultNMax) {
  if (b < 1 || c < 0.0 || c > 1.0 || b >= n_max)
    throw ValidationError("b_covering requires b >= 1, c in [0,1], b < n_max");
  WelfareRule w;
  w.n_max = n_max;
  w.label = "b_covering(b=" + std::to_string(b) + ",c=" + std::to_string(c) + ")";
  w.submodular = true;
  w.values.resize(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (int j = 1; j <= n_max; ++j)
    w.values[static_cast<std::size_t>(j)] = (j <= b) ? static_cast<double>(j) : b + (1.0 - c) * (j - b);
  w.validate();
  return w;
}

inline WelfareRule set_covering(int n_max = kDefaultNMax) {
  WelfareRule w = b_covering(1, 1.0, n_max);
  w.label = "set_covering";
  return w;
}

inline WelfareRule additive_rule(int n_max = kDefaultNMax) {
  WelfareRule w;
  w.n_max = n_max;
  w.label = "additive";
  w.submodular = true;
  w.supermodular = true;
  w.values.resize(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (int j = 1; j <= n_max; ++j) w.values[static_cast<std::size_t>(j)] = j;
  w.validate();
  return w;
}

// 1 - (w(N) - w(N-1))/w(1): the truncated surrogate for the limiting
// marginal increment.  Exact whenever the rule is affine beyond some b < N.
inline double curvature(const WelfareRule& w) {
  if (!w.submodular) throw ValidationError("curvature requires a submodular-flagged rule");
  if (w.n_max < 2) throw ValidationError("curvature requires n_max >= 2");
  return 1.0 - w.increment(w.n_max) / w.value(1);
}

// max_j w(j)/j over the table; 1 for normalized submodular rules, w(N)/N for
// supermodular ones.
inline double steepness(const WelfareRule& w) {
  double best = 0.0;
  for (int j = 1; j <= w.n_max; ++j) best = std::max(best, w.value(j) / j);
  return best;
}

// Coefficients alpha[b], b = 1..N-1, with
//   alpha[b] = (2 w(b) - w(b-1) - w(b+1)) / c,
// reproducing w over 0..N-1 as a non-negative combination of b_covering
// rules of curvature c = curvature(w).  alpha[0] is unused.
inline std::vector<double> basis_decompose(const WelfareRule& w) {
  if (!w.submodular) throw ValidationError("basis_decompose requires a submodular rule");
  if (std::abs(w.value(1) - 1.0) > 1e-9)
    throw ValidationError("basis_decompose requires w(1) = 1");
  const double c = curvature(w);
  if (c <= 0.0) throw InfeasibleError("zero-curvature rule has no b-covering decomposition");
  std::vector<double> alpha(static_cast<std::size_t>(w.n_max), 0.0);
  for (int b = 1; b <= w.n_max - 1; ++b) {
    double a = (2.0 * w.value(b) - w.value(b - 1) - w.value(b + 1)) / c;
    alpha[static_cast<std::size_t>(b)] = std::max(a, 0.0);
  }
  return alpha;
}

}  // namespace rag
