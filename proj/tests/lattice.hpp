#ifndef METRO_TESTS_LATTICE_HPP
#define METRO_TESTS_LATTICE_HPP

// Exhaustive integer-lattice reference solver for tiny window-constrained
// problems, used as an independent oracle against the simplex.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "metro/lp.hpp"

namespace metro::testing {

struct LatticeArc {
  int from = 0;
  int to = 0;
  Seconds lower = 0;
  Seconds upper = 0;
};

// Minimizes `objective` over all integer points of [0,horizon]^n satisfying
// lower <= x_to - x_from <= upper per arc. DFS in variable order with
// window propagation from already assigned endpoints.
inline std::optional<double> lattice_minimum(
    int n_vars, Seconds horizon, const std::vector<LatticeArc>& arcs,
    const std::function<double(const std::vector<Seconds>&)>& objective) {
  std::vector<Seconds> x(n_vars, 0);
  double best = std::numeric_limits<double>::infinity();
  bool found = false;

  std::function<void(int)> dfs = [&](int k) {
    if (k == n_vars) {
      double v = objective(x);
      if (v < best) best = v;
      found = true;
      return;
    }
    Seconds lo = 0, hi = horizon;
    for (const auto& a : arcs) {
      if (a.to == k && a.from < k) {
        lo = std::max(lo, x[a.from] + a.lower);
        hi = std::min(hi, x[a.from] + a.upper);
      } else if (a.from == k && a.to < k) {
        lo = std::max(lo, x[a.to] - a.upper);
        hi = std::min(hi, x[a.to] - a.lower);
      }
    }
    for (Seconds v = lo; v <= hi; ++v) {
      x[k] = v;
      dfs(k + 1);
    }
  };
  dfs(0);
  if (!found) return std::nullopt;
  return best;
}

// The same feasibility structure expressed as an LpProblem.
inline LpProblem lattice_lp(int n_vars, Seconds horizon,
                            const std::vector<LatticeArc>& arcs,
                            const std::vector<double>& objective) {
  LpProblem lp;
  for (int i = 0; i < n_vars; ++i)
    lp.add_var(0.0, (double)horizon, objective[i]);
  for (const auto& a : arcs)
    lp.add_row({{a.to, 1.0}, {a.from, -1.0}}, (double)a.lower,
               (double)a.upper);
  return lp;
}

}  // namespace metro::testing

#endif  // METRO_TESTS_LATTICE_HPP
