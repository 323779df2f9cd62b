#ifndef METRO_LP_HPP
#define METRO_LP_HPP

#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "metro/network.hpp"

namespace metro {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// minimize objective . x  subject to  row_lo <= A x <= row_hi,  lo <= x <= hi.
struct LpProblem {
  struct Row {
    std::vector<std::pair<int, double>> coeffs;
    double lo = -kInf;
    double hi = kInf;
  };

  int n_vars = 0;
  std::vector<double> lo, hi;
  std::vector<Row> rows;
  std::vector<double> objective;

  int add_var(double l, double h, double cost = 0.0);
  void add_row(std::vector<std::pair<int, double>> coeffs, double l, double h);
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> x;
  double objective_value = 0.0;
  bool is_vertex = false;
  int certificate = -1;  // infeasible row / unbounded column, when applicable
  long iterations = 0;
};

struct SimplexOptions {
  double feas_tol = 1e-6;
  double opt_tol = 1e-9;
  int refactor_interval = 100;
  long max_iterations = -1;  // -1: scaled default
  // Optional feasible point; nonbasic structurals may start mid-range and are
  // purified to a vertex after optimality.
  std::optional<std::vector<double>> warm_start;
};

LpSolution solve(const LpProblem& problem, const SimplexOptions& opts = {});

// True iff every component of x is within tol of an integer; second value is
// the maximum fractional deviation.
std::pair<bool, double> check_integrality(const LpSolution& sol, double tol);

// Fixed sparse text layout: bounds, rows, objective.
void dump(const LpProblem& problem, std::ostream& os);

}  // namespace metro

#endif  // METRO_LP_HPP
