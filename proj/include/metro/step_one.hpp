#ifndef METRO_STEP_ONE_HPP
#define METRO_STEP_ONE_HPP

#include "metro/constraint_graph.hpp"
#include "metro/energy_fit.hpp"
#include "metro/lp.hpp"

namespace metro {

// One variable per event in [0, m], one row per graph arc. Objective is the
// summed marginal cost c of each trip arc applied to its time difference;
// constant terms b are dropped.
LpProblem build_step_one_lp(const ConstraintGraph& graph,
                            const FitSummary& fit);

struct StepOneResult {
  Timetable emt;            // rounded integral optimum
  double objective = 0;     // LP objective at the optimum (without b terms)
  double max_fractional = 0;
  long iterations = 0;
  int n_rows = 0;
  int n_vars = 0;
};

// Solves the step-one LP warm started from the seed and returns the
// energy-minimal timetable. The optimum must be integral up to `int_tol`.
StepOneResult solve_emt(const Network& net,
                        const std::vector<ConstraintRecord>& records,
                        const ConstraintGraph& graph, const FitSummary& fit,
                        const Timetable& seed, double int_tol = 1e-7,
                        const SimplexOptions& opts = {});

}  // namespace metro

#endif  // METRO_STEP_ONE_HPP
