#include "metro/step_one.hpp"

#include <cmath>
#include <sstream>

namespace metro {

LpProblem build_step_one_lp(const ConstraintGraph& graph,
                            const FitSummary& fit) {
  LpProblem lp;
  for (std::size_t i = 0; i < graph.nodes.size(); ++i)
    lp.add_var(0.0, (double)graph.horizon_m);
  for (const auto& arc : graph.arcs) {
    lp.add_row(incidence_row(arc), (double)arc.lower, (double)arc.upper);
    if (arc.is_trip && arc.track >= 0) {
      auto it = fit.by_track.find(arc.track);
      if (it == fit.by_track.end())
        throw InputError("trip arc without an energy model");
      lp.objective[arc.to] += it->second.c;
      lp.objective[arc.from] -= it->second.c;
    }
  }
  return lp;
}

StepOneResult solve_emt(const Network& net,
                        const std::vector<ConstraintRecord>& records,
                        const ConstraintGraph& graph, const FitSummary& fit,
                        const Timetable& seed, double int_tol,
                        const SimplexOptions& opts) {
  LpProblem lp = build_step_one_lp(graph, fit);

  SimplexOptions so = opts;
  if (!so.warm_start) {
    std::vector<double> x0(lp.n_vars);
    for (int i = 0; i < lp.n_vars; ++i) x0[i] = (double)seed[i];
    so.warm_start = std::move(x0);
  }
  LpSolution sol = solve(lp, so);
  if (sol.status == LpStatus::Infeasible)
    throw InfeasibleError("step-one LP is infeasible");
  if (sol.status == LpStatus::Unbounded)
    throw SolverError("step-one LP is unbounded");

  auto [integral, max_frac] = check_integrality(sol, int_tol);
  if (!integral) {
    std::ostringstream os;
    os << "step-one optimum is not integral (max fractional part " << max_frac
       << ")";
    throw SolverError(os.str());
  }

  StepOneResult res;
  res.emt = Timetable(net, Provenance::EMT);
  for (int i = 0; i < lp.n_vars; ++i)
    res.emt[i] = (Seconds)std::llround(sol.x[i]);
  res.objective = sol.objective_value;
  res.max_fractional = max_frac;
  res.iterations = sol.iterations;
  res.n_rows = (int)lp.rows.size();
  res.n_vars = lp.n_vars;

  auto bad = violated_records(net, records, res.emt);
  if (!bad.empty())
    throw SolverError("rounded step-one timetable violates a constraint");
  return res;
}

}  // namespace metro
