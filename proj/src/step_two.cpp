#include "metro/step_two.hpp"

#include <cmath>

namespace metro {

StepTwoLp build_step_two_lp(const Network& net, const ConstraintGraph& graph,
                            const Timetable& emt,
                            const std::vector<SyncPair>& pairs,
                            const OffsetTable& offsets) {
  StepTwoLp out;
  out.n_events = (int)graph.nodes.size();
  LpProblem& lp = out.lp;
  for (int i = 0; i < out.n_events; ++i)
    lp.add_var(0.0, (double)graph.horizon_m);

  for (const auto& arc : graph.arcs) {
    if (arc.is_trip) {
      double tt = (double)(emt[arc.to] - emt[arc.from]);
      lp.add_row(incidence_row(arc), tt, tt);
    } else {
      lp.add_row(incidence_row(arc), (double)arc.lower, (double)arc.upper);
    }
  }

  for (const auto& p : pairs) {
    bool right = p.direction == PairDirection::Right;
    int dep_train = right ? p.train_t : p.partner;
    int dep_plat = right ? p.platform_i : p.platform_j;
    int arr_train = right ? p.partner : p.train_t;
    int arr_plat = right ? p.platform_j : p.platform_i;

    int dep_pos = net.path_position(dep_train, dep_plat);
    int arr_pos = net.path_position(arr_train, arr_plat);
    if (dep_pos < 0 || arr_pos < 0)
      throw InputError("sync pair references a platform off the train's path");
    StepTwoLp::PairRow pr;
    pr.dep_event = net.event_index(dep_train, dep_pos, EventKind::Departure);
    pr.arr_event = net.event_index(arr_train, arr_pos, EventKind::Arrival);
    pr.constant = offsets.delta.at({dep_train, dep_plat}) +
                  offsets.nabla.at({arr_train, arr_plat});

    int theta = lp.add_var(0.0, kInf, 1.0);
    lp.add_row({{theta, 1.0}, {pr.dep_event, -1.0}, {pr.arr_event, 1.0}},
               pr.constant, kInf);
    lp.add_row({{theta, 1.0}, {pr.dep_event, 1.0}, {pr.arr_event, -1.0}},
               -pr.constant, kInf);
    out.pair_rows.push_back(pr);
  }
  return out;
}

SyncReport misalignment_report(const StepTwoLp& lp,
                               const std::vector<double>& event_times) {
  SyncReport rep;
  for (const auto& pr : lp.pair_rows) {
    double y = event_times[pr.dep_event] + pr.constant -
               event_times[pr.arr_event];
    rep.misalignment.push_back(y);
    rep.total_l1 += std::abs(y);
    if (std::abs(y) <= 1e-6) ++rep.aligned_count;
  }
  return rep;
}

StepTwoResult solve_final(const Network& net,
                          const std::vector<ConstraintRecord>& records,
                          const StepTwoLp& lp, const Timetable& emt,
                          const SimplexOptions& opts) {
  SimplexOptions so = opts;
  if (!so.warm_start) {
    std::vector<double> x0(lp.lp.n_vars, 0.0);
    for (int i = 0; i < lp.n_events; ++i) x0[i] = (double)emt[i];
    for (std::size_t p = 0; p < lp.pair_rows.size(); ++p) {
      const auto& pr = lp.pair_rows[p];
      x0[lp.n_events + (int)p] =
          std::abs(x0[pr.dep_event] + pr.constant - x0[pr.arr_event]);
    }
    so.warm_start = std::move(x0);
  }
  LpSolution sol = solve(lp.lp, so);
  if (sol.status != LpStatus::Optimal)
    throw SolverError("step-two LP failed although the EMT is feasible");

  StepTwoResult res;
  res.exact.assign(sol.x.begin(), sol.x.begin() + lp.n_events);
  res.objective = sol.objective_value;
  res.iterations = sol.iterations;
  res.n_rows = (int)lp.lp.rows.size();
  res.n_vars = lp.lp.n_vars;
  res.report = misalignment_report(lp, res.exact);

  res.final_tt = Timetable(net, Provenance::Final);
  for (int i = 0; i < lp.n_events; ++i)
    res.final_tt[i] = (Seconds)std::llround(res.exact[i]);
  res.rounded_ok = violated_records(net, records, res.final_tt).empty();
  return res;
}

}  // namespace metro
