#ifndef METRO_STEP_TWO_HPP
#define METRO_STEP_TWO_HPP

#include "metro/constraint_graph.hpp"
#include "metro/lp.hpp"
#include "metro/sync_pairing.hpp"

namespace metro {

// Epigraph LP over event times plus one theta per sync pair. Trip arcs are
// pinned to their EMT differences; theta rows bound the pair misalignments.
struct StepTwoLp {
  LpProblem lp;
  int n_events = 0;
  // Per pair: (departure event, arrival event, offset constant) so the signed
  // misalignment d + constant - a can be recovered from any solution.
  struct PairRow {
    int dep_event = -1;
    int arr_event = -1;
    double constant = 0;
  };
  std::vector<PairRow> pair_rows;
};

StepTwoLp build_step_two_lp(const Network& net, const ConstraintGraph& graph,
                            const Timetable& emt,
                            const std::vector<SyncPair>& pairs,
                            const OffsetTable& offsets);

struct SyncReport {
  std::vector<double> misalignment;  // signed, one per pair
  int aligned_count = 0;             // |misalignment| <= 1e-6
  double total_l1 = 0;
};

SyncReport misalignment_report(const StepTwoLp& lp,
                               const std::vector<double>& event_times);

struct StepTwoResult {
  std::vector<double> exact;  // event times at the LP optimum
  Timetable final_tt;         // rounded to whole seconds
  bool rounded_ok = false;    // rounding kept every constraint window
  SyncReport report;
  double objective = 0;
  long iterations = 0;
  int n_rows = 0;
  int n_vars = 0;
};

// Warm starts from the EMT (always feasible for this LP), minimizes the
// summed misalignment and rounds the result. Trip times are preserved by
// construction; the rounded timetable is revalidated and flagged.
StepTwoResult solve_final(const Network& net,
                          const std::vector<ConstraintRecord>& records,
                          const StepTwoLp& lp, const Timetable& emt,
                          const SimplexOptions& opts = {});

}  // namespace metro

#endif  // METRO_STEP_TWO_HPP
