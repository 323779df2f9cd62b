#ifndef METRO_CONSTRAINT_GRAPH_HPP
#define METRO_CONSTRAINT_GRAPH_HPP

#include <iosfwd>
#include <vector>

#include "metro/network.hpp"

namespace metro {

struct CGNode {
  int index = -1;
  EventRef event;
};

struct CGArc {
  int from = -1;
  int to = -1;
  Seconds lower = 0;
  Seconds upper = 0;
  bool is_trip = false;
  int track = -1;          // for trip arcs, the track/crossover index
  int energy_model = -1;   // index into a fitted model table, -1 until fit
  std::vector<int> source_records;  // provenance, indices into the record list
};

struct ConstraintGraph {
  std::vector<CGNode> nodes;
  std::vector<CGArc> arcs;
  Seconds horizon_m = 0;
};

// One node per event time, one arc per ordered node pair; colliding records
// intersect their windows.
ConstraintGraph build_graph(const Network& net,
                            const std::vector<ConstraintRecord>& records);

// Sparse +1/-1 incidence row of one arc: {to: +1, from: -1}.
std::vector<std::pair<int, double>> incidence_row(const CGArc& arc);

// Plain-text edge list: one "from to lower upper is_trip" line per arc.
void export_edge_list(const ConstraintGraph& g, std::ostream& os);

}  // namespace metro

#endif  // METRO_CONSTRAINT_GRAPH_HPP
