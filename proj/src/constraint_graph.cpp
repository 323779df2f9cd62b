#include "metro/constraint_graph.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <sstream>

namespace metro {

ConstraintGraph build_graph(const Network& net,
                            const std::vector<ConstraintRecord>& records) {
  ConstraintGraph g;
  g.horizon_m = net.horizon_m;
  g.nodes.resize(net.n_events);
  for (int i = 0; i < net.n_events; ++i) {
    g.nodes[i].index = i;
    g.nodes[i].event = net.event_of_index(i);
  }

  std::map<std::pair<int, int>, int> arc_of;  // (from,to) -> arc index
  for (int ri = 0; ri < (int)records.size(); ++ri) {
    const auto& r = records[ri];
    int from = net.event_index(r.earlier);
    int to = net.event_index(r.later);
    if (from == to) throw InputError("constraint links an event to itself");
    bool trip = r.kind == ConstraintKind::TripTime ||
                r.kind == ConstraintKind::CrossoverTrip;
    auto [it, inserted] = arc_of.try_emplace({from, to}, (int)g.arcs.size());
    if (inserted) {
      CGArc a;
      a.from = from;
      a.to = to;
      a.lower = r.window.lower;
      a.upper = r.window.upper;
      a.is_trip = trip;
      a.track = r.track;
      a.source_records = {ri};
      g.arcs.push_back(a);
    } else {
      CGArc& a = g.arcs[it->second];
      Seconds lo = std::max(a.lower, r.window.lower);
      Seconds hi = std::min(a.upper, r.window.upper);
      if (lo > hi) {
        std::ostringstream os;
        os << "window intersection empty between records "
           << a.source_records.front() << " and " << ri << " on arc (" << from
           << "," << to << ")";
        throw InfeasibleError(os.str());
      }
      a.lower = lo;
      a.upper = hi;
      a.is_trip = a.is_trip || trip;
      if (trip) a.track = r.track;
      a.source_records.push_back(ri);
    }
  }
  return g;
}

std::vector<std::pair<int, double>> incidence_row(const CGArc& arc) {
  return {{arc.to, +1.0}, {arc.from, -1.0}};
}

void export_edge_list(const ConstraintGraph& g, std::ostream& os) {
  for (const auto& a : g.arcs)
    os << a.from << ' ' << a.to << ' ' << a.lower << ' ' << a.upper << ' '
       << (a.is_trip ? 1 : 0) << '\n';
}

}  // namespace metro
