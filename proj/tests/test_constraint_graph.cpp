#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sstream>

#include "doctest.h"
#include "metro/constraint_graph.hpp"

using namespace metro;

namespace {

// One train over one track: four events, enough to exercise arc merging.
Network two_platform_net() {
  Network net;
  net.platforms = {{"A1", "SA", "1"}, {"B1", "SB", "1"}};
  net.tracks = {{0, 1, 1000.0, false, "A1-B1"}};
  net.trains = {{"t", {0, 1}, {0}, "ph"}};
  net.trip_windows[0] = {80, 100};
  net.dwell_windows[0] = {30, 50};
  net.dwell_windows[1] = {30, 50};
  net.total_travel_windows[0] = {80, 200};
  net.horizon_m = 1000;
  net.finalize();
  return net;
}

ConstraintRecord rec(ConstraintKind kind, EventRef earlier, EventRef later,
                     Seconds lo, Seconds hi, int track = -1) {
  ConstraintRecord r;
  r.kind = kind;
  r.earlier = earlier;
  r.later = later;
  r.window = {lo, hi};
  r.track = track;
  return r;
}

}  // namespace

TEST_CASE("graph has one node per event and one arc per node pair") {
  Network net = two_platform_net();
  EventRef dep0{0, 0, EventKind::Departure};
  EventRef arr1{0, 1, EventKind::Arrival};
  std::vector<ConstraintRecord> records = {
      rec(ConstraintKind::TripTime, dep0, arr1, 80, 100, 0),
      rec(ConstraintKind::Dwell, {0, 0, EventKind::Arrival}, dep0, 30, 50),
  };
  auto g = build_graph(net, records);
  CHECK(g.nodes.size() == 4);
  CHECK(g.arcs.size() == 2);
  CHECK(g.horizon_m == 1000);
  for (int i = 0; i < (int)g.nodes.size(); ++i) {
    CHECK(g.nodes[i].index == i);
    CHECK(net.event_index(g.nodes[i].event) == i);
  }
}

TEST_CASE("colliding records intersect their windows") {
  // [2,10] merged with [5,20] must give [5,10].
  Network net = two_platform_net();
  EventRef dep0{0, 0, EventKind::Departure};
  EventRef arr1{0, 1, EventKind::Arrival};
  std::vector<ConstraintRecord> records = {
      rec(ConstraintKind::HeadwayDeparture, dep0, arr1, 2, 10),
      rec(ConstraintKind::HeadwayArrival, dep0, arr1, 5, 20),
  };
  auto g = build_graph(net, records);
  REQUIRE(g.arcs.size() == 1);
  CHECK(g.arcs[0].lower == 5);
  CHECK(g.arcs[0].upper == 10);
  CHECK(!g.arcs[0].is_trip);
  CHECK(g.arcs[0].source_records == std::vector<int>{0, 1});
}

TEST_CASE("empty window intersection throws and names both records") {
  Network net = two_platform_net();
  EventRef dep0{0, 0, EventKind::Departure};
  EventRef arr1{0, 1, EventKind::Arrival};
  std::vector<ConstraintRecord> records = {
      rec(ConstraintKind::TripTime, dep0, arr1, 80, 100, 0),
      rec(ConstraintKind::Connection, dep0, arr1, 120, 150),
  };
  try {
    build_graph(net, records);
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    std::string msg = e.what();
    CHECK(msg.find("records 0 and 1") != std::string::npos);
  }
}

TEST_CASE("trip flag survives a merge in either order") {
  Network net = two_platform_net();
  EventRef dep0{0, 0, EventKind::Departure};
  EventRef arr1{0, 1, EventKind::Arrival};
  auto trip = rec(ConstraintKind::TripTime, dep0, arr1, 80, 100, 0);
  auto conn = rec(ConstraintKind::Connection, dep0, arr1, 60, 90);

  auto g1 = build_graph(net, {trip, conn});
  REQUIRE(g1.arcs.size() == 1);
  CHECK(g1.arcs[0].is_trip);
  CHECK(g1.arcs[0].track == 0);
  CHECK(g1.arcs[0].lower == 80);
  CHECK(g1.arcs[0].upper == 90);

  auto g2 = build_graph(net, {conn, trip});
  REQUIRE(g2.arcs.size() == 1);
  CHECK(g2.arcs[0].is_trip);
  CHECK(g2.arcs[0].track == 0);
}

TEST_CASE("opposite orientations stay separate arcs") {
  Network net = two_platform_net();
  EventRef dep0{0, 0, EventKind::Departure};
  EventRef arr1{0, 1, EventKind::Arrival};
  std::vector<ConstraintRecord> records = {
      rec(ConstraintKind::Connection, dep0, arr1, 10, 20),
      rec(ConstraintKind::Connection, arr1, dep0, 30, 40),
  };
  auto g = build_graph(net, records);
  CHECK(g.arcs.size() == 2);
}

TEST_CASE("self-loop record is rejected") {
  Network net = two_platform_net();
  EventRef dep0{0, 0, EventKind::Departure};
  std::vector<ConstraintRecord> records = {
      rec(ConstraintKind::Connection, dep0, dep0, 0, 10),
  };
  CHECK_THROWS_AS(build_graph(net, records), InputError);
}

TEST_CASE("incidence row carries +1 on the head and -1 on the tail") {
  CGArc a;
  a.from = 3;
  a.to = 7;
  auto row = incidence_row(a);
  REQUIRE(row.size() == 2);
  CHECK(row[0] == std::pair<int, double>{7, +1.0});
  CHECK(row[1] == std::pair<int, double>{3, -1.0});
}

TEST_CASE("edge list export is line-per-arc") {
  Network net = two_platform_net();
  EventRef arr0{0, 0, EventKind::Arrival};
  EventRef dep0{0, 0, EventKind::Departure};
  EventRef arr1{0, 1, EventKind::Arrival};
  std::vector<ConstraintRecord> records = {
      rec(ConstraintKind::Dwell, arr0, dep0, 30, 50),
      rec(ConstraintKind::TripTime, dep0, arr1, 80, 100, 0),
  };
  auto g = build_graph(net, records);
  std::ostringstream os;
  export_edge_list(g, os);
  CHECK(os.str() == "0 1 30 50 0\n1 2 80 100 1\n");
}
