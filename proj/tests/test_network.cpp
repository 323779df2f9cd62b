#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "metro/generator.hpp"
#include "metro/network.hpp"

using namespace metro;

namespace {

// Two stations, one train per direction, one crossover turnaround.
Network tiny_network() {
  Network net;
  net.platforms = {{"A1", "SA", "1"}, {"B1", "SB", "1"},
                   {"B2", "SB", "2"}, {"A2", "SA", "2"}};
  net.tracks = {{0, 1, 1000.0, false, "A1-B1"},
                {2, 3, 1000.0, false, "B2-A2"},
                {1, 2, 400.0, true, "B1-B2"}};
  net.trains = {{"up", {0, 1}, {0}, "ph"}, {"down", {2, 3}, {1}, "ph"}};
  net.turnarounds = {{2, 0, 1, {60, 120}}};
  net.trip_windows[0] = {80, 100};
  net.trip_windows[1] = {80, 100};
  net.dwell_windows[0] = {30, 50};
  net.dwell_windows[1] = {30, 50};
  net.dwell_windows[2] = {30, 50};
  net.dwell_windows[3] = {30, 50};
  net.total_travel_windows[0] = {80, 200};
  net.total_travel_windows[1] = {80, 200};
  net.opposite_pairs = {{0, 3}, {1, 2}};
  net.horizon_m = 2000;
  net.finalize();
  return net;
}

Timetable tiny_seed(const Network& net) {
  Timetable tt(net, Provenance::Seed);
  tt.at(net, 0, 0, EventKind::Arrival) = 0;
  tt.at(net, 0, 0, EventKind::Departure) = 40;
  tt.at(net, 0, 1, EventKind::Arrival) = 130;
  tt.at(net, 0, 1, EventKind::Departure) = 170;
  tt.at(net, 1, 0, EventKind::Arrival) = 250;   // 80 after the departure
  tt.at(net, 1, 0, EventKind::Departure) = 290;
  tt.at(net, 1, 1, EventKind::Arrival) = 380;
  tt.at(net, 1, 1, EventKind::Departure) = 420;
  return tt;
}

}  // namespace

TEST_CASE("event indexing round-trips") {
  Network net = tiny_network();
  CHECK(net.n_events == 8);
  for (int i = 0; i < net.n_events; ++i) {
    EventRef e = net.event_of_index(i);
    CHECK(net.event_index(e) == i);
  }
  CHECK(net.event_index(0, 0, EventKind::Arrival) == 0);
  CHECK(net.event_index(1, 1, EventKind::Departure) == 7);
}

TEST_CASE("valid network produces no violations") {
  CHECK(validate(tiny_network()).empty());
}

TEST_CASE("validator flags broken invariants") {
  auto reasons = [](const Network& net) {
    std::vector<std::string> out;
    for (const auto& v : validate(net)) out.push_back(v.reason);
    return out;
  };
  auto contains = [](const std::vector<std::string>& rs, const char* what) {
    for (const auto& r : rs)
      if (r.find(what) != std::string::npos) return true;
    return false;
  };

  SUBCASE("duplicate platform id") {
    Network net = tiny_network();
    net.platforms[1].id = "A1";
    CHECK(contains(reasons(net), "duplicate platform"));
  }
  SUBCASE("track joining opposite platforms") {
    Network net = tiny_network();
    net.tracks[0].to = 3;  // A1 -> A2, same station
    CHECK(contains(reasons(net), "opposite platforms"));
  }
  SUBCASE("nonpositive track length") {
    Network net = tiny_network();
    net.tracks[0].length_m = 0;
    CHECK(contains(reasons(net), "length"));
  }
  SUBCASE("window lower above upper") {
    Network net = tiny_network();
    net.trip_windows[0] = {90, 80};
    CHECK(contains(reasons(net), "lower>upper"));
  }
  SUBCASE("path discontinuity") {
    Network net = tiny_network();
    net.trains[0].path_tracks = {1};
    CHECK(contains(reasons(net), "discontinuity"));
  }
  SUBCASE("turnaround endpoints must match the paths") {
    Network net = tiny_network();
    net.turnarounds[0].train_from = 1;
    net.turnarounds[0].train_to = 0;
    CHECK(contains(reasons(net), "turnaround endpoints"));
  }
  SUBCASE("headway train off the track") {
    Network net = tiny_network();
    net.headways.push_back({0, 0, 1, {10, 100}, {10, 100}});
    CHECK(contains(reasons(net), "does not use the track"));
  }
  SUBCASE("opposite pair across stations") {
    Network net = tiny_network();
    net.opposite_pairs[0] = {0, 2};
    CHECK(contains(reasons(net), "spans two stations"));
  }
  SUBCASE("nonpositive horizon") {
    Network net = tiny_network();
    net.horizon_m = 0;
    CHECK(contains(reasons(net), "horizon"));
  }
}

TEST_CASE("headway_from_demand closed form") {
  // 3600 * 1860 * 0.85 / 20000 = 284.58 exactly.
  CHECK(headway_from_demand(20000, 1860, 0.85) ==
        doctest::Approx(284.58).epsilon(1e-12));
  CHECK(headway_from_demand(3600, 1, 1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(headway_from_demand(0, 1860, 0.85), InputError);
  CHECK_THROWS_AS(headway_from_demand(20000, -1, 0.85), InputError);
  CHECK_THROWS_AS(headway_from_demand(20000, 1860, 1.5), InputError);
}

TEST_CASE("constraint enumeration covers every family") {
  Network net = tiny_network();
  Timetable seed = tiny_seed(net);
  auto records = enumerate_constraints(net, seed);

  int by_kind[9] = {};
  for (const auto& r : records) ++by_kind[(int)r.kind];
  CHECK(by_kind[(int)ConstraintKind::Dwell] == 4);
  CHECK(by_kind[(int)ConstraintKind::TripTime] == 2);
  CHECK(by_kind[(int)ConstraintKind::TotalTravel] == 2);
  CHECK(by_kind[(int)ConstraintKind::CrossoverTrip] == 1);
  CHECK(records.size() == 9);

  // The crossover trip links the relabelled trains across the turnaround.
  for (const auto& r : records)
    if (r.kind == ConstraintKind::CrossoverTrip) {
      CHECK(r.earlier.train == 0);
      CHECK(r.later.train == 1);
      CHECK(r.track == 2);
    }
}

TEST_CASE("seed violating a window is rejected with the record named") {
  Network net = tiny_network();
  Timetable seed = tiny_seed(net);
  seed.at(net, 0, 1, EventKind::Arrival) = 200;  // trip of 160 > 100
  CHECK_THROWS_AS(enumerate_constraints(net, seed), InfeasibleError);
}

TEST_CASE("headway records are oriented by the seed order") {
  Network net = tiny_network();
  // Second train on the same track, departing earlier than "up".
  net.trains.push_back({"up2", {0, 1}, {0}, "ph"});
  net.total_travel_windows[2] = {80, 200};
  net.finalize();
  Timetable seed(net, Provenance::Seed);
  auto set = [&](int tr, Seconds a0, Seconds d0, Seconds a1, Seconds d1) {
    seed.at(net, tr, 0, EventKind::Arrival) = a0;
    seed.at(net, tr, 0, EventKind::Departure) = d0;
    seed.at(net, tr, 1, EventKind::Arrival) = a1;
    seed.at(net, tr, 1, EventKind::Departure) = d1;
  };
  set(0, 200, 240, 330, 370);
  set(1, 450, 490, 580, 620);
  set(2, 0, 40, 130, 170);  // up2 runs first
  net.turnarounds.clear();
  net.headways.push_back({0, 0, 2, {150, 300}, {150, 300}});

  auto records = enumerate_constraints(net, seed);
  bool saw_dep = false, saw_arr = false;
  for (const auto& r : records) {
    if (r.kind == ConstraintKind::HeadwayDeparture) {
      saw_dep = true;
      CHECK(r.earlier.train == 2);  // seed order, not declaration order
      CHECK(r.later.train == 0);
    }
    if (r.kind == ConstraintKind::HeadwayArrival) {
      saw_arr = true;
      CHECK(r.earlier.train == 2);
    }
  }
  CHECK(saw_dep);
  CHECK(saw_arr);
}

TEST_CASE("violated_records pinpoints exact violations") {
  Network net = tiny_network();
  Timetable seed = tiny_seed(net);
  auto records = enumerate_constraints(net, seed);
  CHECK(violated_records(net, records, seed).empty());

  Timetable bad = seed;
  bad.at(net, 0, 0, EventKind::Departure) = 55;  // dwell 55 > 50
  auto v = violated_records(net, records, bad);
  REQUIRE(!v.empty());
  bool found = false;
  for (int idx : v)
    if (idx >= 0 && records[idx].kind == ConstraintKind::Dwell) found = true;
  CHECK(found);

  Timetable domain = seed;
  domain[0] = -1;
  auto dv = violated_records(net, records, domain);
  bool has_domain = false;
  for (int idx : dv)
    if (idx == -1) has_domain = true;  // -1 - event 0
  CHECK(has_domain);
}

TEST_CASE("generated instances pass the validator and seed check") {
  for (unsigned s : {1u, 2u, 3u}) {
    GeneratorConfig cfg;
    cfg.stations = 6;
    cfg.trains = 8;
    cfg.headway = 300;
    cfg.rng_seed = s;
    auto inst = generate_instance(cfg);
    CHECK(validate(inst.net).empty());
    auto records = enumerate_constraints(inst.net, inst.seed);
    CHECK(violated_records(inst.net, records, inst.seed).empty());
  }
}

TEST_CASE("generator is deterministic in the rng seed") {
  GeneratorConfig cfg;
  cfg.stations = 5;
  cfg.trains = 6;
  cfg.headway = 280;
  cfg.rng_seed = 9;
  auto a = generate_instance(cfg);
  auto b = generate_instance(cfg);
  REQUIRE(a.net.n_events == b.net.n_events);
  for (int i = 0; i < a.net.n_events; ++i) CHECK(a.seed[i] == b.seed[i]);
  REQUIRE(a.net.tracks.size() == b.net.tracks.size());
  for (std::size_t t = 0; t < a.net.tracks.size(); ++t)
    CHECK(a.net.tracks[t].length_m == b.net.tracks[t].length_m);
}

TEST_CASE("single-train instance has no headways or turnarounds") {
  GeneratorConfig cfg;
  cfg.stations = 4;
  cfg.trains = 1;
  cfg.headway = 300;
  auto inst = generate_instance(cfg);
  CHECK(inst.net.trains.size() == 1);
  CHECK(inst.net.headways.empty());
  CHECK(inst.net.turnarounds.empty());
  CHECK(validate(inst.net).empty());
}
