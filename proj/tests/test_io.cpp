#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sstream>

#include "doctest.h"
#include "metro/generator.hpp"
#include "metro/io.hpp"

using namespace metro;

namespace {

const char* kSmallNetwork = R"(# two lines, one station pair each
horizon 2000
platform A1 SA 1
platform B1 SB 1
platform B2 SB 2
platform A2 SA 2
track A1 B1 1000
track B2 A2 1000
crossover B1 B2 400
train up ph A1 B1
train down ph B2 A2
trip_window A1-B1 80 100
trip_window B2-A2 80 100
dwell_window A1 30 50
dwell_window B1 30 50
dwell_window B2 30 50
dwell_window A2 30 50
total_window up 80 400
total_window down 80 400
turnaround B1-B2 up down 60 120
opposite A1 A2
opposite B1 B2
)";

Network parse(const std::string& text) {
  std::istringstream in(text);
  return load_network(in);
}

std::string expect_error(const std::string& text) {
  try {
    parse(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("network keyword format loads every section") {
  Network net = parse(kSmallNetwork);
  CHECK(net.platforms.size() == 4);
  CHECK(net.tracks.size() == 3);
  CHECK(net.tracks[2].is_crossover);
  CHECK(net.tracks[2].length_m == doctest::Approx(400.0));
  CHECK(net.trains.size() == 2);
  CHECK(net.trains[0].path_platforms == std::vector<int>{0, 1});
  CHECK(net.trains[0].path_tracks == std::vector<int>{0});
  REQUIRE(net.turnarounds.size() == 1);
  CHECK(net.turnarounds[0].crossover == 2);
  CHECK(net.turnarounds[0].window.lower == 60);
  CHECK(net.opposite_pairs.size() == 2);
  CHECK(net.horizon_m == 2000);
  CHECK(validate(net).empty());
}

TEST_CASE("forward references to later declarations work") {
  // Windows before the ids they mention: the loader buffers them.
  std::string text = R"(trip_window A-B 5 9
horizon 100
platform A S1 1
platform B S2 1
track A B 500
train t ph A B
dwell_window A 2 4
dwell_window B 2 4
total_window t 5 50
)";
  Network net = parse(text);
  CHECK(net.trip_window(0).upper == 9);
}

TEST_CASE("loader errors carry the line number") {
  CHECK(expect_error("bogus 1 2\n").find("line 1: unknown keyword 'bogus'") !=
        std::string::npos);
  CHECK(expect_error("horizon ten\n").find("line 1: expected an integer") !=
        std::string::npos);
  CHECK(expect_error("platform A S 1\nplatform A S 1\n")
            .find("line 2: duplicate platform 'A'") != std::string::npos);
  CHECK(expect_error("platform A S 1\ntrack A B 100\n")
            .find("line 2: unknown platform 'B'") != std::string::npos);
  CHECK(expect_error("trip_window A-B 1 2\nhorizon 5\n")
            .find("unknown track 'A-B'") != std::string::npos);
  CHECK(expect_error("horizon 10\ntrain t ph A\n")
            .find("line 2") != std::string::npos);
}

TEST_CASE("network save/load round-trips a generated instance") {
  GeneratorConfig cfg;
  cfg.stations = 5;
  cfg.trains = 4;
  cfg.headway = 300;
  cfg.rng_seed = 7;
  auto inst = generate_instance(cfg);

  std::ostringstream os;
  save_network(inst.net, os);
  std::istringstream in(os.str());
  Network back = load_network(in);

  CHECK(back.platforms.size() == inst.net.platforms.size());
  CHECK(back.tracks.size() == inst.net.tracks.size());
  CHECK(back.trains.size() == inst.net.trains.size());
  CHECK(back.turnarounds.size() == inst.net.turnarounds.size());
  CHECK(back.headways.size() == inst.net.headways.size());
  CHECK(back.opposite_pairs == inst.net.opposite_pairs);
  CHECK(back.trip_windows == inst.net.trip_windows);
  CHECK(back.dwell_windows == inst.net.dwell_windows);
  CHECK(back.total_travel_windows == inst.net.total_travel_windows);
  CHECK(back.horizon_m == inst.net.horizon_m);
  CHECK(validate(back).empty());

  // The timetable rides on the identical event numbering.
  std::ostringstream ts;
  save_timetable(inst.net, inst.seed, ts);
  std::istringstream tin(ts.str());
  Timetable seed_back = load_timetable(tin, back, Provenance::Seed);
  for (int i = 0; i < back.n_events; ++i) CHECK(seed_back[i] == inst.seed[i]);
}

TEST_CASE("physics save/load round-trips") {
  TrainPhysics ph;
  ph.id = "m8";
  ph.mass_kg = 123456.0;
  ph.davis_a2 = 3.5e-5;
  ph.max_accel = 0.9;
  std::ostringstream os;
  save_physics(ph, os);
  std::istringstream in(os.str());
  TrainPhysics back = load_physics(in);
  CHECK(back.id == "m8");
  CHECK(back.mass_kg == doctest::Approx(123456.0));
  CHECK(back.davis_a2 == doctest::Approx(3.5e-5));
  CHECK(back.max_accel == doctest::Approx(0.9));
  CHECK(back.eta_kin_to_regen == doctest::Approx(ph.eta_kin_to_regen));

  std::istringstream bad("mass_kg heavy\n");
  CHECK_THROWS_AS(load_physics(bad), InputError);
  std::istringstream unknown("volume 3\n");
  CHECK_THROWS_AS(load_physics(unknown), InputError);
}

TEST_CASE("speed limits save/load round-trips with grades") {
  Network net = parse(kSmallNetwork);
  std::map<int, std::vector<SegmentSpeedLimit>> limits;
  limits[0] = {{0, 0.0, 400.0, 60.0, 0.3}, {0, 400.0, 1000.0, 80.0, -0.2}};
  limits[1] = {{1, 0.0, 1000.0, 75.0, 0.0}};
  limits[2] = {{2, 0.0, 400.0, 60.0, 0.0}};
  std::ostringstream os;
  save_limits(net, limits, os);
  std::istringstream in(os.str());
  auto back = load_limits(in, net);
  REQUIRE(back.size() == 3);
  REQUIRE(back[0].size() == 2);
  CHECK(back[0][1].start_m == doctest::Approx(400.0));
  CHECK(back[0][1].limit_kmh == doctest::Approx(80.0));
  CHECK(back[0][0].grade_deg == doctest::Approx(0.3));
  CHECK(back[0][1].grade_deg == doctest::Approx(-0.2));

  std::istringstream bad("A1-B1 0 400\n");
  CHECK_THROWS_AS(load_limits(bad, net), InputError);
}

TEST_CASE("timetable loader rejects duplicates and gaps") {
  Network net = parse(kSmallNetwork);
  std::string base =
      "up A1 0 40\nup B1 130 170\ndown B2 250 290\ndown A2 380 420\n";
  std::istringstream ok(base);
  Timetable tt = load_timetable(ok, net, Provenance::Seed);
  CHECK(tt.at(net, 1, 1, EventKind::Departure) == 420);

  std::istringstream dup(base + "up A1 1 2\n");
  CHECK_THROWS_AS(load_timetable(dup, net, Provenance::Seed), InputError);

  std::istringstream missing("up A1 0 40\n");
  try {
    load_timetable(missing, net, Provenance::Seed);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("missing timetable entry") !=
          std::string::npos);
  }

  std::istringstream wrong(base + "up B2 1 2\n");
  CHECK_THROWS_AS(load_timetable(wrong, net, Provenance::Seed), InputError);
}

TEST_CASE("file wrappers prefix the path on errors") {
  CHECK_THROWS_AS(load_network_file("/nonexistent/net.txt"), InputError);
  try {
    load_network_file("/nonexistent/net.txt");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/net.txt") !=
          std::string::npos);
  }
}
