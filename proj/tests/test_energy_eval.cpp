#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "metro/energy_eval.hpp"

using namespace metro;

namespace {

// Train 0 runs A1 -> B1 on line 1, train 1 runs B2 -> A2 on line 2; the
// sync pair plays train 0 accelerating out of A1 against train 1 braking
// into the opposite platform A2.
struct EvalFixture {
  Network net;
  TrainPhysics physics;
  std::map<int, std::vector<SegmentSpeedLimit>> limits;
  Seconds trip_time;
  SyncPair pair{0, 3, 0, 1, PairDirection::Right};

  EvalFixture() {
    net.platforms = {{"A1", "SA", "1"}, {"B1", "SB", "1"},
                     {"B2", "SB", "2"}, {"A2", "SA", "2"}};
    net.tracks = {{0, 1, 1200.0, false, "A1-B1"},
                  {2, 3, 1200.0, false, "B2-A2"}};
    net.trains = {{"t0", {0, 1}, {0}, "ph"}, {"t1", {2, 3}, {1}, "ph"}};
    net.opposite_pairs = {{0, 3}};
    net.horizon_m = 4000;
    net.finalize();
    for (int t = 0; t < 2; ++t)
      limits[t] = {{t, 0.0, 1200.0, 80.0, 0.0}};
    trip_time =
        (Seconds)std::ceil(minimal_trip_time(1200.0, limits[0], physics)) + 10;
  }

  // Train 0 departs A1 at 0; train 1 arrives at A2 at `brk_arrival`.
  Timetable timetable(Seconds brk_arrival) const {
    Timetable tt(net, Provenance::Final);
    tt.at(net, 0, 0, EventKind::Arrival) = 0;
    tt.at(net, 0, 0, EventKind::Departure) = 0;
    tt.at(net, 0, 1, EventKind::Arrival) = trip_time;
    tt.at(net, 0, 1, EventKind::Departure) = trip_time + 30;
    tt.at(net, 1, 0, EventKind::Arrival) = brk_arrival - trip_time - 30;
    tt.at(net, 1, 0, EventKind::Departure) = brk_arrival - trip_time;
    tt.at(net, 1, 1, EventKind::Arrival) = brk_arrival;
    tt.at(net, 1, 1, EventKind::Departure) = brk_arrival + 30;
    return tt;
  }

  double acc_consumption() const {
    auto prof = simulate_profile(1200.0, limits.at(0), physics,
                                 (double)trip_time);
    return energy_of_profile(prof, physics).first;
  }

  double effective(Seconds brk_arrival) const {
    return effective_energy_of_pair(net, pair, timetable(brk_arrival), limits,
                                    physics);
  }
};

}  // namespace

TEST_CASE("no temporal overlap leaves the full consumption") {
  EvalFixture fx;
  // The partner brakes long before and long after the subject accelerates.
  double full = fx.acc_consumption();
  CHECK(fx.effective(2000) == doctest::Approx(full).epsilon(1e-9));
  CHECK(fx.effective(-500) == doctest::Approx(full).epsilon(1e-9));
}

TEST_CASE("overlapping regeneration cuts the substation draw") {
  EvalFixture fx;
  double full = fx.acc_consumption();
  // Brake into the station while the subject pulls out: the regen burst
  // sits in the first seconds after `trip_time`-aligned arrival times.
  double best = full;
  for (Seconds arr = 0; arr <= 40; arr += 2)
    best = std::min(best, fx.effective(arr));
  CHECK(best < 0.9 * full);

  // The credit can never exceed the delivered regeneration.
  auto brk_prof = simulate_profile(1200.0, fx.limits.at(1), fx.physics,
                                   (double)fx.trip_time);
  double regen = energy_of_profile(brk_prof, fx.physics).second;
  CHECK(best >= full - (1.0 - fx.physics.transmission_loss) * regen - 1.0);
}

TEST_CASE("effective energy is bounded by the full consumption") {
  EvalFixture fx;
  double full = fx.acc_consumption();
  for (Seconds arr : {-100, 0, 5, 10, 20, 60, 200}) {
    double e = fx.effective(arr);
    CHECK(e > 0.0);
    CHECK(e <= full * (1.0 + 1e-9));
  }
}

TEST_CASE("alignment beats misalignment and compare() reports the gap") {
  EvalFixture fx;
  Seconds best_arr = 0;
  double best = fx.acc_consumption();
  for (Seconds arr = 0; arr <= 40; arr += 2) {
    double e = fx.effective(arr);
    if (e < best) {
      best = e;
      best_arr = arr;
    }
  }
  Timetable before = fx.timetable(1500);  // no overlap
  Timetable after = fx.timetable(best_arr);
  auto rep = compare(fx.net, before, after, {fx.pair}, fx.limits, fx.physics);
  REQUIRE(rep.per_pair_before.size() == 1);
  REQUIRE(rep.per_pair_after.size() == 1);
  CHECK(rep.baseline_total == doctest::Approx(fx.acc_consumption()));
  CHECK(rep.total_effective == doctest::Approx(best));
  CHECK(rep.reduction_fraction ==
        doctest::Approx(1.0 - best / rep.baseline_total));
  CHECK(rep.reduction_fraction > 0.1);
}

TEST_CASE("total consumed energy sums every trip") {
  EvalFixture fx;
  auto tt = fx.timetable(300);
  double total = total_consumed_energy(fx.net, tt, fx.limits, fx.physics);
  // Both trips run at the same trip time over identical tracks.
  CHECK(total == doctest::Approx(2.0 * fx.acc_consumption()).epsilon(1e-9));
}

TEST_CASE("turnaround trips resolve through the crossover") {
  // Train 0 ends at B1 and is relabelled as train 1 starting at B2; the
  // pair references the trip across the crossover on both sides.
  Network net;
  net.platforms = {{"A1", "SA", "1"}, {"B1", "SB", "1"},
                   {"B2", "SB", "2"}, {"A2", "SA", "2"}};
  net.tracks = {{0, 1, 1200.0, false, "A1-B1"},
                {2, 3, 1200.0, false, "B2-A2"},
                {1, 2, 500.0, true, "B1-B2"}};
  net.trains = {{"t0", {0, 1}, {0}, "ph"}, {"t1", {2, 3}, {1}, "ph"}};
  net.turnarounds = {{2, 0, 1, {40, 120}}};
  net.opposite_pairs = {{1, 2}};
  net.horizon_m = 4000;
  net.finalize();
  TrainPhysics physics;
  std::map<int, std::vector<SegmentSpeedLimit>> limits;
  limits[0] = {{0, 0.0, 1200.0, 80.0, 0.0}};
  limits[1] = {{1, 0.0, 1200.0, 80.0, 0.0}};
  limits[2] = {{2, 0.0, 500.0, 60.0, 0.0}};
  Seconds line_tt =
      (Seconds)std::ceil(minimal_trip_time(1200.0, limits[0], physics)) + 10;
  Seconds cross_tt =
      (Seconds)std::ceil(minimal_trip_time(500.0, limits[2], physics)) + 5;

  Timetable tt(net, Provenance::Final);
  tt.at(net, 0, 0, EventKind::Arrival) = 0;
  tt.at(net, 0, 0, EventKind::Departure) = 0;
  tt.at(net, 0, 1, EventKind::Arrival) = line_tt;
  tt.at(net, 0, 1, EventKind::Departure) = line_tt + 30;
  tt.at(net, 1, 0, EventKind::Arrival) = line_tt + 30 + cross_tt;
  tt.at(net, 1, 0, EventKind::Departure) = line_tt + 60 + cross_tt;
  tt.at(net, 1, 1, EventKind::Arrival) = 2 * line_tt + 60 + cross_tt;
  tt.at(net, 1, 1, EventKind::Departure) = 2 * line_tt + 90 + cross_tt;

  // Right pair: train 0 "departs" B1 over the crossover, train 1 "arrives"
  // at B2 from the crossover. Both lookups fall through to the turnaround.
  SyncPair pair{1, 2, 0, 1, PairDirection::Right};
  double e = effective_energy_of_pair(net, pair, tt, limits, physics);
  auto cross_prof = simulate_profile(500.0, limits[2], physics,
                                     (double)cross_tt);
  double cross_cons = energy_of_profile(cross_prof, physics).first;
  CHECK(e > 0.0);
  // The accelerating and braking trip are the same physical crossover run,
  // so the regen credit applies to its own consumption.
  CHECK(e <= cross_cons * (1.0 + 1e-9));
}
