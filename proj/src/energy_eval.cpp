#include "metro/energy_eval.hpp"

#include <algorithm>
#include <cmath>

namespace metro {

namespace {

struct TripRef {
  int track = -1;
  Seconds dep_time = 0;
  Seconds trip_time = 0;
};

TripRef trip_after_departure(const Network& net, const Timetable& tt,
                             int train, int plat) {
  int pos = net.path_position(train, plat);
  if (pos < 0) throw InputError("platform not on the train's path");
  const Train& tr = net.trains[train];
  TripRef ref;
  ref.dep_time = tt.at(net, train, pos, EventKind::Departure);
  if (pos + 1 < (int)tr.path_platforms.size()) {
    ref.track = tr.path_tracks[pos];
    ref.trip_time =
        tt.at(net, train, pos + 1, EventKind::Arrival) - ref.dep_time;
    return ref;
  }
  for (const auto& ta : net.turnarounds) {
    if (ta.train_from == train) {
      ref.track = ta.crossover;
      ref.trip_time =
          tt.at(net, ta.train_to, 0, EventKind::Arrival) - ref.dep_time;
      return ref;
    }
  }
  throw InputError("train has no trip after " + net.platforms[plat].id);
}

TripRef trip_before_arrival(const Network& net, const Timetable& tt,
                            int train, int plat) {
  int pos = net.path_position(train, plat);
  if (pos < 0) throw InputError("platform not on the train's path");
  const Train& tr = net.trains[train];
  TripRef ref;
  if (pos > 0) {
    ref.track = tr.path_tracks[pos - 1];
    ref.dep_time = tt.at(net, train, pos - 1, EventKind::Departure);
    ref.trip_time = tt.at(net, train, pos, EventKind::Arrival) - ref.dep_time;
    return ref;
  }
  for (const auto& ta : net.turnarounds) {
    if (ta.train_to == train) {
      int last = (int)net.trains[ta.train_from].path_platforms.size() - 1;
      ref.track = ta.crossover;
      ref.dep_time = tt.at(net, ta.train_from, last, EventKind::Departure);
      ref.trip_time = tt.at(net, train, 0, EventKind::Arrival) - ref.dep_time;
      return ref;
    }
  }
  throw InputError("train has no trip before " + net.platforms[plat].id);
}

// Piecewise-linear nonnegative pulse in absolute timetable time.
struct Pulse {
  std::vector<double> t, p;

  double support_lo() const {
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p[i] > 0) return t[i > 0 ? i - 1 : 0];
    return 0;
  }
  double support_hi() const {
    for (std::size_t i = p.size(); i-- > 0;)
      if (p[i] > 0) return t[i + 1 < t.size() ? i + 1 : i];
    return 0;
  }
  bool empty() const { return t.empty(); }

  double value(double at) const {
    if (t.empty() || at <= t.front() || at >= t.back()) {
      if (!t.empty() && at == t.front()) return p.front();
      if (!t.empty() && at == t.back()) return p.back();
      return 0;
    }
    auto it = std::upper_bound(t.begin(), t.end(), at);
    std::size_t i = it - t.begin();
    double f = (at - t[i - 1]) / (t[i] - t[i - 1]);
    return p[i - 1] + f * (p[i] - p[i - 1]);
  }
  double integral() const {
    double s = 0;
    for (std::size_t i = 1; i < t.size(); ++i)
      s += 0.5 * (t[i] - t[i - 1]) * (p[i] + p[i - 1]);
    return s;
  }
  double integral(double a, double b) const {
    if (b <= a) return 0;
    double s = 0;
    for (std::size_t i = 1; i < t.size(); ++i) {
      double lo = std::max(t[i - 1], a), hi = std::min(t[i], b);
      if (hi <= lo) continue;
      s += 0.5 * (hi - lo) * (value(lo) + value(hi));
    }
    return s;
  }
};

Pulse pulse_of(const SpeedProfile& prof, double t0, bool consumption) {
  Pulse pl;
  for (const auto& s : prof.samples) {
    double p = consumption ? std::max(s.power, 0.0) : std::max(-s.power, 0.0);
    pl.t.push_back(t0 + s.t);
    pl.p.push_back(p);
  }
  return pl;
}

const SpeedProfile& cached_profile(
    const Network& net, int track, Seconds trip_time,
    const std::map<int, std::vector<SegmentSpeedLimit>>& limits,
    const TrainPhysics& physics, const SimOptions& opts,
    std::map<std::pair<int, Seconds>, SpeedProfile>& cache) {
  auto key = std::make_pair(track, trip_time);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto lit = limits.find(track);
  if (lit == limits.end())
    throw InputError("no speed limits for track " + net.tracks[track].key);
  auto prof = simulate_profile(net.tracks[track].length_m, lit->second,
                               physics, (double)trip_time, opts);
  return cache.emplace(key, std::move(prof)).first->second;
}

double pair_energy(const Network& net, const SyncPair& pair,
                   const Timetable& tt,
                   const std::map<int, std::vector<SegmentSpeedLimit>>& limits,
                   const TrainPhysics& physics, const SimOptions& opts,
                   std::map<std::pair<int, Seconds>, SpeedProfile>& cache) {
  bool right = pair.direction == PairDirection::Right;
  int acc_train = right ? pair.train_t : pair.partner;
  int acc_plat = right ? pair.platform_i : pair.platform_j;
  int brk_train = right ? pair.partner : pair.train_t;
  int brk_plat = right ? pair.platform_j : pair.platform_i;

  TripRef acc = trip_after_departure(net, tt, acc_train, acc_plat);
  TripRef brk = trip_before_arrival(net, tt, brk_train, brk_plat);
  const SpeedProfile& acc_prof = cached_profile(net, acc.track, acc.trip_time,
                                                limits, physics, opts, cache);
  const SpeedProfile& brk_prof = cached_profile(net, brk.track, brk.trip_time,
                                                limits, physics, opts, cache);
  Pulse cons = pulse_of(acc_prof, (double)acc.dep_time, true);
  Pulse regen = pulse_of(brk_prof, (double)brk.dep_time, false);

  double total_cons = cons.integral();
  double t1 = std::max(cons.support_lo(), regen.support_lo());
  double t2 = std::min(cons.support_hi(), regen.support_hi());
  if (t2 <= t1) return total_cons;

  double delivered_eta = 1.0 - physics.transmission_loss;
  double inside = 0;
  std::vector<double> grid;
  for (double t : cons.t)
    if (t >= t1 && t <= t2) grid.push_back(t);
  for (double t : regen.t)
    if (t >= t1 && t <= t2) grid.push_back(t);
  grid.push_back(t1);
  grid.push_back(t2);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  auto net_draw = [&](double t) {
    return std::max(cons.value(t) - delivered_eta * regen.value(t), 0.0);
  };
  for (std::size_t i = 1; i < grid.size(); ++i)
    inside += 0.5 * (grid[i] - grid[i - 1]) *
              (net_draw(grid[i - 1]) + net_draw(grid[i]));

  double outside = total_cons - cons.integral(t1, t2);
  return inside + outside;
}

}  // namespace

double effective_energy_of_pair(
    const Network& net, const SyncPair& pair, const Timetable& tt,
    const std::map<int, std::vector<SegmentSpeedLimit>>& limits_by_track,
    const TrainPhysics& physics, const SimOptions& opts) {
  std::map<std::pair<int, Seconds>, SpeedProfile> cache;
  return pair_energy(net, pair, tt, limits_by_track, physics, opts, cache);
}

EffectiveEnergyReport compare(
    const Network& net, const Timetable& before, const Timetable& after,
    const std::vector<SyncPair>& pairs,
    const std::map<int, std::vector<SegmentSpeedLimit>>& limits_by_track,
    const TrainPhysics& physics, const SimOptions& opts) {
  std::map<std::pair<int, Seconds>, SpeedProfile> cache;
  EffectiveEnergyReport rep;
  for (const auto& p : pairs) {
    double eb =
        pair_energy(net, p, before, limits_by_track, physics, opts, cache);
    double ea =
        pair_energy(net, p, after, limits_by_track, physics, opts, cache);
    rep.per_pair_before.push_back(eb);
    rep.per_pair_after.push_back(ea);
    rep.baseline_total += eb;
    rep.total_effective += ea;
  }
  rep.reduction_fraction =
      rep.baseline_total > 0 ? 1.0 - rep.total_effective / rep.baseline_total
                             : 0.0;
  return rep;
}

double total_consumed_energy(
    const Network& net, const Timetable& tt,
    const std::map<int, std::vector<SegmentSpeedLimit>>& limits_by_track,
    const TrainPhysics& physics, const SimOptions& opts) {
  std::map<std::pair<int, Seconds>, SpeedProfile> cache;
  double total = 0;
  auto add = [&](int track, Seconds trip_time) {
    const SpeedProfile& prof =
        cached_profile(net, track, trip_time, limits_by_track, physics, opts,
                       cache);
    total += energy_of_profile(prof, physics).first;
  };
  for (int tr = 0; tr < (int)net.trains.size(); ++tr) {
    const Train& train = net.trains[tr];
    for (std::size_t k = 0; k + 1 < train.path_platforms.size(); ++k)
      add(train.path_tracks[k],
          tt.at(net, tr, (int)k + 1, EventKind::Arrival) -
              tt.at(net, tr, (int)k, EventKind::Departure));
  }
  for (const auto& ta : net.turnarounds) {
    int last = (int)net.trains[ta.train_from].path_platforms.size() - 1;
    add(ta.crossover, tt.at(net, ta.train_to, 0, EventKind::Arrival) -
                          tt.at(net, ta.train_from, last,
                                EventKind::Departure));
  }
  return total;
}

}  // namespace metro
