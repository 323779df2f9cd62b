#include "metro/sync_pairing.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace metro {

PowerRectangle rectangle_of(
    const std::vector<std::pair<double, double>>& graph_samples) {
  if (graph_samples.empty()) throw InputError("empty power graph");
  PowerRectangle r;
  for (auto [t, p] : graph_samples) r.peak = std::max(r.peak, p);
  if (r.peak <= 0) throw InputError("power graph has no positive sample");

  double thr = r.peak / std::exp(1.0);
  std::size_t first = 0, last = 0;
  bool found = false;
  for (std::size_t i = 0; i < graph_samples.size(); ++i) {
    if (graph_samples[i].second >= thr) {
      if (!found) first = i;
      last = i;
      found = true;
    }
  }

  auto cross = [&](std::size_t below, std::size_t above) {
    auto [t0, p0] = graph_samples[below];
    auto [t1, p1] = graph_samples[above];
    double f = (thr - p0) / (p1 - p0);
    return t0 + f * (t1 - t0);
  };
  r.t_start = first > 0 ? cross(first - 1, first) : graph_samples[first].first;
  r.t_end = last + 1 < graph_samples.size() ? cross(last + 1, last)
                                            : graph_samples[last].first;
  r.midpoint = 0.5 * (r.t_start + r.t_end);
  return r;
}

namespace {

struct ProfileCache {
  const std::map<int, std::vector<SegmentSpeedLimit>>& limits;
  const Network& net;
  const TrainPhysics& physics;
  const SimOptions& opts;
  std::map<std::pair<int, Seconds>, SpeedProfile> cache;

  const SpeedProfile& get(int track, Seconds trip_time) {
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
};

}  // namespace

OffsetTable compute_offsets(
    const Network& net, const Timetable& emt,
    const std::map<int, std::vector<SegmentSpeedLimit>>& limits_by_track,
    const TrainPhysics& physics, const SimOptions& opts) {
  ProfileCache profiles{limits_by_track, net, physics, opts, {}};
  OffsetTable out;

  auto record = [&](int track, Seconds trip_time, int dep_train, int dep_plat,
                    int arr_train, int arr_plat) {
    const SpeedProfile& prof = profiles.get(track, trip_time);
    PowerGraph g = power_graph(prof);
    PowerRectangle cons = rectangle_of(g.consumption_samples);
    PowerRectangle regen = rectangle_of(g.regeneration_samples);
    out.delta[{dep_train, dep_plat}] = cons.midpoint;
    out.nabla[{arr_train, arr_plat}] = (double)trip_time - regen.midpoint;
  };

  for (int tr = 0; tr < (int)net.trains.size(); ++tr) {
    const Train& train = net.trains[tr];
    for (std::size_t k = 0; k + 1 < train.path_platforms.size(); ++k) {
      Seconds tt = emt.at(net, tr, (int)k + 1, EventKind::Arrival) -
                   emt.at(net, tr, (int)k, EventKind::Departure);
      record(train.path_tracks[k], tt, tr, train.path_platforms[k], tr,
             train.path_platforms[k + 1]);
    }
  }
  for (const auto& ta : net.turnarounds) {
    const Train& from = net.trains[ta.train_from];
    const Train& to = net.trains[ta.train_to];
    int dep_pos = (int)from.path_platforms.size() - 1;
    Seconds tt = emt.at(net, ta.train_to, 0, EventKind::Arrival) -
                 emt.at(net, ta.train_from, dep_pos, EventKind::Departure);
    record(ta.crossover, tt, ta.train_from, from.path_platforms.back(),
           ta.train_to, to.path_platforms.front());
  }
  return out;
}

std::vector<SyncPair> closest_partners(const Network& net, const Timetable& emt,
                                       const OffsetTable& offsets, Seconds r) {
  if (r <= 0) throw InputError("pairing radius must be positive");

  std::vector<std::vector<int>> trains_at(net.platforms.size());
  for (int tr = 0; tr < (int)net.trains.size(); ++tr)
    for (int p : net.trains[tr].path_platforms) trains_at[p].push_back(tr);

  // Dwell midpoints doubled so half-integers compare exactly.
  auto mid2 = [&](int train, int plat) {
    int pos = net.path_position(train, plat);
    return emt.at(net, train, pos, EventKind::Arrival) +
           emt.at(net, train, pos, EventKind::Departure);
  };
  auto has = [&](const std::map<std::pair<int, int>, double>& m, int train,
                 int plat) { return m.count({train, plat}) > 0; };

  std::vector<SyncPair> out;
  for (auto [i, j] : net.opposite_pairs) {
    for (int t : trains_at[i]) {
      Seconds m_t = mid2(t, i);
      bool can_right = has(offsets.delta, t, i);
      bool can_left = has(offsets.nabla, t, i);

      int right = -1, left = -1;
      Seconds right_diff = 0, left_diff = 0;
      for (int c : trains_at[j]) {
        Seconds diff = mid2(c, j) - m_t;
        if (can_right && diff >= 0 && diff <= 2 * r &&
            has(offsets.nabla, c, j) && (right < 0 || diff < right_diff)) {
          right = c;
          right_diff = diff;
        }
        if (can_left && -diff > 0 && -diff <= 2 * r &&
            has(offsets.delta, c, j) && (left < 0 || -diff < left_diff)) {
          left = c;
          left_diff = -diff;
        }
      }
      if (right < 0 && left < 0) continue;
      SyncPair p;
      p.platform_i = i;
      p.platform_j = j;
      p.train_t = t;
      if (right >= 0 && (left < 0 || right_diff <= left_diff)) {
        p.partner = right;
        p.direction = PairDirection::Right;
      } else {
        p.partner = left;
        p.direction = PairDirection::Left;
      }
      out.push_back(p);
    }
  }
  return out;
}

void export_pairs_csv(const Network& net, const std::vector<SyncPair>& pairs,
                      const OffsetTable& offsets, std::ostream& os) {
  os << "platform_i,platform_j,train,partner,direction,nabla,delta\n";
  for (const auto& p : pairs) {
    bool right = p.direction == PairDirection::Right;
    double nab = right ? offsets.nabla.at({p.partner, p.platform_j})
                       : offsets.nabla.at({p.train_t, p.platform_i});
    double del = right ? offsets.delta.at({p.train_t, p.platform_i})
                       : offsets.delta.at({p.partner, p.platform_j});
    os << net.platforms[p.platform_i].id << ','
       << net.platforms[p.platform_j].id << ',' << net.trains[p.train_t].id
       << ',' << net.trains[p.partner].id << ',' << (right ? "right" : "left")
       << ',' << nab << ',' << del << '\n';
  }
}

}  // namespace metro
