#include "metro/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <random>

namespace metro {

namespace {

struct SegDef {
  double start, end, limit_kmh;
};
struct TrackDef {
  const char* from;
  const char* to;
  std::vector<SegDef> segs;
};

// Track geometry of the Shanghai line-8 style sample: two full lines plus
// the two crossovers the services use to turn around.
const std::vector<TrackDef>& shanghai_line2() {
  static const std::vector<TrackDef> t = {
      {"SFM2", "LHS2", {{0, 140.3, 60}, {140.3, 373.0, 70}, {373.0, 742.3, 75}, {742.3, 1225.1, 70}, {1225.1, 1358.3, 60}}},
      {"LHS2", "JYS2", {{0, 186.7, 60}, {186.7, 853.8, 75}, {853.8, 1064.4, 70}, {1064.4, 1200.8, 60}}},
      {"JYS2", "PJT2", {{0, 140.0, 60}, {140.0, 371.1, 70}, {371.1, 1081.9, 75}, {1081.9, 1249.8, 70}, {1249.8, 1386.2, 60}}},
      {"PJT2", "LHR2", {{0, 143.4, 60}, {143.4, 355.8, 70}, {355.8, 829.3, 75}, {829.3, 1039.2, 70}, {1039.2, 1858.3, 75}, {1858.3, 2488.9, 70}, {2488.9, 2622.1, 60}}},
      {"LHR2", "LZV2", {{0, 139.8, 60}, {139.8, 2457.3, 70}, {2457.3, 2594.1, 60}}},
      {"LZV2", "JYR2", {{0, 143.3, 60}, {143.3, 1007.8, 65}, {1007.8, 2338.1, 60}}},
      {"JYR2", "YSS2", {{0, 143.4, 60}, {143.4, 1388.9, 70}, {1388.9, 1522.3, 60}}},
      {"YSS2", "CSR2", {{0, 430.4, 60}, {430.4, 1014.8, 70}, {1014.8, 1151.6, 54}}},
      {"CSR2", "YHR2", {{0, 910.0, 60}}},
      {"YHR2", "ZJD2", {{0, 140.0, 60}, {140.0, 601.3, 70}, {601.3, 738.0, 60}}},
      {"ZJD2", "SXZ2", {{0, 353.8, 60}, {353.8, 1393.7, 70}, {1393.7, 1910.0, 65}, {1910.0, 2043.3, 60}}},
      {"SXZ2", "LJB2", {{0, 160.1, 60}, {160.1, 1027.5, 70}, {1027.5, 1164.2, 60}}},
      {"LJB2", "LXM2", {{0, 140.1, 60}, {140.1, 693.3, 70}, {693.3, 830.2, 60}}},
      {"LXM2", "GRW2", {{0, 140.0, 60}, {140.0, 855.5, 70}, {855.5, 1005.2, 60}}},
      {"GRW2", "PES2", {{0, 173.1, 60}, {173.1, 636.4, 70}, {636.4, 769.5, 60}}},
  };
  return t;
}

const std::vector<TrackDef>& shanghai_line1() {
  static const std::vector<TrackDef> t = {
      {"GRW1", "LXM1", {{0, 153.3, 60}, {153.3, 870.1, 70}, {870.1, 1006.9, 60}}},
      {"LXM1", "LJB1", {{0, 140.0, 60}, {140.0, 689.3, 70}, {689.3, 826.1, 60}}},
      {"LJB1", "SXZ1", {{0, 140.1, 60}, {140.1, 1027.4, 70}, {1027.4, 1167.2, 60}}},
      {"SXZ1", "ZJD1", {{0, 140.1, 60}, {140.1, 647.2, 65}, {647.2, 1699.3, 70}, {1699.3, 2039.3, 60}}},
      {"ZJD1", "YHR1", {{0, 140.1, 60}, {140.1, 605.9, 70}, {605.9, 742.5, 60}}},
      {"YHR1", "CSR1", {{0, 143.4, 60}, {143.4, 773.7, 70}, {773.7, 910.3, 60}}},
      {"CSR1", "YSS1", {{0, 143.5, 60}, {143.5, 1004.6, 70}, {1004.6, 1138.2, 60}}},
      {"YSS1", "JYR1", {{0, 140.2, 60}, {140.2, 664.7, 70}, {664.7, 987.7, 75}, {987.7, 1389.2, 70}, {1389.2, 1525.9, 60}}},
      {"JYR1", "LZV1", {{0, 1366.7, 60}, {1366.7, 2220.6, 65}, {2220.6, 2357.3, 60}}},
      {"LZV1", "LHR1", {{0, 140.1, 60}, {140.1, 1901.1, 70}, {1901.1, 2199.1, 75}, {2199.1, 2456.3, 70}, {2456.3, 2592.8, 60}}},
      {"LHR1", "PJT1", {{0, 140.1, 60}, {140.1, 766.2, 70}, {766.2, 1623.4, 75}, {1623.4, 1805.9, 70}, {1805.9, 2374.4, 75}, {2374.4, 2487.8, 70}, {2487.8, 2624.3, 60}}},
      {"PJT1", "JYS1", {{0, 143.3, 60}, {143.3, 374.6, 70}, {374.6, 1089.8, 75}, {1089.8, 1250.2, 70}, {1250.2, 1386.7, 60}}},
      {"JYS1", "LHS1", {{0, 140.0, 60}, {140.0, 829.2, 75}, {829.2, 1202.3, 60}}},
  };
  return t;
}

struct Builder {
  const GeneratorConfig& cfg;
  GeneratedInstance inst;
  std::mt19937 rng;
  std::map<int, Seconds> tmin_by_track;

  explicit Builder(const GeneratorConfig& c) : cfg(c), rng(c.rng_seed) {}

  Seconds jitter(Seconds radius) {
    return std::uniform_int_distribution<Seconds>(-radius, radius)(rng);
  }

  int add_platform(const std::string& id, const std::string& station,
                   const std::string& line) {
    inst.net.platforms.push_back({id, station, line});
    return (int)inst.net.platforms.size() - 1;
  }

  int add_track(int from, int to, const std::vector<SegDef>& segs,
                bool crossover) {
    Track t;
    t.from = from;
    t.to = to;
    t.length_m = segs.back().end;
    t.is_crossover = crossover;
    t.key = inst.net.platforms[from].id + "-" + inst.net.platforms[to].id;
    int idx = (int)inst.net.tracks.size();
    inst.net.tracks.push_back(t);
    for (const auto& s : segs)
      inst.limits[idx].push_back({idx, s.start, s.end, s.limit_kmh, 0.0});
    return idx;
  }

  Seconds tmin(int track) {
    auto it = tmin_by_track.find(track);
    if (it != tmin_by_track.end()) return it->second;
    double t = minimal_trip_time(inst.net.tracks[track].length_m,
                                 inst.limits.at(track), inst.physics, cfg.sim);
    Seconds v = (Seconds)std::ceil(t);
    tmin_by_track[track] = v;
    return v;
  }
};

}  // namespace

GeneratedInstance generate_instance(const GeneratorConfig& cfg) {
  if (cfg.trains < 1 || cfg.stations < 2 || cfg.headway < 1)
    throw InputError("generator needs trains >= 1, stations >= 2, headway >= 1");

  Builder b(cfg);
  Network& net = b.inst.net;

  // Topology: leg A platform/track lists, leg B, and the A->B crossover.
  std::vector<int> leg_a, leg_b, tracks_a, tracks_b;
  int cross_ab = -1;
  if (cfg.shanghai) {
    std::map<std::string, int> idx;
    auto platform = [&](const char* code) {
      auto it = idx.find(code);
      if (it != idx.end()) return it->second;
      std::string s(code);
      std::string station = s.substr(0, s.size() - 1);
      std::string line = s.substr(s.size() - 1);
      int p = b.add_platform(s, station, line);
      idx[s] = p;
      return p;
    };
    for (const auto& td : shanghai_line2()) {
      int from = platform(td.from), to = platform(td.to);
      if (leg_a.empty()) leg_a.push_back(from);
      leg_a.push_back(to);
      tracks_a.push_back(b.add_track(from, to, td.segs, false));
    }
    for (const auto& td : shanghai_line1()) {
      int from = platform(td.from), to = platform(td.to);
      if (leg_b.empty()) leg_b.push_back(from);
      leg_b.push_back(to);
      tracks_b.push_back(b.add_track(from, to, td.segs, false));
    }
    cross_ab = b.add_track(idx.at("PES2"), idx.at("GRW1"),
                           {{0, 761.5, 60}}, true);
    // Opposite same-station platforms that host trains on both legs.
    for (const auto& td : shanghai_line1()) {
      for (const char* code : {td.from, td.to}) {
        std::string two = std::string(code).substr(0, strlen(code) - 1) + "2";
        auto it = idx.find(two);
        if (it != idx.end()) {
          auto pair = std::make_pair(idx.at(code), it->second);
          if (std::find(net.opposite_pairs.begin(), net.opposite_pairs.end(),
                        pair) == net.opposite_pairs.end())
            net.opposite_pairs.push_back(pair);
        }
      }
    }
  } else {
    std::uniform_real_distribution<double> len(900.0, 1600.0);
    std::uniform_int_distribution<int> lim(0, 2);
    auto station = [&](int k) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "S%02d", k + 1);
      return std::string(buf);
    };
    std::vector<int> pa, pb;
    for (int k = 0; k < cfg.stations; ++k) {
      pa.push_back(b.add_platform(station(k) + "A", station(k), "1"));
      pb.push_back(b.add_platform(station(k) + "B", station(k), "2"));
    }
    for (int k = 0; k < cfg.stations; ++k) {
      leg_a.push_back(pa[k]);
      leg_b.push_back(pb[cfg.stations - 1 - k]);
      net.opposite_pairs.emplace_back(pa[k], pb[k]);
    }
    double limits[] = {60, 70, 75};
    for (int k = 0; k + 1 < cfg.stations; ++k) {
      double la = len(b.rng), lb = len(b.rng);
      tracks_a.push_back(b.add_track(
          leg_a[k], leg_a[k + 1], {{0, la, limits[lim(b.rng)]}}, false));
      tracks_b.push_back(b.add_track(
          leg_b[k], leg_b[k + 1], {{0, lb, limits[lim(b.rng)]}}, false));
    }
    cross_ab = b.add_track(leg_a.back(), leg_b.front(),
                           {{0, 500.0, 60}}, true);
  }

  // Trip windows centered a little above each track's minimal trip time.
  for (int tk = 0; tk < (int)net.tracks.size(); ++tk) {
    if (net.tracks[tk].is_crossover) continue;
    Seconds lo = b.tmin(tk) + 1;
    net.trip_windows[tk] = {lo, lo + 2 * cfg.trip_halfwidth};
  }
  for (int p = 0; p < (int)net.platforms.size(); ++p)
    net.dwell_windows[p] = {cfg.dwell_lo, cfg.dwell_hi};
  TimeWindow xwin{b.tmin(cross_ab) + 1, b.tmin(cross_ab) + 61};

  // Services: train on leg A, turnaround, train on leg B.
  int services = cfg.trains == 1 ? 1 : (cfg.trains + 1) / 2;
  bool with_b = cfg.trains > 1;
  Seconds dwell_mid = (cfg.dwell_lo + cfg.dwell_hi) / 2;
  Seconds dwell_rad = std::min<Seconds>(5, (cfg.dwell_hi - cfg.dwell_lo) / 2);

  std::vector<Seconds> times;  // flat seed times, filled per event
  auto add_train = [&](const std::string& id, const std::vector<int>& plats,
                       const std::vector<int>& tracks, Seconds first_arrival) {
    Train t;
    t.id = id;
    t.physics_id = "default";
    t.path_platforms = plats;
    t.path_tracks = tracks;
    int idx = (int)net.trains.size();
    net.trains.push_back(t);
    Seconds at = first_arrival;
    for (std::size_t k = 0; k < plats.size(); ++k) {
      times.push_back(at);  // arrival
      Seconds dw = dwell_mid + b.jitter(dwell_rad);
      times.push_back(at + dw);  // departure
      if (k < tracks.size()) {
        const TimeWindow& w = net.trip_windows.at(tracks[k]);
        Seconds trip = (w.lower + w.upper) / 2 +
                       b.jitter(std::min<Seconds>(3, cfg.trip_halfwidth));
        at = at + dw + trip;
      }
    }
    return idx;
  };

  for (int s = 0; s < services; ++s) {
    std::string base = "T" + std::to_string(s + 1);
    Seconds start = (Seconds)s * cfg.headway;
    int ta = add_train(base + "A", leg_a, tracks_a, start);
    if (!with_b) continue;
    Seconds dep_last = times.back();
    Seconds xtrip = (xwin.lower + xwin.upper) / 2 + b.jitter(10);
    int tb = add_train(base + "B", leg_b, tracks_b, dep_last + xtrip);
    net.turnarounds.push_back({cross_ab, ta, tb, xwin});
  }
  net.finalize();
  Timetable seed(net, Provenance::Seed);
  for (int i = 0; i < net.n_events; ++i) seed[i] = times[i];

  // Total-travel windows implied by the component windows, so they never cut
  // the feasible region but still appear as rows.
  for (int tr = 0; tr < (int)net.trains.size(); ++tr) {
    const Train& t = net.trains[tr];
    TimeWindow w{0, 0};
    for (int tk : t.path_tracks) {
      w.lower += net.trip_windows.at(tk).lower;
      w.upper += net.trip_windows.at(tk).upper;
    }
    for (std::size_t k = 1; k + 1 < t.path_platforms.size(); ++k) {
      w.lower += net.dwell_windows.at(t.path_platforms[k]).lower;
      w.upper += net.dwell_windows.at(t.path_platforms[k]).upper;
    }
    net.total_travel_windows[tr] = w;
  }

  // Headways between services `order` apart, per shared track, windows taken
  // around the seed separations.
  auto dep_at = [&](int train, int pos) {
    return seed.at(net, train, pos, EventKind::Departure);
  };
  auto arr_at = [&](int train, int pos) {
    return seed.at(net, train, pos, EventKind::Arrival);
  };
  auto window_around = [&](Seconds diff) {
    return TimeWindow{std::max<Seconds>(1, diff - cfg.headway_slack),
                      diff + cfg.headway_slack};
  };
  int max_order = cfg.second_order_headways ? 2 : 1;
  for (int order = 1; order <= max_order; ++order) {
    for (int s = 0; s + order < services; ++s) {
      for (int leg = 0; leg < (with_b ? 2 : 1); ++leg) {
        int a = 2 * s + leg * (with_b ? 1 : 0);
        int bb = a + 2 * order;
        if (!with_b) {
          a = s;
          bb = s + order;
        }
        const auto& tracks = leg == 0 ? tracks_a : tracks_b;
        for (std::size_t k = 0; k < tracks.size(); ++k) {
          HeadwayPair h;
          h.track = tracks[k];
          h.train_a = a;
          h.train_b = bb;
          h.departure_window =
              window_around(dep_at(bb, (int)k) - dep_at(a, (int)k));
          h.arrival_window =
              window_around(arr_at(bb, (int)k + 1) - arr_at(a, (int)k + 1));
          net.headways.push_back(h);
        }
      }
      if (with_b && order == 1) {
        int a = 2 * s, a2 = 2 * s + 1, c = 2 * (s + 1), c2 = 2 * (s + 1) + 1;
        int last = (int)leg_a.size() - 1;
        CrossoverHeadwayQuartet q;
        q.crossover = cross_ab;
        q.train_a = a;
        q.train_a2 = a2;
        q.train_b = c;
        q.train_b2 = c2;
        q.departure_window = window_around(dep_at(c, last) - dep_at(a, last));
        q.arrival_window = window_around(arr_at(c2, 0) - arr_at(a2, 0));
        net.crossover_headways.push_back(q);
      }
    }
  }

  // A sprinkling of interchange connections where the seed supports them.
  if (with_b && !net.opposite_pairs.empty()) {
    for (int s = 2; s + 1 < services; s += 5) {
      auto [pi, pj] = net.opposite_pairs[net.opposite_pairs.size() / 2];
      int from = -1, to = -1;
      if (net.path_position(2 * s, pi) >= 0) from = 2 * s;
      if (net.path_position(2 * s + 3, pj) >= 0) to = 2 * s + 3;
      if (from < 0 && net.path_position(2 * s + 1, pi) >= 0) from = 2 * s + 1;
      if (to < 0 && net.path_position(2 * s + 2, pj) >= 0) to = 2 * s + 2;
      if (from < 0 || to < 0) continue;
      Seconds diff =
          seed.at(net, to, net.path_position(to, pj), EventKind::Departure) -
          seed.at(net, from, net.path_position(from, pi), EventKind::Arrival);
      if (diff < 1) continue;
      ConnectionPair c;
      c.platform_i = pi;
      c.platform_j = pj;
      c.train_from = from;
      c.train_to = to;
      c.window = window_around(diff);
      net.connections.push_back(c);
    }
  }

  Seconds max_t = 0;
  for (int i = 0; i < net.n_events; ++i) max_t = std::max(max_t, seed[i]);
  net.horizon_m = max_t + 600;

  b.inst.physics.id = "default";
  b.inst.seed = std::move(seed);
  return std::move(b.inst);
}

}  // namespace metro
