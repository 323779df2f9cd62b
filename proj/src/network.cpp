#include "metro/network.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace metro {

const char* to_string(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::TripTime: return "trip";
    case ConstraintKind::CrossoverTrip: return "crossover-trip";
    case ConstraintKind::Dwell: return "dwell";
    case ConstraintKind::Connection: return "connection";
    case ConstraintKind::HeadwayDeparture: return "headway-departure";
    case ConstraintKind::HeadwayArrival: return "headway-arrival";
    case ConstraintKind::CrossoverHeadwayDeparture:
      return "crossover-headway-departure";
    case ConstraintKind::CrossoverHeadwayArrival:
      return "crossover-headway-arrival";
    case ConstraintKind::TotalTravel: return "total-travel";
  }
  return "?";
}

void Network::finalize() {
  platform_index.clear();
  track_index.clear();
  train_index.clear();
  for (int i = 0; i < (int)platforms.size(); ++i)
    platform_index[platforms[i].id] = i;
  for (int i = 0; i < (int)tracks.size(); ++i) track_index[tracks[i].key] = i;
  for (int i = 0; i < (int)trains.size(); ++i) train_index[trains[i].id] = i;
  event_base.assign(trains.size(), 0);
  int base = 0;
  for (int t = 0; t < (int)trains.size(); ++t) {
    event_base[t] = base;
    base += 2 * (int)trains[t].path_platforms.size();
  }
  n_events = base;
}

int Network::event_index(const EventRef& e) const {
  int pos = path_position(e.train, e.platform);
  if (pos < 0)
    throw InputError("event references platform outside the train path");
  return event_index(e.train, pos, e.kind);
}

EventRef Network::event_of_index(int idx) const {
  int t = (int)(std::upper_bound(event_base.begin(), event_base.end(), idx) -
                event_base.begin()) - 1;
  int off = idx - event_base[t];
  EventRef e;
  e.train = t;
  e.platform = trains[t].path_platforms[off / 2];
  e.kind = (off % 2) ? EventKind::Departure : EventKind::Arrival;
  return e;
}

int Network::path_position(int train, int platform) const {
  const auto& p = trains[train].path_platforms;
  auto it = std::find(p.begin(), p.end(), platform);
  return it == p.end() ? -1 : (int)(it - p.begin());
}

namespace {
const TimeWindow& window_or_throw(const std::map<int, TimeWindow>& m, int key,
                                  const char* what) {
  auto it = m.find(key);
  if (it == m.end())
    throw InputError(std::string("missing ") + what + " window");
  return it->second;
}
}  // namespace

const TimeWindow& Network::trip_window(int track) const {
  return window_or_throw(trip_windows, track, "trip");
}
const TimeWindow& Network::dwell_window(int platform) const {
  return window_or_throw(dwell_windows, platform, "dwell");
}
const TimeWindow& Network::total_travel_window(int train) const {
  return window_or_throw(total_travel_windows, train, "total-travel");
}

std::vector<Violation> validate(const Network& net) {
  std::vector<Violation> out;
  auto add = [&](std::string reason, std::string subject) {
    out.push_back({std::move(reason), std::move(subject)});
  };

  std::set<std::string> platform_ids;
  for (const auto& p : net.platforms) {
    if (!platform_ids.insert(p.id).second)
      add("duplicate platform id", p.id);
    if (p.station.empty() || p.line.empty())
      add("platform missing station or line", p.id);
  }

  std::set<std::pair<int, int>> track_pairs;
  for (const auto& tr : net.tracks) {
    if (tr.from < 0 || tr.from >= (int)net.platforms.size() || tr.to < 0 ||
        tr.to >= (int)net.platforms.size()) {
      add("track endpoint unknown", tr.key);
      continue;
    }
    if (tr.from == tr.to) add("track from == to", tr.key);
    if (!track_pairs.insert({tr.from, tr.to}).second)
      add("duplicate track", tr.key);
    if (tr.length_m <= 0) add("track length <= 0", tr.key);
    if (!tr.is_crossover &&
        net.platforms[tr.from].station == net.platforms[tr.to].station)
      add("track joins opposite platforms", tr.key);
  }

  for (const auto& t : net.trains) {
    if (t.path_platforms.size() < 2) {
      add("train path shorter than 2 platforms", t.id);
      continue;
    }
    if (t.path_tracks.size() + 1 != t.path_platforms.size())
      add("path length mismatch", t.id);
    std::set<int> seen;
    for (int p : t.path_platforms)
      if (!seen.insert(p).second) add("platform repeated in path", t.id);
    for (std::size_t k = 0;
         k + 1 < t.path_platforms.size() && k < t.path_tracks.size(); ++k) {
      const auto& tr = net.tracks[t.path_tracks[k]];
      if (tr.from != t.path_platforms[k] || tr.to != t.path_platforms[k + 1])
        add("path discontinuity", t.id);
      if (tr.is_crossover)
        add("train path uses a crossover as a track", t.id);
    }
  }

  auto check_window = [&](const TimeWindow& w, const std::string& subject) {
    if (!w.valid()) add("window lower>upper", subject);
  };
  for (const auto& [track, w] : net.trip_windows)
    check_window(w, "trip_window " + net.tracks[track].key);
  for (const auto& [pf, w] : net.dwell_windows)
    check_window(w, "dwell_window " + net.platforms[pf].id);
  for (const auto& [train, w] : net.total_travel_windows)
    check_window(w, "total_window " + net.trains[train].id);

  for (const auto& b : net.turnarounds) {
    check_window(b.window, "turnaround");
    if (!net.tracks[b.crossover].is_crossover)
      add("turnaround on a non-crossover arc", net.tracks[b.crossover].key);
    else {
      const auto& x = net.tracks[b.crossover];
      const auto& from_path = net.trains[b.train_from].path_platforms;
      const auto& to_path = net.trains[b.train_to].path_platforms;
      if (from_path.back() != x.from || to_path.front() != x.to)
        add("turnaround endpoints do not match train paths",
            net.trains[b.train_from].id + "/" + net.trains[b.train_to].id);
      if (b.train_from == b.train_to)
        add("turnaround relabels a train as itself",
            net.trains[b.train_from].id);
    }
  }

  for (const auto& c : net.connections) {
    check_window(c.window, "connection");
    if (net.path_position(c.train_from, c.platform_i) < 0 ||
        net.path_position(c.train_to, c.platform_j) < 0)
      add("connection references platform outside train path",
          net.platforms[c.platform_i].id + "/" + net.platforms[c.platform_j].id);
  }

  for (const auto& h : net.headways) {
    check_window(h.departure_window, "headway");
    check_window(h.arrival_window, "headway");
    const auto& tr = net.tracks[h.track];
    for (int train : {h.train_a, h.train_b}) {
      int pos = net.path_position(train, tr.from);
      if (pos < 0 || pos + 1 >= (int)net.trains[train].path_platforms.size() ||
          net.trains[train].path_tracks[pos] != h.track)
        add("headway train does not use the track", net.trains[train].id);
    }
    if (h.train_a == h.train_b) add("headway pair of identical trains", tr.key);
  }

  for (const auto& q : net.crossover_headways) {
    check_window(q.departure_window, "crossover headway");
    check_window(q.arrival_window, "crossover headway");
    if (!net.tracks[q.crossover].is_crossover)
      add("crossover headway on a non-crossover arc",
          net.tracks[q.crossover].key);
  }

  for (const auto& [i, j] : net.opposite_pairs) {
    if (net.platforms[i].station != net.platforms[j].station)
      add("opposite pair spans two stations",
          net.platforms[i].id + "/" + net.platforms[j].id);
    if (net.platforms[i].line == net.platforms[j].line)
      add("opposite pair on the same line",
          net.platforms[i].id + "/" + net.platforms[j].id);
  }

  if (net.horizon_m <= 0) add("horizon_m <= 0", "network");
  return out;
}

double headway_from_demand(double demand_per_hour, double capacity,
                           double utilization) {
  if (demand_per_hour <= 0 || capacity <= 0 || utilization <= 0 ||
      utilization > 1)
    throw InputError("headway_from_demand: arguments out of domain");
  return 3600.0 * capacity * utilization / demand_per_hour;
}

std::vector<ConstraintRecord> enumerate_constraints(const Network& net,
                                                    const Timetable& seed) {
  std::vector<ConstraintRecord> out;
  auto dep = [&](int train, int pos) {
    return EventRef{train, net.trains[train].path_platforms[pos],
                    EventKind::Departure};
  };
  auto arr = [&](int train, int pos) {
    return EventRef{train, net.trains[train].path_platforms[pos],
                    EventKind::Arrival};
  };

  // Trip and dwell records per train, in path order.
  for (int t = 0; t < (int)net.trains.size(); ++t) {
    const auto& train = net.trains[t];
    int n = (int)train.path_platforms.size();
    for (int k = 0; k < n; ++k) {
      ConstraintRecord r;
      r.kind = ConstraintKind::Dwell;
      r.earlier = arr(t, k);
      r.later = dep(t, k);
      r.window = net.dwell_window(train.path_platforms[k]);
      out.push_back(r);
      if (k + 1 < n) {
        ConstraintRecord trip;
        trip.kind = ConstraintKind::TripTime;
        trip.earlier = dep(t, k);
        trip.later = arr(t, k + 1);
        trip.window = net.trip_window(train.path_tracks[k]);
        trip.track = train.path_tracks[k];
        out.push_back(trip);
      }
    }
    ConstraintRecord total;
    total.kind = ConstraintKind::TotalTravel;
    total.earlier = dep(t, 0);
    total.later = arr(t, n - 1);
    total.window = net.total_travel_window(t);
    out.push_back(total);
  }

  for (const auto& b : net.turnarounds) {
    const auto& x = net.tracks[b.crossover];
    ConstraintRecord r;
    r.kind = ConstraintKind::CrossoverTrip;
    r.earlier = EventRef{b.train_from, x.from, EventKind::Departure};
    r.later = EventRef{b.train_to, x.to, EventKind::Arrival};
    r.window = b.window;
    r.track = b.crossover;
    out.push_back(r);
  }

  for (const auto& c : net.connections) {
    ConstraintRecord r;
    r.kind = ConstraintKind::Connection;
    r.earlier = EventRef{c.train_from, c.platform_i, EventKind::Arrival};
    r.later = EventRef{c.train_to, c.platform_j, EventKind::Departure};
    r.window = c.window;
    out.push_back(r);
  }

  // Headways: the earlier train (by seed departure from the shared origin)
  // comes first; the sequence of the seed timetable is frozen.
  for (const auto& h : net.headways) {
    const auto& tr = net.tracks[h.track];
    int a = h.train_a, b = h.train_b;
    EventRef da{a, tr.from, EventKind::Departure};
    EventRef db{b, tr.from, EventKind::Departure};
    if (seed.of(net, da) > seed.of(net, db)) std::swap(a, b);
    ConstraintRecord rd;
    rd.kind = ConstraintKind::HeadwayDeparture;
    rd.earlier = EventRef{a, tr.from, EventKind::Departure};
    rd.later = EventRef{b, tr.from, EventKind::Departure};
    rd.window = h.departure_window;
    out.push_back(rd);
    ConstraintRecord ra;
    ra.kind = ConstraintKind::HeadwayArrival;
    ra.earlier = EventRef{a, tr.to, EventKind::Arrival};
    ra.later = EventRef{b, tr.to, EventKind::Arrival};
    ra.window = h.arrival_window;
    out.push_back(ra);
  }

  for (const auto& q : net.crossover_headways) {
    const auto& x = net.tracks[q.crossover];
    int a = q.train_a, a2 = q.train_a2, b = q.train_b, b2 = q.train_b2;
    EventRef da{a, x.from, EventKind::Departure};
    EventRef db{b, x.from, EventKind::Departure};
    if (seed.of(net, da) > seed.of(net, db)) {
      std::swap(a, b);
      std::swap(a2, b2);
    }
    ConstraintRecord rd;
    rd.kind = ConstraintKind::CrossoverHeadwayDeparture;
    rd.earlier = EventRef{a, x.from, EventKind::Departure};
    rd.later = EventRef{b, x.from, EventKind::Departure};
    rd.window = q.departure_window;
    out.push_back(rd);
    ConstraintRecord ra;
    ra.kind = ConstraintKind::CrossoverHeadwayArrival;
    ra.earlier = EventRef{a2, x.to, EventKind::Arrival};
    ra.later = EventRef{b2, x.to, EventKind::Arrival};
    ra.window = q.arrival_window;
    out.push_back(ra);
  }

  // The seed must satisfy every emitted window.
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& r = out[i];
    Seconds diff = seed.of(net, r.later) - seed.of(net, r.earlier);
    if (!r.window.contains(diff)) {
      std::ostringstream os;
      os << "seed timetable violates " << to_string(r.kind) << " window ["
         << r.window.lower << "," << r.window.upper << "] with difference "
         << diff << " (record " << i << ")";
      throw InfeasibleError(os.str());
    }
  }
  return out;
}

std::vector<int> violated_records(const Network& net,
                                  const std::vector<ConstraintRecord>& records,
                                  const Timetable& tt) {
  std::vector<int> bad;
  for (int i = 0; i < (int)records.size(); ++i) {
    const auto& r = records[i];
    Seconds diff = tt.of(net, r.later) - tt.of(net, r.earlier);
    if (!r.window.contains(diff)) bad.push_back(i);
  }
  for (int e = 0; e < net.n_events; ++e)
    if (tt[e] < 0 || tt[e] > net.horizon_m) bad.push_back(-1 - e);
  return bad;
}

}  // namespace metro
