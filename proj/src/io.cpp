#include "metro/io.hpp"

#include <fstream>
#include <sstream>

namespace metro {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) {
    if (tok[0] == '#') break;
    out.push_back(tok);
  }
  return out;
}

[[noreturn]] void fail(int lineno, const std::string& what) {
  std::ostringstream os;
  os << "line " << lineno << ": " << what;
  throw InputError(os.str());
}

Seconds to_seconds(const std::string& s, int lineno) {
  try {
    std::size_t used = 0;
    Seconds v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(lineno, "expected an integer, got '" + s + "'");
  }
}

double to_double(const std::string& s, int lineno) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(lineno, "expected a number, got '" + s + "'");
  }
}

template <typename Map>
int lookup(const Map& m, const std::string& key, const char* what,
           int lineno) {
  auto it = m.find(key);
  if (it == m.end()) fail(lineno, std::string("unknown ") + what + " '" + key + "'");
  return it->second;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

}  // namespace

Network load_network(std::istream& in) {
  Network net;
  // Window keywords may reference ids declared later, so buffer them.
  std::vector<std::pair<int, std::vector<std::string>>> deferred;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto tok = tokenize(line);
    if (tok.empty()) continue;
    const std::string& kw = tok[0];
    auto need = [&](std::size_t n) {
      if (tok.size() != n + 1)
        fail(lineno, kw + " needs " + std::to_string(n) + " fields");
    };
    if (kw == "horizon") {
      need(1);
      net.horizon_m = to_seconds(tok[1], lineno);
    } else if (kw == "platform") {
      need(3);
      if (net.platform_index.count(tok[1]))
        fail(lineno, "duplicate platform '" + tok[1] + "'");
      net.platform_index[tok[1]] = (int)net.platforms.size();
      net.platforms.push_back({tok[1], tok[2], tok[3]});
    } else if (kw == "track" || kw == "crossover") {
      need(3);
      Track t;
      t.from = lookup(net.platform_index, tok[1], "platform", lineno);
      t.to = lookup(net.platform_index, tok[2], "platform", lineno);
      t.length_m = to_double(tok[3], lineno);
      t.is_crossover = kw == "crossover";
      t.key = tok[1] + "-" + tok[2];
      if (net.track_index.count(t.key))
        fail(lineno, "duplicate track '" + t.key + "'");
      net.track_index[t.key] = (int)net.tracks.size();
      net.tracks.push_back(t);
    } else if (kw == "train") {
      if (tok.size() < 4) fail(lineno, "train needs id, physics and a path");
      Train t;
      t.id = tok[1];
      t.physics_id = tok[2];
      if (net.train_index.count(t.id))
        fail(lineno, "duplicate train '" + t.id + "'");
      for (std::size_t k = 3; k < tok.size(); ++k)
        t.path_platforms.push_back(
            lookup(net.platform_index, tok[k], "platform", lineno));
      for (std::size_t k = 0; k + 1 < t.path_platforms.size(); ++k) {
        std::string key = net.platforms[t.path_platforms[k]].id + "-" +
                          net.platforms[t.path_platforms[k + 1]].id;
        t.path_tracks.push_back(lookup(net.track_index, key, "track", lineno));
      }
      net.train_index[t.id] = (int)net.trains.size();
      net.trains.push_back(std::move(t));
    } else {
      deferred.emplace_back(lineno, std::move(tok));
    }
  }

  for (auto& [ln, tok] : deferred) {
    const std::string& kw = tok[0];
    auto need = [&, ln = ln](std::size_t n) {
      if (tok.size() != n + 1)
        fail(ln, kw + " needs " + std::to_string(n) + " fields");
    };
    auto window = [&, ln = ln](std::size_t at) {
      return TimeWindow{to_seconds(tok[at], ln), to_seconds(tok[at + 1], ln)};
    };
    if (kw == "trip_window") {
      need(3);
      net.trip_windows[lookup(net.track_index, tok[1], "track", ln)] =
          window(2);
    } else if (kw == "dwell_window") {
      need(3);
      net.dwell_windows[lookup(net.platform_index, tok[1], "platform", ln)] =
          window(2);
    } else if (kw == "total_window") {
      need(3);
      net.total_travel_windows[lookup(net.train_index, tok[1], "train", ln)] =
          window(2);
    } else if (kw == "turnaround") {
      need(5);
      TurnaroundPair p;
      p.crossover = lookup(net.track_index, tok[1], "crossover", ln);
      p.train_from = lookup(net.train_index, tok[2], "train", ln);
      p.train_to = lookup(net.train_index, tok[3], "train", ln);
      p.window = window(4);
      net.turnarounds.push_back(p);
    } else if (kw == "connection") {
      need(6);
      ConnectionPair p;
      p.platform_i = lookup(net.platform_index, tok[1], "platform", ln);
      p.platform_j = lookup(net.platform_index, tok[2], "platform", ln);
      p.train_from = lookup(net.train_index, tok[3], "train", ln);
      p.train_to = lookup(net.train_index, tok[4], "train", ln);
      p.window = window(5);
      net.connections.push_back(p);
    } else if (kw == "headway") {
      need(7);
      HeadwayPair p;
      p.track = lookup(net.track_index, tok[1], "track", ln);
      p.train_a = lookup(net.train_index, tok[2], "train", ln);
      p.train_b = lookup(net.train_index, tok[3], "train", ln);
      p.departure_window = window(4);
      p.arrival_window = window(6);
      net.headways.push_back(p);
    } else if (kw == "xheadway") {
      need(9);
      CrossoverHeadwayQuartet q;
      q.crossover = lookup(net.track_index, tok[1], "crossover", ln);
      q.train_a = lookup(net.train_index, tok[2], "train", ln);
      q.train_a2 = lookup(net.train_index, tok[3], "train", ln);
      q.train_b = lookup(net.train_index, tok[4], "train", ln);
      q.train_b2 = lookup(net.train_index, tok[5], "train", ln);
      q.departure_window = window(6);
      q.arrival_window = window(8);
      net.crossover_headways.push_back(q);
    } else if (kw == "opposite") {
      need(2);
      net.opposite_pairs.emplace_back(
          lookup(net.platform_index, tok[1], "platform", ln),
          lookup(net.platform_index, tok[2], "platform", ln));
    } else {
      fail(ln, "unknown keyword '" + kw + "'");
    }
  }
  net.finalize();
  return net;
}

Network load_network_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return load_network(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void save_network(const Network& net, std::ostream& os) {
  os << "horizon " << net.horizon_m << "\n";
  for (const auto& p : net.platforms)
    os << "platform " << p.id << ' ' << p.station << ' ' << p.line << "\n";
  for (const auto& t : net.tracks)
    os << (t.is_crossover ? "crossover " : "track ")
       << net.platforms[t.from].id << ' ' << net.platforms[t.to].id << ' '
       << t.length_m << "\n";
  for (const auto& t : net.trains) {
    os << "train " << t.id << ' ' << t.physics_id;
    for (int p : t.path_platforms) os << ' ' << net.platforms[p].id;
    os << "\n";
  }
  for (const auto& [tk, w] : net.trip_windows)
    os << "trip_window " << net.tracks[tk].key << ' ' << w.lower << ' '
       << w.upper << "\n";
  for (const auto& [p, w] : net.dwell_windows)
    os << "dwell_window " << net.platforms[p].id << ' ' << w.lower << ' '
       << w.upper << "\n";
  for (const auto& [t, w] : net.total_travel_windows)
    os << "total_window " << net.trains[t].id << ' ' << w.lower << ' '
       << w.upper << "\n";
  for (const auto& p : net.turnarounds)
    os << "turnaround " << net.tracks[p.crossover].key << ' '
       << net.trains[p.train_from].id << ' ' << net.trains[p.train_to].id
       << ' ' << p.window.lower << ' ' << p.window.upper << "\n";
  for (const auto& p : net.connections)
    os << "connection " << net.platforms[p.platform_i].id << ' '
       << net.platforms[p.platform_j].id << ' ' << net.trains[p.train_from].id
       << ' ' << net.trains[p.train_to].id << ' ' << p.window.lower << ' '
       << p.window.upper << "\n";
  for (const auto& p : net.headways)
    os << "headway " << net.tracks[p.track].key << ' '
       << net.trains[p.train_a].id << ' ' << net.trains[p.train_b].id << ' '
       << p.departure_window.lower << ' ' << p.departure_window.upper << ' '
       << p.arrival_window.lower << ' ' << p.arrival_window.upper << "\n";
  for (const auto& q : net.crossover_headways)
    os << "xheadway " << net.tracks[q.crossover].key << ' '
       << net.trains[q.train_a].id << ' ' << net.trains[q.train_a2].id << ' '
       << net.trains[q.train_b].id << ' ' << net.trains[q.train_b2].id << ' '
       << q.departure_window.lower << ' ' << q.departure_window.upper << ' '
       << q.arrival_window.lower << ' ' << q.arrival_window.upper << "\n";
  for (auto [i, j] : net.opposite_pairs)
    os << "opposite " << net.platforms[i].id << ' ' << net.platforms[j].id
       << "\n";
}

TrainPhysics load_physics(std::istream& in) {
  TrainPhysics ph;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto tok = tokenize(line);
    if (tok.empty()) continue;
    if (tok.size() != 2) fail(lineno, "expected 'key value'");
    const std::string& k = tok[0];
    if (k == "id") {
      ph.id = tok[1];
      continue;
    }
    double v = to_double(tok[1], lineno);
    if (k == "mass_kg") ph.mass_kg = v;
    else if (k == "davis_a0") ph.davis_a0 = v;
    else if (k == "davis_a1") ph.davis_a1 = v;
    else if (k == "davis_a2") ph.davis_a2 = v;
    else if (k == "max_accel") ph.max_accel = v;
    else if (k == "coast_decel") ph.coast_decel = v;
    else if (k == "max_brake_decel") ph.max_brake_decel = v;
    else if (k == "eta_elec_to_kin") ph.eta_elec_to_kin = v;
    else if (k == "eta_kin_to_regen") ph.eta_kin_to_regen = v;
    else if (k == "transmission_loss") ph.transmission_loss = v;
    else fail(lineno, "unknown physics key '" + k + "'");
  }
  if (ph.mass_kg <= 0 || ph.max_accel <= 0 || ph.max_brake_decel >= 0 ||
      ph.coast_decel >= 0)
    throw InputError("physics parameters out of range");
  return ph;
}

TrainPhysics load_physics_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return load_physics(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void save_physics(const TrainPhysics& ph, std::ostream& os) {
  if (!ph.id.empty()) os << "id " << ph.id << "\n";
  os << "mass_kg " << ph.mass_kg << "\n"
     << "davis_a0 " << ph.davis_a0 << "\n"
     << "davis_a1 " << ph.davis_a1 << "\n"
     << "davis_a2 " << ph.davis_a2 << "\n"
     << "max_accel " << ph.max_accel << "\n"
     << "coast_decel " << ph.coast_decel << "\n"
     << "max_brake_decel " << ph.max_brake_decel << "\n"
     << "eta_elec_to_kin " << ph.eta_elec_to_kin << "\n"
     << "eta_kin_to_regen " << ph.eta_kin_to_regen << "\n"
     << "transmission_loss " << ph.transmission_loss << "\n";
}

std::map<int, std::vector<SegmentSpeedLimit>> load_limits(std::istream& in,
                                                          const Network& net) {
  std::map<int, std::vector<SegmentSpeedLimit>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto tok = tokenize(line);
    if (tok.empty()) continue;
    if (tok.size() != 4 && tok.size() != 5)
      fail(lineno, "expected 'TRACK START END LIMIT [GRADE]'");
    SegmentSpeedLimit s;
    s.track = lookup(net.track_index, tok[0], "track", lineno);
    s.start_m = to_double(tok[1], lineno);
    s.end_m = to_double(tok[2], lineno);
    s.limit_kmh = to_double(tok[3], lineno);
    if (tok.size() == 5) s.grade_deg = to_double(tok[4], lineno);
    out[s.track].push_back(s);
  }
  return out;
}

std::map<int, std::vector<SegmentSpeedLimit>> load_limits_file(
    const std::filesystem::path& path, const Network& net) {
  auto in = open_input(path);
  try {
    return load_limits(in, net);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void save_limits(const Network& net,
                 const std::map<int, std::vector<SegmentSpeedLimit>>& limits,
                 std::ostream& os) {
  for (const auto& [tk, segs] : limits)
    for (const auto& s : segs) {
      os << net.tracks[tk].key << ' ' << s.start_m << ' ' << s.end_m << ' '
         << s.limit_kmh;
      if (s.grade_deg != 0) os << ' ' << s.grade_deg;
      os << "\n";
    }
}

Timetable load_timetable(std::istream& in, const Network& net,
                         Provenance prov) {
  Timetable tt(net, prov);
  std::vector<bool> seen(net.n_events, false);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto tok = tokenize(line);
    if (tok.empty()) continue;
    if (tok.size() != 4)
      fail(lineno, "expected 'TRAIN PLATFORM ARRIVAL DEPARTURE'");
    int train = lookup(net.train_index, tok[0], "train", lineno);
    int plat = lookup(net.platform_index, tok[1], "platform", lineno);
    int pos = net.path_position(train, plat);
    if (pos < 0)
      fail(lineno, "platform '" + tok[1] + "' not on the path of '" + tok[0] +
                       "'");
    int ai = net.event_index(train, pos, EventKind::Arrival);
    if (seen[ai]) fail(lineno, "duplicate entry for " + tok[0] + " at " + tok[1]);
    seen[ai] = seen[ai + 1] = true;
    tt[ai] = to_seconds(tok[2], lineno);
    tt[ai + 1] = to_seconds(tok[3], lineno);
  }
  for (int i = 0; i < net.n_events; ++i)
    if (!seen[i]) {
      EventRef e = net.event_of_index(i);
      throw InputError("missing timetable entry for train '" +
                       net.trains[e.train].id + "' at '" +
                       net.platforms[e.platform].id + "'");
    }
  return tt;
}

Timetable load_timetable_file(const std::filesystem::path& path,
                              const Network& net, Provenance prov) {
  auto in = open_input(path);
  try {
    return load_timetable(in, net, prov);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void save_timetable(const Network& net, const Timetable& tt,
                    std::ostream& os) {
  for (int tr = 0; tr < (int)net.trains.size(); ++tr) {
    const Train& train = net.trains[tr];
    for (int pos = 0; pos < (int)train.path_platforms.size(); ++pos)
      os << train.id << ' ' << net.platforms[train.path_platforms[pos]].id
         << ' ' << tt.at(net, tr, pos, EventKind::Arrival) << ' '
         << tt.at(net, tr, pos, EventKind::Departure) << "\n";
  }
}

void save_exact_timetable(const Network& net,
                          const std::vector<double>& event_times,
                          std::ostream& os) {
  for (int tr = 0; tr < (int)net.trains.size(); ++tr) {
    const Train& train = net.trains[tr];
    for (int pos = 0; pos < (int)train.path_platforms.size(); ++pos)
      os << train.id << ' ' << net.platforms[train.path_platforms[pos]].id
         << ' '
         << event_times[net.event_index(tr, pos, EventKind::Arrival)] << ' '
         << event_times[net.event_index(tr, pos, EventKind::Departure)]
         << "\n";
  }
}

}  // namespace metro
