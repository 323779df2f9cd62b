#ifndef METRO_NETWORK_HPP
#define METRO_NETWORK_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace metro {

using Seconds = std::int64_t;

// Error categories, mapped to CLI exit codes.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TimeWindow {
  Seconds lower = 0;
  Seconds upper = 0;

  bool contains(Seconds v) const { return lower <= v && v <= upper; }
  bool valid() const { return 0 <= lower && lower <= upper; }

  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

enum class EventKind { Arrival, Departure };

// An event time of one train at one platform. `train` and `platform` are
// dense indices into Network::trains / Network::platforms.
struct EventRef {
  int train = -1;
  int platform = -1;
  EventKind kind = EventKind::Arrival;

  friend bool operator==(const EventRef&, const EventRef&) = default;
  friend auto operator<=>(const EventRef&, const EventRef&) = default;
};

enum class ConstraintKind {
  TripTime,
  CrossoverTrip,
  Dwell,
  Connection,
  HeadwayDeparture,
  HeadwayArrival,
  CrossoverHeadwayDeparture,
  CrossoverHeadwayArrival,
  TotalTravel,
};

const char* to_string(ConstraintKind k);

// One instance of a timetable constraint: window.lower <= later - earlier
// <= window.upper.
struct ConstraintRecord {
  ConstraintKind kind = ConstraintKind::TripTime;
  EventRef earlier;
  EventRef later;
  TimeWindow window;
  // For TripTime/CrossoverTrip: index of the track/crossover, -1 otherwise.
  int track = -1;
};

struct Platform {
  std::string id;
  std::string station;
  std::string line;
};

// A directed arc between two non-opposite platforms. Crossovers are stored
// in the same table with `is_crossover` set.
struct Track {
  int from = -1;
  int to = -1;
  double length_m = 0.0;
  bool is_crossover = false;

  std::string key;  // "FROM-TO", the external identifier
};

struct Train {
  std::string id;
  std::vector<int> path_platforms;  // dense platform indices, chronological
  std::vector<int> path_tracks;     // path_tracks[k] joins platforms k,k+1
  std::string physics_id;
};

struct TurnaroundPair {
  int crossover = -1;  // track index with is_crossover
  int train_from = -1;
  int train_to = -1;
  TimeWindow window;
};

struct ConnectionPair {
  int platform_i = -1;  // arrival platform of train_from
  int platform_j = -1;  // departure platform of train_to
  int train_from = -1;
  int train_to = -1;
  TimeWindow window;
};

struct HeadwayPair {
  int track = -1;
  int train_a = -1;
  int train_b = -1;
  TimeWindow departure_window;
  TimeWindow arrival_window;
};

// Two relabelled trains per side of a crossover: (a, a2) followed by (b, b2).
struct CrossoverHeadwayQuartet {
  int crossover = -1;
  int train_a = -1;
  int train_a2 = -1;
  int train_b = -1;
  int train_b2 = -1;
  TimeWindow departure_window;
  TimeWindow arrival_window;
};

struct Violation {
  std::string reason;
  std::string subject;
};

class Timetable;

struct Network {
  std::vector<Platform> platforms;
  std::vector<Track> tracks;  // regular tracks and crossovers
  std::vector<Train> trains;

  std::vector<TurnaroundPair> turnarounds;
  std::vector<ConnectionPair> connections;
  std::vector<HeadwayPair> headways;
  std::vector<CrossoverHeadwayQuartet> crossover_headways;
  std::vector<std::pair<int, int>> opposite_pairs;  // Omega, platform indices

  std::map<int, TimeWindow> trip_windows;            // by track index
  std::map<int, TimeWindow> dwell_windows;           // by platform index
  std::map<int, TimeWindow> total_travel_windows;    // by train index

  Seconds horizon_m = 0;

  // Lookup tables built by finalize().
  std::map<std::string, int> platform_index;
  std::map<std::string, int> track_index;  // by "FROM-TO" key
  std::map<std::string, int> train_index;
  std::vector<int> event_base;  // event index of (train, pos=0, Arrival)
  int n_events = 0;

  void finalize();

  int event_index(int train, int pos, EventKind kind) const {
    return event_base[train] + 2 * pos + (kind == EventKind::Departure ? 1 : 0);
  }
  int event_index(const EventRef& e) const;
  EventRef event_of_index(int idx) const;

  // Position of `platform` in the train's path, or -1.
  int path_position(int train, int platform) const;

  const TimeWindow& trip_window(int track) const;
  const TimeWindow& dwell_window(int platform) const;
  const TimeWindow& total_travel_window(int train) const;
};

enum class Provenance { Seed, EMT, Final };

// Event times, one per (train, path position, arrival/departure).
class Timetable {
 public:
  Timetable() = default;
  Timetable(const Network& net, Provenance prov)
      : provenance(prov), times_(net.n_events, 0) {}

  Seconds& at(const Network& net, int train, int pos, EventKind kind) {
    return times_[net.event_index(train, pos, kind)];
  }
  Seconds at(const Network& net, int train, int pos, EventKind kind) const {
    return times_[net.event_index(train, pos, kind)];
  }
  Seconds of(const Network& net, const EventRef& e) const {
    return times_[net.event_index(e)];
  }
  Seconds& operator[](int event_idx) { return times_[event_idx]; }
  Seconds operator[](int event_idx) const { return times_[event_idx]; }
  std::size_t size() const { return times_.size(); }

  Provenance provenance = Provenance::Seed;

 private:
  std::vector<Seconds> times_;
};

// Structural validation of all type invariants. Violations are data, not
// faults: an empty list means the network is valid.
std::vector<Violation> validate(const Network& net);

// Eq-style headway from passenger demand: 3600 * c * u / D seconds.
double headway_from_demand(double demand_per_hour, double capacity,
                           double utilization);

// Emits every constraint instance for the network, with train order on
// shared tracks and crossovers frozen to the seed timetable.
std::vector<ConstraintRecord> enumerate_constraints(const Network& net,
                                                    const Timetable& seed);

// Exact integer check of a timetable against a record list. Returns the
// indices of violated records.
std::vector<int> violated_records(const Network& net,
                                  const std::vector<ConstraintRecord>& records,
                                  const Timetable& tt);

}  // namespace metro

#endif  // METRO_NETWORK_HPP
