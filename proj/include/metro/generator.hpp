#ifndef METRO_GENERATOR_HPP
#define METRO_GENERATOR_HPP

#include <map>

#include "metro/network.hpp"
#include "metro/profile_sim.hpp"

namespace metro {

// Two-line instance with a crossover at each end. A "service" is one
// physical train: one train object per leg joined by a turnaround, so
// `trains` is rounded up to a multiple of two unless it is 1.
struct GeneratorConfig {
  int stations = 14;       // stations per line (ignored in shanghai mode)
  int trains = 100;
  Seconds headway = 180;   // seed start separation between services
  unsigned rng_seed = 1;
  bool shanghai = false;   // topology and speed limits of the line-8 sample
  // Window shaping around the seed.
  Seconds trip_halfwidth = 10;
  Seconds dwell_lo = 30;
  Seconds dwell_hi = 50;
  Seconds headway_slack = 60;
  // Also constrain services two apart on shared tracks (denser row count).
  bool second_order_headways = false;
  SimOptions sim;
};

struct GeneratedInstance {
  Network net;
  Timetable seed;
  TrainPhysics physics;
  std::map<int, std::vector<SegmentSpeedLimit>> limits;
};

GeneratedInstance generate_instance(const GeneratorConfig& cfg);

}  // namespace metro

#endif  // METRO_GENERATOR_HPP
