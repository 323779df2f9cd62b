#ifndef METRO_SYNC_PAIRING_HPP
#define METRO_SYNC_PAIRING_HPP

#include <map>

#include "metro/profile_sim.hpp"

namespace metro {

// Interval where the power graph stays above peak/e, used as a rectangle
// substitute for the whole curve. Its midpoint is the alignment point.
struct PowerRectangle {
  double peak = 0;
  double t_start = 0;
  double t_end = 0;
  double midpoint = 0;
};

PowerRectangle rectangle_of(
    const std::vector<std::pair<double, double>>& graph_samples);

enum class PairDirection { Right, Left };

struct SyncPair {
  int platform_i = -1;  // subject train's platform
  int platform_j = -1;  // partner's platform, opposite of i
  int train_t = -1;
  int partner = -1;
  PairDirection direction = PairDirection::Right;
};

// Alignment constants per (train, platform): `nabla` measures the braking
// alignment point back from the arrival, `delta` the accelerating alignment
// point forward from the departure.
struct OffsetTable {
  std::map<std::pair<int, int>, double> nabla;
  std::map<std::pair<int, int>, double> delta;
};

// Simulates every trip at its EMT trip time and reduces each power graph to
// rectangle midpoints. Crossover trips contribute the offsets of the
// relabelled trains on both sides of the turnaround.
OffsetTable compute_offsets(
    const Network& net, const Timetable& emt,
    const std::map<int, std::vector<SegmentSpeedLimit>>& limits_by_track,
    const TrainPhysics& physics, const SimOptions& opts = {});

// Temporally closest partner per subject train over the opposite-platform
// pairs, by dwell midpoint, within radius r. Candidates missing the offsets
// their direction needs are skipped; ties break toward Right.
std::vector<SyncPair> closest_partners(const Network& net, const Timetable& emt,
                                       const OffsetTable& offsets, Seconds r);

void export_pairs_csv(const Network& net, const std::vector<SyncPair>& pairs,
                      const OffsetTable& offsets, std::ostream& os);

}  // namespace metro

#endif  // METRO_SYNC_PAIRING_HPP
