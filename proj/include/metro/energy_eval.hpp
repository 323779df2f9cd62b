#ifndef METRO_ENERGY_EVAL_HPP
#define METRO_ENERGY_EVAL_HPP

#include "metro/sync_pairing.hpp"

namespace metro {

struct EffectiveEnergyReport {
  std::vector<double> per_pair_before;  // J
  std::vector<double> per_pair_after;   // J
  double baseline_total = 0;
  double total_effective = 0;
  double reduction_fraction = 0;  // 1 - total/baseline
};

// Substation energy drawn for one pair: consumption of the accelerating
// train minus delivered regeneration of the braking train over the overlap
// of the two power supports, positive-part clamped, plus all consumption
// outside the overlap. Trapezoid quadrature at profile resolution.
double effective_energy_of_pair(
    const Network& net, const SyncPair& pair, const Timetable& tt,
    const std::map<int, std::vector<SegmentSpeedLimit>>& limits_by_track,
    const TrainPhysics& physics, const SimOptions& opts = {});

EffectiveEnergyReport compare(
    const Network& net, const Timetable& before, const Timetable& after,
    const std::vector<SyncPair>& pairs,
    const std::map<int, std::vector<SegmentSpeedLimit>>& limits_by_track,
    const TrainPhysics& physics, const SimOptions& opts = {});

// Summed consumption of every trip (and crossover trip) in the timetable,
// before any regeneration credit.
double total_consumed_energy(
    const Network& net, const Timetable& tt,
    const std::map<int, std::vector<SegmentSpeedLimit>>& limits_by_track,
    const TrainPhysics& physics, const SimOptions& opts = {});

}  // namespace metro

#endif  // METRO_ENERGY_EVAL_HPP
