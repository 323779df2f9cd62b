#ifndef METRO_ENERGY_FIT_HPP
#define METRO_ENERGY_FIT_HPP

#include <map>
#include <vector>

#include "metro/network.hpp"
#include "metro/profile_sim.hpp"

namespace metro {

// E(T) ~ c * T + b over a trip-time window, with c expected nonpositive.
struct AffineEnergyModel {
  double c = 0;
  double b = 0;
  double r_squared = 0;
  int n_samples = 0;

  double evaluate(double trip_time) const { return c * trip_time + b; }
};

// Closed-form least squares on (x, y) pairs. Needs at least two distinct x;
// r^2 is defined as 1 when the y values are all equal.
AffineEnergyModel fit_affine(const std::vector<std::pair<double, double>>& pts);

struct FitSummary {
  std::map<int, AffineEnergyModel> by_track;  // track index -> model
  double mean_r_squared = 0;
  double min_r_squared = 0;
};

// Samples the consumption-vs-trip-time curve of every track that appears in
// some train path and fits one affine model per track.
FitSummary fit_all_trips(
    const Network& net,
    const std::map<int, std::vector<SegmentSpeedLimit>>& limits_by_track,
    const TrainPhysics& physics, double sample_step = 1.0,
    const SimOptions& opts = {});

}  // namespace metro

#endif  // METRO_ENERGY_FIT_HPP
