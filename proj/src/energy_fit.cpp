#include "metro/energy_fit.hpp"

#include <algorithm>
#include <cmath>

namespace metro {

AffineEnergyModel fit_affine(
    const std::vector<std::pair<double, double>>& pts) {
  if (pts.size() < 2) throw InputError("affine fit needs at least two samples");
  double p = (double)pts.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double det = p * sxx - sx * sx;
  if (std::abs(det) < 1e-12 * p * sxx)
    throw InputError("affine fit needs at least two distinct abscissae");

  AffineEnergyModel m;
  m.n_samples = (int)pts.size();
  m.c = (p * sxy - sx * sy) / det;
  m.b = (sy - m.c * sx) / p;

  double mean_y = sy / p;
  double ss_res = 0, ss_tot = 0;
  for (auto [x, y] : pts) {
    double e = y - m.evaluate(x);
    ss_res += e * e;
    ss_tot += (y - mean_y) * (y - mean_y);
  }
  m.r_squared = ss_tot == 0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return m;
}

FitSummary fit_all_trips(
    const Network& net,
    const std::map<int, std::vector<SegmentSpeedLimit>>& limits_by_track,
    const TrainPhysics& physics, double sample_step, const SimOptions& opts) {
  // Fit domain per track: the trip window, plus crossovers reachable only
  // through turnarounds (their domain is the turnaround window).
  std::map<int, TimeWindow> domains;
  for (const auto& tr : net.trains)
    for (int tk : tr.path_tracks) domains.emplace(tk, net.trip_window(tk));
  for (const auto& b : net.turnarounds) {
    auto [it, inserted] = domains.try_emplace(b.crossover, b.window);
    if (!inserted) {
      it->second.lower = std::max(it->second.lower, b.window.lower);
      it->second.upper = std::min(it->second.upper, b.window.upper);
    }
  }

  FitSummary out;
  double sum_r2 = 0;
  out.min_r_squared = 1.0;
  for (const auto& [tk, window] : domains) {
    auto lit = limits_by_track.find(tk);
    if (lit == limits_by_track.end())
      throw InputError("no speed limits for track " + net.tracks[tk].key);
    auto pts = sample_energy_curve(net.tracks[tk].length_m, lit->second,
                                   physics, window, sample_step, opts);
    auto model = fit_affine(pts);
    sum_r2 += model.r_squared;
    out.min_r_squared = std::min(out.min_r_squared, model.r_squared);
    out.by_track.emplace(tk, model);
  }
  if (out.by_track.empty()) throw InputError("no tracks to fit");
  out.mean_r_squared = sum_r2 / (double)out.by_track.size();
  return out;
}

}  // namespace metro
