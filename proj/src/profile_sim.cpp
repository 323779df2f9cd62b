#include "metro/profile_sim.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <sstream>

namespace metro {

namespace {

constexpr double kGravity = 9.80665;

struct LimitTable {
  std::vector<SegmentSpeedLimit> segs;  // sorted by start_m
  double length = 0;
  double min_limit_ms = 0;

  LimitTable(double track_length, std::vector<SegmentSpeedLimit> limits)
      : segs(std::move(limits)), length(track_length) {
    if (segs.empty()) throw InputError("no speed-limit segments for track");
    std::sort(segs.begin(), segs.end(),
              [](const auto& a, const auto& b) { return a.start_m < b.start_m; });
    if (std::abs(segs.front().start_m) > 1e-6 ||
        std::abs(segs.back().end_m - track_length) > 1e-6)
      throw InputError("speed-limit segments do not cover the track");
    min_limit_ms = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < segs.size(); ++i) {
      if (segs[i].limit_kmh <= 0)
        throw InputError("nonpositive speed limit");
      if (i > 0 && std::abs(segs[i].start_m - segs[i - 1].end_m) > 1e-6)
        throw InputError("speed-limit segments are not contiguous");
      min_limit_ms = std::min(min_limit_ms, segs[i].limit_kmh / 3.6);
    }
  }

  const SegmentSpeedLimit& at(double pos) const {
    for (std::size_t i = 0; i + 1 < segs.size(); ++i)
      if (pos < segs[i].end_m) return segs[i];
    return segs.back();
  }
  double grade_accel(double pos) const {
    return kGravity * std::sin(at(pos).grade_deg * M_PI / 180.0);
  }
};

// Max-brake trajectory ending at (length, v=0), tabulated by position.
struct BrakeTable {
  std::vector<double> pos, speed, time_to_stop;  // ascending pos

  BrakeTable(const LimitTable& lim, const TrainPhysics& ph, double dt,
             double v_top) {
    double p = lim.length, v = 0, tts = 0;
    std::vector<std::array<double, 3>> rev;
    rev.push_back({p, v, tts});
    double bmag = -ph.max_brake_decel;
    while (v < v_top && p > 0) {
      double dec = bmag + ph.resistance(v) + lim.grade_accel(std::max(p, 0.0));
      double v2 = v + dt * dec;
      p -= dt * 0.5 * (v + v2);
      v = v2;
      tts += dt;
      rev.push_back({p, v, tts});
    }
    for (auto it = rev.rbegin(); it != rev.rend(); ++it) {
      pos.push_back((*it)[0]);
      speed.push_back((*it)[1]);
      time_to_stop.push_back((*it)[2]);
    }
  }

  double speed_at(double p) const {
    if (p <= pos.front()) return speed.front();
    auto it = std::lower_bound(pos.begin(), pos.end(), p);
    if (it == pos.end()) return 0.0;
    std::size_t i = it - pos.begin();
    if (i == 0) return speed.front();
    double f = (p - pos[i - 1]) / (pos[i] - pos[i - 1]);
    return speed[i - 1] + f * (speed[i] - speed[i - 1]);
  }
  double tts_at(double p) const {
    if (p <= pos.front()) return time_to_stop.front();
    auto it = std::lower_bound(pos.begin(), pos.end(), p);
    if (it == pos.end()) return 0.0;
    std::size_t i = it - pos.begin();
    if (i == 0) return time_to_stop.front();
    double f = (p - pos[i - 1]) / (pos[i] - pos[i - 1]);
    return time_to_stop[i - 1] + f * (time_to_stop[i] - time_to_stop[i - 1]);
  }
  // Latest position from which max braking at entry speed v still stops at
  // the platform.
  double brake_onset(double v) const {
    auto it = std::lower_bound(
        speed.begin(), speed.end(), v,
        [](double sv, double target) { return sv > target; });
    if (it == speed.end()) return pos.back();
    std::size_t i = it - speed.begin();
    if (i == 0) return pos.front();
    double f = (speed[i - 1] - v) / (speed[i - 1] - speed[i]);
    return pos[i - 1] + f * (pos[i] - pos[i - 1]);
  }
};

struct Simulator {
  const LimitTable& lim;
  const BrakeTable& brake;
  const TrainPhysics& ph;
  double dt;

  double consumption_power(double u_pos, double v) const {
    return ph.mass_kg * u_pos * v / ph.eta_elec_to_kin;
  }

  SpeedProfile run(double v_hold, double coast_pos_req) const {
    SpeedProfile prof;
    double t = 0, p = 0, v = 0;
    auto sample = [&](double u, double net, Phase phase) {
      double power;
      if (phase == Phase::Brake)
        power = -ph.eta_kin_to_regen * ph.mass_kg * (-ph.max_brake_decel) * v;
      else
        power = u > 0 ? consumption_power(u, v) : 0.0;
      prof.samples.push_back({t, p, v, net, power});
    };

    // Phase 1: maximum acceleration up to the hold speed.
    prof.phase_bounds[0].first = t;
    sample(ph.max_accel, ph.max_accel - ph.resistance(0) - lim.grade_accel(0),
           Phase::Accelerate);
    while (v < v_hold - 1e-9) {
      double net = ph.max_accel - ph.resistance(v) - lim.grade_accel(p);
      if (net <= 1e-6)
        throw InfeasibleError("train cannot accelerate to the hold speed");
      double step = dt;
      if (v + net * step > v_hold) step = (v_hold - v) / net;
      double v2 = v + net * step;
      p += step * 0.5 * (v + v2);
      v = v2;
      t += step;
      sample(ph.max_accel, net, Phase::Accelerate);
    }
    prof.phase_bounds[0].second = t;

    // Phase 2: speed hold until the coast onset.
    double coast_pos = std::max(coast_pos_req, p);
    coast_pos = std::min(coast_pos, brake.brake_onset(v_hold));
    prof.phase_bounds[1].first = t;
    while (p < coast_pos - 1e-9) {
      double step = std::min(dt, (coast_pos - p) / v_hold);
      t += step;
      p += step * v_hold;
      double u = ph.resistance(v) + lim.grade_accel(p);
      sample(std::max(u, 0.0), 0.0, Phase::Hold);
    }
    prof.phase_bounds[1].second = t;

    // Phase 3: coast until the descending max-brake curve meets the speed.
    prof.phase_bounds[2].first = t;
    while (v + 1e-9 < brake.speed_at(p) && p < lim.length) {
      double dec = ph.resistance(v) + lim.grade_accel(p);
      dec = std::clamp(dec, 0.0, -ph.coast_decel);
      double v2 = std::max(v - dt * dec, 0.1);
      p += dt * 0.5 * (v + v2);
      v = v2;
      t += dt;
      sample(0.0, -dec, Phase::Coast);
    }
    prof.phase_bounds[2].second = t;

    // Phase 4: follow the tabulated max-brake trajectory to the stop point.
    prof.phase_bounds[3].first = t;
    double tts0 = brake.tts_at(p);
    auto it = std::upper_bound(brake.pos.begin(), brake.pos.end(), p);
    for (std::size_t i = it - brake.pos.begin(); i < brake.pos.size(); ++i) {
      t = prof.phase_bounds[3].first + (tts0 - brake.time_to_stop[i]);
      p = brake.pos[i];
      v = brake.speed[i];
      double net = -(-ph.max_brake_decel + ph.resistance(v) +
                     lim.grade_accel(std::min(p, lim.length)));
      sample(ph.max_brake_decel, net, Phase::Brake);
    }
    prof.phase_bounds[3].second = t;
    prof.trip_time = t;

    // Exact boundary conditions at the stop point.
    prof.samples.back().speed = 0.0;
    prof.samples.back().pos = lim.length;
    prof.samples.back().power = 0.0;
    return prof;
  }
};

double geometric_speed_cap(const LimitTable& lim, const BrakeTable& brake,
                           const TrainPhysics& ph, double dt, double v_top) {
  double p = 0, v = 0;
  while (v < v_top) {
    if (v >= brake.speed_at(p)) return v;
    double net = ph.max_accel - ph.resistance(v) - lim.grade_accel(p);
    if (net <= 1e-6) return v;
    double v2 = v + dt * net;
    p += dt * 0.5 * (v + v2);
    v = v2;
  }
  return v_top;
}

}  // namespace

SpeedProfile simulate_profile(double track_length,
                              const std::vector<SegmentSpeedLimit>& limits,
                              const TrainPhysics& physics, double trip_time,
                              const SimOptions& opts) {
  if (track_length <= 0) throw InputError("track length must be positive");
  LimitTable lim(track_length, limits);
  BrakeTable brake(lim, physics, opts.dt, lim.min_limit_ms + 5.0);
  Simulator sim{lim, brake, physics, opts.dt};

  double v_cap = std::min(
      lim.min_limit_ms,
      geometric_speed_cap(lim, brake, physics, opts.dt, lim.min_limit_ms));
  if (v_cap < opts.floor_speed)
    throw InfeasibleError("track too short for the configured floor speed");

  SpeedProfile fastest = sim.run(v_cap, brake.brake_onset(v_cap));
  double t_min = fastest.trip_time;
  if (trip_time < t_min - opts.time_tol) {
    std::ostringstream os;
    os << "trip time " << trip_time << " s below the minimal achievable "
       << t_min << " s";
    throw InfeasibleError(os.str());
  }
  if (trip_time <= t_min) return fastest;

  SpeedProfile full_coast = sim.run(v_cap, 0.0);
  if (trip_time <= full_coast.trip_time) {
    // Same hold speed; bisect the coast onset position.
    double lo = 0.0, hi = brake.brake_onset(v_cap);
    SpeedProfile best = full_coast;
    for (int i = 0; i < 60 && std::abs(best.trip_time - trip_time) >
                                  opts.time_tol * 0.5; ++i) {
      double mid = 0.5 * (lo + hi);
      best = sim.run(v_cap, mid);
      if (best.trip_time > trip_time)
        lo = mid;
      else
        hi = mid;
    }
    return best;
  }

  SpeedProfile slowest = sim.run(opts.floor_speed, 0.0);
  if (trip_time > slowest.trip_time + opts.time_tol) {
    std::ostringstream os;
    os << "trip time " << trip_time
       << " s requires a hold speed below the admissible floor ("
       << slowest.trip_time << " s at the floor)";
    throw InfeasibleError(os.str());
  }
  double lo = opts.floor_speed, hi = v_cap;
  SpeedProfile best = full_coast;
  for (int i = 0; i < 60 && std::abs(best.trip_time - trip_time) >
                                opts.time_tol * 0.5; ++i) {
    double mid = 0.5 * (lo + hi);
    best = sim.run(mid, 0.0);
    if (best.trip_time > trip_time)
      lo = mid;
    else
      hi = mid;
  }
  return best;
}

double minimal_trip_time(double track_length,
                         const std::vector<SegmentSpeedLimit>& limits,
                         const TrainPhysics& physics, const SimOptions& opts) {
  LimitTable lim(track_length, limits);
  BrakeTable brake(lim, physics, opts.dt, lim.min_limit_ms + 5.0);
  Simulator sim{lim, brake, physics, opts.dt};
  double v_cap = std::min(
      lim.min_limit_ms,
      geometric_speed_cap(lim, brake, physics, opts.dt, lim.min_limit_ms));
  if (v_cap < opts.floor_speed)
    throw InfeasibleError("track too short for the configured floor speed");
  return sim.run(v_cap, brake.brake_onset(v_cap)).trip_time;
}

std::pair<double, double> energy_of_profile(const SpeedProfile& profile,
                                            const TrainPhysics&) {
  double consumed = 0, regenerated = 0;
  for (std::size_t i = 1; i < profile.samples.size(); ++i) {
    const auto& a = profile.samples[i - 1];
    const auto& b = profile.samples[i];
    double w = b.t - a.t;
    consumed += 0.5 * w * (std::max(a.power, 0.0) + std::max(b.power, 0.0));
    regenerated += 0.5 * w * (std::max(-a.power, 0.0) + std::max(-b.power, 0.0));
  }
  return {consumed, regenerated};
}

PowerGraph power_graph(const SpeedProfile& profile) {
  PowerGraph g;
  for (const auto& s : profile.samples) {
    if (s.power >= 0) {
      g.consumption_samples.push_back({s.t, s.power});
      g.peak_consumption = std::max(g.peak_consumption, s.power);
    } else {
      g.regeneration_samples.push_back({s.t, -s.power});
      g.peak_regeneration = std::max(g.peak_regeneration, -s.power);
    }
  }
  return g;
}

std::vector<std::pair<double, double>> sample_energy_curve(
    double track_length, const std::vector<SegmentSpeedLimit>& limits,
    const TrainPhysics& physics, TimeWindow window, double step,
    const SimOptions& opts) {
  if (step <= 0) throw InputError("sample step must be positive");
  std::vector<std::pair<double, double>> out;
  for (double tt = (double)window.lower; tt <= (double)window.upper + 1e-9;
       tt += step) {
    auto prof = simulate_profile(track_length, limits, physics, tt, opts);
    auto [consumed, regen] = energy_of_profile(prof, physics);
    (void)regen;
    if (!out.empty() && consumed > out.back().second * 1.001)
      throw SolverError("energy curve is not nonincreasing in trip time");
    out.push_back({tt, consumed});
  }
  return out;
}

}  // namespace metro
