#ifndef METRO_PROFILE_SIM_HPP
#define METRO_PROFILE_SIM_HPP

#include <array>
#include <string>
#include <vector>

#include "metro/network.hpp"

namespace metro {

struct TrainPhysics {
  std::string id;
  double mass_kg = 295445.0;
  // Davis resistance in per-mass form: r(v) = a0 + a1 v + a2 v^2  [m/s^2]
  double davis_a0 = 0.013;
  double davis_a1 = 0.00045;
  double davis_a2 = 0.00002;
  double max_accel = 1.04;         // m/s^2
  double coast_decel = -0.2;       // m/s^2, magnitude cap while coasting
  double max_brake_decel = -0.8;   // m/s^2
  double eta_elec_to_kin = 0.9;
  double eta_kin_to_regen = 0.76;
  double transmission_loss = 0.1;

  double resistance(double v) const {
    return davis_a0 + davis_a1 * v + davis_a2 * v * v;
  }
};

struct SegmentSpeedLimit {
  int track = -1;
  double start_m = 0;
  double end_m = 0;
  double limit_kmh = 0;
  double grade_deg = 0;
};

struct ProfileSample {
  double t = 0;          // s since departure
  double pos = 0;        // m
  double speed = 0;      // m/s
  double net_accel = 0;  // m/s^2
  double power = 0;      // W, + electrical consumption, - regeneration
};

enum class Phase { Accelerate = 0, Hold = 1, Coast = 2, Brake = 3 };

struct SpeedProfile {
  double trip_time = 0;
  std::vector<ProfileSample> samples;
  // [start,end] times of the accel, hold, coast and brake phases.
  std::array<std::pair<double, double>, 4> phase_bounds{};

  double phase_duration(Phase p) const {
    auto [a, b] = phase_bounds[(int)p];
    return b - a;
  }
};

struct PowerGraph {
  std::vector<std::pair<double, double>> consumption_samples;
  std::vector<std::pair<double, double>> regeneration_samples;
  double peak_consumption = 0;
  double peak_regeneration = 0;
};

struct SimOptions {
  double dt = 0.1;            // integration step, s
  double time_tol = 0.1;      // trip-time targeting tolerance, s
  double floor_speed = 1.0;   // minimum admissible hold speed, m/s
};

// Four-phase profile (max accel, hold, coast, max brake) hitting the given
// trip time. `limits` must cover [0, track_length].
SpeedProfile simulate_profile(double track_length,
                              const std::vector<SegmentSpeedLimit>& limits,
                              const TrainPhysics& physics, double trip_time,
                              const SimOptions& opts = {});

// Fastest trip time achievable by the four-phase strategy.
double minimal_trip_time(double track_length,
                         const std::vector<SegmentSpeedLimit>& limits,
                         const TrainPhysics& physics,
                         const SimOptions& opts = {});

// (consumed J, regenerated J) by composite trapezoid over the samples.
std::pair<double, double> energy_of_profile(const SpeedProfile& profile,
                                            const TrainPhysics& physics);

PowerGraph power_graph(const SpeedProfile& profile);

// One (trip_time, consumed J) sample per `step` across the window.
std::vector<std::pair<double, double>> sample_energy_curve(
    double track_length, const std::vector<SegmentSpeedLimit>& limits,
    const TrainPhysics& physics, TimeWindow window, double step,
    const SimOptions& opts = {});

}  // namespace metro

#endif  // METRO_PROFILE_SIM_HPP
