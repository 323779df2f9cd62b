#ifndef METRO_IO_HPP
#define METRO_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <map>

#include "metro/network.hpp"
#include "metro/profile_sim.hpp"

namespace metro {

// Line-oriented keyword format, '#' comments. Keywords:
//   horizon S
//   platform ID STATION LINE
//   track FROM TO LENGTH_M
//   crossover FROM TO LENGTH_M
//   train ID PHYSICS PLATFORM...
//   trip_window FROM-TO LO HI
//   dwell_window PLATFORM LO HI
//   total_window TRAIN LO HI
//   turnaround FROM-TO TRAIN_FROM TRAIN_TO LO HI
//   connection PLAT_I PLAT_J TRAIN_FROM TRAIN_TO LO HI
//   headway FROM-TO TRAIN_A TRAIN_B DEP_LO DEP_HI ARR_LO ARR_HI
//   xheadway FROM-TO A A2 B B2 DEP_LO DEP_HI ARR_LO ARR_HI
//   opposite PLAT_I PLAT_J
Network load_network(std::istream& in);
Network load_network_file(const std::filesystem::path& path);
void save_network(const Network& net, std::ostream& os);

// "key value" lines matching the TrainPhysics field names.
TrainPhysics load_physics(std::istream& in);
TrainPhysics load_physics_file(const std::filesystem::path& path);
void save_physics(const TrainPhysics& ph, std::ostream& os);

// "FROM-TO START_M END_M LIMIT_KMH [GRADE_DEG]" per segment.
std::map<int, std::vector<SegmentSpeedLimit>> load_limits(std::istream& in,
                                                          const Network& net);
std::map<int, std::vector<SegmentSpeedLimit>> load_limits_file(
    const std::filesystem::path& path, const Network& net);
void save_limits(const Network& net,
                 const std::map<int, std::vector<SegmentSpeedLimit>>& limits,
                 std::ostream& os);

// "TRAIN PLATFORM ARRIVAL DEPARTURE" per dwell, chronological per train.
Timetable load_timetable(std::istream& in, const Network& net,
                         Provenance prov);
Timetable load_timetable_file(const std::filesystem::path& path,
                              const Network& net, Provenance prov);
void save_timetable(const Network& net, const Timetable& tt, std::ostream& os);
// Same layout with fractional seconds, for the exact step-two optimum.
void save_exact_timetable(const Network& net,
                          const std::vector<double>& event_times,
                          std::ostream& os);

}  // namespace metro

#endif  // METRO_IO_HPP
