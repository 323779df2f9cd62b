#ifndef METRO_PIPELINE_HPP
#define METRO_PIPELINE_HPP

#include <filesystem>

#include "metro/energy_eval.hpp"
#include "metro/step_one.hpp"
#include "metro/step_two.hpp"

namespace metro {

struct PipelineConfig {
  std::filesystem::path network_file;
  std::filesystem::path limits_file;
  std::filesystem::path physics_file;
  std::filesystem::path seed_file;
  std::filesystem::path out_dir = ".";
  Seconds pairing_radius = 120;
  double fit_step = 1.0;       // s between energy-curve samples
  double integration_step = 0.1;
};

struct PipelineResult {
  int trains = 0;
  int platforms = 0;
  int records = 0;
  int step1_rows = 0, step1_vars = 0;
  int step2_rows = 0, step2_vars = 0;
  long step1_iterations = 0, step2_iterations = 0;
  double step1_ms = 0, step2_ms = 0;
  double fit_mean_r2 = 0;
  double step1_objective = 0, step2_objective = 0;
  int pairs = 0;
  double seed_l1 = 0, final_l1 = 0;
  double seed_effective_j = 0, final_effective_j = 0;
  double reduction_fraction = 0;
  double emt_consumed_j = 0, final_consumed_j = 0;
  bool rounded_ok = false;
};

// In-memory run over already loaded data; used by the CLI and the tests.
struct PipelineData {
  Network net;
  Timetable seed;
  TrainPhysics physics;
  std::map<int, std::vector<SegmentSpeedLimit>> limits;
};

struct PipelineArtifacts {
  StepOneResult step1;
  StepTwoResult step2;
  FitSummary fit;
  std::vector<SyncPair> pairs;
  OffsetTable offsets;
  EffectiveEnergyReport energy;
  PipelineResult summary;
};

PipelineArtifacts run_pipeline_data(const PipelineData& data,
                                    Seconds pairing_radius = 120,
                                    double fit_step = 1.0,
                                    const SimOptions& sim = {});

// File-based full run: loads the four inputs, runs both steps and writes
// every artifact plus manifest.json into out_dir.
PipelineResult run_pipeline(const PipelineConfig& config);

void write_artifacts(const PipelineData& data, const PipelineArtifacts& art,
                     const std::filesystem::path& out_dir);

}  // namespace metro

#endif  // METRO_PIPELINE_HPP
