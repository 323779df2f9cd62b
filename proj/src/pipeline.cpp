#include "metro/pipeline.hpp"

#include <chrono>
#include <fstream>

#include "json.hpp"
#include "metro/io.hpp"

namespace metro {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream os(p);
  if (!os) throw InputError("cannot write " + p.string());
  return os;
}

}  // namespace

PipelineArtifacts run_pipeline_data(const PipelineData& data,
                                    Seconds pairing_radius, double fit_step,
                                    const SimOptions& sim) {
  auto violations = validate(data.net);
  if (!violations.empty())
    throw InputError("invalid network: " + violations.front().reason + " (" +
                     violations.front().subject + ")");

  auto records = enumerate_constraints(data.net, data.seed);
  auto graph = build_graph(data.net, records);

  PipelineArtifacts art;
  art.fit = fit_all_trips(data.net, data.limits, data.physics, fit_step, sim);

  auto t0 = std::chrono::steady_clock::now();
  art.step1 = solve_emt(data.net, records, graph, art.fit, data.seed);
  art.summary.step1_ms = ms_since(t0);

  art.offsets = compute_offsets(data.net, art.step1.emt, data.limits,
                                data.physics, sim);
  art.pairs =
      closest_partners(data.net, art.step1.emt, art.offsets, pairing_radius);

  auto lp2 = build_step_two_lp(data.net, graph, art.step1.emt, art.pairs,
                               art.offsets);
  t0 = std::chrono::steady_clock::now();
  art.step2 = solve_final(data.net, records, lp2, art.step1.emt);
  art.summary.step2_ms = ms_since(t0);

  std::vector<double> seed_times(data.net.n_events);
  for (int i = 0; i < data.net.n_events; ++i)
    seed_times[i] = (double)data.seed[i];
  SyncReport seed_report = misalignment_report(lp2, seed_times);

  art.energy = compare(data.net, data.seed, art.step2.final_tt, art.pairs,
                       data.limits, data.physics, sim);

  PipelineResult& s = art.summary;
  s.trains = (int)data.net.trains.size();
  s.platforms = (int)data.net.platforms.size();
  s.records = (int)records.size();
  s.step1_rows = art.step1.n_rows;
  s.step1_vars = art.step1.n_vars;
  s.step2_rows = art.step2.n_rows;
  s.step2_vars = art.step2.n_vars;
  s.step1_iterations = art.step1.iterations;
  s.step2_iterations = art.step2.iterations;
  s.fit_mean_r2 = art.fit.mean_r_squared;
  s.step1_objective = art.step1.objective;
  s.step2_objective = art.step2.objective;
  s.pairs = (int)art.pairs.size();
  s.seed_l1 = seed_report.total_l1;
  s.final_l1 = art.step2.report.total_l1;
  s.seed_effective_j = art.energy.baseline_total;
  s.final_effective_j = art.energy.total_effective;
  s.reduction_fraction = art.energy.reduction_fraction;
  s.emt_consumed_j = total_consumed_energy(data.net, art.step1.emt,
                                           data.limits, data.physics, sim);
  s.final_consumed_j = total_consumed_energy(data.net, art.step2.final_tt,
                                             data.limits, data.physics, sim);
  s.rounded_ok = art.step2.rounded_ok;
  return art;
}

void write_artifacts(const PipelineData& data, const PipelineArtifacts& art,
                     const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    auto os = open_out(out_dir / "emt_timetable.txt");
    save_timetable(data.net, art.step1.emt, os);
  }
  {
    auto os = open_out(out_dir / "final_timetable.txt");
    save_timetable(data.net, art.step2.final_tt, os);
  }
  {
    auto os = open_out(out_dir / "final_timetable_exact.txt");
    save_exact_timetable(data.net, art.step2.exact, os);
  }
  {
    auto os = open_out(out_dir / "fit_summary.csv");
    os << "track,c,b,r_squared,n_samples\n";
    for (const auto& [tk, m] : art.fit.by_track)
      os << data.net.tracks[tk].key << ',' << m.c << ',' << m.b << ','
         << m.r_squared << ',' << m.n_samples << "\n";
  }
  {
    auto os = open_out(out_dir / "pairs.csv");
    export_pairs_csv(data.net, art.pairs, art.offsets, os);
  }
  {
    auto os = open_out(out_dir / "sync_report.csv");
    os << "pair,misalignment\n";
    for (std::size_t i = 0; i < art.step2.report.misalignment.size(); ++i)
      os << i << ',' << art.step2.report.misalignment[i] << "\n";
  }
  {
    auto os = open_out(out_dir / "energy_report.csv");
    os << "pair,effective_before_j,effective_after_j\n";
    for (std::size_t i = 0; i < art.energy.per_pair_before.size(); ++i)
      os << i << ',' << art.energy.per_pair_before[i] << ','
         << art.energy.per_pair_after[i] << "\n";
  }
  {
    const PipelineResult& s = art.summary;
    nlohmann::json j{
        {"trains", s.trains},
        {"platforms", s.platforms},
        {"constraint_records", s.records},
        {"step1", {{"rows", s.step1_rows},
                   {"vars", s.step1_vars},
                   {"iterations", s.step1_iterations},
                   {"solve_ms", s.step1_ms},
                   {"objective", s.step1_objective}}},
        {"step2", {{"rows", s.step2_rows},
                   {"vars", s.step2_vars},
                   {"iterations", s.step2_iterations},
                   {"solve_ms", s.step2_ms},
                   {"objective", s.step2_objective},
                   {"rounded_feasible", s.rounded_ok}}},
        {"fit_mean_r_squared", s.fit_mean_r2},
        {"sync_pairs", s.pairs},
        {"l1_misalignment", {{"seed", s.seed_l1}, {"final", s.final_l1}}},
        {"effective_energy_j",
         {{"seed", s.seed_effective_j},
          {"final", s.final_effective_j},
          {"reduction_fraction", s.reduction_fraction}}},
        {"consumed_energy_j",
         {{"emt", s.emt_consumed_j}, {"final", s.final_consumed_j}}},
    };
    auto os = open_out(out_dir / "manifest.json");
    os << j.dump(2) << "\n";
  }
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  PipelineData data;
  data.net = load_network_file(config.network_file);
  data.physics = load_physics_file(config.physics_file);
  data.limits = load_limits_file(config.limits_file, data.net);
  data.seed = load_timetable_file(config.seed_file, data.net, Provenance::Seed);

  SimOptions sim;
  sim.dt = config.integration_step;
  auto art = run_pipeline_data(data, config.pairing_radius, config.fit_step,
                               sim);
  write_artifacts(data, art, config.out_dir);
  return art.summary;
}

}  // namespace metro
