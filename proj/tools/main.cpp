#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "metro/generator.hpp"
#include "metro/io.hpp"
#include "metro/pipeline.hpp"

namespace {

struct InputPaths {
  std::string network, limits, physics, seed;
};

void add_network_options(CLI::App* cmd, InputPaths& in, bool with_seed) {
  cmd->add_option("--network", in.network, "network file")->required();
  cmd->add_option("--limits", in.limits, "speed-limit file")->required();
  cmd->add_option("--physics", in.physics, "train physics file")->required();
  if (with_seed)
    cmd->add_option("--seed", in.seed, "seed timetable file")->required();
}

metro::PipelineData load_inputs(const InputPaths& in, bool with_seed) {
  metro::PipelineData d;
  d.net = metro::load_network_file(in.network);
  d.physics = metro::load_physics_file(in.physics);
  d.limits = metro::load_limits_file(in.limits, d.net);
  if (with_seed)
    d.seed = metro::load_timetable_file(in.seed, d.net,
                                        metro::Provenance::Seed);
  return d;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw metro::InputError("cannot write " + path);
  return os;
}

void print_summary(const metro::PipelineResult& s) {
  nlohmann::json j{
      {"trains", s.trains},
      {"constraint_records", s.records},
      {"step1_rows", s.step1_rows},
      {"step1_vars", s.step1_vars},
      {"step2_rows", s.step2_rows},
      {"step2_vars", s.step2_vars},
      {"fit_mean_r_squared", s.fit_mean_r2},
      {"sync_pairs", s.pairs},
      {"seed_l1", s.seed_l1},
      {"final_l1", s.final_l1},
      {"seed_effective_j", s.seed_effective_j},
      {"final_effective_j", s.final_effective_j},
      {"reduction_fraction", s.reduction_fraction},
      {"rounded_feasible", s.rounded_ok},
  };
  std::cout << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-step energy-efficient metro timetable compiler"};
  app.require_subcommand(1);

  InputPaths in;
  std::string out_dir = ".", out_file, track_key;
  double trip_time = 0, fit_step = 1.0, dt = 0.1;
  metro::Seconds radius = 120;
  metro::GeneratorConfig gen;

  auto* validate = app.add_subcommand("validate", "check network invariants");
  add_network_options(validate, in, true);

  auto* simulate = app.add_subcommand("simulate", "speed profile of one trip");
  add_network_options(simulate, in, false);
  simulate->add_option("--track", track_key, "track key FROM-TO")->required();
  simulate->add_option("--trip-time", trip_time, "target trip time, s")
      ->required();
  simulate->add_option("--dt", dt, "integration step, s");
  simulate->add_option("--out", out_file, "profile CSV path");

  auto* fit = app.add_subcommand("fit", "affine energy models per track");
  add_network_options(fit, in, false);
  fit->add_option("--fit-step", fit_step, "s between curve samples");
  fit->add_option("--dt", dt, "integration step, s");

  auto* step1 = app.add_subcommand("step1", "solve the energy-minimal LP");
  add_network_options(step1, in, true);
  step1->add_option("--out", out_file, "EMT timetable path")->required();
  step1->add_option("--fit-step", fit_step, "s between curve samples");
  step1->add_option("--dt", dt, "integration step, s");

  std::string emt_file, final_file;
  auto* step2 = app.add_subcommand("step2", "align pairs around a given EMT");
  add_network_options(step2, in, true);
  step2->add_option("--emt", emt_file, "EMT timetable path")->required();
  step2->add_option("--out-dir", out_dir, "artifact directory");
  step2->add_option("--radius", radius, "pairing radius r, s");
  step2->add_option("--dt", dt, "integration step, s");

  auto* evaluate = app.add_subcommand("evaluate",
                                      "effective energy of a timetable pair");
  add_network_options(evaluate, in, true);
  evaluate->add_option("--emt", emt_file, "EMT timetable path")->required();
  evaluate->add_option("--final", final_file, "final timetable path")
      ->required();
  evaluate->add_option("--radius", radius, "pairing radius r, s");
  evaluate->add_option("--dt", dt, "integration step, s");

  auto* run = app.add_subcommand("run", "full two-step pipeline");
  add_network_options(run, in, true);
  run->add_option("--out-dir", out_dir, "artifact directory");
  run->add_option("--radius", radius, "pairing radius r, s");
  run->add_option("--fit-step", fit_step, "s between curve samples");
  run->add_option("--dt", dt, "integration step, s");

  auto* generate = app.add_subcommand("generate", "synthetic test instance");
  generate->add_option("--stations", gen.stations, "stations per line");
  generate->add_option("--trains", gen.trains, "number of trains");
  generate->add_option("--headway", gen.headway, "service start separation, s");
  generate->add_option("--rng-seed", gen.rng_seed, "generator RNG seed");
  generate->add_flag("--shanghai", gen.shanghai, "line-8 sample topology");
  generate->add_flag("--second-order-headways", gen.second_order_headways,
                     "also constrain services two apart");
  generate->add_option("--out-dir", out_dir, "instance directory");

  CLI11_PARSE(app, argc, argv);

  try {
    metro::SimOptions sim;
    sim.dt = dt;
    if (validate->parsed()) {
      auto d = load_inputs(in, true);
      auto violations = metro::validate(d.net);
      for (const auto& v : violations)
        std::cerr << v.reason << ": " << v.subject << "\n";
      if (!violations.empty()) return 1;
      auto records = metro::enumerate_constraints(d.net, d.seed);
      std::cout << "valid: " << records.size() << " constraint records, "
                << d.net.n_events << " events\n";
    } else if (simulate->parsed()) {
      auto d = load_inputs(in, false);
      auto it = d.net.track_index.find(track_key);
      if (it == d.net.track_index.end())
        throw metro::InputError("unknown track " + track_key);
      int tk = it->second;
      auto prof = metro::simulate_profile(d.net.tracks[tk].length_m,
                                          d.limits.at(tk), d.physics,
                                          trip_time, sim);
      auto [consumed, regen] = metro::energy_of_profile(prof, d.physics);
      nlohmann::json j{{"trip_time_s", prof.trip_time},
                       {"consumed_j", consumed},
                       {"regenerated_j", regen}};
      for (int p = 0; p < 4; ++p)
        j["phase_s"].push_back(prof.phase_duration((metro::Phase)p));
      std::cout << j.dump(2) << "\n";
      if (!out_file.empty()) {
        auto os = open_out(out_file);
        os << "t,pos,speed,net_accel,power\n";
        for (const auto& s : prof.samples)
          os << s.t << ',' << s.pos << ',' << s.speed << ',' << s.net_accel
             << ',' << s.power << "\n";
      }
    } else if (fit->parsed()) {
      auto d = load_inputs(in, false);
      auto summary =
          metro::fit_all_trips(d.net, d.limits, d.physics, fit_step, sim);
      std::cout << "track,c,b,r_squared,n_samples\n";
      for (const auto& [tk, m] : summary.by_track)
        std::cout << d.net.tracks[tk].key << ',' << m.c << ',' << m.b << ','
                  << m.r_squared << ',' << m.n_samples << "\n";
      std::cerr << "mean r^2 " << summary.mean_r_squared << "\n";
    } else if (step1->parsed()) {
      auto d = load_inputs(in, true);
      auto records = metro::enumerate_constraints(d.net, d.seed);
      auto graph = metro::build_graph(d.net, records);
      auto fits =
          metro::fit_all_trips(d.net, d.limits, d.physics, fit_step, sim);
      auto res = metro::solve_emt(d.net, records, graph, fits, d.seed);
      auto os = open_out(out_file);
      metro::save_timetable(d.net, res.emt, os);
      std::cerr << "objective " << res.objective << ", " << res.iterations
                << " iterations\n";
    } else if (step2->parsed()) {
      auto d = load_inputs(in, true);
      auto emt = metro::load_timetable_file(emt_file, d.net,
                                            metro::Provenance::EMT);
      auto records = metro::enumerate_constraints(d.net, d.seed);
      auto graph = metro::build_graph(d.net, records);
      auto offsets =
          metro::compute_offsets(d.net, emt, d.limits, d.physics, sim);
      auto pairs = metro::closest_partners(d.net, emt, offsets, radius);
      auto lp = metro::build_step_two_lp(d.net, graph, emt, pairs, offsets);
      auto res = metro::solve_final(d.net, records, lp, emt);
      std::filesystem::create_directories(out_dir);
      {
        auto os = open_out(out_dir + "/final_timetable.txt");
        metro::save_timetable(d.net, res.final_tt, os);
      }
      {
        auto os = open_out(out_dir + "/final_timetable_exact.txt");
        metro::save_exact_timetable(d.net, res.exact, os);
      }
      nlohmann::json j{{"pairs", pairs.size()},
                       {"objective", res.objective},
                       {"total_l1", res.report.total_l1},
                       {"aligned", res.report.aligned_count},
                       {"rounded_feasible", res.rounded_ok}};
      std::cout << j.dump(2) << "\n";
    } else if (evaluate->parsed()) {
      auto d = load_inputs(in, true);
      auto emt = metro::load_timetable_file(emt_file, d.net,
                                            metro::Provenance::EMT);
      auto fin = metro::load_timetable_file(final_file, d.net,
                                            metro::Provenance::Final);
      auto offsets =
          metro::compute_offsets(d.net, emt, d.limits, d.physics, sim);
      auto pairs = metro::closest_partners(d.net, emt, offsets, radius);
      auto rep =
          metro::compare(d.net, d.seed, fin, pairs, d.limits, d.physics, sim);
      nlohmann::json j{{"pairs", pairs.size()},
                       {"seed_effective_j", rep.baseline_total},
                       {"final_effective_j", rep.total_effective},
                       {"reduction_fraction", rep.reduction_fraction}};
      std::cout << j.dump(2) << "\n";
    } else if (run->parsed()) {
      metro::PipelineConfig cfg;
      cfg.network_file = in.network;
      cfg.limits_file = in.limits;
      cfg.physics_file = in.physics;
      cfg.seed_file = in.seed;
      cfg.out_dir = out_dir;
      cfg.pairing_radius = radius;
      cfg.fit_step = fit_step;
      cfg.integration_step = dt;
      print_summary(metro::run_pipeline(cfg));
    } else if (generate->parsed()) {
      auto inst = metro::generate_instance(gen);
      std::filesystem::create_directories(out_dir);
      {
        auto os = open_out(out_dir + "/network.txt");
        metro::save_network(inst.net, os);
      }
      {
        auto os = open_out(out_dir + "/physics.txt");
        metro::save_physics(inst.physics, os);
      }
      {
        auto os = open_out(out_dir + "/limits.txt");
        metro::save_limits(inst.net, inst.limits, os);
      }
      {
        auto os = open_out(out_dir + "/seed_timetable.txt");
        metro::save_timetable(inst.net, inst.seed, os);
      }
      std::cout << "wrote instance with " << inst.net.trains.size()
                << " trains to " << out_dir << "\n";
    }
  } catch (const metro::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const metro::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const metro::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
