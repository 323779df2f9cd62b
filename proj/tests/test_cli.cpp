#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const std::string kCli = METRO_CLI_PATH;

struct Workspace {
  fs::path dir;

  Workspace() {
    dir = fs::temp_directory_path() /
          ("metro_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }

  std::string path(const std::string& name) const {
    return (dir / name).string();
  }
};

int run(const std::string& args, const std::string& stdout_file = "") {
  std::string cmd = kCli + " " + args;
  if (!stdout_file.empty()) cmd += " > " + stdout_file;
  cmd += " 2>/dev/null";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string instance_args(const Workspace& ws, const std::string& sub,
                          bool with_seed = true) {
  std::string a = " --network " + ws.path(sub + "/network.txt") +
                  " --limits " + ws.path(sub + "/limits.txt") + " --physics " +
                  ws.path(sub + "/physics.txt");
  if (with_seed) a += " --seed " + ws.path(sub + "/seed_timetable.txt");
  return a;
}

int generate(const Workspace& ws, const std::string& sub, unsigned rng_seed) {
  return run("generate --stations 4 --trains 4 --headway 300 --rng-seed " +
                 std::to_string(rng_seed) + " --out-dir " + ws.path(sub),
             "/dev/null");
}

}  // namespace

TEST_CASE("generate, validate and run form a working pipeline") {
  Workspace ws;
  REQUIRE(generate(ws, "inst", 1) == 0);
  for (const char* f :
       {"network.txt", "limits.txt", "physics.txt", "seed_timetable.txt"})
    CHECK(fs::exists(ws.dir / "inst" / f));

  CHECK(run("validate" + instance_args(ws, "inst"),
            ws.path("validate.out")) == 0);
  CHECK(slurp(ws.path("validate.out")).find("valid:") != std::string::npos);

  int rc = run("run" + instance_args(ws, "inst") + " --out-dir " +
                   ws.path("out"),
               ws.path("run.out"));
  CHECK(rc == 0);
  std::string summary = slurp(ws.path("run.out"));
  CHECK(summary.find("reduction") != std::string::npos);
  for (const char* f : {"emt_timetable.txt", "final_timetable.txt",
                        "final_timetable_exact.txt", "fit_summary.csv",
                        "pairs.csv", "sync_report.csv", "energy_report.csv",
                        "manifest.json"})
    CHECK(fs::exists(ws.dir / "out" / f));
}

TEST_CASE("the pipeline is deterministic end to end") {
  Workspace ws;
  REQUIRE(generate(ws, "a", 42) == 0);
  REQUIRE(generate(ws, "b", 42) == 0);
  for (const char* f : {"network.txt", "limits.txt", "seed_timetable.txt"})
    CHECK(slurp(ws.path(std::string("a/") + f)) ==
          slurp(ws.path(std::string("b/") + f)));

  REQUIRE(run("run" + instance_args(ws, "a") + " --out-dir " + ws.path("oa"),
              "/dev/null") == 0);
  REQUIRE(run("run" + instance_args(ws, "b") + " --out-dir " + ws.path("ob"),
              "/dev/null") == 0);
  CHECK(slurp(ws.path("oa/final_timetable.txt")) ==
        slurp(ws.path("ob/final_timetable.txt")));
  CHECK(slurp(ws.path("oa/emt_timetable.txt")) ==
        slurp(ws.path("ob/emt_timetable.txt")));
}

TEST_CASE("step1 and step2 chain through files") {
  Workspace ws;
  REQUIRE(generate(ws, "inst", 3) == 0);
  CHECK(run("step1" + instance_args(ws, "inst") + " --out " +
                ws.path("emt.txt"),
            "/dev/null") == 0);
  CHECK(fs::exists(ws.path("emt.txt")));
  int rc = run("step2" + instance_args(ws, "inst") + " --emt " +
                   ws.path("emt.txt") + " --out-dir " + ws.path("s2"),
               ws.path("s2.json"));
  CHECK(rc == 0);
  CHECK(fs::exists(ws.path("s2/final_timetable.txt")));
  std::string j = slurp(ws.path("s2.json"));
  CHECK(j.find("\"rounded_feasible\": true") != std::string::npos);

  CHECK(run("evaluate" + instance_args(ws, "inst") + " --emt " +
                ws.path("emt.txt") + " --final " +
                ws.path("s2/final_timetable.txt"),
            ws.path("eval.json")) == 0);
  CHECK(slurp(ws.path("eval.json")).find("reduction_fraction") !=
        std::string::npos);
}

TEST_CASE("simulate reports the profile as JSON and CSV") {
  Workspace ws;
  REQUIRE(generate(ws, "inst", 5) == 0);
  // Find a track key and a feasible trip time from the generated network.
  std::string network = slurp(ws.path("inst/network.txt"));
  std::istringstream in(network);
  std::string line, track_key, lo, hi;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "trip_window") {
      ls >> track_key >> lo >> hi;
      break;
    }
  }
  REQUIRE(!track_key.empty());
  int rc = run("simulate" + instance_args(ws, "inst", false) + " --track " +
                   track_key + " --trip-time " + hi + " --out " +
                   ws.path("profile.csv"),
               ws.path("sim.json"));
  CHECK(rc == 0);
  std::string j = slurp(ws.path("sim.json"));
  CHECK(j.find("trip_time_s") != std::string::npos);
  CHECK(j.find("consumed_j") != std::string::npos);
  std::string csv = slurp(ws.path("profile.csv"));
  CHECK(csv.rfind("t,pos,speed,net_accel,power\n", 0) == 0);
}

TEST_CASE("input problems exit with code 1") {
  Workspace ws;
  REQUIRE(generate(ws, "inst", 1) == 0);
  // Missing file.
  CHECK(run("validate --network " + ws.path("missing.txt") + " --limits " +
                ws.path("inst/limits.txt") + " --physics " +
                ws.path("inst/physics.txt") + " --seed " +
                ws.path("inst/seed_timetable.txt"),
            "/dev/null") == 1);
  // Corrupt network text.
  std::ofstream(ws.path("broken.txt")) << "platform only-two\n";
  CHECK(run("validate --network " + ws.path("broken.txt") + " --limits " +
                ws.path("inst/limits.txt") + " --physics " +
                ws.path("inst/physics.txt") + " --seed " +
                ws.path("inst/seed_timetable.txt"),
            "/dev/null") == 1);
}

TEST_CASE("a window violation in the seed exits with code 2") {
  Workspace ws;
  REQUIRE(generate(ws, "inst", 1) == 0);
  // Push the first arrival far ahead of its departure: the dwell window
  // cannot absorb that.
  std::istringstream in(slurp(ws.path("inst/seed_timetable.txt")));
  std::ostringstream out;
  std::string train, plat, arr, dep;
  bool first = true;
  while (in >> train >> plat >> arr >> dep) {
    if (first) {
      arr = std::to_string(std::stoll(dep) + 500);
      first = false;
    }
    out << train << ' ' << plat << ' ' << arr << ' ' << dep << '\n';
  }
  std::ofstream(ws.path("bad_seed.txt")) << out.str();
  CHECK(run("validate --network " + ws.path("inst/network.txt") +
                " --limits " + ws.path("inst/limits.txt") + " --physics " +
                ws.path("inst/physics.txt") + " --seed " +
                ws.path("bad_seed.txt"),
            "/dev/null") == 2);
}
