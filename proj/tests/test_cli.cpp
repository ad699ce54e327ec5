// Exercises the installed command-line contract: subcommands, file formats,
// exit codes (0 ok, 1 infeasible, 2 input error, 3 internal error).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#ifndef MRPLAN_CLI_PATH
#error "MRPLAN_CLI_PATH must point at the built binary"
#endif

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  std::string cmd = std::string(MRPLAN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("mrplan_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

const char* kProblem = R"({
  "catalog": [
    {"id": "duo", "containers": 2, "sigma_per_hour": 0.05, "pi_per_hour": 0.1}
  ],
  "classes": [
    {
      "id": "c",
      "h_users": 1,
      "think_time_ms": 5000,
      "deadline_ms": 1000,
      "eta": 0.0,
      "profiles": {
        "duo": {
          "n_map": 4, "n_reduce": 2,
          "map_avg_ms": 100, "reduce_avg_ms": 150, "shuffle_typ_avg_ms": 50
        }
      }
    }
  ]
})";

const char* kNetwork = R"({
  "h_users": 1, "think_time_ms": 1000, "n_map": 4, "n_reduce": 2,
  "map_service": {"kind": "deterministic", "mean_ms": 100},
  "reduce_service": {"kind": "deterministic", "mean_ms": 200},
  "capacity": 2,
  "sim": {"seed": 7, "warmup_jobs": 10, "batch_size": 10, "max_batches": 5}
})";

}  // namespace

TEST_CASE("optimize: happy path and determinism") {
  TempDir dir;
  auto input = dir.path / "problem.json";
  std::ofstream(input) << kProblem;
  auto out1 = dir.path / "sol1.json";
  auto out2 = dir.path / "sol2.json";

  std::string base = "optimize --input " + input.string() + " --seed 42";
  CHECK(run(base + " --output " + out1.string()) == 0);
  CHECK(run(base + " --output " + out2.string()) == 0);
  std::string s1 = slurp(out1);
  CHECK(s1 == slurp(out2));
  CHECK(s1.find("\"status\": \"ok\"") != std::string::npos);
  CHECK(s1.find("\"seed\": 42") != std::string::npos);
}

TEST_CASE("optimize: partial solutions exit 1") {
  TempDir dir;
  auto input = dir.path / "problem.json";
  std::string doc(kProblem);
  auto pos = doc.find("\"deadline_ms\": 1000");
  doc.replace(pos, 19, "\"deadline_ms\": 10");  // below the single-job floor
  std::ofstream(input) << doc;
  auto out = dir.path / "sol.json";
  CHECK(run("optimize --input " + input.string() + " --output " + out.string() +
            " --evaluator analytic") == 1);
  CHECK(slurp(out).find("\"status\": \"partial\"") != std::string::npos);
}

TEST_CASE("optimize: input errors exit 2") {
  TempDir dir;
  auto out = (dir.path / "sol.json").string();

  auto bad_json = dir.path / "bad.json";
  std::ofstream(bad_json) << "{ not json";
  CHECK(run("optimize --input " + bad_json.string() + " --output " + out) == 2);

  auto bad_schema = dir.path / "schema.json";
  std::string doc(kProblem);
  auto pos = doc.find("\"deadline_ms\": 1000");
  doc.replace(pos, 19, "\"deadline_ms\": 0");
  std::ofstream(bad_schema) << doc;
  CHECK(run("optimize --input " + bad_schema.string() + " --output " + out) == 2);

  CHECK(run("optimize --input " + (dir.path / "absent.json").string() +
            " --output " + out) == 2);
}

TEST_CASE("optimize: strict mode rejects unknown fields") {
  TempDir dir;
  auto input = dir.path / "problem.json";
  std::string doc(kProblem);
  doc.insert(doc.find("\"catalog\""), "\"mystery\": 1,\n  ");
  std::ofstream(input) << doc;
  auto out = (dir.path / "sol.json").string();
  CHECK(run("optimize --input " + input.string() + " --output " + out +
            " --strict") == 2);
  CHECK(run("optimize --input " + input.string() + " --output " + out) == 0);
}

TEST_CASE("simulate: estimate and trace") {
  TempDir dir;
  auto input = dir.path / "network.json";
  std::ofstream(input) << kNetwork;
  auto trace = dir.path / "trace.tsv";
  CHECK(run("simulate --input " + input.string() + " --trace " +
            trace.string()) == 0);
  std::string t = slurp(trace);
  CHECK(t.find('\t') != std::string::npos);
  CHECK(t.find("submit") != std::string::npos);
  CHECK(t.find("job_complete") != std::string::npos);
}

TEST_CASE("sweep: CSV with the contractual header") {
  TempDir dir;
  auto input = dir.path / "problem.json";
  std::ofstream(input) << kProblem;
  auto out = dir.path / "sweep.csv";
  CHECK(run("sweep --input " + input.string() +
            " --axis deadline --class c --values 400,800,1600 --output " +
            out.string() + " --evaluator analytic") == 0);
  std::string csv = slurp(out);
  CHECK(csv.rfind("axis_value,vm_type,vms,reserved,spot,hourly_cost,"
                  "predicted_time_ms,feasible\n",
                  0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("validate: CSV of relative errors") {
  TempDir dir;
  auto input = dir.path / "rows.json";
  std::ofstream(input) << R"({
    "rows": [
      {"label": "r1", "measured_t_ms": 400, "network": )" << kNetwork << R"(},
      {"label": "r2", "measured_t_ms": 500, "network": )" << kNetwork << R"(}
    ]
  })";
  auto out = dir.path / "validate.csv";
  CHECK(run("validate --input " + input.string() + " --output " +
            out.string()) == 0);
  std::string csv = slurp(out);
  CHECK(csv.rfind("label,measured_t_ms,simulated_tau_ms,theta_percent\n", 0) == 0);
  CHECK(csv.find("r1,400,400,0\n") != std::string::npos);
  CHECK(csv.find("r2,500,400,-20\n") != std::string::npos);
}
