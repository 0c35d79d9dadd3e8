#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code;
  std::string output;  // stdout and stderr combined
};

CliResult run_cli(const std::string& args) {
  const auto dir = fs::temp_directory_path() / "fluxlat_cli_tests";
  fs::create_directories(dir);
  const auto capture = dir / "capture.txt";
  const std::string command =
      std::string(FLUXLAT_BIN) + " " + args + " > " + capture.string() + " 2>&1";
  const int status = std::system(command.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(capture);
  std::stringstream ss;
  ss << in.rdbuf();
  result.output = ss.str();
  return result;
}

fs::path write_config(const std::string& name, const std::string& text) {
  const auto dir = fs::temp_directory_path() / "fluxlat_cli_tests";
  fs::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << text;
  return path;
}

fs::path out_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "fluxlat_cli_tests" / name;
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("sector-count from flags alone") {
  const auto out = out_dir("sector");
  const auto res = run_cli("sector-count --lx 2 --ly 2 --trunc 1 --out " + out.string());
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("gauss sector states: 3") != std::string::npos);
  CHECK(fs::exists(out / "run.json"));
}

TEST_CASE("validate flags an odd-separation pair in the microscopic convention") {
  const auto config = write_config("charges_odd.json", R"({
    "lattice": {"lx": 4, "ly": 3},
    "coupling": {"lambda": 1.0, "mu": 0.001, "omega": 0.01},
    "charges": {"convention": "delta",
                "list": [{"m": 0, "n": 1, "q": 1}, {"m": 1, "n": 1, "q": 1}]},
    "experiment": {"kind": "stagger-check"}
  })");
  const auto res = run_cli("validate --config " + config.string());
  CHECK(res.exit_code == 1);
  CHECK(res.output.find("sublattice") != std::string::npos);
}

TEST_CASE("validate accepts a well-formed config") {
  const auto config = write_config("good.json", R"({
    "lattice": {"lx": 5, "ly": 3, "trunc": 2},
    "coupling": {"g2": 10.0},
    "experiment": {"kind": "potential", "r_list": [2, 4]}
  })");
  const auto res = run_cli("validate --config " + config.string());
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("configuration OK") != std::string::npos);
}

TEST_CASE("potential run writes the pinned csv header") {
  const auto config = write_config("pot.json", R"({
    "lattice": {"lx": 4, "ly": 3, "trunc": 1},
    "experiment": {"kind": "potential", "r_list": [2]}
  })");
  const auto out = out_dir("potential");
  const auto res = run_cli("potential --config " + config.string() + " --g2 10 --out " +
                           out.string());
  CHECK(res.exit_code == 0);
  std::ifstream csv(out / "potential.csv");
  REQUIRE(csv);
  std::string header;
  std::getline(csv, header);
  CHECK(header == "R,E_charged,E_vacuum,V,V_strong,rel_dev");
  CHECK(fs::exists(out / "run.json"));
}

TEST_CASE("odd separation fails with the parity diagnostic and exit 1") {
  const auto out = out_dir("odd");
  const auto res = run_cli("potential --lx 5 --ly 3 --trunc 1 --g2 10 --r-list 3 --out " +
                           out.string());
  CHECK(res.exit_code == 1);
  CHECK(res.output.find("odd") != std::string::npos);
}

TEST_CASE("conflicting coupling forms exit 1") {
  const auto config = write_config("conflict.json", R"({
    "lattice": {"lx": 2, "ly": 2},
    "coupling": {"g2": 10.0},
    "experiment": {"kind": "ground-state"}
  })");
  const auto res = run_cli("ground-state --config " + config.string() + " --omega 0.1");
  CHECK(res.exit_code == 1);
  CHECK(res.output.find("coupling") != std::string::npos);
}

TEST_CASE("capacity failures exit 2") {
  const auto config = write_config("capacity.json", R"({
    "lattice": {"lx": 4, "ly": 4, "trunc": 2},
    "coupling": {"g2": 10.0},
    "experiment": {"kind": "ground-state"},
    "solver": {"max_states": 10}
  })");
  const auto out = out_dir("capacity");
  const auto res = run_cli("ground-state --config " + config.string() + " --out " + out.string());
  CHECK(res.exit_code == 2);
}

TEST_CASE("missing config file exits 3") {
  const auto res = run_cli("ground-state --config /nonexistent/nowhere.json");
  CHECK(res.exit_code == 3);
}

TEST_CASE("config kind must agree with the subcommand") {
  const auto config = write_config("kind.json", R"({
    "lattice": {"lx": 2, "ly": 2},
    "coupling": {"g2": 10.0},
    "experiment": {"kind": "potential"}
  })");
  const auto res = run_cli("ground-state --config " + config.string());
  CHECK(res.exit_code == 1);
  CHECK(res.output.find("conflicts") != std::string::npos);
}

TEST_CASE("regime refusal and override") {
  const auto config = write_config("regime.json", R"({
    "lattice": {"lx": 2, "ly": 2, "trunc": 1},
    "coupling": {"lambda": 1.0, "mu": 0.0001, "omega": 0.1},
    "experiment": {"kind": "effective-compare"}
  })");
  const auto res = run_cli("effective-compare --config " + config.string());
  CHECK(res.exit_code == 1);
  CHECK(res.output.find("regime") != std::string::npos);

  const auto out = out_dir("regime");
  const auto forced = run_cli("effective-compare --config " + config.string() +
                              " --force-regime --out " + out.string());
  CHECK(forced.exit_code == 0);
}
