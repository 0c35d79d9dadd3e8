#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fluxlat/errors.hpp"
#include "fluxlat/experiments.hpp"

using namespace fluxlat;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "fluxlat_exp_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

json minimal_doc() {
  return json{{"lattice", {{"lx", 2}, {"ly", 2}}},
              {"coupling", {{"g2", 10.0}}},
              {"experiment", {{"kind", "ground-state"}}}};
}

}  // namespace

TEST_CASE("minimal config fills the documented defaults") {
  const auto cfg = parse_config(minimal_doc());
  CHECK(cfg.lx == 2);
  CHECK(cfg.boundary == Boundary::Open);
  CHECK(cfg.trunc == 2);
  CHECK(cfg.solver.tol == 1e-10);
  CHECK(cfg.solver.max_iter == 5000);
  CHECK(cfg.solver.k == 4);
  CHECK(cfg.kind == ExperimentKind::GroundState);
  CHECK(cfg.out_dir == "out");
  validate_config(cfg);
}

TEST_CASE("strict parsing rejects unknown keys and bad types") {
  auto doc = minimal_doc();
  doc["lattice"]["sizes"] = 4;
  CHECK_THROWS_AS(parse_config(doc), ValidationError);

  doc = minimal_doc();
  doc["typo"] = 1;
  CHECK_THROWS_AS(parse_config(doc), ValidationError);

  doc = minimal_doc();
  doc["lattice"]["lx"] = "five";
  CHECK_THROWS_AS(parse_config(doc), ValidationError);

  doc = minimal_doc();
  doc["experiment"].erase("kind");
  CHECK_THROWS_AS(parse_config(doc), ValidationError);
}

TEST_CASE("conflicting coupling forms are rejected") {
  auto doc = minimal_doc();
  doc["coupling"]["omega"] = 0.1;
  CHECK_THROWS_AS(parse_config(doc), ValidationError);

  doc = minimal_doc();
  doc["coupling"] = {{"lambda", 1.0}, {"mu", 0.1}};  // incomplete micro triple
  CHECK_THROWS_AS(parse_config(doc), ValidationError);
}

TEST_CASE("regime gate for effective-compare") {
  auto doc = minimal_doc();
  doc["coupling"] = {{"lambda", 1.0}, {"mu", 1e-4}, {"omega", 0.1}};  // lambda/omega = 10
  doc["experiment"]["kind"] = "effective-compare";
  auto cfg = parse_config(doc);
  CHECK_THROWS_AS(validate_config(cfg), ValidationError);
  cfg.force_regime = true;
  validate_config(cfg);  // override accepted
}

TEST_CASE("potential config validation") {
  auto doc = minimal_doc();
  doc["experiment"]["kind"] = "potential";
  doc["experiment"]["r_list"] = {3};
  doc["lattice"]["lx"] = 5;
  doc["lattice"]["ly"] = 3;
  auto cfg = parse_config(doc);
  bool parity_cited = false;
  try {
    validate_config(cfg);
  } catch (const ValidationError& e) {
    parity_cited = std::string(e.what()).find("odd") != std::string::npos;
  }
  CHECK(parity_cited);

  cfg.r_list = {2, 4};
  validate_config(cfg);

  cfg.charges = {{0, 1, 1}, {2, 1, -1}};
  CHECK_THROWS_AS(validate_config(cfg), ValidationError);
}

TEST_CASE("load_config reports parse position and io failures") {
  const auto dir = fresh_dir("parse");
  const auto bad_path = dir / "bad.json";
  std::ofstream(bad_path) << "{\n  \"lattice\": {\n";
  bool line_reported = false;
  try {
    load_config(bad_path.string());
  } catch (const ValidationError& e) {
    line_reported = std::string(e.what()).find("line") != std::string::npos;
  }
  CHECK(line_reported);
  CHECK_THROWS_AS(load_config((dir / "missing.json").string()), IoError);
}

TEST_CASE("sector count run on the single plaquette") {
  auto doc = minimal_doc();
  doc.erase("coupling");
  doc["experiment"]["kind"] = "sector-count";
  doc["lattice"]["trunc"] = 1;
  auto cfg = parse_config(doc);
  cfg.out_dir = fresh_dir("sector").string();

  const auto record = run_sector_count(cfg);
  CHECK(record.results.at("sector_states").get<std::size_t>() == 3);
  CHECK(record.results.at("raw_states").get<double>() == 81.0);
  CHECK(record.results.at("brute_force_checked").get<bool>());
  CHECK(fs::exists(fs::path(cfg.out_dir) / "run.json"));
}

TEST_CASE("ground-state run emits a field map and a tube report") {
  auto doc = minimal_doc();
  doc["lattice"] = {{"lx", 4}, {"ly", 3}, {"trunc", 1}};
  doc["charges"] = {{"convention", "qed"},
                    {"list", {{{"m", 1}, {"n", 1}, {"q", 1}}, {{"m", 3}, {"n", 1}, {"q", -1}}}}};
  auto cfg = parse_config(doc);
  cfg.out_dir = fresh_dir("ground").string();

  const auto record = run_ground_state(cfg);
  CHECK(record.energies.count("E0") == 1);
  CHECK(record.results.contains("flux_tube"));
  CHECK(record.results.at("flux_tube").at("alternation").get<bool>());
  CHECK(fs::exists(fs::path(cfg.out_dir) / "field_map.csv"));
  CHECK(fs::exists(fs::path(cfg.out_dir) / "run.json"));
}

TEST_CASE("runs are reproducible byte for byte") {
  auto doc = minimal_doc();
  doc["lattice"] = {{"lx", 4}, {"ly", 3}, {"trunc", 1}};
  doc["experiment"] = {{"kind", "potential"}, {"r_list", {2}}};
  auto cfg = parse_config(doc);

  cfg.out_dir = fresh_dir("pot_a").string();
  const auto first = run_potential_scan(cfg);
  const auto csv_a = slurp(fs::path(cfg.out_dir) / "potential.csv");

  cfg.out_dir = fresh_dir("pot_b").string();
  const auto second = run_potential_scan(cfg);
  const auto csv_b = slurp(fs::path(cfg.out_dir) / "potential.csv");

  CHECK(csv_a == csv_b);
  CHECK(first.energies.at("V(R=2)") == second.energies.at("V(R=2)"));
}

TEST_CASE("effective-compare run reproduces the emergent gauge theory") {
  json doc = {{"lattice", {{"lx", 2}, {"ly", 2}, {"trunc", 2}}},
              {"coupling", {{"lambda", 1.0}, {"mu", 1e-5}, {"omega", 1e-2}}},
              {"experiment", {{"kind", "effective-compare"}}},
              {"solver", {{"k", 3}}}};
  auto cfg = parse_config(doc);
  cfg.out_dir = fresh_dir("effective").string();

  const auto record = run_effective_compare(cfg);
  CHECK(record.results.at("max_abs_dev_full_effective").get<double>() <= 1e-7);
  CHECK(record.basis_sizes.at("full") == 625);
  CHECK(record.basis_sizes.at("gauss_sector") == 5);
  CHECK(record.results.at("g2_bridge").get<double>() ==
        doctest::Approx(std::sqrt(1.0 * 1e-5 / 2.0) / 1e-2));
  CHECK(fs::exists(fs::path(cfg.out_dir) / "levels.csv"));
}

TEST_CASE("stagger-check run validates charges before solving") {
  json doc = {{"lattice", {{"lx", 2}, {"ly", 2}, {"trunc", 1}}},
              {"coupling", {{"lambda", 1.0}, {"mu", 0.05}, {"omega", 0.02}}},
              {"experiment", {{"kind", "stagger-check"}}},
              {"charges",
               {{"convention", "delta"},
                {"list", {{{"m", 0}, {"n", 0}, {"q", 1}}, {{"m", 1}, {"n", 0}, {"q", 1}}}}}}};
  auto cfg = parse_config(doc);
  cfg.out_dir = fresh_dir("stagger_bad").string();
  CHECK_THROWS_AS(run_stagger_check(cfg), ValidationError);

  cfg.charges.clear();
  const auto record = run_stagger_check(cfg);
  CHECK(record.passed);
  CHECK(record.results.at("max_spectral_deviation").get<double>() <= 1e-10);
  CHECK(record.energies.at("ground_micro") ==
        doctest::Approx(record.energies.at("ground_staggered")).epsilon(1e-12));
}
