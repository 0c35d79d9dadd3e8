// fluxlat: exact-diagonalization experiments for 2+1-d compact lattice
// gauge fields on the Gauss-law sector, with the microscopic rotor model
// the gauge theory emerges from.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fluxlat/errors.hpp"
#include "fluxlat/experiments.hpp"

namespace {

using nlohmann::json;

struct CliOptions {
  std::string config_path;
  std::optional<double> g2;
  std::optional<double> lambda;
  std::optional<double> mu;
  std::optional<double> omega;
  std::optional<int> lx;
  std::optional<int> ly;
  std::optional<std::string> boundary;
  std::optional<int> trunc;
  std::optional<std::string> out;
  std::vector<int> r_list;
  bool force_regime = false;
  int verbosity = 0;
};

void add_common_options(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--config", o.config_path, "JSON config file");
  cmd->add_option("--g2", o.g2, "coupling g^2 (QED form)");
  cmd->add_option("--lambda", o.lambda, "microscopic Gauss penalty lambda");
  cmd->add_option("--mu", o.mu, "microscopic field energy mu");
  cmd->add_option("--omega", o.omega, "microscopic hopping omega");
  cmd->add_option("--lx", o.lx, "lattice vertices in x");
  cmd->add_option("--ly", o.ly, "lattice vertices in y");
  cmd->add_option("--boundary", o.boundary, "boundary: open or periodic");
  cmd->add_option("--trunc", o.trunc, "link field truncation (|E| <= trunc)");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--r-list", o.r_list, "charge separations for the potential scan");
  cmd->add_flag("--force-regime", o.force_regime, "run effective-compare outside the QED regime");
  cmd->add_flag("-v,--verbose", o.verbosity, "more output");
}

json load_doc(const CliOptions& o) {
  if (o.config_path.empty()) {
    return json{{"lattice", json::object()}, {"experiment", json::object()}};
  }
  std::ifstream in(o.config_path, std::ios::binary);
  if (!in) throw fluxlat::IoError("cannot read config file '" + o.config_path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
      if (text[i] == '\n') ++line;
    throw fluxlat::ValidationError("config parse error in '" + o.config_path + "' near line " +
                                   std::to_string(line) + ": " + e.what());
  }
}

fluxlat::ExperimentConfig resolve_config(const CliOptions& o, const std::string& subcommand) {
  json doc = load_doc(o);
  if (!doc.is_object()) throw fluxlat::ValidationError("config root must be a JSON object");

  if (!doc.contains("lattice")) doc["lattice"] = json::object();
  if (!doc.contains("experiment")) doc["experiment"] = json::object();

  if (subcommand != "validate") {
    if (doc["experiment"].contains("kind") &&
        doc["experiment"]["kind"].get<std::string>() != subcommand)
      throw fluxlat::ValidationError("config experiment.kind '" +
                                     doc["experiment"]["kind"].get<std::string>() +
                                     "' conflicts with the '" + subcommand + "' subcommand");
    doc["experiment"]["kind"] = subcommand;
  }

  if (o.lx) doc["lattice"]["lx"] = *o.lx;
  if (o.ly) doc["lattice"]["ly"] = *o.ly;
  if (o.boundary) doc["lattice"]["boundary"] = *o.boundary;
  if (o.trunc) doc["lattice"]["trunc"] = *o.trunc;
  if (o.g2) doc["coupling"]["g2"] = *o.g2;
  if (o.lambda) doc["coupling"]["lambda"] = *o.lambda;
  if (o.mu) doc["coupling"]["mu"] = *o.mu;
  if (o.omega) doc["coupling"]["omega"] = *o.omega;
  if (!o.r_list.empty()) doc["experiment"]["r_list"] = o.r_list;
  if (o.force_regime) doc["experiment"]["force_regime"] = true;
  if (o.out) doc["output"]["dir"] = *o.out;

  return fluxlat::parse_config(doc);
}

void print_record(const fluxlat::RunRecord& record, const CliOptions& o) {
  for (const auto& w : record.warnings) std::cerr << "warning: " << w << "\n";
  if (record.kind == "sector-count") {
    std::cout << "raw states: " << record.results.at("raw_states").get<double>() << "\n";
    std::cout << "gauss sector states: " << record.results.at("sector_states").get<std::size_t>()
              << "\n";
    if (record.results.at("brute_force_checked").get<bool>())
      std::cout << "brute-force cross-check: ok\n";
  } else if (record.kind == "ground-state") {
    for (const auto& [key, value] : record.energies)
      std::cout << key << " = " << std::scientific << value << "\n";
    if (record.results.contains("flux_tube")) {
      const auto& tube = record.results.at("flux_tube");
      std::cout << "flux tube: off_tube_max = " << tube.at("off_tube_max").get<double>()
                << ", alternation = " << (tube.at("alternation").get<bool>() ? "yes" : "no")
                << "\n";
    }
  } else if (record.kind == "potential") {
    for (const auto& row : record.results.at("rows"))
      std::cout << "R = " << row.at("R").get<int>() << ": V = " << row.at("V").get<double>()
                << " (strong-coupling " << row.at("V_strong").get<double>() << ")\n";
    if (record.results.contains("slope"))
      std::cout << "slope = " << record.results.at("slope").get<double>() << " vs g^2/2 = "
                << record.results.at("slope_target").get<double>() << "\n";
  } else if (record.kind == "effective-compare") {
    std::cout << "max |full - effective| (aligned) = "
              << record.results.at("max_abs_dev_full_effective").get<double>() << "\n";
    std::cout << "max |full - kogut-susskind| (aligned) = "
              << record.results.at("max_abs_dev_full_kogut_susskind").get<double>() << "\n";
  } else if (record.kind == "stagger-check") {
    std::cout << "max spectral deviation = "
              << record.results.at("max_spectral_deviation").get<double>() << "\n";
    std::cout << (record.passed ? "stagger check: PASS" : "stagger check: FAIL") << "\n";
  }
  if (o.verbosity > 0)
    for (const auto& [phase, ms] : record.timings_ms)
      std::cerr << "timing " << phase << ": " << ms << " ms\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fluxlat: Gauss-sector exact diagonalization of 2+1-d compact lattice gauge fields"};
  app.require_subcommand(1);

  const std::vector<std::string> kinds = {"sector-count", "ground-state", "potential",
                                          "effective-compare", "stagger-check", "validate"};
  const std::vector<std::string> descriptions = {
      "count full and Gauss-projected basis sizes",
      "ground state and link-field map of a charge sector",
      "static potential V(R) against the strong-coupling line",
      "compare the rotor model, its effective theory and the gauge Hamiltonian",
      "spectral equality of the microscopic and staggered forms",
      "check a config and its charge constraints without running"};
  std::vector<CliOptions> opts(kinds.size());
  for (std::size_t i = 0; i < kinds.size(); ++i)
    add_common_options(app.add_subcommand(kinds[i], descriptions[i]), opts[i]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
      return app.exit(e);
    app.exit(e);
    return 1;
  }

  const std::string subcommand = app.get_subcommands().front()->get_name();
  const CliOptions& o = opts[static_cast<std::size_t>(
      std::find(kinds.begin(), kinds.end(), subcommand) - kinds.begin())];

  try {
    const fluxlat::ExperimentConfig cfg = resolve_config(o, subcommand);
    if (subcommand == "validate") {
      fluxlat::validate_config(cfg);
      std::cout << "configuration OK: " << fluxlat::to_string(cfg.kind) << " on " << cfg.lx << "x"
                << cfg.ly << " (" << fluxlat::to_string(cfg.boundary) << "), trunc " << cfg.trunc
                << "\n";
      return 0;
    }
    const fluxlat::RunRecord record = fluxlat::run_experiment(cfg);
    print_record(record, o);
    if (!record.passed) {
      std::cerr << "error: physics check failed (see run.json)\n";
      return 2;
    }
    return 0;
  } catch (const fluxlat::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const fluxlat::CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fluxlat::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fluxlat::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
