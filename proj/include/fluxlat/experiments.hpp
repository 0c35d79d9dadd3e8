#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "fluxlat/basis.hpp"
#include "fluxlat/coupling.hpp"
#include "fluxlat/observables.hpp"

namespace fluxlat {

enum class ExperimentKind { SectorCount, GroundState, Potential, EffectiveCompare, StaggerCheck };

std::string to_string(ExperimentKind k);
ExperimentKind kind_from_string(const std::string& s);

struct SolverOptions {
  double tol = 1e-10;
  int max_iter = 5000;
  int k = 4;
  std::int64_t dense_cap = 4000;
  std::size_t max_states = kDefaultMaxStates;
  std::uint64_t seed = kLanczosSeed;
};

/// Fully resolved description of one run; config file plus CLI overrides.
struct ExperimentConfig {
  int lx = 0;
  int ly = 0;
  Boundary boundary = Boundary::Open;
  int trunc = 2;
  CouplingParams coupling;
  ChargeConvention convention = ChargeConvention::QedQ;
  std::vector<ChargeEntry> charges;
  ExperimentKind kind = ExperimentKind::GroundState;
  std::vector<int> r_list = {2, 4};
  bool force_regime = false;
  double regime_min_ratio = 100.0;
  double validity_fraction = 0.1;
  SolverOptions solver;
  std::string out_dir = "out";
};

/// Strict JSON config: unknown keys are errors, physical parameters are
/// validated before any allocation. Sections: lattice, coupling, charges,
/// experiment, solver, output.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Validates the resolved config (geometry bounds, coupling form, charge
/// constraints in the declared convention, parity of the potential R list).
/// Throws ValidationError describing every violated constraint.
void validate_config(const ExperimentConfig& cfg);

struct ConvergenceInfo {
  std::string label;
  int k = 0;
  int iterations = 0;
  bool converged = true;
  double max_residual = 0.0;
  std::uint64_t seed = 0;
};

struct RunRecord {
  nlohmann::json config_echo;
  std::string kind;
  std::map<std::string, std::size_t> basis_sizes;
  std::map<std::string, double> energies;
  std::map<std::string, double> timings_ms;
  std::vector<ConvergenceInfo> convergence;
  std::vector<std::string> warnings;
  std::vector<std::string> artifacts;  // paths relative to out_dir
  nlohmann::json results;
  bool passed = true;  // physics checks embedded in the run (stagger check)
};

/// Writes run.json (plus nothing else) and verifies that every artifact
/// listed in the record exists and is non-empty.
void write_run_record(const RunRecord& record, const std::string& out_dir);

RunRecord run_sector_count(const ExperimentConfig& cfg);
RunRecord run_ground_state(const ExperimentConfig& cfg);
RunRecord run_potential_scan(const ExperimentConfig& cfg);
RunRecord run_effective_compare(const ExperimentConfig& cfg);
RunRecord run_stagger_check(const ExperimentConfig& cfg);

/// Dispatch on cfg.kind; writes artifacts and run.json into cfg.out_dir.
RunRecord run_experiment(const ExperimentConfig& cfg);

}  // namespace fluxlat
