#include "fluxlat/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fluxlat/errors.hpp"
#include "fluxlat/hamiltonian.hpp"

namespace fluxlat {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::SectorCount: return "sector-count";
    case ExperimentKind::GroundState: return "ground-state";
    case ExperimentKind::Potential: return "potential";
    case ExperimentKind::EffectiveCompare: return "effective-compare";
    case ExperimentKind::StaggerCheck: return "stagger-check";
  }
  return "unknown";
}

ExperimentKind kind_from_string(const std::string& s) {
  if (s == "sector-count") return ExperimentKind::SectorCount;
  if (s == "ground-state") return ExperimentKind::GroundState;
  if (s == "potential") return ExperimentKind::Potential;
  if (s == "effective-compare") return ExperimentKind::EffectiveCompare;
  if (s == "stagger-check") return ExperimentKind::StaggerCheck;
  throw ValidationError("unknown experiment kind '" + s + "'");
}

namespace {

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void require_keys(const json& j, const std::string& section,
                  std::initializer_list<const char*> allowed) {
  if (!j.is_object())
    throw ValidationError("config section '" + section + "' must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw ValidationError("unknown config key '" +
                            (section.empty() ? it.key() : section + "." + it.key()) + "'");
  }
}

int get_int(const json& j, const std::string& section, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number_integer())
    throw ValidationError("config field '" + section + "." + key + "' must be an integer");
  return v.get<int>();
}

int get_int_or(const json& j, const std::string& section, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  return get_int(j, section, key);
}

double get_num(const json& j, const std::string& section, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number())
    throw ValidationError("config field '" + section + "." + key + "' must be a number");
  return v.get<double>();
}

double get_num_or(const json& j, const std::string& section, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  return get_num(j, section, key);
}

std::string get_str(const json& j, const std::string& section, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_string())
    throw ValidationError("config field '" + section + "." + key + "' must be a string");
  return v.get<std::string>();
}

bool get_bool_or(const json& j, const std::string& section, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_boolean())
    throw ValidationError("config field '" + section + "." + key + "' must be a boolean");
  return v.get<bool>();
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  require_keys(doc, "", {"lattice", "coupling", "charges", "experiment", "solver", "output"});
  ExperimentConfig cfg;

  if (!doc.contains("lattice")) throw ValidationError("config is missing the 'lattice' section");
  const json& lat = doc.at("lattice");
  require_keys(lat, "lattice", {"lx", "ly", "boundary", "trunc"});
  if (!lat.contains("lx") || !lat.contains("ly"))
    throw ValidationError("config section 'lattice' requires both 'lx' and 'ly'");
  cfg.lx = get_int(lat, "lattice", "lx");
  cfg.ly = get_int(lat, "lattice", "ly");
  cfg.boundary = lat.contains("boundary") ? boundary_from_string(get_str(lat, "lattice", "boundary"))
                                          : Boundary::Open;
  cfg.trunc = get_int_or(lat, "lattice", "trunc", 2);

  if (doc.contains("coupling")) {
    const json& cpl = doc.at("coupling");
    require_keys(cpl, "coupling", {"g2", "lambda", "mu", "omega"});
    const bool has_g2 = cpl.contains("g2");
    const bool has_any_micro = cpl.contains("lambda") || cpl.contains("mu") || cpl.contains("omega");
    if (has_g2 && has_any_micro)
      throw ValidationError(
          "conflicting coupling forms: give either g2 or the microscopic triple "
          "lambda/mu/omega, not both");
    if (has_g2) {
      cfg.coupling = CouplingParams::from_g2(get_num(cpl, "coupling", "g2"));
    } else if (has_any_micro) {
      if (!cpl.contains("lambda") || !cpl.contains("mu") || !cpl.contains("omega"))
        throw ValidationError("the microscopic coupling form requires lambda, mu and omega");
      cfg.coupling = CouplingParams::from_micro(get_num(cpl, "coupling", "lambda"),
                                                get_num(cpl, "coupling", "mu"),
                                                get_num(cpl, "coupling", "omega"));
    }
  }

  if (doc.contains("charges")) {
    const json& ch = doc.at("charges");
    require_keys(ch, "charges", {"convention", "list"});
    cfg.convention = ch.contains("convention")
                         ? convention_from_string(get_str(ch, "charges", "convention"))
                         : ChargeConvention::QedQ;
    if (ch.contains("list")) {
      const json& list = ch.at("list");
      if (!list.is_array()) throw ValidationError("config field 'charges.list' must be an array");
      for (const auto& e : list) {
        require_keys(e, "charges.list[]", {"m", "n", "q"});
        if (!e.contains("m") || !e.contains("n") || !e.contains("q"))
          throw ValidationError("each charge entry requires 'm', 'n' and 'q'");
        cfg.charges.push_back({get_int(e, "charges.list[]", "m"), get_int(e, "charges.list[]", "n"),
                               get_int(e, "charges.list[]", "q")});
      }
    }
  }

  if (!doc.contains("experiment"))
    throw ValidationError("config is missing the 'experiment' section");
  const json& exp = doc.at("experiment");
  require_keys(exp, "experiment",
               {"kind", "r_list", "force_regime", "regime_min_ratio", "validity_fraction"});
  if (!exp.contains("kind"))
    throw ValidationError("config section 'experiment' requires 'kind'");
  cfg.kind = kind_from_string(get_str(exp, "experiment", "kind"));
  if (exp.contains("r_list")) {
    const json& rl = exp.at("r_list");
    if (!rl.is_array()) throw ValidationError("config field 'experiment.r_list' must be an array");
    cfg.r_list.clear();
    for (const auto& r : rl) {
      if (!r.is_number_integer())
        throw ValidationError("entries of 'experiment.r_list' must be integers");
      cfg.r_list.push_back(r.get<int>());
    }
  }
  cfg.force_regime = get_bool_or(exp, "experiment", "force_regime", false);
  cfg.regime_min_ratio = get_num_or(exp, "experiment", "regime_min_ratio", 100.0);
  cfg.validity_fraction = get_num_or(exp, "experiment", "validity_fraction", 0.1);

  if (doc.contains("solver")) {
    const json& sol = doc.at("solver");
    require_keys(sol, "solver", {"tol", "max_iter", "k", "dense_cap", "max_states", "seed"});
    cfg.solver.tol = get_num_or(sol, "solver", "tol", 1e-10);
    cfg.solver.max_iter = get_int_or(sol, "solver", "max_iter", 5000);
    cfg.solver.k = get_int_or(sol, "solver", "k", 4);
    cfg.solver.dense_cap = get_int_or(sol, "solver", "dense_cap", 4000);
    if (sol.contains("max_states")) {
      if (!sol.at("max_states").is_number_integer() || sol.at("max_states").get<long long>() <= 0)
        throw ValidationError("config field 'solver.max_states' must be a positive integer");
      cfg.solver.max_states = sol.at("max_states").get<std::size_t>();
    }
    if (sol.contains("seed")) {
      if (!sol.at("seed").is_number_integer())
        throw ValidationError("config field 'solver.seed' must be an integer");
      cfg.solver.seed = sol.at("seed").get<std::uint64_t>();
    }
  }

  if (doc.contains("output")) {
    const json& out = doc.at("output");
    require_keys(out, "output", {"dir"});
    if (out.contains("dir")) cfg.out_dir = get_str(out, "output", "dir");
  }

  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // report the line of the offending byte for easier fixing
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
      if (text[i] == '\n') ++line;
    throw ValidationError("config parse error in '" + path + "' near line " +
                          std::to_string(line) + ": " + e.what());
  }
  return parse_config(doc);
}

json config_to_json(const ExperimentConfig& cfg) {
  json doc;
  doc["lattice"] = {{"lx", cfg.lx},
                    {"ly", cfg.ly},
                    {"boundary", to_string(cfg.boundary)},
                    {"trunc", cfg.trunc}};
  if (cfg.coupling.has_value()) {
    if (cfg.coupling.is_micro()) {
      const auto& m = cfg.coupling.micro();
      doc["coupling"] = {{"lambda", m.lambda}, {"mu", m.mu}, {"omega", m.omega}};
    } else {
      doc["coupling"] = {{"g2", cfg.coupling.g2()}};
    }
  }
  json list = json::array();
  for (const auto& e : cfg.charges) list.push_back({{"m", e.m}, {"n", e.n}, {"q", e.q}});
  doc["charges"] = {{"convention", to_string(cfg.convention)}, {"list", list}};
  doc["experiment"] = {{"kind", to_string(cfg.kind)},
                       {"r_list", cfg.r_list},
                       {"force_regime", cfg.force_regime},
                       {"regime_min_ratio", cfg.regime_min_ratio},
                       {"validity_fraction", cfg.validity_fraction}};
  doc["solver"] = {{"tol", cfg.solver.tol},       {"max_iter", cfg.solver.max_iter},
                   {"k", cfg.solver.k},           {"dense_cap", cfg.solver.dense_cap},
                   {"max_states", cfg.solver.max_states}, {"seed", cfg.solver.seed}};
  doc["output"] = {{"dir", cfg.out_dir}};
  return doc;
}

namespace {

std::shared_ptr<const LatticeGeometry> make_geometry(const ExperimentConfig& cfg) {
  return std::make_shared<const LatticeGeometry>(build_geometry(cfg.lx, cfg.ly, cfg.boundary));
}

ChargeConfig make_charges(const ExperimentConfig& cfg, const LatticeGeometry& geom) {
  return ChargeConfig::make(geom, cfg.convention, cfg.charges);
}

void append_violations(std::vector<std::string>& out, const ValidationReport& report,
                       const std::string& context) {
  for (const auto& v : report.violations) out.push_back(context + v);
}

}  // namespace

void validate_config(const ExperimentConfig& cfg) {
  std::vector<std::string> problems;

  if (cfg.lx < 2 || cfg.ly < 2)
    problems.push_back("lattice requires lx >= 2 and ly >= 2, got " + std::to_string(cfg.lx) +
                       "x" + std::to_string(cfg.ly));
  if (cfg.trunc < 0 || cfg.trunc > 100) problems.push_back("truncation must be in [0, 100]");
  if (!(cfg.solver.tol > 0.0)) problems.push_back("solver.tol must be positive");
  if (cfg.solver.max_iter < 1) problems.push_back("solver.max_iter must be at least 1");
  if (cfg.solver.k < 1) problems.push_back("solver.k must be at least 1");
  if (cfg.solver.dense_cap < 1) problems.push_back("solver.dense_cap must be at least 1");

  const bool needs_coupling = cfg.kind != ExperimentKind::SectorCount;
  if (needs_coupling && !cfg.coupling.has_value())
    problems.push_back("experiment '" + to_string(cfg.kind) + "' requires coupling parameters");
  const bool needs_micro =
      cfg.kind == ExperimentKind::EffectiveCompare || cfg.kind == ExperimentKind::StaggerCheck;
  if (needs_micro && cfg.coupling.has_value() && !cfg.coupling.is_micro())
    problems.push_back("experiment '" + to_string(cfg.kind) +
                       "' requires the microscopic coupling form (lambda, mu, omega)");

  if (cfg.kind == ExperimentKind::EffectiveCompare && cfg.coupling.is_micro() &&
      !cfg.coupling.in_qed_regime(cfg.regime_min_ratio) && !cfg.force_regime) {
    const auto& m = cfg.coupling.micro();
    problems.push_back("outside the QED regime: need lambda/mu and lambda/omega >= " +
                       std::to_string(cfg.regime_min_ratio) + ", got lambda/mu = " +
                       std::to_string(m.lambda / m.mu) + ", lambda/omega = " +
                       std::to_string(m.lambda / m.omega) +
                       " (pass --force-regime to override)");
  }

  if (cfg.lx >= 2 && cfg.ly >= 2) {
    try {
      const auto geom = make_geometry(cfg);
      const ChargeConfig charges = make_charges(cfg, *geom);
      append_violations(problems, validate_charges(charges, *geom), "");
      if (needs_micro)
        append_violations(
            problems,
            validate_charges(as_convention(charges, *geom, ChargeConvention::MicroDelta), *geom),
            "microscopic form: ");
      if (cfg.kind == ExperimentKind::Potential) {
        if (!charges.empty())
          problems.push_back(
              "the potential experiment derives its charge pairs from r_list; remove the "
              "charges list");
        if (cfg.r_list.empty()) problems.push_back("potential experiment requires a non-empty r_list");
        for (const int r : cfg.r_list) {
          if (r < 2) problems.push_back("separation R = " + std::to_string(r) + " must be >= 2");
          else if (r % 2 != 0)
            problems.push_back("separation R = " + std::to_string(r) +
                               " is odd: an opposite unit pair at odd distance carries "
                               "equal-sign Delta on both sublattices; only even R is accepted");
          else if (r > cfg.lx - 1)
            problems.push_back("separation R = " + std::to_string(r) + " does not fit on lx = " +
                               std::to_string(cfg.lx));
        }
      }
    } catch (const ValidationError& e) {
      problems.push_back(e.what());
    }
  }

  if (!problems.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw ValidationError(msg);
  }
}

void write_run_record(const RunRecord& record, const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());

  for (const auto& artifact : record.artifacts) {
    const fs::path p = fs::path(out_dir) / artifact;
    std::error_code sec;
    const auto size = fs::file_size(p, sec);
    if (sec || size == 0)
      throw IoError("artifact '" + p.string() + "' is missing or empty");
  }

  json doc;
  doc["kind"] = record.kind;
  doc["config"] = record.config_echo;
  doc["basis_sizes"] = record.basis_sizes;
  doc["energies"] = record.energies;
  doc["timings_ms"] = record.timings_ms;
  json conv = json::array();
  for (const auto& c : record.convergence)
    conv.push_back({{"label", c.label},
                    {"k", c.k},
                    {"iterations", c.iterations},
                    {"converged", c.converged},
                    {"max_residual", c.max_residual},
                    {"seed", c.seed}});
  doc["convergence"] = conv;
  doc["warnings"] = record.warnings;
  doc["artifacts"] = record.artifacts;
  doc["results"] = record.results;
  doc["passed"] = record.passed;

  const fs::path path = fs::path(out_dir) / "run.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

namespace {

ConvergenceInfo convergence_info(const std::string& label, const EigenResult& res, int k) {
  ConvergenceInfo info;
  info.label = label;
  info.k = k;
  info.iterations = res.iterations;
  info.converged = res.converged;
  for (const double r : res.residual_norms) info.max_residual = std::max(info.max_residual, r);
  info.seed = res.seed;
  return info;
}

void require_converged(const EigenResult& res, const std::string& what) {
  if (!res.converged)
    throw ConvergenceError(what + " did not converge (" + std::to_string(res.iterations) +
                           " iterations used)");
}

}  // namespace

RunRecord run_sector_count(const ExperimentConfig& cfg) {
  validate_config(cfg);
  RunRecord record;
  record.kind = to_string(cfg.kind);
  record.config_echo = config_to_json(cfg);

  const auto geom = make_geometry(cfg);
  const ChargeConfig charges = make_charges(cfg, *geom);

  const double radix = 2.0 * cfg.trunc + 1.0;
  const double raw_states = std::pow(radix, geom->n_links());
  record.results["raw_states"] = raw_states;

  Timer t_enum;
  const GaugeSectorBasis sector =
      enumerate_gauss_sector(geom, charges, cfg.trunc, Picture::Electric, cfg.solver.max_states);
  record.timings_ms["enumerate"] = t_enum.ms();
  record.basis_sizes["gauss_sector"] = sector.size();
  record.results["sector_states"] = sector.size();

  bool checked = false;
  if (raw_states <= 1e6) {
    Timer t_check;
    const GaugeSectorBasis full =
        enumerate_full(geom, cfg.trunc, Picture::Electric, cfg.solver.max_states);
    record.basis_sizes["full"] = full.size();
    const std::vector<int> target =
        as_convention(charges, *geom, ChargeConvention::QedQ).dense(*geom);
    std::size_t matched = 0;
    for (std::size_t i = 0; i < full.size(); ++i) {
      const auto s = full.state(i);
      bool keep = true;
      for (VertexId v = 0; v < geom->n_vertices() && keep; ++v)
        if (gauss_sum_at(*geom, s, v, Picture::Electric) != target[static_cast<std::size_t>(v)])
          keep = false;
      if (!keep) continue;
      if (matched >= sector.size() || !std::ranges::equal(sector.state(matched), s))
        throw std::logic_error("sector enumeration disagrees with the brute-force filter");
      ++matched;
    }
    if (matched != sector.size())
      throw std::logic_error("sector enumeration disagrees with the brute-force filter");
    checked = true;
    record.timings_ms["brute_force_check"] = t_check.ms();
  }
  record.results["brute_force_checked"] = checked;

  write_run_record(record, cfg.out_dir);
  return record;
}

RunRecord run_ground_state(const ExperimentConfig& cfg) {
  validate_config(cfg);
  RunRecord record;
  record.kind = to_string(cfg.kind);
  record.config_echo = config_to_json(cfg);

  const auto geom = make_geometry(cfg);
  const ChargeConfig charges = make_charges(cfg, *geom);

  Timer t_enum;
  const GaugeSectorBasis sector =
      enumerate_gauss_sector(geom, charges, cfg.trunc, Picture::Electric, cfg.solver.max_states);
  record.timings_ms["enumerate"] = t_enum.ms();
  record.basis_sizes["gauss_sector"] = sector.size();
  if (sector.size() == 0)
    throw ValidationError("ground-state run: charge sector admits no Gauss-law states");

  Timer t_asm;
  const SparseOperator H = build_kogut_susskind(sector, cfg.coupling);
  record.timings_ms["assemble"] = t_asm.ms();

  const int k = std::min<int>(cfg.solver.k, static_cast<int>(sector.size()));
  if (k < cfg.solver.k)
    record.warnings.push_back("requested k = " + std::to_string(cfg.solver.k) +
                              " clamped to the sector size " + std::to_string(sector.size()));
  Timer t_solve;
  const EigenResult res = low_spectrum(H, k, cfg.solver.tol, cfg.solver.max_iter, cfg.solver.seed);
  record.timings_ms["solve"] = t_solve.ms();
  record.convergence.push_back(convergence_info("ground_state", res, k));
  require_converged(res, "ground-state solve");
  for (int i = 0; i < k; ++i)
    record.energies["E" + std::to_string(i)] = res.eigenvalues[static_cast<std::size_t>(i)];

  FieldMap map = field_map(res.eigenvectors.front(), sector);
  map.g_sq = cfg.coupling.g2();

  // flux-tube diagnostics apply to a single co-linear unit pair (or vacuum)
  const ChargeConfig qed = as_convention(charges, *geom, ChargeConvention::QedQ);
  bool tube_applicable = qed.empty();
  if (qed.entries().size() == 2) {
    const auto a = geom->vertex_coord(qed.entries()[0].first);
    const auto b = geom->vertex_coord(qed.entries()[1].first);
    const int qa = qed.entries()[0].second;
    const int qb = qed.entries()[1].second;
    tube_applicable = qa + qb == 0 && std::abs(qa) == 1 && (a.m == b.m || a.n == b.n);
    if (tube_applicable) {
      const int r = std::abs(a.m - b.m) + std::abs(a.n - b.n);
      if (auto w = validity_bound_check(cfg.coupling, r, cfg.validity_fraction))
        record.warnings.push_back(*w);
      if (geom->is_boundary_vertex(qed.entries()[0].first) ||
          geom->is_boundary_vertex(qed.entries()[1].first))
        record.warnings.push_back("a charge sits on the lattice boundary");
    }
  }
  if (tube_applicable) {
    const FluxTubeReport tube = flux_tube_report(map, qed);
    json on_tube = json::array();
    for (const double e : tube.on_tube) on_tube.push_back(e);
    record.results["flux_tube"] = {{"on_tube", on_tube},
                                   {"off_tube_max", tube.off_tube_max},
                                   {"alternation", tube.alternation}};
  }

  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + cfg.out_dir + "'");
  write_field_map_csv((fs::path(cfg.out_dir) / "field_map.csv").string(), map);
  record.artifacts.push_back("field_map.csv");

  write_run_record(record, cfg.out_dir);
  return record;
}

RunRecord run_potential_scan(const ExperimentConfig& cfg) {
  validate_config(cfg);
  RunRecord record;
  record.kind = to_string(cfg.kind);
  record.config_echo = config_to_json(cfg);

  const auto geom = make_geometry(cfg);
  PotentialSolverOptions opts;
  opts.tol = cfg.solver.tol;
  opts.max_iter = cfg.solver.max_iter;
  opts.seed = cfg.solver.seed;
  opts.max_states = cfg.solver.max_states;

  Timer t_scan;
  const PotentialTable table = static_potential(geom, cfg.coupling, cfg.trunc, cfg.r_list, opts);
  record.timings_ms["scan"] = t_scan.ms();
  record.warnings.insert(record.warnings.end(), table.warnings.begin(), table.warnings.end());

  json rows = json::array();
  for (const auto& row : table.rows) {
    rows.push_back({{"R", row.r},
                    {"E_charged", row.e_charged},
                    {"E_vacuum", row.e_vacuum},
                    {"V", row.v},
                    {"V_strong", row.v_strong},
                    {"rel_dev", row.rel_dev}});
    record.energies["V(R=" + std::to_string(row.r) + ")"] = row.v;
  }
  record.results["rows"] = rows;
  if (!table.rows.empty()) record.energies["E_vacuum"] = table.rows.front().e_vacuum;

  // least-squares slope of V against R, compared with g^2/2
  if (table.rows.size() >= 2) {
    double mr = 0.0;
    double mv = 0.0;
    for (const auto& row : table.rows) {
      mr += row.r;
      mv += row.v;
    }
    mr /= static_cast<double>(table.rows.size());
    mv /= static_cast<double>(table.rows.size());
    double num = 0.0;
    double den = 0.0;
    for (const auto& row : table.rows) {
      num += (row.r - mr) * (row.v - mv);
      den += (row.r - mr) * (row.r - mr);
    }
    const double slope = num / den;
    const double target = 0.5 * cfg.coupling.g2();
    record.results["slope"] = slope;
    record.results["slope_target"] = target;
    record.results["slope_rel_dev"] = std::abs(slope - target) / target;
  }

  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + cfg.out_dir + "'");
  write_potential_csv((fs::path(cfg.out_dir) / "potential.csv").string(), table);
  record.artifacts.push_back("potential.csv");

  write_run_record(record, cfg.out_dir);
  return record;
}

namespace {

std::vector<double> low_levels(const SparseOperator& H, int levels, const SolverOptions& solver,
                               const std::string& what, RunRecord& record) {
  if (H.dim() <= solver.dense_cap) return dense_eigenvalues(H, solver.dense_cap);
  const EigenResult res = low_spectrum(H, levels, solver.tol, solver.max_iter, solver.seed);
  record.convergence.push_back(convergence_info(what, res, levels));
  require_converged(res, what);
  return res.eigenvalues;
}

std::vector<double> aligned(const std::vector<double>& levels, std::size_t count) {
  std::vector<double> out;
  const double base = levels.front();
  for (std::size_t i = 0; i < count && i < levels.size(); ++i) out.push_back(levels[i] - base);
  return out;
}

}  // namespace

RunRecord run_effective_compare(const ExperimentConfig& cfg) {
  validate_config(cfg);
  RunRecord record;
  record.kind = to_string(cfg.kind);
  record.config_echo = config_to_json(cfg);

  const auto geom = make_geometry(cfg);
  const ChargeConfig charges = make_charges(cfg, *geom);
  const MicroParams& micro = cfg.coupling.micro();

  // (a) full rotor Hamiltonian, low levels of the Gauss sector
  Timer t_full;
  const GaugeSectorBasis full =
      enumerate_full(geom, cfg.trunc, Picture::Deviation, cfg.solver.max_states);
  record.basis_sizes["full"] = full.size();
  const SparseOperator h_full = build_microscopic_rotor(full, micro, charges);

  // (b) numerically derived second-order effective Hamiltonian
  const EffectiveHamiltonian eff = derive_effective(geom, cfg.trunc, micro, charges,
                                                    cfg.solver.max_states);
  record.basis_sizes["gauss_sector"] = eff.sector.size();

  const int levels = static_cast<int>(
      std::min<std::size_t>(eff.sector.size(), static_cast<std::size_t>(cfg.solver.k)));
  const std::vector<double> spec_full = low_levels(h_full, levels, cfg.solver, "full_rotor", record);
  const std::vector<double> spec_eff =
      low_levels(eff.op, levels, cfg.solver, "effective", record);
  record.timings_ms["rotor_and_effective"] = t_full.ms();

  // (c) Kogut-Susskind route at g^4 = lambda mu / (2 omega^2), rescaled by U0
  Timer t_ks;
  const ChargeConfig qed = as_convention(charges, *geom, ChargeConvention::QedQ);
  const GaugeSectorBasis sector_e =
      enumerate_gauss_sector(geom, qed, cfg.trunc, Picture::Electric, cfg.solver.max_states);
  const SparseOperator h_ks = build_kogut_susskind(sector_e, cfg.coupling);
  std::vector<double> spec_ks = low_levels(h_ks, levels, cfg.solver, "kogut_susskind", record);
  const double u0 = cfg.coupling.u0();
  for (auto& v : spec_ks) v *= u0;
  record.timings_ms["kogut_susskind"] = t_ks.ms();

  const auto a = aligned(spec_full, static_cast<std::size_t>(levels));
  const auto b = aligned(spec_eff, static_cast<std::size_t>(levels));
  const auto c = aligned(spec_ks, static_cast<std::size_t>(levels));

  double dev_ab = 0.0;
  double dev_ac = 0.0;
  json rows = json::array();
  for (std::size_t i = 0; i < a.size(); ++i) {
    dev_ab = std::max(dev_ab, std::abs(a[i] - b[i]));
    dev_ac = std::max(dev_ac, std::abs(a[i] - c[i]));
    rows.push_back({{"level", i},
                    {"full", a[i]},
                    {"effective", b[i]},
                    {"kogut_susskind", c[i]}});
  }
  record.results["levels"] = rows;
  record.results["max_abs_dev_full_effective"] = dev_ab;
  record.results["max_abs_dev_full_kogut_susskind"] = dev_ac;
  record.results["g2_bridge"] = cfg.coupling.g2();
  record.results["u0"] = u0;
  record.energies["ground_full"] = spec_full.front();
  record.energies["ground_effective"] = spec_eff.front();

  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + cfg.out_dir + "'");
  const fs::path csv = fs::path(cfg.out_dir) / "levels.csv";
  {
    std::ofstream out(csv, std::ios::binary);
    if (!out) throw IoError("cannot open '" + csv.string() + "' for writing");
    out << "level,full,effective,kogut_susskind\n";
    char buf[140];
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", i, a[i], b[i], c[i]);
      out << buf;
    }
  }
  record.artifacts.push_back("levels.csv");

  write_run_record(record, cfg.out_dir);
  return record;
}

RunRecord run_stagger_check(const ExperimentConfig& cfg) {
  validate_config(cfg);
  RunRecord record;
  record.kind = to_string(cfg.kind);
  record.config_echo = config_to_json(cfg);

  const auto geom = make_geometry(cfg);
  const ChargeConfig charges = make_charges(cfg, *geom);
  const MicroParams& micro = cfg.coupling.micro();

  Timer t_build;
  const GaugeSectorBasis basis_d =
      enumerate_full(geom, cfg.trunc, Picture::Deviation, cfg.solver.max_states);
  const GaugeSectorBasis basis_e =
      enumerate_full(geom, cfg.trunc, Picture::Electric, cfg.solver.max_states);
  record.basis_sizes["full"] = basis_d.size();
  if (static_cast<std::int64_t>(basis_d.size()) > cfg.solver.dense_cap)
    throw CapacityError("stagger check compares full spectra; basis of " +
                        std::to_string(basis_d.size()) + " states exceeds dense_cap " +
                        std::to_string(cfg.solver.dense_cap));
  const SparseOperator h_micro = build_microscopic_rotor(basis_d, micro, charges);
  const SparseOperator h_stag = stagger_equivalent(basis_e, micro, charges);
  record.timings_ms["assemble"] = t_build.ms();

  Timer t_solve;
  const std::vector<double> spec_micro = dense_eigenvalues(h_micro, cfg.solver.dense_cap);
  const std::vector<double> spec_stag = dense_eigenvalues(h_stag, cfg.solver.dense_cap);
  record.timings_ms["solve"] = t_solve.ms();

  double max_dev = 0.0;
  for (std::size_t i = 0; i < spec_micro.size(); ++i)
    max_dev = std::max(max_dev, std::abs(spec_micro[i] - spec_stag[i]));

  const double threshold = 1e-10;
  record.results["max_spectral_deviation"] = max_dev;
  record.results["threshold"] = threshold;
  record.results["pass"] = max_dev <= threshold;
  record.energies["ground_micro"] = spec_micro.front();
  record.energies["ground_staggered"] = spec_stag.front();
  record.passed = max_dev <= threshold;

  write_run_record(record, cfg.out_dir);
  return record;
}

RunRecord run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.kind) {
    case ExperimentKind::SectorCount: return run_sector_count(cfg);
    case ExperimentKind::GroundState: return run_ground_state(cfg);
    case ExperimentKind::Potential: return run_potential_scan(cfg);
    case ExperimentKind::EffectiveCompare: return run_effective_compare(cfg);
    case ExperimentKind::StaggerCheck: return run_stagger_check(cfg);
  }
  throw std::logic_error("unhandled experiment kind");
}

}  // namespace fluxlat
