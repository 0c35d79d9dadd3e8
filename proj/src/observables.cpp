#include "fluxlat/observables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "fluxlat/errors.hpp"
#include "fluxlat/hamiltonian.hpp"

namespace fluxlat {

FieldMap field_map(std::span<const double> state, const GaugeSectorBasis& basis) {
  if (state.size() != basis.size())
    throw std::invalid_argument("field_map: state length does not match basis size");
  double norm_sq = 0.0;
  for (const double a : state) norm_sq += a * a;
  if (std::abs(std::sqrt(norm_sq) - 1.0) > 1e-8)
    throw ValidationError("field_map: state is not unit-norm (|norm - 1| > 1e-8)");

  const auto& geom = basis.geometry();
  const std::size_t n_links = static_cast<std::size_t>(basis.n_links());
  std::vector<double> mean(n_links, 0.0);
  std::vector<double> mean_sq(n_links, 0.0);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double w = state[i] * state[i];
    if (w == 0.0) continue;
    const auto s = basis.state(i);
    for (std::size_t l = 0; l < n_links; ++l) {
      const double val = static_cast<double>(s[l]);
      mean[l] += w * val;
      mean_sq[l] += w * val * val;
    }
  }

  FieldMap map;
  map.geom = basis.geometry_ptr();
  map.e_mean.resize(n_links);
  map.e2_mean = std::move(mean_sq);
  map.delta_mean.resize(n_links);
  for (LinkId l = 0; l < basis.n_links(); ++l) {
    const std::size_t u = static_cast<std::size_t>(l);
    const double sign = static_cast<double>(geom.link_stagger_sign(l));
    if (basis.picture() == Picture::Electric) {
      map.e_mean[u] = mean[u];
      map.delta_mean[u] = sign * mean[u];
    } else {
      map.delta_mean[u] = mean[u];
      map.e_mean[u] = sign * mean[u];
    }
  }
  map.charges = basis.projected() ? as_convention(basis.charges(), geom, ChargeConvention::QedQ)
                                  : ChargeConfig{};
  map.trunc = basis.trunc();
  return map;
}

std::pair<ChargeEntry, ChargeEntry> potential_charge_pair(const LatticeGeometry& geom, int r) {
  const int n0 = geom.ly() / 2;
  const int m0 = (geom.lx() - 1 - r) / 2;
  return {ChargeEntry{m0, n0, +1}, ChargeEntry{m0 + r, n0, -1}};
}

namespace {

void check_separations(const LatticeGeometry& geom, const std::vector<int>& r_list) {
  for (const int r : r_list) {
    if (r < 2)
      throw ValidationError("separation R must be at least 2, got " + std::to_string(r));
    if (r % 2 != 0)
      throw ValidationError(
          "separation R = " + std::to_string(r) +
          " is odd: opposite unit charges an odd distance apart sit on different "
          "sublattices and carry equal-sign Delta, violating the sublattice sum "
          "constraints; only even R is supported");
    if (r > geom.lx() - 1)
      throw ValidationError("separation R = " + std::to_string(r) + " does not fit on an Lx = " +
                            std::to_string(geom.lx()) + " lattice");
  }
}

double ground_energy(const GaugeSectorBasis& sector, const CouplingParams& params,
                     const PotentialSolverOptions& opts) {
  if (sector.size() == 0)
    throw ValidationError("static_potential: charge sector admits no Gauss-law states");
  const SparseOperator H = build_kogut_susskind(sector, params);
  const EigenResult res = low_spectrum(H, 1, opts.tol, opts.max_iter, opts.seed);
  if (!res.converged)
    throw ConvergenceError("static_potential: ground state did not converge within " +
                           std::to_string(opts.max_iter) + " iterations");
  return res.eigenvalues.front();
}

}  // namespace

PotentialTable static_potential(std::shared_ptr<const LatticeGeometry> geom,
                                const CouplingParams& params, int trunc,
                                const std::vector<int>& r_list,
                                const PotentialSolverOptions& opts) {
  const auto& g = *geom;
  if (r_list.empty()) throw ValidationError("static_potential: empty R list");
  check_separations(g, r_list);

  std::vector<int> rs = r_list;
  std::sort(rs.begin(), rs.end());
  rs.erase(std::unique(rs.begin(), rs.end()), rs.end());

  PotentialTable table;
  const double g_sq = params.g2();

  const GaugeSectorBasis vacuum = enumerate_gauss_sector(geom, ChargeConfig{}, trunc,
                                                         Picture::Electric, opts.max_states);
  const double e_vacuum = ground_energy(vacuum, params, opts);

  for (const int r : rs) {
    const auto [plus, minus] = potential_charge_pair(g, r);
    const auto cfg = ChargeConfig::make(g, ChargeConvention::QedQ, {plus, minus});
    const auto micro_report = validate_charges(convert_charges(cfg, g), g);
    if (!micro_report.ok)
      throw ValidationError("static_potential: R = " + std::to_string(r) +
                            " pair fails the microscopic charge constraints");

    bool touches_boundary = false;
    for (int m = plus.m; m <= minus.m; ++m)
      if (g.is_boundary_vertex(g.vertex_id(m, plus.n))) touches_boundary = true;
    if (touches_boundary)
      table.warnings.push_back("R = " + std::to_string(r) +
                               " flux tube touches the lattice boundary");
    if (auto w = validity_bound_check(params, r)) table.warnings.push_back(*w);

    const GaugeSectorBasis sector =
        enumerate_gauss_sector(geom, cfg, trunc, Picture::Electric, opts.max_states);
    const double e_charged = ground_energy(sector, params, opts);

    PotentialRow row;
    row.r = r;
    row.e_charged = e_charged;
    row.e_vacuum = e_vacuum;
    row.v = e_charged - e_vacuum;
    row.v_strong = 0.5 * g_sq * static_cast<double>(r);
    row.rel_dev = std::abs(row.v - row.v_strong) / row.v_strong;
    table.rows.push_back(row);
  }
  return table;
}

FluxTubeReport flux_tube_report(const FieldMap& map, const ChargeConfig& charges) {
  const auto& geom = *map.geom;
  const ChargeConfig qed = as_convention(charges, geom, ChargeConvention::QedQ);

  FluxTubeReport report;
  if (qed.empty()) {
    double best = 0.0;
    for (const double e : map.e_mean) best = std::max(best, std::abs(e));
    report.off_tube_max = best;
    return report;
  }

  if (qed.entries().size() != 2)
    throw ValidationError("flux_tube_report: expected a single +1/-1 charge pair");
  const auto [va, qa] = qed.entries()[0];
  const auto [vb, qb] = qed.entries()[1];
  if (qa + qb != 0 || std::abs(qa) != 1)
    throw ValidationError("flux_tube_report: charges must be one +1 and one -1");
  const auto ca = geom.vertex_coord(va);
  const auto cb = geom.vertex_coord(vb);
  const VertexCoord from = qa > 0 ? ca : cb;  // positive charge
  const VertexCoord to = qa > 0 ? cb : ca;
  if (from.m != to.m && from.n != to.n)
    throw ValidationError("flux_tube_report: charges are not co-linear");

  // straight-line path from the positive to the negative charge
  if (from.n == to.n) {
    const int step = to.m > from.m ? +1 : -1;
    for (int m = from.m; m != to.m; m += step) {
      const LinkId l = geom.link_id(step > 0 ? m : m - 1, from.n, 1);
      report.tube_links.push_back(l);
      report.on_tube.push_back(static_cast<double>(step) *
                               map.e_mean[static_cast<std::size_t>(l)]);
    }
  } else {
    const int step = to.n > from.n ? +1 : -1;
    for (int n = from.n; n != to.n; n += step) {
      const LinkId l = geom.link_id(from.m, step > 0 ? n : n - 1, 2);
      report.tube_links.push_back(l);
      report.on_tube.push_back(static_cast<double>(step) *
                               map.e_mean[static_cast<std::size_t>(l)]);
    }
  }

  const std::set<LinkId> tube(report.tube_links.begin(), report.tube_links.end());
  for (LinkId l = 0; l < geom.n_links(); ++l)
    if (!tube.count(l))
      report.off_tube_max =
          std::max(report.off_tube_max, std::abs(map.e_mean[static_cast<std::size_t>(l)]));

  for (std::size_t i = 0; i + 1 < report.tube_links.size(); ++i) {
    const double d0 = map.delta_mean[static_cast<std::size_t>(report.tube_links[i])];
    const double d1 = map.delta_mean[static_cast<std::size_t>(report.tube_links[i + 1])];
    if (!(d0 * d1 < 0.0)) report.alternation = false;
  }
  return report;
}

std::optional<std::string> validity_bound_check(const CouplingParams& params, int r,
                                                double fraction) {
  if (!params.is_micro()) return std::nullopt;
  const auto& m = params.micro();
  const double ratio = m.lambda / m.mu;
  if (static_cast<double>(r) >= fraction * ratio) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "R = %d is not small against lambda/mu = %.6g (low-energy picture needs "
                  "R << lambda/mu)",
                  r, ratio);
    return std::string(buf);
  }
  return std::nullopt;
}

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

void write_field_map_csv(const std::string& path, const FieldMap& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "m,n,k,E_mean,E2_mean,delta_mean\n";
  const auto& geom = *map.geom;
  for (LinkId l = 0; l < geom.n_links(); ++l) {
    const auto c = geom.link_coord(l);
    const std::size_t u = static_cast<std::size_t>(l);
    out << c.m << ',' << c.n << ',' << c.k << ',' << fmt(map.e_mean[u]) << ','
        << fmt(map.e2_mean[u]) << ',' << fmt(map.delta_mean[u]) << '\n';
  }
  if (!out) throw IoError("failed while writing '" + path + "'");
}

void write_potential_csv(const std::string& path, const PotentialTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "R,E_charged,E_vacuum,V,V_strong,rel_dev\n";
  for (const auto& row : table.rows)
    out << row.r << ',' << fmt(row.e_charged) << ',' << fmt(row.e_vacuum) << ',' << fmt(row.v)
        << ',' << fmt(row.v_strong) << ',' << fmt(row.rel_dev) << '\n';
  if (!out) throw IoError("failed while writing '" + path + "'");
}

}  // namespace fluxlat
