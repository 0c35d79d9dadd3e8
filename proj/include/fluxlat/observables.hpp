#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fluxlat/basis.hpp"
#include "fluxlat/coupling.hpp"
#include "fluxlat/solver.hpp"

namespace fluxlat {

/// Per-link field expectations of a state: <E>, <E^2>, and the
/// deviation-picture value <delta> = stagger * <E>.
struct FieldMap {
  std::shared_ptr<const LatticeGeometry> geom;
  std::vector<double> e_mean;
  std::vector<double> e2_mean;
  std::vector<double> delta_mean;
  // source metadata
  ChargeConfig charges;
  int trunc = 0;
  std::optional<double> g_sq;
};

/// Diagonal field expectations from a unit-norm state over the basis;
/// rejects states whose norm deviates from one by more than 1e-8.
FieldMap field_map(std::span<const double> state, const GaugeSectorBasis& basis);

struct PotentialRow {
  int r;
  double e_charged;
  double e_vacuum;
  double v;         // e_charged - e_vacuum
  double v_strong;  // g^2 R / 2
  double rel_dev;   // |v - v_strong| / v_strong
};

struct PotentialTable {
  std::vector<PotentialRow> rows;  // ascending in R
  std::vector<std::string> warnings;
};

struct PotentialSolverOptions {
  double tol = 1e-10;
  int max_iter = 5000;
  std::uint64_t seed = kLanczosSeed;
  std::size_t max_states = kDefaultMaxStates;
};

/// Vacuum-subtracted ground energies of +1/-1 charge pairs placed
/// co-linearly R links apart on the middle row, against the strong-coupling
/// line g^2 R / 2. Every R must be even (the microscopic charge constraints
/// admit no lone odd-separation pair) and the pair must fit on the lattice.
PotentialTable static_potential(std::shared_ptr<const LatticeGeometry> geom,
                                const CouplingParams& params, int trunc,
                                const std::vector<int>& r_list,
                                const PotentialSolverOptions& opts = {});

/// Charge placement used by static_potential for a given separation.
std::pair<ChargeEntry, ChargeEntry> potential_charge_pair(const LatticeGeometry& geom, int r);

struct FluxTubeReport {
  std::vector<LinkId> tube_links;    // in order from + charge to - charge
  std::vector<double> on_tube;       // <E> signed along the tube direction
  double off_tube_max = 0.0;         // max |<E>| off the tube
  bool alternation = true;           // delta-picture signs alternate along the tube
};

/// Profile of the straight-line tube between a single co-linear +1/-1 pair.
/// An empty charge config reports an empty tube; anything else that is not
/// one co-linear unit pair is rejected.
FluxTubeReport flux_tube_report(const FieldMap& map, const ChargeConfig& charges);

/// Warns when R is no longer small against lambda/mu, where the low-energy
/// flux-tube picture starts to break down.
std::optional<std::string> validity_bound_check(const CouplingParams& params, int r,
                                                double fraction = 0.1);

/// CSV artifacts; headers are part of the interface:
///   field map:  m,n,k,E_mean,E2_mean,delta_mean
///   potential:  R,E_charged,E_vacuum,V,V_strong,rel_dev
void write_field_map_csv(const std::string& path, const FieldMap& map);
void write_potential_csv(const std::string& path, const PotentialTable& table);

}  // namespace fluxlat
