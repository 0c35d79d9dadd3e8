#pragma once

#include "fluxlat/basis.hpp"
#include "fluxlat/coupling.hpp"
#include "fluxlat/sparse.hpp"

namespace fluxlat {

/// (g^2/2) sum_links E^2, diagonal. Requires an Electric-picture basis.
SparseOperator build_electric(const GaugeSectorBasis& basis, double g_sq);

/// -(1/g^2) sum_plaquettes cos(circulation): matrix element -1/(2 g^2)
/// between states connected by one plaquette raise/lower cycle. Cycles that
/// would push a link outside [-trunc, trunc] are dropped.
SparseOperator build_magnetic(const GaugeSectorBasis& basis, double g_sq);

/// Electric plus magnetic part: the dimensionless gauge Hamiltonian.
SparseOperator build_kogut_susskind(const GaugeSectorBasis& basis, const CouplingParams& params);

/// Diagonal Gauss operator at vertex v: div E - Q (Electric picture) or the
/// plain incident sum minus Delta (Deviation picture). Charges are converted
/// to the basis's convention.
SparseOperator gauss_operator(const GaugeSectorBasis& basis, VertexId v, const ChargeConfig& cfg);

/// Microscopic rotor Hamiltonian on the full Deviation-picture basis:
/// lambda sum_v G_v^2 + mu sum_links delta^2 + H_R, where H_R hops one unit
/// of deviation between every vertex-sharing horizontal/vertical link pair
/// with amplitude omega (truncation-clipped).
SparseOperator build_microscopic_rotor(const GaugeSectorBasis& basis, const MicroParams& params,
                                       const ChargeConfig& cfg);

/// The same Hamiltonian written in staggered (Electric) variables on the
/// full Electric-picture basis; related to build_microscopic_rotor by the
/// basis permutation of the picture map, so the spectra coincide.
SparseOperator stagger_equivalent(const GaugeSectorBasis& basis, const MicroParams& params,
                                  const ChargeConfig& cfg);

struct EffectiveHamiltonian {
  GaugeSectorBasis sector;  // Deviation picture, Gauss-projected
  SparseOperator op;        // on sector ordinals, microscopic energy units
};

/// Second-order effective Hamiltonian on the Gauss sector, computed from the
/// resolvent restricted to the orthogonal complement of the sector:
///   H_eff = P H_E P - P H_R (H_G)^-1 (1 - P) H_R P.
/// Includes the second-order diagonal (hop-and-return) term, which is a
/// state-independent constant away from the truncation boundary.
EffectiveHamiltonian derive_effective(std::shared_ptr<const LatticeGeometry> geom, int trunc,
                                      const MicroParams& params, const ChargeConfig& cfg,
                                      std::size_t max_states = kDefaultMaxStates);

}  // namespace fluxlat
