#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fluxlat/lattice.hpp"

namespace fluxlat {

/// QedQ: charges Q with div E = Q; MicroDelta: trap deformations Delta
/// with the plain-sum Gauss law. Related by Q = (-1)^(m+n) Delta.
enum class ChargeConvention { QedQ, MicroDelta };

struct ChargeEntry {
  int m;
  int n;
  int q;
};

/// Integer static charges per vertex in one of the two conventions.
class ChargeConfig {
 public:
  ChargeConfig() = default;

  /// Builds from a sparse list; rejects out-of-range vertices and
  /// duplicate entries. Zero-valued entries are dropped.
  static ChargeConfig make(const LatticeGeometry& geom, ChargeConvention convention,
                           const std::vector<ChargeEntry>& entries);

  ChargeConvention convention() const { return convention_; }
  const std::vector<std::pair<VertexId, int>>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  int value_at(VertexId v) const;

  /// Dense per-vertex values for a given geometry.
  std::vector<int> dense(const LatticeGeometry& geom) const;

 private:
  ChargeConvention convention_ = ChargeConvention::QedQ;
  std::vector<std::pair<VertexId, int>> entries_;  // sorted by vertex, nonzero values
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> violations;
};

/// QedQ checks total neutrality; MicroDelta checks that each sublattice
/// sum vanishes. Violations are reported, not thrown.
ValidationReport validate_charges(const ChargeConfig& cfg, const LatticeGeometry& geom);

/// Q <-> Delta via the staggered sign; an involution.
ChargeConfig convert_charges(const ChargeConfig& cfg, const LatticeGeometry& geom);

/// The config expressed in the requested convention (converting if needed).
ChargeConfig as_convention(const ChargeConfig& cfg, const LatticeGeometry& geom,
                           ChargeConvention target);

std::string to_string(ChargeConvention c);
ChargeConvention convention_from_string(const std::string& s);

}  // namespace fluxlat
