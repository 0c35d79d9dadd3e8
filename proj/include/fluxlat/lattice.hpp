#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace fluxlat {

enum class Boundary { Open, Periodic };

enum class Sublattice { A, B };

using VertexId = std::int32_t;
using LinkId = std::int32_t;
using PlaquetteId = std::int32_t;

inline constexpr LinkId kNoLink = -1;

/// Link attached to a vertex together with its divergence sign:
/// +1 for links emanating in +x/+y, -1 for links entering from -x/-y.
struct IncidentLink {
  LinkId link;
  int sign;
};

/// One edge of an oriented plaquette circulation (bottom, right: +1; top, left: -1).
struct PlaquetteLink {
  LinkId link;
  int sign;
};

/// Coordinates of a link: anchor vertex (m, n) and direction k
/// (k = 1 horizontal toward +x, k = 2 vertical toward +y).
struct LinkCoord {
  int m;
  int n;
  int k;
};

struct VertexCoord {
  int m;
  int n;
};

/// Vertex/link/plaquette index spaces of a rectangular Lx x Ly lattice.
///
/// Ordinals are dense: vertices row-major (m fastest), horizontal links
/// first then vertical links, plaquettes row-major anchored at their
/// lower-left vertex. Immutable after construction.
class LatticeGeometry {
 public:
  int lx() const { return lx_; }
  int ly() const { return ly_; }
  Boundary boundary() const { return boundary_; }

  int n_vertices() const { return lx_ * ly_; }
  int n_links() const { return static_cast<int>(link_coords_.size()); }
  int n_plaquettes() const { return static_cast<int>(plaquettes_.size()); }

  VertexId vertex_id(int m, int n) const;
  VertexCoord vertex_coord(VertexId v) const;

  /// Link ordinal for (m, n, k); kNoLink when the link does not exist
  /// (open boundary). Periodic coordinates wrap.
  LinkId link_id(int m, int n, int k) const;
  LinkCoord link_coord(LinkId l) const;

  PlaquetteId plaquette_id(int m, int n) const;
  VertexCoord plaquette_coord(PlaquetteId p) const;

  /// All links touching v, each with its divergence sign. Fixed order:
  /// +x out, +y out, -x in, -y in (absent boundary links skipped).
  const std::vector<IncidentLink>& incident_links(VertexId v) const;

  /// The four oriented edges of plaquette p: bottom (+1), right (+1),
  /// top (-1), left (-1).
  const std::array<PlaquetteLink, 4>& plaquette_links(PlaquetteId p) const;

  /// (-1)^(m+n) of a vertex; +1 on sublattice A, -1 on B.
  int stagger_sign(VertexId v) const;
  Sublattice sublattice(VertexId v) const;

  /// Stagger sign of a link's anchor vertex.
  int link_stagger_sign(LinkId l) const;

  bool is_boundary_vertex(VertexId v) const;

 private:
  friend LatticeGeometry build_geometry(int lx, int ly, Boundary boundary);
  LatticeGeometry() = default;

  int lx_ = 0;
  int ly_ = 0;
  Boundary boundary_ = Boundary::Open;
  int n_xlinks_ = 0;
  std::vector<LinkCoord> link_coords_;
  std::vector<int> link_stagger_;
  std::vector<std::vector<IncidentLink>> incident_;
  std::vector<std::array<PlaquetteLink, 4>> plaquettes_;
};

/// Construct the geometry. Requires lx, ly >= 2; throws ValidationError otherwise.
LatticeGeometry build_geometry(int lx, int ly, Boundary boundary);

std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

}  // namespace fluxlat
