#include "fluxlat/lattice.hpp"

#include <stdexcept>

#include "fluxlat/errors.hpp"

namespace fluxlat {

namespace {

int wrap(int x, int period) { return ((x % period) + period) % period; }

}  // namespace

VertexId LatticeGeometry::vertex_id(int m, int n) const {
  if (boundary_ == Boundary::Periodic) {
    m = wrap(m, lx_);
    n = wrap(n, ly_);
  }
  if (m < 0 || m >= lx_ || n < 0 || n >= ly_)
    throw std::out_of_range("vertex_id: coordinate outside lattice");
  return static_cast<VertexId>(n * lx_ + m);
}

VertexCoord LatticeGeometry::vertex_coord(VertexId v) const {
  if (v < 0 || v >= n_vertices()) throw std::out_of_range("vertex_coord: bad ordinal");
  return {v % lx_, v / lx_};
}

LinkId LatticeGeometry::link_id(int m, int n, int k) const {
  if (k != 1 && k != 2) throw std::out_of_range("link_id: k must be 1 or 2");
  if (boundary_ == Boundary::Periodic) {
    m = wrap(m, lx_);
    n = wrap(n, ly_);
    return k == 1 ? static_cast<LinkId>(n * lx_ + m)
                  : static_cast<LinkId>(n_xlinks_ + n * lx_ + m);
  }
  if (m < 0 || n < 0) return kNoLink;
  if (k == 1) {
    if (m >= lx_ - 1 || n >= ly_) return kNoLink;
    return static_cast<LinkId>(n * (lx_ - 1) + m);
  }
  if (m >= lx_ || n >= ly_ - 1) return kNoLink;
  return static_cast<LinkId>(n_xlinks_ + n * lx_ + m);
}

LinkCoord LatticeGeometry::link_coord(LinkId l) const {
  if (l < 0 || l >= n_links()) throw std::out_of_range("link_coord: bad ordinal");
  return link_coords_[static_cast<std::size_t>(l)];
}

PlaquetteId LatticeGeometry::plaquette_id(int m, int n) const {
  const int npx = boundary_ == Boundary::Open ? lx_ - 1 : lx_;
  const int npy = boundary_ == Boundary::Open ? ly_ - 1 : ly_;
  if (boundary_ == Boundary::Periodic) {
    m = wrap(m, lx_);
    n = wrap(n, ly_);
  }
  if (m < 0 || m >= npx || n < 0 || n >= npy)
    throw std::out_of_range("plaquette_id: coordinate outside lattice");
  return static_cast<PlaquetteId>(n * npx + m);
}

VertexCoord LatticeGeometry::plaquette_coord(PlaquetteId p) const {
  if (p < 0 || p >= n_plaquettes()) throw std::out_of_range("plaquette_coord: bad ordinal");
  const int npx = boundary_ == Boundary::Open ? lx_ - 1 : lx_;
  return {p % npx, p / npx};
}

const std::vector<IncidentLink>& LatticeGeometry::incident_links(VertexId v) const {
  if (v < 0 || v >= n_vertices()) throw std::out_of_range("incident_links: bad vertex");
  return incident_[static_cast<std::size_t>(v)];
}

const std::array<PlaquetteLink, 4>& LatticeGeometry::plaquette_links(PlaquetteId p) const {
  if (p < 0 || p >= n_plaquettes()) throw std::out_of_range("plaquette_links: bad plaquette");
  return plaquettes_[static_cast<std::size_t>(p)];
}

int LatticeGeometry::stagger_sign(VertexId v) const {
  const auto c = vertex_coord(v);
  return (c.m + c.n) % 2 == 0 ? +1 : -1;
}

Sublattice LatticeGeometry::sublattice(VertexId v) const {
  return stagger_sign(v) > 0 ? Sublattice::A : Sublattice::B;
}

int LatticeGeometry::link_stagger_sign(LinkId l) const {
  if (l < 0 || l >= n_links()) throw std::out_of_range("link_stagger_sign: bad ordinal");
  return link_stagger_[static_cast<std::size_t>(l)];
}

bool LatticeGeometry::is_boundary_vertex(VertexId v) const {
  if (boundary_ == Boundary::Periodic) return false;
  const auto c = vertex_coord(v);
  return c.m == 0 || c.m == lx_ - 1 || c.n == 0 || c.n == ly_ - 1;
}

LatticeGeometry build_geometry(int lx, int ly, Boundary boundary) {
  if (lx < 2 || ly < 2)
    throw ValidationError("invalid geometry: lattice requires lx >= 2 and ly >= 2, got " +
                          std::to_string(lx) + "x" + std::to_string(ly));

  LatticeGeometry g;
  g.lx_ = lx;
  g.ly_ = ly;
  g.boundary_ = boundary;

  const bool open = boundary == Boundary::Open;
  const int nx_per_row = open ? lx - 1 : lx;
  const int ny_rows = open ? ly - 1 : ly;
  g.n_xlinks_ = nx_per_row * ly;
  const int n_links = g.n_xlinks_ + lx * ny_rows;

  g.link_coords_.resize(static_cast<std::size_t>(n_links));
  for (int n = 0; n < ly; ++n)
    for (int m = 0; m < nx_per_row; ++m)
      g.link_coords_[static_cast<std::size_t>(g.link_id(m, n, 1))] = {m, n, 1};
  for (int n = 0; n < ny_rows; ++n)
    for (int m = 0; m < lx; ++m)
      g.link_coords_[static_cast<std::size_t>(g.link_id(m, n, 2))] = {m, n, 2};

  g.link_stagger_.resize(g.link_coords_.size());
  for (std::size_t l = 0; l < g.link_coords_.size(); ++l) {
    const auto& c = g.link_coords_[l];
    g.link_stagger_[l] = (c.m + c.n) % 2 == 0 ? +1 : -1;
  }

  g.incident_.resize(static_cast<std::size_t>(lx * ly));
  for (int n = 0; n < ly; ++n) {
    for (int m = 0; m < lx; ++m) {
      auto& inc = g.incident_[static_cast<std::size_t>(n * lx + m)];
      if (LinkId l = g.link_id(m, n, 1); l != kNoLink) inc.push_back({l, +1});
      if (LinkId l = g.link_id(m, n, 2); l != kNoLink) inc.push_back({l, +1});
      if (open && m == 0) {
        // no -x link
      } else if (LinkId l = g.link_id(m - 1, n, 1); l != kNoLink) {
        inc.push_back({l, -1});
      }
      if (open && n == 0) {
        // no -y link
      } else if (LinkId l = g.link_id(m, n - 1, 2); l != kNoLink) {
        inc.push_back({l, -1});
      }
    }
  }

  const int npx = open ? lx - 1 : lx;
  const int npy = open ? ly - 1 : ly;
  g.plaquettes_.resize(static_cast<std::size_t>(npx * npy));
  for (int n = 0; n < npy; ++n) {
    for (int m = 0; m < npx; ++m) {
      // circulation matching theta1(m,n) + theta2(m+1,n) - theta1(m,n+1) - theta2(m,n)
      std::array<PlaquetteLink, 4> pl = {{{g.link_id(m, n, 1), +1},
                                          {g.link_id(m + 1, n, 2), +1},
                                          {g.link_id(m, n + 1, 1), -1},
                                          {g.link_id(m, n, 2), -1}}};
      g.plaquettes_[static_cast<std::size_t>(n * npx + m)] = pl;
    }
  }

  return g;
}

std::string to_string(Boundary b) { return b == Boundary::Open ? "open" : "periodic"; }

Boundary boundary_from_string(const std::string& s) {
  if (s == "open") return Boundary::Open;
  if (s == "periodic") return Boundary::Periodic;
  throw ValidationError("unknown boundary '" + s + "' (expected 'open' or 'periodic')");
}

}  // namespace fluxlat
