#include "fluxlat/hamiltonian.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "fluxlat/errors.hpp"

namespace fluxlat {

namespace {

// A horizontal link and a vertical link sharing one vertex: the unit of the
// Rabi hopping term. Every unordered adjacent pair appears exactly once.
struct HopPair {
  LinkId h;
  LinkId v;
  int sh;  // stagger sign of h's anchor
  int sv;  // stagger sign of v's anchor
};

std::vector<HopPair> hop_pairs(const LatticeGeometry& geom) {
  std::vector<HopPair> pairs;
  for (VertexId w = 0; w < geom.n_vertices(); ++w) {
    const auto& inc = geom.incident_links(w);
    for (const auto& a : inc) {
      if (geom.link_coord(a.link).k != 1) continue;
      for (const auto& b : inc) {
        if (geom.link_coord(b.link).k != 2) continue;
        pairs.push_back({a.link, b.link, geom.link_stagger_sign(a.link),
                         geom.link_stagger_sign(b.link)});
      }
    }
  }
  return pairs;
}

// Both endpoints of every link, deduplicated per hop pair.
std::vector<std::vector<VertexId>> link_endpoints(const LatticeGeometry& geom) {
  std::vector<std::vector<VertexId>> ends(static_cast<std::size_t>(geom.n_links()));
  for (VertexId v = 0; v < geom.n_vertices(); ++v)
    for (const auto& il : geom.incident_links(v))
      ends[static_cast<std::size_t>(il.link)].push_back(v);
  return ends;
}

void require_electric(const GaugeSectorBasis& basis, const char* op) {
  if (basis.picture() != Picture::Electric)
    throw std::invalid_argument(std::string(op) + ": basis must be in the Electric picture");
}

void require_full(const GaugeSectorBasis& basis, Picture picture, const char* op) {
  if (basis.picture() != picture)
    throw std::invalid_argument(std::string(op) + ": basis picture mismatch");
  if (basis.projected())
    throw std::invalid_argument(std::string(op) + ": requires the full (unprojected) basis");
}

void require_valid_micro(const ChargeConfig& cfg, const LatticeGeometry& geom, const char* op) {
  const auto micro = as_convention(cfg, geom, ChargeConvention::MicroDelta);
  const auto report = validate_charges(micro, geom);
  if (!report.ok) {
    std::string msg = std::string(op) + ": invalid charge configuration";
    for (const auto& v : report.violations) msg += "; " + v;
    throw ValidationError(msg);
  }
}

void add_electric(SparseBuilder& builder, const GaugeSectorBasis& basis, double g_sq) {
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto s = basis.state(i);
    long sum_sq = 0;
    for (const auto v : s) sum_sq += static_cast<long>(v) * v;
    builder.add(static_cast<std::int64_t>(i), static_cast<std::int64_t>(i),
                0.5 * g_sq * static_cast<double>(sum_sq));
  }
}

void add_magnetic(SparseBuilder& builder, const GaugeSectorBasis& basis, double g_sq) {
  const auto& geom = basis.geometry();
  const int trunc = basis.trunc();
  const double amp = -1.0 / (2.0 * g_sq);
  std::vector<std::int8_t> scratch(static_cast<std::size_t>(basis.n_links()));

  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto s = basis.state(i);
    for (PlaquetteId p = 0; p < geom.n_plaquettes(); ++p) {
      const auto& pl = geom.plaquette_links(p);
      for (const int dir : {-1, +1}) {
        bool clipped = false;
        std::copy(s.begin(), s.end(), scratch.begin());
        for (const auto& e : pl) {
          auto& val = scratch[static_cast<std::size_t>(e.link)];
          const int moved = val + dir * e.sign;
          if (std::abs(moved) > trunc) {
            clipped = true;
            break;
          }
          val = static_cast<std::int8_t>(moved);
        }
        if (clipped) continue;
        const auto target = basis.index_of(std::span<const std::int8_t>(scratch));
        if (!target)
          throw std::logic_error("plaquette cycle left the basis on a Gauss-projected sector");
        builder.add(static_cast<std::int64_t>(*target), static_cast<std::int64_t>(i), amp);
      }
    }
  }
}

}  // namespace

SparseOperator build_electric(const GaugeSectorBasis& basis, double g_sq) {
  require_electric(basis, "build_electric");
  SparseBuilder builder(static_cast<std::int64_t>(basis.size()));
  add_electric(builder, basis, g_sq);
  return builder.build();
}

SparseOperator build_magnetic(const GaugeSectorBasis& basis, double g_sq) {
  require_electric(basis, "build_magnetic");
  SparseBuilder builder(static_cast<std::int64_t>(basis.size()));
  add_magnetic(builder, basis, g_sq);
  return builder.build();
}

SparseOperator build_kogut_susskind(const GaugeSectorBasis& basis, const CouplingParams& params) {
  require_electric(basis, "build_kogut_susskind");
  const double g_sq = params.g2();
  SparseBuilder builder(static_cast<std::int64_t>(basis.size()));
  add_electric(builder, basis, g_sq);
  add_magnetic(builder, basis, g_sq);
  return builder.build();
}

SparseOperator gauss_operator(const GaugeSectorBasis& basis, VertexId v, const ChargeConfig& cfg) {
  const auto& geom = basis.geometry();
  if (v < 0 || v >= geom.n_vertices()) throw std::out_of_range("gauss_operator: bad vertex");
  const auto want = basis.picture() == Picture::Electric ? ChargeConvention::QedQ
                                                         : ChargeConvention::MicroDelta;
  const int q = as_convention(cfg, geom, want).value_at(v);

  SparseBuilder builder(static_cast<std::int64_t>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const int g = gauss_sum_at(geom, basis.state(i), v, basis.picture()) - q;
    builder.add(static_cast<std::int64_t>(i), static_cast<std::int64_t>(i),
                static_cast<double>(g));
  }
  return builder.build();
}

namespace {

// Shared assembly for the microscopic rotor Hamiltonian and its staggered
// form. The two differ only in the Gauss convention of the diagonal and in
// the signs the hop moves pick up from the picture map.
SparseOperator build_rotor_impl(const GaugeSectorBasis& basis, const MicroParams& params,
                                const ChargeConfig& cfg, Picture picture) {
  const auto& geom = basis.geometry();
  const auto want = picture == Picture::Electric ? ChargeConvention::QedQ
                                                 : ChargeConvention::MicroDelta;
  const std::vector<int> target = as_convention(cfg, geom, want).dense(geom);
  const auto pairs = hop_pairs(geom);
  const int trunc = basis.trunc();

  SparseBuilder builder(static_cast<std::int64_t>(basis.size()));
  std::vector<std::int8_t> scratch(static_cast<std::size_t>(basis.n_links()));

  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto s = basis.state(i);

    double diag = 0.0;
    for (VertexId v = 0; v < geom.n_vertices(); ++v) {
      const int g = gauss_sum_at(geom, s, v, picture) - target[static_cast<std::size_t>(v)];
      diag += params.lambda * static_cast<double>(g) * g;
    }
    long sum_sq = 0;
    for (const auto val : s) sum_sq += static_cast<long>(val) * val;
    diag += params.mu * static_cast<double>(sum_sq);
    builder.add(static_cast<std::int64_t>(i), static_cast<std::int64_t>(i), diag);

    for (const auto& pr : pairs) {
      // lower the horizontal deviation, raise the vertical one, and h.c.;
      // in the Electric picture the unit steps carry the anchor signs
      const int dh = picture == Picture::Deviation ? 1 : pr.sh;
      const int dv = picture == Picture::Deviation ? 1 : pr.sv;
      for (const int dir : {+1, -1}) {
        const int new_h = s[static_cast<std::size_t>(pr.h)] - dir * dh;
        const int new_v = s[static_cast<std::size_t>(pr.v)] + dir * dv;
        if (std::abs(new_h) > trunc || std::abs(new_v) > trunc) continue;
        std::copy(s.begin(), s.end(), scratch.begin());
        scratch[static_cast<std::size_t>(pr.h)] = static_cast<std::int8_t>(new_h);
        scratch[static_cast<std::size_t>(pr.v)] = static_cast<std::int8_t>(new_v);
        const auto t = basis.index_of(std::span<const std::int8_t>(scratch));
        if (!t) throw std::logic_error("hop move left the full basis");
        builder.add(static_cast<std::int64_t>(*t), static_cast<std::int64_t>(i), params.omega);
      }
    }
  }
  return builder.build();
}

}  // namespace

SparseOperator build_microscopic_rotor(const GaugeSectorBasis& basis, const MicroParams& params,
                                       const ChargeConfig& cfg) {
  require_full(basis, Picture::Deviation, "build_microscopic_rotor");
  require_valid_micro(cfg, basis.geometry(), "build_microscopic_rotor");
  return build_rotor_impl(basis, params, cfg, Picture::Deviation);
}

SparseOperator stagger_equivalent(const GaugeSectorBasis& basis, const MicroParams& params,
                                  const ChargeConfig& cfg) {
  require_full(basis, Picture::Electric, "stagger_equivalent");
  require_valid_micro(cfg, basis.geometry(), "stagger_equivalent");
  return build_rotor_impl(basis, params, cfg, Picture::Electric);
}

EffectiveHamiltonian derive_effective(std::shared_ptr<const LatticeGeometry> geom, int trunc,
                                      const MicroParams& params, const ChargeConfig& cfg,
                                      std::size_t max_states) {
  const auto& g = *geom;
  require_valid_micro(cfg, g, "derive_effective");
  const ChargeConfig micro_cfg = as_convention(cfg, g, ChargeConvention::MicroDelta);
  const std::vector<int> target = micro_cfg.dense(g);

  GaugeSectorBasis sector =
      enumerate_gauss_sector(geom, micro_cfg, trunc, Picture::Deviation, max_states);
  if (sector.size() == 0)
    throw ValidationError("derive_effective: charge sector admits no Gauss-law states");

  const auto pairs = hop_pairs(g);
  const auto ends = link_endpoints(g);
  auto affected = [&](const HopPair& pr) {
    std::vector<VertexId> verts = ends[static_cast<std::size_t>(pr.h)];
    for (const VertexId v : ends[static_cast<std::size_t>(pr.v)])
      if (std::find(verts.begin(), verts.end(), v) == verts.end()) verts.push_back(v);
    return verts;
  };
  std::vector<std::vector<VertexId>> pair_vertices;
  pair_vertices.reserve(pairs.size());
  for (const auto& pr : pairs) pair_vertices.push_back(affected(pr));

  const int trunc_val = sector.trunc();
  SparseBuilder builder(static_cast<std::int64_t>(sector.size()));
  std::vector<std::int8_t> mid(static_cast<std::size_t>(sector.n_links()));
  std::vector<std::int8_t> fin(static_cast<std::size_t>(sector.n_links()));

  for (std::size_t a = 0; a < sector.size(); ++a) {
    const auto s = sector.state(a);

    long sum_sq = 0;
    for (const auto val : s) sum_sq += static_cast<long>(val) * val;
    builder.add(static_cast<std::int64_t>(a), static_cast<std::int64_t>(a),
                params.mu * static_cast<double>(sum_sq));

    for (std::size_t p1 = 0; p1 < pairs.size(); ++p1) {
      const auto& pr1 = pairs[p1];
      for (const int dir1 : {+1, -1}) {
        const int mh = s[static_cast<std::size_t>(pr1.h)] - dir1;
        const int mv = s[static_cast<std::size_t>(pr1.v)] + dir1;
        if (std::abs(mh) > trunc_val || std::abs(mv) > trunc_val) continue;
        std::copy(s.begin(), s.end(), mid.begin());
        mid[static_cast<std::size_t>(pr1.h)] = static_cast<std::int8_t>(mh);
        mid[static_cast<std::size_t>(pr1.v)] = static_cast<std::int8_t>(mv);

        double gauss_energy = 0.0;
        for (const VertexId w : pair_vertices[p1]) {
          const int gw = gauss_sum_at(g, mid, w, Picture::Deviation) -
                         target[static_cast<std::size_t>(w)];
          gauss_energy += params.lambda * static_cast<double>(gw) * gw;
        }
        if (gauss_energy == 0.0)
          throw ValidationError(
              "derive_effective: singular resolvent (zero Gauss energy outside the sector)");

        const double weight = -params.omega * params.omega / gauss_energy;
        for (const auto& pr2 : pairs) {
          for (const int dir2 : {+1, -1}) {
            const int fh = mid[static_cast<std::size_t>(pr2.h)] - dir2;
            const int fv = mid[static_cast<std::size_t>(pr2.v)] + dir2;
            if (std::abs(fh) > trunc_val || std::abs(fv) > trunc_val) continue;
            std::copy(mid.begin(), mid.end(), fin.begin());
            fin[static_cast<std::size_t>(pr2.h)] = static_cast<std::int8_t>(fh);
            fin[static_cast<std::size_t>(pr2.v)] = static_cast<std::int8_t>(fv);
            const auto b = sector.index_of(std::span<const std::int8_t>(fin));
            if (!b) continue;  // second hop did not return to the sector
            builder.add(static_cast<std::int64_t>(*b), static_cast<std::int64_t>(a), weight);
          }
        }
      }
    }
  }

  return {std::move(sector), builder.build()};
}

}  // namespace fluxlat
