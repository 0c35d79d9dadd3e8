#include "fluxlat/charges.hpp"

#include <algorithm>

#include "fluxlat/errors.hpp"

namespace fluxlat {

ChargeConfig ChargeConfig::make(const LatticeGeometry& geom, ChargeConvention convention,
                                const std::vector<ChargeEntry>& entries) {
  ChargeConfig cfg;
  cfg.convention_ = convention;
  for (const auto& e : entries) {
    if (e.m < 0 || e.m >= geom.lx() || e.n < 0 || e.n >= geom.ly())
      throw ValidationError("charge vertex (" + std::to_string(e.m) + "," + std::to_string(e.n) +
                            ") outside the " + std::to_string(geom.lx()) + "x" +
                            std::to_string(geom.ly()) + " lattice");
    if (e.q == 0) continue;
    cfg.entries_.emplace_back(geom.vertex_id(e.m, e.n), e.q);
  }
  std::sort(cfg.entries_.begin(), cfg.entries_.end());
  for (std::size_t i = 1; i < cfg.entries_.size(); ++i)
    if (cfg.entries_[i].first == cfg.entries_[i - 1].first)
      throw ValidationError("duplicate charge entry at vertex ordinal " +
                            std::to_string(cfg.entries_[i].first));
  return cfg;
}

int ChargeConfig::value_at(VertexId v) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), std::make_pair(v, 0),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
  if (it != entries_.end() && it->first == v) return it->second;
  return 0;
}

std::vector<int> ChargeConfig::dense(const LatticeGeometry& geom) const {
  std::vector<int> out(static_cast<std::size_t>(geom.n_vertices()), 0);
  for (const auto& [v, q] : entries_) {
    if (v < 0 || v >= geom.n_vertices())
      throw ValidationError("charge config does not fit the given geometry");
    out[static_cast<std::size_t>(v)] = q;
  }
  return out;
}

ValidationReport validate_charges(const ChargeConfig& cfg, const LatticeGeometry& geom) {
  ValidationReport report;
  if (cfg.convention() == ChargeConvention::QedQ) {
    long total = 0;
    for (const auto& [v, q] : cfg.entries()) {
      (void)geom.vertex_coord(v);  // bounds check
      total += q;
    }
    if (total != 0) {
      report.ok = false;
      report.violations.push_back("total charge must be zero, got " + std::to_string(total));
    }
    return report;
  }
  long sum_a = 0;
  long sum_b = 0;
  for (const auto& [v, q] : cfg.entries()) {
    if (geom.sublattice(v) == Sublattice::A)
      sum_a += q;
    else
      sum_b += q;
  }
  if (sum_a != 0) {
    report.ok = false;
    report.violations.push_back("sublattice A sum of Delta must be zero, got " +
                                std::to_string(sum_a) +
                                " (opposite charges an odd distance apart land on "
                                "different sublattices with equal Delta sign)");
  }
  if (sum_b != 0) {
    report.ok = false;
    report.violations.push_back("sublattice B sum of Delta must be zero, got " +
                                std::to_string(sum_b));
  }
  return report;
}

ChargeConfig convert_charges(const ChargeConfig& cfg, const LatticeGeometry& geom) {
  std::vector<ChargeEntry> flipped;
  flipped.reserve(cfg.entries().size());
  for (const auto& [v, q] : cfg.entries()) {
    const auto c = geom.vertex_coord(v);
    flipped.push_back({c.m, c.n, geom.stagger_sign(v) * q});
  }
  const auto target = cfg.convention() == ChargeConvention::QedQ ? ChargeConvention::MicroDelta
                                                                 : ChargeConvention::QedQ;
  return ChargeConfig::make(geom, target, flipped);
}

ChargeConfig as_convention(const ChargeConfig& cfg, const LatticeGeometry& geom,
                           ChargeConvention target) {
  return cfg.convention() == target ? cfg : convert_charges(cfg, geom);
}

std::string to_string(ChargeConvention c) {
  return c == ChargeConvention::QedQ ? "qed" : "delta";
}

ChargeConvention convention_from_string(const std::string& s) {
  if (s == "qed") return ChargeConvention::QedQ;
  if (s == "delta") return ChargeConvention::MicroDelta;
  throw ValidationError("unknown charge convention '" + s + "' (expected 'qed' or 'delta')");
}

}  // namespace fluxlat
