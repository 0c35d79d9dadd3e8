#include "fluxlat/basis.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>

#include "fluxlat/errors.hpp"

namespace fluxlat {

namespace {

void check_trunc(int trunc) {
  if (trunc < 0 || trunc > 100)
    throw ValidationError("truncation must be in [0, 100], got " + std::to_string(trunc));
}

// Per-link incidence in the picture's Gauss convention: (vertex, sign) pairs.
// Electric uses the divergence signs, Deviation uses +1 everywhere.
std::vector<std::vector<std::pair<VertexId, int>>> link_incidences(const LatticeGeometry& geom,
                                                                   Picture picture) {
  std::vector<std::vector<std::pair<VertexId, int>>> inc(
      static_cast<std::size_t>(geom.n_links()));
  for (VertexId v = 0; v < geom.n_vertices(); ++v)
    for (const auto& il : geom.incident_links(v)) {
      const int s = picture == Picture::Electric ? il.sign : 1;
      inc[static_cast<std::size_t>(il.link)].emplace_back(v, s);
    }
  return inc;
}

}  // namespace

LinkConfig GaugeSectorBasis::state_config(std::size_t i) const {
  const auto s = state(i);
  return {picture_, std::vector<std::int8_t>(s.begin(), s.end())};
}

std::optional<std::size_t> GaugeSectorBasis::index_of(std::span<const std::int8_t> values) const {
  if (static_cast<int>(values.size()) != n_links_)
    throw std::invalid_argument("index_of: config has wrong link count");
  // binary search over the lexicographically sorted state blocks
  std::size_t lo = 0;
  std::size_t hi = n_states_;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const auto s = state(mid);
    if (std::lexicographical_compare(s.begin(), s.end(), values.begin(), values.end()))
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < n_states_) {
    const auto s = state(lo);
    if (std::equal(s.begin(), s.end(), values.begin())) return lo;
  }
  return std::nullopt;
}

std::optional<std::size_t> GaugeSectorBasis::index_of(const LinkConfig& config) const {
  if (config.picture != picture_)
    throw std::invalid_argument("index_of: picture tag does not match the basis");
  return index_of(std::span<const std::int8_t>(config.values));
}

GaugeSectorBasis enumerate_gauss_sector(std::shared_ptr<const LatticeGeometry> geom,
                                        const ChargeConfig& charges, int trunc, Picture picture,
                                        std::size_t max_states) {
  check_trunc(trunc);
  const auto& g = *geom;
  const auto want = picture == Picture::Electric ? ChargeConvention::QedQ
                                                 : ChargeConvention::MicroDelta;
  const ChargeConfig cfg = as_convention(charges, g, want);
  if (const auto report = validate_charges(cfg, g); !report.ok) {
    std::string msg = "enumerate_gauss_sector: invalid charge configuration";
    for (const auto& v : report.violations) msg += "; " + v;
    throw ValidationError(msg);
  }
  const std::vector<int> target = cfg.dense(g);

  const int n_links = g.n_links();
  const int n_vertices = g.n_vertices();
  const auto incidences = link_incidences(g, picture);

  std::vector<int> partial(static_cast<std::size_t>(n_vertices), 0);
  std::vector<int> remaining(static_cast<std::size_t>(n_vertices), 0);
  for (VertexId v = 0; v < n_vertices; ++v)
    remaining[static_cast<std::size_t>(v)] = static_cast<int>(g.incident_links(v).size());

  GaugeSectorBasis basis;
  basis.geom_ = geom;
  basis.n_links_ = n_links;
  basis.trunc_ = trunc;
  basis.picture_ = picture;
  basis.projected_ = true;
  basis.charges_ = cfg;

  std::vector<std::int8_t> current(static_cast<std::size_t>(n_links), 0);

  // DFS over links in ordinal order, values ascending, so states come out
  // in lexicographic order. A branch survives only while every vertex can
  // still reach its target: |target - partial| <= trunc * unassigned links.
  auto feasible = [&](VertexId v) {
    const std::size_t u = static_cast<std::size_t>(v);
    const int gap = std::abs(target[u] - partial[u]);
    if (remaining[u] == 0) return gap == 0;
    return gap <= trunc * remaining[u];
  };

  auto dfs = [&](auto&& self, int link) -> void {
    if (link == n_links) {
      if (basis.n_states_ >= max_states)
        throw CapacityError("gauss sector exceeds the configured maximum of " +
                            std::to_string(max_states) + " states");
      basis.data_.insert(basis.data_.end(), current.begin(), current.end());
      ++basis.n_states_;
      return;
    }
    const auto& inc = incidences[static_cast<std::size_t>(link)];
    for (const auto& [v, s] : inc) --remaining[static_cast<std::size_t>(v)];
    for (int val = -trunc; val <= trunc; ++val) {
      for (const auto& [v, s] : inc) partial[static_cast<std::size_t>(v)] += s * val;
      bool ok = true;
      for (const auto& [v, s] : inc)
        if (!feasible(v)) {
          ok = false;
          break;
        }
      if (ok) {
        current[static_cast<std::size_t>(link)] = static_cast<std::int8_t>(val);
        self(self, link + 1);
      }
      for (const auto& [v, s] : inc) partial[static_cast<std::size_t>(v)] -= s * val;
    }
    for (const auto& [v, s] : inc) ++remaining[static_cast<std::size_t>(v)];
  };

  // Vertices with no chance at all (e.g. |Q| beyond what incident links carry)
  // still enumerate to an empty basis via pruning; start the search.
  dfs(dfs, 0);
  return basis;
}

GaugeSectorBasis enumerate_full(std::shared_ptr<const LatticeGeometry> geom, int trunc,
                                Picture picture, std::size_t max_states) {
  check_trunc(trunc);
  const auto& g = *geom;
  const int n_links = g.n_links();
  const std::size_t radix = static_cast<std::size_t>(2 * trunc + 1);

  std::size_t count = 1;
  for (int l = 0; l < n_links; ++l) {
    if (count > max_states / radix + 1)
      throw CapacityError("full basis (" + std::to_string(radix) + "^" +
                          std::to_string(n_links) + " states) exceeds the configured maximum of " +
                          std::to_string(max_states));
    count *= radix;
  }
  if (count > max_states)
    throw CapacityError("full basis of " + std::to_string(count) +
                        " states exceeds the configured maximum of " + std::to_string(max_states));

  GaugeSectorBasis basis;
  basis.geom_ = geom;
  basis.n_links_ = n_links;
  basis.trunc_ = trunc;
  basis.picture_ = picture;
  basis.projected_ = false;
  basis.charges_ = ChargeConfig{};
  basis.n_states_ = count;
  basis.data_.resize(count * static_cast<std::size_t>(n_links));

  // odometer in lexicographic order, most significant link first
  std::vector<std::int8_t> current(static_cast<std::size_t>(n_links),
                                   static_cast<std::int8_t>(-trunc));
  for (std::size_t i = 0; i < count; ++i) {
    std::copy(current.begin(), current.end(),
              basis.data_.begin() + static_cast<std::ptrdiff_t>(i * current.size()));
    for (int l = n_links - 1; l >= 0; --l) {
      auto& v = current[static_cast<std::size_t>(l)];
      if (v < trunc) {
        ++v;
        break;
      }
      v = static_cast<std::int8_t>(-trunc);
    }
  }
  return basis;
}

LinkConfig convert_picture(const LinkConfig& config, const LatticeGeometry& geom) {
  if (static_cast<int>(config.values.size()) != geom.n_links())
    throw std::invalid_argument("convert_picture: config has wrong link count");
  LinkConfig out;
  out.picture = config.picture == Picture::Electric ? Picture::Deviation : Picture::Electric;
  out.values.resize(config.values.size());
  for (LinkId l = 0; l < geom.n_links(); ++l) {
    const std::size_t u = static_cast<std::size_t>(l);
    out.values[u] = static_cast<std::int8_t>(geom.link_stagger_sign(l) * config.values[u]);
  }
  return out;
}

GaugeSectorBasis convert_picture(const GaugeSectorBasis& basis) {
  const auto& g = basis.geometry();
  GaugeSectorBasis out;
  out.geom_ = basis.geometry_ptr();
  out.n_links_ = basis.n_links();
  out.trunc_ = basis.trunc();
  out.picture_ = basis.picture() == Picture::Electric ? Picture::Deviation : Picture::Electric;
  out.projected_ = basis.projected();
  out.charges_ = basis.projected() ? convert_charges(basis.charges(), g) : ChargeConfig{};
  out.n_states_ = basis.size();
  out.data_.resize(basis.size() * static_cast<std::size_t>(basis.n_links()));

  std::vector<std::size_t> order(basis.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::int8_t> converted(out.data_.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto s = basis.state(i);
    auto* dst = converted.data() + i * s.size();
    for (LinkId l = 0; l < basis.n_links(); ++l)
      dst[l] = static_cast<std::int8_t>(g.link_stagger_sign(l) * s[static_cast<std::size_t>(l)]);
  }
  const std::size_t width = static_cast<std::size_t>(basis.n_links());
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto* pa = converted.data() + a * width;
    const auto* pb = converted.data() + b * width;
    return std::lexicographical_compare(pa, pa + width, pb, pb + width);
  });
  for (std::size_t i = 0; i < basis.size(); ++i)
    std::copy_n(converted.data() + order[i] * width, width, out.data_.data() + i * width);
  return out;
}

int gauss_sum_at(const LatticeGeometry& geom, std::span<const std::int8_t> values, VertexId v,
                 Picture picture) {
  int sum = 0;
  for (const auto& il : geom.incident_links(v)) {
    const int s = picture == Picture::Electric ? il.sign : 1;
    sum += s * values[static_cast<std::size_t>(il.link)];
  }
  return sum;
}

}  // namespace fluxlat
