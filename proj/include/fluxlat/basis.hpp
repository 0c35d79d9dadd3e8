#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fluxlat/charges.hpp"
#include "fluxlat/lattice.hpp"

namespace fluxlat {

/// Electric: link values are E with div E = Q at each vertex.
/// Deviation: link values are delta with the plain-sum Gauss law
/// (sum of incident deltas = Delta). E = (-1)^(m+n) delta per link anchor.
enum class Picture { Electric, Deviation };

/// Default guard against combinatorial blow-up of enumerated bases.
inline constexpr std::size_t kDefaultMaxStates = 50'000'000;

/// One integer field value per link, tagged with its picture.
struct LinkConfig {
  Picture picture = Picture::Electric;
  std::vector<std::int8_t> values;
};

/// Enumerated set of truncated link-field configurations, either the full
/// product space or the projection onto one Gauss sector. States are stored
/// in lexicographic order over link ordinals (values ascending in
/// [-trunc, +trunc]), so ordinals are reproducible across runs.
class GaugeSectorBasis {
 public:
  std::size_t size() const { return n_states_; }
  int n_links() const { return n_links_; }
  int trunc() const { return trunc_; }
  Picture picture() const { return picture_; }
  bool projected() const { return projected_; }
  const LatticeGeometry& geometry() const { return *geom_; }
  std::shared_ptr<const LatticeGeometry> geometry_ptr() const { return geom_; }
  /// Charges in this basis's own convention (QedQ for Electric, MicroDelta
  /// for Deviation). Meaningful only for projected bases.
  const ChargeConfig& charges() const { return charges_; }

  std::span<const std::int8_t> state(std::size_t i) const {
    return {data_.data() + i * static_cast<std::size_t>(n_links_),
            static_cast<std::size_t>(n_links_)};
  }
  LinkConfig state_config(std::size_t i) const;

  /// Ordinal of a configuration, or nullopt when it is not in the basis.
  std::optional<std::size_t> index_of(std::span<const std::int8_t> values) const;
  std::optional<std::size_t> index_of(const LinkConfig& config) const;

 private:
  friend GaugeSectorBasis enumerate_gauss_sector(std::shared_ptr<const LatticeGeometry>,
                                                 const ChargeConfig&, int, Picture, std::size_t);
  friend GaugeSectorBasis enumerate_full(std::shared_ptr<const LatticeGeometry>, int, Picture,
                                         std::size_t);
  friend GaugeSectorBasis convert_picture(const GaugeSectorBasis&);

  std::shared_ptr<const LatticeGeometry> geom_;
  int n_links_ = 0;
  int trunc_ = 0;
  Picture picture_ = Picture::Electric;
  bool projected_ = false;
  ChargeConfig charges_;
  std::size_t n_states_ = 0;
  std::vector<std::int8_t> data_;  // n_states * n_links, lexicographically sorted blocks
};

/// Enumerates the Gauss sector of the given charges at truncation trunc.
/// The Gauss predicate matches the picture: divergence against Q for
/// Electric, plain incident sum against Delta for Deviation (charges are
/// converted to the matching convention first). Depth-first search with
/// divergence bounds pruning; an empty basis is a legal result.
GaugeSectorBasis enumerate_gauss_sector(std::shared_ptr<const LatticeGeometry> geom,
                                        const ChargeConfig& charges, int trunc,
                                        Picture picture = Picture::Electric,
                                        std::size_t max_states = kDefaultMaxStates);

/// All (2*trunc+1)^n_links configurations, unconstrained.
GaugeSectorBasis enumerate_full(std::shared_ptr<const LatticeGeometry> geom, int trunc,
                                Picture picture = Picture::Electric,
                                std::size_t max_states = kDefaultMaxStates);

/// Staggered transformation of a single configuration: value on each link
/// is multiplied by the anchor vertex sign and the picture tag flips.
/// Converting twice is the identity.
LinkConfig convert_picture(const LinkConfig& config, const LatticeGeometry& geom);

/// Staggered transformation of a whole basis; the converted states are
/// re-sorted so the result satisfies the lexicographic-order invariant.
GaugeSectorBasis convert_picture(const GaugeSectorBasis& basis);

/// Signed divergence (Electric) or plain incident sum (Deviation) at v.
int gauss_sum_at(const LatticeGeometry& geom, std::span<const std::int8_t> values, VertexId v,
                 Picture picture);

}  // namespace fluxlat
