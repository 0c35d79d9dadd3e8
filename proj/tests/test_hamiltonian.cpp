#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>

#include "fluxlat/errors.hpp"
#include "fluxlat/hamiltonian.hpp"
#include "fluxlat/solver.hpp"
#include "oracle_helpers.hpp"

using namespace fluxlat;

namespace {

std::shared_ptr<const LatticeGeometry> geom_ptr(int lx, int ly, Boundary b) {
  return std::make_shared<const LatticeGeometry>(build_geometry(lx, ly, b));
}

std::size_t find_state(const GaugeSectorBasis& basis, const std::vector<std::int8_t>& values) {
  const auto idx = basis.index_of(std::span<const std::int8_t>(values));
  REQUIRE(idx.has_value());
  return *idx;
}

// uniform plaquette loop on the single open plaquette, as link values
std::vector<std::int8_t> single_plaquette_loop(const LatticeGeometry& geom, int circulation) {
  std::vector<std::int8_t> values((std::size_t)geom.n_links(), 0);
  for (const auto& e : geom.plaquette_links(0))
    values[(std::size_t)e.link] = (std::int8_t)(circulation * e.sign);
  return values;
}

}  // namespace

TEST_CASE("electric term is the diagonal field energy") {
  const auto geom = geom_ptr(2, 2, Boundary::Open);
  const auto sector = enumerate_gauss_sector(geom, ChargeConfig{}, 1);
  const auto h_e = build_electric(sector, 10.0);
  CHECK(h_e.is_symmetric());

  const auto zero = find_state(sector, std::vector<std::int8_t>(4, 0));
  CHECK(h_e.coeff((std::int64_t)zero, (std::int64_t)zero) == 0.0);
  const auto loop = find_state(sector, single_plaquette_loop(*geom, 1));
  CHECK(h_e.coeff((std::int64_t)loop, (std::int64_t)loop) == doctest::Approx(20.0).epsilon(1e-14));
}

TEST_CASE("flux tube state carries the strong-coupling string energy") {
  // two links at E = 1 between an even-separation pair: energy g^2 R / 2 = 10
  const auto geom = geom_ptr(4, 2, Boundary::Open);
  const auto pair = ChargeConfig::make(*geom, ChargeConvention::QedQ, {{0, 0, 1}, {2, 0, -1}});
  const auto sector = enumerate_gauss_sector(geom, pair, 1);
  std::vector<std::int8_t> tube((std::size_t)geom->n_links(), 0);
  tube[(std::size_t)geom->link_id(0, 0, 1)] = 1;
  tube[(std::size_t)geom->link_id(1, 0, 1)] = 1;
  const auto idx = find_state(sector, tube);
  const auto h_e = build_electric(sector, 10.0);
  CHECK(h_e.coeff((std::int64_t)idx, (std::int64_t)idx) == doctest::Approx(10.0).epsilon(1e-14));
}

TEST_CASE("magnetic term flips one plaquette at a time") {
  const auto geom = geom_ptr(2, 2, Boundary::Open);
  const auto sector = enumerate_gauss_sector(geom, ChargeConfig{}, 1);
  const double g_sq = 10.0;
  const auto h_b = build_magnetic(sector, g_sq);
  CHECK(h_b.is_symmetric());

  const auto zero = find_state(sector, std::vector<std::int8_t>(4, 0));
  const auto plus = find_state(sector, single_plaquette_loop(*geom, 1));
  const auto minus = find_state(sector, single_plaquette_loop(*geom, -1));
  CHECK(h_b.coeff((std::int64_t)plus, (std::int64_t)zero) ==
        doctest::Approx(-1.0 / (2.0 * g_sq)).epsilon(1e-14));
  CHECK(h_b.coeff((std::int64_t)plus, (std::int64_t)minus) == 0.0);
  CHECK(h_b.coeff((std::int64_t)plus, (std::int64_t)plus) == 0.0);

  const auto frozen = enumerate_gauss_sector(geom, ChargeConfig{}, 0);
  CHECK(build_magnetic(frozen, g_sq).nnz() == 0);
}

TEST_CASE("single-plaquette gauge Hamiltonian matches the 3-state oracle") {
  const auto geom = geom_ptr(2, 2, Boundary::Open);
  const auto sector = enumerate_gauss_sector(geom, ChargeConfig{}, 1);
  const double g_sq = 10.0;
  const auto h = build_kogut_susskind(sector, CouplingParams::from_g2(g_sq));

  // states in lexicographic order: loop(-1), zero, loop(+1)
  Eigen::MatrixXd expected(3, 3);
  expected << 20.0, -0.05, 0.0, -0.05, 0.0, -0.05, 0.0, -0.05, 20.0;
  const auto dense = oracle::to_dense(h);
  CHECK((dense - expected).cwiseAbs().maxCoeff() == 0.0);

  // closed-form ground energy of the 3-state system
  const double expected_ground = 10.0 - std::sqrt(100.0 + 0.005);  // ~ -2.4999875e-4
  const auto spectrum = dense_spectrum(h);
  CHECK(spectrum.eigenvalues.front() == doctest::Approx(expected_ground).epsilon(1e-12));

  const auto frozen = enumerate_gauss_sector(geom, ChargeConfig{}, 0);
  CHECK(build_kogut_susskind(frozen, CouplingParams::from_g2(3.0)).nnz() == 0);
}

TEST_CASE("gauss operators are diagonal and vanish on closed loops") {
  const auto geom = geom_ptr(2, 2, Boundary::Open);
  const auto full = enumerate_full(geom, 1);

  const auto zero = find_state(full, std::vector<std::int8_t>(4, 0));
  for (VertexId v = 0; v < geom->n_vertices(); ++v) {
    const auto g0 = gauss_operator(full, v, ChargeConfig{});
    CHECK(g0.coeff((std::int64_t)zero, (std::int64_t)zero) == 0.0);
  }

  const auto charged = ChargeConfig::make(*geom, ChargeConvention::QedQ, {{0, 0, 1}, {1, 1, -1}});
  const auto gq = gauss_operator(full, geom->vertex_id(0, 0), charged);
  CHECK(gq.coeff((std::int64_t)zero, (std::int64_t)zero) == -1.0);

  const auto loop = find_state(full, single_plaquette_loop(*geom, 1));
  for (VertexId v = 0; v < geom->n_vertices(); ++v) {
    const auto g0 = gauss_operator(full, v, ChargeConfig{});
    CHECK(g0.coeff((std::int64_t)loop, (std::int64_t)loop) == 0.0);
  }
}

TEST_CASE("deviation-picture gauss operator uses the plain incident sum") {
  const auto geom = geom_ptr(2, 2, Boundary::Open);
  const auto full = enumerate_full(geom, 1, Picture::Deviation);

  std::vector<std::int8_t> one_link((std::size_t)geom->n_links(), 0);
  const LinkId l = geom->link_id(0, 0, 1);
  one_link[(std::size_t)l] = 1;
  const auto idx = find_state(full, one_link);

  // both endpoints see +1: no divergence signs in this picture
  for (const int m : {0, 1}) {
    const auto g = gauss_operator(full, geom->vertex_id(m, 0), ChargeConfig{});
    CHECK(g.coeff((std::int64_t)idx, (std::int64_t)idx) == 1.0);
  }

  // a Delta charge shifts the target
  const auto delta =
      ChargeConfig::make(*geom, ChargeConvention::MicroDelta, {{0, 0, 1}, {1, 1, -1}});
  const auto g = gauss_operator(full, geom->vertex_id(0, 0), delta);
  CHECK(g.coeff((std::int64_t)idx, (std::int64_t)idx) == 0.0);
}

TEST_CASE("gauge invariance: the Hamiltonian commutes with every gauss operator") {
  const auto geom = geom_ptr(2, 2, Boundary::Open);
  const auto full = enumerate_full(geom, 2);
  const auto h = build_kogut_susskind(full, CouplingParams::from_g2(7.0));

  for (VertexId v = 0; v < geom->n_vertices(); ++v) {
    const auto g = gauss_operator(full, v, ChargeConfig{});
    std::vector<double> diag((std::size_t)full.size());
    for (std::size_t i = 0; i < full.size(); ++i)
      diag[i] = g.coeff((std::int64_t)i, (std::int64_t)i);
    double max_comm = 0.0;
    h.for_each_entry([&](std::int64_t r, std::int64_t c, double val) {
      max_comm = std::max(max_comm,
                          std::abs(val * (diag[(std::size_t)c] - diag[(std::size_t)r])));
    });
    CHECK(max_comm <= 1e-12);
  }
}

TEST_CASE("projected assembly equals the full-basis restriction") {
  const auto geom = geom_ptr(2, 2, Boundary::Open);
  const auto full = enumerate_full(geom, 1);
  const auto sector = enumerate_gauss_sector(geom, ChargeConfig{}, 1);
  const auto params = CouplingParams::from_g2(5.0);
  const auto h_full = build_kogut_susskind(full, params);
  const auto h_proj = build_kogut_susskind(sector, params);

  for (std::size_t a = 0; a < sector.size(); ++a)
    for (std::size_t b = 0; b < sector.size(); ++b) {
      const auto ia = full.index_of(sector.state(a));
      const auto ib = full.index_of(sector.state(b));
      REQUIRE(ia.has_value());
      REQUIRE(ib.has_value());
      CHECK(h_proj.coeff((std::int64_t)a, (std::int64_t)b) ==
            h_full.coeff((std::int64_t)*ia, (std::int64_t)*ib));
    }
}

TEST_CASE("microscopic rotor Hamiltonian: diagonal limit") {
  const auto geom = geom_ptr(2, 2, Boundary::Open);
  const auto full = enumerate_full(geom, 1, Picture::Deviation);

  // omega = 0: diagonal, counting violated vertices
  const auto h = build_microscopic_rotor(full, {1.0, 0.0, 0.0}, ChargeConfig{});
  bool diagonal = true;
  h.for_each_entry([&](std::int64_t r, std::int64_t c, double) {
    if (r != c) diagonal = false;
  });
  CHECK(diagonal);

  const auto zero = find_state(full, std::vector<std::int8_t>(4, 0));
  CHECK(h.coeff((std::int64_t)zero, (std::int64_t)zero) == 0.0);

  std::vector<std::int8_t> one_link((std::size_t)geom->n_links(), 0);
  one_link[(std::size_t)geom->link_id(0, 0, 1)] = 1;
  const auto idx = find_state(full, one_link);
  CHECK(h.coeff((std::int64_t)idx, (std::int64_t)idx) == 2.0);  // two violated endpoints

  // with mu on, the diagonal picks up the field energy
  const auto h_mu = build_microscopic_rotor(full, {1.0, 0.5, 0.0}, ChargeConfig{});
  CHECK(h_mu.coeff((std::int64_t)idx, (std::int64_t)idx) == 2.5);
}

TEST_CASE("the hopping term couples four orthogonal link pairs per vertex cell") {
  // from the all-zero state each adjacent horizontal/vertical pair opens two
  // hop directions, so the row carries 2 x (number of pairs) entries
  const auto open = geom_ptr(2, 2, Boundary::Open);
  const auto full_open = enumerate_full(open, 1, Picture::Deviation);
  const auto h_open = build_microscopic_rotor(full_open, {1.0, 0.0, 0.25}, ChargeConfig{});
  const auto zero_open =
      full_open.index_of(std::span<const std::int8_t>(std::vector<std::int8_t>(4, 0)));
  REQUIRE(zero_open.has_value());
  int count_open = 0;
  h_open.for_each_entry([&](std::int64_t r, std::int64_t c, double v) {
    if (c == (std::int64_t)*zero_open && r != c) {
      ++count_open;
      CHECK(v == 0.25);
    }
  });
  CHECK(count_open == 2 * 4);  // one pair per corner of the single plaquette

  const auto torus = geom_ptr(2, 2, Boundary::Periodic);
  const auto full_torus = enumerate_full(torus, 1, Picture::Deviation);
  const auto h_torus = build_microscopic_rotor(full_torus, {1.0, 0.0, 0.25}, ChargeConfig{});
  const auto zero_torus =
      full_torus.index_of(std::span<const std::int8_t>(std::vector<std::int8_t>(8, 0)));
  REQUIRE(zero_torus.has_value());
  int count_torus = 0;
  h_torus.for_each_entry([&](std::int64_t r, std::int64_t c, double) {
    if (c == (std::int64_t)*zero_torus && r != c) ++count_torus;
  });
  CHECK(count_torus == 2 * 4 * torus->n_vertices());  // four pairs per vertex
}

TEST_CASE("microscopic rotor Hamiltonian rejects invalid inputs") {
  const auto geom = geom_ptr(2, 2, Boundary::Open);
  const auto full_e = enumerate_full(geom, 1, Picture::Electric);
  const auto full_d = enumerate_full(geom, 1, Picture::Deviation);
  const auto sector = enumerate_gauss_sector(geom, ChargeConfig{}, 1, Picture::Deviation);

  CHECK_THROWS_AS(build_microscopic_rotor(full_e, {1.0, 0.1, 0.01}, ChargeConfig{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_microscopic_rotor(sector, {1.0, 0.1, 0.01}, ChargeConfig{}),
                  std::invalid_argument);

  // same-sign Delta pair violates the sublattice constraints
  const auto bad = ChargeConfig::make(*geom, ChargeConvention::MicroDelta, {{0, 0, 1}, {1, 0, 1}});
  CHECK_THROWS_AS(build_microscopic_rotor(full_d, {1.0, 0.1, 0.01}, bad), ValidationError);
}

TEST_CASE("staggered and microscopic forms share their spectrum") {
  const auto geom = geom_ptr(2, 2, Boundary::Open);
  const auto full_d = enumerate_full(geom, 1, Picture::Deviation);
  const auto full_e = enumerate_full(geom, 1, Picture::Electric);
  const MicroParams params{1.0, 0.05, 0.02};

  for (const auto& cfg :
       {ChargeConfig{},
        ChargeConfig::make(*geom, ChargeConvention::MicroDelta, {{0, 0, 1}, {1, 1, -1}})}) {
    const auto h_micro = build_microscopic_rotor(full_d, params, cfg);
    const auto h_stag = stagger_equivalent(full_e, params, cfg);
    CHECK(h_micro.is_symmetric());
    CHECK(h_stag.is_symmetric());
    const auto eig_micro = oracle::dense_eigs(oracle::to_dense(h_micro));
    const auto eig_stag = oracle::dense_eigs(oracle::to_dense(h_stag));
    for (std::size_t i = 0; i < eig_micro.size(); ++i)
      CHECK(std::abs(eig_micro[i] - eig_stag[i]) <= 1e-10);
  }
}

TEST_CASE("staggered zero state maps to the zero state") {
  const auto geom = build_geometry(3, 3, Boundary::Open);
  LinkConfig zero{Picture::Deviation, std::vector<std::int8_t>((std::size_t)geom.n_links(), 0)};
  const auto converted = convert_picture(zero, geom);
  for (const auto v : converted.values) CHECK((int)v == 0);
}

TEST_CASE("effective Hamiltonian at trunc 1 reproduces the clipped plaquette model") {
  const auto geom = geom_ptr(2, 2, Boundary::Open);
  const double omega = 0.015625;  // power of two keeps the arithmetic exact
  const double lambda = 1.0;
  const auto eff = derive_effective(geom, 1, {lambda, 0.0, omega}, ChargeConfig{});
  REQUIRE(eff.sector.size() == 3);
  CHECK(eff.op.is_symmetric());

  const double w = omega * omega / lambda;
  // loop states ordered by lexicographic deviation values: x = -1, 0, +1;
  // edge states lose half their hop-and-return moves to the truncation
  Eigen::MatrixXd expected(3, 3);
  expected << -2.0 * w, -2.0 * w, 0.0, -2.0 * w, -4.0 * w, -2.0 * w, 0.0, -2.0 * w, -2.0 * w;
  const auto dense = oracle::to_dense(eff.op);
  CHECK((dense - expected).cwiseAbs().maxCoeff() <= 1e-18);

  // the full rotor ground tracks the effective model to fourth order
  const auto full = enumerate_full(geom, 1, Picture::Deviation);
  const auto h_full = build_microscopic_rotor(full, {lambda, 0.0, omega}, ChargeConfig{});
  const double e_full = oracle::dense_eigs(oracle::to_dense(h_full)).front();
  const double e_eff = oracle::dense_eigs(expected).front();  // = -6 w
  CHECK(e_eff == doctest::Approx(-6.0 * w).epsilon(1e-12));
  CHECK(std::abs(e_full - e_eff) <= 100.0 * std::pow(omega, 4) / std::pow(lambda, 3));
}

TEST_CASE("effective Hamiltonian without hopping is the bare field energy, exactly") {
  const auto geom = geom_ptr(2, 2, Boundary::Open);
  const double mu = 0.25;
  const auto eff = derive_effective(geom, 1, {1.0, mu, 0.0}, ChargeConfig{});
  const auto dense = oracle::to_dense(eff.op);
  for (std::size_t i = 0; i < eff.sector.size(); ++i) {
    const auto s = eff.sector.state(i);
    long sum_sq = 0;
    for (const auto v : s) sum_sq += (long)v * v;
    for (std::size_t j = 0; j < eff.sector.size(); ++j)
      CHECK(dense((Eigen::Index)i, (Eigen::Index)j) == (i == j ? mu * (double)sum_sq : 0.0));
  }

  // the full rotor Hamiltonian at omega = 0 carries the same sector levels
  const auto full = enumerate_full(geom, 1, Picture::Deviation);
  const auto h = build_microscopic_rotor(full, {1.0, mu, 0.0}, ChargeConfig{});
  for (std::size_t i = 0; i < eff.sector.size(); ++i) {
    const auto idx = full.index_of(eff.sector.state(i));
    REQUIRE(idx.has_value());
    CHECK(h.coeff((std::int64_t)*idx, (std::int64_t)*idx) ==
          eff.op.coeff((std::int64_t)i, (std::int64_t)i));
  }
}

TEST_CASE("effective Hamiltonian carries the -2 omega^2 / lambda plaquette coupling") {
  const auto geom = geom_ptr(2, 2, Boundary::Open);
  const double omega = 1e-2;
  const double lambda = 1.0;
  const auto eff = derive_effective(geom, 2, {lambda, 0.0, omega}, ChargeConfig{});
  REQUIRE(eff.sector.size() == 5);

  // interior loop states x = -1, 0, +1 in deviation values
  auto loop_state = [&](int x) {
    std::vector<std::int8_t> values((std::size_t)geom->n_links(), 0);
    for (const auto& e : geom->plaquette_links(0)) {
      const int electric = x * e.sign;
      values[(std::size_t)e.link] =
          (std::int8_t)(geom->link_stagger_sign(e.link) * electric);
    }
    return values;
  };
  const auto i0 = eff.sector.index_of(std::span<const std::int8_t>(loop_state(0)));
  const auto i1 = eff.sector.index_of(std::span<const std::int8_t>(loop_state(1)));
  REQUIRE(i0.has_value());
  REQUIRE(i1.has_value());
  CHECK(eff.op.coeff((std::int64_t)*i1, (std::int64_t)*i0) ==
        doctest::Approx(-2.0 * omega * omega / lambda).epsilon(1e-14));
}

TEST_CASE("effective Hamiltonian matches the gauge theory away from the truncation edge") {
  const auto geom = geom_ptr(2, 2, Boundary::Open);
  const MicroParams params{1.0, 1e-5, 1e-2};
  const auto eff = derive_effective(geom, 2, params, ChargeConfig{});

  const auto coupling = CouplingParams::from_micro(params.lambda, params.mu, params.omega);
  const auto sector_e = enumerate_gauss_sector(geom, ChargeConfig{}, 2, Picture::Electric);
  const auto h_ks = build_kogut_susskind(sector_e, coupling);
  const double u0 = coupling.u0();

  // map interior states (|loop| <= 1) between the two orderings
  auto electric_loop = [&](int x) {
    std::vector<std::int8_t> values((std::size_t)geom->n_links(), 0);
    for (const auto& e : geom->plaquette_links(0)) values[(std::size_t)e.link] = (std::int8_t)(x * e.sign);
    return values;
  };
  std::vector<std::size_t> idx_eff;
  std::vector<std::size_t> idx_ks;
  for (int x = -1; x <= 1; ++x) {
    const auto e_state = electric_loop(x);
    LinkConfig cfg_e{Picture::Electric, e_state};
    const auto cfg_d = convert_picture(cfg_e, *geom);
    idx_eff.push_back(*eff.sector.index_of(cfg_d));
    idx_ks.push_back(*sector_e.index_of(cfg_e));
  }

  // off-diagonal blocks agree exactly; diagonals differ by one hop-and-return constant
  const double constant =
      eff.op.coeff((std::int64_t)idx_eff[1], (std::int64_t)idx_eff[1]) -
      u0 * h_ks.coeff((std::int64_t)idx_ks[1], (std::int64_t)idx_ks[1]);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) {
      const double lhs = eff.op.coeff((std::int64_t)idx_eff[a], (std::int64_t)idx_eff[b]);
      const double rhs = u0 * h_ks.coeff((std::int64_t)idx_ks[a], (std::int64_t)idx_ks[b]);
      if (a == b)
        CHECK(lhs - rhs == doctest::Approx(constant).epsilon(1e-10));
      else
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("coupling bridge relations") {
  const auto p = CouplingParams::from_micro(2.0, 1.0, 0.5);
  CHECK(p.g2() == doctest::Approx(2.0).epsilon(1e-14));  // g^4 = 2*1/(2*0.25) = 4
  CHECK(p.u0() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p.in_qed_regime(2.0));
  CHECK(!p.in_qed_regime(100.0));
  CHECK_THROWS_AS(CouplingParams::from_g2(-1.0), ValidationError);
  CHECK_THROWS_AS(CouplingParams::from_g2(10.0).u0(), ValidationError);
}
