#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "hetsim/geometry.hpp"

using namespace hetsim;

TEST_CASE("default scenario is valid") {
  REQUIRE_NOTHROW(NetworkScenario{}.validate());
}

TEST_CASE("scenario validation rejects broken parameter sets") {
  NetworkScenario s;
  SECTION("non-positive radius") {
    s.macro_radius = 0.0;
    REQUIRE_THROWS_AS(s.validate(), std::invalid_argument);
  }
  SECTION("beam group beyond the antenna count") {
    s.beam_group = s.n_antennas + 1;
    REQUIRE_THROWS_AS(s.validate(), std::invalid_argument);
  }
  SECTION("beam group equal to the antenna count is the allowed boundary") {
    s.beam_group = s.n_antennas;
    REQUIRE_NOTHROW(s.validate());
  }
  SECTION("too many small cells for the beam group") {
    s.n_small_cells = s.beam_group;
    REQUIRE_THROWS_AS(s.validate(), std::invalid_argument);
  }
  SECTION("negative shadowing spread") {
    s.sigma_sc = -1.0;
    REQUIRE_THROWS_AS(s.validate(), std::invalid_argument);
  }
  SECTION("non-positive power") {
    s.p_small = 0.0;
    REQUIRE_THROWS_AS(s.validate(), std::invalid_argument);
  }
  SECTION("non-positive min link distance") {
    s.min_link_distance = 0.0;
    REQUIRE_THROWS_AS(s.validate(), std::invalid_argument);
  }
}

TEST_CASE("trial seeds are deterministic and spread out") {
  REQUIRE(trial_seed(42, 0) == trial_seed(42, 0));
  std::set<std::uint64_t> seen;
  for (std::uint64_t master : {0ull, 1ull, 42ull, 0xDEADBEEFull})
    for (std::uint64_t t = 0; t < 64; ++t) seen.insert(trial_seed(master, t));
  REQUIRE(seen.size() == 4 * 64);  // no collisions across this grid
}

TEST_CASE("generate_topology is a pure function of scenario and seed") {
  NetworkScenario s;
  s.n_small_cells = 5;
  s.n_mts = 40;
  const Topology a = generate_topology(s, 123);
  const Topology b = generate_topology(s, 123);
  REQUIRE(a.d_macro_mt == b.d_macro_mt);
  REQUIRE(a.d_macro_sc == b.d_macro_sc);
  REQUIRE(a.d_sc_mt == b.d_sc_mt);
  const Topology c = generate_topology(s, 124);
  REQUIRE(a.d_macro_mt != c.d_macro_mt);
}

TEST_CASE("topology respects the cell-id conventions and the disk") {
  NetworkScenario s;
  s.n_small_cells = 7;
  s.n_mts = 50;
  const Topology topo = generate_topology(s, 999);
  REQUIRE(topo.n_small_cells() == 7);
  REQUIRE(topo.n_mts() == 50);
  REQUIRE(topo.bs_positions.size() == 8);
  CHECK(topo.bs_positions[0].x == 0.0);
  CHECK(topo.bs_positions[0].y == 0.0);
  CHECK(topo.d_macro_sc[0] == 0.0);
  for (int j = 1; j <= 7; ++j) {
    CHECK(std::hypot(topo.bs_positions[j].x, topo.bs_positions[j].y) <= s.macro_radius);
    CHECK(topo.d_macro_sc[j] >= s.min_link_distance);
    for (int k = 0; k < 50; ++k) CHECK(topo.d_sc_mt(j, k) >= s.min_link_distance);
  }
  for (int k = 0; k < 50; ++k) {
    CHECK(std::hypot(topo.mt_positions[k].x, topo.mt_positions[k].y) <= s.macro_radius);
    CHECK(topo.d_macro_mt[k] >= s.min_link_distance);
  }
}

TEST_CASE("empty deployments produce empty tables") {
  NetworkScenario s;
  s.n_small_cells = 0;
  s.n_mts = 0;
  const Topology topo = generate_topology(s, 1);
  REQUIRE(topo.n_small_cells() == 0);
  REQUIRE(topo.n_mts() == 0);
  REQUIRE(topo.mt_positions.empty());
  REQUIRE(topo.d_macro_mt.empty());
  REQUIRE(topo.bs_positions.size() == 1);
}

TEST_CASE("distances are clamped from below") {
  NetworkScenario s;
  s.n_small_cells = 1;
  s.n_mts = 2;
  const Topology topo =
      Topology::from_positions(s, {{{10.0, 0.0}}}, {{{1.0, 0.0}, {10.0, 3.0}}});
  CHECK(topo.d_macro_mt[0] == 5.0);             // 1 m from the origin, clamped
  CHECK(topo.d_sc_mt(1, 1) == 5.0);             // 3 m from the small cell, clamped
  CHECK(topo.d_macro_sc[1] == Catch::Approx(10.0));
  CHECK(topo.mt_positions[0].x == 1.0);         // positions stay as drawn
}

TEST_CASE("drop radii match the uniform-disk law") {
  NetworkScenario s;
  s.n_small_cells = 0;
  s.n_mts = 100000;
  const Topology topo = generate_topology(s, 2024);
  // r^2/R^2 of a uniform disk drop is Uniform(0,1); check the empirical CDF.
  std::vector<double> u(topo.n_mts());
  for (int k = 0; k < topo.n_mts(); ++k) {
    const double r = std::hypot(topo.mt_positions[k].x, topo.mt_positions[k].y);
    u[k] = r * r / (s.macro_radius * s.macro_radius);
  }
  std::sort(u.begin(), u.end());
  double sup = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    sup = std::max(sup, std::abs(u[i] - (static_cast<double>(i) + 0.5) / u.size()));
  CHECK(sup < 0.01);

  double mean = 0.0;
  for (int k = 0; k < topo.n_mts(); ++k) mean += topo.d_macro_mt[k];
  mean /= topo.n_mts();
  // Mean distance from the center of a uniform disk is 2R/3.
  CHECK(mean == Catch::Approx(2.0 / 3.0 * s.macro_radius).epsilon(0.01));
}
