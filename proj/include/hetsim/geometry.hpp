#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetsim/common.hpp"

namespace hetsim {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Static parameters of one deployment. The macro BS sits at the origin of a
// disk of radius `macro_radius`; small cells and mobile terminals are dropped
// uniformly on that disk. Powers are in watts, gains and spreads in dB,
// distances in meters.
struct NetworkScenario {
  double macro_radius = 350.0;
  int n_small_cells = 10;
  int n_mts = 100;
  int n_antennas = 100;        // transmit antennas at the macro BS
  int beam_group = 20;         // simultaneous beams per time-frequency resource
  double p_macro = 20.0;       // macro transmit power, W
  double p_small = 2.0;        // small-cell transmit power, W
  double sc_antenna_gain = 5.0;  // small-cell antenna gain, dB, applied once per
                                 // link that terminates or originates at a small cell
  double noise_psd = -174.0;   // noise power spectral density, dBm/Hz
  double bandwidth = 5e6;      // Hz
  double sigma_bs = 6.0;       // shadowing spread on macro-originated links, dB
  double sigma_sc = 4.0;       // shadowing spread on small-cell links, dB
  double min_link_distance = 5.0;  // distances are clamped below this, m

  void validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("NetworkScenario: " + what); };
    if (!(macro_radius > 0.0)) fail("macro_radius must be positive");
    if (n_small_cells < 0) fail("n_small_cells must be non-negative");
    if (n_mts < 0) fail("n_mts must be non-negative");
    if (n_antennas < 1) fail("n_antennas must be at least 1");
    if (beam_group < 1) fail("beam_group must be at least 1");
    if (beam_group > n_antennas) fail("beam_group must not exceed n_antennas");
    if (n_small_cells >= beam_group) fail("n_small_cells must be smaller than beam_group");
    if (!(p_macro > 0.0)) fail("p_macro must be positive");
    if (!(p_small > 0.0)) fail("p_small must be positive");
    if (!(bandwidth > 0.0)) fail("bandwidth must be positive");
    if (sigma_bs < 0.0) fail("sigma_bs must be non-negative");
    if (sigma_sc < 0.0) fail("sigma_sc must be non-negative");
    if (!(min_link_distance > 0.0)) fail("min_link_distance must be positive");
  }
};

// One network drop. Base stations are indexed 0..N_S where index 0 is the
// macro BS at the origin; that convention is used for every per-cell array in
// the library (slot 0 of small-cell-only data is present but unused).
// Stored distances are clamped from below at scenario.min_link_distance;
// positions are kept as drawn.
struct Topology {
  std::vector<Point> bs_positions;  // size N_S+1, [0] = macro at the origin
  std::vector<Point> mt_positions;  // size N_U
  std::vector<double> d_macro_mt;   // size N_U
  std::vector<double> d_macro_sc;   // size N_S+1, [0] = 0 (unused)
  Matrix d_sc_mt;                   // (N_S+1) x N_U, row 0 unused

  int n_small_cells() const { return static_cast<int>(bs_positions.size()) - 1; }
  int n_mts() const { return static_cast<int>(mt_positions.size()); }

  // Builds the clamped distance tables for explicitly given positions.
  static Topology from_positions(const NetworkScenario& scenario,
                                 std::vector<Point> sc_positions,
                                 std::vector<Point> mt_positions) {
    scenario.validate();
    const Point origin{0.0, 0.0};
    const double dmin = scenario.min_link_distance;
    Topology topo;
    topo.bs_positions.reserve(sc_positions.size() + 1);
    topo.bs_positions.push_back(origin);
    for (const Point& p : sc_positions) topo.bs_positions.push_back(p);
    topo.mt_positions = std::move(mt_positions);

    const int ns = topo.n_small_cells();
    const int nu = topo.n_mts();
    topo.d_macro_mt.resize(nu);
    topo.d_macro_sc.assign(ns + 1, 0.0);
    topo.d_sc_mt = Matrix(ns + 1, nu);
    for (int k = 0; k < nu; ++k)
      topo.d_macro_mt[k] = std::max(distance(origin, topo.mt_positions[k]), dmin);
    for (int j = 1; j <= ns; ++j) {
      topo.d_macro_sc[j] = std::max(distance(origin, topo.bs_positions[j]), dmin);
      for (int k = 0; k < nu; ++k)
        topo.d_sc_mt(j, k) = std::max(distance(topo.bs_positions[j], topo.mt_positions[k]), dmin);
    }
    return topo;
  }
};

// Uniform point on the disk of radius R: radius R*sqrt(u), angle uniform.
// Consumes exactly two engine draws, radius first.
inline Point draw_disk_point(double radius, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = radius * std::sqrt(unit(rng));
  const double theta = 2.0 * std::numbers::pi * unit(rng);
  return {r * std::cos(theta), r * std::sin(theta)};
}

// Draws one topology. Deterministic for a given (scenario, seed): small-cell
// positions are drawn first (ascending index), then MT positions.
inline Topology generate_topology(const NetworkScenario& scenario, std::uint64_t seed) {
  scenario.validate();
  std::mt19937_64 rng(seed);
  std::vector<Point> scs(scenario.n_small_cells);
  for (Point& p : scs) p = draw_disk_point(scenario.macro_radius, rng);
  std::vector<Point> mts(scenario.n_mts);
  for (Point& p : mts) p = draw_disk_point(scenario.macro_radius, rng);
  return Topology::from_positions(scenario, std::move(scs), std::move(mts));
}

}  // namespace hetsim
