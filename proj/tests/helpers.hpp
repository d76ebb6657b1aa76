#pragma once

// Shared helpers for the test suite: hand-built channel realizations with
// chosen baseline rates, and randomly drawn small instances.

#include <cmath>
#include <random>
#include <vector>

#include "hetsim/channel.hpp"

namespace hetsim::testing {

// Channel with given baseline rates. SINRs and gains are back-filled
// consistently for unit powers and unit noise so association policies work
// on it too; r_sc_rows[i] holds the rates of small cell i+1.
inline ChannelRealization synthetic_channel(const std::vector<double>& r_macro,
                                            const std::vector<std::vector<double>>& r_sc_rows,
                                            const std::vector<double>& c_backhaul_cells,
                                            int n_beam_group = 20) {
  const int nu = static_cast<int>(r_macro.size());
  const int ns = static_cast<int>(r_sc_rows.size());
  ChannelRealization chan;
  chan.n_beam_group = n_beam_group;
  chan.noise_power = 1.0;
  chan.r_macro = r_macro;
  chan.c_backhaul.assign(ns + 1, 0.0);
  chan.r_sc = Matrix(ns + 1, nu);
  for (int j = 1; j <= ns; ++j) {
    chan.c_backhaul[j] = c_backhaul_cells[j - 1];
    for (int k = 0; k < nu; ++k) chan.r_sc(j, k) = r_sc_rows[j - 1][k];
  }
  chan.sinr_macro.resize(nu);
  for (int k = 0; k < nu; ++k)
    chan.sinr_macro[k] = std::exp2(chan.r_macro[k] / n_beam_group) - 1.0;
  chan.sinr_backhaul.assign(ns + 1, 0.0);
  chan.sinr_sc = Matrix(ns + 1, nu);
  chan.gain_macro_mt = chan.sinr_macro;
  chan.gain_macro_sc.assign(ns + 1, 0.0);
  chan.gain_sc_mt = Matrix(ns + 1, nu);
  for (int j = 1; j <= ns; ++j) {
    chan.sinr_backhaul[j] = std::exp2(chan.c_backhaul[j]) - 1.0;
    chan.gain_macro_sc[j] = chan.sinr_backhaul[j];
    for (int k = 0; k < nu; ++k) {
      chan.sinr_sc(j, k) = std::exp2(chan.r_sc(j, k)) - 1.0;
      chan.gain_sc_mt(j, k) = chan.sinr_sc(j, k);
    }
  }
  chan.rebuild_rate_logs();
  return chan;
}

// Fully random channel drawn through the real pipeline.
inline ChannelRealization random_channel(int ns, int nu, std::uint64_t seed,
                                         bool shadowing = true) {
  NetworkScenario s;
  s.n_small_cells = ns;
  s.n_mts = nu;
  if (!shadowing) {
    s.sigma_bs = 0.0;
    s.sigma_sc = 0.0;
  }
  const Topology topo = generate_topology(s, seed);
  std::mt19937_64 rng(mix64(seed));
  return realize_channels(topo, s, rng);
}

// Random association over ns+1 cells.
inline std::vector<int> random_cells(int ns, int nu, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> cell(0, ns);
  std::vector<int> cells(nu);
  for (int& c : cells) c = cell(rng);
  return cells;
}

}  // namespace hetsim::testing
