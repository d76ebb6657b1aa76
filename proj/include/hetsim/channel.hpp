#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetsim/common.hpp"
#include "hetsim/geometry.hpp"

namespace hetsim {

// Distance-dependent path losses in dB, d in meters. Callers are expected to
// clamp d at scenario.min_link_distance first; the functions themselves only
// reject non-positive distances.

inline void check_distance(double d) {
  if (!(d > 0.0)) throw std::invalid_argument("path loss: distance must be positive");
}

// Macro BS to mobile terminal.
inline double path_loss_macro_mt_db(double d) {
  check_distance(d);
  return 27.3 + 39.1 * std::log10(d);
}

// Macro BS to small cell (backhaul).
inline double path_loss_backhaul_db(double d) {
  check_distance(d);
  return 24.6 + 39.1 * std::log10(d);
}

// Small cell to mobile terminal.
inline double path_loss_sc_mt_db(double d) {
  check_distance(d);
  return 36.8 + 36.7 * std::log10(d);
}

// One zero-mean log-normal shadowing sample in dB. sigma = 0 returns exactly
// 0 without touching the engine.
inline double draw_shadowing_db(double sigma, std::mt19937_64& rng) {
  if (sigma < 0.0) throw std::invalid_argument("draw_shadowing_db: sigma must be non-negative");
  if (sigma == 0.0) return 0.0;
  std::normal_distribution<double> dist(0.0, sigma);
  return dist(rng);
}

// Thermal noise power over the system bandwidth, in watts.
inline double noise_power_watts(const NetworkScenario& scenario) {
  return std::pow(10.0, (scenario.noise_psd - 30.0) / 10.0) * scenario.bandwidth;
}

// Linear power gain of a link with path loss `pl_db`, shadowing `z_db` and
// antenna gain `g_db`.
inline double link_gain(double pl_db, double z_db, double g_db) {
  return std::pow(10.0, -(pl_db + z_db - g_db) / 10.0);
}

// Optional per-link debug record, filled by realize_channels on request.
struct LinkBudgetRow {
  std::string link_id;
  double distance = 0.0;
  double path_loss_db = 0.0;
  double shadowing_db = 0.0;
  double gain = 0.0;
  double sinr = 0.0;
};

// Frozen channel state of one trial: linear link gains, SINRs and the
// baseline spectral efficiencies every allocation decision is made against.
// Per-small-cell arrays follow the cell-id convention of Topology: index
// j in 1..N_S, slot/row 0 unused. Treated as immutable once built.
//
// Baseline spectral efficiencies, in bit/s/Hz:
//   r_macro[k]    rate MT k would get on the macro tier with a full beam
//                 group: beam_group * log2(1 + q * sinr_macro[k]) where
//                 q = (n_antennas - beam_group + 1) / beam_group
//   c_backhaul[j] backhaul rate of small cell j: log2(1 + q * sinr_backhaul[j])
//   r_sc(j,k)     access rate of MT k on small cell j: log2(1 + sinr_sc(j,k))
struct ChannelRealization {
  int n_beam_group = 0;  // beam group size the rates above were built with
  double noise_power = 0.0;

  std::vector<double> gain_macro_mt;   // size N_U
  std::vector<double> gain_macro_sc;   // size N_S+1
  Matrix gain_sc_mt;                   // (N_S+1) x N_U

  std::vector<double> sinr_macro;      // size N_U, interference-free macro downlink
  std::vector<double> sinr_backhaul;   // size N_S+1, interference-free backhaul
  Matrix sinr_sc;                      // (N_S+1) x N_U, other small cells interfere

  std::vector<double> r_macro;         // size N_U
  std::vector<double> c_backhaul;      // size N_S+1
  Matrix r_sc;                         // (N_S+1) x N_U

  // ln of the rates above, cached because the association solvers evaluate
  // them in their innermost loop.
  std::vector<double> log_r_macro;
  Matrix log_r_sc;

  int n_mts() const { return static_cast<int>(r_macro.size()); }
  int n_small_cells() const { return static_cast<int>(c_backhaul.size()) - 1; }

  void rebuild_rate_logs() {
    const int nu = n_mts();
    const int ns = n_small_cells();
    log_r_macro.resize(nu);
    for (int k = 0; k < nu; ++k) log_r_macro[k] = std::log(r_macro[k]);
    log_r_sc = Matrix(ns + 1, nu);
    for (int j = 1; j <= ns; ++j)
      for (int k = 0; k < nu; ++k) log_r_sc(j, k) = std::log(r_sc(j, k));
  }
};

// Draws shadowing and assembles gains, SINRs and baseline rates for one
// topology. Draw order is fixed and part of the reproducibility contract:
// macro->MT links (k ascending, sigma_bs), then macro->SC backhaul links
// (j ascending, sigma_bs), then SC->MT links (j ascending, k ascending
// within j, sigma_sc). The small-cell antenna gain enters every link with a
// small-cell endpoint, including interfering ones; macro->MT links get none.
// If `budget` is non-null, one row per link is appended in draw order.
inline ChannelRealization realize_channels(const Topology& topo,
                                           const NetworkScenario& scenario,
                                           std::mt19937_64& rng,
                                           std::vector<LinkBudgetRow>* budget = nullptr) {
  scenario.validate();
  const int nu = topo.n_mts();
  const int ns = topo.n_small_cells();

  ChannelRealization chan;
  chan.n_beam_group = scenario.beam_group;
  chan.noise_power = noise_power_watts(scenario);

  Matrix z_sc_mt(ns + 1, nu);
  std::vector<double> z_macro_mt(nu), z_macro_sc(ns + 1, 0.0);

  chan.gain_macro_mt.resize(nu);
  for (int k = 0; k < nu; ++k) {
    z_macro_mt[k] = draw_shadowing_db(scenario.sigma_bs, rng);
    chan.gain_macro_mt[k] = link_gain(path_loss_macro_mt_db(topo.d_macro_mt[k]), z_macro_mt[k], 0.0);
  }
  chan.gain_macro_sc.assign(ns + 1, 0.0);
  for (int j = 1; j <= ns; ++j) {
    z_macro_sc[j] = draw_shadowing_db(scenario.sigma_bs, rng);
    chan.gain_macro_sc[j] =
        link_gain(path_loss_backhaul_db(topo.d_macro_sc[j]), z_macro_sc[j], scenario.sc_antenna_gain);
  }
  chan.gain_sc_mt = Matrix(ns + 1, nu);
  for (int j = 1; j <= ns; ++j) {
    for (int k = 0; k < nu; ++k) {
      z_sc_mt(j, k) = draw_shadowing_db(scenario.sigma_sc, rng);
      chan.gain_sc_mt(j, k) =
          link_gain(path_loss_sc_mt_db(topo.d_sc_mt(j, k)), z_sc_mt(j, k), scenario.sc_antenna_gain);
    }
  }

  // Macro links carry no co-channel interference by design of the frame
  // structure; small-cell downlinks see every other small cell.
  const double n0 = chan.noise_power;
  chan.sinr_macro.resize(nu);
  for (int k = 0; k < nu; ++k) chan.sinr_macro[k] = scenario.p_macro * chan.gain_macro_mt[k] / n0;
  chan.sinr_backhaul.assign(ns + 1, 0.0);
  for (int j = 1; j <= ns; ++j) chan.sinr_backhaul[j] = scenario.p_macro * chan.gain_macro_sc[j] / n0;
  chan.sinr_sc = Matrix(ns + 1, nu);
  for (int k = 0; k < nu; ++k) {
    double total = 0.0;
    for (int l = 1; l <= ns; ++l) total += scenario.p_small * chan.gain_sc_mt(l, k);
    for (int j = 1; j <= ns; ++j) {
      const double signal = scenario.p_small * chan.gain_sc_mt(j, k);
      chan.sinr_sc(j, k) = signal / (n0 + (total - signal));
    }
  }

  const double q = static_cast<double>(scenario.n_antennas - scenario.beam_group + 1) / scenario.beam_group;
  chan.r_macro.resize(nu);
  for (int k = 0; k < nu; ++k)
    chan.r_macro[k] = scenario.beam_group * std::log2(1.0 + q * chan.sinr_macro[k]);
  chan.c_backhaul.assign(ns + 1, 0.0);
  for (int j = 1; j <= ns; ++j) chan.c_backhaul[j] = std::log2(1.0 + q * chan.sinr_backhaul[j]);
  chan.r_sc = Matrix(ns + 1, nu);
  for (int j = 1; j <= ns; ++j)
    for (int k = 0; k < nu; ++k) chan.r_sc(j, k) = std::log2(1.0 + chan.sinr_sc(j, k));
  chan.rebuild_rate_logs();

  if (budget) {
    for (int k = 0; k < nu; ++k)
      budget->push_back({"macro->mt" + std::to_string(k), topo.d_macro_mt[k],
                         path_loss_macro_mt_db(topo.d_macro_mt[k]), z_macro_mt[k],
                         chan.gain_macro_mt[k], chan.sinr_macro[k]});
    for (int j = 1; j <= ns; ++j)
      budget->push_back({"macro->sc" + std::to_string(j), topo.d_macro_sc[j],
                         path_loss_backhaul_db(topo.d_macro_sc[j]), z_macro_sc[j],
                         chan.gain_macro_sc[j], chan.sinr_backhaul[j]});
    for (int j = 1; j <= ns; ++j)
      for (int k = 0; k < nu; ++k)
        budget->push_back({"sc" + std::to_string(j) + "->mt" + std::to_string(k), topo.d_sc_mt(j, k),
                           path_loss_sc_mt_db(topo.d_sc_mt(j, k)), z_sc_mt(j, k),
                           chan.gain_sc_mt(j, k), chan.sinr_sc(j, k)});
  }
  return chan;
}

}  // namespace hetsim
