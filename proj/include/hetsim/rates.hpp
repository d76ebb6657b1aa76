#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hetsim/channel.hpp"

namespace hetsim {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Which base station serves each MT. Cell 0 is the macro BS, 1..N_S are the
// small cells. `load` caches the per-cell MT counts; both views are kept
// consistent by construction.
struct Association {
  std::vector<int> cell_of_mt;  // size N_U
  std::vector<int> load;        // size N_S+1

  int n_mts() const { return static_cast<int>(cell_of_mt.size()); }
  int n_cells() const { return static_cast<int>(load.size()); }

  bool serves(int j, int k) const { return cell_of_mt[k] == j; }

  static Association all_macro(int n_mts, int n_small_cells) {
    Association a;
    a.cell_of_mt.assign(n_mts, 0);
    a.load.assign(n_small_cells + 1, 0);
    a.load[0] = n_mts;
    return a;
  }

  static Association from_cells(std::vector<int> cells, int n_small_cells) {
    Association a;
    a.load.assign(n_small_cells + 1, 0);
    for (int c : cells) {
      if (c < 0 || c > n_small_cells) throw std::invalid_argument("Association: cell id out of range");
      ++a.load[c];
    }
    a.cell_of_mt = std::move(cells);
    return a;
  }

  bool operator==(const Association&) const = default;
};

// Bandwidth split shared by every small cell: fraction `beta` of each
// sub-band backhauls, the rest serves access links on both tiers.
struct UnifiedWbba {
  double beta = 0.0;
};

// Dedicated backhaul fraction per small cell; slot 0 is unused and always 0.
// The macro tier loses sum(beta)/beam_group of its beam group instead of a
// bandwidth fraction.
struct PerCellWbba {
  std::vector<double> beta;  // size N_S+1, [0] = 0

  double backhaul_load() const {
    double s = 0.0;
    for (std::size_t j = 1; j < beta.size(); ++j) s += beta[j];
    return s;
  }

  static PerCellWbba zeros(int n_small_cells) { return {std::vector<double>(n_small_cells + 1, 0.0)}; }
};

namespace detail {

// Per-MT rate multiplier of cell j: what one MT of that cell receives is
// factor * baseline rate. Returns 0 for empty cells.
inline double cell_rate_factor(const Association& assoc, const UnifiedWbba& w,
                               const ChannelRealization& chan, int j) {
  (void)chan;
  const int load = assoc.load[j];
  return load > 0 ? (1.0 - w.beta) / load : 0.0;
}

inline double cell_rate_factor(const Association& assoc, const PerCellWbba& w,
                               const ChannelRealization& chan, int j) {
  const int load = assoc.load[j];
  if (load == 0) return 0.0;
  if (j == 0) return (1.0 - w.backhaul_load() / chan.n_beam_group) / load;
  return (1.0 - w.beta[j]) / load;
}

inline double baseline_rate(const ChannelRealization& chan, int j, int k) {
  return j == 0 ? chan.r_macro[k] : chan.r_sc(j, k);
}

inline double baseline_log_rate(const ChannelRealization& chan, int j, int k) {
  return j == 0 ? chan.log_r_macro[k] : chan.log_r_sc(j, k);
}

// Sum of baseline rates of the MTs cell j serves.
inline double cell_rate_sum(const Association& assoc, const ChannelRealization& chan, int j) {
  double s = 0.0;
  for (int k = 0; k < assoc.n_mts(); ++k)
    if (assoc.cell_of_mt[k] == j) s += baseline_rate(chan, j, k);
  return s;
}

}  // namespace detail

// Downlink sum throughput of small cell j, bit/s/Hz. Zero for an empty cell.
template <class Wbba>
double small_cell_throughput(const Association& assoc, const Wbba& w,
                             const ChannelRealization& chan, int j) {
  if (j < 1 || j > chan.n_small_cells()) throw std::invalid_argument("small_cell_throughput: bad cell id");
  return detail::cell_rate_factor(assoc, w, chan, j) * detail::cell_rate_sum(assoc, chan, j);
}

// Rate of macro-served MT k, bit/s/Hz. Requires cell_of_mt[k] == 0.
template <class Wbba>
double macro_user_rate(const Association& assoc, const Wbba& w,
                       const ChannelRealization& chan, int k) {
  if (assoc.cell_of_mt[k] != 0) throw std::invalid_argument("macro_user_rate: MT is not macro-served");
  return detail::cell_rate_factor(assoc, w, chan, 0) * chan.r_macro[k];
}

// Wireless backhaul capacity granted to small cell j, bit/s/Hz.
inline double backhaul_capacity(const UnifiedWbba& w, const ChannelRealization& chan, int j) {
  return w.beta * chan.c_backhaul[j];
}

inline double backhaul_capacity(const PerCellWbba& w, const ChannelRealization& chan, int j) {
  return w.beta[j] * chan.c_backhaul[j];
}

// Rate each MT receives under the given association and bandwidth split.
template <class Wbba>
std::vector<double> per_mt_rates(const Association& assoc, const Wbba& w,
                                 const ChannelRealization& chan) {
  std::vector<double> factor(assoc.n_cells());
  for (int j = 0; j < assoc.n_cells(); ++j) factor[j] = detail::cell_rate_factor(assoc, w, chan, j);
  std::vector<double> rates(assoc.n_mts());
  for (int k = 0; k < assoc.n_mts(); ++k) {
    const int j = assoc.cell_of_mt[k];
    rates[k] = factor[j] * detail::baseline_rate(chan, j, k);
  }
  return rates;
}

// Proportional-fair objective: sum over served MTs of ln(rate). Returns
// -infinity when any served MT ends up with rate <= 0, which only happens for
// degenerate allocations (beta >= 1 on a loaded cell, exhausted beam group);
// callers treat that as an infeasibility signal, not a value.
template <class Wbba>
double sum_log_rate(const Association& assoc, const Wbba& w, const ChannelRealization& chan) {
  double total = 0.0;
  for (int j = 0; j < assoc.n_cells(); ++j) {
    const int load = assoc.load[j];
    if (load == 0) continue;
    const double factor = detail::cell_rate_factor(assoc, w, chan, j);
    if (!(factor > 0.0)) return kNegInf;
    double log_sum = 0.0;
    for (int k = 0; k < assoc.n_mts(); ++k)
      if (assoc.cell_of_mt[k] == j) log_sum += detail::baseline_log_rate(chan, j, k);
    total += log_sum + load * std::log(factor);
  }
  return total;
}

// Smallest backhaul fraction for cell j that carries everything the cell
// delivers: solves (1-b) * sum_r / load = b * c exactly, giving
// b = sum_r / (sum_r + load * c). Zero for an empty cell.
inline double beta_per_cell(const Association& assoc, const ChannelRealization& chan, int j) {
  if (j < 1 || j > chan.n_small_cells()) throw std::invalid_argument("beta_per_cell: bad cell id");
  const int load = assoc.load[j];
  if (load == 0) return 0.0;
  const double sum_r = detail::cell_rate_sum(assoc, chan, j);
  return sum_r / (sum_r + load * chan.c_backhaul[j]);
}

inline PerCellWbba beta_per_cell_all(const Association& assoc, const ChannelRealization& chan) {
  PerCellWbba w = PerCellWbba::zeros(chan.n_small_cells());
  for (int j = 1; j <= chan.n_small_cells(); ++j) w.beta[j] = beta_per_cell(assoc, chan, j);
  return w;
}

// Smallest shared backhaul fraction that keeps every small cell's delivered
// traffic within its backhaul capacity: the largest per-cell requirement.
// Zero when every small cell is empty.
inline double min_feasible_beta_unified(const Association& assoc, const ChannelRealization& chan) {
  double beta = 0.0;
  for (int j = 1; j <= chan.n_small_cells(); ++j) beta = std::max(beta, beta_per_cell(assoc, chan, j));
  return beta;
}

// Largest backhaul overshoot max_j(R_j - C_j) across non-empty small cells;
// negative when all backhaul links have slack. Used by feasibility audits.
template <class Wbba>
double max_backhaul_violation(const Association& assoc, const Wbba& w, const ChannelRealization& chan) {
  double worst = -std::numeric_limits<double>::infinity();
  for (int j = 1; j <= chan.n_small_cells(); ++j) {
    if (assoc.load[j] == 0) continue;
    worst = std::max(worst, small_cell_throughput(assoc, w, chan, j) - backhaul_capacity(w, chan, j));
  }
  return worst;
}

}  // namespace hetsim
