#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hetsim/rates.hpp"

namespace hetsim {

// Strongest-SINR association. The macro link SINR is compared against every
// small-cell downlink SINR as-is; ties go to the lowest cell index, so the
// macro BS wins any exact tie.
inline Association sinr_association(const ChannelRealization& chan) {
  std::vector<int> cells(chan.n_mts(), 0);
  for (int k = 0; k < chan.n_mts(); ++k) {
    int best_j = 0;
    double best = chan.sinr_macro[k];
    for (int j = 1; j <= chan.n_small_cells(); ++j) {
      if (chan.sinr_sc(j, k) > best) {
        best = chan.sinr_sc(j, k);
        best_j = j;
      }
    }
    cells[k] = best_j;
  }
  return Association::from_cells(std::move(cells), chan.n_small_cells());
}

// Range expansion: small-cell SINRs get a dB bias before the comparison, the
// macro SINR does not. bias_db = 0 reproduces sinr_association exactly.
inline Association cre_association(const ChannelRealization& chan, double bias_db = 3.0) {
  const double bias = std::pow(10.0, bias_db / 10.0);
  std::vector<int> cells(chan.n_mts(), 0);
  for (int k = 0; k < chan.n_mts(); ++k) {
    int best_j = 0;
    double best = chan.sinr_macro[k];
    for (int j = 1; j <= chan.n_small_cells(); ++j) {
      const double biased = bias * chan.sinr_sc(j, k);
      if (biased > best) {
        best = biased;
        best_j = j;
      }
    }
    cells[k] = best_j;
  }
  return Association::from_cells(std::move(cells), chan.n_small_cells());
}

struct OffloadResult {
  Association assoc;
  PerCellWbba wbba;
  double utility = 0.0;
};

namespace detail {

// Running per-cell aggregates for the greedy move passes. Every move touches
// at most two cells plus the macro objective term (through the beam-group
// share), so single-move evaluation is O(1).
struct MoveState {
  const ChannelRealization& chan;
  std::vector<int> cell_of_mt;
  std::vector<int> load;        // per cell
  std::vector<double> sum_r;    // per small cell: sum of baseline rates served
  std::vector<double> sum_logr; // per cell: sum of ln(baseline rate) served
  std::vector<double> beta;     // per small cell, exact backhaul split
  double n_b = 0.0;             // total beam-group share spent on backhaul
  double utility = 0.0;

  MoveState(const Association& assoc, const PerCellWbba& w, const ChannelRealization& chan_)
      : chan(chan_), cell_of_mt(assoc.cell_of_mt), load(assoc.load) {
    const int ns = chan.n_small_cells();
    sum_r.assign(ns + 1, 0.0);
    sum_logr.assign(ns + 1, 0.0);
    beta = w.beta;
    if (static_cast<int>(beta.size()) != ns + 1) throw std::invalid_argument("MoveState: wbba size mismatch");
    if (static_cast<int>(cell_of_mt.size()) != chan.n_mts() || static_cast<int>(load.size()) != ns + 1)
      throw std::invalid_argument("MoveState: association does not match the realization");
    for (int k = 0; k < static_cast<int>(cell_of_mt.size()); ++k) {
      const int j = cell_of_mt[k];
      sum_logr[j] += baseline_log_rate(chan, j, k);
      if (j > 0) sum_r[j] += chan.r_sc(j, k);
    }
    n_b = 0.0;
    for (int j = 1; j <= ns; ++j) n_b += beta[j];
    utility = macro_term(load[0], sum_logr[0], n_b);
    for (int j = 1; j <= ns; ++j) utility += cell_term(j, load[j], sum_logr[j], beta[j]);
  }

  double macro_term(int k0, double logr0, double nb) const {
    if (k0 == 0) return 0.0;
    return logr0 + k0 * (std::log1p(-nb / chan.n_beam_group) - std::log(static_cast<double>(k0)));
  }

  double cell_term(int j, int kj, double logrj, double betaj) const {
    (void)j;
    if (kj == 0) return 0.0;
    return logrj + kj * (std::log1p(-betaj) - std::log(static_cast<double>(kj)));
  }

  double exact_beta(int j, double sr, int kj) const {
    return kj == 0 ? 0.0 : sr / (sr + kj * chan.c_backhaul[j]);
  }

  // Objective after moving MT k from its current cell to `to`; no commit.
  double evaluate_move(int k, int to) const {
    const int from = cell_of_mt[k];
    double new_utility = utility;
    double nb_new = n_b;
    int k0 = load[0];
    double logr0 = sum_logr[0];

    if (from == 0) {
      k0 -= 1;
      logr0 -= chan.log_r_macro[k];
    } else {
      const int kf = load[from] - 1;
      const double sf = sum_r[from] - chan.r_sc(from, k);
      const double lf = sum_logr[from] - chan.log_r_sc(from, k);
      const double bf = exact_beta(from, sf, kf);
      new_utility -= cell_term(from, load[from], sum_logr[from], beta[from]);
      new_utility += cell_term(from, kf, lf, bf);
      nb_new += bf - beta[from];
    }
    if (to == 0) {
      k0 += 1;
      logr0 += chan.log_r_macro[k];
    } else {
      const int kt = load[to] + 1;
      const double st = sum_r[to] + chan.r_sc(to, k);
      const double lt = sum_logr[to] + chan.log_r_sc(to, k);
      const double bt = exact_beta(to, st, kt);
      new_utility -= cell_term(to, load[to], sum_logr[to], beta[to]);
      new_utility += cell_term(to, kt, lt, bt);
      nb_new += bt - beta[to];
    }
    new_utility -= macro_term(load[0], sum_logr[0], n_b);
    new_utility += macro_term(k0, logr0, nb_new);
    return new_utility;
  }

  void commit_move(int k, int to) {
    const int from = cell_of_mt[k];
    const double new_utility = evaluate_move(k, to);
    if (from == 0) {
      load[0] -= 1;
      sum_logr[0] -= chan.log_r_macro[k];
    } else {
      load[from] -= 1;
      sum_r[from] -= chan.r_sc(from, k);
      sum_logr[from] -= chan.log_r_sc(from, k);
      n_b -= beta[from];
      beta[from] = exact_beta(from, sum_r[from], load[from]);
      n_b += beta[from];
    }
    if (to == 0) {
      load[0] += 1;
      sum_logr[0] += chan.log_r_macro[k];
    } else {
      load[to] += 1;
      sum_r[to] += chan.r_sc(to, k);
      sum_logr[to] += chan.log_r_sc(to, k);
      n_b -= beta[to];
      beta[to] = exact_beta(to, sum_r[to], load[to]);
      n_b += beta[to];
    }
    cell_of_mt[k] = to;
    utility = new_utility;
  }

  OffloadResult finish() const {
    Association assoc = Association::from_cells(cell_of_mt, chan.n_small_cells());
    PerCellWbba w = beta_per_cell_all(assoc, chan);
    OffloadResult out{std::move(assoc), std::move(w), 0.0};
    out.utility = sum_log_rate(out.assoc, out.wbba, chan);
    return out;
  }
};

}  // namespace detail

// Greedy macro offloading under per-cell splits. One pass over the MTs in
// index order: each macro-served MT is tried on every small cell in index
// order and a move is committed as soon as it strictly improves the
// objective; later candidates then compete against the MT's new cell, so one
// MT may move more than once within its pass. Splits of the affected cells
// are rebuilt exactly for every tentative move.
inline OffloadResult offload_macro(const Association& assoc, const PerCellWbba& wbba,
                                   const ChannelRealization& chan) {
  detail::MoveState state(assoc, wbba, chan);
  const int ns = chan.n_small_cells();
  for (int k = 0; k < chan.n_mts(); ++k) {
    if (state.cell_of_mt[k] != 0) continue;
    for (int j = 1; j <= ns; ++j) {
      if (state.cell_of_mt[k] == j) continue;
      if (state.evaluate_move(k, j) > state.utility) state.commit_move(k, j);
    }
  }
  return state.finish();
}

// Same greedy move test between small cells: every small-cell-served MT is
// offered to every other small cell, macro load is never touched.
inline OffloadResult balance_small_cells(const Association& assoc, const PerCellWbba& wbba,
                                         const ChannelRealization& chan) {
  detail::MoveState state(assoc, wbba, chan);
  const int ns = chan.n_small_cells();
  for (int s = 1; s <= ns; ++s) {
    for (int k = 0; k < chan.n_mts(); ++k) {
      if (state.cell_of_mt[k] != s) continue;
      for (int j = 1; j <= ns; ++j) {
        if (state.cell_of_mt[k] == j) continue;
        if (state.evaluate_move(k, j) > state.utility) state.commit_move(k, j);
      }
    }
  }
  return state.finish();
}

}  // namespace hetsim
