#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hetsim/policies.hpp"
#include "hetsim/uwbba.hpp"

namespace hetsim {

namespace detail {

// ln(1 - x), or -infinity once x reaches 1. Keeps NaN out of the argmax when
// an allocation leaves a BS no bandwidth at all.
inline double log1m_or_neg_inf(double x) {
  return x < 1.0 ? std::log1p(-x) : kNegInf;
}

}  // namespace detail

// Revenue of MT k at BS j under dedicated per-cell splits. Differs from the
// unified one by the bandwidth-discount offset of the serving BS: the macro
// BS discounts by the beam-group share lost to backhauling, small cell j by
// its own split. Rejects splits that are already invalid as allocations.
inline double revenue_percell(int k, int j, const DualState& duals, const PerCellWbba& w,
                              const ChannelRealization& chan) {
  const double n_b = w.backhaul_load();
  if (n_b >= chan.n_beam_group) throw std::invalid_argument("revenue_percell: backhaul eats the whole beam group");
  for (int l = 1; l <= chan.n_small_cells(); ++l)
    if (w.beta[l] > 1.0) throw std::invalid_argument("revenue_percell: beta out of range");
  const double discount = j == 0 ? detail::log1m_or_neg_inf(n_b / chan.n_beam_group)
                                 : detail::log1m_or_neg_inf(w.beta[j]);
  const double beta_j = j == 0 ? 0.0 : w.beta[j];
  const double log_r = detail::baseline_log_rate(chan, j, k);
  const double r = detail::baseline_rate(chan, j, k);
  return discount + log_r - duals.mu[j] - duals.nu[j] * (1.0 - beta_j) * r;
}

inline Association assign_step_percell(const DualState& duals, const PerCellWbba& w,
                                       const ChannelRealization& chan) {
  const int nu_count = chan.n_mts();
  const int ns = chan.n_small_cells();
  std::vector<int> cells(nu_count, 0);
  for (int k = 0; k < nu_count; ++k) {
    int best_j = 0;
    double best = revenue_percell(k, 0, duals, w, chan);
    for (int j = 1; j <= ns; ++j) {
      const double v = revenue_percell(k, j, duals, w, chan);
      if (v > best) {
        best = v;
        best_j = j;
      }
    }
    cells[k] = best_j;
  }
  return Association::from_cells(std::move(cells), ns);
}

inline std::vector<double> update_k_aux_percell(const DualState& duals, const PerCellWbba& w,
                                                const ChannelRealization& chan) {
  const int ns = chan.n_small_cells();
  const double cap = static_cast<double>(chan.n_mts());
  std::vector<double> k_aux(ns + 1);
  for (int j = 0; j <= ns; ++j) {
    const double backhaul_term = j == 0 ? 0.0 : duals.nu[j] * w.beta[j] * chan.c_backhaul[j];
    k_aux[j] = std::min(std::exp(duals.mu[j] + backhaul_term - 1.0), cap);
  }
  return k_aux;
}

inline void update_multipliers_percell(DualState& duals, const Association& assoc,
                                       const std::vector<double>& k_aux, const PerCellWbba& w,
                                       const ChannelRealization& chan, int t, const SolverConfig& cfg) {
  if (t < 1) throw std::invalid_argument("update_multipliers_percell: t is 1-based");
  const double step_mu = cfg.step_mu_0 / std::pow(static_cast<double>(t), cfg.step_decay);
  const double step_nu = cfg.step_nu_0 / std::pow(static_cast<double>(t), cfg.step_decay);
  const int ns = chan.n_small_cells();
  for (int j = 0; j <= ns; ++j) {
    const double g_mu = k_aux[j] - static_cast<double>(assoc.load[j]);
    duals.mu[j] = std::max(0.0, duals.mu[j] - step_mu * g_mu);
    if (j == 0) continue;
    const double delivered = (1.0 - w.beta[j]) * detail::cell_rate_sum(assoc, chan, j);
    const double g_nu = w.beta[j] * chan.c_backhaul[j] * k_aux[j] - delivered;
    duals.nu[j] = std::max(0.0, duals.nu[j] - step_nu * g_nu);
  }
  duals.k_aux = k_aux;
}

namespace detail {

inline bool backhaul_fits_percell(const Association& assoc, const PerCellWbba& w,
                                  const ChannelRealization& chan, double slack = 1e-12) {
  for (int j = 1; j <= chan.n_small_cells(); ++j) {
    if (assoc.load[j] == 0) continue;
    const double delivered = (1.0 - w.beta[j]) / assoc.load[j] * cell_rate_sum(assoc, chan, j);
    if (delivered > w.beta[j] * chan.c_backhaul[j] + slack) return false;
  }
  return true;
}

}  // namespace detail

// Association stage at fixed per-cell splits; mirrors solve_inner.
inline InnerResult solve_inner_percell(const PerCellWbba& w, const ChannelRealization& chan,
                                       const SolverConfig& cfg) {
  cfg.validate();
  DualState duals = DualState::initial(chan.n_small_cells(), chan.n_mts());

  InnerResult result;
  std::optional<double> best_value;
  Association prev;
  int stable_run = 0;

  for (int t = 1; t <= cfg.inner_max_iter; ++t) {
    Association assoc = assign_step_percell(duals, w, chan);
    const std::vector<double> k_aux = update_k_aux_percell(duals, w, chan);
    const std::vector<double> mu_before = duals.mu;
    const std::vector<double> nu_before = duals.nu;
    update_multipliers_percell(duals, assoc, k_aux, w, chan, t, cfg);

    if (detail::backhaul_fits_percell(assoc, w, chan)) {
      const double value = sum_log_rate(assoc, w, chan);
      if (!best_value || value > *best_value) {
        best_value = value;
        result.assoc = assoc;
      }
      result.found_feasible = true;
    }

    result.iterations = t;
    stable_run = (t > 1 && assoc == prev) ? stable_run + 1 : 1;
    prev = std::move(assoc);
    if (stable_run >= cfg.stability_window) {
      result.converged = true;
      break;
    }
    double change = 0.0;
    for (std::size_t j = 0; j < duals.mu.size(); ++j) {
      change = std::max(change, std::abs(duals.mu[j] - mu_before[j]));
      change = std::max(change, std::abs(duals.nu[j] - nu_before[j]));
    }
    if (change < cfg.inner_tol) {
      result.converged = true;
      break;
    }
  }

  if (result.found_feasible) {
    result.feasible = true;
  } else {
    result.assoc = std::move(prev);
  }
  result.duals = std::move(duals);
  return result;
}

struct PerCellSolution {
  Association assoc;
  PerCellWbba wbba;
  double utility = kNegInf;
  SolverDiagnostics diagnostics;
};

// Joint association and per-cell split optimizer. Seeds with the max-SINR
// association, then alternates the association stage at the current splits
// with the exact per-cell split rebuild (each non-empty cell's backhaul runs
// at capacity). Stops once the objective settles and returns the best iterate.
inline PerCellSolution solve_percell(const ChannelRealization& chan, const SolverConfig& cfg = {}) {
  cfg.validate();
  PerCellSolution sol;
  const int ns = chan.n_small_cells();
  if (chan.n_mts() == 0) {
    sol.assoc = Association::all_macro(0, ns);
    sol.wbba = PerCellWbba::zeros(ns);
    sol.utility = 0.0;
    sol.diagnostics.outer_converged = true;
    return sol;
  }

  // Max-SINR start with the exact splits it needs.
  Association assoc = sinr_association(chan);
  PerCellWbba w = beta_per_cell_all(assoc, chan);
  double utility = sum_log_rate(assoc, w, chan);

  SolverDiagnostics& diag = sol.diagnostics;
  sol.assoc = assoc;
  sol.wbba = w;
  sol.utility = utility;
  diag.utility_trace.push_back(utility);
  diag.beta_vec_trace.push_back(w.beta);

  // The all-macro point with all splits at zero is always feasible; keeping
  // it in the best-pair tracker bounds the alternation from below when the
  // max-SINR start sits in a poor basin.
  {
    Association anchor = Association::all_macro(chan.n_mts(), ns);
    PerCellWbba anchor_w = beta_per_cell_all(anchor, chan);
    const double anchor_u = sum_log_rate(anchor, anchor_w, chan);
    diag.utility_trace.push_back(anchor_u);
    diag.beta_vec_trace.push_back(anchor_w.beta);
    if (anchor_u > sol.utility) {
      sol.assoc = std::move(anchor);
      sol.wbba = std::move(anchor_w);
      sol.utility = anchor_u;
    }
  }

  for (int s = 1; s <= cfg.outer_max_iter; ++s) {
    InnerResult inner = solve_inner_percell(w, chan, cfg);
    diag.outer_iterations = s;
    diag.inner_iterations_total += inner.iterations;
    diag.all_inner_converged = diag.all_inner_converged && inner.converged;

    assoc = inner.assoc;
    w = beta_per_cell_all(assoc, chan);
    const double next = sum_log_rate(assoc, w, chan);
    diag.utility_trace.push_back(next);
    diag.beta_vec_trace.push_back(w.beta);
    if (next > sol.utility) {
      sol.assoc = assoc;
      sol.wbba = w;
      sol.utility = next;
    }
    diag.final_mu = inner.duals.mu;
    diag.final_nu = inner.duals.nu;

    if (std::abs(next - utility) < cfg.outer_tol_utility) {
      diag.outer_converged = true;
      break;
    }
    utility = next;
  }
  diag.backhaul_feasible = max_backhaul_violation(sol.assoc, sol.wbba, chan) <= 1e-9;
  return sol;
}

}  // namespace hetsim
