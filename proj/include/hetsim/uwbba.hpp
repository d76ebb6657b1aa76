#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetsim/rates.hpp"

namespace hetsim {

// Tuning knobs shared by both bandwidth-allocation solvers. Subgradient steps
// follow delta(t) = delta0 / t^step_decay with t starting at 1.
struct SolverConfig {
  double step_mu_0 = 0.1;    // step size for the load multipliers
  double step_nu_0 = 0.01;   // step size for the backhaul multipliers
  double step_decay = 1.0;
  double inner_tol = 1e-4;       // max-norm multiplier change that ends the inner loop
  int inner_max_iter = 2000;
  double outer_tol = 1e-4;       // |beta change| that ends the unified outer loop
  double outer_tol_utility = 1e-6;  // |utility change| that ends the per-cell outer loop
  int outer_max_iter = 50;
  double beta_init = 0.5;
  int stability_window = 10;  // consecutive unchanged assignments that count as converged

  void validate() const {
    auto fail = [](const char* what) { throw std::invalid_argument(std::string("SolverConfig: ") + what); };
    if (!(step_mu_0 > 0.0) || !(step_nu_0 > 0.0)) fail("step sizes must be positive");
    if (step_decay < 0.0) fail("step_decay must be non-negative");
    if (!(inner_tol > 0.0) || !(outer_tol > 0.0) || !(outer_tol_utility > 0.0)) fail("tolerances must be positive");
    if (inner_max_iter < 1 || outer_max_iter < 1) fail("iteration caps must be at least 1");
    if (!(beta_init > 0.0) || !(beta_init < 1.0)) fail("beta_init must lie in (0,1)");
    if (stability_window < 1) fail("stability_window must be at least 1");
  }
};

// Multipliers of the dual decomposition. mu prices cell load, nu prices
// backhaul capacity; nu[0] belongs to the macro BS, which has no backhaul,
// and stays pinned at 0. k_aux is the auxiliary continuous load each BS would
// admit at the current prices.
struct DualState {
  std::vector<double> mu;     // size N_S+1
  std::vector<double> nu;     // size N_S+1, [0] always 0
  std::vector<double> k_aux;  // size N_S+1

  static DualState initial(int n_small_cells, int n_mts) {
    DualState d;
    d.mu.assign(n_small_cells + 1, 0.0);
    d.nu.assign(n_small_cells + 1, 0.0);
    d.k_aux.assign(n_small_cells + 1,
                   n_mts > 0 ? static_cast<double>(n_mts) / (n_small_cells + 1) : 1.0);
    return d;
  }
};

// Marginal value of handing MT k to BS j at the current prices: the MT's
// log-rate minus the load price minus the backhaul price of the access
// traffic it would add. The macro BS pays no backhaul price.
inline double revenue(int k, int j, const DualState& duals, double beta,
                      const ChannelRealization& chan) {
  const double log_r = detail::baseline_log_rate(chan, j, k);
  const double r = detail::baseline_rate(chan, j, k);
  return log_r - duals.mu[j] - duals.nu[j] * (1.0 - beta) * r;
}

// Greedy per-MT step of the dual decomposition: every MT goes to the BS with
// the highest revenue. Ties break toward the lowest cell index, so the macro
// BS wins a tie against any small cell.
inline Association assign_step(const DualState& duals, double beta, const ChannelRealization& chan) {
  const int nu_count = chan.n_mts();
  const int ns = chan.n_small_cells();
  std::vector<int> cells(nu_count, 0);
  for (int k = 0; k < nu_count; ++k) {
    int best_j = 0;
    double best = revenue(k, 0, duals, beta, chan);
    for (int j = 1; j <= ns; ++j) {
      const double v = revenue(k, j, duals, beta, chan);
      if (v > best) {
        best = v;
        best_j = j;
      }
    }
    cells[k] = best_j;
  }
  return Association::from_cells(std::move(cells), ns);
}

// Stationary point of the per-BS subproblem in the admitted-load variable,
// clipped to the number of MTs: exp(mu_j + nu_j * beta * c_j - 1). The macro
// term has no backhaul component.
inline std::vector<double> update_k_aux(const DualState& duals, double beta,
                                        const ChannelRealization& chan) {
  const int ns = chan.n_small_cells();
  const double cap = static_cast<double>(chan.n_mts());
  std::vector<double> k_aux(ns + 1);
  for (int j = 0; j <= ns; ++j) {
    const double backhaul_term = j == 0 ? 0.0 : duals.nu[j] * beta * chan.c_backhaul[j];
    k_aux[j] = std::min(std::exp(duals.mu[j] + backhaul_term - 1.0), cap);
  }
  return k_aux;
}

// Projected subgradient step on the multipliers at iteration t (1-based).
// mu_j moves along (admitted load - assigned load); nu_j moves along the
// backhaul slack (capacity bought for k_aux MTs - access traffic delivered).
inline void update_multipliers(DualState& duals, const Association& assoc,
                               const std::vector<double>& k_aux, double beta,
                               const ChannelRealization& chan, int t, const SolverConfig& cfg) {
  if (t < 1) throw std::invalid_argument("update_multipliers: t is 1-based");
  const double step_mu = cfg.step_mu_0 / std::pow(static_cast<double>(t), cfg.step_decay);
  const double step_nu = cfg.step_nu_0 / std::pow(static_cast<double>(t), cfg.step_decay);
  const int ns = chan.n_small_cells();
  for (int j = 0; j <= ns; ++j) {
    const double g_mu = k_aux[j] - static_cast<double>(assoc.load[j]);
    duals.mu[j] = std::max(0.0, duals.mu[j] - step_mu * g_mu);
    if (j == 0) continue;
    const double delivered = (1.0 - beta) * detail::cell_rate_sum(assoc, chan, j);
    const double g_nu = beta * chan.c_backhaul[j] * k_aux[j] - delivered;
    duals.nu[j] = std::max(0.0, duals.nu[j] - step_nu * g_nu);
  }
  duals.k_aux = k_aux;
}

struct InnerResult {
  Association assoc;
  bool converged = false;       // stability window hit or multipliers settled
  int iterations = 0;
  bool feasible = false;        // returned assignment fits the backhaul at this beta
  bool found_feasible = false;  // some feasible assignment was seen
  DualState duals;
};

namespace detail {

inline bool backhaul_fits(const Association& assoc, double beta, const ChannelRealization& chan,
                          double slack = 1e-12) {
  for (int j = 1; j <= chan.n_small_cells(); ++j) {
    if (assoc.load[j] == 0) continue;
    const double delivered = (1.0 - beta) / assoc.load[j] * cell_rate_sum(assoc, chan, j);
    if (delivered > beta * chan.c_backhaul[j] + slack) return false;
  }
  return true;
}

}  // namespace detail

// Association stage at a fixed bandwidth split: runs the dual decomposition
// and returns the best assignment seen that fits the backhaul, judged by the
// fixed-beta objective. Falls back to the last iterate (feasible = false)
// when nothing feasible ever shows up. Multipliers always start from zero.
inline InnerResult solve_inner(double beta, const ChannelRealization& chan, const SolverConfig& cfg) {
  cfg.validate();
  const UnifiedWbba w{beta};
  DualState duals = DualState::initial(chan.n_small_cells(), chan.n_mts());

  InnerResult result;
  std::optional<double> best_value;
  Association prev;
  int stable_run = 0;

  for (int t = 1; t <= cfg.inner_max_iter; ++t) {
    Association assoc = assign_step(duals, beta, chan);
    const std::vector<double> k_aux = update_k_aux(duals, beta, chan);
    const std::vector<double> mu_before = duals.mu;
    const std::vector<double> nu_before = duals.nu;
    update_multipliers(duals, assoc, k_aux, beta, chan, t, cfg);

    if (detail::backhaul_fits(assoc, beta, chan)) {
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
    result.assoc = std::move(prev);  // last iterate, flagged infeasible
  }
  result.duals = std::move(duals);
  return result;
}

// Convergence and iteration-count record of one solver run.
struct SolverDiagnostics {
  int outer_iterations = 0;
  long long inner_iterations_total = 0;
  bool outer_converged = false;
  bool all_inner_converged = true;
  bool backhaul_feasible = true;
  std::vector<double> utility_trace;                 // objective after each outer pass
  std::vector<double> beta_trace;                    // unified splits per outer pass
  std::vector<std::vector<double>> beta_vec_trace;   // per-cell splits per outer pass
  std::vector<double> final_mu;
  std::vector<double> final_nu;
};

struct UnifiedSolution {
  Association assoc;
  UnifiedWbba wbba;
  double utility = kNegInf;
  SolverDiagnostics diagnostics;
};

// Joint association and shared-split optimizer. Alternates the association
// stage at the current split with the tightest split that carries the
// resulting traffic, and keeps the best (association, split) pair seen,
// starting from the all-macro fallback. The returned split always fits the
// backhaul because it is rebuilt from the returned association.
inline UnifiedSolution solve_unified(const ChannelRealization& chan, const SolverConfig& cfg = {}) {
  cfg.validate();
  UnifiedSolution sol;
  if (chan.n_mts() == 0) {
    sol.assoc = Association::all_macro(0, chan.n_small_cells());
    sol.wbba = UnifiedWbba{0.0};
    sol.utility = 0.0;
    sol.diagnostics.outer_converged = true;
    return sol;
  }

  double beta = cfg.beta_init;
  SolverDiagnostics& diag = sol.diagnostics;

  // The all-macro point at beta 0 certifies feasibility of the joint problem,
  // so it seeds the best-pair tracker. This bounds the alternation from
  // below: in dense deployments any loaded small cell forces a large shared
  // split whose cost every MT pays, macro-only service dominates, and the
  // alternation cannot reach that corner on its own because the association
  // stage only reprices MTs under the current split.
  {
    Association anchor = Association::all_macro(chan.n_mts(), chan.n_small_cells());
    const double beta0 = min_feasible_beta_unified(anchor, chan);
    const double utility0 = sum_log_rate(anchor, UnifiedWbba{beta0}, chan);
    diag.utility_trace.push_back(utility0);
    diag.beta_trace.push_back(beta0);
    sol.assoc = std::move(anchor);
    sol.wbba = UnifiedWbba{beta0};
    sol.utility = utility0;
  }
  for (int s = 1; s <= cfg.outer_max_iter; ++s) {
    InnerResult inner = solve_inner(beta, chan, cfg);
    diag.outer_iterations = s;
    diag.inner_iterations_total += inner.iterations;
    diag.all_inner_converged = diag.all_inner_converged && inner.converged;

    const double beta_next = min_feasible_beta_unified(inner.assoc, chan);
    const double utility = sum_log_rate(inner.assoc, UnifiedWbba{beta_next}, chan);
    diag.utility_trace.push_back(utility);
    diag.beta_trace.push_back(beta_next);
    if (utility > sol.utility) {
      sol.assoc = inner.assoc;
      sol.wbba = UnifiedWbba{beta_next};
      sol.utility = utility;
    }
    diag.final_mu = inner.duals.mu;
    diag.final_nu = inner.duals.nu;

    if (std::abs(beta_next - beta) < cfg.outer_tol) {
      diag.outer_converged = true;
      break;
    }
    beta = beta_next;
  }
  diag.backhaul_feasible = max_backhaul_violation(sol.assoc, sol.wbba, chan) <= 1e-9;
  return sol;
}

}  // namespace hetsim
