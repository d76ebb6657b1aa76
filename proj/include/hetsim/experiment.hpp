#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "hetsim/exhaustive.hpp"
#include "hetsim/policies.hpp"
#include "hetsim/pwbba.hpp"
#include "hetsim/uwbba.hpp"

namespace hetsim {

// How the backhaul share is provisioned: one split shared by all small cells,
// or a dedicated split per small cell.
enum class ScenarioKind { unified, per_cell };

enum class Algorithm { sinr, cre, cawbba, offload, offload_balanced, oracle };

inline std::string to_string(ScenarioKind kind) {
  return kind == ScenarioKind::unified ? "unified" : "percell";
}

inline ScenarioKind scenario_kind_from_string(const std::string& s) {
  if (s == "unified") return ScenarioKind::unified;
  if (s == "percell" || s == "per_cell") return ScenarioKind::per_cell;
  throw std::invalid_argument("unknown scenario kind '" + s + "' (expected unified|percell)");
}

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::sinr: return "sinr";
    case Algorithm::cre: return "cre";
    case Algorithm::cawbba: return "cawbba";
    case Algorithm::offload: return "offload";
    case Algorithm::offload_balanced: return "offload_balanced";
    case Algorithm::oracle: return "oracle";
  }
  throw std::logic_error("unreachable");
}

inline Algorithm algorithm_from_string(const std::string& s) {
  if (s == "sinr") return Algorithm::sinr;
  if (s == "cre") return Algorithm::cre;
  if (s == "cawbba") return Algorithm::cawbba;
  if (s == "offload") return Algorithm::offload;
  if (s == "offload_balanced") return Algorithm::offload_balanced;
  if (s == "oracle") return Algorithm::oracle;
  throw std::invalid_argument(
      "unknown algorithm '" + s + "' (expected sinr|cre|cawbba|offload|offload_balanced|oracle)");
}

// Full description of one Monte-Carlo run.
struct ExperimentSpec {
  NetworkScenario scenario;
  ScenarioKind scenario_kind = ScenarioKind::unified;
  std::vector<Algorithm> algorithms = {Algorithm::sinr, Algorithm::cre, Algorithm::cawbba};
  int n_trials = 200;
  std::uint64_t master_seed = 1;
  double cre_bias_db = 3.0;
  std::string output_dir = "results";
  SolverConfig solver;
  EnumerationLimits limits;
  int n_workers = 0;  // 0 = one per hardware thread

  void validate() const {
    scenario.validate();
    solver.validate();
    if (n_trials < 1) throw std::invalid_argument("ExperimentSpec: n_trials must be at least 1");
    if (scenario.n_mts < 1) throw std::invalid_argument("ExperimentSpec: scenario needs at least one MT");
    if (algorithms.empty()) throw std::invalid_argument("ExperimentSpec: no algorithms selected");
    if (n_workers < 0) throw std::invalid_argument("ExperimentSpec: n_workers must be non-negative");
    for (Algorithm a : algorithms) {
      if (a == Algorithm::oracle &&
          association_count(scenario.n_small_cells, scenario.n_mts, limits.max_enumeration) == 0)
        throw std::invalid_argument("ExperimentSpec: oracle instance exceeds the enumeration limit");
      if (scenario_kind == ScenarioKind::unified &&
          (a == Algorithm::offload || a == Algorithm::offload_balanced))
        throw std::invalid_argument("ExperimentSpec: " + to_string(a) + " needs the percell scenario");
    }
  }
};

// Outcome of one (trial, algorithm) cell.
struct TrialResult {
  int trial_id = 0;
  Algorithm algorithm = Algorithm::sinr;
  std::vector<int> cell_of_mt;
  std::vector<int> load;
  std::variant<UnifiedWbba, PerCellWbba> wbba;
  std::vector<double> mt_rates;  // what each MT actually receives, bit/s/Hz
  double utility = 0.0;
  bool converged = true;
  int outer_iterations = 0;
  long long inner_iterations = 0;
};

// Smallest rate that at least a fraction p of the sample exceeds: with the
// sample sorted ascending, the 1-based index is max(1, floor(n*(1-p))).
// p = 1 returns the minimum.
inline double rate_at_probability(std::vector<double> rates, double p) {
  if (rates.empty()) throw std::invalid_argument("rate_at_probability: empty sample");
  if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("rate_at_probability: p must lie in (0,1]");
  std::sort(rates.begin(), rates.end());
  const auto n = static_cast<double>(rates.size());
  const auto index = static_cast<std::int64_t>(std::floor(n * (1.0 - p)));
  return rates[static_cast<std::size_t>(std::max<std::int64_t>(1, index)) - 1];
}

struct AlgorithmSummary {
  Algorithm algorithm = Algorithm::sinr;
  int n_trials = 0;
  int n_converged = 0;
  double mean_utility = 0.0;
  double utility_std_error = 0.0;
  double r50 = 0.0;  // median rate over the pooled per-MT sample
  double r90 = 0.0;  // rate exceeded by 90% of the pooled sample
  std::vector<std::pair<double, double>> cdf;  // (rate, fraction <= rate), pooled
};

struct MetricsSummary {
  std::vector<AlgorithmSummary> per_algorithm;
};

namespace detail {

inline TrialResult make_result(int trial_id, Algorithm algo, Association assoc,
                               std::variant<UnifiedWbba, PerCellWbba> wbba,
                               const ChannelRealization& chan) {
  TrialResult r;
  r.trial_id = trial_id;
  r.algorithm = algo;
  r.utility = std::visit([&](const auto& w) { return sum_log_rate(assoc, w, chan); }, wbba);
  r.mt_rates = std::visit([&](const auto& w) { return per_mt_rates(assoc, w, chan); }, wbba);
  r.cell_of_mt = std::move(assoc.cell_of_mt);
  r.load = std::move(assoc.load);
  r.wbba = std::move(wbba);
  return r;
}

}  // namespace detail

// Runs one algorithm on one trial's channel draw. Pure function of
// (spec, algorithm, trial_id): the topology engine is seeded with the trial
// seed and the shadowing engine with its mix, so every algorithm of a trial
// sees the same network and trials never interact.
inline TrialResult run_trial(const ExperimentSpec& spec, Algorithm algo, int trial_id) {
  const std::uint64_t seed = trial_seed(spec.master_seed, static_cast<std::uint64_t>(trial_id));
  const Topology topo = generate_topology(spec.scenario, seed);
  std::mt19937_64 chan_rng(mix64(seed));
  const ChannelRealization chan = realize_channels(topo, spec.scenario, chan_rng);

  const bool unified = spec.scenario_kind == ScenarioKind::unified;
  TrialResult result;
  switch (algo) {
    case Algorithm::sinr:
    case Algorithm::cre: {
      Association assoc = algo == Algorithm::sinr ? sinr_association(chan)
                                                  : cre_association(chan, spec.cre_bias_db);
      if (unified) {
        const double beta = min_feasible_beta_unified(assoc, chan);
        result = detail::make_result(trial_id, algo, std::move(assoc), UnifiedWbba{beta}, chan);
      } else {
        PerCellWbba w = beta_per_cell_all(assoc, chan);
        result = detail::make_result(trial_id, algo, std::move(assoc), std::move(w), chan);
      }
      break;
    }
    case Algorithm::cawbba: {
      if (unified) {
        UnifiedSolution sol = solve_unified(chan, spec.solver);
        result = detail::make_result(trial_id, algo, std::move(sol.assoc), sol.wbba, chan);
        result.converged = sol.diagnostics.outer_converged && sol.diagnostics.backhaul_feasible;
        result.outer_iterations = sol.diagnostics.outer_iterations;
        result.inner_iterations = sol.diagnostics.inner_iterations_total;
        if (std::abs(sol.utility - result.utility) > 1e-9)
          throw std::logic_error("run_trial: solver utility disagrees with its recomputation");
      } else {
        PerCellSolution sol = solve_percell(chan, spec.solver);
        result = detail::make_result(trial_id, algo, std::move(sol.assoc), std::move(sol.wbba), chan);
        result.converged = sol.diagnostics.outer_converged && sol.diagnostics.backhaul_feasible;
        result.outer_iterations = sol.diagnostics.outer_iterations;
        result.inner_iterations = sol.diagnostics.inner_iterations_total;
        if (std::abs(sol.utility - result.utility) > 1e-9)
          throw std::logic_error("run_trial: solver utility disagrees with its recomputation");
      }
      break;
    }
    case Algorithm::offload:
    case Algorithm::offload_balanced: {
      if (unified) throw std::invalid_argument("run_trial: offloading needs the percell scenario");
      Association assoc = sinr_association(chan);
      PerCellWbba w = beta_per_cell_all(assoc, chan);
      OffloadResult off = offload_macro(assoc, w, chan);
      if (algo == Algorithm::offload_balanced) off = balance_small_cells(off.assoc, off.wbba, chan);
      result = detail::make_result(trial_id, algo, std::move(off.assoc), std::move(off.wbba), chan);
      break;
    }
    case Algorithm::oracle: {
      if (unified) {
        UnifiedOptimum opt = brute_force_unified(chan, spec.limits);
        result = detail::make_result(trial_id, algo, std::move(opt.assoc), opt.wbba, chan);
      } else {
        PerCellOptimum opt = brute_force_percell(chan, spec.limits);
        result = detail::make_result(trial_id, algo, std::move(opt.assoc), std::move(opt.wbba), chan);
      }
      break;
    }
  }
  return result;
}

// Pools every MT rate of one algorithm across trials and reduces to summary
// metrics. Trials enter in trial order, so the summary does not depend on
// who computed what.
inline MetricsSummary summarize(const std::vector<TrialResult>& trials,
                                const std::vector<Algorithm>& order) {
  MetricsSummary summary;
  for (Algorithm algo : order) {
    AlgorithmSummary s;
    s.algorithm = algo;
    std::vector<double> utilities;
    std::vector<double> pooled;
    for (const TrialResult& t : trials) {
      if (t.algorithm != algo) continue;
      ++s.n_trials;
      if (t.converged) ++s.n_converged;
      utilities.push_back(t.utility);
      pooled.insert(pooled.end(), t.mt_rates.begin(), t.mt_rates.end());
    }
    if (s.n_trials == 0) continue;
    double sum = 0.0;
    for (double u : utilities) sum += u;
    s.mean_utility = sum / s.n_trials;
    if (s.n_trials > 1) {
      double ss = 0.0;
      for (double u : utilities) ss += (u - s.mean_utility) * (u - s.mean_utility);
      s.utility_std_error = std::sqrt(ss / (s.n_trials - 1)) / std::sqrt(static_cast<double>(s.n_trials));
    }
    s.r50 = rate_at_probability(pooled, 0.5);
    s.r90 = rate_at_probability(pooled, 0.9);
    std::sort(pooled.begin(), pooled.end());
    s.cdf.reserve(pooled.size());
    const double n = static_cast<double>(pooled.size());
    for (std::size_t i = 0; i < pooled.size(); ++i)
      s.cdf.emplace_back(pooled[i], static_cast<double>(i + 1) / n);
    summary.per_algorithm.push_back(std::move(s));
  }
  return summary;
}

struct ExperimentResult {
  std::vector<TrialResult> trials;  // ordered by trial, then algorithm as specified
  MetricsSummary summary;
};

// Runs the whole grid of (trial, algorithm) cells on a small worker pool.
// Workers pull cells from a shared counter and write into preassigned slots,
// so the result is identical for any worker count, including 1.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const int n_algos = static_cast<int>(spec.algorithms.size());
  const int n_cells = spec.n_trials * n_algos;

  ExperimentResult result;
  result.trials.resize(n_cells);
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::string error;
  std::mutex error_mutex;

  int n_workers = spec.n_workers > 0 ? spec.n_workers
                                     : static_cast<int>(std::thread::hardware_concurrency());
  if (n_workers < 1) n_workers = 1;
  n_workers = std::min(n_workers, n_cells);

  auto work = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n_cells || failed.load()) return;
      const int trial = i / n_algos;
      const Algorithm algo = spec.algorithms[i % n_algos];
      try {
        result.trials[i] = run_trial(spec, algo, trial);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        failed.store(true);
        if (error.empty()) error = e.what();
        return;
      }
    }
  };

  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  if (failed.load()) throw std::runtime_error("run_experiment: " + error);

  result.summary = summarize(result.trials, spec.algorithms);
  return result;
}

}  // namespace hetsim
