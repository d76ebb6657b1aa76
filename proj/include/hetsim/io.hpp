#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hetsim/experiment.hpp"

namespace hetsim {

// Shortest-width formatting that still round-trips doubles exactly, so CSV
// bytes are a pure function of the numbers.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline NetworkScenario scenario_from_json(const nlohmann::json& j) {
  NetworkScenario s;
  s.macro_radius = j.value("macro_radius", s.macro_radius);
  s.n_small_cells = j.value("n_small_cells", s.n_small_cells);
  s.n_mts = j.value("n_mts", s.n_mts);
  s.n_antennas = j.value("n_antennas", s.n_antennas);
  s.beam_group = j.value("beam_group", s.beam_group);
  s.p_macro = j.value("p_macro", s.p_macro);
  s.p_small = j.value("p_small", s.p_small);
  s.sc_antenna_gain = j.value("sc_antenna_gain", s.sc_antenna_gain);
  s.noise_psd = j.value("noise_psd", s.noise_psd);
  s.bandwidth = j.value("bandwidth", s.bandwidth);
  s.sigma_bs = j.value("sigma_bs", s.sigma_bs);
  s.sigma_sc = j.value("sigma_sc", s.sigma_sc);
  s.min_link_distance = j.value("min_link_distance", s.min_link_distance);
  s.validate();
  return s;
}

inline SolverConfig solver_config_from_json(const nlohmann::json& j) {
  SolverConfig c;
  c.step_mu_0 = j.value("step_mu_0", c.step_mu_0);
  c.step_nu_0 = j.value("step_nu_0", c.step_nu_0);
  c.step_decay = j.value("step_decay", c.step_decay);
  c.inner_tol = j.value("inner_tol", c.inner_tol);
  c.inner_max_iter = j.value("inner_max_iter", c.inner_max_iter);
  c.outer_tol = j.value("outer_tol", c.outer_tol);
  c.outer_tol_utility = j.value("outer_tol_utility", c.outer_tol_utility);
  c.outer_max_iter = j.value("outer_max_iter", c.outer_max_iter);
  c.beta_init = j.value("beta_init", c.beta_init);
  c.stability_window = j.value("stability_window", c.stability_window);
  c.validate();
  return c;
}

inline ExperimentSpec spec_from_json(const nlohmann::json& j) {
  ExperimentSpec spec;
  if (j.contains("scenario")) spec.scenario = scenario_from_json(j.at("scenario"));
  if (j.contains("scenario_kind"))
    spec.scenario_kind = scenario_kind_from_string(j.at("scenario_kind").get<std::string>());
  if (j.contains("algorithms")) {
    spec.algorithms.clear();
    for (const auto& a : j.at("algorithms")) spec.algorithms.push_back(algorithm_from_string(a.get<std::string>()));
  }
  spec.n_trials = j.value("n_trials", spec.n_trials);
  spec.master_seed = j.value("master_seed", spec.master_seed);
  spec.cre_bias_db = j.value("cre_bias_db", spec.cre_bias_db);
  spec.output_dir = j.value("output_dir", spec.output_dir);
  if (j.contains("solver")) spec.solver = solver_config_from_json(j.at("solver"));
  spec.limits.max_enumeration = j.value("max_enumeration", spec.limits.max_enumeration);
  spec.n_workers = j.value("n_workers", spec.n_workers);
  return spec;
}

inline ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return spec_from_json(j);
}

inline nlohmann::json diagnostics_to_json(const SolverDiagnostics& d) {
  return nlohmann::json{{"outer_iterations", d.outer_iterations},
                        {"inner_iterations_total", d.inner_iterations_total},
                        {"outer_converged", d.outer_converged},
                        {"all_inner_converged", d.all_inner_converged},
                        {"backhaul_feasible", d.backhaul_feasible},
                        {"utility_trace", d.utility_trace},
                        {"beta_trace", d.beta_trace},
                        {"beta_vec_trace", d.beta_vec_trace},
                        {"final_mu", d.final_mu},
                        {"final_nu", d.final_nu}};
}

inline nlohmann::json summary_to_json(const MetricsSummary& summary, const ExperimentSpec& spec,
                                      double rate_scale = 1.0) {
  nlohmann::json algos = nlohmann::json::array();
  for (const AlgorithmSummary& s : summary.per_algorithm) {
    algos.push_back({{"algorithm", to_string(s.algorithm)},
                     {"n_trials", s.n_trials},
                     {"n_converged", s.n_converged},
                     {"mean_utility", s.mean_utility},
                     {"utility_std_error", s.utility_std_error},
                     {"r50", s.r50 * rate_scale},
                     {"r90", s.r90 * rate_scale}});
  }
  return nlohmann::json{
      {"scenario_kind", to_string(spec.scenario_kind)},
      {"n_trials", spec.n_trials},
      {"master_seed", spec.master_seed},
      {"n_small_cells", spec.scenario.n_small_cells},
      {"n_mts", spec.scenario.n_mts},
      {"rate_unit", rate_scale == 1.0 ? "bit/s/Hz" : "bit/s"},
      {"algorithms", algos}};
}

inline void write_results_csv(const std::string& path, const std::vector<TrialResult>& trials,
                              double rate_scale = 1.0) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "trial_id,algorithm,mt_id,cell_id,rate\n";
  for (const TrialResult& t : trials)
    for (std::size_t k = 0; k < t.mt_rates.size(); ++k)
      out << t.trial_id << ',' << to_string(t.algorithm) << ',' << k << ',' << t.cell_of_mt[k] << ','
          << format_double(t.mt_rates[k] * rate_scale) << '\n';
}

inline void write_cdf_csv(const std::string& path, const AlgorithmSummary& s, double rate_scale = 1.0) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "rate,cumulative_fraction\n";
  for (const auto& [rate, fraction] : s.cdf)
    out << format_double(rate * rate_scale) << ',' << format_double(fraction) << '\n';
}

inline void write_link_budget_csv(const std::string& path, const std::vector<LinkBudgetRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "link_id,distance,path_loss_db,shadowing_db,gain,sinr\n";
  for (const LinkBudgetRow& r : rows)
    out << r.link_id << ',' << format_double(r.distance) << ',' << format_double(r.path_loss_db) << ','
        << format_double(r.shadowing_db) << ',' << format_double(r.gain) << ',' << format_double(r.sinr)
        << '\n';
}

// Writes results_raw.csv, summary.json and one cdf_<algorithm>.csv per
// algorithm into spec.output_dir, creating the directory if needed.
inline void write_experiment_outputs(const ExperimentSpec& spec, const ExperimentResult& result,
                                     double rate_scale = 1.0) {
  const std::filesystem::path dir(spec.output_dir);
  std::filesystem::create_directories(dir);
  write_results_csv((dir / "results_raw.csv").string(), result.trials, rate_scale);
  {
    std::ofstream out(dir / "summary.json");
    if (!out) throw std::runtime_error("cannot write summary.json in '" + spec.output_dir + "'");
    out << summary_to_json(result.summary, spec, rate_scale).dump(2) << '\n';
  }
  for (const AlgorithmSummary& s : result.summary.per_algorithm)
    write_cdf_csv((dir / ("cdf_" + to_string(s.algorithm) + ".csv")).string(), s, rate_scale);
}

}  // namespace hetsim
