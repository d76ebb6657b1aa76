#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hetsim/rates.hpp"

namespace hetsim {

struct EnumerationLimits {
  std::uint64_t max_enumeration = 1'000'000;
};

// Number of candidate associations, or 0 on overflow past `cap`.
inline std::uint64_t association_count(int n_small_cells, int n_mts, std::uint64_t cap) {
  std::uint64_t count = 1;
  const std::uint64_t base = static_cast<std::uint64_t>(n_small_cells) + 1;
  for (int k = 0; k < n_mts; ++k) {
    if (count > cap / base + 1) return 0;
    count *= base;
    if (count > cap) return 0;
  }
  return count;
}

namespace detail {

inline void check_enumerable(const ChannelRealization& chan, const EnumerationLimits& limits) {
  if (association_count(chan.n_small_cells(), chan.n_mts(), limits.max_enumeration) == 0)
    throw std::invalid_argument("exhaustive search: instance exceeds the enumeration limit");
}

// Advances a mixed-radix counter over per-MT digits 0..n_small_cells, MT 0
// least significant. Returns false after the last combination.
inline bool next_assignment(std::vector<int>& digits, int n_small_cells) {
  for (std::size_t k = 0; k < digits.size(); ++k) {
    if (digits[k] < n_small_cells) {
      ++digits[k];
      for (std::size_t l = 0; l < k; ++l) digits[l] = 0;
      return true;
    }
  }
  return false;
}

}  // namespace detail

struct UnifiedOptimum {
  Association assoc;
  UnifiedWbba wbba;
  double utility = kNegInf;
};

struct PerCellOptimum {
  Association assoc;
  PerCellWbba wbba;
  double utility = kNegInf;
};

// Exact optimum under a shared backhaul split: enumerates every association,
// pairs it with the tightest split that carries its traffic, and keeps the
// best objective. Ties keep the earliest enumerated assignment. Rejects
// instances with more than limits.max_enumeration candidates.
inline UnifiedOptimum brute_force_unified(const ChannelRealization& chan,
                                          const EnumerationLimits& limits = {}) {
  detail::check_enumerable(chan, limits);
  const int ns = chan.n_small_cells();
  std::vector<int> digits(chan.n_mts(), 0);
  UnifiedOptimum best;
  do {
    Association assoc = Association::from_cells(digits, ns);
    const double beta = min_feasible_beta_unified(assoc, chan);
    const double utility = sum_log_rate(assoc, UnifiedWbba{beta}, chan);
    if (utility > best.utility) {
      best.assoc = std::move(assoc);
      best.wbba = UnifiedWbba{beta};
      best.utility = utility;
    }
  } while (detail::next_assignment(digits, ns));
  return best;
}

namespace detail {

// Self-check on tiny instances: at the reported optimum no per-cell split can
// be nudged without either losing utility or breaking backhaul feasibility.
inline void check_percell_stationarity(const PerCellOptimum& best, const ChannelRealization& chan) {
  constexpr double eps = 1e-3;
  for (int j = 1; j <= chan.n_small_cells(); ++j) {
    if (best.assoc.load[j] == 0) continue;
    PerCellWbba up = best.wbba;
    up.beta[j] += eps;
    if (up.backhaul_load() < chan.n_beam_group && up.beta[j] < 1.0) {
      if (sum_log_rate(best.assoc, up, chan) >= best.utility)
        throw std::logic_error("exhaustive search: raising a split should never help");
    }
    PerCellWbba down = best.wbba;
    down.beta[j] -= eps;
    if (down.beta[j] > 0.0 && max_backhaul_violation(best.assoc, down, chan) <= 0.0)
      throw std::logic_error("exhaustive search: lowering a split should break feasibility");
  }
}

}  // namespace detail

// Exact optimum under per-cell splits: every association is paired with the
// per-cell splits that run each non-empty backhaul at capacity, which is the
// unique optimal split for a fixed association. Ties keep the earliest
// enumerated assignment. On instances of up to 4 MTs the result is verified
// against split perturbations of 1e-3 in both directions.
inline PerCellOptimum brute_force_percell(const ChannelRealization& chan,
                                          const EnumerationLimits& limits = {}) {
  detail::check_enumerable(chan, limits);
  const int ns = chan.n_small_cells();
  std::vector<int> digits(chan.n_mts(), 0);
  PerCellOptimum best;
  do {
    Association assoc = Association::from_cells(digits, ns);
    PerCellWbba w = beta_per_cell_all(assoc, chan);
    const double utility = sum_log_rate(assoc, w, chan);
    if (utility > best.utility) {
      best.assoc = std::move(assoc);
      best.wbba = std::move(w);
      best.utility = utility;
    }
  } while (detail::next_assignment(digits, ns));
  if (chan.n_mts() <= 4) detail::check_percell_stationarity(best, chan);
  return best;
}

}  // namespace hetsim
