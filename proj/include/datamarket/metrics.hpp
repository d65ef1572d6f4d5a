#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "datamarket/equilibrium.hpp"
#include "datamarket/learning.hpp"
#include "datamarket/market.hpp"

namespace datamarket {

// Regrets against full-information benchmarks, computed from the expected
// tables at the profiles actually played. Realized-sample welfare regret is
// kept separately and labeled as such.
struct RegretSeries {
  std::vector<SellerSet> dominant;  // per buyer, at the instance alpha
  SocialOptimum optimum;
  std::vector<std::vector<double>> effective_per_round;  // [buyer][t - 1]
  std::vector<std::vector<double>> effective_cumulative;
  std::vector<double> welfare_per_round;
  std::vector<double> welfare_cumulative;
  std::vector<double> realized_welfare_cumulative;
};

// Cumulative expected effective regret of one buyer, one entry per round.
// The benchmark set is re-derived for every distinct alpha in the trace.
std::vector<double> effective_regret(const MarketInstance& instance,
                                     const SimulationTrace& trace, int buyer);

// Cumulative expected welfare regret against the social optimum.
std::vector<double> welfare_regret(
    const MarketInstance& instance, const SimulationTrace& trace,
    std::uint64_t budget = kDefaultProfileBudget);

RegretSeries regret_series(const MarketInstance& instance,
                           const SimulationTrace& trace,
                           std::uint64_t budget = kDefaultProfileBudget);

// Welfare regret split into the dominant-profile WRaE part (summed over
// rounds) and the residual from playing something other than the dominant
// profile. The residual never exceeds sum_i R_d^i + n * sum_t (1 - alpha_t).
struct WelfareDecomposition {
  double welfare_regret = 0.0;
  double dominant_wrae_part = 0.0;
  double residual = 0.0;
  std::vector<double> effective_regret;  // R_d^i(T)
  double wrae_bound = 0.0;               // n * sum_t (1 - alpha_t)
  double residual_bound = 0.0;
  double total_bound = 0.0;  // wrae_bound + residual_bound
};

WelfareDecomposition decompose_welfare_regret(
    const MarketInstance& instance, const SimulationTrace& trace,
    std::uint64_t budget = kDefaultProfileBudget);

// Columns: t, R_d^1..R_d^n, R_w (cumulative, expected-value form).
void write_regret_csv(std::ostream& out, const RegretSeries& series);

}  // namespace datamarket
