#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "datamarket/market.hpp"

namespace datamarket {

// Default cap on (2^k)^n for exhaustive profile enumeration.
inline constexpr std::uint64_t kDefaultProfileBudget = std::uint64_t{1} << 24;

struct SocialOptimum {
  Profile profile;
  double welfare = 0.0;
};

struct EquilibriumReport {
  std::vector<Profile> pure_equilibria;
  std::vector<double> equilibrium_welfare;  // aligned with pure_equilibria
  SocialOptimum social_optimum;
  // Absent when the game has no pure equilibrium.
  std::optional<double> worst_wrae;
  std::optional<double> best_wrae;
  // Present for the independent model only.
  std::optional<Profile> dominant_profile;
};

struct StrategyUpdate {
  int round = 0;  // 1-based full pass index
  int buyer = 0;
  SellerSet from = SellerSet::empty(1);
  SellerSet to = SellerSet::empty(1);
};

// Sequential best-response run. `states` holds the start profile followed by
// the profile after every full pass.
struct DynamicsTrace {
  std::vector<Profile> states;
  std::vector<StrategyUpdate> updates;
  bool converged = false;
  bool cycle_detected = false;
};

// Number of profiles (2^k)^n; throws BudgetError when above `budget`.
std::uint64_t checked_profile_count(const MarketInstance& instance,
                                    std::uint64_t budget);

// argmax_gamma of the expected effective utility, smallest mask on ties.
SellerSet dominant_strategy(const MarketInstance& instance, int buyer);
Profile dominant_profile(const MarketInstance& instance);

// The independent model is solved exactly per buyer (welfare and deviation
// gains both separate across buyers); the joint model is enumerated and
// subject to `budget`.
SocialOptimum social_optimum(const MarketInstance& instance,
                             std::uint64_t budget = kDefaultProfileBudget);

// True when no buyer gains more than kTolerance by a unilateral deviation.
bool is_pure_equilibrium(const MarketInstance& instance,
                         const Profile& profile);

// All pure equilibria in lexicographic mask order. For the independent model
// `budget` caps the number of candidate profiles (products of per-buyer
// near-maximizers) instead of the full profile space.
std::vector<Profile> enumerate_pure_equilibria(
    const MarketInstance& instance,
    std::uint64_t budget = kDefaultProfileBudget);

EquilibriumReport wrae(const MarketInstance& instance,
                       std::uint64_t budget = kDefaultProfileBudget);

// Utility-maximizing set for `buyer` with the others fixed. Keeps the current
// choice unless some set is strictly better; otherwise smallest mask wins.
SellerSet best_response(const MarketInstance& instance, const Profile& profile,
                        int buyer);

DynamicsTrace sequential_best_response(const MarketInstance& instance,
                                       const Profile& start,
                                       const std::vector<int>& order,
                                       int max_rounds);

// sum_i g_i(gamma_i) - sum_{i<j} e_ij(gamma_i, gamma_j). Increases at every
// strict best-response step of a symmetric instance without transfers.
double potential(const MarketInstance& instance, const Profile& profile);

// Joint instance at alpha = 0.5 -> equivalent symmetric instance at alpha = 0.
MarketInstance symmetrize(const MarketInstance& instance);

}  // namespace datamarket
