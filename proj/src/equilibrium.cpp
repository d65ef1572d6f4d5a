#include "datamarket/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace datamarket {
namespace {

// Advances masks as an odometer with the last buyer least significant, so
// profiles are visited in lexicographic order. Returns false after the last.
bool next_profile(std::vector<std::uint32_t>& masks, std::uint32_t sets) {
  for (std::size_t i = masks.size(); i-- > 0;) {
    if (++masks[i] < sets) return true;
    masks[i] = 0;
  }
  return false;
}

bool masks_are_equilibrium(const MarketInstance& instance,
                           std::vector<std::uint32_t>& masks) {
  const std::uint32_t sets = instance.sets();
  for (int i = 0; i < instance.buyers(); ++i) {
    const double current = detail::utility(instance, i, masks, masks[i]);
    for (std::uint32_t s = 0; s < sets; ++s) {
      if (s == masks[i]) continue;
      if (detail::utility(instance, i, masks, s) > current + kTolerance) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

std::uint64_t checked_profile_count(const MarketInstance& instance,
                                    std::uint64_t budget) {
  const auto bits = static_cast<std::uint64_t>(instance.buyers()) *
                    static_cast<std::uint64_t>(instance.sellers());
  if (bits >= 64 || (std::uint64_t{1} << bits) > budget) {
    throw BudgetError("profile enumeration needs 2^" + std::to_string(bits) +
                      " profiles, budget is " + std::to_string(budget));
  }
  return std::uint64_t{1} << bits;
}

SellerSet dominant_strategy(const MarketInstance& instance, int buyer) {
  (void)instance.independent();
  const int k = instance.sellers();
  SellerSet best = SellerSet::empty(k);
  double best_value = expected_effective_utility(instance, buyer, best);
  for (std::uint32_t s = 1; s < instance.sets(); ++s) {
    const SellerSet candidate(s, k);
    const double value = expected_effective_utility(instance, buyer, candidate);
    if (value > best_value + kTolerance) {
      best = candidate;
      best_value = value;
    }
  }
  return best;
}

Profile dominant_profile(const MarketInstance& instance) {
  std::vector<SellerSet> choices;
  for (int i = 0; i < instance.buyers(); ++i) {
    choices.push_back(dominant_strategy(instance, i));
  }
  return Profile(std::move(choices));
}

SocialOptimum social_optimum(const MarketInstance& instance,
                             std::uint64_t budget) {
  if (instance.model() == ExternalityModel::kIndependent) {
    // Welfare separates: sum_j [g_j(gamma_j) - externality j creates].
    const int k = instance.sellers();
    std::vector<std::uint32_t> masks(instance.buyers(), 0);
    for (int j = 0; j < instance.buyers(); ++j) {
      double best = 0.0;
      for (std::uint32_t s = 0; s < instance.sets(); ++s) {
        const double v = instance.gains()(j, s) -
                         instance.contributed_externality(j, SellerSet(s, k));
        if (s == 0 || v > best + kTolerance) {
          best = v;
          masks[j] = s;
        }
      }
    }
    return {Profile::from_masks(masks, k), detail::welfare(instance, masks)};
  }
  checked_profile_count(instance, budget);
  std::vector<std::uint32_t> masks(instance.buyers(), 0);
  std::vector<std::uint32_t> best_masks = masks;
  double best = detail::welfare(instance, masks);
  while (next_profile(masks, instance.sets())) {
    const double w = detail::welfare(instance, masks);
    if (w > best + kTolerance) {
      best = w;
      best_masks = masks;
    }
  }
  return {Profile::from_masks(best_masks, instance.sellers()), best};
}

bool is_pure_equilibrium(const MarketInstance& instance,
                         const Profile& profile) {
  instance.check_profile(profile);
  auto masks = profile.masks();
  return masks_are_equilibrium(instance, masks);
}

std::vector<Profile> enumerate_pure_equilibria(const MarketInstance& instance,
                                               std::uint64_t budget) {
  std::vector<Profile> out;
  if (instance.model() == ExternalityModel::kIndependent) {
    // A buyer's deviation gain is its effective-utility difference, so only
    // near-maximizers of each buyer's effective utility can appear in an
    // equilibrium. Walk their product and confirm each profile exactly.
    const int n = instance.buyers();
    const int k = instance.sellers();
    std::vector<std::vector<std::uint32_t>> candidates(n);
    std::uint64_t product = 1;
    for (int i = 0; i < n; ++i) {
      std::vector<double> value(instance.sets());
      double top = -std::numeric_limits<double>::infinity();
      for (std::uint32_t s = 0; s < instance.sets(); ++s) {
        value[s] = expected_effective_utility(instance, i, SellerSet(s, k));
        top = std::max(top, value[s]);
      }
      for (std::uint32_t s = 0; s < instance.sets(); ++s) {
        if (value[s] >= top - 2 * kTolerance) candidates[i].push_back(s);
      }
      product *= candidates[i].size();
      if (product > budget) {
        throw BudgetError("more than " + std::to_string(budget) +
                          " candidate equilibrium profiles");
      }
    }
    std::vector<std::size_t> pick(n, 0);
    std::vector<std::uint32_t> masks(n);
    while (true) {
      for (int i = 0; i < n; ++i) masks[i] = candidates[i][pick[i]];
      if (masks_are_equilibrium(instance, masks)) {
        out.push_back(Profile::from_masks(masks, k));
      }
      int i = n - 1;
      while (i >= 0 && ++pick[i] == candidates[i].size()) pick[i--] = 0;
      if (i < 0) break;
    }
    return out;
  }
  checked_profile_count(instance, budget);
  std::vector<std::uint32_t> masks(instance.buyers(), 0);
  do {
    if (masks_are_equilibrium(instance, masks)) {
      out.push_back(Profile::from_masks(masks, instance.sellers()));
    }
  } while (next_profile(masks, instance.sets()));
  return out;
}

EquilibriumReport wrae(const MarketInstance& instance, std::uint64_t budget) {
  EquilibriumReport report;
  report.social_optimum = social_optimum(instance, budget);
  report.pure_equilibria = enumerate_pure_equilibria(instance, budget);
  if (instance.model() == ExternalityModel::kIndependent) {
    report.dominant_profile = dominant_profile(instance);
  }
  if (report.pure_equilibria.empty()) return report;

  double lowest = std::numeric_limits<double>::infinity();
  double highest = -std::numeric_limits<double>::infinity();
  for (const auto& eq : report.pure_equilibria) {
    const double w = social_welfare(instance, eq);
    report.equilibrium_welfare.push_back(w);
    lowest = std::min(lowest, w);
    highest = std::max(highest, w);
  }
  report.worst_wrae = report.social_optimum.welfare - lowest;
  report.best_wrae = report.social_optimum.welfare - highest;
  return report;
}

SellerSet best_response(const MarketInstance& instance, const Profile& profile,
                        int buyer) {
  instance.check_profile(profile);
  if (buyer < 0 || buyer >= instance.buyers()) {
    throw DimensionError("best_response: buyer index out of range");
  }
  const auto masks = profile.masks();
  std::uint32_t best = masks[buyer];
  double best_value = detail::utility(instance, buyer, masks, best);
  for (std::uint32_t s = 0; s < instance.sets(); ++s) {
    const double value = detail::utility(instance, buyer, masks, s);
    if (value > best_value + kTolerance) {
      best = s;
      best_value = value;
    }
  }
  return SellerSet(best, instance.sellers());
}

DynamicsTrace sequential_best_response(const MarketInstance& instance,
                                       const Profile& start,
                                       const std::vector<int>& order,
                                       int max_rounds) {
  instance.check_profile(start);
  if (max_rounds < 1) {
    throw PreconditionError("sequential_best_response: max_rounds must be >= 1");
  }
  std::vector<bool> seen_buyer(instance.buyers(), false);
  if (order.size() != static_cast<std::size_t>(instance.buyers())) {
    throw PreconditionError("buyer order must be a permutation of all buyers");
  }
  for (int b : order) {
    if (b < 0 || b >= instance.buyers() || seen_buyer[b]) {
      throw PreconditionError("buyer order must be a permutation of all buyers");
    }
    seen_buyer[b] = true;
  }

  DynamicsTrace trace;
  trace.states.push_back(start);
  std::set<Profile> seen{start};
  Profile current = start;
  for (int round = 1; round <= max_rounds; ++round) {
    bool changed = false;
    for (int b : order) {
      const SellerSet next = best_response(instance, current, b);
      if (next != current[b]) {
        trace.updates.push_back({round, b, current[b], next});
        current.set(b, next);
        changed = true;
      }
    }
    trace.states.push_back(current);
    if (!changed) {
      if (!is_pure_equilibrium(instance, current)) {
        throw std::logic_error(
            "best-response fixed point failed the deviation check");
      }
      trace.converged = true;
      break;
    }
    if (!seen.insert(current).second) {
      trace.cycle_detected = true;
      break;
    }
  }
  return trace;
}

double potential(const MarketInstance& instance, const Profile& profile) {
  instance.check_profile(profile);
  double total = 0.0;
  const int n = instance.buyers();
  for (int i = 0; i < n; ++i) {
    total += instance.gain(i, profile[i]);
    for (int j = i + 1; j < n; ++j) {
      total -= instance.pair_externality(i, j, profile[i].bits(),
                                         profile[j].bits());
    }
  }
  return total;
}

MarketInstance symmetrize(const MarketInstance& instance) {
  const auto& ext = instance.joint();
  if (std::abs(instance.alpha() - 0.5) > kTolerance) {
    throw PreconditionError(
        "symmetrize: reduction only holds at alpha = 0.5 (got " +
        std::to_string(instance.alpha()) + ")");
  }
  const int n = instance.buyers();
  const int k = instance.sellers();
  const std::uint32_t sets = instance.sets();
  JointExternality out(n, k, /*symmetric=*/true);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      for (std::uint32_t a = 0; a < sets; ++a) {
        for (std::uint32_t b = 0; b < sets; ++b) {
          out.at(i, j, a, b) = 0.5 * (ext(i, j, a, b) + ext(j, i, b, a));
        }
      }
    }
  }
  return MarketInstance(instance.gains(), std::move(out), 0.0,
                        instance.lambda(), instance.noise());
}

}  // namespace datamarket
