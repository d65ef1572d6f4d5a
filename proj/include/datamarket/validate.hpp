#pragma once

#include <string>
#include <vector>

#include "datamarket/market.hpp"

namespace datamarket {

struct InvariantCheck {
  std::string name;
  bool passed = true;
  std::string detail;  // first violation found, empty when passed
};

// Runs every table-level and model-level invariant against the instance.
// Randomized checks (revenue neutrality, alpha invariance, sampled bounds)
// use a fixed validation stream so reports are reproducible.
std::vector<InvariantCheck> validate_instance(const MarketInstance& instance,
                                              int random_profiles = 64);

bool all_passed(const std::vector<InvariantCheck>& checks);

}  // namespace datamarket
