#pragma once

#include <vector>

#include "datamarket/market.hpp"
#include "datamarket/random.hpp"

namespace datamarket {

// Realized quantities of one market round.
struct RoundOutcome {
  int n = 0;
  std::vector<double> sampled_gain;
  // Row-major n x n, [i * n + j] = externality i suffers from j. Zero diagonal.
  std::vector<double> sampled_ext;
  std::vector<double> transaction;
  std::vector<double> realized_utility;

  double ext(int sufferer, int inducer) const {
    return sampled_ext[static_cast<std::size_t>(sufferer) * n + inducer];
  }
  double suffered(int buyer) const;
  double contributed(int buyer) const;
};

// Draws gains and pairwise externalities around the instance expectations,
// then settles transfers on the sampled externalities.
RoundOutcome sample_round(const MarketInstance& instance,
                          const Profile& profile, RandomStream& stream);

// Half-width of the symmetric gain noise that keeps samples inside [-1, 1].
double gain_noise_halfwidth(const NoiseModel& noise, double mean);

}  // namespace datamarket
