#include "datamarket/sampling.hpp"

#include <algorithm>

namespace datamarket {
namespace {

// Draws zero-mean symmetric noise for a group of externality entries that
// share one sum bound: each entry gets half-width min(ext_halfwidth, mean),
// and the half-widths are scaled down jointly so they add up to at most the
// group's slack 1 - sum(means). Every sample then stays in [0, 1] and the
// group sum stays <= 1 without clipping.
void perturb_group(std::span<double> values, double halfwidth,
                   RandomStream& stream) {
  double mean_sum = 0.0;
  double width_sum = 0.0;
  std::vector<double> widths(values.size());
  for (std::size_t r = 0; r < values.size(); ++r) {
    mean_sum += values[r];
    widths[r] = std::min(halfwidth, values[r]);
    width_sum += widths[r];
  }
  const double slack = std::max(0.0, 1.0 - mean_sum);
  const double scale =
      width_sum > slack && width_sum > 0.0 ? slack / width_sum : 1.0;
  for (std::size_t r = 0; r < values.size(); ++r) {
    const double w = widths[r] * scale;
    if (w > 0.0) values[r] += stream.uniform(-w, w);
  }
}

}  // namespace

double RoundOutcome::suffered(int buyer) const {
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    if (j != buyer) total += ext(buyer, j);
  }
  return total;
}

double RoundOutcome::contributed(int buyer) const {
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    if (j != buyer) total += ext(j, buyer);
  }
  return total;
}

double gain_noise_halfwidth(const NoiseModel& noise, double mean) {
  if (noise.kind == NoiseModel::Kind::kDegenerate) return 0.0;
  return std::max(0.0, std::min({noise.gain_halfwidth, 1.0 - mean, 1.0 + mean}));
}

RoundOutcome sample_round(const MarketInstance& instance,
                          const Profile& profile, RandomStream& stream) {
  instance.check_profile(profile);
  const int n = instance.buyers();
  const auto masks = profile.masks();
  const bool noisy = instance.noise().kind == NoiseModel::Kind::kUniform;

  RoundOutcome out;
  out.n = n;
  out.sampled_gain.resize(n);
  out.sampled_ext.assign(static_cast<std::size_t>(n) * n, 0.0);
  out.transaction.resize(n);
  out.realized_utility.resize(n);

  for (int i = 0; i < n; ++i) {
    const double mean = instance.gains()(i, masks[i]);
    const double w = gain_noise_halfwidth(instance.noise(), mean);
    out.sampled_gain[i] = w > 0.0 ? mean + stream.uniform(-w, w) : mean;
  }

  std::vector<double> group;
  group.reserve(n);
  const bool by_inducer = instance.model() == ExternalityModel::kIndependent;
  // Independent model: the bound is on what one buyer creates (a column).
  // Joint model: the bound is on what one buyer suffers (a row).
  for (int a = 0; a < n; ++a) {
    group.clear();
    for (int b = 0; b < n; ++b) {
      if (b == a) continue;
      const int sufferer = by_inducer ? b : a;
      const int inducer = by_inducer ? a : b;
      group.push_back(instance.pair_externality(
          sufferer, inducer, masks[sufferer], masks[inducer]));
    }
    if (noisy) perturb_group(group, instance.noise().ext_halfwidth, stream);
    std::size_t r = 0;
    for (int b = 0; b < n; ++b) {
      if (b == a) continue;
      const int sufferer = by_inducer ? b : a;
      const int inducer = by_inducer ? a : b;
      out.sampled_ext[static_cast<std::size_t>(sufferer) * n + inducer] =
          group[r++];
    }
  }

  for (int i = 0; i < n; ++i) {
    const double suffered = out.suffered(i);
    out.transaction[i] = instance.alpha() * (out.contributed(i) - suffered);
    out.realized_utility[i] =
        out.sampled_gain[i] - suffered - out.transaction[i];
  }
  return out;
}

}  // namespace datamarket
