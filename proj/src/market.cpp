#include "datamarket/market.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace datamarket {
namespace {

void check_dims(int n, int k, const char* what) {
  if (n < 1) {
    throw DimensionError(std::string(what) + ": buyer count must be >= 1");
  }
  // Validates k through SellerSet.
  (void)SellerSet::empty(k);
}

void check_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": expected " +
                         std::to_string(want) + " entries, got " +
                         std::to_string(got));
  }
}

}  // namespace

GainTable::GainTable(int n, int k)
    : GainTable(n, k,
                std::vector<double>(static_cast<std::size_t>(std::max(n, 0)) *
                                    set_count(std::clamp(k, 1, kMaxSellers)))) {}

GainTable::GainTable(int n, int k, std::vector<double> values)
    : n_(n), k_(k), values_(std::move(values)) {
  check_dims(n, k, "GainTable");
  check_size(values_.size(), static_cast<std::size_t>(n) * set_count(k),
             "GainTable");
}

double& GainTable::at(int buyer, std::uint32_t set) {
  if (buyer < 0 || buyer >= n_ || set >= set_count(k_)) {
    throw DimensionError("GainTable::at out of range");
  }
  return values_[static_cast<std::size_t>(buyer) * set_count(k_) + set];
}

IndependentExternality::IndependentExternality(int n, int k)
    : IndependentExternality(
          n, k,
          std::vector<double>(static_cast<std::size_t>(std::max(n, 0)) *
                              std::max(n, 0) *
                              set_count(std::clamp(k, 1, kMaxSellers)))) {}

IndependentExternality::IndependentExternality(int n, int k,
                                               std::vector<double> values)
    : n_(n), k_(k), values_(std::move(values)) {
  check_dims(n, k, "IndependentExternality");
  check_size(values_.size(),
             static_cast<std::size_t>(n) * n * set_count(k),
             "IndependentExternality");
}

double& IndependentExternality::at(int sufferer, int inducer,
                                   std::uint32_t inducer_set) {
  if (sufferer < 0 || sufferer >= n_ || inducer < 0 || inducer >= n_ ||
      inducer_set >= set_count(k_)) {
    throw DimensionError("IndependentExternality::at out of range");
  }
  return values_[index(sufferer, inducer, inducer_set)];
}

JointExternality::JointExternality(int n, int k, bool symmetric)
    : JointExternality(
          n, k,
          std::vector<double>(static_cast<std::size_t>(std::max(n, 0)) *
                              std::max(n, 0) *
                              set_count(std::clamp(k, 1, kMaxSellers)) *
                              set_count(std::clamp(k, 1, kMaxSellers))),
          symmetric) {}

JointExternality::JointExternality(int n, int k, std::vector<double> values,
                                   bool symmetric)
    : n_(n), k_(k), values_(std::move(values)), symmetric_(symmetric) {
  check_dims(n, k, "JointExternality");
  check_size(values_.size(),
             static_cast<std::size_t>(n) * n * set_count(k) * set_count(k),
             "JointExternality");
}

double& JointExternality::at(int sufferer, int inducer,
                             std::uint32_t sufferer_set,
                             std::uint32_t inducer_set) {
  if (sufferer < 0 || sufferer >= n_ || inducer < 0 || inducer >= n_ ||
      sufferer_set >= set_count(k_) || inducer_set >= set_count(k_)) {
    throw DimensionError("JointExternality::at out of range");
  }
  return values_[index(sufferer, inducer, sufferer_set, inducer_set)];
}

Profile Profile::from_masks(std::span<const std::uint32_t> masks, int k) {
  std::vector<SellerSet> choices;
  choices.reserve(masks.size());
  for (auto m : masks) choices.emplace_back(m, k);
  return Profile(std::move(choices));
}

std::vector<std::uint32_t> Profile::masks() const {
  std::vector<std::uint32_t> out;
  out.reserve(choices_.size());
  for (const auto& c : choices_) out.push_back(c.bits());
  return out;
}

MarketInstance::MarketInstance(GainTable gain, Externality externality,
                               double alpha, double lambda, NoiseModel noise)
    : gain_(std::move(gain)),
      externality_(std::move(externality)),
      alpha_(alpha),
      lambda_(lambda),
      noise_(noise) {
  const auto [n, k] = std::visit(
      [](const auto& e) { return std::pair{e.buyers(), e.sellers()}; },
      externality_);
  if (n != gain_.buyers() || k != gain_.sellers()) {
    throw DimensionError("externality table is " + std::to_string(n) + "x" +
                         std::to_string(k) + " but gain table is " +
                         std::to_string(gain_.buyers()) + "x" +
                         std::to_string(gain_.sellers()));
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw PreconditionError("alpha must lie in [0, 1]");
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw PreconditionError("lambda must be positive");
  }
  if (!(noise.gain_halfwidth >= 0.0 && noise.gain_halfwidth <= 1.0) ||
      !(noise.ext_halfwidth >= 0.0 && noise.ext_halfwidth <= 1.0)) {
    throw PreconditionError("noise half-widths must lie in [0, 1]");
  }
}

const IndependentExternality& MarketInstance::independent() const {
  if (const auto* ind = std::get_if<IndependentExternality>(&externality_)) {
    return *ind;
  }
  throw UnsupportedModelError(
      "operation requires the independent externality model");
}

const JointExternality& MarketInstance::joint() const {
  if (const auto* j = std::get_if<JointExternality>(&externality_)) return *j;
  throw UnsupportedModelError(
      "operation requires the joint externality model");
}

double MarketInstance::contributed_externality(int buyer,
                                               SellerSet set) const {
  const auto& ext = independent();
  double total = 0.0;
  for (int j = 0; j < buyers(); ++j) {
    if (j != buyer) total += ext(j, buyer, set.bits());
  }
  return total;
}

MarketInstance MarketInstance::with_alpha(double alpha) const {
  return MarketInstance(gain_, externality_, alpha, lambda_, noise_);
}

void MarketInstance::check_profile(const Profile& profile) const {
  if (profile.size() != static_cast<std::size_t>(buyers())) {
    throw DimensionError("profile has " + std::to_string(profile.size()) +
                         " entries for " + std::to_string(buyers()) +
                         " buyers");
  }
  for (const auto& s : profile) {
    if (s.k() != sellers()) {
      throw DimensionError("profile entry over k=" + std::to_string(s.k()) +
                           " sellers, instance has k=" +
                           std::to_string(sellers()));
    }
  }
}

namespace detail {

double utility(const MarketInstance& instance, int buyer,
               std::span<const std::uint32_t> masks, std::uint32_t own) {
  const int n = instance.buyers();
  double suffered = 0.0;
  double contributed = 0.0;
  for (int j = 0; j < n; ++j) {
    if (j == buyer) continue;
    suffered += instance.pair_externality(buyer, j, own, masks[j]);
    contributed += instance.pair_externality(j, buyer, masks[j], own);
  }
  const double transfer = instance.alpha() * (contributed - suffered);
  return instance.gains()(buyer, own) - suffered - transfer;
}

double welfare(const MarketInstance& instance,
               std::span<const std::uint32_t> masks) {
  const int n = instance.buyers();
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    total += instance.gains()(i, masks[i]);
    for (int j = 0; j < n; ++j) {
      if (j != i) total -= instance.pair_externality(i, j, masks[i], masks[j]);
    }
  }
  return total;
}

}  // namespace detail

double expected_externality_on(const MarketInstance& instance, int buyer,
                               const Profile& profile) {
  instance.check_profile(profile);
  double total = 0.0;
  for (int j = 0; j < instance.buyers(); ++j) {
    if (j == buyer) continue;
    total += instance.pair_externality(buyer, j, profile[buyer].bits(),
                                       profile[j].bits());
  }
  return total;
}

double expected_externality_by(const MarketInstance& instance, int buyer,
                               const Profile& profile) {
  instance.check_profile(profile);
  double total = 0.0;
  for (int j = 0; j < instance.buyers(); ++j) {
    if (j == buyer) continue;
    total += instance.pair_externality(j, buyer, profile[j].bits(),
                                       profile[buyer].bits());
  }
  return total;
}

double expected_transaction(const MarketInstance& instance, int buyer,
                            const Profile& profile) {
  return instance.alpha() * (expected_externality_by(instance, buyer, profile) -
                             expected_externality_on(instance, buyer, profile));
}

double expected_utility(const MarketInstance& instance, int buyer,
                        const Profile& profile) {
  return instance.gain(buyer, profile[buyer]) -
         expected_externality_on(instance, buyer, profile) -
         expected_transaction(instance, buyer, profile);
}

double expected_effective_utility(const MarketInstance& instance, int buyer,
                                  SellerSet set) {
  if (set.k() != instance.sellers()) {
    throw DimensionError("seller set k does not match instance");
  }
  return instance.gain(buyer, set) -
         instance.alpha() * instance.contributed_externality(buyer, set);
}

double social_welfare(const MarketInstance& instance, const Profile& profile) {
  instance.check_profile(profile);
  const auto masks = profile.masks();
  return detail::welfare(instance, masks);
}

}  // namespace datamarket
