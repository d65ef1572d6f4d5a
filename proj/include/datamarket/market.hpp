#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "datamarket/errors.hpp"
#include "datamarket/seller_set.hpp"

namespace datamarket {

inline constexpr double kTolerance = 1e-12;

struct NoiseModel {
  enum class Kind { kUniform, kDegenerate };

  double gain_halfwidth = 0.1;
  double ext_halfwidth = 0.1;
  Kind kind = Kind::kUniform;

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;
};

// Expected net gain g_i(gamma) per buyer, dense over all 2^k seller sets.
class GainTable {
 public:
  GainTable(int n, int k);
  GainTable(int n, int k, std::vector<double> values);

  int buyers() const noexcept { return n_; }
  int sellers() const noexcept { return k_; }
  double operator()(int buyer, std::uint32_t set) const noexcept {
    return values_[static_cast<std::size_t>(buyer) * set_count(k_) + set];
  }
  double& at(int buyer, std::uint32_t set);
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const GainTable&, const GainTable&) = default;

 private:
  int n_;
  int k_;
  std::vector<double> values_;
};

// e[i][j][gamma_j]: externality buyer i suffers when buyer j holds gamma_j.
// The i == j diagonal is stored but never read.
class IndependentExternality {
 public:
  IndependentExternality(int n, int k);
  IndependentExternality(int n, int k, std::vector<double> values);

  int buyers() const noexcept { return n_; }
  int sellers() const noexcept { return k_; }
  double operator()(int sufferer, int inducer,
                    std::uint32_t inducer_set) const noexcept {
    return values_[index(sufferer, inducer, inducer_set)];
  }
  double& at(int sufferer, int inducer, std::uint32_t inducer_set);
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const IndependentExternality&,
                         const IndependentExternality&) = default;

 private:
  std::size_t index(int i, int j, std::uint32_t s) const noexcept {
    return (static_cast<std::size_t>(i) * n_ + j) * set_count(k_) + s;
  }

  int n_;
  int k_;
  std::vector<double> values_;
};

// e[i][j][gamma_i][gamma_j]: externality buyer i (holding gamma_i) suffers
// from buyer j (holding gamma_j). Arguments are always (own set, other's
// set); there is no implicit transposition between e[i][j] and e[j][i].
class JointExternality {
 public:
  JointExternality(int n, int k, bool symmetric = false);
  JointExternality(int n, int k, std::vector<double> values,
                   bool symmetric = false);

  int buyers() const noexcept { return n_; }
  int sellers() const noexcept { return k_; }
  double operator()(int sufferer, int inducer, std::uint32_t sufferer_set,
                    std::uint32_t inducer_set) const noexcept {
    return values_[index(sufferer, inducer, sufferer_set, inducer_set)];
  }
  double& at(int sufferer, int inducer, std::uint32_t sufferer_set,
             std::uint32_t inducer_set);
  std::span<const double> values() const noexcept { return values_; }

  // Declared symmetry e[i][j][a][b] == e[j][i][b][a]; `validate` checks it.
  bool symmetric() const noexcept { return symmetric_; }

  friend bool operator==(const JointExternality&,
                         const JointExternality&) = default;

 private:
  std::size_t index(int i, int j, std::uint32_t a,
                    std::uint32_t b) const noexcept {
    const std::size_t sets = set_count(k_);
    return ((static_cast<std::size_t>(i) * n_ + j) * sets + a) * sets + b;
  }

  int n_;
  int k_;
  std::vector<double> values_;
  bool symmetric_;
};

using Externality = std::variant<IndependentExternality, JointExternality>;

enum class ExternalityModel { kIndependent, kJoint };

// One seller set per buyer.
class Profile {
 public:
  Profile() = default;
  explicit Profile(std::vector<SellerSet> choices)
      : choices_(std::move(choices)) {}

  static Profile uniform(int n, SellerSet set) {
    return Profile(std::vector<SellerSet>(static_cast<std::size_t>(n), set));
  }
  static Profile from_masks(std::span<const std::uint32_t> masks, int k);

  std::size_t size() const noexcept { return choices_.size(); }
  const SellerSet& operator[](std::size_t i) const { return choices_[i]; }
  void set(std::size_t i, SellerSet s) { choices_.at(i) = s; }
  std::vector<std::uint32_t> masks() const;

  auto begin() const noexcept { return choices_.begin(); }
  auto end() const noexcept { return choices_.end(); }

  friend bool operator==(const Profile&, const Profile&) = default;
  friend auto operator<=>(const Profile&, const Profile&) = default;

 private:
  std::vector<SellerSet> choices_;
};

class MarketInstance {
 public:
  MarketInstance(GainTable gain, Externality externality, double alpha,
                 double lambda, NoiseModel noise = {});

  int buyers() const noexcept { return gain_.buyers(); }
  int sellers() const noexcept { return gain_.sellers(); }
  std::uint32_t sets() const noexcept { return set_count(sellers()); }
  double alpha() const noexcept { return alpha_; }
  double lambda() const noexcept { return lambda_; }
  const NoiseModel& noise() const noexcept { return noise_; }
  const GainTable& gains() const noexcept { return gain_; }
  const Externality& externality() const noexcept { return externality_; }

  ExternalityModel model() const noexcept {
    return std::holds_alternative<IndependentExternality>(externality_)
               ? ExternalityModel::kIndependent
               : ExternalityModel::kJoint;
  }
  // Throw UnsupportedModelError when the instance uses the other model.
  const IndependentExternality& independent() const;
  const JointExternality& joint() const;

  double gain(int buyer, SellerSet set) const {
    return gain_(buyer, set.bits());
  }
  // Expected externality `sufferer` takes from `inducer` under either model.
  double pair_externality(int sufferer, int inducer,
                          std::uint32_t sufferer_set,
                          std::uint32_t inducer_set) const noexcept {
    if (const auto* ind = std::get_if<IndependentExternality>(&externality_)) {
      return (*ind)(sufferer, inducer, inducer_set);
    }
    return std::get<JointExternality>(externality_)(sufferer, inducer,
                                                     sufferer_set, inducer_set);
  }
  // Sum over j != i of e[j][i][gamma]: total externality buyer i creates by
  // holding gamma. Independent model only.
  double contributed_externality(int buyer, SellerSet set) const;

  MarketInstance with_alpha(double alpha) const;

  // Throws DimensionError unless the profile has n entries over k sellers.
  void check_profile(const Profile& profile) const;

 private:
  GainTable gain_;
  Externality externality_;
  double alpha_;
  double lambda_;
  NoiseModel noise_;
};

double expected_externality_on(const MarketInstance& instance, int buyer,
                               const Profile& profile);
// Expected externality buyer creates for everyone else at the profile.
double expected_externality_by(const MarketInstance& instance, int buyer,
                               const Profile& profile);
double expected_transaction(const MarketInstance& instance, int buyer,
                            const Profile& profile);
double expected_utility(const MarketInstance& instance, int buyer,
                        const Profile& profile);
double expected_effective_utility(const MarketInstance& instance, int buyer,
                                  SellerSet set);
// Sum of expected utilities, evaluated without the transfers (they cancel).
double social_welfare(const MarketInstance& instance, const Profile& profile);

namespace detail {

// Mask-level kernels shared by the analysis and learning code; no validation.
double utility(const MarketInstance& instance, int buyer,
               std::span<const std::uint32_t> masks, std::uint32_t own);
double welfare(const MarketInstance& instance,
               std::span<const std::uint32_t> masks);

}  // namespace detail

}  // namespace datamarket
