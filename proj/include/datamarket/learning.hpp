#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "datamarket/market.hpp"
#include "datamarket/random.hpp"
#include "datamarket/sampling.hpp"

namespace datamarket {

inline constexpr int kDefaultSimulationKCap = 12;

// sqrt(12 ln(horizon) / (pulls + 1)), natural log.
double confidence_radius(std::int64_t pulls, std::int64_t horizon);

// Transaction weight for a doubling phase of length `phase_horizon`:
// max(0, 1 - min(k^2 sqrt(ln T) / sqrt(T), k^3 2^(3k/4) ln^2 T / T)).
double alpha_corollary(std::int64_t phase_horizon, int k);

struct ActiveArm {
  SellerSet set;
  std::int64_t pulls = 0;
  double sum_effective = 0.0;

  // Empirical mean; 0 before the first pull.
  double mean() const {
    return pulls > 0 ? sum_effective / static_cast<double>(pulls) : 0.0;
  }
};

// One activation of a zooming learner. `prior_pulls[a]` is the pull count
// of the a-th previously activated arm at that moment, which is enough to
// recompute every earlier radius and re-check that the new arm was uncovered.
struct ActivationEvent {
  std::int64_t round = 0;
  SellerSet set = SellerSet::empty(1);
  std::vector<std::int64_t> prior_pulls;
};

enum class LearnerKind { kZooming, kFlatUcb, kDominantScripted, kRandom };

std::string to_string(LearnerKind kind);
LearnerKind learner_kind_from_string(const std::string& name);

class Learner {
 public:
  virtual ~Learner() = default;

  // `round` is 1-based within the current horizon.
  virtual SellerSet select(std::int64_t round) = 0;
  virtual void update(SellerSet chosen, double observed_effective) = 0;

  // Arms with statistics; empty for learners that keep none.
  virtual std::span<const ActiveArm> arms() const { return {}; }
  virtual std::int64_t pulls_of(SellerSet set) const;
};

// Zooming over the Hamming space of seller sets: an active arm covers every
// set within lambda * D_h <= its confidence radius; uncovered sets are
// activated one at a time; selection is by mean + 2 * radius.
class ZoomingLearner final : public Learner {
 public:
  // Requires horizon >= 2 and lambda <= confidence_radius(0, horizon) so a
  // single fresh arm covers the whole space.
  ZoomingLearner(int k, double lambda, std::int64_t horizon,
                 RandomStream stream);

  // Activates the lowest-mask uncovered set, if any.
  std::optional<SellerSet> ensure_cover(std::int64_t round);
  // Highest-UCB active arm; smallest mask on ties. Call after ensure_cover.
  SellerSet select_active() const;

  SellerSet select(std::int64_t round) override {
    ensure_cover(round);
    return select_active();
  }
  void update(SellerSet chosen, double observed_effective) override;

  bool covers(SellerSet set) const;
  bool covers_all() const;
  double radius(const ActiveArm& arm) const {
    return confidence_radius(arm.pulls, horizon_);
  }

  std::span<const ActiveArm> arms() const override { return active_; }
  const std::vector<ActivationEvent>& activation_log() const {
    return activation_log_;
  }
  std::int64_t horizon() const { return horizon_; }
  double lambda() const { return lambda_; }

 private:
  void activate(SellerSet set, std::int64_t round);

  int k_;
  double lambda_;
  std::int64_t horizon_;
  std::vector<ActiveArm> active_;
  std::vector<ActivationEvent> activation_log_;
};

// Plain UCB over all 2^k arms with the same radius; comparison baseline.
class FlatUcbLearner final : public Learner {
 public:
  FlatUcbLearner(int k, std::int64_t horizon,
                 int k_cap = kDefaultSimulationKCap);

  SellerSet select(std::int64_t round) override;
  void update(SellerSet chosen, double observed_effective) override;
  std::span<const ActiveArm> arms() const override { return arms_; }
  std::int64_t pulls_of(SellerSet set) const override {
    return arms_[set.bits()].pulls;
  }

 private:
  std::int64_t horizon_;
  std::vector<ActiveArm> arms_;  // indexed by mask
};

class ScriptedLearner final : public Learner {
 public:
  explicit ScriptedLearner(SellerSet set) : set_(set) {}
  SellerSet select(std::int64_t) override { return set_; }
  void update(SellerSet, double) override { ++pulls_; }
  std::int64_t pulls_of(SellerSet set) const override {
    return set == set_ ? pulls_ : 0;
  }

 private:
  SellerSet set_;
  std::int64_t pulls_ = 0;
};

class RandomLearner final : public Learner {
 public:
  RandomLearner(int k, RandomStream stream) : k_(k), stream_(stream) {}
  SellerSet select(std::int64_t) override {
    return SellerSet(static_cast<std::uint32_t>(stream_.below(set_count(k_))),
                     k_);
  }
  void update(SellerSet, double) override {}

 private:
  int k_;
  RandomStream stream_;
};

struct AlphaSchedule {
  enum class Kind { kInstance, kFixed, kCorollary };

  Kind kind = Kind::kInstance;
  double value = 0.0;  // used by kFixed

  static AlphaSchedule from_instance() { return {}; }
  static AlphaSchedule fixed(double alpha) { return {Kind::kFixed, alpha}; }
  static AlphaSchedule corollary() { return {Kind::kCorollary, 0.0}; }
};

struct SimulationConfig {
  std::int64_t horizon = 1000;
  // One entry applies to every buyer; otherwise one entry per buyer.
  std::vector<LearnerKind> learners{LearnerKind::kZooming};
  AlphaSchedule alpha;
  std::uint64_t seed = 0;
  int k_cap = kDefaultSimulationKCap;
  // Check |mean - expected effective utility| <= radius after every update.
  bool track_clean_event = false;
};

// A stretch of rounds played with fresh learners and one alpha. Without the
// corollary schedule there is a single phase covering the whole horizon.
struct Phase {
  std::int64_t first_round = 1;
  std::int64_t length = 0;
  std::int64_t horizon = 0;  // horizon the learners were built for
  double alpha = 0.0;
};

struct SimulationTrace {
  int n = 0;
  int k = 0;
  std::int64_t horizon = 0;
  std::uint64_t seed = 0;
  std::vector<LearnerKind> learners;  // one per buyer
  std::vector<Phase> phases;

  // Per round (index t - 1), buyer-major inside a round.
  std::vector<double> alpha;
  std::vector<std::uint32_t> masks;
  std::vector<double> sampled_gain;
  std::vector<double> sampled_ext;  // n x n per round
  std::vector<double> transaction;
  std::vector<double> realized_utility;
  std::vector<double> observed_effective;
  std::vector<std::int64_t> chosen_pulls;  // pulls of the chosen arm after update
  std::vector<std::uint32_t> active_count;

  // Activation history per buyer (zooming learners only), all phases.
  std::vector<std::vector<ActivationEvent>> activations;
  std::vector<std::vector<int>> activation_phase;

  std::int64_t clean_event_checks = 0;
  std::int64_t clean_event_violations = 0;

  std::int64_t rounds() const {
    return static_cast<std::int64_t>(alpha.size());
  }
  // t is 1-based.
  Profile profile(std::int64_t t) const;
  RoundOutcome outcome(std::int64_t t) const;
};

// Synchronous repeated market: every buyer selects, the joint profile is
// sampled once, every buyer is fed its own observed effective utility.
SimulationTrace simulate(const MarketInstance& instance,
                         const SimulationConfig& config);

}  // namespace datamarket
