#include "datamarket/learning.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "datamarket/equilibrium.hpp"

namespace datamarket {

double confidence_radius(std::int64_t pulls, std::int64_t horizon) {
  return std::sqrt(12.0 * std::log(static_cast<double>(horizon)) /
                   static_cast<double>(pulls + 1));
}

double alpha_corollary(std::int64_t phase_horizon, int k) {
  if (phase_horizon < 2 || k < 1) {
    throw PreconditionError("alpha_corollary needs T >= 2 and k >= 1");
  }
  const double t = static_cast<double>(phase_horizon);
  const double log_t = std::log(t);
  const double kd = k;
  const double sqrt_term = kd * kd * std::sqrt(log_t) / std::sqrt(t);
  const double packing_term =
      kd * kd * kd * std::exp2(0.75 * kd) * log_t * log_t / t;
  return std::max(0.0, 1.0 - std::min(sqrt_term, packing_term));
}

std::string to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::kZooming: return "zooming";
    case LearnerKind::kFlatUcb: return "ucb";
    case LearnerKind::kDominantScripted: return "dominant-scripted";
    case LearnerKind::kRandom: return "random";
  }
  return "unknown";
}

LearnerKind learner_kind_from_string(const std::string& name) {
  if (name == "zooming") return LearnerKind::kZooming;
  if (name == "ucb") return LearnerKind::kFlatUcb;
  if (name == "dominant-scripted") return LearnerKind::kDominantScripted;
  if (name == "random") return LearnerKind::kRandom;
  throw std::invalid_argument("unknown learner '" + name + "'");
}

std::int64_t Learner::pulls_of(SellerSet set) const {
  for (const auto& arm : arms()) {
    if (arm.set == set) return arm.pulls;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Zooming

ZoomingLearner::ZoomingLearner(int k, double lambda, std::int64_t horizon,
                               RandomStream stream)
    : k_(k), lambda_(lambda), horizon_(horizon) {
  if (horizon < 2) throw PreconditionError("zooming: horizon must be >= 2");
  if (!(lambda > 0.0) || lambda > confidence_radius(0, horizon)) {
    throw PreconditionError(
        "zooming: lambda must lie in (0, sqrt(12 ln T)] so one fresh arm "
        "covers the space");
  }
  activate(SellerSet(static_cast<std::uint32_t>(stream.below(set_count(k))), k),
           0);
}

void ZoomingLearner::activate(SellerSet set, std::int64_t round) {
  ActivationEvent event{round, set, {}};
  event.prior_pulls.reserve(active_.size());
  for (const auto& arm : active_) event.prior_pulls.push_back(arm.pulls);
  activation_log_.push_back(std::move(event));
  active_.push_back({set, 0, 0.0});
}

bool ZoomingLearner::covers(SellerSet set) const {
  for (const auto& arm : active_) {
    if (lambda_ * hamming_distance(set, arm.set) <= radius(arm)) return true;
  }
  return false;
}

bool ZoomingLearner::covers_all() const {
  for (const auto& arm : active_) {
    if (radius(arm) >= lambda_) return true;
  }
  for (std::uint32_t s = 0; s < set_count(k_); ++s) {
    if (!covers(SellerSet(s, k_))) return false;
  }
  return true;
}

std::optional<SellerSet> ZoomingLearner::ensure_cover(std::int64_t round) {
  for (const auto& arm : active_) {
    if (radius(arm) >= lambda_) return std::nullopt;
  }
  for (std::uint32_t s = 0; s < set_count(k_); ++s) {
    const SellerSet candidate(s, k_);
    if (covers(candidate)) continue;
    activate(candidate, round);
    if (!covers_all()) {
      throw std::logic_error("zooming: cover not restored by one activation");
    }
    return candidate;
  }
  return std::nullopt;
}

SellerSet ZoomingLearner::select_active() const {
  const ActiveArm* best = nullptr;
  double best_ucb = 0.0;
  for (const auto& arm : active_) {
    const double ucb = arm.mean() + 2.0 * radius(arm);
    if (best == nullptr || ucb > best_ucb ||
        (ucb == best_ucb && arm.set.bits() < best->set.bits())) {
      best = &arm;
      best_ucb = ucb;
    }
  }
  return best->set;
}

void ZoomingLearner::update(SellerSet chosen, double observed_effective) {
  for (auto& arm : active_) {
    if (arm.set == chosen) {
      ++arm.pulls;
      arm.sum_effective += observed_effective;
      return;
    }
  }
  throw std::logic_error("zooming: update of an inactive seller set");
}

// ---------------------------------------------------------------------------
// Flat UCB

FlatUcbLearner::FlatUcbLearner(int k, std::int64_t horizon, int k_cap)
    : horizon_(horizon) {
  if (k > k_cap) {
    throw PreconditionError("ucb: k=" + std::to_string(k) +
                            " exceeds the arm enumeration cap " +
                            std::to_string(k_cap));
  }
  if (horizon < 2) throw PreconditionError("ucb: horizon must be >= 2");
  arms_.reserve(set_count(k));
  for (std::uint32_t s = 0; s < set_count(k); ++s) {
    arms_.push_back({SellerSet(s, k), 0, 0.0});
  }
}

SellerSet FlatUcbLearner::select(std::int64_t) {
  std::size_t best = 0;
  double best_ucb = 0.0;
  for (std::size_t a = 0; a < arms_.size(); ++a) {
    const double ucb =
        arms_[a].mean() + 2.0 * confidence_radius(arms_[a].pulls, horizon_);
    if (a == 0 || ucb > best_ucb) {
      best = a;
      best_ucb = ucb;
    }
  }
  return arms_[best].set;
}

void FlatUcbLearner::update(SellerSet chosen, double observed_effective) {
  auto& arm = arms_.at(chosen.bits());
  ++arm.pulls;
  arm.sum_effective += observed_effective;
}

// ---------------------------------------------------------------------------
// Engine

Profile SimulationTrace::profile(std::int64_t t) const {
  const auto begin = masks.begin() + (t - 1) * n;
  return Profile::from_masks(std::span(begin, begin + n), k);
}

RoundOutcome SimulationTrace::outcome(std::int64_t t) const {
  const auto row = static_cast<std::size_t>(t - 1) * n;
  const auto sq = static_cast<std::size_t>(t - 1) * n * n;
  RoundOutcome out;
  out.n = n;
  out.sampled_gain.assign(sampled_gain.begin() + row,
                          sampled_gain.begin() + row + n);
  out.sampled_ext.assign(sampled_ext.begin() + sq,
                         sampled_ext.begin() + sq + n * n);
  out.transaction.assign(transaction.begin() + row,
                         transaction.begin() + row + n);
  out.realized_utility.assign(realized_utility.begin() + row,
                              realized_utility.begin() + row + n);
  return out;
}

namespace {

std::vector<Phase> plan_phases(const MarketInstance& instance,
                               const SimulationConfig& config) {
  std::vector<Phase> phases;
  if (config.alpha.kind != AlphaSchedule::Kind::kCorollary) {
    const double alpha = config.alpha.kind == AlphaSchedule::Kind::kFixed
                             ? config.alpha.value
                             : instance.alpha();
    phases.push_back({1, config.horizon, config.horizon, alpha});
    return phases;
  }
  // Doubling trick: phase p runs fresh learners built for 2^p rounds.
  std::int64_t first = 1;
  for (int p = 1; first <= config.horizon; ++p) {
    const std::int64_t length = std::int64_t{1} << p;
    phases.push_back({first, std::min(length, config.horizon - first + 1),
                      length, alpha_corollary(length, instance.sellers())});
    first += length;
  }
  return phases;
}

std::unique_ptr<Learner> make_learner(LearnerKind kind,
                                      const MarketInstance& phase_instance,
                                      int buyer, std::int64_t horizon,
                                      const SimulationConfig& config,
                                      std::uint64_t phase_index) {
  const int k = phase_instance.sellers();
  auto stream = RandomStream::derive(config.seed, StreamLabel::kBuyer,
                                     static_cast<std::uint64_t>(buyer),
                                     phase_index);
  switch (kind) {
    case LearnerKind::kZooming:
      return std::make_unique<ZoomingLearner>(k, phase_instance.lambda(),
                                              horizon, stream);
    case LearnerKind::kFlatUcb:
      return std::make_unique<FlatUcbLearner>(k, horizon, config.k_cap);
    case LearnerKind::kDominantScripted:
      return std::make_unique<ScriptedLearner>(
          dominant_strategy(phase_instance, buyer));
    case LearnerKind::kRandom:
      return std::make_unique<RandomLearner>(k, stream);
  }
  throw std::logic_error("unknown learner kind");
}

}  // namespace

SimulationTrace simulate(const MarketInstance& instance,
                         const SimulationConfig& config) {
  if (instance.model() != ExternalityModel::kIndependent) {
    throw UnsupportedModelError(
        "learning unsupported for joint externality");
  }
  if (config.horizon < 2) throw PreconditionError("simulate: T must be >= 2");
  if (instance.sellers() > config.k_cap) {
    throw PreconditionError("simulate: k=" +
                            std::to_string(instance.sellers()) +
                            " exceeds k cap " + std::to_string(config.k_cap));
  }
  const int n = instance.buyers();
  const int k = instance.sellers();
  if (config.learners.size() != 1 &&
      config.learners.size() != static_cast<std::size_t>(n)) {
    throw PreconditionError("simulate: need one learner kind or one per buyer");
  }
  if (config.alpha.kind == AlphaSchedule::Kind::kFixed &&
      !(config.alpha.value >= 0.0 && config.alpha.value <= 1.0)) {
    throw PreconditionError("simulate: fixed alpha must lie in [0, 1]");
  }

  SimulationTrace trace;
  trace.n = n;
  trace.k = k;
  trace.horizon = config.horizon;
  trace.seed = config.seed;
  for (int i = 0; i < n; ++i) {
    trace.learners.push_back(config.learners.size() == 1 ? config.learners[0]
                                                         : config.learners[i]);
  }
  trace.phases = plan_phases(instance, config);
  trace.activations.resize(n);
  trace.activation_phase.resize(n);

  const auto rounds = static_cast<std::size_t>(config.horizon);
  trace.alpha.reserve(rounds);
  trace.masks.reserve(rounds * n);
  trace.sampled_gain.reserve(rounds * n);
  trace.sampled_ext.reserve(rounds * n * n);
  trace.transaction.reserve(rounds * n);
  trace.realized_utility.reserve(rounds * n);
  trace.observed_effective.reserve(rounds * n);
  trace.chosen_pulls.reserve(rounds * n);
  trace.active_count.reserve(rounds * n);

  std::vector<SellerSet> choices(n, SellerSet::empty(k));
  for (std::size_t p = 0; p < trace.phases.size(); ++p) {
    const Phase& phase = trace.phases[p];
    const MarketInstance phase_instance = instance.with_alpha(phase.alpha);

    std::vector<std::unique_ptr<Learner>> learners;
    for (int i = 0; i < n; ++i) {
      learners.push_back(make_learner(trace.learners[i], phase_instance, i,
                                      phase.horizon, config, p));
    }
    // Expected effective utilities, for the clean-event check.
    std::vector<std::vector<double>> effective;
    if (config.track_clean_event) {
      effective.assign(n, std::vector<double>(set_count(k)));
      for (int i = 0; i < n; ++i) {
        for (std::uint32_t s = 0; s < set_count(k); ++s) {
          effective[i][s] =
              expected_effective_utility(phase_instance, i, SellerSet(s, k));
        }
      }
    }

    for (std::int64_t r = 1; r <= phase.length; ++r) {
      const std::int64_t t = phase.first_round + r - 1;
      for (int i = 0; i < n; ++i) choices[i] = learners[i]->select(r);
      const Profile profile(choices);
      auto stream = RandomStream::derive(config.seed, StreamLabel::kMarket,
                                         static_cast<std::uint64_t>(t));
      const RoundOutcome outcome =
          sample_round(phase_instance, profile, stream);

      trace.alpha.push_back(phase.alpha);
      for (int i = 0; i < n; ++i) {
        const double observed =
            outcome.sampled_gain[i] - phase.alpha * outcome.contributed(i);
        learners[i]->update(choices[i], observed);

        trace.masks.push_back(choices[i].bits());
        trace.sampled_gain.push_back(outcome.sampled_gain[i]);
        trace.transaction.push_back(outcome.transaction[i]);
        trace.realized_utility.push_back(outcome.realized_utility[i]);
        trace.observed_effective.push_back(observed);
        trace.chosen_pulls.push_back(learners[i]->pulls_of(choices[i]));
        trace.active_count.push_back(
            static_cast<std::uint32_t>(learners[i]->arms().size()));

        if (config.track_clean_event) {
          for (const auto& arm : learners[i]->arms()) {
            if (arm.set != choices[i]) continue;
            ++trace.clean_event_checks;
            if (std::abs(arm.mean() - effective[i][arm.set.bits()]) >
                confidence_radius(arm.pulls, phase.horizon)) {
              ++trace.clean_event_violations;
            }
          }
        }
      }
      trace.sampled_ext.insert(trace.sampled_ext.end(),
                               outcome.sampled_ext.begin(),
                               outcome.sampled_ext.end());
    }

    for (int i = 0; i < n; ++i) {
      if (const auto* z = dynamic_cast<const ZoomingLearner*>(learners[i].get())) {
        for (const auto& event : z->activation_log()) {
          trace.activations[i].push_back(event);
          trace.activation_phase[i].push_back(static_cast<int>(p));
        }
      }
    }
  }
  return trace;
}

}  // namespace datamarket
