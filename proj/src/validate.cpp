#include "datamarket/validate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "datamarket/random.hpp"
#include "datamarket/sampling.hpp"

namespace datamarket {
namespace {

constexpr double kSumTolerance = 1e-9;

class Check {
 public:
  explicit Check(std::string name) { result_.name = std::move(name); }

  // Records the first failure only.
  template <typename... Parts>
  void fail(const Parts&... parts) {
    if (!result_.passed) return;
    result_.passed = false;
    std::ostringstream os;
    os.precision(17);
    (os << ... << parts);
    result_.detail = os.str();
  }
  bool failed() const { return !result_.passed; }
  InvariantCheck done() { return std::move(result_); }

 private:
  InvariantCheck result_;
};

Profile random_profile(const MarketInstance& instance, RandomStream& stream) {
  std::vector<SellerSet> choices;
  for (int i = 0; i < instance.buyers(); ++i) {
    choices.emplace_back(static_cast<std::uint32_t>(stream.below(instance.sets())),
                         instance.sellers());
  }
  return Profile(std::move(choices));
}

void gain_checks(const MarketInstance& instance,
                 std::vector<InvariantCheck>& out) {
  Check range("gain_range");
  Check empty("gain_empty_zero");
  for (int i = 0; i < instance.buyers(); ++i) {
    if (instance.gains()(i, 0) != 0.0) {
      empty.fail("buyer ", i, ": gain at the empty set is ",
                 instance.gains()(i, 0));
    }
    for (std::uint32_t s = 0; s < instance.sets(); ++s) {
      const double g = instance.gains()(i, s);
      if (!(g >= -1.0 && g <= 1.0)) {
        range.fail("buyer ", i, ", set ", s, ": gain ", g,
                   " outside [-1, 1]");
      }
    }
  }
  out.push_back(range.done());
  out.push_back(empty.done());
}

void independent_checks(const MarketInstance& instance,
                        std::vector<InvariantCheck>& out) {
  const auto& ext = instance.independent();
  const int n = instance.buyers();
  Check range("externality_range");
  Check created("created_externality_bound");
  for (int inducer = 0; inducer < n; ++inducer) {
    for (std::uint32_t s = 0; s < instance.sets(); ++s) {
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        if (i == inducer) continue;
        const double v = ext(i, inducer, s);
        if (!(v >= 0.0 && v <= 1.0)) {
          range.fail("e[", i, "][", inducer, "][", s, "] = ", v,
                     " outside [0, 1]");
        }
        total += v;
      }
      if (total > 1.0 + kSumTolerance) {
        created.fail("buyer ", inducer, ", set ", s,
                     ": total externality created ", total, " > 1");
      }
    }
  }
  out.push_back(range.done());
  out.push_back(created.done());
}

void joint_checks(const MarketInstance& instance,
                  std::vector<InvariantCheck>& out) {
  const auto& ext = instance.joint();
  const int n = instance.buyers();
  const std::uint32_t sets = instance.sets();
  Check range("externality_range");
  Check suffered("suffered_externality_bound");
  for (int i = 0; i < n; ++i) {
    for (std::uint32_t a = 0; a < sets; ++a) {
      // Worst case over the others' choices: each j picks its own maximum.
      double worst = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        double row_max = 0.0;
        for (std::uint32_t b = 0; b < sets; ++b) {
          const double v = ext(i, j, a, b);
          if (!(v >= 0.0 && v <= 1.0)) {
            range.fail("e[", i, "][", j, "][", a, "][", b, "] = ", v,
                       " outside [0, 1]");
          }
          row_max = std::max(row_max, v);
        }
        worst += row_max;
      }
      if (worst > 1.0 + kSumTolerance) {
        suffered.fail("buyer ", i, ", own set ", a,
                      ": worst-case externality suffered ", worst, " > 1");
      }
    }
  }
  out.push_back(range.done());
  out.push_back(suffered.done());

  if (ext.symmetric()) {
    Check symmetry("symmetry");
    for (int i = 0; i < n && !symmetry.failed(); ++i) {
      for (int j = i + 1; j < n && !symmetry.failed(); ++j) {
        for (std::uint32_t a = 0; a < sets && !symmetry.failed(); ++a) {
          for (std::uint32_t b = 0; b < sets; ++b) {
            if (ext(i, j, a, b) != ext(j, i, b, a)) {
              symmetry.fail("(i, j, gamma_i, gamma_j) = (", i, ", ", j, ", ",
                            a, ", ", b, "): ", ext(i, j, a, b), " vs ",
                            ext(j, i, b, a));
              break;
            }
          }
        }
      }
    }
    out.push_back(symmetry.done());
  }
}

void scalar_checks(const MarketInstance& instance,
                   std::vector<InvariantCheck>& out) {
  Check alpha("alpha_range");
  if (!(instance.alpha() >= 0.0 && instance.alpha() <= 1.0)) {
    alpha.fail("alpha = ", instance.alpha());
  }
  out.push_back(alpha.done());
  Check lambda("lambda_positive");
  if (!(instance.lambda() > 0.0)) lambda.fail("lambda = ", instance.lambda());
  out.push_back(lambda.done());
  Check noise("noise_range");
  const auto& nm = instance.noise();
  if (!(nm.gain_halfwidth >= 0.0 && nm.gain_halfwidth <= 1.0 &&
        nm.ext_halfwidth >= 0.0 && nm.ext_halfwidth <= 1.0)) {
    noise.fail("half-widths (", nm.gain_halfwidth, ", ", nm.ext_halfwidth,
               ") outside [0, 1]");
  }
  out.push_back(noise.done());
}

void randomized_checks(const MarketInstance& instance, int profiles,
                       std::vector<InvariantCheck>& out) {
  auto stream = RandomStream::derive(0, StreamLabel::kValidation);
  Check neutral("revenue_neutrality");
  Check invariance("welfare_alpha_invariance");
  Check welfare("welfare_equals_utility_sum");
  Check sampled("sampled_bounds");
  const MarketInstance other = instance.with_alpha(instance.alpha() < 0.5 ? 1.0 : 0.0);
  for (int p = 0; p < profiles; ++p) {
    const Profile profile = random_profile(instance, stream);
    double transfers = 0.0;
    double utilities = 0.0;
    for (int i = 0; i < instance.buyers(); ++i) {
      transfers += expected_transaction(instance, i, profile);
      utilities += expected_utility(instance, i, profile);
    }
    if (std::abs(transfers) > kTolerance) {
      neutral.fail("profile #", p, ": expected transfers sum to ", transfers);
    }
    const double sw = social_welfare(instance, profile);
    if (sw != social_welfare(other, profile)) {
      invariance.fail("profile #", p, ": welfare changes with alpha");
    }
    if (std::abs(sw - utilities) > kSumTolerance) {
      welfare.fail("profile #", p, ": welfare ", sw, " vs utility sum ",
                   utilities);
    }
    const RoundOutcome round = sample_round(instance, profile, stream);
    double sampled_transfers = 0.0;
    for (int i = 0; i < instance.buyers(); ++i) {
      sampled_transfers += round.transaction[i];
      const double g = round.sampled_gain[i];
      // The bounded group is what buyer i creates (independent) or what it
      // suffers (joint), mirroring the table-level bound of each model.
      const bool joint = instance.model() == ExternalityModel::kJoint;
      const double s = joint ? round.suffered(i) : round.contributed(i);
      if (!(g >= -1.0 && g <= 1.0)) {
        sampled.fail("profile #", p, ", buyer ", i, ": sampled gain ", g);
      }
      if (!(s >= 0.0 && s <= 1.0 + kSumTolerance)) {
        sampled.fail("profile #", p, ", buyer ", i, ": sampled externality ",
                     joint ? "suffered " : "created ", s);
      }
    }
    if (std::abs(sampled_transfers) > kTolerance) {
      neutral.fail("profile #", p, ": sampled transfers sum to ",
                   sampled_transfers);
    }
  }
  out.push_back(neutral.done());
  out.push_back(invariance.done());
  out.push_back(welfare.done());
  out.push_back(sampled.done());
}

}  // namespace

std::vector<InvariantCheck> validate_instance(const MarketInstance& instance,
                                              int random_profiles) {
  std::vector<InvariantCheck> out;
  scalar_checks(instance, out);
  gain_checks(instance, out);
  if (instance.model() == ExternalityModel::kIndependent) {
    independent_checks(instance, out);
  } else {
    joint_checks(instance, out);
  }
  randomized_checks(instance, random_profiles, out);
  return out;
}

bool all_passed(const std::vector<InvariantCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(),
                     [](const InvariantCheck& c) { return c.passed; });
}

}  // namespace datamarket
