#include "datamarket/instances.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "datamarket/equilibrium.hpp"
#include "datamarket/random.hpp"

namespace datamarket {
namespace {

constexpr int kClosenessRetries = 1000;

void require(bool ok, const std::string& message) {
  if (!ok) throw ParameterError(message);
}

// Uniform point on the probability simplex with `parts` coordinates.
std::vector<double> simplex_point(std::size_t parts, RandomStream& stream) {
  std::vector<double> w(parts);
  double total = 0.0;
  for (auto& x : w) {
    x = -std::log1p(-stream.uniform01());
    total += x;
  }
  for (auto& x : w) x = total > 0.0 ? x / total : 1.0 / parts;
  return w;
}

// Spreads `total` created by `inducer` holding `set` over the other buyers.
void split_column(IndependentExternality& ext, int inducer, std::uint32_t set,
                  double total, RandomStream& stream) {
  const int n = ext.buyers();
  if (n < 2) return;
  const auto w = simplex_point(n - 1, stream);
  std::size_t r = 0;
  for (int i = 0; i < n; ++i) {
    if (i != inducer) ext.at(i, inducer, set) = total * w[r++];
  }
}

GainTable random_gains(int n, int k, RandomStream& stream) {
  GainTable gain(n, k);
  for (int i = 0; i < n; ++i) {
    for (std::uint32_t s = 1; s < set_count(k); ++s) {
      gain.at(i, s) = stream.uniform(-1.0, 1.0);
    }
  }
  return gain;
}

}  // namespace

std::string to_string(GeneratorSpec::Kind kind) {
  using K = GeneratorSpec::Kind;
  switch (kind) {
    case K::kThm1: return "thm1";
    case K::kThm2Lower: return "thm2-lower";
    case K::kJointNoPne: return "joint-no-pne";
    case K::kSymmetricOmegaN: return "symmetric-omega-n";
    case K::kRandomIndependent: return "random-independent";
    case K::kRandomSymmetric: return "random-symmetric";
    case K::kRandomJoint: return "random-joint";
    case K::kRandomCloseness: return "random-closeness";
  }
  return "unknown";
}

GeneratorSpec::Kind generator_kind_from_string(const std::string& name) {
  using K = GeneratorSpec::Kind;
  for (K kind : {K::kThm1, K::kThm2Lower, K::kJointNoPne, K::kSymmetricOmegaN,
                 K::kRandomIndependent, K::kRandomSymmetric, K::kRandomJoint,
                 K::kRandomCloseness}) {
    if (to_string(kind) == name) return kind;
  }
  throw ParameterError("unknown generator kind '" + name + "'");
}

MarketInstance generate(const GeneratorSpec& spec) {
  using K = GeneratorSpec::Kind;
  switch (spec.kind) {
    case K::kThm1: return make_thm1(spec.n, spec.epsilon, spec.noise);
    case K::kThm2Lower:
      return make_thm2_lower(spec.n, spec.alpha, spec.epsilon, spec.noise);
    case K::kJointNoPne:
      return make_joint_no_pne(spec.k, spec.a, spec.b, spec.alpha, spec.noise);
    case K::kSymmetricOmegaN:
      return make_symmetric_omega_n(spec.n, spec.epsilon, spec.noise);
    case K::kRandomIndependent:
      return make_random_independent(spec.n, spec.k, spec.alpha, spec.seed,
                                     spec.noise);
    case K::kRandomSymmetric:
      return make_random_symmetric(spec.n, spec.k, spec.seed, spec.noise);
    case K::kRandomJoint:
      return make_random_joint(spec.n, spec.k, spec.alpha, spec.seed,
                               spec.noise);
    case K::kRandomCloseness:
      return make_random_closeness(spec.n, spec.k, spec.lambda, spec.alpha,
                                   spec.seed, spec.noise);
  }
  throw ParameterError("unknown generator kind");
}

MarketInstance make_thm1(int n, double epsilon, NoiseModel noise) {
  require(n >= 2 && n <= kMaxSellers, "thm1: n must lie in [2, 20] (k = n)");
  require(epsilon > 0.0 && epsilon < 1.0, "thm1: epsilon must lie in (0, 1)");
  const int k = n;
  GainTable gain(n, k);
  IndependentExternality ext(n, k);
  for (int i = 0; i < n; ++i) {
    const std::uint32_t own = std::uint32_t{1} << i;
    for (std::uint32_t s = 1; s < set_count(k); ++s) {
      gain.at(i, s) = s == own ? 1.0 : 1.0 - epsilon;
    }
    for (int j = 0; j < n; ++j) {
      if (j != i) ext.at(i, j, std::uint32_t{1} << j) = 1.0 / (n - 1);
    }
  }
  return MarketInstance(std::move(gain), std::move(ext), 0.0, 1.0, noise);
}

MarketInstance make_thm2_lower(int n, double alpha, double epsilon,
                               NoiseModel noise) {
  require(n >= 2, "thm2-lower: n must be >= 2");
  require(alpha >= 0.0 && alpha <= 1.0, "thm2-lower: alpha must lie in [0, 1]");
  require(epsilon > 0.0 && epsilon < 1.0 - alpha,
          "thm2-lower: epsilon must lie in (0, 1 - alpha)");
  const int k = 2;
  GainTable gain(n, k);
  IndependentExternality ext(n, k);
  for (int i = 0; i < n; ++i) {
    gain.at(i, 0b10) = 1.0 - alpha - epsilon;
    gain.at(i, 0b11) = 1.0;
    for (int j = 0; j < n; ++j) {
      if (j != i) ext.at(i, j, 0b11) = 1.0 / (n - 1);
    }
  }
  return MarketInstance(std::move(gain), std::move(ext), alpha, 1.0, noise);
}

MarketInstance make_joint_no_pne(int k, std::uint32_t a, std::uint32_t b,
                                 double alpha, NoiseModel noise) {
  require(k >= 1 && k <= kMaxSellers, "joint-no-pne: k must lie in [1, 20]");
  require(a < set_count(k) && b < set_count(k),
          "joint-no-pne: a and b must be masks over k sellers");
  require(a != 0 && b != 0,
          "joint-no-pne: a and b must be nonempty (the empty set has gain 0)");
  require(a != b, "joint-no-pne: a and b must differ");
  require(alpha >= 0.0 && alpha <= 1.0, "joint-no-pne: alpha must lie in [0, 1]");
  const int n = 2;
  GainTable gain(n, k);
  for (int i = 0; i < n; ++i) {
    gain.at(i, a) = 1.0;
    gain.at(i, b) = 1.0;
  }
  const std::size_t sets = set_count(k);
  JointExternality ext(n, k);
  for (std::uint32_t s1 = 0; s1 < sets; ++s1) {
    for (std::uint32_t s2 = 0; s2 < sets; ++s2) {
      ext.at(0, 1, s1, s2) = 1.0;
      ext.at(1, 0, s2, s1) = 1.0;
    }
  }
  // Buyer 1 (index 0) holds s1, buyer 2 (index 1) holds s2.
  for (std::uint32_t s1 : {a, b}) {
    for (std::uint32_t s2 : {a, b}) {
      const bool same = s1 == s2;
      ext.at(0, 1, s1, s2) = same ? 0.5 : 0.0;
      ext.at(1, 0, s2, s1) = same ? 0.0 : 0.5;
    }
  }
  return MarketInstance(std::move(gain), std::move(ext), alpha, 1.0, noise);
}

MarketInstance make_symmetric_omega_n(int n, double epsilon, NoiseModel noise) {
  require(n >= 2, "symmetric-omega-n: n must be >= 2");
  require(epsilon > 0.0 && epsilon < 1.0 / 6.0,
          "symmetric-omega-n: epsilon must lie in (0, 1/6)");
  const int k = 2;
  GainTable gain(n, k);
  gain.at(0, 0b01) = 1.0;
  gain.at(0, 0b10) = 1.0;
  gain.at(0, 0b11) = 1.0 - 4.0 * epsilon;
  for (int i = 1; i < n; ++i) {
    gain.at(i, 0b10) = 1.0;
    gain.at(i, 0b11) = 1.0;
  }
  // Rows: the first buyer's set (or the lower-indexed buyer's set), columns:
  // the other buyer's set, both ordered {0}, {1}, {0,1}. Scaled by 1/(n-1).
  const double first[3][3] = {{1.0, 1.0, 4.0 * epsilon},
                              {1.0, 1.0 - epsilon, 1.0},
                              {1.0, 1.0, epsilon}};
  const double others[3][3] = {{1.0, 1.0, 1.0},
                               {1.0, 1.0 - epsilon, 1.0},
                               {1.0, 1.0, 0.0}};
  const double scale = 1.0 / (n - 1);
  JointExternality ext(n, k, /*symmetric=*/true);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const auto& m = i == 0 ? first : others;
      for (std::uint32_t r = 1; r <= 3; ++r) {
        for (std::uint32_t c = 1; c <= 3; ++c) {
          const double v = m[r - 1][c - 1] * scale;
          ext.at(i, j, r, c) = v;
          ext.at(j, i, c, r) = v;
        }
      }
    }
  }
  return MarketInstance(std::move(gain), std::move(ext), 0.0, 1.0, noise);
}

MarketInstance make_random_closeness(int n, int k, double lambda, double alpha,
                                     std::uint64_t seed, NoiseModel noise) {
  require(n >= 1, "random-closeness: n must be >= 1");
  require(k >= 1 && k <= kMaxSellers, "random-closeness: k must lie in [1, 20]");
  require(lambda > 0.0, "random-closeness: lambda must be positive");
  require(alpha >= 0.0 && alpha <= 1.0,
          "random-closeness: alpha must lie in [0, 1]");
  const std::uint32_t sets = set_count(k);
  GainTable gain(n, k);
  IndependentExternality ext(n, k);
  // With a single buyer nothing can be contributed.
  const double split_alpha = n > 1 ? alpha : 0.0;

  // Draws the contributed total for a set with effective utility `target`
  // so that gain = target + alpha * total lies in [-1, 1]. Returns a
  // negative value when infeasible.
  auto draw_total = [&](double target, RandomStream& stream) {
    if (split_alpha == 0.0) {
      if (target < -1.0 || target > 1.0) return -1.0;
      return n > 1 ? stream.uniform01() : 0.0;
    }
    const double lo = std::max(0.0, (-1.0 - target) / split_alpha);
    const double hi = std::min(1.0, (1.0 - target) / split_alpha);
    if (lo > hi) return -1.0;
    return stream.uniform(lo, hi);
  };

  for (int i = 0; i < n; ++i) {
    auto stream = RandomStream::derive(seed, StreamLabel::kGenerator,
                                       static_cast<std::uint64_t>(i));
    bool done = false;
    for (int attempt = 0; attempt < kClosenessRetries && !done; ++attempt) {
      const auto best = static_cast<std::uint32_t>(1 + stream.below(sets - 1));
      const double top = stream.uniform(0.5, 1.0);
      std::vector<double> target(sets);
      std::vector<double> total(sets);

      // The empty set has gain 0, so its effective utility is
      // -alpha * total; pick the total that puts its gap inside the band.
      const double d0 = hamming_distance(SellerSet(0, k), SellerSet(best, k));
      const double band_lo0 = std::max(0.0, lambda * (d0 - 1.0 / k));
      const double band_hi0 = lambda * d0;
      if (split_alpha == 0.0) {
        if (top < band_lo0 || top > band_hi0) continue;
        total[0] = n > 1 ? stream.uniform01() : 0.0;
      } else {
        const double lo = std::max(0.0, band_lo0 - top);
        const double hi = std::min(split_alpha, band_hi0 - top);
        if (lo > hi) continue;
        total[0] = stream.uniform(lo, hi) / split_alpha;
      }
      target[0] = -split_alpha * total[0];

      bool feasible = true;
      for (std::uint32_t s = 1; s < sets && feasible; ++s) {
        double gap = 0.0;
        if (s != best) {
          const double d = hamming_distance(SellerSet(s, k), SellerSet(best, k));
          gap = stream.uniform(std::max(0.0, lambda * (d - 1.0 / k)), lambda * d);
        }
        target[s] = top - gap;
        total[s] = draw_total(target[s], stream);
        feasible = total[s] >= 0.0;
      }
      if (!feasible) continue;

      for (std::uint32_t s = 0; s < sets; ++s) {
        gain.at(i, s) = s == 0 ? 0.0 : target[s] + split_alpha * total[s];
        split_column(ext, i, s, total[s], stream);
      }
      done = true;
    }
    require(done, "random-closeness: no feasible draw for buyer " +
                      std::to_string(i) + " after " +
                      std::to_string(kClosenessRetries) +
                      " attempts (lambda too small for the [0.5, 1] top "
                      "utility range?)");
  }
  return MarketInstance(std::move(gain), std::move(ext), alpha, lambda, noise);
}

MarketInstance make_random_independent(int n, int k, double alpha,
                                       std::uint64_t seed, NoiseModel noise) {
  require(n >= 1, "random-independent: n must be >= 1");
  require(k >= 1 && k <= kMaxSellers,
          "random-independent: k must lie in [1, 20]");
  auto stream = RandomStream::derive(seed, StreamLabel::kGenerator);
  GainTable gain = random_gains(n, k, stream);
  IndependentExternality ext(n, k);
  for (int j = 0; j < n; ++j) {
    for (std::uint32_t s = 1; s < set_count(k); ++s) {
      split_column(ext, j, s, stream.uniform01(), stream);
    }
  }
  return MarketInstance(std::move(gain), std::move(ext), alpha, 1.0, noise);
}

MarketInstance make_random_symmetric(int n, int k, std::uint64_t seed,
                                     NoiseModel noise) {
  require(n >= 1, "random-symmetric: n must be >= 1");
  require(k >= 1 && k <= kMaxSellers, "random-symmetric: k must lie in [1, 20]");
  auto stream = RandomStream::derive(seed, StreamLabel::kGenerator);
  GainTable gain = random_gains(n, k, stream);
  JointExternality ext(n, k, /*symmetric=*/true);
  const double cap = n > 1 ? 1.0 / (n - 1) : 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (std::uint32_t a = 1; a < set_count(k); ++a) {
        for (std::uint32_t b = 1; b < set_count(k); ++b) {
          const double v = stream.uniform(0.0, cap);
          ext.at(i, j, a, b) = v;
          ext.at(j, i, b, a) = v;
        }
      }
    }
  }
  return MarketInstance(std::move(gain), std::move(ext), 0.0, 1.0, noise);
}

MarketInstance make_random_joint(int n, int k, double alpha,
                                 std::uint64_t seed, NoiseModel noise) {
  require(n >= 1, "random-joint: n must be >= 1");
  require(k >= 1 && k <= kMaxSellers, "random-joint: k must lie in [1, 20]");
  auto stream = RandomStream::derive(seed, StreamLabel::kGenerator);
  GainTable gain = random_gains(n, k, stream);
  JointExternality ext(n, k);
  const double cap = n > 1 ? 1.0 / (n - 1) : 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      for (std::uint32_t a = 0; a < set_count(k); ++a) {
        for (std::uint32_t b = 1; b < set_count(k); ++b) {
          ext.at(i, j, a, b) = stream.uniform(0.0, cap);
        }
      }
    }
  }
  return MarketInstance(std::move(gain), std::move(ext), alpha, 1.0, noise);
}

double closeness_violation(const MarketInstance& instance) {
  const int k = instance.sellers();
  double worst = 0.0;
  for (int i = 0; i < instance.buyers(); ++i) {
    const SellerSet best = dominant_strategy(instance, i);
    const double top = expected_effective_utility(instance, i, best);
    for (std::uint32_t s = 0; s < instance.sets(); ++s) {
      const SellerSet set(s, k);
      const double gap = top - expected_effective_utility(instance, i, set);
      const double d = hamming_distance(set, best);
      const double lo = instance.lambda() * (d - 1.0 / k);
      const double hi = instance.lambda() * d;
      worst = std::max({worst, lo - gap, gap - hi});
    }
  }
  return worst;
}

}  // namespace datamarket
