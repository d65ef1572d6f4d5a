#pragma once

#include <cstdint>
#include <string>

#include "datamarket/market.hpp"

namespace datamarket {

struct GeneratorSpec {
  enum class Kind {
    kThm1,
    kThm2Lower,
    kJointNoPne,
    kSymmetricOmegaN,
    kRandomIndependent,
    kRandomSymmetric,
    kRandomJoint,
    kRandomCloseness,
  };

  Kind kind = Kind::kRandomIndependent;
  int n = 3;
  int k = 3;
  double alpha = 0.0;
  double epsilon = 0.01;
  double lambda = 1.0;
  std::uint64_t seed = 0;
  // joint-no-pne only: the two distinguished seller sets.
  std::uint32_t a = 1;
  std::uint32_t b = 2;
  NoiseModel noise;
};

std::string to_string(GeneratorSpec::Kind kind);
GeneratorSpec::Kind generator_kind_from_string(const std::string& name);

MarketInstance generate(const GeneratorSpec& spec);

// n buyers, k = n sellers. Buyer i's own singleton {i} has gain 1 and imposes
// 1/(n-1) on every other buyer; every other nonempty set has gain 1 - eps and
// imposes nothing. alpha = 0.
MarketInstance make_thm1(int n, double epsilon, NoiseModel noise = {});

// Two sellers; gains [0, 0, 1 - alpha - eps, 1] over masks 0..3, and only the
// set {0, 1} imposes 1/(n-1) on each other buyer.
MarketInstance make_thm2_lower(int n, double alpha, double epsilon,
                               NoiseModel noise = {});

// Two buyers, joint model. Gain 1 on masks a and b, 0 elsewhere; on the
// {a, b} block buyer 1 suffers 0.5 when both match and buyer 2 suffers 0.5
// when they differ; every other pair of sets costs each buyer 1.
MarketInstance make_joint_no_pne(int k, std::uint32_t a, std::uint32_t b,
                                 double alpha, NoiseModel noise = {});

// n buyers, two sellers, symmetric joint model with alpha = 0. Every buyer
// on {1} is an equilibrium with welfare n * eps while everyone on {0, 1}
// reaches n - 6 eps.
MarketInstance make_symmetric_omega_n(int n, double epsilon,
                                      NoiseModel noise = {});

// Independent model whose effective-utility gaps obey the closeness band
// Delta_i(gamma) in [lambda (D_h(gamma, gamma_d) - 1/k), lambda D_h(gamma, gamma_d)].
MarketInstance make_random_closeness(int n, int k, double lambda, double alpha,
                                     std::uint64_t seed, NoiseModel noise = {});

MarketInstance make_random_independent(int n, int k, double alpha,
                                       std::uint64_t seed,
                                       NoiseModel noise = {});
// Symmetric joint model, alpha = 0.
MarketInstance make_random_symmetric(int n, int k, std::uint64_t seed,
                                     NoiseModel noise = {});
// Asymmetric joint model; pair entries in [0, 1/(n-1)] so both the suffered
// and the created sums stay <= 1.
MarketInstance make_random_joint(int n, int k, double alpha,
                                 std::uint64_t seed, NoiseModel noise = {});

// Largest violation of the closeness band over all buyers and sets, measured
// against each buyer's dominant set (0 when the band holds everywhere).
double closeness_violation(const MarketInstance& instance);

}  // namespace datamarket
