#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "datamarket/equilibrium.hpp"
#include "datamarket/instances.hpp"
#include "oracles.hpp"

using namespace datamarket;

namespace {

std::vector<std::uint32_t> as_masks(const Profile& p) { return p.masks(); }

Profile masks(std::vector<std::uint32_t> m, int k) {
  return Profile::from_masks(m, k);
}

}  // namespace

TEST_CASE("dominant strategies") {
  SUBCASE("thm1: own singleton") {
    const auto m = make_thm1(4, 0.1);
    for (int i = 0; i < 4; ++i) {
      CHECK(dominant_strategy(m, i).bits() == (1u << i));
    }
  }
  SUBCASE("thm2: both sellers for every alpha < 1") {
    for (double alpha : {0.0, 0.25, 0.5, 0.75}) {
      const auto m = make_thm2_lower(4, alpha, 0.01);
      for (int i = 0; i < 4; ++i) CHECK(dominant_strategy(m, i).bits() == 3);
    }
  }
  SUBCASE("random instances: exhaustive effective-utility scan") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto m = make_random_independent(3, 3, 0.1 * (seed % 11), seed);
      for (int i = 0; i < 3; ++i) {
        std::uint32_t best = 0;
        for (std::uint32_t s = 1; s < 8; ++s) {
          if (oracle::effective(m, i, s) > oracle::effective(m, i, best)) best = s;
        }
        CHECK(dominant_strategy(m, i).bits() == best);
      }
    }
  }
  CHECK_THROWS_AS(dominant_strategy(make_joint_no_pne(2, 1, 2, 0.5), 0),
                  UnsupportedModelError);
}

TEST_CASE("social optimum") {
  SUBCASE("thm2 lower, n=4, alpha=0.5, eps=0.01") {
    const auto opt = social_optimum(make_thm2_lower(4, 0.5, 0.01));
    CHECK(opt.welfare == doctest::Approx(1.96).epsilon(1e-12));
    CHECK(as_masks(opt.profile) == std::vector<std::uint32_t>{2, 2, 2, 2});
  }
  SUBCASE("thm1, n=3, eps=0.1: lexicographically first non-own profile") {
    const auto opt = social_optimum(make_thm1(3, 0.1));
    CHECK(opt.welfare == doctest::Approx(2.7).epsilon(1e-12));
    CHECK(as_masks(opt.profile) == std::vector<std::uint32_t>{2, 1, 1});
  }
  SUBCASE("single buyer: best gain") {
    const auto m = make_random_independent(1, 4, 0.2, 6);
    const auto opt = social_optimum(m);
    double best = -2.0;
    for (std::uint32_t s = 0; s < 16; ++s) best = std::max(best, m.gains()(0, s));
    CHECK(opt.welfare == best);
  }
  SUBCASE("matches the brute-force oracle") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto m = seed % 2 ? make_random_joint(3, 2, 0.3, seed)
                              : make_random_independent(3, 2, 0.3, seed);
      const auto e = oracle::enumerate(m);
      CHECK(social_optimum(m).welfare == doctest::Approx(e.optimum).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(social_optimum(make_random_joint(5, 5, 0.0, 1)),
                  BudgetError);
  CHECK_THROWS_AS(enumerate_pure_equilibria(make_random_joint(3, 2, 0.0, 1), 63),
                  BudgetError);
  CHECK_NOTHROW(checked_profile_count(make_random_independent(4, 6, 0.0, 1),
                                      kDefaultProfileBudget));
  // Independent instances far beyond the enumeration budget stay exact.
  const auto big = make_thm1(8, 0.1);
  CHECK(social_optimum(big).welfare == doctest::Approx(8 * 0.9));
  CHECK(wrae(big).pure_equilibria.size() == 1);
}

TEST_CASE("pure equilibria") {
  SUBCASE("joint no-PNE instance") {
    for (double alpha : {0.0, 0.25, 0.75, 1.0}) {
      CHECK(enumerate_pure_equilibria(make_joint_no_pne(2, 1, 2, alpha)).empty());
    }
    CHECK_FALSE(enumerate_pure_equilibria(make_joint_no_pne(2, 1, 2, 0.5)).empty());
  }
  SUBCASE("independent ties: every tied combination is listed") {
    // All-zero tables: every profile is an equilibrium.
    const MarketInstance flat(GainTable(3, 2), IndependentExternality(3, 2),
                              0.5, 1.0);
    CHECK(enumerate_pure_equilibria(flat).size() == 64);
    CHECK_THROWS_AS(enumerate_pure_equilibria(flat, 63), BudgetError);
  }
  SUBCASE("independent model: the dominant profile is an equilibrium") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const auto m = make_random_independent(3, 2, 0.25 * (seed % 5), seed);
      const auto eq = enumerate_pure_equilibria(m);
      CHECK(std::find(eq.begin(), eq.end(), dominant_profile(m)) != eq.end());
    }
  }
  SUBCASE("matches the brute-force oracle") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto m = seed % 3 == 0   ? make_random_joint(3, 2, 0.5, seed)
                     : seed % 3 == 1 ? make_random_symmetric(3, 2, seed)
                                     : make_random_independent(3, 2, 0.5, seed);
      const auto e = oracle::enumerate(m);
      const auto eq = enumerate_pure_equilibria(m);
      REQUIRE(eq.size() == e.equilibria.size());
      for (std::size_t q = 0; q < eq.size(); ++q) {
        CHECK(as_masks(eq[q]) == e.equilibria[q]);
      }
    }
  }
}

TEST_CASE("dominance against every opponent profile") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto m = make_random_independent(3, 2, 0.25 * (seed % 5), seed);
    const auto dom = dominant_profile(m);
    oracle::for_each_profile(m, [&](const std::vector<std::uint32_t>& s) {
      for (int i = 0; i < 3; ++i) {
        auto d = s;
        d[i] = dom[i].bits();
        CHECK(oracle::utility(m, i, d) >= oracle::utility(m, i, s) - 1e-12);
      }
    });
  }
}

TEST_CASE("wrae reports") {
  const auto thm1 = wrae(make_thm1(3, 0.1));
  REQUIRE(thm1.worst_wrae.has_value());
  CHECK(*thm1.worst_wrae == doctest::Approx(2.7).epsilon(1e-12));
  REQUIRE(thm1.pure_equilibria.size() == 1);
  CHECK(as_masks(thm1.pure_equilibria[0]) == std::vector<std::uint32_t>{1, 2, 4});

  const auto thm2 = wrae(make_thm2_lower(4, 0.5, 0.01));
  CHECK(*thm2.worst_wrae == doctest::Approx(1.96).epsilon(1e-12));
  CHECK(as_masks(*thm2.dominant_profile) == std::vector<std::uint32_t>{3, 3, 3, 3});

  const auto omega = wrae(make_symmetric_omega_n(5, 0.01));
  CHECK(*omega.worst_wrae == doctest::Approx(4.89).epsilon(1e-12));
  CHECK(*omega.best_wrae <= 0.06);
  CHECK(*omega.best_wrae <= *omega.worst_wrae);
  CHECK_FALSE(omega.dominant_profile.has_value());

  const auto none = wrae(make_joint_no_pne(2, 1, 2, 0.25));
  CHECK(none.pure_equilibria.empty());
  CHECK_FALSE(none.worst_wrae.has_value());
  CHECK_FALSE(none.best_wrae.has_value());
}

TEST_CASE("best response") {
  SUBCASE("single buyer picks the best gain") {
    const auto m = make_random_independent(1, 3, 0.0, 2);
    const auto br = best_response(m, masks({0}, 3), 0);
    for (std::uint32_t s = 0; s < 8; ++s) {
      CHECK(m.gains()(0, br.bits()) >= m.gains()(0, s));
    }
  }
  SUBCASE("at an equilibrium everyone stays") {
    const auto m = make_symmetric_omega_n(4, 0.01);
    for (const auto& eq : enumerate_pure_equilibria(m)) {
      for (int i = 0; i < 4; ++i) CHECK(best_response(m, eq, i) == eq[i]);
    }
  }
  SUBCASE("joint no-PNE, alpha=0.75: buyer 2 leaves (a, a) for b") {
    const auto m = make_joint_no_pne(2, 1, 2, 0.75);
    CHECK(best_response(m, masks({1, 1}, 2), 1).bits() == 2);
  }
}

TEST_CASE("sequential best response") {
  SUBCASE("joint no-PNE cycles at alpha=0.75") {
    const auto m = make_joint_no_pne(2, 1, 2, 0.75);
    const auto trace =
        sequential_best_response(m, masks({1, 1}, 2), {0, 1}, 100);
    CHECK(trace.cycle_detected);
    CHECK_FALSE(trace.converged);
  }
  SUBCASE("start at an equilibrium: one pass, no updates") {
    const auto m = make_symmetric_omega_n(3, 0.01);
    const auto eq = enumerate_pure_equilibria(m).front();
    const auto trace = sequential_best_response(m, eq, {2, 0, 1}, 10);
    CHECK(trace.converged);
    CHECK(trace.updates.empty());
    CHECK(trace.states.size() == 2);
  }
  SUBCASE("symmetric instances converge and the potential climbs") {
    std::mt19937_64 rng(3);
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
      const int n = 2 + static_cast<int>(seed % 3);
      const auto m = make_random_symmetric(n, 2, seed);
      std::vector<int> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      std::vector<std::uint32_t> start(n);
      for (auto& x : start) x = static_cast<std::uint32_t>(rng() % 4);
      const auto trace = sequential_best_response(m, masks(start, 2), order, 1000);
      CHECK(trace.converged);
      CHECK_FALSE(trace.cycle_detected);
      CHECK(oracle::is_equilibrium(m, as_masks(trace.states.back())));

      auto state = start;
      for (const auto& u : trace.updates) {
        const double before = potential(m, masks(state, 2));
        state[u.buyer] = u.to.bits();
        CHECK(potential(m, masks(state, 2)) > before);
      }
      CHECK(state == as_masks(trace.states.back()));
    }
  }
  CHECK_THROWS_AS(sequential_best_response(make_thm1(3, 0.1),
                                           masks({0, 0, 0}, 3), {0, 1, 1}, 5),
                  PreconditionError);
  CHECK_THROWS_AS(sequential_best_response(make_thm1(3, 0.1),
                                           masks({0, 0, 0}, 3), {0, 1, 2}, 0),
                  PreconditionError);
}

TEST_CASE("symmetrize") {
  SUBCASE("averaging formula") {
    JointExternality ext(2, 1);
    ext.at(0, 1, 1, 1) = 0.4;
    ext.at(1, 0, 1, 1) = 0.2;
    const MarketInstance m(GainTable(2, 1), ext, 0.5, 1.0);
    const auto s = symmetrize(m);
    CHECK(s.alpha() == 0.0);
    CHECK(s.joint()(0, 1, 1, 1) == doctest::Approx(0.3));
    CHECK(s.joint()(1, 0, 1, 1) == doctest::Approx(0.3));
    CHECK(s.joint().symmetric());
  }
  SUBCASE("already symmetric: tables unchanged") {
    const auto m = make_random_symmetric(3, 2, 4);
    const auto s = symmetrize(m.with_alpha(0.5));
    CHECK(s.joint().values().size() == m.joint().values().size());
    CHECK(std::equal(s.joint().values().begin(), s.joint().values().end(),
                     m.joint().values().begin()));
    CHECK(s.alpha() == 0.0);
  }
  SUBCASE("no-PNE instance gains an equilibrium") {
    const auto s = symmetrize(make_joint_no_pne(2, 1, 2, 0.5));
    CHECK_FALSE(enumerate_pure_equilibria(s).empty());
  }
  SUBCASE("utilities preserved") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto m = make_random_joint(3, 2, 0.5, seed);
      const auto s = symmetrize(m);
      oracle::for_each_profile(m, [&](const std::vector<std::uint32_t>& p) {
        for (int i = 0; i < 3; ++i) {
          CHECK(std::abs(expected_utility(m, i, masks(p, 2)) -
                         expected_utility(s, i, masks(p, 2))) <= 1e-12);
        }
      });
    }
  }
  CHECK_THROWS_AS(symmetrize(make_joint_no_pne(2, 1, 2, 0.25)), PreconditionError);
}
