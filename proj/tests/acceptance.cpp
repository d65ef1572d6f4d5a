// Acceptance suite: one PASS/FAIL line per criterion. Runtime limits are
// part of each criterion. Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "datamarket/equilibrium.hpp"
#include "datamarket/instances.hpp"
#include "datamarket/learning.hpp"
#include "datamarket/metrics.hpp"
#include "datamarket/sampling.hpp"

using namespace datamarket;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

int failures = 0;

void run(int id, const char* name, double limit_seconds,
         const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  const bool in_time = seconds < limit_seconds;
  const bool ok = out.passed && in_time;
  if (!ok) ++failures;
  std::printf("[%s] C%-2d %s: %s (%.2f s, limit %.0f s%s)\n",
              ok ? "PASS" : "FAIL", id, name, out.detail.c_str(), seconds,
              limit_seconds, in_time ? "" : ", TOO SLOW");
  std::fflush(stdout);
}

template <typename... Parts>
std::string cat(const Parts&... parts) {
  std::ostringstream os;
  os.precision(6);
  (os << ... << parts);
  return os.str();
}

Profile random_profile(const MarketInstance& m, std::mt19937_64& rng) {
  std::vector<std::uint32_t> s(m.buyers());
  for (auto& x : s) x = static_cast<std::uint32_t>(rng() % m.sets());
  return Profile::from_masks(s, m.sellers());
}

template <typename F>
void for_each_profile(const MarketInstance& m, F&& f) {
  std::vector<std::uint32_t> s(m.buyers(), 0);
  while (true) {
    f(Profile::from_masks(s, m.sellers()));
    int i = m.buyers() - 1;
    while (i >= 0 && ++s[i] == m.sets()) s[i--] = 0;
    if (i < 0) return;
  }
}

// The 200 symmetric instances shared by criteria 7 and 8.
MarketInstance symmetric_instance(int index) {
  const int n = 2 + index % 3;
  const int k = 1 + (index / 3) % 3;
  return make_random_symmetric(n, k, 7000 + index);
}

Outcome revenue_neutrality() {
  std::mt19937_64 rng(1);
  const double alphas[] = {0.0, 0.5, 1.0};
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int n = 2 + t % 4;
    const int k = 1 + (t / 4) % 3;
    const double alpha = alphas[t % 3];
    const auto m = t % 2 ? make_random_joint(n, k, alpha, t)
                         : make_random_independent(n, k, alpha, t);
    const auto profile = random_profile(m, rng);
    auto stream = RandomStream::derive(t, StreamLabel::kMarket);
    const auto round = sample_round(m, profile, stream);
    double sampled = 0.0, expected = 0.0;
    for (int i = 0; i < n; ++i) {
      sampled += round.transaction[i];
      expected += expected_transaction(m, i, profile);
    }
    worst = std::max({worst, std::abs(sampled), std::abs(expected)});
  }
  return {worst <= 1e-12,
          cat("1000 triples, max |sum of transfers| = ", worst)};
}

Outcome thm1_reproduction() {
  Outcome out;
  std::string detail;
  for (int n = 3; n <= 6; ++n) {
    const double eps = 0.1;
    const auto report = wrae(make_thm1(n, eps));
    const double expected = n * (1 - eps);
    bool ok = report.worst_wrae &&
              std::abs(*report.worst_wrae - expected) <= 1e-9 &&
              report.pure_equilibria.size() == 1;
    if (ok) {
      for (int i = 0; i < n; ++i) {
        ok = ok && report.pure_equilibria[0][i].bits() == (1u << i);
      }
    }
    out.passed = out.passed && ok;
    detail += cat(detail.empty() ? "" : "; ", "n=", n, " worst_wrae=",
                  report.worst_wrae.value_or(NAN), " (want ", expected, ")",
                  ok ? "" : " MISMATCH");
  }
  out.detail = detail + "; unique own-singleton equilibrium checked";
  return out;
}

Outcome thm2_reproduction() {
  Outcome out;
  std::string detail;
  const int n = 4;
  const double eps = 0.01;
  for (double alpha : {0.0, 0.25, 0.5, 0.75}) {
    const auto m = make_thm2_lower(n, alpha, eps);
    const auto report = wrae(m);
    const double expected = n * (1 - alpha - eps);
    bool ok = report.dominant_profile &&
              *report.dominant_profile == Profile::uniform(n, SellerSet(3, 2)) &&
              std::abs(social_welfare(m, *report.dominant_profile)) <= 1e-9 &&
              report.worst_wrae &&
              std::abs(*report.worst_wrae - expected) <= 1e-9;
    out.passed = out.passed && ok;
    detail += cat(detail.empty() ? "" : "; ", "alpha=", alpha,
                  " worst_wrae=", report.worst_wrae.value_or(NAN), " (want ",
                  expected, ")", ok ? "" : " MISMATCH");
  }
  out.detail = detail + "; dominant all-{0,1} with welfare 0";
  return out;
}

Outcome wrae_upper_bound() {
  const double alphas[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  int cases = 0, violations = 0;
  double tightest = -1e9;  // max of worst_wrae - n(1 - alpha)
  for (int index = 0; index < 200; ++index) {
    const int n = 1 + index % 3;
    const int k = 1 + (index / 3) % 3;
    const auto base = make_random_independent(n, k, 0.0, 9000 + index);
    for (double alpha : alphas) {
      const auto report = wrae(base.with_alpha(alpha));
      ++cases;
      const double slack = *report.worst_wrae - n * (1 - alpha);
      tightest = std::max(tightest, slack);
      if (slack > 1e-9) ++violations;
    }
  }
  return {violations == 0,
          cat(cases, " (instance, alpha) cases, violations=", violations,
              ", max worst_wrae - n(1-alpha) = ", tightest)};
}

Outcome joint_no_pne() {
  Outcome out;
  std::string detail;
  for (double alpha : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const auto m = make_joint_no_pne(2, 1, 2, alpha);
    const auto count = enumerate_pure_equilibria(m).size();
    const bool want_some = alpha == 0.5;
    const bool ok = want_some ? count > 0 : count == 0;
    out.passed = out.passed && ok;
    detail += cat(detail.empty() ? "" : ", ", "alpha=", alpha, ": ", count);
  }
  const auto reduced = symmetrize(make_joint_no_pne(2, 1, 2, 0.5));
  const bool reduced_ok = !enumerate_pure_equilibria(reduced).empty();
  out.passed = out.passed && reduced_ok;
  out.detail = "pure equilibria " + detail +
               (reduced_ok ? "; symmetrized instance has one"
                           : "; symmetrized instance has NONE");
  return out;
}

Outcome symmetrize_equivalence() {
  double worst = 0.0;
  std::size_t comparisons = 0;
  for (int index = 0; index < 50; ++index) {
    const int n = 2 + index % 3;
    const int k = 1 + index % 2;
    const auto m = make_random_joint(n, k, 0.5, 5000 + index);
    const auto s = symmetrize(m);
    for_each_profile(m, [&](const Profile& p) {
      for (int i = 0; i < n; ++i) {
        worst = std::max(worst, std::abs(expected_utility(m, i, p) -
                                         expected_utility(s, i, p)));
        ++comparisons;
      }
    });
  }
  return {worst <= 1e-12, cat("50 instances, ", comparisons,
                              " utility comparisons, max |diff| = ", worst)};
}

Outcome best_response_convergence() {
  std::mt19937_64 rng(77);
  int cycles = 0, unconverged = 0, bad_terminal = 0, potential_drops = 0;
  std::size_t updates = 0;
  for (int index = 0; index < 200; ++index) {
    const auto m = symmetric_instance(index);
    const int n = m.buyers();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const auto start = random_profile(m, rng);
    const auto trace = sequential_best_response(m, start, order, 10000);
    if (trace.cycle_detected) ++cycles;
    if (!trace.converged) ++unconverged;
    if (!is_pure_equilibrium(m, trace.states.back())) ++bad_terminal;
    auto state = start;
    for (const auto& u : trace.updates) {
      const double before = potential(m, state);
      state.set(u.buyer, u.to);
      if (!(potential(m, state) > before)) ++potential_drops;
      ++updates;
    }
  }
  return {cycles == 0 && unconverged == 0 && bad_terminal == 0 &&
              potential_drops == 0,
          cat("200 instances, cycles=", cycles, ", unconverged=", unconverged,
              ", terminal non-equilibria=", bad_terminal, ", ", updates,
              " strict updates, potential non-increases=", potential_drops)};
}

Outcome best_case_wrae() {
  int violations = 0;
  double tightest = -1e9;  // max of best_wrae - n/2
  for (int index = 0; index < 200; ++index) {
    const auto m = symmetric_instance(index);
    const auto report = wrae(m);
    if (!report.best_wrae) {
      ++violations;
      continue;
    }
    const double slack = *report.best_wrae - m.buyers() / 2.0;
    tightest = std::max(tightest, slack);
    if (slack > 1e-9) ++violations;
  }
  const auto omega = wrae(make_symmetric_omega_n(5, 0.01));
  const bool omega_ok = omega.worst_wrae && omega.best_wrae &&
                        std::abs(*omega.worst_wrae - 4.89) <= 1e-9 &&
                        *omega.best_wrae <= 0.06;
  return {violations == 0 && omega_ok,
          cat("200 instances, violations=", violations,
              ", max best_wrae - n/2 = ", tightest,
              "; omega(n) n=5: worst_wrae=", omega.worst_wrae.value_or(NAN),
              " best_wrae=", omega.best_wrae.value_or(NAN))};
}

struct RegretRuns {
  std::vector<MarketInstance> instances;
  std::vector<SimulationTrace> zooming;
  std::vector<SimulationTrace> ucb;
};

constexpr std::int64_t kRegretHorizon = 50000;
constexpr int kRegretSeeds = 20;
constexpr double kRegretAlpha = 0.5;

RegretRuns& regret_runs() {
  static RegretRuns runs;
  return runs;
}

Outcome zooming_regret_shape() {
  auto& runs = regret_runs();
  const std::int64_t quarter = kRegretHorizon / 4;
  double zoom_t = 0.0, zoom_q = 0.0, ucb_t = 0.0;
  for (int seed = 1; seed <= kRegretSeeds; ++seed) {
    const auto m = make_random_closeness(3, 5, 1.0, kRegretAlpha, seed);
    SimulationConfig config;
    config.horizon = kRegretHorizon;
    config.seed = seed;
    config.learners = {LearnerKind::kZooming};
    auto zoom = simulate(m, config);
    config.learners = {LearnerKind::kFlatUcb};
    auto ucb = simulate(m, config);
    for (int i = 0; i < 3; ++i) {
      const auto z = effective_regret(m, zoom, i);
      zoom_t += z.back();
      zoom_q += z[quarter - 1];
      ucb_t += effective_regret(m, ucb, i).back();
    }
    runs.instances.push_back(m);
    runs.zooming.push_back(std::move(zoom));
    runs.ucb.push_back(std::move(ucb));
  }
  zoom_t /= kRegretSeeds;
  zoom_q /= kRegretSeeds;
  ucb_t /= kRegretSeeds;
  const double rate_t = zoom_t / kRegretHorizon;
  const double rate_q = zoom_q / quarter;
  const double ratio = rate_t / rate_q;
  const bool sublinear = rate_t <= 0.75 * rate_q;
  const bool beats_ucb = zoom_t <= 1.1 * ucb_t;
  return {sublinear && beats_ucb,
          cat("mean R(T)=", zoom_t, " R(T/4)=", zoom_q,
              "; [R(T)/T]/[R(T/4)/(T/4)] = ", ratio, " (need <= 0.75)",
              "; zooming/ucb = ", zoom_t / ucb_t, " (need <= 1.1)")};
}

Outcome clean_event() {
  const auto m = make_random_closeness(3, 5, 1.0, kRegretAlpha, 424242);
  const std::int64_t horizon = 1000;
  int clean = 0;
  std::int64_t checks = 0, violations = 0;
  for (int seed = 1; seed <= 100; ++seed) {
    SimulationConfig config;
    config.horizon = horizon;
    config.seed = seed;
    config.track_clean_event = true;
    const auto trace = simulate(m, config);
    checks += trace.clean_event_checks;
    violations += trace.clean_event_violations;
    if (trace.clean_event_violations == 0) ++clean;
  }
  const double fraction = clean / 100.0;
  const double needed = 1.0 - 2.0 / (double(horizon) * horizon);
  return {fraction >= needed,
          cat("clean runs ", clean, "/100 (need >= ", needed, "), ", checks,
              " radius checks, ", violations, " violations")};
}

Outcome welfare_decomposition() {
  const auto& runs = regret_runs();
  if (runs.zooming.empty()) return {false, "criterion 9 produced no traces"};
  int traces = 0, violations = 0;
  double tightest = -1e300;  // max of R_w - bound, per round
  for (std::size_t s = 0; s < runs.instances.size(); ++s) {
    for (const auto* trace : {&runs.zooming[s], &runs.ucb[s]}) {
      const auto& m = runs.instances[s];
      const auto d = decompose_welfare_regret(m, *trace);
      const double T = static_cast<double>(trace->rounds());
      double effective_sum = 0.0;
      for (double r : d.effective_regret) effective_sum += r;
      const double bound = T * m.buyers() * (1 - kRegretAlpha) + effective_sum +
                           m.buyers() * T * (1 - kRegretAlpha) + 1e-6 * T;
      tightest = std::max(tightest, (d.welfare_regret - bound) / T);
      if (d.welfare_regret > bound) ++violations;
      ++traces;
    }
  }
  return {violations == 0,
          cat(traces, " traces, violations=", violations,
              ", max (R_w - bound)/T = ", tightest)};
}

Outcome corollary_schedule() {
  const double value = alpha_corollary(1000000, 4);
  bool monotone = true;
  for (int k : {3, 4, 5}) {
    double previous = -1.0;
    for (int p = 4; p <= 20; ++p) {
      const double a = alpha_corollary(std::int64_t{1} << p, k);
      monotone = monotone && a >= previous;
      previous = a;
    }
  }
  return {std::abs(value - 0.9405) <= 1e-3 && monotone,
          cat("alpha(T=1e6, k=4) = ", value,
              monotone ? "; non-decreasing over p=4..20 for k=3,4,5"
                       : "; NOT monotone over p=4..20")};
}

}  // namespace

int main() {
  run(1, "revenue neutrality", 5, revenue_neutrality);
  run(2, "thm1 worst-case WRaE n(1-eps)", 10, thm1_reproduction);
  run(3, "thm2 lower bound n(1-alpha-eps)", 10, thm2_reproduction);
  run(4, "WRaE upper bound n(1-alpha)", 120, wrae_upper_bound);
  run(5, "joint model without pure equilibrium", 5, joint_no_pne);
  run(6, "symmetrize preserves utilities", 60, symmetrize_equivalence);
  run(7, "sequential best-response convergence", 120, best_response_convergence);
  run(8, "best-case WRaE <= n/2, omega(n) instance", 120, best_case_wrae);
  run(9, "zooming regret shape", 600, zooming_regret_shape);
  run(10, "clean event frequency", 300, clean_event);
  run(11, "welfare-regret decomposition bound", 600, welfare_decomposition);
  run(12, "corollary alpha schedule", 1, corollary_schedule);
  std::printf("%d/12 criteria passed\n", 12 - failures);
  return failures == 0 ? 0 : 1;
}
