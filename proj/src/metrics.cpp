#include "datamarket/metrics.hpp"

#include <map>
#include <ostream>

namespace datamarket {
namespace {

// Expected effective utilities and dominant sets for one alpha.
struct Benchmarks {
  std::vector<std::vector<double>> effective;  // [buyer][mask]
  std::vector<std::uint32_t> dominant;
};

class BenchmarkCache {
 public:
  explicit BenchmarkCache(const MarketInstance& instance)
      : instance_(instance) {}

  const Benchmarks& at(double alpha) {
    auto it = cache_.find(alpha);
    if (it != cache_.end()) return it->second;
    const MarketInstance at_alpha = instance_.with_alpha(alpha);
    Benchmarks b;
    const int k = instance_.sellers();
    for (int i = 0; i < instance_.buyers(); ++i) {
      std::vector<double> row(instance_.sets());
      for (std::uint32_t s = 0; s < instance_.sets(); ++s) {
        row[s] = expected_effective_utility(at_alpha, i, SellerSet(s, k));
      }
      b.effective.push_back(std::move(row));
      b.dominant.push_back(dominant_strategy(at_alpha, i).bits());
    }
    return cache_.emplace(alpha, std::move(b)).first->second;
  }

 private:
  const MarketInstance& instance_;
  std::map<double, Benchmarks> cache_;
};

void check_trace(const MarketInstance& instance, const SimulationTrace& trace) {
  if (trace.n != instance.buyers() || trace.k != instance.sellers()) {
    throw DimensionError("trace dimensions do not match the instance");
  }
}

}  // namespace

std::vector<double> effective_regret(const MarketInstance& instance,
                                     const SimulationTrace& trace, int buyer) {
  (void)instance.independent();
  check_trace(instance, trace);
  BenchmarkCache cache(instance);
  std::vector<double> out;
  out.reserve(trace.rounds());
  double total = 0.0;
  const int n = trace.n;
  for (std::int64_t t = 0; t < trace.rounds(); ++t) {
    const Benchmarks& b = cache.at(trace.alpha[t]);
    const auto played = trace.masks[t * n + buyer];
    total += b.effective[buyer][b.dominant[buyer]] - b.effective[buyer][played];
    out.push_back(total);
  }
  return out;
}

std::vector<double> welfare_regret(const MarketInstance& instance,
                                   const SimulationTrace& trace,
                                   std::uint64_t budget) {
  check_trace(instance, trace);
  const double optimum = social_optimum(instance, budget).welfare;
  std::vector<double> out;
  out.reserve(trace.rounds());
  double total = 0.0;
  const int n = trace.n;
  for (std::int64_t t = 0; t < trace.rounds(); ++t) {
    const std::span<const std::uint32_t> masks(trace.masks.data() + t * n, n);
    total += optimum - detail::welfare(instance, masks);
    out.push_back(total);
  }
  return out;
}

RegretSeries regret_series(const MarketInstance& instance,
                           const SimulationTrace& trace,
                           std::uint64_t budget) {
  check_trace(instance, trace);
  RegretSeries series;
  const Profile dominant = dominant_profile(instance);
  series.dominant.assign(dominant.begin(), dominant.end());
  series.optimum = social_optimum(instance, budget);

  const int n = trace.n;
  const auto rounds = trace.rounds();
  BenchmarkCache cache(instance);
  series.effective_per_round.assign(n, std::vector<double>(rounds));
  series.effective_cumulative.assign(n, std::vector<double>(rounds));
  series.welfare_per_round.resize(rounds);
  series.welfare_cumulative.resize(rounds);
  series.realized_welfare_cumulative.resize(rounds);

  std::vector<double> effective_total(n, 0.0);
  double welfare_total = 0.0;
  double realized_total = 0.0;
  for (std::int64_t t = 0; t < rounds; ++t) {
    const Benchmarks& b = cache.at(trace.alpha[t]);
    const std::span<const std::uint32_t> masks(trace.masks.data() + t * n, n);
    double realized = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r =
          b.effective[i][b.dominant[i]] - b.effective[i][masks[i]];
      series.effective_per_round[i][t] = r;
      effective_total[i] += r;
      series.effective_cumulative[i][t] = effective_total[i];
      realized += trace.realized_utility[t * n + i];
    }
    const double w = series.optimum.welfare - detail::welfare(instance, masks);
    series.welfare_per_round[t] = w;
    welfare_total += w;
    series.welfare_cumulative[t] = welfare_total;
    realized_total += series.optimum.welfare - realized;
    series.realized_welfare_cumulative[t] = realized_total;
  }
  return series;
}

WelfareDecomposition decompose_welfare_regret(const MarketInstance& instance,
                                              const SimulationTrace& trace,
                                              std::uint64_t budget) {
  check_trace(instance, trace);
  const int n = trace.n;
  const double optimum = social_optimum(instance, budget).welfare;
  BenchmarkCache cache(instance);

  WelfareDecomposition d;
  d.effective_regret.assign(n, 0.0);
  std::vector<std::uint32_t> dominant_masks(n);
  for (std::int64_t t = 0; t < trace.rounds(); ++t) {
    const Benchmarks& b = cache.at(trace.alpha[t]);
    const std::span<const std::uint32_t> masks(trace.masks.data() + t * n, n);
    for (int i = 0; i < n; ++i) {
      dominant_masks[i] = b.dominant[i];
      d.effective_regret[i] +=
          b.effective[i][b.dominant[i]] - b.effective[i][masks[i]];
    }
    const double played = detail::welfare(instance, masks);
    const double dominant = detail::welfare(instance, dominant_masks);
    d.welfare_regret += optimum - played;
    d.dominant_wrae_part += optimum - dominant;
    d.residual += dominant - played;
    d.wrae_bound += n * (1.0 - trace.alpha[t]);
  }
  d.residual_bound = d.wrae_bound;
  for (double r : d.effective_regret) d.residual_bound += r;
  d.total_bound = d.wrae_bound + d.residual_bound;
  return d;
}

void write_regret_csv(std::ostream& out, const RegretSeries& series) {
  const std::size_t n = series.effective_cumulative.size();
  out << "t";
  for (std::size_t i = 1; i <= n; ++i) out << ",R_d_" << i;
  out << ",R_w\n";
  out.precision(17);
  for (std::size_t t = 0; t < series.welfare_cumulative.size(); ++t) {
    out << (t + 1);
    for (std::size_t i = 0; i < n; ++i) {
      out << ',' << series.effective_cumulative[i][t];
    }
    out << ',' << series.welfare_cumulative[t] << '\n';
  }
}

}  // namespace datamarket
