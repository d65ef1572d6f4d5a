#pragma once

#include <cstdint>
#include <random>

namespace datamarket {

// Labels for seed splitting. Every random stream in a run is derived from
// the single user seed plus one of these labels and an index, so streams are
// reproducible per (seed, label, index) regardless of execution order.
enum class StreamLabel : std::uint64_t {
  kMarket = 1,
  kBuyer = 2,
  kGenerator = 3,
  kValidation = 4,
};

// Deterministic random stream. Only mt19937_64 output bits are used; the
// mapping to doubles is fixed here so traces are identical across standard
// library implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  static RandomStream derive(std::uint64_t seed, StreamLabel label,
                             std::uint64_t index = 0,
                             std::uint64_t sub_index = 0);

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  // Uniform integer in [0, bound), bound > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

}  // namespace datamarket
