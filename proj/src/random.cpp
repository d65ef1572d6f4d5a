#include "datamarket/random.hpp"

namespace datamarket {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RandomStream RandomStream::derive(std::uint64_t seed, StreamLabel label,
                                  std::uint64_t index,
                                  std::uint64_t sub_index) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(label));
  h = splitmix64(h ^ index);
  h = splitmix64(h ^ sub_index);
  return RandomStream(h);
}

std::uint64_t RandomStream::below(std::uint64_t bound) {
  // Rejection sampling over the largest multiple of bound.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

}  // namespace datamarket
