#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <string>

#include "datamarket/errors.hpp"

namespace datamarket {

// Dense tables are indexed by seller-set bitmask, so k is capped.
inline constexpr int kMaxSellers = 20;

// A subset of the k sellers, stored as a bitmask (bit j <=> seller j).
class SellerSet {
 public:
  SellerSet(std::uint32_t bits, int k) : bits_(bits), k_(k) {
    if (k < 1 || k > kMaxSellers) {
      throw DimensionError("seller count k=" + std::to_string(k) +
                           " outside [1, " + std::to_string(kMaxSellers) + "]");
    }
    if (bits >= (std::uint32_t{1} << k)) {
      throw DimensionError("seller set mask " + std::to_string(bits) +
                           " does not fit in k=" + std::to_string(k) + " bits");
    }
  }

  static SellerSet empty(int k) { return SellerSet(0, k); }

  std::uint32_t bits() const noexcept { return bits_; }
  int k() const noexcept { return k_; }
  int size() const noexcept { return std::popcount(bits_); }
  bool is_empty() const noexcept { return bits_ == 0; }
  bool contains(int seller) const noexcept { return (bits_ >> seller) & 1U; }

  friend bool operator==(const SellerSet&, const SellerSet&) = default;
  friend auto operator<=>(const SellerSet&, const SellerSet&) = default;

 private:
  std::uint32_t bits_;
  int k_;
};

inline std::uint32_t set_count(int k) { return std::uint32_t{1} << k; }

// Normalized Hamming distance popcount(a xor b) / k, in [0, 1].
inline double hamming_distance(SellerSet a, SellerSet b) {
  if (a.k() != b.k()) {
    throw DimensionError("hamming_distance: k mismatch (" +
                         std::to_string(a.k()) + " vs " +
                         std::to_string(b.k()) + ")");
  }
  return static_cast<double>(std::popcount(a.bits() ^ b.bits())) / a.k();
}

}  // namespace datamarket
