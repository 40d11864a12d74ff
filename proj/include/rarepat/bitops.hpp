#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rarepat {

/// Dense bit-vector helpers shared by the simulator, the compatibility
/// matrix, and agent states. A BitVec of n bits occupies words_for(n)
/// uint64 words; bits past n are kept at zero.
using BitVec = std::vector<uint64_t>;

namespace bits {

inline size_t words_for(size_t n_bits) { return (n_bits + 63) / 64; }

inline BitVec make(size_t n_bits) { return BitVec(words_for(n_bits), 0); }

inline bool get(std::span<const uint64_t> v, size_t i) {
  return (v[i >> 6] >> (i & 63)) & 1;
}

inline void set(std::span<uint64_t> v, size_t i, bool value = true) {
  if (value)
    v[i >> 6] |= uint64_t{1} << (i & 63);
  else
    v[i >> 6] &= ~(uint64_t{1} << (i & 63));
}

inline size_t popcount(std::span<const uint64_t> v) {
  size_t n = 0;
  for (uint64_t w : v) n += static_cast<size_t>(std::popcount(w));
  return n;
}

inline bool any(std::span<const uint64_t> v) {
  for (uint64_t w : v)
    if (w) return true;
  return false;
}

/// Mask clearing bits at positions >= n_bits in the last word.
inline uint64_t tail_mask(size_t n_bits) {
  const size_t rem = n_bits & 63;
  return rem == 0 ? ~uint64_t{0} : (uint64_t{1} << rem) - 1;
}

inline void clear_tail(std::span<uint64_t> v, size_t n_bits) {
  if (!v.empty()) v.back() &= tail_mask(n_bits);
}

/// Index of the k-th set bit (k zero-based); n_bits(v) must exceed k set bits.
inline size_t nth_set(std::span<const uint64_t> v, size_t k) {
  for (size_t w = 0; w < v.size(); ++w) {
    uint64_t word = v[w];
    const size_t c = static_cast<size_t>(std::popcount(word));
    if (k >= c) {
      k -= c;
      continue;
    }
    while (true) {
      const int b = std::countr_zero(word);
      if (k == 0) return w * 64 + static_cast<size_t>(b);
      word &= word - 1;
      --k;
    }
  }
  return static_cast<size_t>(-1);
}

template <typename Fn>
inline void for_each_set(std::span<const uint64_t> v, Fn&& fn) {
  for (size_t w = 0; w < v.size(); ++w) {
    uint64_t word = v[w];
    while (word) {
      const int b = std::countr_zero(word);
      fn(w * 64 + static_cast<size_t>(b));
      word &= word - 1;
    }
  }
}

inline std::vector<uint32_t> to_indices(std::span<const uint64_t> v) {
  std::vector<uint32_t> out;
  for_each_set(v, [&](size_t i) { out.push_back(static_cast<uint32_t>(i)); });
  return out;
}

}  // namespace bits
}  // namespace rarepat
