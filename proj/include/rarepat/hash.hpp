#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace rarepat {

/// FNV-1a 64-bit. Used for artifact staleness checks, not security.
inline uint64_t fnv1a64(std::string_view data) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hash_hex(uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

inline uint64_t parse_hash_hex(std::string_view s) {
  uint64_t h = 0;
  for (char c : s) {
    h <<= 4;
    if (c >= '0' && c <= '9')
      h |= static_cast<uint64_t>(c - '0');
    else if (c >= 'a' && c <= 'f')
      h |= static_cast<uint64_t>(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F')
      h |= static_cast<uint64_t>(c - 'A' + 10);
  }
  return h;
}

}  // namespace rarepat
