#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rarepat/bitops.hpp"
#include "rarepat/netlist.hpp"
#include "rarepat/rng.hpp"

#include <nlohmann/json_fwd.hpp>

namespace rarepat {

using Word = uint64_t;

/// A batch of input patterns packed 64 per word: pattern i occupies bit
/// (i % 64) of word (i / 64) on every primary input.
struct PatternBlock {
  uint32_t n_patterns = 0;
  std::vector<std::vector<Word>> pi_bits;  // [pi position][word]

  size_t n_words() const { return bits::words_for(n_patterns); }

  static PatternBlock random(size_t n_pis, uint32_t n_patterns, Rng& rng);
  static PatternBlock exhaustive(size_t n_pis);  // n_pis <= 20
  static PatternBlock single(std::span<const uint8_t> pi_values);
  /// Pack a list of per-PI value rows (each row one pattern).
  static PatternBlock pack(const std::vector<std::vector<uint8_t>>& patterns,
                           size_t n_pis);
};

struct SimResult {
  uint32_t n_patterns = 0;
  std::vector<std::vector<Word>> net_bits;  // [net][word]

  bool bit(NetId net, uint32_t pattern) const {
    return (net_bits[net][pattern >> 6] >> (pattern & 63)) & 1;
  }
};

/// Bit-parallel evaluation of every net for every pattern in the block.
SimResult simulate(const Netlist& netlist, const PatternBlock& block);

struct NetProbabilities {
  std::vector<double> p_one;  // probability of logic-1 per net
  uint64_t sample_count = 0;
  uint64_t seed = 0;
  bool exhaustive = false;
};

/// Monte-Carlo estimate from uniform random PI patterns. Samples are drawn
/// in fixed 4096-pattern blocks seeded by block index, so the result is
/// independent of worker count.
NetProbabilities estimate_probabilities(const Netlist& netlist,
                                        uint64_t n_samples, uint64_t seed,
                                        int workers = 1);

/// Exact probabilities by full input enumeration; requires <= 20 PIs.
NetProbabilities exact_probabilities(const Netlist& netlist);

/// exact_probabilities when the input space has at most 2^20 points,
/// otherwise estimate_probabilities.
NetProbabilities profile_probabilities(const Netlist& netlist,
                                       uint64_t n_samples, uint64_t seed,
                                       int workers = 1);

struct RareNet {
  NetId net;
  uint8_t rare_value;  // the minority value
  double probability;  // probability of the rare value
};

struct RareNetTable {
  std::vector<RareNet> entries;  // sorted ascending by net index
  double threshold = 0.0;
  uint64_t sample_count = 0;
  uint64_t seed = 0;
  bool exhaustive = false;
  uint64_t circuit_hash = 0;
  uint32_t constant_nets_skipped = 0;

  size_t size() const { return entries.size(); }

  std::string to_text() const;
  static RareNetTable from_text(std::string_view text);
  nlohmann::json to_json() const;
  static RareNetTable from_json(const nlohmann::json& j);

  /// Hash over the canonical text form; used to pin downstream artifacts.
  uint64_t table_hash() const;
};

/// Selects nets whose minority-value probability is <= threshold.
/// Constant nets (probability exactly 0 or 1) are skipped and counted.
RareNetTable extract_rare_nets(const Netlist& netlist,
                               const NetProbabilities& probs,
                               double threshold);

}  // namespace rarepat
