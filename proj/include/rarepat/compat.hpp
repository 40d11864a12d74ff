#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "rarepat/bitops.hpp"
#include "rarepat/cnf.hpp"
#include "rarepat/logic_sim.hpp"

#include <nlohmann/json_fwd.hpp>

namespace rarepat {

/// Symmetric pairwise-compatibility matrix over the rare nets.
///
/// Entry (i, j) is true iff the rare values of entries i and j are jointly
/// satisfiable. Pairwise compatibility is necessary but NOT sufficient for
/// joint satisfiability of larger sets; certification of whole sets goes
/// through the SAT port, never through this matrix.
class CompatMatrix {
 public:
  struct BuildOptions {
    int workers = 1;
    uint64_t conflict_budget = 1'000'000;
  };

  static CompatMatrix build(const CircuitCnf& cnf, const RareNetTable& rare,
                            const BuildOptions& options);
  static CompatMatrix build(const CircuitCnf& cnf, const RareNetTable& rare) {
    return build(cnf, rare, BuildOptions{});
  }

  /// Construct directly from pair data (toy instances, tests). All
  /// diagonal entries are satisfiable unless listed in unsat_diag.
  static CompatMatrix synthetic(
      uint32_t n, std::span<const std::pair<uint32_t, uint32_t>> incompatible,
      std::span<const uint32_t> unsat_diag = {});

  uint32_t size() const { return n_; }
  bool pair(uint32_t i, uint32_t j) const;
  bool unknown_pair(uint32_t i, uint32_t j) const;
  bool diag(uint32_t i) const { return diag_[i] != 0; }

  std::span<const uint64_t> row(uint32_t i) const {
    return {rows_.data() + static_cast<size_t>(i) * row_words_, row_words_};
  }
  std::span<const uint64_t> diag_bits() const { return diag_words_; }

  uint64_t compatible_pairs() const { return n_compatible_; }
  uint64_t incompatible_pairs() const { return n_incompatible_; }
  uint64_t unknown_pairs() const { return n_unknown_; }

  uint64_t circuit_hash = 0;
  uint64_t rare_hash = 0;
  double theta = 0.0;

  void save(const std::filesystem::path& path) const;
  static CompatMatrix load(const std::filesystem::path& path);
  nlohmann::json summary_json() const;

 private:
  CompatMatrix() = default;
  void finalize_rows(const std::vector<uint8_t>& pair_state);

  uint32_t n_ = 0;
  size_t row_words_ = 0;
  std::vector<uint64_t> rows_;       // n * row_words_, symmetric
  std::vector<uint64_t> unknown_;    // same layout; UNKNOWN pair markers
  std::vector<uint8_t> diag_;
  BitVec diag_words_;
  uint64_t n_compatible_ = 0;
  uint64_t n_incompatible_ = 0;
  uint64_t n_unknown_ = 0;
};

/// Bit-vector of actions permitted in `state`: i is permitted iff i is not
/// in the state, its rare value alone is satisfiable, and it is pairwise
/// compatible with every member. All-zero result signals episode end.
BitVec masked_actions(const CompatMatrix& matrix,
                      std::span<const uint64_t> state);

}  // namespace rarepat
