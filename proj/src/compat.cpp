#include "rarepat/compat.hpp"

#include <atomic>
#include <cstring>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "rarepat/hash.hpp"
#include "rarepat/solver.hpp"

namespace rarepat {

namespace {

constexpr char kMagic[4] = {'R', 'P', 'C', 'M'};
constexpr uint32_t kVersion = 1;

enum PairState : uint8_t { kIncompatible = 0, kCompatible = 1, kUnknown = 2 };

size_t tri_index(uint32_t i, uint32_t j, uint32_t n) {
  // i < j; row-major upper triangle without the diagonal.
  return static_cast<size_t>(i) * n - static_cast<size_t>(i) * (i + 1) / 2 +
         (j - i - 1);
}

template <typename T>
void write_raw(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_raw(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace

void CompatMatrix::finalize_rows(const std::vector<uint8_t>& pair_state) {
  row_words_ = bits::words_for(n_);
  rows_.assign(static_cast<size_t>(n_) * row_words_, 0);
  unknown_.assign(static_cast<size_t>(n_) * row_words_, 0);
  n_compatible_ = n_incompatible_ = n_unknown_ = 0;
  for (uint32_t i = 0; i < n_; ++i) {
    for (uint32_t j = i + 1; j < n_; ++j) {
      const uint8_t s = pair_state[tri_index(i, j, n_)];
      if (s == kCompatible) {
        bits::set({rows_.data() + i * row_words_, row_words_}, j);
        bits::set({rows_.data() + j * row_words_, row_words_}, i);
        ++n_compatible_;
      } else if (s == kUnknown) {
        bits::set({unknown_.data() + i * row_words_, row_words_}, j);
        bits::set({unknown_.data() + j * row_words_, row_words_}, i);
        ++n_unknown_;
      } else {
        ++n_incompatible_;
      }
    }
  }
  diag_words_ = bits::make(n_);
  for (uint32_t i = 0; i < n_; ++i)
    if (diag_[i]) bits::set(diag_words_, i);
}

CompatMatrix CompatMatrix::build(const CircuitCnf& cnf,
                                 const RareNetTable& rare,
                                 const BuildOptions& options) {
  CompatMatrix m;
  m.n_ = static_cast<uint32_t>(rare.size());
  m.circuit_hash = cnf.circuit_hash;
  m.rare_hash = rare.table_hash();
  m.theta = rare.threshold;
  m.diag_.assign(m.n_, 0);

  const size_t n_pairs =
      static_cast<size_t>(m.n_) * (m.n_ > 0 ? m.n_ - 1 : 0) / 2;
  std::vector<uint8_t> pair_state(n_pairs, kIncompatible);
  std::vector<uint8_t> diag_unknown(m.n_, 0);

  // Work items: diagonal entries first (ids 0..n-1), then pairs by
  // triangular index. Results land in index-addressed slots, so the
  // outcome does not depend on worker count or scheduling.
  const size_t n_items = m.n_ + n_pairs;
  std::atomic<size_t> next_item{0};

  auto work = [&]() {
    Solver solver(cnf);
    while (true) {
      const size_t item = next_item.fetch_add(1);
      if (item >= n_items) break;
      if (item < m.n_) {
        const uint32_t i = static_cast<uint32_t>(item);
        const Assumption a{rare.entries[i].net, rare.entries[i].rare_value};
        const SolveResult r = solver.solve({&a, 1}, options.conflict_budget);
        if (r.status == SolveStatus::Sat)
          m.diag_[i] = 1;
        else if (r.status == SolveStatus::BudgetExceeded)
          diag_unknown[i] = 1;
      } else {
        // Invert the triangular index.
        size_t k = item - m.n_;
        uint32_t i = 0;
        size_t row_len = m.n_ - 1;
        while (k >= row_len) {
          k -= row_len;
          --row_len;
          ++i;
        }
        const uint32_t j = i + 1 + static_cast<uint32_t>(k);
        const Assumption a[2] = {
            {rare.entries[i].net, rare.entries[i].rare_value},
            {rare.entries[j].net, rare.entries[j].rare_value}};
        const SolveResult r = solver.solve({a, 2}, options.conflict_budget);
        const size_t slot = tri_index(i, j, m.n_);
        if (r.status == SolveStatus::Sat)
          pair_state[slot] = kCompatible;
        else if (r.status == SolveStatus::BudgetExceeded)
          pair_state[slot] = kUnknown;
      }
    }
  };

  const int n_threads = std::max(1, options.workers);
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  m.finalize_rows(pair_state);
  return m;
}

CompatMatrix CompatMatrix::synthetic(
    uint32_t n, std::span<const std::pair<uint32_t, uint32_t>> incompatible,
    std::span<const uint32_t> unsat_diag) {
  CompatMatrix m;
  m.n_ = n;
  m.diag_.assign(n, 1);
  for (uint32_t i : unsat_diag) m.diag_[i] = 0;
  const size_t n_pairs = static_cast<size_t>(n) * (n > 0 ? n - 1 : 0) / 2;
  std::vector<uint8_t> pair_state(n_pairs, kCompatible);
  for (auto [a, b] : incompatible) {
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    pair_state[tri_index(a, b, n)] = kIncompatible;
  }
  m.finalize_rows(pair_state);
  return m;
}

bool CompatMatrix::pair(uint32_t i, uint32_t j) const {
  if (i == j) return diag(i);
  return bits::get(row(i), j);
}

bool CompatMatrix::unknown_pair(uint32_t i, uint32_t j) const {
  if (i == j) return false;
  return bits::get(
      {unknown_.data() + static_cast<size_t>(i) * row_words_, row_words_}, j);
}

void CompatMatrix::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(kMagic, 4);
  write_raw(out, kVersion);
  write_raw(out, circuit_hash);
  write_raw(out, rare_hash);
  write_raw(out, theta);
  write_raw(out, n_);

  out.write(reinterpret_cast<const char*>(diag_.data()),
            static_cast<std::streamsize>(diag_.size()));

  // Packed upper triangle, compatibility then unknown markers.
  const size_t n_pairs =
      static_cast<size_t>(n_) * (n_ > 0 ? n_ - 1 : 0) / 2;
  for (const auto* source : {&rows_, &unknown_}) {
    BitVec tri(bits::words_for(n_pairs), 0);
    size_t k = 0;
    for (uint32_t i = 0; i < n_; ++i)
      for (uint32_t j = i + 1; j < n_; ++j, ++k)
        if (bits::get({source->data() + i * row_words_, row_words_}, j))
          bits::set(tri, k);
    out.write(reinterpret_cast<const char*>(tri.data()),
              static_cast<std::streamsize>(tri.size() * sizeof(uint64_t)));
  }
  if (!out) throw IoError("failed writing " + path.string());
}

CompatMatrix CompatMatrix::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw ParseError(path.string() + ": not a compatibility matrix file");
  uint32_t version;
  read_raw(in, version);
  if (version != kVersion)
    throw ParseError(path.string() + ": unsupported matrix version " +
                     std::to_string(version));

  CompatMatrix m;
  read_raw(in, m.circuit_hash);
  read_raw(in, m.rare_hash);
  read_raw(in, m.theta);
  read_raw(in, m.n_);
  m.diag_.resize(m.n_);
  in.read(reinterpret_cast<char*>(m.diag_.data()),
          static_cast<std::streamsize>(m.n_));

  const size_t n_pairs =
      static_cast<size_t>(m.n_) * (m.n_ > 0 ? m.n_ - 1 : 0) / 2;
  std::vector<uint8_t> pair_state(n_pairs, kIncompatible);
  for (int pass = 0; pass < 2; ++pass) {
    BitVec tri(bits::words_for(n_pairs), 0);
    in.read(reinterpret_cast<char*>(tri.data()),
            static_cast<std::streamsize>(tri.size() * sizeof(uint64_t)));
    for (size_t k = 0; k < n_pairs; ++k)
      if (bits::get(tri, k)) pair_state[k] = pass == 0 ? kCompatible : kUnknown;
  }
  if (!in) throw ParseError(path.string() + ": truncated matrix file");
  m.finalize_rows(pair_state);
  return m;
}

nlohmann::json CompatMatrix::summary_json() const {
  nlohmann::json j;
  j["n_rare_nets"] = n_;
  j["compatible_pairs"] = n_compatible_;
  j["incompatible_pairs"] = n_incompatible_;
  j["unknown_pairs"] = n_unknown_;
  uint64_t diag_sat = 0;
  for (uint8_t d : diag_) diag_sat += d;
  j["diag_satisfiable"] = diag_sat;
  j["circuit_hash"] = hash_hex(circuit_hash);
  j["rare_table_hash"] = hash_hex(rare_hash);
  j["threshold"] = theta;
  return j;
}

BitVec masked_actions(const CompatMatrix& matrix,
                      std::span<const uint64_t> state) {
  const uint32_t n = matrix.size();
  if (state.size() != bits::words_for(n) ||
      (!state.empty() && (state.back() & ~bits::tail_mask(n)) != 0))
    throw ValidationError("state width does not match matrix size");
  BitVec mask(matrix.diag_bits().begin(), matrix.diag_bits().end());
  for (size_t w = 0; w < mask.size(); ++w) mask[w] &= ~state[w];
  bits::for_each_set(state, [&](size_t j) {
    const auto row = matrix.row(static_cast<uint32_t>(j));
    for (size_t w = 0; w < mask.size(); ++w) mask[w] &= row[w];
  });
  bits::clear_tail(mask, n);
  return mask;
}

}  // namespace rarepat
