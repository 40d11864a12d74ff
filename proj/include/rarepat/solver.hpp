#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rarepat/cnf.hpp"

namespace rarepat {

enum class SolveStatus { Sat, Unsat, BudgetExceeded };

struct SolveResult {
  SolveStatus status;
  std::vector<uint8_t> model;  // per-variable values, valid when Sat
  uint64_t conflicts = 0;

  bool sat() const { return status == SolveStatus::Sat; }
};

/// Complete CDCL decision procedure with assumption support.
///
/// Deterministic by construction: VSIDS ties break toward the lowest
/// variable index and no randomized heuristics are used, so identical
/// inputs give identical models run to run. Each solve() call starts from
/// a clean state (no learnt clauses are carried across calls).
class Solver {
 public:
  static constexpr uint64_t kDefaultBudget = 1'000'000;

  explicit Solver(const CircuitCnf& cnf);

  SolveResult solve(std::span<const Assumption> assumptions,
                    uint64_t conflict_budget = kDefaultBudget);
  SolveResult solve() { return solve({}); }

  uint32_t n_vars() const { return n_vars_; }

 private:
  using Lit = int32_t;  // 2*var + (negated ? 1 : 0)

  static Lit make_lit(uint32_t var, bool positive) {
    return static_cast<Lit>(2 * var + (positive ? 0 : 1));
  }
  static uint32_t lit_var(Lit l) { return static_cast<uint32_t>(l) >> 1; }

  int lit_value(Lit l) const {
    const int8_t v = value_[lit_var(l)];
    return v < 0 ? -1 : (v ^ (l & 1));
  }

  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  void enqueue(Lit l, int32_t reason);
  int32_t propagate();
  void analyze(int32_t confl, std::vector<Lit>& learnt, int& bt_level);
  void cancel_until(int level);
  int pick_branch_var() const;
  void bump(uint32_t var);
  void prepare();
  int32_t attach_clause(const std::vector<Lit>& lits);

  uint32_t n_vars_ = 0;
  bool trivially_unsat_ = false;
  std::vector<std::vector<Lit>> problem_;  // normalized problem clauses

  // Per-call search state. Clauses live in a flat arena: [size, lits...].
  std::vector<int32_t> arena_;
  size_t problem_arena_size_ = 0;
  std::vector<int32_t> problem_refs_;
  std::vector<std::vector<int32_t>> watches_;
  std::vector<int8_t> value_;
  std::vector<int8_t> phase_;
  std::vector<int32_t> level_;
  std::vector<int32_t> reason_;
  std::vector<Lit> trail_;
  std::vector<size_t> trail_lim_;
  size_t qhead_ = 0;
  std::vector<double> activity_;
  double var_inc_ = 1.0;
  std::vector<char> seen_;
};

/// Assumption list pinning every net of `members` (indices into the rare
/// table) to its rare value.
std::vector<Assumption> rare_value_assumptions(
    const std::vector<struct RareNet>& entries,
    std::span<const uint32_t> members);

}  // namespace rarepat
