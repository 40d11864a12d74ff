#include "rarepat/solver.hpp"

#include <algorithm>

#include "rarepat/logic_sim.hpp"

namespace rarepat {

Solver::Solver(const CircuitCnf& cnf) : n_vars_(cnf.n_vars) {
  problem_.reserve(cnf.clauses.size());
  std::vector<Lit> lits;
  for (const auto& clause : cnf.clauses) {
    lits.clear();
    for (int32_t dimacs : clause) {
      const uint32_t var = static_cast<uint32_t>(std::abs(dimacs)) - 1;
      lits.push_back(make_lit(var, dimacs > 0));
    }
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    bool tautology = false;
    for (size_t i = 0; i + 1 < lits.size(); ++i)
      if ((lits[i] ^ lits[i + 1]) == 1) tautology = true;
    if (tautology) continue;
    if (lits.empty()) trivially_unsat_ = true;
    problem_.push_back(lits);
  }

  watches_.resize(2 * n_vars_);
  value_.assign(n_vars_, -1);
  phase_.assign(n_vars_, 0);
  level_.assign(n_vars_, 0);
  reason_.assign(n_vars_, -1);
  activity_.assign(n_vars_, 0.0);
  seen_.assign(n_vars_, 0);

  // Lay the problem clauses into the arena once; learnts are appended per
  // call and truncated by prepare().
  for (const auto& clause : problem_) {
    problem_refs_.push_back(static_cast<int32_t>(arena_.size()));
    arena_.push_back(static_cast<int32_t>(clause.size()));
    for (Lit l : clause) arena_.push_back(l);
  }
  problem_arena_size_ = arena_.size();
}

void Solver::prepare() {
  arena_.resize(problem_arena_size_);
  for (auto& w : watches_) w.clear();
  std::fill(value_.begin(), value_.end(), int8_t{-1});
  std::fill(reason_.begin(), reason_.end(), -1);
  std::fill(activity_.begin(), activity_.end(), 0.0);
  var_inc_ = 1.0;
  trail_.clear();
  trail_lim_.clear();
  qhead_ = 0;
  for (int32_t ref : problem_refs_) {
    const int32_t size = arena_[ref];
    if (size >= 2) {
      watches_[arena_[ref + 1]].push_back(ref);
      watches_[arena_[ref + 2]].push_back(ref);
    }
  }
}

void Solver::enqueue(Lit l, int32_t reason) {
  const uint32_t v = lit_var(l);
  value_[v] = static_cast<int8_t>(1 ^ (l & 1));
  level_[v] = decision_level();
  reason_[v] = reason;
  trail_.push_back(l);
}

int32_t Solver::propagate() {
  while (qhead_ < trail_.size()) {
    const Lit p = trail_[qhead_++];
    const Lit false_lit = p ^ 1;
    auto& ws = watches_[false_lit];
    size_t i = 0, j = 0;
    while (i < ws.size()) {
      const int32_t ref = ws[i++];
      int32_t* lits = &arena_[ref + 1];
      const int32_t size = arena_[ref];
      if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
      if (lit_value(lits[0]) == 1) {
        ws[j++] = ref;
        continue;
      }
      bool moved = false;
      for (int32_t k = 2; k < size; ++k) {
        if (lit_value(lits[k]) != 0) {
          std::swap(lits[1], lits[k]);
          watches_[lits[1]].push_back(ref);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = ref;
      if (lit_value(lits[0]) == 0) {
        while (i < ws.size()) ws[j++] = ws[i++];
        ws.resize(j);
        qhead_ = trail_.size();
        return ref;
      }
      enqueue(lits[0], ref);
    }
    ws.resize(j);
  }
  return -1;
}

void Solver::bump(uint32_t var) {
  activity_[var] += var_inc_;
  if (activity_[var] > 1e100) {
    for (double& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
}

void Solver::analyze(int32_t confl, std::vector<Lit>& learnt, int& bt_level) {
  learnt.clear();
  learnt.push_back(0);  // slot for the asserting literal
  int path = 0;
  Lit p = -1;
  size_t index = trail_.size();

  do {
    const int32_t* lits = &arena_[confl + 1];
    const int32_t size = arena_[confl];
    for (int32_t k = (p == -1) ? 0 : 1; k < size; ++k) {
      const Lit q = lits[k];
      const uint32_t v = lit_var(q);
      if (!seen_[v] && level_[v] > 0) {
        seen_[v] = 1;
        bump(v);
        if (level_[v] == decision_level())
          ++path;
        else
          learnt.push_back(q);
      }
    }
    while (!seen_[lit_var(trail_[--index])]) {
    }
    p = trail_[index];
    confl = reason_[lit_var(p)];
    seen_[lit_var(p)] = 0;
    --path;
  } while (path > 0);
  learnt[0] = p ^ 1;

  if (learnt.size() == 1) {
    bt_level = 0;
  } else {
    size_t max_i = 1;
    for (size_t k = 2; k < learnt.size(); ++k)
      if (level_[lit_var(learnt[k])] > level_[lit_var(learnt[max_i])])
        max_i = k;
    std::swap(learnt[1], learnt[max_i]);
    bt_level = level_[lit_var(learnt[1])];
  }
  for (Lit l : learnt) seen_[lit_var(l)] = 0;
  var_inc_ /= 0.95;
}

void Solver::cancel_until(int level) {
  if (decision_level() <= level) return;
  const size_t bound = trail_lim_[level];
  for (size_t k = trail_.size(); k > bound; --k) {
    const Lit l = trail_[k - 1];
    const uint32_t v = lit_var(l);
    phase_[v] = value_[v];
    value_[v] = -1;
    reason_[v] = -1;
  }
  trail_.resize(bound);
  trail_lim_.resize(level);
  qhead_ = bound;
}

int Solver::pick_branch_var() const {
  int best = -1;
  double best_act = -1.0;
  for (uint32_t v = 0; v < n_vars_; ++v) {
    if (value_[v] < 0 && activity_[v] > best_act) {
      best = static_cast<int>(v);
      best_act = activity_[v];
    }
  }
  return best;
}

int32_t Solver::attach_clause(const std::vector<Lit>& lits) {
  const int32_t ref = static_cast<int32_t>(arena_.size());
  arena_.push_back(static_cast<int32_t>(lits.size()));
  for (Lit l : lits) arena_.push_back(l);
  if (lits.size() >= 2) {
    watches_[lits[0]].push_back(ref);
    watches_[lits[1]].push_back(ref);
  }
  return ref;
}

SolveResult Solver::solve(std::span<const Assumption> assumptions,
                          uint64_t conflict_budget) {
  SolveResult res;
  res.status = SolveStatus::Unsat;
  if (trivially_unsat_) return res;
  prepare();

  std::vector<Lit> assumps;
  assumps.reserve(assumptions.size());
  for (const Assumption& a : assumptions) {
    if (a.net >= n_vars_)
      throw ValidationError("assumption references unknown net " +
                            std::to_string(a.net));
    assumps.push_back(make_lit(a.net, a.value != 0));
  }

  // Level-0 units.
  for (int32_t ref : problem_refs_) {
    if (arena_[ref] == 1) {
      const Lit l = arena_[ref + 1];
      if (lit_value(l) == 0) return res;
      if (lit_value(l) == -1) enqueue(l, -1);
    }
  }

  uint64_t conflicts = 0;
  uint64_t since_restart = 0;
  uint64_t restart_limit = 100;
  std::vector<Lit> learnt;

  while (true) {
    const int32_t confl = propagate();
    if (confl >= 0) {
      ++conflicts;
      ++since_restart;
      if (decision_level() == 0) {
        res.conflicts = conflicts;
        return res;
      }
      if (conflicts > conflict_budget) {
        res.status = SolveStatus::BudgetExceeded;
        res.conflicts = conflicts;
        return res;
      }
      int bt_level;
      analyze(confl, learnt, bt_level);
      cancel_until(bt_level);
      if (learnt.size() == 1) {
        enqueue(learnt[0], -1);
      } else {
        const int32_t ref = attach_clause(learnt);
        enqueue(learnt[0], ref);
      }
      continue;
    }

    if (since_restart >= restart_limit) {
      since_restart = 0;
      restart_limit = restart_limit * 3 / 2 + 16;
      cancel_until(0);
      continue;
    }

    Lit next = -1;
    bool unsat_assumption = false;
    while (decision_level() < static_cast<int>(assumps.size())) {
      const Lit p = assumps[static_cast<size_t>(decision_level())];
      const int v = lit_value(p);
      if (v == 1) {
        trail_lim_.push_back(trail_.size());  // vacuous level
      } else if (v == 0) {
        unsat_assumption = true;
        break;
      } else {
        next = p;
        break;
      }
    }
    if (unsat_assumption) {
      res.conflicts = conflicts;
      return res;
    }
    if (next == -1) {
      const int v = pick_branch_var();
      if (v < 0) {
        res.status = SolveStatus::Sat;
        res.conflicts = conflicts;
        res.model.resize(n_vars_);
        for (uint32_t k = 0; k < n_vars_; ++k)
          res.model[k] = static_cast<uint8_t>(value_[k]);
        cancel_until(0);
        return res;
      }
      next = make_lit(static_cast<uint32_t>(v), phase_[v] != 0);
    }
    trail_lim_.push_back(trail_.size());
    enqueue(next, -1);
  }
}

std::vector<Assumption> rare_value_assumptions(
    const std::vector<RareNet>& entries, std::span<const uint32_t> members) {
  std::vector<Assumption> out;
  out.reserve(members.size());
  for (uint32_t idx : members)
    out.push_back({entries[idx].net, entries[idx].rare_value});
  return out;
}

}  // namespace rarepat
