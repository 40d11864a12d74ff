#include <doctest.h>

#include <algorithm>
#include <set>

#include "rarepat/cnf.hpp"
#include "rarepat/hash.hpp"
#include "rarepat/logic_sim.hpp"
#include "rarepat/rng.hpp"
#include "rarepat/solver.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace rarepat;

namespace {

std::set<std::set<int32_t>> clause_set(const CircuitCnf& cnf) {
  std::set<std::set<int32_t>> out;
  for (const auto& c : cnf.clauses) out.insert({c.begin(), c.end()});
  return out;
}

}  // namespace

TEST_CASE("Tseitin AND matches the textbook clause set") {
  const auto nl =
      Netlist::parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(c)\nc = AND(a,b)\n");
  const auto cnf = encode(nl);
  const int32_t a = static_cast<int32_t>(cnf.var_of_net(nl.net_id("a")));
  const int32_t b = static_cast<int32_t>(cnf.var_of_net(nl.net_id("b")));
  const int32_t c = static_cast<int32_t>(cnf.var_of_net(nl.net_id("c")));
  CHECK(clause_set(cnf) ==
        std::set<std::set<int32_t>>{{-c, a}, {-c, b}, {c, -a, -b}});
}

TEST_CASE("Tseitin NOT matches the textbook clause set") {
  const auto nl = Netlist::parse_bench("INPUT(a)\nOUTPUT(c)\nc = NOT(a)\n");
  const auto cnf = encode(nl);
  const int32_t a = static_cast<int32_t>(cnf.var_of_net(nl.net_id("a")));
  const int32_t c = static_cast<int32_t>(cnf.var_of_net(nl.net_id("c")));
  CHECK(clause_set(cnf) == std::set<std::set<int32_t>>{{c, a}, {-c, -a}});
}

TEST_CASE("c17 encoding has 11 variables and 32 models") {
  const auto nl = Netlist::parse_bench(fixtures::c17_bench());
  const auto cnf = encode(nl);
  CHECK(cnf.n_vars == 11);

  // Every net-variable valuation satisfying all clauses corresponds to one
  // consistent circuit valuation; there are exactly 2^5 of them.
  uint32_t models = 0;
  for (uint32_t v = 0; v < (1u << 11); ++v) {
    bool ok = true;
    for (const auto& clause : cnf.clauses) {
      bool sat = false;
      for (int32_t lit : clause) {
        const uint32_t var = static_cast<uint32_t>(std::abs(lit)) - 1;
        if (((v >> var) & 1) == (lit > 0 ? 1u : 0u)) sat = true;
      }
      if (!sat) {
        ok = false;
        break;
      }
    }
    if (ok) ++models;
  }
  CHECK(models == 32);
}

TEST_CASE("dimacs export is well-formed") {
  const auto nl = Netlist::parse_bench(fixtures::c17_bench());
  const auto cnf = encode(nl);
  const std::string dimacs = cnf.to_dimacs();
  CHECK(dimacs.rfind("p cnf 11 ", 0) == 0);
  CHECK(std::count(dimacs.begin(), dimacs.end(), '\n') ==
        static_cast<long>(cnf.clauses.size()) + 1);
}

TEST_CASE("forced AND output yields the forced model") {
  const auto nl =
      Netlist::parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(c)\nc = AND(a,b)\n");
  const auto cnf = encode(nl);
  Solver solver(cnf);
  const Assumption want{nl.net_id("c"), 1};
  const auto res = solver.solve({&want, 1});
  REQUIRE(res.status == SolveStatus::Sat);
  CHECK(res.model[nl.net_id("a")] == 1);
  CHECK(res.model[nl.net_id("b")] == 1);
}

TEST_CASE("contradictory assumptions are UNSAT") {
  const auto nl = Netlist::parse_bench(
      "INPUT(a)\nOUTPUT(na)\nna = NOT(a)\n");
  const auto cnf = encode(nl);
  Solver solver(cnf);
  const Assumption both[2] = {{nl.net_id("a"), 1}, {nl.net_id("na"), 1}};
  CHECK(solver.solve({both, 2}).status == SolveStatus::Unsat);
}

TEST_CASE("c17 PO assumptions match exhaustive enumeration") {
  const auto nl = Netlist::parse_bench(fixtures::c17_bench());
  const auto cnf = encode(nl);
  Solver solver(cnf);
  for (uint8_t v22 = 0; v22 < 2; ++v22) {
    for (uint8_t v23 = 0; v23 < 2; ++v23) {
      const Assumption a[2] = {{nl.net_id("22"), v22},
                               {nl.net_id("23"), v23}};
      const bool expect = oracle::satisfiable(nl, {a, 2});
      CHECK(solver.solve({a, 2}).sat() == expect);
    }
  }
}

TEST_CASE("random assumption sets agree with the exhaustive oracle") {
  size_t n_calls = 0;
  for (const auto& text :
       {fixtures::c17_bench(), fixtures::trap3_bench(),
        fixtures::mixed_kinds_bench(), fixtures::gated15_bench()}) {
    const auto nl = Netlist::parse_bench(text);
    const auto cnf = encode(nl);
    Solver solver(cnf);
    Rng rng(fnv1a64(text));
    for (int trial = 0; trial < 40; ++trial) {
      const size_t k = 1 + rng.below(5);
      std::vector<Assumption> assumps;
      std::set<NetId> used;
      for (size_t i = 0; i < k; ++i) {
        const NetId net = static_cast<NetId>(rng.below(nl.net_count()));
        if (!used.insert(net).second) continue;
        assumps.push_back({net, static_cast<uint8_t>(rng.below(2))});
      }
      const auto res = solver.solve(assumps);
      const bool expect = oracle::satisfiable(nl, assumps);
      REQUIRE(res.status != SolveStatus::BudgetExceeded);
      CHECK(res.sat() == expect);
      if (res.sat()) {
        // Replay the model through the naive evaluator.
        std::vector<uint8_t> pis(nl.primary_inputs().size());
        for (size_t i = 0; i < pis.size(); ++i)
          pis[i] = res.model[nl.primary_inputs()[i]];
        const auto values = oracle::eval_naive(nl, pis);
        for (const auto& a : assumps) CHECK(values[a.net] == a.value);
      }
      ++n_calls;
    }
  }
  CHECK(n_calls >= 100);
}

TEST_CASE("budget exhaustion is reported distinctly from UNSAT") {
  // XOR triangle: r1 forces a!=b and b!=c, so a==c and r2 (needing a!=c)
  // cannot hold. Refuting it takes search, not just propagation.
  const auto nl = Netlist::parse_bench(fixtures::xor_trap_bench());
  const auto cnf = encode(nl);
  Solver solver(cnf);
  const Assumption both[2] = {{nl.net_id("r1"), 1}, {nl.net_id("r2"), 1}};
  const auto full = solver.solve({both, 2});
  CHECK(full.status == SolveStatus::Unsat);
  CHECK(full.conflicts >= 1);
  CHECK(solver.solve({both, 2}, 0).status == SolveStatus::BudgetExceeded);
}

TEST_CASE("solver is deterministic across repeated calls") {
  const auto nl = Netlist::parse_bench(fixtures::mixed_kinds_bench());
  const auto cnf = encode(nl);
  Solver solver(cnf);
  const Assumption a[2] = {{nl.net_id("z1"), 1}, {nl.net_id("g5"), 0}};
  const auto r1 = solver.solve({a, 2});
  const auto r2 = solver.solve({a, 2});
  REQUIRE(r1.sat());
  CHECK(r1.model == r2.model);
  Solver fresh(cnf);
  CHECK(fresh.solve({a, 2}).model == r1.model);
}

TEST_CASE("n-ary XOR with auxiliaries keeps net semantics") {
  const auto nl = Netlist::parse_bench(
      "INPUT(a)\nINPUT(b)\nINPUT(c)\nINPUT(d)\nOUTPUT(p)\n"
      "p = XNOR(a, b, c, d)\n");
  const auto cnf = encode(nl);
  CHECK(cnf.n_vars > cnf.n_nets);  // chained auxiliaries
  Solver solver(cnf);
  for (uint8_t want = 0; want < 2; ++want) {
    const Assumption a{nl.net_id("p"), want};
    const auto res = solver.solve({&a, 1});
    REQUIRE(res.sat());
    std::vector<uint8_t> pis(nl.primary_inputs().size());
    for (size_t i = 0; i < pis.size(); ++i)
      pis[i] = res.model[nl.primary_inputs()[i]];
    CHECK(oracle::eval_naive(nl, pis)[nl.net_id("p")] == want);
  }
}
