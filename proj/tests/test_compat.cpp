#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "rarepat/compat.hpp"
#include "rarepat/solver.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace rarepat;

namespace {

RareNetTable profile_table(const Netlist& nl, double theta) {
  return extract_rare_nets(nl, exact_probabilities(nl), theta);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("AND vs NOR rare values are pairwise incompatible") {
  const auto nl = Netlist::parse_bench(
      "INPUT(a)\nINPUT(b)\nOUTPUT(c)\nOUTPUT(d)\n"
      "c = AND(a, b)\nd = NOR(a, b)\n");
  const auto rare = profile_table(nl, 0.25);
  REQUIRE(rare.size() == 2);  // c=1 (p 1/4), d=1 (p 1/4)
  const auto cnf = encode(nl);
  const auto m = CompatMatrix::build(cnf, rare);
  CHECK(m.diag(0));
  CHECK(m.diag(1));
  CHECK_FALSE(m.pair(0, 1));
  CHECK(m.incompatible_pairs() == 1);
}

TEST_CASE("disjoint-cone rare nets are compatible") {
  const auto nl = Netlist::parse_bench(
      "INPUT(a)\nINPUT(b)\nINPUT(c)\nINPUT(d)\nOUTPUT(x)\nOUTPUT(y)\n"
      "x = AND(a, b)\ny = AND(c, d)\n");
  const auto rare = profile_table(nl, 0.25);
  REQUIRE(rare.size() == 2);
  const auto m = CompatMatrix::build(encode(nl), rare);
  CHECK(m.pair(0, 1));
  CHECK(m.pair(1, 0));  // symmetry
}

TEST_CASE("matrix equals exhaustive enumeration on small fixtures") {
  struct Case {
    std::string text;
    double theta;
  };
  for (const auto& c : {Case{fixtures::c17_bench(), 0.4},
                        Case{fixtures::trap3_bench(), 0.25},
                        Case{fixtures::gated15_bench(), 0.15}}) {
    const auto nl = Netlist::parse_bench(c.text);
    const auto rare = profile_table(nl, c.theta);
    REQUIRE(rare.size() >= 3);
    const auto m = CompatMatrix::build(encode(nl), rare);
    const auto ref = oracle::exact_pairwise(nl, rare);
    for (uint32_t i = 0; i < m.size(); ++i) {
      CHECK(m.diag(i) == ref[i][i]);
      for (uint32_t j = 0; j < m.size(); ++j)
        if (i != j) CHECK(m.pair(i, j) == ref[i][j]);
    }
  }
}

TEST_CASE("c17 at theta 0.4 has at least four rare nets") {
  const auto nl = Netlist::parse_bench(fixtures::c17_bench());
  CHECK(profile_table(nl, 0.4).size() >= 4);
}

TEST_CASE("build is independent of worker count") {
  const auto nl = Netlist::parse_bench(fixtures::gated15_bench());
  const auto rare = profile_table(nl, 0.15);
  const auto cnf = encode(nl);
  const auto m1 = CompatMatrix::build(cnf, rare, {.workers = 1});
  const auto m4 = CompatMatrix::build(cnf, rare, {.workers = 4});
  for (uint32_t i = 0; i < m1.size(); ++i) {
    CHECK(m1.diag(i) == m4.diag(i));
    for (uint32_t j = 0; j < m1.size(); ++j)
      CHECK(m1.pair(i, j) == m4.pair(i, j));
  }
}

TEST_CASE("pairwise-compatible triple can be jointly unsatisfiable") {
  const auto nl = Netlist::parse_bench(fixtures::trap3_bench());
  const auto rare = profile_table(nl, 0.25);
  REQUIRE(rare.size() == 3);
  const auto cnf = encode(nl);
  const auto m = CompatMatrix::build(cnf, rare);
  CHECK(m.pair(0, 1));
  CHECK(m.pair(0, 2));
  CHECK(m.pair(1, 2));

  Solver solver(cnf);
  const uint32_t all[3] = {0, 1, 2};
  const auto assumps = rare_value_assumptions(rare.entries, {all, 3});
  CHECK(solver.solve(assumps).status == SolveStatus::Unsat);
}

TEST_CASE("budget overruns become UNKNOWN pairs masked as incompatible") {
  const auto nl = Netlist::parse_bench(fixtures::xor_trap_bench());
  const auto rare = profile_table(nl, 0.25);
  REQUIRE(rare.size() == 2);
  const auto m =
      CompatMatrix::build(encode(nl), rare, {.conflict_budget = 0});
  CHECK(m.unknown_pairs() == 1);
  CHECK(m.unknown_pair(0, 1));
  CHECK_FALSE(m.pair(0, 1));  // conservative masking

  BitVec state = bits::make(2);
  bits::set(state, 0);
  const auto mask = masked_actions(m, state);
  CHECK_FALSE(bits::get(mask, 1));
}

TEST_CASE("masked_actions follows the permitted-action definition") {
  // 0-1-2 form a clique; 3 is incompatible with 1; 4 has an unsat diag.
  const std::pair<uint32_t, uint32_t> bad[] = {{1, 3}};
  const uint32_t dead[] = {4};
  const auto m = CompatMatrix::synthetic(5, bad, dead);

  BitVec state = bits::make(5);
  bits::set(state, 0);
  auto mask = masked_actions(m, state);
  CHECK_FALSE(bits::get(mask, 0));  // already a member
  CHECK(bits::get(mask, 1));
  CHECK(bits::get(mask, 2));
  CHECK(bits::get(mask, 3));
  CHECK_FALSE(bits::get(mask, 4));  // diag unsatisfiable

  bits::set(state, 1);
  mask = masked_actions(m, state);
  CHECK_FALSE(bits::get(mask, 3));  // incompatible with member 1
  CHECK(bits::get(mask, 2));

  // All-true matrix: permitted set is the complement of the state.
  const auto all_true = CompatMatrix::synthetic(5, {});
  mask = masked_actions(all_true, state);
  CHECK(bits::popcount(mask) == 3);
  CHECK_FALSE(bits::get(mask, 0));
  CHECK_FALSE(bits::get(mask, 1));

  BitVec wrong = bits::make(100);
  CHECK_THROWS_AS(masked_actions(m, wrong), ValidationError);
  BitVec high = bits::make(5);
  bits::set(high, 7);  // same word count, bit beyond the matrix size
  CHECK_THROWS_AS(masked_actions(m, high), ValidationError);
}

TEST_CASE("masking soundness against the transition definition") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const uint32_t n = 10;
    std::vector<std::pair<uint32_t, uint32_t>> bad;
    for (uint32_t i = 0; i < n; ++i)
      for (uint32_t j = i + 1; j < n; ++j)
        if (rng.below(2)) bad.emplace_back(i, j);
    const auto m = CompatMatrix::synthetic(n, bad);

    // Grow a random pairwise-compatible state.
    BitVec state = bits::make(n);
    bits::set(state, static_cast<uint32_t>(rng.below(n)));
    for (int grow = 0; grow < 4; ++grow) {
      const auto mask = masked_actions(m, state);
      const size_t cnt = bits::popcount(mask);
      if (cnt == 0) break;
      bits::set(state, static_cast<uint32_t>(
                           bits::nth_set(mask, rng.below(cnt))));
    }

    const auto mask = masked_actions(m, state);
    for (uint32_t a = 0; a < n; ++a) {
      const auto members = bits::to_indices(state);
      bool pairwise_ok = m.diag(a) && !bits::get(state, a);
      for (uint32_t j : members)
        pairwise_ok = pairwise_ok && m.pair(a, j);
      if (bits::get(mask, a)) {
        // Permitted: transition grows the state and stays compatible.
        CHECK(pairwise_ok);
        CHECK_FALSE(bits::get(state, a));
      } else {
        // Masked off: the transition would leave the state unchanged, or
        // the union would contain an incompatible pair.
        const bool in_state = bits::get(state, a);
        bool union_has_bad_pair = !m.diag(a);
        for (uint32_t j : members)
          if (!m.pair(a, j)) union_has_bad_pair = true;
        CHECK((in_state || union_has_bad_pair));
      }
    }
  }
}

TEST_CASE("save/load round-trips bit-identically") {
  const auto nl = Netlist::parse_bench(fixtures::gated15_bench());
  const auto rare = profile_table(nl, 0.15);
  const auto m = CompatMatrix::build(encode(nl), rare);

  const auto dir = std::filesystem::temp_directory_path() / "rarepat_compat";
  std::filesystem::create_directories(dir);
  const auto p1 = dir / "m1.bin";
  const auto p2 = dir / "m2.bin";
  m.save(p1);
  const auto loaded = CompatMatrix::load(p1);
  CHECK(loaded.size() == m.size());
  CHECK(loaded.circuit_hash == m.circuit_hash);
  CHECK(loaded.rare_hash == m.rare_hash);
  CHECK(loaded.theta == m.theta);
  for (uint32_t i = 0; i < m.size(); ++i)
    for (uint32_t j = 0; j < m.size(); ++j)
      CHECK(loaded.pair(i, j) == m.pair(i, j));
  loaded.save(p2);
  CHECK(slurp(p1) == slurp(p2));
  std::filesystem::remove_all(dir);
}
