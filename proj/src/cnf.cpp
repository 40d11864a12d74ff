#include "rarepat/cnf.hpp"

#include <sstream>

namespace rarepat {

namespace {

// out <-> AND(ins); negate flips the output polarity (NAND).
void emit_and(std::vector<std::vector<int32_t>>& clauses, int32_t out,
              const std::vector<int32_t>& ins, bool negate) {
  const int32_t o = negate ? -out : out;
  std::vector<int32_t> big;
  big.reserve(ins.size() + 1);
  big.push_back(o);
  for (int32_t in : ins) {
    clauses.push_back({-o, in});
    big.push_back(-in);
  }
  clauses.push_back(std::move(big));
}

void emit_or(std::vector<std::vector<int32_t>>& clauses, int32_t out,
             const std::vector<int32_t>& ins, bool negate) {
  const int32_t o = negate ? -out : out;
  std::vector<int32_t> big;
  big.reserve(ins.size() + 1);
  big.push_back(-o);
  for (int32_t in : ins) {
    clauses.push_back({o, -in});
    big.push_back(in);
  }
  clauses.push_back(std::move(big));
}

// out <-> a XOR b (negate: XNOR).
void emit_xor2(std::vector<std::vector<int32_t>>& clauses, int32_t out,
               int32_t a, int32_t b, bool negate) {
  const int32_t o = negate ? -out : out;
  clauses.push_back({-o, a, b});
  clauses.push_back({-o, -a, -b});
  clauses.push_back({o, -a, b});
  clauses.push_back({o, a, -b});
}

void emit_eq(std::vector<std::vector<int32_t>>& clauses, int32_t out,
             int32_t in, bool negate) {
  const int32_t o = negate ? -out : out;
  clauses.push_back({-o, in});
  clauses.push_back({o, -in});
}

}  // namespace

CircuitCnf encode(const Netlist& netlist) {
  CircuitCnf cnf;
  cnf.n_nets = static_cast<uint32_t>(netlist.net_count());
  cnf.n_vars = cnf.n_nets;
  cnf.circuit_hash = netlist.structure_hash();

  for (const Gate& g : netlist.gates()) {
    const int32_t out = static_cast<int32_t>(cnf.var_of_net(g.out));
    std::vector<int32_t> ins;
    ins.reserve(g.fanin.size());
    for (NetId in : g.fanin)
      ins.push_back(static_cast<int32_t>(cnf.var_of_net(in)));

    switch (g.kind) {
      case GateKind::And:
      case GateKind::Nand:
        if (ins.size() == 1)
          emit_eq(cnf.clauses, out, ins[0], g.kind == GateKind::Nand);
        else
          emit_and(cnf.clauses, out, ins, g.kind == GateKind::Nand);
        break;
      case GateKind::Or:
      case GateKind::Nor:
        if (ins.size() == 1)
          emit_eq(cnf.clauses, out, ins[0], g.kind == GateKind::Nor);
        else
          emit_or(cnf.clauses, out, ins, g.kind == GateKind::Nor);
        break;
      case GateKind::Xor:
      case GateKind::Xnor: {
        const bool negate = g.kind == GateKind::Xnor;
        if (ins.size() == 1) {
          emit_eq(cnf.clauses, out, ins[0], negate);
        } else if (ins.size() == 2) {
          emit_xor2(cnf.clauses, out, ins[0], ins[1], negate);
        } else {
          // Left-fold through auxiliary parity variables.
          int32_t acc = ins[0];
          for (size_t i = 1; i + 1 < ins.size(); ++i) {
            const int32_t aux = static_cast<int32_t>(++cnf.n_vars);
            emit_xor2(cnf.clauses, aux, acc, ins[i], false);
            acc = aux;
          }
          emit_xor2(cnf.clauses, out, acc, ins.back(), negate);
        }
        break;
      }
      case GateKind::Not:
        emit_eq(cnf.clauses, out, ins[0], true);
        break;
      case GateKind::Buf:
        emit_eq(cnf.clauses, out, ins[0], false);
        break;
    }
  }
  return cnf;
}

std::string CircuitCnf::to_dimacs() const {
  std::ostringstream out;
  out << "p cnf " << n_vars << " " << clauses.size() << "\n";
  for (const auto& clause : clauses) {
    for (int32_t lit : clause) out << lit << " ";
    out << "0\n";
  }
  return out.str();
}

}  // namespace rarepat
