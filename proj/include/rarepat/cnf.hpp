#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rarepat/netlist.hpp"

namespace rarepat {

/// Tseitin encoding of a netlist. Variable numbering is deterministic:
/// net i maps to DIMACS variable i+1. XOR/XNOR gates with more than two
/// inputs introduce auxiliary variables above the net range; auxiliaries
/// are functionally determined, so satisfying assignments restricted to
/// net variables are exactly the circuit's consistent valuations.
struct CircuitCnf {
  uint32_t n_nets = 0;
  uint32_t n_vars = 0;
  std::vector<std::vector<int32_t>> clauses;  // DIMACS-signed literals
  uint64_t circuit_hash = 0;

  uint32_t var_of_net(NetId net) const { return net + 1; }

  std::string to_dimacs() const;
};

CircuitCnf encode(const Netlist& netlist);

struct Assumption {
  NetId net;
  uint8_t value;  // required logic value, 0 or 1
};

}  // namespace rarepat
