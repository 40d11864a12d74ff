#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rarepat/errors.hpp"

namespace rarepat {

using NetId = uint32_t;

enum class GateKind : uint8_t { And, Nand, Or, Nor, Xor, Xnor, Not, Buf };

const char* to_string(GateKind kind);

struct Gate {
  GateKind kind;
  std::vector<NetId> fanin;  // >= 1; exactly 1 for NOT/BUF
  NetId out;
};

/// Combinational gate graph parsed from ISCAS-style bench text.
///
/// Sequential sources are scan-converted at parse time: each `q = DFF(d)`
/// turns q into a pseudo primary input and d into a pseudo primary output,
/// so everything downstream sees a purely combinational circuit. Net names
/// are interned to dense indices in order of first appearance; all other
/// modules operate on indices.
class Netlist {
 public:
  static Netlist parse_bench(std::string_view text);

  /// Canonical writer: INPUT/OUTPUT lines in declaration order, then gates
  /// in topological order. parse(to_bench()) reproduces the same text.
  std::string to_bench() const;

  size_t net_count() const { return net_names_.size(); }
  size_t gate_count() const { return gates_.size(); }

  const std::string& net_name(NetId id) const { return net_names_[id]; }
  NetId net_id(std::string_view name) const;

  const std::vector<Gate>& gates() const { return gates_; }
  const std::vector<NetId>& primary_inputs() const { return primary_inputs_; }
  const std::vector<NetId>& primary_outputs() const { return primary_outputs_; }

  /// Gate indices in evaluation order; every gate appears after the gates
  /// driving its fanin. Ties broken by ascending output net index.
  const std::vector<uint32_t>& topo_order() const { return topo_order_; }

  /// Index of the driving gate, or -1 for primary inputs.
  int32_t driver_gate(NetId id) const { return driver_[id]; }
  bool is_primary_input(NetId id) const { return driver_[id] < 0; }

  size_t scan_dff_count() const { return scan_dff_count_; }

  /// Hash of the canonical serialization; embedded in downstream artifacts.
  uint64_t structure_hash() const;

  /// Asserts that every net is reachable from the primary inputs.
  void check_reachability() const;

 private:
  Netlist() = default;
  void build_topo_order();

  std::vector<std::string> net_names_;
  std::unordered_map<std::string, NetId> ids_;
  std::vector<Gate> gates_;
  std::vector<NetId> primary_inputs_;
  std::vector<NetId> primary_outputs_;
  std::vector<int32_t> driver_;
  std::vector<uint32_t> topo_order_;
  size_t scan_dff_count_ = 0;
};

}  // namespace rarepat
