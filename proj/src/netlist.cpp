#include "rarepat/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <queue>
#include <sstream>

#include "rarepat/hash.hpp"

namespace rarepat {

const char* to_string(GateKind kind) {
  switch (kind) {
    case GateKind::And: return "AND";
    case GateKind::Nand: return "NAND";
    case GateKind::Or: return "OR";
    case GateKind::Nor: return "NOR";
    case GateKind::Xor: return "XOR";
    case GateKind::Xnor: return "XNOR";
    case GateKind::Not: return "NOT";
    case GateKind::Buf: return "BUF";
  }
  return "?";
}

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool valid_net_name(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' ||
        c == ',' || c == '=' || c == '#')
      return false;
  }
  return true;
}

struct RawGate {
  std::string out;
  std::string kind;
  std::vector<std::string> ins;
  int line;
};

bool parse_kind(const std::string& token, GateKind& out) {
  if (token == "AND") out = GateKind::And;
  else if (token == "NAND") out = GateKind::Nand;
  else if (token == "OR") out = GateKind::Or;
  else if (token == "NOR") out = GateKind::Nor;
  else if (token == "XOR") out = GateKind::Xor;
  else if (token == "XNOR") out = GateKind::Xnor;
  else if (token == "NOT" || token == "INV") out = GateKind::Not;
  else if (token == "BUF" || token == "BUFF") out = GateKind::Buf;
  else return false;
  return true;
}

}  // namespace

NetId Netlist::net_id(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end())
    throw ValidationError("unknown net name: " + std::string(name));
  return it->second;
}

Netlist Netlist::parse_bench(std::string_view text) {
  std::vector<std::pair<std::string, int>> raw_inputs;
  std::vector<std::pair<std::string, int>> raw_outputs;
  std::vector<RawGate> raw_gates;
  std::vector<RawGate> raw_dffs;

  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;

    if (size_t h = line.find('#'); h != std::string_view::npos)
      line = line.substr(0, h);
    line = trim(line);
    if (line.empty()) continue;

    const size_t open = line.find('(');
    const size_t close = line.rfind(')');
    const size_t eq = line.find('=');

    if (eq == std::string_view::npos) {
      // INPUT(x) or OUTPUT(x)
      if (open == std::string_view::npos || close == std::string_view::npos ||
          close < open)
        throw ParseError("expected INPUT(net), OUTPUT(net) or net = KIND(...)",
                         line_no, 1);
      const std::string keyword = upper(trim(line.substr(0, open)));
      const std::string name(trim(line.substr(open + 1, close - open - 1)));
      if (!valid_net_name(name))
        throw ParseError("invalid net name '" + name + "'", line_no,
                         static_cast<int>(open) + 2);
      if (keyword == "INPUT") {
        raw_inputs.emplace_back(name, line_no);
      } else if (keyword == "OUTPUT") {
        raw_outputs.emplace_back(name, line_no);
      } else {
        throw ParseError("unknown directive '" + keyword + "'", line_no, 1);
      }
      continue;
    }

    if (open == std::string_view::npos || close == std::string_view::npos ||
        close < open || open < eq)
      throw ParseError("malformed gate line", line_no,
                       static_cast<int>(eq) + 1);

    RawGate g;
    g.line = line_no;
    g.out = std::string(trim(line.substr(0, eq)));
    g.kind = upper(trim(line.substr(eq + 1, open - eq - 1)));
    if (!valid_net_name(g.out))
      throw ParseError("invalid output net name '" + g.out + "'", line_no, 1);
    if (g.kind.empty())
      throw ParseError("missing gate kind", line_no, static_cast<int>(eq) + 2);

    std::string_view args = line.substr(open + 1, close - open - 1);
    size_t a = 0;
    while (a <= args.size()) {
      size_t comma = args.find(',', a);
      if (comma == std::string_view::npos) comma = args.size();
      std::string name(trim(args.substr(a, comma - a)));
      if (name.empty()) {
        if (!(args.empty() && g.ins.empty()))
          throw ParseError("empty fanin argument", line_no,
                           static_cast<int>(open) + 2);
      } else {
        if (!valid_net_name(name))
          throw ParseError("invalid fanin net name '" + name + "'", line_no,
                           static_cast<int>(open) + 2);
        g.ins.push_back(std::move(name));
      }
      a = comma + 1;
    }
    if (g.ins.empty())
      throw ParseError("gate has no fanin", line_no,
                       static_cast<int>(open) + 1);

    if (g.kind == "DFF") {
      if (g.ins.size() != 1)
        throw ParseError("DFF takes exactly one input", line_no,
                         static_cast<int>(open) + 1);
      raw_dffs.push_back(std::move(g));
    } else {
      GateKind kind;
      if (!parse_kind(g.kind, kind))
        throw ParseError("unknown gate kind '" + g.kind + "'", line_no,
                         static_cast<int>(eq) + 2);
      if ((kind == GateKind::Not || kind == GateKind::Buf) &&
          g.ins.size() != 1)
        throw ParseError(g.kind + " takes exactly one input", line_no,
                         static_cast<int>(open) + 1);
      raw_gates.push_back(std::move(g));
    }
  }

  Netlist nl;
  auto intern = [&nl](const std::string& name) -> NetId {
    auto it = nl.ids_.find(name);
    if (it != nl.ids_.end()) return it->second;
    const NetId id = static_cast<NetId>(nl.net_names_.size());
    nl.net_names_.push_back(name);
    nl.ids_.emplace(name, id);
    return id;
  };

  std::vector<int> pi_decl_line;
  for (const auto& [name, line] : raw_inputs) {
    const NetId id = intern(name);
    if (std::find(nl.primary_inputs_.begin(), nl.primary_inputs_.end(), id) !=
        nl.primary_inputs_.end())
      throw ParseError("duplicate INPUT declaration for '" + name + "'", line);
    nl.primary_inputs_.push_back(id);
    pi_decl_line.push_back(line);
  }
  for (const auto& [name, line] : raw_outputs) {
    const NetId id = intern(name);
    if (std::find(nl.primary_outputs_.begin(), nl.primary_outputs_.end(),
                  id) != nl.primary_outputs_.end())
      throw ParseError("duplicate OUTPUT declaration for '" + name + "'",
                       line);
    nl.primary_outputs_.push_back(id);
  }

  // Scan conversion: DFF output joins the PIs, DFF input joins the POs.
  for (const auto& g : raw_dffs) {
    const NetId q = intern(g.out);
    if (std::find(nl.primary_inputs_.begin(), nl.primary_inputs_.end(), q) !=
        nl.primary_inputs_.end())
      throw ParseError("DFF output '" + g.out + "' already declared as INPUT",
                       g.line);
    nl.primary_inputs_.push_back(q);
    const NetId d = intern(g.ins[0]);
    if (std::find(nl.primary_outputs_.begin(), nl.primary_outputs_.end(), d) ==
        nl.primary_outputs_.end())
      nl.primary_outputs_.push_back(d);
    ++nl.scan_dff_count_;
  }

  for (const auto& g : raw_gates) {
    Gate gate;
    parse_kind(g.kind, gate.kind);
    gate.out = intern(g.out);
    for (const auto& in : g.ins) gate.fanin.push_back(intern(in));
    nl.gates_.push_back(std::move(gate));
  }

  // Driver map + multiple-driver detection.
  nl.driver_.assign(nl.net_count(), -1);
  std::vector<bool> is_pi(nl.net_count(), false);
  for (NetId pi : nl.primary_inputs_) is_pi[pi] = true;
  for (size_t gi = 0; gi < nl.gates_.size(); ++gi) {
    const NetId out = nl.gates_[gi].out;
    if (is_pi[out])
      throw ParseError("net '" + nl.net_names_[out] +
                           "' is driven by a gate but is a primary input",
                       raw_gates[gi].line);
    if (nl.driver_[out] >= 0)
      throw ParseError("net '" + nl.net_names_[out] + "' is multiply driven",
                       raw_gates[gi].line);
    nl.driver_[out] = static_cast<int32_t>(gi);
  }

  for (NetId id = 0; id < nl.net_count(); ++id) {
    if (!is_pi[id] && nl.driver_[id] < 0)
      throw ParseError("undriven net '" + nl.net_names_[id] + "'");
  }

  nl.build_topo_order();
  return nl;
}

void Netlist::build_topo_order() {
  const size_t n_gates = gates_.size();
  std::vector<uint32_t> pending(n_gates, 0);
  std::vector<std::vector<uint32_t>> consumers(net_count());
  for (size_t gi = 0; gi < n_gates; ++gi) {
    for (NetId in : gates_[gi].fanin) {
      if (driver_[in] >= 0) {
        ++pending[gi];
        consumers[in].push_back(static_cast<uint32_t>(gi));
      }
    }
  }

  // Min-heap on output net index keeps the order deterministic.
  auto cmp = [this](uint32_t a, uint32_t b) {
    return gates_[a].out > gates_[b].out;
  };
  std::priority_queue<uint32_t, std::vector<uint32_t>, decltype(cmp)> ready(
      cmp);
  for (size_t gi = 0; gi < n_gates; ++gi)
    if (pending[gi] == 0) ready.push(static_cast<uint32_t>(gi));

  topo_order_.clear();
  topo_order_.reserve(n_gates);
  while (!ready.empty()) {
    const uint32_t gi = ready.top();
    ready.pop();
    topo_order_.push_back(gi);
    for (uint32_t ci : consumers[gates_[gi].out])
      if (--pending[ci] == 0) ready.push(ci);
  }

  if (topo_order_.size() != n_gates) {
    // Walk unplaced gates to report one cycle.
    std::vector<bool> placed(n_gates, false);
    for (uint32_t gi : topo_order_) placed[gi] = true;
    uint32_t start = 0;
    for (size_t gi = 0; gi < n_gates; ++gi)
      if (!placed[gi]) start = static_cast<uint32_t>(gi);
    std::vector<NetId> cycle;
    std::vector<int> seen_at(net_count(), -1);
    uint32_t g = start;
    while (true) {
      const NetId out = gates_[g].out;
      if (seen_at[out] >= 0) {
        cycle.erase(cycle.begin(), cycle.begin() + seen_at[out]);
        break;
      }
      seen_at[out] = static_cast<int>(cycle.size());
      cycle.push_back(out);
      uint32_t next = g;
      for (NetId in : gates_[g].fanin) {
        const int32_t d = driver_[in];
        if (d >= 0 && !placed[d]) {
          next = static_cast<uint32_t>(d);
          break;
        }
      }
      g = next;
    }
    std::string msg = "combinational cycle through nets:";
    for (NetId id : cycle) msg += " " + net_names_[id];
    throw ParseError(msg);
  }
}

std::string Netlist::to_bench() const {
  std::ostringstream out;
  for (NetId pi : primary_inputs_) out << "INPUT(" << net_names_[pi] << ")\n";
  for (NetId po : primary_outputs_)
    out << "OUTPUT(" << net_names_[po] << ")\n";
  for (uint32_t gi : topo_order_) {
    const Gate& g = gates_[gi];
    out << net_names_[g.out] << " = " << to_string(g.kind) << "(";
    for (size_t i = 0; i < g.fanin.size(); ++i) {
      if (i) out << ", ";
      out << net_names_[g.fanin[i]];
    }
    out << ")\n";
  }
  return out.str();
}

uint64_t Netlist::structure_hash() const { return fnv1a64(to_bench()); }

void Netlist::check_reachability() const {
  std::vector<bool> reach(net_count(), false);
  for (NetId pi : primary_inputs_) reach[pi] = true;
  for (uint32_t gi : topo_order_) {
    const Gate& g = gates_[gi];
    bool all = true;
    for (NetId in : g.fanin) all = all && reach[in];
    if (!all)
      throw InternalError("net '" + net_names_[g.out] +
                          "' not reachable from primary inputs");
    reach[g.out] = true;
  }
  for (NetId id = 0; id < net_count(); ++id)
    if (!reach[id])
      throw InternalError("floating net '" + net_names_[id] + "'");
}

}  // namespace rarepat
