#include "rarepat/logic_sim.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "rarepat/hash.hpp"

namespace rarepat {

namespace {

// Bit i of pattern index p for PIs 0..5 follows these stripes; higher PIs
// toggle once per word.
constexpr Word kStripe[6] = {
    0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
    0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull,
};

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

PatternBlock PatternBlock::random(size_t n_pis, uint32_t n_patterns,
                                  Rng& rng) {
  PatternBlock blk;
  blk.n_patterns = n_patterns;
  const size_t w = blk.n_words();
  blk.pi_bits.assign(n_pis, std::vector<Word>(w, 0));
  for (size_t word = 0; word < w; ++word)
    for (size_t pi = 0; pi < n_pis; ++pi) blk.pi_bits[pi][word] = rng.next();
  for (auto& row : blk.pi_bits) bits::clear_tail(row, n_patterns);
  return blk;
}

PatternBlock PatternBlock::exhaustive(size_t n_pis) {
  if (n_pis > 20)
    throw ValidationError("exhaustive block limited to 20 primary inputs");
  PatternBlock blk;
  blk.n_patterns = uint32_t{1} << n_pis;
  const size_t w = blk.n_words();
  blk.pi_bits.assign(n_pis, std::vector<Word>(w, 0));
  for (size_t word = 0; word < w; ++word) {
    for (size_t pi = 0; pi < n_pis; ++pi) {
      if (pi < 6)
        blk.pi_bits[pi][word] = kStripe[pi];
      else
        blk.pi_bits[pi][word] = ((word >> (pi - 6)) & 1) ? ~Word{0} : 0;
    }
  }
  for (auto& row : blk.pi_bits) bits::clear_tail(row, blk.n_patterns);
  return blk;
}

PatternBlock PatternBlock::single(std::span<const uint8_t> pi_values) {
  PatternBlock blk;
  blk.n_patterns = 1;
  blk.pi_bits.assign(pi_values.size(), std::vector<Word>(1, 0));
  for (size_t pi = 0; pi < pi_values.size(); ++pi)
    blk.pi_bits[pi][0] = pi_values[pi] ? 1 : 0;
  return blk;
}

PatternBlock PatternBlock::pack(
    const std::vector<std::vector<uint8_t>>& patterns, size_t n_pis) {
  PatternBlock blk;
  blk.n_patterns = static_cast<uint32_t>(patterns.size());
  blk.pi_bits.assign(n_pis, std::vector<Word>(blk.n_words(), 0));
  for (size_t p = 0; p < patterns.size(); ++p) {
    if (patterns[p].size() != n_pis)
      throw ValidationError("pattern width does not match PI count");
    for (size_t pi = 0; pi < n_pis; ++pi)
      if (patterns[p][pi]) blk.pi_bits[pi][p >> 6] |= Word{1} << (p & 63);
  }
  return blk;
}

SimResult simulate(const Netlist& netlist, const PatternBlock& block) {
  const auto& pis = netlist.primary_inputs();
  if (block.pi_bits.size() != pis.size())
    throw ValidationError("pattern block PI count (" +
                          std::to_string(block.pi_bits.size()) +
                          ") does not match netlist PI count (" +
                          std::to_string(pis.size()) + ")");
  const size_t w = block.n_words();
  const uint64_t tail = bits::tail_mask(block.n_patterns);

  SimResult res;
  res.n_patterns = block.n_patterns;
  res.net_bits.assign(netlist.net_count(), {});
  for (size_t i = 0; i < pis.size(); ++i) res.net_bits[pis[i]] = block.pi_bits[i];

  for (uint32_t gi : netlist.topo_order()) {
    const Gate& g = netlist.gates()[gi];
    auto& out = res.net_bits[g.out];
    out.assign(w, 0);
    for (size_t k = 0; k < w; ++k) {
      Word acc;
      switch (g.kind) {
        case GateKind::And:
        case GateKind::Nand:
          acc = ~Word{0};
          for (NetId in : g.fanin) acc &= res.net_bits[in][k];
          if (g.kind == GateKind::Nand) acc = ~acc;
          break;
        case GateKind::Or:
        case GateKind::Nor:
          acc = 0;
          for (NetId in : g.fanin) acc |= res.net_bits[in][k];
          if (g.kind == GateKind::Nor) acc = ~acc;
          break;
        case GateKind::Xor:
        case GateKind::Xnor:
          acc = 0;
          for (NetId in : g.fanin) acc ^= res.net_bits[in][k];
          if (g.kind == GateKind::Xnor) acc = ~acc;
          break;
        case GateKind::Not:
          acc = ~res.net_bits[g.fanin[0]][k];
          break;
        case GateKind::Buf:
          acc = res.net_bits[g.fanin[0]][k];
          break;
        default:
          acc = 0;
      }
      out[k] = (k + 1 == w) ? (acc & tail) : acc;
    }
  }
  return res;
}

NetProbabilities estimate_probabilities(const Netlist& netlist,
                                        uint64_t n_samples, uint64_t seed,
                                        int workers) {
  if (n_samples < 1) throw ValidationError("sample count must be >= 1");
  constexpr uint64_t kBlockPatterns = 4096;
  const uint64_t n_blocks = (n_samples + kBlockPatterns - 1) / kBlockPatterns;
  const size_t n_nets = netlist.net_count();
  const size_t n_pis = netlist.primary_inputs().size();

  std::vector<uint64_t> ones(n_nets, 0);
  std::atomic<uint64_t> next_block{0};
  std::mutex merge_mu;

  auto work = [&]() {
    std::vector<uint64_t> local(n_nets, 0);
    while (true) {
      const uint64_t b = next_block.fetch_add(1);
      if (b >= n_blocks) break;
      const uint64_t lo = b * kBlockPatterns;
      const uint32_t count = static_cast<uint32_t>(
          std::min<uint64_t>(kBlockPatterns, n_samples - lo));
      Rng rng(mix_seed(seed, b, 0x5b10c55ull));
      const PatternBlock blk = PatternBlock::random(n_pis, count, rng);
      const SimResult sim = simulate(netlist, blk);
      for (size_t net = 0; net < n_nets; ++net)
        local[net] += bits::popcount(sim.net_bits[net]);
    }
    std::lock_guard<std::mutex> lock(merge_mu);
    for (size_t net = 0; net < n_nets; ++net) ones[net] += local[net];
  };

  const int n_threads = std::max(1, workers);
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  NetProbabilities out;
  out.sample_count = n_samples;
  out.seed = seed;
  out.exhaustive = false;
  out.p_one.resize(n_nets);
  for (size_t net = 0; net < n_nets; ++net)
    out.p_one[net] =
        static_cast<double>(ones[net]) / static_cast<double>(n_samples);
  return out;
}

NetProbabilities exact_probabilities(const Netlist& netlist) {
  const size_t n_pis = netlist.primary_inputs().size();
  if (n_pis > 20)
    throw ValidationError("exact probabilities require <= 20 primary inputs");
  const PatternBlock blk = PatternBlock::exhaustive(n_pis);
  const SimResult sim = simulate(netlist, blk);
  NetProbabilities out;
  out.sample_count = blk.n_patterns;
  out.seed = 0;
  out.exhaustive = true;
  out.p_one.resize(netlist.net_count());
  for (size_t net = 0; net < netlist.net_count(); ++net)
    out.p_one[net] = static_cast<double>(bits::popcount(sim.net_bits[net])) /
                     static_cast<double>(blk.n_patterns);
  return out;
}

NetProbabilities profile_probabilities(const Netlist& netlist,
                                       uint64_t n_samples, uint64_t seed,
                                       int workers) {
  if (netlist.primary_inputs().size() <= 20)
    return exact_probabilities(netlist);
  return estimate_probabilities(netlist, n_samples, seed, workers);
}

RareNetTable extract_rare_nets(const Netlist& netlist,
                               const NetProbabilities& probs,
                               double threshold) {
  if (!(threshold > 0.0 && threshold <= 0.5))
    throw ValidationError("rareness threshold must lie in (0, 0.5]");
  if (probs.p_one.size() != netlist.net_count())
    throw ValidationError("probability vector does not match netlist");

  RareNetTable table;
  table.threshold = threshold;
  table.sample_count = probs.sample_count;
  table.seed = probs.seed;
  table.exhaustive = probs.exhaustive;
  table.circuit_hash = netlist.structure_hash();

  for (NetId net = 0; net < netlist.net_count(); ++net) {
    const double p1 = probs.p_one[net];
    if (p1 == 0.0 || p1 == 1.0) {
      ++table.constant_nets_skipped;
      continue;
    }
    // Ties at p=0.5 resolve to rare value 0.
    const uint8_t rare_value = p1 < 0.5 ? 1 : 0;
    const double p_rare = rare_value ? p1 : 1.0 - p1;
    if (p_rare <= threshold)
      table.entries.push_back({net, rare_value, p_rare});
  }
  return table;
}

std::string RareNetTable::to_text() const {
  std::ostringstream out;
  out << "# rare net report\n";
  out << "# circuit_hash=" << hash_hex(circuit_hash) << "\n";
  out << "# threshold=" << format_double(threshold) << "\n";
  out << "# seed=" << seed << "\n";
  out << "# sample_count=" << sample_count << "\n";
  out << "# mode=" << (exhaustive ? "exhaustive" : "monte_carlo") << "\n";
  out << "# constant_nets_skipped=" << constant_nets_skipped << "\n";
  for (const RareNet& e : entries)
    out << e.net << " " << int(e.rare_value) << " "
        << format_double(e.probability) << "\n";
  return out.str();
}

RareNetTable RareNetTable::from_text(std::string_view text) {
  RareNetTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto grab = [&line](std::string_view key) -> std::string {
        const std::string prefix = "# " + std::string(key) + "=";
        if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
        return {};
      };
      if (auto v = grab("circuit_hash"); !v.empty())
        table.circuit_hash = parse_hash_hex(v);
      else if (auto v2 = grab("threshold"); !v2.empty())
        table.threshold = std::stod(v2);
      else if (auto v3 = grab("seed"); !v3.empty())
        table.seed = std::stoull(v3);
      else if (auto v4 = grab("sample_count"); !v4.empty())
        table.sample_count = std::stoull(v4);
      else if (auto v5 = grab("mode"); !v5.empty())
        table.exhaustive = (v5 == "exhaustive");
      else if (auto v6 = grab("constant_nets_skipped"); !v6.empty())
        table.constant_nets_skipped = static_cast<uint32_t>(std::stoul(v6));
      continue;
    }
    std::istringstream fields(line);
    RareNet e;
    unsigned value;
    if (!(fields >> e.net >> value >> e.probability))
      throw ParseError("malformed rare-net line", line_no);
    e.rare_value = static_cast<uint8_t>(value);
    table.entries.push_back(e);
  }
  return table;
}

nlohmann::json RareNetTable::to_json() const {
  nlohmann::json j;
  j["circuit_hash"] = hash_hex(circuit_hash);
  j["threshold"] = threshold;
  j["seed"] = seed;
  j["sample_count"] = sample_count;
  j["mode"] = exhaustive ? "exhaustive" : "monte_carlo";
  j["constant_nets_skipped"] = constant_nets_skipped;
  nlohmann::json entries_j = nlohmann::json::array();
  for (const RareNet& e : entries) {
    entries_j.push_back({{"net", e.net},
                         {"rare_value", e.rare_value},
                         {"probability", e.probability}});
  }
  j["entries"] = entries_j;
  return j;
}

RareNetTable RareNetTable::from_json(const nlohmann::json& j) {
  RareNetTable table;
  table.circuit_hash = parse_hash_hex(j.at("circuit_hash").get<std::string>());
  table.threshold = j.at("threshold").get<double>();
  table.seed = j.at("seed").get<uint64_t>();
  table.sample_count = j.at("sample_count").get<uint64_t>();
  table.exhaustive = j.at("mode").get<std::string>() == "exhaustive";
  table.constant_nets_skipped = j.at("constant_nets_skipped").get<uint32_t>();
  for (const auto& e : j.at("entries")) {
    table.entries.push_back({e.at("net").get<NetId>(),
                             e.at("rare_value").get<uint8_t>(),
                             e.at("probability").get<double>()});
  }
  return table;
}

uint64_t RareNetTable::table_hash() const { return fnv1a64(to_text()); }

}  // namespace rarepat
