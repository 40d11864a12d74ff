#pragma once

#include <string>

namespace fixtures {

// Public ISCAS-85 c17: 5 PIs, 2 POs, 6 NAND gates, 11 nets.
inline std::string c17_bench() {
  return R"(# c17
INPUT(1)
INPUT(2)
INPUT(3)
INPUT(6)
INPUT(7)
OUTPUT(22)
OUTPUT(23)
10 = NAND(1, 3)
11 = NAND(3, 6)
16 = NAND(2, 11)
19 = NAND(11, 7)
22 = NAND(10, 16)
23 = NAND(16, 19)
)";
}

// Three nets that are pairwise satisfiable at value 1 but jointly
// unsatisfiable: n1 = a&b, n2 = b&c, n3 = b&(a^c). Any two of them share a
// witness; all three together force a^c with a=c=1.
inline std::string trap3_bench() {
  return R"(INPUT(a)
INPUT(b)
INPUT(c)
OUTPUT(n1)
OUTPUT(n2)
OUTPUT(n3)
x = XOR(a, c)
n1 = AND(a, b)
n2 = AND(b, c)
n3 = AND(b, x)
)";
}

// XOR triangle with two rare conjunctions that contradict each other only
// after search: r1 = (a^b)&(b^c) implies a==c, while r2 needs a^c.
// Both have signal probability 1/4.
inline std::string xor_trap_bench() {
  return R"(INPUT(a)
INPUT(b)
INPUT(c)
INPUT(d)
OUTPUT(r1)
OUTPUT(r2)
x1 = XOR(a, b)
x2 = XOR(b, c)
x3 = XOR(a, c)
r1 = AND(x1, x2)
r2 = AND(x3, d)
)";
}

// Small circuit exercising every gate kind; 6 PIs.
inline std::string mixed_kinds_bench() {
  return R"(INPUT(a)
INPUT(b)
INPUT(c)
INPUT(d)
INPUT(e)
INPUT(f)
OUTPUT(z1)
OUTPUT(z2)
na = NOT(a)
bb = BUF(b)
g1 = AND(na, bb, c)
g2 = OR(d, e)
g3 = NOR(a, f)
g4 = XOR(g1, g2)
g5 = XNOR(c, d, e)
g6 = NAND(g3, g5)
z1 = AND(g4, g6)
z2 = OR(g4, g3, g1)
)";
}

// Tiny sequential circuit: two DFFs that scan-convert into pseudo PI/PO.
inline std::string seq2_bench() {
  return R"(INPUT(a)
INPUT(b)
OUTPUT(y)
q1 = DFF(d1)
q2 = DFF(d2)
d1 = AND(a, q2)
d2 = OR(b, q1)
y = XOR(q1, q2)
)";
}

/// Two groups of wide-AND cones gated by a select input: group A cones
/// require s=1, group B cones require s=0, so cones are compatible within
/// a group and incompatible across groups. Optional free cones (no gating)
/// are compatible with everything. Optional ballast appends an XOR chain
/// to grow the gate count without adding rare nets.
///
/// With cone_width w, a gated cone has signal probability 2^-(w+1) and a
/// free cone 2^-w.
inline std::string gated_bench(int cones_a, int cones_b, int cone_width,
                               int free_cones = 0, int free_width = 3,
                               int ballast = 0) {
  std::string in, out, gates;
  auto pi = [&in](const std::string& name) {
    in += "INPUT(" + name + ")\n";
    return name;
  };
  pi("s");
  gates += "ns = NOT(s)\n";

  int serial = 0;
  auto cone = [&](const std::string& prefix, int idx, int width,
                  const std::string& gate_in) {
    std::string name = prefix + std::to_string(idx);
    std::string args = gate_in;
    for (int k = 0; k < width; ++k) {
      const std::string leaf = prefix + "i" + std::to_string(serial++);
      pi(leaf);
      if (!args.empty()) args += ", ";
      args += leaf;
    }
    gates += name + " = AND(" + args + ")\n";
    out += "OUTPUT(" + name + ")\n";
  };

  for (int i = 0; i < cones_a; ++i) cone("ga", i, cone_width, "s");
  for (int i = 0; i < cones_b; ++i) cone("gb", i, cone_width, "ns");
  for (int i = 0; i < free_cones; ++i) cone("gf", i, free_width, "");

  if (ballast > 0) {
    pi("t0");
    pi("t1");
    gates += "bal0 = XOR(t0, t1)\n";
    for (int i = 1; i < ballast; ++i)
      gates += "bal" + std::to_string(i) + " = XOR(bal" +
               std::to_string(i - 1) + ", t" + std::to_string(i % 2) + ")\n";
    out += "OUTPUT(bal" + std::to_string(ballast - 1) + ")\n";
  }
  return in + out + gates;
}

/// 15-PI instance used where an exhaustive oracle must stay cheap:
/// 4 cones on s, 3 cones on ~s, cone width 2 (probability 1/8 each).
inline std::string gated15_bench() { return gated_bench(4, 3, 2); }

/// Evaluation-scale fixture: 24 gated cones of width 4 (probability 1/32)
/// plus 4 free width-3 cones (probability 1/8) for threshold sweeps.
inline std::string desk_bench() { return gated_bench(12, 12, 4, 4, 3); }

/// Larger fixture for throughput measurements.
inline std::string large_bench() {
  return gated_bench(24, 24, 4, 0, 3, 300);
}

}  // namespace fixtures
