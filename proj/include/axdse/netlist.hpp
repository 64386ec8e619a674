#pragma once

#include <array>
#include <cassert>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "axdse/common.hpp"

namespace axdse {

// ---------------------------------------------------------------------------
// Combinational gate-level netlists.
//
// A netlist is a DAG of single-output gates over integer-indexed nets. Ports
// are named groups of single-bit nets; in memory bit 0 of a group is the LSB.
//
// Text interchange format (one statement per line, '#' starts a comment):
//   input <name> <width>                  nets numbered sequentially, MSB first
//   output <name> <width> <net...>        nets listed MSB first
//   <net> = <KIND> <fanin...>             fanins must already be driven
// Gate lines must appear in topological order, which the writer guarantees.
// ---------------------------------------------------------------------------

enum class GateKind : std::uint8_t {
  Const0,
  Const1,
  Buf,
  Not,
  And,
  Or,
  Xor,
  Nand,
  Nor,
  Xnor,
};

inline constexpr int kGateKindCount = 10;

inline int gate_arity(GateKind k) {
  switch (k) {
    case GateKind::Const0:
    case GateKind::Const1:
      return 0;
    case GateKind::Buf:
    case GateKind::Not:
      return 1;
    default:
      return 2;
  }
}

inline const char* gate_name(GateKind k) {
  static constexpr const char* names[] = {"CONST0", "CONST1", "BUF", "NOT", "AND",
                                          "OR",     "XOR",    "NAND", "NOR", "XNOR"};
  return names[static_cast<int>(k)];
}

inline GateKind gate_from_name(std::string_view s) {
  for (int i = 0; i < kGateKindCount; ++i)
    if (s == gate_name(static_cast<GateKind>(i))) return static_cast<GateKind>(i);
  throw UserError("unknown gate kind: '" + std::string(s) + "'");
}

using NetId = std::uint32_t;
inline constexpr NetId kNoNet = 0xffffffffu;

struct Gate {
  GateKind kind;
  NetId a = kNoNet;
  NetId b = kNoNet;
  NetId out = kNoNet;
};

struct PortGroup {
  std::string name;
  std::vector<NetId> bits;  // bits[0] = LSB

  int width() const { return static_cast<int>(bits.size()); }
};

struct GateNetlist {
  std::vector<PortGroup> inputs;
  std::vector<PortGroup> outputs;
  std::vector<Gate> gates;  // topological order
  NetId net_count = 0;

  NetId new_net() { return net_count++; }

  std::size_t two_input_gate_count() const {
    std::size_t n = 0;
    for (const Gate& g : gates) n += gate_arity(g.kind) == 2 ? 1 : 0;
    return n;
  }

  int total_input_bits() const {
    int n = 0;
    for (const auto& p : inputs) n += p.width();
    return n;
  }

  const PortGroup& input(std::string_view name) const {
    for (const auto& p : inputs)
      if (p.name == name) return p;
    throw UserError("no input port '" + std::string(name) + "'");
  }

  // Checks acyclicity (via definition-before-use), single drivers, arity and
  // driven outputs. Throws on the first violation.
  void validate() const {
    std::vector<std::uint8_t> driven(net_count, 0);
    for (const auto& p : inputs)
      for (NetId n : p.bits) {
        if (n >= net_count) throw UserError("input net out of range in port " + p.name);
        if (driven[n]) throw UserError("net driven twice: " + std::to_string(n));
        driven[n] = 1;
      }
    for (const Gate& g : gates) {
      int arity = gate_arity(g.kind);
      if (arity >= 1) {
        if (g.a == kNoNet || g.a >= net_count || !driven[g.a])
          throw UserError("gate fanin not yet driven: net " + std::to_string(g.a));
      } else if (g.a != kNoNet) {
        throw UserError("const gate with fanin");
      }
      if (arity == 2) {
        if (g.b == kNoNet || g.b >= net_count || !driven[g.b])
          throw UserError("gate fanin not yet driven: net " + std::to_string(g.b));
      } else if (g.b != kNoNet) {
        throw UserError("unexpected second fanin on " + std::string(gate_name(g.kind)));
      }
      if (g.out >= net_count) throw UserError("gate output net out of range");
      if (driven[g.out]) throw UserError("net driven twice: " + std::to_string(g.out));
      driven[g.out] = 1;
    }
    for (const auto& p : outputs)
      for (NetId n : p.bits)
        if (n >= net_count || !driven[n])
          throw UserError("undriven output bit in port " + p.name);
  }
};

// ---------------------------------------------------------------------------
// Evaluation. All evaluation is 64-way bit-parallel: each net carries one
// 64-bit word holding that signal across 64 independent input vectors.
// ---------------------------------------------------------------------------

// planes[k] = word whose lane j is bit k of value j.
inline void pack_values(const std::uint64_t* values, std::size_t count, int width,
                        std::uint64_t* planes) {
  for (int k = 0; k < width; ++k) planes[k] = 0;
  for (std::size_t j = 0; j < count; ++j) {
    std::uint64_t v = values[j];
    for (int k = 0; k < width; ++k) planes[k] |= ((v >> k) & 1u) << j;
  }
}

inline void unpack_values(const std::uint64_t* planes, int width, std::size_t count,
                          std::uint64_t* values) {
  for (std::size_t j = 0; j < count; ++j) {
    std::uint64_t v = 0;
    for (int k = 0; k < width; ++k) v |= ((planes[k] >> j) & 1u) << k;
    values[j] = v;
  }
}

class LaneEvaluator {
 public:
  explicit LaneEvaluator(const GateNetlist& nl) : nl_(&nl), planes_(nl.net_count, 0) {}

  // input_planes holds the per-bit planes of every input group concatenated
  // in port order, LSB first within each group.
  void run(const std::uint64_t* input_planes) {
    std::size_t idx = 0;
    for (const auto& p : nl_->inputs)
      for (NetId n : p.bits) planes_[n] = input_planes[idx++];
    for (const Gate& g : nl_->gates) {
      std::uint64_t a = g.a != kNoNet ? planes_[g.a] : 0;
      std::uint64_t b = g.b != kNoNet ? planes_[g.b] : 0;
      std::uint64_t y = 0;
      switch (g.kind) {
        case GateKind::Const0: y = 0; break;
        case GateKind::Const1: y = ~0ull; break;
        case GateKind::Buf: y = a; break;
        case GateKind::Not: y = ~a; break;
        case GateKind::And: y = a & b; break;
        case GateKind::Or: y = a | b; break;
        case GateKind::Xor: y = a ^ b; break;
        case GateKind::Nand: y = ~(a & b); break;
        case GateKind::Nor: y = ~(a | b); break;
        case GateKind::Xnor: y = ~(a ^ b); break;
      }
      planes_[g.out] = y;
    }
  }

  std::uint64_t net_plane(NetId n) const { return planes_[n]; }

  void output_planes(std::size_t group, std::uint64_t* out) const {
    const PortGroup& p = nl_->outputs[group];
    for (int k = 0; k < p.width(); ++k) out[k] = planes_[p.bits[k]];
  }

 private:
  const GateNetlist* nl_;
  std::vector<std::uint64_t> planes_;
};

// Single-vector evaluation; one word per port group. Rejects words that do
// not fit the declared port width.
inline std::vector<std::uint64_t> evaluate(const GateNetlist& nl,
                                           const std::vector<std::uint64_t>& input_words) {
  if (input_words.size() != nl.inputs.size())
    throw UserError("expected " + std::to_string(nl.inputs.size()) + " input words, got " +
                    std::to_string(input_words.size()));
  std::vector<std::uint64_t> planes;
  planes.reserve(nl.total_input_bits());
  for (std::size_t i = 0; i < nl.inputs.size(); ++i) {
    const PortGroup& p = nl.inputs[i];
    std::uint64_t v = input_words[i];
    if (p.width() < 64 && (v >> p.width()) != 0)
      throw UserError("value " + std::to_string(v) + " does not fit " +
                      std::to_string(p.width()) + "-bit input port '" + p.name + "'");
    for (int k = 0; k < p.width(); ++k) planes.push_back(((v >> k) & 1u) ? ~0ull : 0ull);
  }
  LaneEvaluator ev(nl);
  ev.run(planes.data());
  std::vector<std::uint64_t> out(nl.outputs.size(), 0);
  for (std::size_t i = 0; i < nl.outputs.size(); ++i) {
    const PortGroup& p = nl.outputs[i];
    std::uint64_t v = 0;
    for (int k = 0; k < p.width(); ++k) v |= (ev.net_plane(p.bits[k]) & 1u) << k;
    out[i] = v;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Structural simplification: constant propagation, BUF collapsing, algebraic
// single-gate rewrites and dead-gate elimination, run to a fixed point in
// gate order. Functionally equivalent to the input on every vector; never
// adds gates.
// ---------------------------------------------------------------------------

namespace detail {

struct SimplifyState {
  // konst[n]: 0/1 when net n proved constant, 2 otherwise.
  std::vector<std::uint8_t> konst;
  // alias[n]: net n is the same signal as alias[n] (kNoNet if none).
  std::vector<NetId> alias;

  NetId resolve(NetId n) {
    while (alias[n] != kNoNet) {
      if (alias[alias[n]] != kNoNet) alias[n] = alias[alias[n]];
      n = alias[n];
    }
    return n;
  }
};

}  // namespace detail

inline GateNetlist simplify(const GateNetlist& input) {
  GateNetlist cur = input;
  for (;;) {
    detail::SimplifyState st;
    st.konst.assign(cur.net_count, 2);
    st.alias.assign(cur.net_count, kNoNet);

    std::vector<Gate> folded;
    folded.reserve(cur.gates.size());
    for (Gate g : cur.gates) {
      if (g.a != kNoNet) g.a = st.resolve(g.a);
      if (g.b != kNoNet) g.b = st.resolve(g.b);
      int ka = g.a != kNoNet ? st.konst[g.a] : 2;
      int kb = g.b != kNoNet ? st.konst[g.b] : 2;

      auto make_const = [&](int v) { st.konst[g.out] = static_cast<std::uint8_t>(v); };
      auto make_alias = [&](NetId n) { st.alias[g.out] = n; };
      auto make_not = [&](NetId n) {
        folded.push_back(Gate{GateKind::Not, n, kNoNet, g.out});
      };

      switch (g.kind) {
        case GateKind::Const0: make_const(0); continue;
        case GateKind::Const1: make_const(1); continue;
        case GateKind::Buf:
          if (ka != 2) make_const(ka);
          else make_alias(g.a);
          continue;
        case GateKind::Not:
          if (ka != 2) { make_const(1 - ka); continue; }
          break;
        case GateKind::And:
        case GateKind::Nand: {
          bool inv = g.kind == GateKind::Nand;
          if (ka == 0 || kb == 0) { make_const(inv ? 1 : 0); continue; }
          if (ka == 1 && kb == 1) { make_const(inv ? 0 : 1); continue; }
          if (ka == 1 || kb == 1) {
            NetId x = ka == 1 ? g.b : g.a;
            if (inv) make_not(x); else make_alias(x);
            continue;
          }
          if (g.a == g.b) {
            if (inv) make_not(g.a); else make_alias(g.a);
            continue;
          }
          break;
        }
        case GateKind::Or:
        case GateKind::Nor: {
          bool inv = g.kind == GateKind::Nor;
          if (ka == 1 || kb == 1) { make_const(inv ? 0 : 1); continue; }
          if (ka == 0 && kb == 0) { make_const(inv ? 1 : 0); continue; }
          if (ka == 0 || kb == 0) {
            NetId x = ka == 0 ? g.b : g.a;
            if (inv) make_not(x); else make_alias(x);
            continue;
          }
          if (g.a == g.b) {
            if (inv) make_not(g.a); else make_alias(g.a);
            continue;
          }
          break;
        }
        case GateKind::Xor:
        case GateKind::Xnor: {
          bool inv = g.kind == GateKind::Xnor;
          if (ka != 2 && kb != 2) { make_const((ka ^ kb) ^ (inv ? 1 : 0)); continue; }
          if (g.a == g.b) { make_const(inv ? 1 : 0); continue; }
          if (ka != 2 || kb != 2) {
            int c = ka != 2 ? ka : kb;
            NetId x = ka != 2 ? g.b : g.a;
            bool negate = (c ^ (inv ? 1 : 0)) != 0;
            if (negate) make_not(x); else make_alias(x);
            continue;
          }
          break;
        }
      }
      folded.push_back(g);
    }

    // Mark gates reachable from the resolved outputs.
    std::vector<NetId> driver(cur.net_count, kNoNet);
    for (std::size_t i = 0; i < folded.size(); ++i) driver[folded[i].out] = static_cast<NetId>(i);
    std::vector<std::uint8_t> live(folded.size(), 0);
    std::vector<NetId> stack;
    auto mark_net = [&](NetId n) {
      if (driver[n] != kNoNet && !live[driver[n]]) {
        live[driver[n]] = 1;
        stack.push_back(driver[n]);
      }
    };
    for (const auto& p : cur.outputs)
      for (NetId n : p.bits) {
        NetId r = st.resolve(n);
        if (st.konst[r] == 2) mark_net(r);
      }
    while (!stack.empty()) {
      Gate& g = folded[stack.back()];
      stack.pop_back();
      if (g.a != kNoNet && st.konst[g.a] == 2) mark_net(g.a);
      if (g.b != kNoNet && st.konst[g.b] == 2) mark_net(g.b);
    }

    // Rebuild with compact net numbering; const output bits become CONST
    // gates, shared per polarity.
    GateNetlist next;
    std::vector<NetId> remap(cur.net_count, kNoNet);
    auto map_net = [&](NetId n) {
      if (remap[n] == kNoNet) remap[n] = next.new_net();
      return remap[n];
    };
    for (const auto& p : cur.inputs) {
      PortGroup q{p.name, {}};
      for (NetId n : p.bits) q.bits.push_back(map_net(n));
      next.inputs.push_back(std::move(q));
    }
    for (std::size_t i = 0; i < folded.size(); ++i) {
      if (!live[i]) continue;
      Gate g = folded[i];
      if (g.a != kNoNet) g.a = map_net(g.a);
      if (g.b != kNoNet) g.b = map_net(g.b);
      g.out = map_net(g.out);
      next.gates.push_back(g);
    }
    NetId const_net[2] = {kNoNet, kNoNet};
    for (const auto& p : cur.outputs) {
      PortGroup q{p.name, {}};
      for (NetId n : p.bits) {
        NetId r = st.resolve(n);
        if (st.konst[r] != 2) {
          int v = st.konst[r];
          if (const_net[v] == kNoNet) {
            const_net[v] = next.new_net();
            next.gates.push_back(Gate{v ? GateKind::Const1 : GateKind::Const0, kNoNet, kNoNet,
                                      const_net[v]});
          }
          q.bits.push_back(const_net[v]);
        } else {
          q.bits.push_back(map_net(r));
        }
      }
      next.outputs.push_back(std::move(q));
    }

    bool changed = next.gates.size() != cur.gates.size();
    if (!changed) {
      for (std::size_t i = 0; i < next.gates.size() && !changed; ++i)
        changed = next.gates[i].kind != cur.gates[i].kind;
    }
    if (!changed) return next;
    cur = std::move(next);
  }
}

// ---------------------------------------------------------------------------
// Cost accounting.
// ---------------------------------------------------------------------------

struct CostTable {
  std::array<double, kGateKindCount> area{};
  std::array<double, kGateKindCount> energy{};
  std::array<double, kGateKindCount> delay{};

  // Relative units: inverters/buffers 1, plain 2-input gates 2, XOR family 3,
  // constants free. Delay 1 per gate, switching energy equal to area.
  static CostTable defaults() {
    CostTable t;
    auto set = [&](GateKind k, double a, double d) {
      t.area[static_cast<int>(k)] = a;
      t.energy[static_cast<int>(k)] = a;
      t.delay[static_cast<int>(k)] = d;
    };
    set(GateKind::Const0, 0, 0);
    set(GateKind::Const1, 0, 0);
    set(GateKind::Buf, 1, 1);
    set(GateKind::Not, 1, 1);
    set(GateKind::And, 2, 1);
    set(GateKind::Or, 2, 1);
    set(GateKind::Xor, 3, 1);
    set(GateKind::Nand, 2, 1);
    set(GateKind::Nor, 2, 1);
    set(GateKind::Xnor, 3, 1);
    return t;
  }
};

inline double area(const GateNetlist& nl, const CostTable& cost = CostTable::defaults()) {
  double sum = 0;
  for (const Gate& g : nl.gates) sum += cost.area[static_cast<int>(g.kind)];
  return sum;
}

inline double depth(const GateNetlist& nl, const CostTable& cost = CostTable::defaults()) {
  std::vector<double> arrival(nl.net_count, 0);
  double worst = 0;
  for (const Gate& g : nl.gates) {
    double in = 0;
    if (g.a != kNoNet) in = std::max(in, arrival[g.a]);
    if (g.b != kNoNet) in = std::max(in, arrival[g.b]);
    arrival[g.out] = in + cost.delay[static_cast<int>(g.kind)];
    worst = std::max(worst, arrival[g.out]);
  }
  return worst;
}

// Switching-energy proxy under an independent-signal approximation: every
// net's one-probability is propagated from the input bit probabilities
// (0.5 each by default) and a gate contributes energy x 2p(1-p) of its
// output. Biased on reconvergent logic; used for reporting only.
inline double energy_proxy(const GateNetlist& nl, const CostTable& cost = CostTable::defaults(),
                           const std::vector<double>& input_bit_probs = {}) {
  std::vector<double> p1(nl.net_count, 0.5);
  std::size_t idx = 0;
  for (const auto& port : nl.inputs)
    for (NetId n : port.bits) {
      p1[n] = idx < input_bit_probs.size() ? input_bit_probs[idx] : 0.5;
      ++idx;
    }
  double total = 0;
  for (const Gate& g : nl.gates) {
    double a = g.a != kNoNet ? p1[g.a] : 0;
    double b = g.b != kNoNet ? p1[g.b] : 0;
    double y = 0;
    switch (g.kind) {
      case GateKind::Const0: y = 0; break;
      case GateKind::Const1: y = 1; break;
      case GateKind::Buf: y = a; break;
      case GateKind::Not: y = 1 - a; break;
      case GateKind::And: y = a * b; break;
      case GateKind::Or: y = a + b - a * b; break;
      case GateKind::Xor: y = a * (1 - b) + b * (1 - a); break;
      case GateKind::Nand: y = 1 - a * b; break;
      case GateKind::Nor: y = 1 - (a + b - a * b); break;
      case GateKind::Xnor: y = 1 - (a * (1 - b) + b * (1 - a)); break;
    }
    p1[g.out] = y;
    total += cost.energy[static_cast<int>(g.kind)] * 2.0 * y * (1.0 - y);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Text interchange.
// ---------------------------------------------------------------------------

// Nets are renumbered on output into the file convention: input bits first
// (MSB first, port order), then one id per gate in topological order.
inline void write_netlist(std::ostream& os, const GateNetlist& nl) {
  std::vector<NetId> rename(nl.net_count, kNoNet);
  NetId next = 0;
  for (const auto& p : nl.inputs) {
    os << "input " << p.name << ' ' << p.width() << '\n';
    for (int k = p.width() - 1; k >= 0; --k) rename[p.bits[k]] = next++;
  }
  for (const Gate& g : nl.gates) {
    rename[g.out] = next++;
    os << rename[g.out] << " = " << gate_name(g.kind);
    if (g.a != kNoNet) os << ' ' << rename[g.a];
    if (g.b != kNoNet) os << ' ' << rename[g.b];
    os << '\n';
  }
  for (const auto& p : nl.outputs) {
    os << "output " << p.name << ' ' << p.width();
    for (int k = p.width() - 1; k >= 0; --k) os << ' ' << rename[p.bits[k]];
    os << '\n';
  }
}

inline std::string netlist_to_string(const GateNetlist& nl) {
  std::ostringstream os;
  write_netlist(os, nl);
  return os.str();
}

inline GateNetlist parse_netlist(std::istream& is) {
  GateNetlist nl;
  std::string line;
  std::size_t lineno = 0;
  NetId max_net = 0;
  auto note_net = [&](NetId n) { max_net = std::max(max_net, n + 1); };
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string tok;
    if (!(ss >> tok)) continue;
    auto fail = [&](const std::string& what) {
      throw UserError("netlist line " + std::to_string(lineno) + ": " + what);
    };
    if (tok == "input") {
      PortGroup p;
      int width = 0;
      if (!(ss >> p.name >> width) || width <= 0) fail("bad input declaration");
      p.bits.resize(width);
      for (int k = width - 1; k >= 0; --k) {
        p.bits[k] = max_net;  // MSB first in the file, sequential ids
        ++max_net;
      }
      nl.inputs.push_back(std::move(p));
    } else if (tok == "output") {
      PortGroup p;
      int width = 0;
      if (!(ss >> p.name >> width) || width <= 0) fail("bad output declaration");
      p.bits.resize(width);
      for (int k = width - 1; k >= 0; --k) {
        NetId n;
        if (!(ss >> n)) fail("missing output net");
        p.bits[k] = n;
        note_net(n);
      }
      nl.outputs.push_back(std::move(p));
    } else {
      Gate g;
      char eq;
      NetId out;
      try {
        out = static_cast<NetId>(std::stoul(tok));
      } catch (...) {
        fail("unrecognized statement '" + tok + "'");
        return nl;  // unreachable
      }
      std::string kind;
      if (!(ss >> eq >> kind) || eq != '=') fail("expected '<net> = <KIND> ...'");
      g.kind = gate_from_name(kind);
      g.out = out;
      note_net(out);
      int arity = gate_arity(g.kind);
      if (arity >= 1) {
        if (!(ss >> g.a)) fail("missing fanin");
        note_net(g.a);
      }
      if (arity == 2) {
        if (!(ss >> g.b)) fail("missing fanin");
        note_net(g.b);
      }
      NetId extra;
      if (ss >> extra) fail("too many fanins");
      nl.gates.push_back(g);
    }
  }
  nl.net_count = max_net;
  nl.validate();
  return nl;
}

inline GateNetlist parse_netlist(const std::string& text) {
  std::istringstream is(text);
  return parse_netlist(is);
}

}  // namespace axdse
