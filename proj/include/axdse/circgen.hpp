#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "axdse/csv.hpp"
#include "axdse/netlist.hpp"
#include "axdse/opclass.hpp"
#include "axdse/pmf.hpp"

namespace axdse {

// ---------------------------------------------------------------------------
// Parametric approximate-circuit families.
//
//  qa  - quality-configurable adders/subtractors: low result bits replaced by
//        a fixed policy (the carry chain is kept, so the forced bits simplify
//        away), plus optional severed carry boundaries that split the chain
//        into independent segments.
//  bam - broken-array multipliers: schoolbook array with partial products
//        dropped below the vertical/horizontal break diagonals.
// ---------------------------------------------------------------------------

enum class TruncPolicy : std::uint8_t { Zero, CopyA };

struct QaParams {
  int cut = 0;
  TruncPolicy policy = TruncPolicy::Zero;
  std::vector<int> boundaries;  // strictly increasing, each in (cut, width)
};

struct Characterization {
  double area = 0, delay = 0, power = 0;
  double med = 0, wce = 0, err_variance = 0;
  std::uint64_t eval_points = 0;
  bool exhaustive = true;
  std::map<std::string, double> wmed;  // application id -> WMED
};

struct AxCircuit {
  std::string id;
  OpClass op;
  std::string family;  // exact | qa | bam
  std::string params;
  GateNetlist netlist;  // stored simplified; evaluation ground truth
  Characterization chr;
};

// --------------------------- netlist builders ------------------------------

namespace detail {

struct FullAdderOut {
  NetId sum, carry;
};

inline FullAdderOut full_adder(GateNetlist& nl, NetId a, NetId b, NetId c) {
  NetId axb = nl.new_net();
  nl.gates.push_back(Gate{GateKind::Xor, a, b, axb});
  NetId s = nl.new_net();
  nl.gates.push_back(Gate{GateKind::Xor, axb, c, s});
  NetId t1 = nl.new_net();
  nl.gates.push_back(Gate{GateKind::And, a, b, t1});
  NetId t2 = nl.new_net();
  nl.gates.push_back(Gate{GateKind::And, axb, c, t2});
  NetId carry = nl.new_net();
  nl.gates.push_back(Gate{GateKind::Or, t1, t2, carry});
  return {s, carry};
}

inline NetId const_net(GateNetlist& nl, bool one) {
  NetId n = nl.new_net();
  nl.gates.push_back(Gate{one ? GateKind::Const1 : GateKind::Const0, kNoNet, kNoNet, n});
  return n;
}

}  // namespace detail

// Ripple-carry adder built from uniform full-adder stages. Carries entering
// a severed position are tied to 0, which splits the chain into independent
// sub-adders.
inline GateNetlist build_ripple_adder(int wa, int wb, int wout,
                                      const std::vector<int>& severed = {}) {
  GateNetlist nl;
  PortGroup a{"a", {}}, b{"b", {}};
  for (int i = 0; i < wa; ++i) a.bits.push_back(nl.new_net());
  for (int i = 0; i < wb; ++i) b.bits.push_back(nl.new_net());
  nl.inputs = {a, b};
  NetId zero = detail::const_net(nl, false);
  int w = std::max(wa, wb);
  NetId carry = zero;
  std::vector<NetId> sum(w, kNoNet);
  for (int i = 0; i < w; ++i) {
    if (std::find(severed.begin(), severed.end(), i) != severed.end()) carry = zero;
    NetId ai = i < wa ? a.bits[i] : zero;
    NetId bi = i < wb ? b.bits[i] : zero;
    auto fa = detail::full_adder(nl, ai, bi, carry);
    sum[i] = fa.sum;
    carry = fa.carry;
  }
  PortGroup y{"y", {}};
  for (int k = 0; k < wout; ++k) {
    if (k < w) y.bits.push_back(sum[k]);
    else if (k == w) y.bits.push_back(carry);
    else y.bits.push_back(zero);
  }
  nl.outputs = {y};
  nl.validate();
  return nl;
}

// |a-b| via complement addition followed by a conditional negate. Severed
// positions restart the borrow chain with the same carry-in the chain starts
// with, so a single segment is exact.
inline GateNetlist build_abs_subtractor(int w, int wout, const std::vector<int>& severed = {}) {
  GateNetlist nl;
  PortGroup a{"a", {}}, b{"b", {}};
  for (int i = 0; i < w; ++i) a.bits.push_back(nl.new_net());
  for (int i = 0; i < w; ++i) b.bits.push_back(nl.new_net());
  nl.inputs = {a, b};
  NetId one = detail::const_net(nl, true);
  NetId zero = detail::const_net(nl, false);

  NetId carry = one;
  std::vector<NetId> s(w);
  for (int i = 0; i < w; ++i) {
    if (std::find(severed.begin(), severed.end(), i) != severed.end()) carry = one;
    NetId nb = nl.new_net();
    nl.gates.push_back(Gate{GateKind::Not, b.bits[i], kNoNet, nb});
    auto fa = detail::full_adder(nl, a.bits[i], nb, carry);
    s[i] = fa.sum;
    carry = fa.carry;
  }
  // carry == 1 iff a >= b; otherwise negate (invert and increment).
  NetId neg = nl.new_net();
  nl.gates.push_back(Gate{GateKind::Not, carry, kNoNet, neg});
  std::vector<NetId> r(w);
  NetId inc = neg;
  for (int i = 0; i < w; ++i) {
    NetId x = nl.new_net();
    nl.gates.push_back(Gate{GateKind::Xor, s[i], neg, x});
    NetId ri = nl.new_net();
    nl.gates.push_back(Gate{GateKind::Xor, x, inc, ri});
    r[i] = ri;
    if (i + 1 < w) {
      NetId ni = nl.new_net();
      nl.gates.push_back(Gate{GateKind::And, x, inc, ni});
      inc = ni;
    }
  }
  PortGroup y{"y", {}};
  for (int k = 0; k < wout; ++k) y.bits.push_back(k < w ? r[k] : zero);
  nl.outputs = {y};
  nl.validate();
  return nl;
}

// Schoolbook array multiplier. keep(i, j) decides whether the partial
// product a_i * b_j is realized or replaced by constant zero.
template <typename KeepFn>
GateNetlist build_array_multiplier(int wa, int wb, KeepFn&& keep) {
  GateNetlist nl;
  PortGroup a{"a", {}}, b{"b", {}};
  for (int i = 0; i < wa; ++i) a.bits.push_back(nl.new_net());
  for (int i = 0; i < wb; ++i) b.bits.push_back(nl.new_net());
  nl.inputs = {a, b};
  NetId zero = detail::const_net(nl, false);

  auto pp = [&](int i, int j) -> NetId {
    if (!keep(i, j)) return zero;
    NetId n = nl.new_net();
    nl.gates.push_back(Gate{GateKind::And, a.bits[i], b.bits[j], n});
    return n;
  };

  int wout = wa + wb;
  std::vector<NetId> acc(wout, kNoNet);
  for (int i = 0; i < wa; ++i) acc[i] = pp(i, 0);
  for (int j = 1; j < wb; ++j) {
    NetId carry = zero;
    for (int i = 0; i < wa; ++i) {
      int k = i + j;
      NetId cur = acc[k] != kNoNet ? acc[k] : zero;
      auto fa = detail::full_adder(nl, cur, pp(i, j), carry);
      acc[k] = fa.sum;
      carry = fa.carry;
    }
    int k = wa + j;
    while (carry != zero && k < wout) {
      if (acc[k] == kNoNet || acc[k] == zero) {
        acc[k] = carry;
        break;
      }
      NetId s = nl.new_net();
      nl.gates.push_back(Gate{GateKind::Xor, acc[k], carry, s});
      NetId c = nl.new_net();
      nl.gates.push_back(Gate{GateKind::And, acc[k], carry, c});
      acc[k] = s;
      carry = c;
      ++k;
    }
  }
  PortGroup y{"y", {}};
  for (int k = 0; k < wout; ++k) y.bits.push_back(acc[k] != kNoNet ? acc[k] : zero);
  nl.outputs = {y};
  nl.validate();
  return nl;
}

// Replaces the low `cut` result bits with the truncation policy. The carry
// chain still sees the full operands; the orphaned sum logic is removed by
// simplify().
inline void apply_output_truncation(GateNetlist& nl, int cut, TruncPolicy policy) {
  if (cut == 0) return;
  PortGroup& y = nl.outputs.at(0);
  NetId zero = kNoNet;
  for (int k = 0; k < cut; ++k) {
    if (policy == TruncPolicy::Zero) {
      if (zero == kNoNet) zero = detail::const_net(nl, false);
      y.bits[k] = zero;
    } else {
      y.bits[k] = nl.inputs[0].bits[k];
    }
  }
}

// ------------------------------ generators ---------------------------------

namespace detail {

inline std::string qa_param_string(const QaParams& p) {
  std::string s = "c" + std::to_string(p.cut);
  if (p.cut > 0) s += p.policy == TruncPolicy::Zero ? 'z' : 'a';
  if (!p.boundaries.empty()) {
    s += "_b";
    for (std::size_t i = 0; i < p.boundaries.size(); ++i) {
      if (i) s += '-';
      s += std::to_string(p.boundaries[i]);
    }
  }
  return s;
}

inline void check_qa_params(const OpClass& cls, const QaParams& p) {
  int w = cls.wa;
  if (p.cut < 0 || p.cut >= w)
    throw UserError(cls.name() + ": truncation cut " + std::to_string(p.cut) +
                    " outside [0, " + std::to_string(w) + ")");
  int prev = p.cut;
  for (int b : p.boundaries) {
    if (b <= prev || b >= w)
      throw UserError(cls.name() + ": bad segment boundary " + std::to_string(b));
    prev = b;
  }
}

}  // namespace detail

inline AxCircuit gen_exact(const OpClass& cls) {
  AxCircuit c;
  c.op = cls;
  c.family = "exact";
  c.id = cls.name() + "_exact";
  GateNetlist nl;
  switch (cls.kind) {
    case OpKind::Add: nl = build_ripple_adder(cls.wa, cls.wb, cls.wout); break;
    case OpKind::Sub: nl = build_abs_subtractor(cls.wa, cls.wout); break;
    case OpKind::Mul:
      nl = build_array_multiplier(cls.wa, cls.wb, [](int, int) { return true; });
      break;
  }
  c.netlist = simplify(nl);
  return c;
}

inline AxCircuit gen_qa_adder(const OpClass& cls, const QaParams& p) {
  detail::check_qa_params(cls, p);
  AxCircuit c;
  c.op = cls;
  c.family = "qa";
  c.params = detail::qa_param_string(p);
  c.id = cls.name() + "_qa_" + c.params;
  GateNetlist nl = build_ripple_adder(cls.wa, cls.wb, cls.wout, p.boundaries);
  apply_output_truncation(nl, p.cut, p.policy);
  c.netlist = simplify(nl);
  return c;
}

inline AxCircuit gen_qa_subtractor(const OpClass& cls, const QaParams& p) {
  detail::check_qa_params(cls, p);
  AxCircuit c;
  c.op = cls;
  c.family = "qa";
  c.params = detail::qa_param_string(p);
  c.id = cls.name() + "_qa_" + c.params;
  GateNetlist nl = build_abs_subtractor(cls.wa, cls.wout, p.boundaries);
  apply_output_truncation(nl, p.cut, p.policy);
  c.netlist = simplify(nl);
  return c;
}

inline AxCircuit gen_truncated_adder(int width, int cut, TruncPolicy policy = TruncPolicy::Zero) {
  if (cut == 0) return gen_exact(OpClass::add(width));
  return gen_qa_adder(OpClass::add(width), QaParams{cut, policy, {}});
}

inline AxCircuit gen_segmented_adder(int width, const std::vector<int>& boundaries) {
  if (boundaries.empty()) return gen_exact(OpClass::add(width));
  return gen_qa_adder(OpClass::add(width), QaParams{0, TruncPolicy::Zero, boundaries});
}

// Partial products are dropped on the low-significance side: the vertical
// break removes whole columns (diagonals) below `v`; the horizontal break
// removes the adder cells below `h` while the first row's products pass
// through.
inline AxCircuit gen_broken_array_multiplier(int width, int hbreak, int vbreak) {
  OpClass cls = OpClass::mul(width);
  if (hbreak < 0 || hbreak > 2 * width || vbreak < 0 || vbreak > 2 * width)
    throw UserError(cls.name() + ": break levels must lie in [0, " + std::to_string(2 * width) +
                    "]");
  AxCircuit c;
  c.op = cls;
  c.family = "bam";
  c.params = "h" + std::to_string(hbreak) + "_v" + std::to_string(vbreak);
  c.id = cls.name() + "_bam_" + c.params;
  auto keep = [&](int i, int j) {
    if (i + j < vbreak) return false;
    if (i + j < hbreak && j > 0) return false;
    return true;
  };
  c.netlist = simplify(build_array_multiplier(cls.wa, cls.wb, keep));
  return c;
}

// ---------------------------- characterization -----------------------------

struct CharacterizeOptions {
  int exhaustive_bits = 20;           // total input bits enumerable exhaustively
  std::uint64_t sample_count = 1 << 18;  // stratified samples above that
  CostTable cost = CostTable::defaults();
};

namespace detail {

struct ErrorStats {
  double mean = 0, variance = 0;
  std::uint64_t max = 0;
  std::uint64_t points = 0;
};

inline ErrorStats uniform_error_stats(const AxCircuit& c, const CharacterizeOptions& opt) {
  const OpClass& cls = c.op;
  LaneEvaluator ev(c.netlist);
  std::vector<std::uint64_t> planes(cls.wa + cls.wb);
  const PortGroup& y = c.netlist.outputs[0];
  std::uint64_t sum = 0, sum_sq = 0, max_err = 0, points = 0;

  auto run_block = [&](const std::uint64_t* va, const std::uint64_t* vb, std::size_t count) {
    pack_values(va, count, cls.wa, planes.data());
    pack_values(vb, count, cls.wb, planes.data() + cls.wa);
    ev.run(planes.data());
    for (std::size_t j = 0; j < count; ++j) {
      std::uint64_t got = 0;
      for (int k = 0; k < cls.wout; ++k) got |= ((ev.net_plane(y.bits[k]) >> j) & 1u) << k;
      std::uint64_t want = cls.exact(va[j], vb[j]);
      std::uint64_t err = got > want ? got - want : want - got;
      sum += err;
      sum_sq += err * err;
      max_err = std::max(max_err, err);
    }
    points += count;
  };

  std::uint64_t va[64], vb[64];
  if (cls.input_bits() <= opt.exhaustive_bits) {
    std::uint64_t na = 1ull << cls.wa, nb = 1ull << cls.wb;
    for (std::uint64_t a = 0; a < na; ++a) {
      for (std::uint64_t b0 = 0; b0 < nb; b0 += 64) {
        std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(64, nb - b0));
        for (std::size_t j = 0; j < count; ++j) {
          va[j] = a;
          vb[j] = b0 + j;
        }
        run_block(va, vb, count);
      }
    }
  } else {
    // Stratified sampling: 16x16 grid over the operand high bits, equal
    // budget per cell, deterministic stream per circuit.
    std::uint64_t state = fnv1a(c.id) ^ 0xa076bdecull;
    int sa = cls.wa - 4, sb = cls.wb - 4;
    std::uint64_t per_cell = std::max<std::uint64_t>(1, opt.sample_count / 256);
    std::size_t fill = 0;
    for (int ca = 0; ca < 16; ++ca)
      for (int cb = 0; cb < 16; ++cb)
        for (std::uint64_t s = 0; s < per_cell; ++s) {
          std::uint64_t r = splitmix64(state);
          va[fill] = (std::uint64_t(ca) << sa) | (r & ((1ull << sa) - 1));
          vb[fill] = (std::uint64_t(cb) << sb) | ((r >> 32) & ((1ull << sb) - 1));
          if (++fill == 64) {
            run_block(va, vb, 64);
            fill = 0;
          }
        }
    if (fill) run_block(va, vb, fill);
  }

  ErrorStats st;
  st.points = points;
  st.mean = static_cast<double>(sum) / static_cast<double>(points);
  st.variance = static_cast<double>(sum_sq) / static_cast<double>(points) - st.mean * st.mean;
  st.max = max_err;
  return st;
}

struct PmfStats {
  double wmed = 0, variance = 0;
};

inline PmfStats pmf_error_stats(const AxCircuit& c, const Pmf& pmf) {
  const OpClass& cls = c.op;
  LaneEvaluator ev(c.netlist);
  std::vector<std::uint64_t> planes(cls.wa + cls.wb);
  const PortGroup& y = c.netlist.outputs[0];
  double mean = 0, mean_sq = 0;
  std::uint64_t va[64], vb[64];
  double pr[64];
  std::size_t n = pmf.entries.size();
  for (std::size_t base = 0; base < n; base += 64) {
    std::size_t count = std::min<std::size_t>(64, n - base);
    for (std::size_t j = 0; j < count; ++j) {
      va[j] = Pmf::key_a(pmf.entries[base + j].first);
      vb[j] = Pmf::key_b(pmf.entries[base + j].first);
      pr[j] = pmf.entries[base + j].second;
    }
    pack_values(va, count, cls.wa, planes.data());
    pack_values(vb, count, cls.wb, planes.data() + cls.wa);
    ev.run(planes.data());
    for (std::size_t j = 0; j < count; ++j) {
      std::uint64_t got = 0;
      for (int k = 0; k < cls.wout; ++k) got |= ((ev.net_plane(y.bits[k]) >> j) & 1u) << k;
      std::uint64_t want = cls.exact(va[j], vb[j]);
      double err = static_cast<double>(got > want ? got - want : want - got);
      mean += pr[j] * err;
      mean_sq += pr[j] * err * err;
    }
  }
  PmfStats st;
  st.wmed = mean;
  st.variance = mean_sq - mean * mean;
  return st;
}

}  // namespace detail

// Full characterization record. Error statistics (med/wce) come from uniform
// enumeration (exhaustive when the input space fits in opt.exhaustive_bits,
// stratified sampling otherwise); when a PMF is supplied, err_variance is
// weighted by it and its WMED is recorded under app_id.
inline Characterization characterize(const AxCircuit& circuit, const Pmf* pmf = nullptr,
                                     const std::string& app_id = "",
                                     const CharacterizeOptions& opt = {}) {
  if (pmf) {
    if (pmf->op_class != circuit.op.name())
      throw UserError("PMF class " + pmf->op_class + " does not match circuit class " +
                      circuit.op.name());
    pmf->validate_for(circuit.op);
  }
  Characterization chr;
  chr.area = area(circuit.netlist, opt.cost);
  chr.delay = depth(circuit.netlist, opt.cost);
  chr.power = energy_proxy(circuit.netlist, opt.cost);
  detail::ErrorStats uni = detail::uniform_error_stats(circuit, opt);
  chr.med = uni.mean;
  chr.wce = static_cast<double>(uni.max);
  chr.err_variance = uni.variance;
  chr.eval_points = uni.points;
  chr.exhaustive = circuit.op.input_bits() <= opt.exhaustive_bits;
  if (pmf) {
    detail::PmfStats ps = detail::pmf_error_stats(circuit, *pmf);
    chr.err_variance = ps.variance;
    if (!app_id.empty()) chr.wmed[app_id] = ps.wmed;
  }
  return chr;
}

// ------------------------------ default library ----------------------------

struct LibrarySpec {
  std::vector<OpClass> classes = OpClass::all();
  int max_boundaries = 3;       // segment-subset size cap for narrow classes
  int max_boundaries_wide = 2;  // and for 16-bit classes
  CharacterizeOptions characterize;
};

namespace detail {

inline void boundary_subsets(const std::vector<int>& pool, int max_size,
                             std::vector<std::vector<int>>& out) {
  out.push_back({});
  std::vector<int> combo;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (!combo.empty()) out.push_back(combo);
    if (static_cast<int>(combo.size()) == max_size) return;
    for (std::size_t i = start; i < pool.size(); ++i) {
      combo.push_back(pool[i]);
      rec(i + 1);
      combo.pop_back();
    }
  };
  rec(0);
}

inline std::vector<int> boundary_pool(int width) {
  std::vector<int> pool;
  if (width <= 10) {
    for (int b = 1; b < width; ++b) pool.push_back(b);
  } else {
    for (int b = 2; b < width; b += 2) pool.push_back(b);
  }
  return pool;
}

}  // namespace detail

// Deterministic parameter grid for one class; the exact circuit is always the
// first entry and appears exactly once.
inline std::vector<AxCircuit> generate_class_circuits(const OpClass& cls,
                                                      const LibrarySpec& spec) {
  std::vector<AxCircuit> out;
  out.push_back(gen_exact(cls));
  if (cls.kind == OpKind::Mul) {
    // Break-level pairs collapse whenever one condition subsumes the other,
    // so the grid is keyed on the realized cell mask; each surviving array is
    // additionally combined with result truncation for quality coverage.
    std::set<std::pair<std::vector<bool>, std::uint32_t>> seen;
    for (int h = 0; h <= 2 * cls.wa; ++h)
      for (int v = 0; v <= 2 * cls.wa; ++v) {
        std::vector<bool> mask(cls.wa * cls.wb);
        bool all_kept = true;
        for (int i = 0; i < cls.wa; ++i)
          for (int j = 0; j < cls.wb; ++j) {
            bool keep = !(i + j < v || (i + j < h && j > 0));
            mask[j * cls.wa + i] = keep;
            all_kept = all_kept && keep;
          }
        auto column_dead = [&](int c) {
          return c < v || (c >= cls.wa && c < h);  // no row-0 cell above wa-1
        };
        for (int t : {0, 2, 4, 6, 8}) {
          if (all_kept && t == 0) continue;  // the exact circuit, emitted above
          if (t >= cls.wout) continue;
          std::uint32_t zeroed = 0;
          for (int c = 0; c < cls.wout; ++c)
            if (c < t || column_dead(c)) zeroed |= 1u << c;
          if (!seen.insert({mask, zeroed}).second) continue;
          AxCircuit c = gen_broken_array_multiplier(cls.wa, h, v);
          if (t > 0) {
            GateNetlist nl = c.netlist;
            apply_output_truncation(nl, t, TruncPolicy::Zero);
            c.netlist = simplify(nl);
            c.params += "_t" + std::to_string(t);
            c.id = cls.name() + "_bam_" + c.params;
          }
          out.push_back(std::move(c));
        }
      }
    return out;
  }
  int w = cls.wa;
  std::vector<int> pool = detail::boundary_pool(w);
  int max_size = w <= 10 ? spec.max_boundaries : spec.max_boundaries_wide;
  for (int cut = 0; cut < w; ++cut) {
    std::vector<int> usable;
    for (int b : pool)
      if (b > cut) usable.push_back(b);
    std::vector<std::vector<int>> subsets;
    detail::boundary_subsets(usable, max_size, subsets);
    std::vector<TruncPolicy> policies =
        cut == 0 ? std::vector<TruncPolicy>{TruncPolicy::Zero}
                 : std::vector<TruncPolicy>{TruncPolicy::Zero, TruncPolicy::CopyA};
    for (TruncPolicy pol : policies)
      for (const auto& subset : subsets) {
        if (cut == 0 && subset.empty()) continue;  // that is the exact circuit
        QaParams p{cut, pol, subset};
        out.push_back(cls.kind == OpKind::Add ? gen_qa_adder(cls, p)
                                              : gen_qa_subtractor(cls, p));
      }
  }
  return out;
}

inline std::vector<AxCircuit> build_default_library(const LibrarySpec& spec = {}) {
  std::vector<AxCircuit> all;
  for (const OpClass& cls : spec.classes) {
    auto circuits = generate_class_circuits(cls, spec);
    all.insert(all.end(), std::make_move_iterator(circuits.begin()),
               std::make_move_iterator(circuits.end()));
  }
  parallel_for(all.size(),
               [&](std::size_t i) { all[i].chr = characterize(all[i], nullptr, "", spec.characterize); });
  std::sort(all.begin(), all.end(),
            [](const AxCircuit& x, const AxCircuit& y) { return x.id < y.id; });
  return all;
}

// ------------------------------- catalog I/O -------------------------------

inline void save_catalog(const std::filesystem::path& dir, const std::vector<AxCircuit>& circuits) {
  std::filesystem::create_directories(dir / "netlists");
  std::vector<const AxCircuit*> order;
  order.reserve(circuits.size());
  for (const auto& c : circuits) order.push_back(&c);
  std::sort(order.begin(), order.end(),
            [](const AxCircuit* x, const AxCircuit* y) { return x->id < y->id; });
  CsvWriter manifest(dir / "manifest.csv");
  manifest.row({"id", "op_class", "family", "params", "area", "delay", "power", "med", "wce",
                "err_variance"});
  for (const AxCircuit* c : order) {
    std::ofstream net(dir / "netlists" / (c->id + ".net"));
    if (!net) throw UserError("cannot write netlist for " + c->id);
    write_netlist(net, c->netlist);
    manifest.row({c->id, c->op.name(), c->family, c->params, format_double(c->chr.area),
                  format_double(c->chr.delay), format_double(c->chr.power),
                  format_double(c->chr.med), format_double(c->chr.wce),
                  format_double(c->chr.err_variance)});
  }
}

inline std::vector<AxCircuit> load_catalog(const std::filesystem::path& dir) {
  CsvTable manifest = read_csv(dir / "manifest.csv");
  int col_id = manifest.column("id"), col_class = manifest.column("op_class");
  int col_family = manifest.column("family"), col_params = manifest.column("params");
  int col_area = manifest.column("area"), col_delay = manifest.column("delay");
  int col_power = manifest.column("power"), col_med = manifest.column("med");
  int col_wce = manifest.column("wce"), col_var = manifest.column("err_variance");
  std::vector<AxCircuit> out(manifest.rows.size());
  parallel_for(manifest.rows.size(), [&](std::size_t i) {
    const auto& row = manifest.rows[i];
    AxCircuit& c = out[i];
    c.id = row[col_id];
    c.op = OpClass::by_name(row[col_class]);
    c.family = row[col_family];
    c.params = row[col_params];
    c.chr.area = parse_double(row[col_area]);
    c.chr.delay = parse_double(row[col_delay]);
    c.chr.power = parse_double(row[col_power]);
    c.chr.med = parse_double(row[col_med]);
    c.chr.wce = parse_double(row[col_wce]);
    c.chr.err_variance = parse_double(row[col_var]);
    std::ifstream net(dir / "netlists" / (c.id + ".net"));
    if (!net) throw UserError("missing netlist file for circuit " + c.id);
    c.netlist = parse_netlist(net);
  });
  return out;
}

// Convenience lookup table over a catalog.
class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(std::vector<AxCircuit> circuits) : circuits_(std::move(circuits)) {
    for (std::size_t i = 0; i < circuits_.size(); ++i) {
      if (!index_.emplace(circuits_[i].id, i).second)
        throw UserError("duplicate circuit id: " + circuits_[i].id);
    }
  }

  const std::vector<AxCircuit>& circuits() const { return circuits_; }

  const AxCircuit& by_id(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw UserError("unknown circuit id: '" + id + "'");
    return circuits_[it->second];
  }

  bool contains(const std::string& id) const { return index_.count(id) != 0; }

  std::vector<const AxCircuit*> of_class(const OpClass& cls) const {
    std::vector<const AxCircuit*> out;
    for (const auto& c : circuits_)
      if (c.op == cls) out.push_back(&c);
    return out;
  }

  const AxCircuit& exact_of(const OpClass& cls) const {
    return by_id(cls.name() + "_exact");
  }

 private:
  std::vector<AxCircuit> circuits_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace axdse
