#pragma once

#include <array>
#include <cassert>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "axdse/circgen.hpp"
#include "axdse/image.hpp"
#include "axdse/pmf.hpp"

namespace axdse {

// ---------------------------------------------------------------------------
// Accelerator dataflow graphs over a 3x3 pixel window. Operation nodes are
// the replaceable arithmetic units; shifts, constants and the clamped output
// are fixed wiring.
// ---------------------------------------------------------------------------

enum class NodeKind : std::uint8_t { PixelIn, ParamIn, Const, Op, ShiftLeft, ShiftRight, Output };

struct GraphNode {
  std::string id;
  NodeKind kind;
  OpClass op{};             // Op nodes only
  int a = -1, b = -1;       // argument node indexes
  int amount = 0;           // shift amount
  std::uint32_t value = 0;  // window index / param index / constant
  int width = 0;            // result width in bits
};

struct AccelGraph {
  std::string name;
  std::vector<GraphNode> nodes;  // topological order
  std::vector<int> op_nodes;
  int output_node = -1;
  int param_count = 0;

  std::vector<std::pair<std::string, OpClass>> op_node_classes() const {
    std::vector<std::pair<std::string, OpClass>> out;
    out.reserve(op_nodes.size());
    for (int i : op_nodes) out.emplace_back(nodes[i].id, nodes[i].op);
    return out;
  }

  int op_position(const std::string& node_id) const {
    for (std::size_t k = 0; k < op_nodes.size(); ++k)
      if (nodes[op_nodes[k]].id == node_id) return static_cast<int>(k);
    throw UserError("no operation node '" + node_id + "' in " + name);
  }
};

namespace detail {

class GraphBuilder {
 public:
  explicit GraphBuilder(std::string name) { g_.name = std::move(name); }

  int pixel(int window_index) {
    return add({"p" + std::to_string(window_index), NodeKind::PixelIn, {}, -1, -1, 0,
                std::uint32_t(window_index), 8});
  }
  int param(int index) {
    g_.param_count = std::max(g_.param_count, index + 1);
    return add({"k" + std::to_string(index), NodeKind::ParamIn, {}, -1, -1, 0,
                std::uint32_t(index), 8});
  }
  int op(const std::string& id, const OpClass& cls, int a, int b) {
    if (g_.nodes[a].width > cls.wa || g_.nodes[b].width > cls.wb)
      throw UserError("operand wider than class port for node " + id);
    int n = add({id, NodeKind::Op, cls, a, b, 0, 0, cls.wout});
    g_.op_nodes.push_back(n);
    return n;
  }
  int shl(int a, int amount) {
    return add({"shl" + std::to_string(g_.nodes.size()), NodeKind::ShiftLeft, {}, a, -1, amount,
                0, g_.nodes[a].width + amount});
  }
  int shr(int a, int amount) {
    if (g_.nodes[a].width <= amount) throw UserError("right shift wider than value");
    return add({"shr" + std::to_string(g_.nodes.size()), NodeKind::ShiftRight, {}, a, -1, amount,
                0, g_.nodes[a].width - amount});
  }
  int output(int a) {
    int n = add({"out", NodeKind::Output, {}, a, -1, 0, 0, 8});
    g_.output_node = n;
    return n;
  }
  AccelGraph finish() {
    if (g_.output_node < 0) throw UserError("graph has no output node");
    return std::move(g_);
  }

 private:
  int add(GraphNode node) {
    g_.nodes.push_back(std::move(node));
    return static_cast<int>(g_.nodes.size() - 1);
  }
  AccelGraph g_;
};

}  // namespace detail

// --------------------------- Gaussian kernels ------------------------------

inline std::array<double, 9> gaussian_kernel3(double sigma) {
  std::array<double, 9> k{};
  for (int y = -1; y <= 1; ++y)
    for (int x = -1; x <= 1; ++x)
      k[(y + 1) * 3 + (x + 1)] = std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
  return k;
}

// Largest-remainder quantization to integers summing to exactly 256 (the
// normalization then reduces to a right shift). Ties go to lower row-major
// index.
inline std::array<int, 9> quantize_kernel_256(const std::array<double, 9>& raw) {
  double sum = 0;
  for (double v : raw) sum += v;
  std::array<int, 9> q{};
  std::array<std::pair<double, int>, 9> rem{};
  int assigned = 0;
  for (int i = 0; i < 9; ++i) {
    double scaled = raw[i] * 256.0 / sum;
    q[i] = static_cast<int>(std::floor(scaled));
    rem[i] = {scaled - q[i], i};
    assigned += q[i];
  }
  std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  for (int i = 0; i < 256 - assigned; ++i) q[rem[i].second] += 1;
  for (int v : q)
    if (v < 0 || v > 255) throw UserError("kernel coefficient " + std::to_string(v) +
                                          " does not fit 8 bits");
  return q;
}

// ------------------------------ benchmarks ---------------------------------

// Vertical-edge Sobel: two column sums built from shared adders, absolute
// difference, clamp to 8 bits.
inline AccelGraph build_sobel() {
  detail::GraphBuilder b("sobel");
  int p0 = b.pixel(0), p2 = b.pixel(2), p3 = b.pixel(3), p5 = b.pixel(5), p6 = b.pixel(6),
      p8 = b.pixel(8);
  int add1 = b.op("add1", OpClass::add(8), p0, p6);
  int add2 = b.op("add2", OpClass::add(9), add1, b.shl(p3, 1));
  int add3 = b.op("add3", OpClass::add(8), p2, p8);
  int add4 = b.op("add4", OpClass::add(9), add3, b.shl(p5, 1));
  int sub = b.op("sub", OpClass::sub(10), add4, add2);
  b.output(sub);
  return b.finish();
}

// Fixed Gaussian filter, sigma = 2, kernel quantized to sum 256:
//     26 30 26
//     30 33 30
//     26 29 26
// The symmetric part is realized as 26*C + 30*E + 33*m over the corner and
// edge sums with shift-add (CSD) constant multipliers; the quantization
// remainder landed on the bottom edge (29 = 30 - 1), folded in as one final
// subtraction. The exact output never exceeds 16 bits: 26*1020 + 30*1020 +
// 33*255 = 65535.
inline AccelGraph build_fixed_gf() {
  std::array<int, 9> kernel = quantize_kernel_256(gaussian_kernel3(2.0));
  const std::array<int, 9> expected = {26, 30, 26, 30, 33, 30, 26, 29, 26};
  if (kernel != expected) throw UserError("fixed GF kernel drifted from the derived constants");

  detail::GraphBuilder b("fixed_gf");
  int c00 = b.pixel(0), c20 = b.pixel(2), c02 = b.pixel(6), c22 = b.pixel(8);
  int e10 = b.pixel(1), e01 = b.pixel(3), e21 = b.pixel(5), e12 = b.pixel(7);
  int m = b.pixel(4);

  int add_c1 = b.op("add_c1", OpClass::add(8), c00, c20);
  int add_c2 = b.op("add_c2", OpClass::add(8), c02, c22);
  int corner = b.op("add_c", OpClass::add(9), add_c1, add_c2);   // C, 10 bits
  int add_e1 = b.op("add_e1", OpClass::add(8), e10, e01);
  int add_e2 = b.op("add_e2", OpClass::add(8), e21, e12);
  int edge = b.op("add_e", OpClass::add(9), add_e1, add_e2);     // E, 10 bits

  // 26*C = (C<<4) + (C<<3) + (C<<1)
  int x1 = b.op("add_x1", OpClass::add(16), b.shl(corner, 4), b.shl(corner, 3));
  int x2 = b.op("add_x2", OpClass::add(16), x1, b.shl(corner, 1));
  // 30*E = (E<<5) - (E<<1)
  int y30 = b.op("sub_y", OpClass::sub(16), b.shl(edge, 5), b.shl(edge, 1));
  // 33*m = (m<<5) + m
  int z33 = b.op("add_z", OpClass::add(16), b.shl(m, 5), m);
  int t1 = b.op("add_t1", OpClass::add(16), x2, y30);
  int t2 = b.op("add_t2", OpClass::add(16), t1, z33);
  int corrected = b.op("sub_o", OpClass::sub(16), t2, e12);  // bottom edge weight is 29
  b.output(b.shr(corrected, 8));
  return b.finish();
}

// Generic 3x3 convolution: nine multipliers against runtime coefficients
// (quantized to sum 256) and a balanced accumulation tree. The accumulator
// never exceeds 255 * 256 < 2^16.
inline AccelGraph build_generic_gf() {
  detail::GraphBuilder b("generic_gf");
  std::array<int, 9> mul{};
  for (int i = 0; i < 9; ++i)
    mul[i] = b.op("mul" + std::to_string(i), OpClass::mul(8), b.pixel(i), b.param(i));
  int t0 = b.op("add0", OpClass::add(16), mul[0], mul[1]);
  int t1 = b.op("add1", OpClass::add(16), mul[2], mul[3]);
  int t2 = b.op("add2", OpClass::add(16), mul[4], mul[5]);
  int t3 = b.op("add3", OpClass::add(16), mul[6], mul[7]);
  int t4 = b.op("add4", OpClass::add(16), t0, t1);
  int t5 = b.op("add5", OpClass::add(16), t2, t3);
  int t6 = b.op("add6", OpClass::add(16), t4, t5);
  int t7 = b.op("add7", OpClass::add(16), t6, mul[8]);
  b.output(b.shr(t7, 8));
  return b.finish();
}

inline AccelGraph build_benchmark(const std::string& name) {
  if (name == "sobel") return build_sobel();
  if (name == "fixed_gf") return build_fixed_gf();
  if (name == "generic_gf") return build_generic_gf();
  throw UserError("unknown benchmark '" + name + "' (expected sobel, fixed_gf or generic_gf)");
}

// ---------------------------- configurations -------------------------------

// Assignment of one library circuit per operation node, aligned with
// graph.op_nodes order.
struct Configuration {
  std::vector<std::string> circuit_ids;

  bool operator==(const Configuration& o) const { return circuit_ids == o.circuit_ids; }
};

inline Configuration exact_configuration(const AccelGraph& g) {
  Configuration cfg;
  cfg.circuit_ids.reserve(g.op_nodes.size());
  for (int i : g.op_nodes) cfg.circuit_ids.push_back(g.nodes[i].op.name() + "_exact");
  return cfg;
}

// Resolves a configuration against the catalog, enforcing class consistency.
inline std::vector<const AxCircuit*> resolve_configuration(const AccelGraph& g,
                                                           const Configuration& cfg,
                                                           const Catalog& catalog) {
  if (cfg.circuit_ids.size() != g.op_nodes.size())
    throw UserError("configuration has " + std::to_string(cfg.circuit_ids.size()) +
                    " assignments, graph " + g.name + " has " +
                    std::to_string(g.op_nodes.size()) + " operation nodes");
  std::vector<const AxCircuit*> resolved(cfg.circuit_ids.size());
  for (std::size_t k = 0; k < cfg.circuit_ids.size(); ++k) {
    const AxCircuit& c = catalog.by_id(cfg.circuit_ids[k]);
    const GraphNode& node = g.nodes[g.op_nodes[k]];
    if (!(c.op == node.op))
      throw UserError("circuit " + c.id + " (class " + c.op.name() +
                      ") assigned to node " + node.id + " of class " + node.op.name());
    resolved[k] = &c;
  }
  return resolved;
}

// ------------------------- exact integer reference -------------------------

inline void exact_node_values(const AccelGraph& g, const std::array<std::uint8_t, 9>& window,
                              const std::vector<std::uint32_t>& params,
                              std::vector<std::uint32_t>& values) {
  values.resize(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const GraphNode& n = g.nodes[i];
    switch (n.kind) {
      case NodeKind::PixelIn: values[i] = window[n.value]; break;
      case NodeKind::ParamIn: values[i] = params.at(n.value); break;
      case NodeKind::Const: values[i] = n.value; break;
      case NodeKind::Op:
        values[i] = static_cast<std::uint32_t>(n.op.exact(values[n.a], values[n.b]));
        break;
      case NodeKind::ShiftLeft: values[i] = values[n.a] << n.amount; break;
      case NodeKind::ShiftRight: values[i] = values[n.a] >> n.amount; break;
      case NodeKind::Output: values[i] = std::min<std::uint32_t>(values[n.a], 255); break;
    }
  }
}

inline std::array<std::uint8_t, 9> gather_window(const Image& img, int x, int y) {
  std::array<std::uint8_t, 9> w{};
  for (int wy = 0; wy < 3; ++wy)
    for (int wx = 0; wx < 3; ++wx) w[wy * 3 + wx] = img.at_clamped(x + wx - 1, y + wy - 1);
  return w;
}

// Exact-semantics software model; profiling and oracle duties.
inline Image simulate_reference(const AccelGraph& g, const Image& img,
                                const std::vector<std::uint32_t>& params = {}) {
  Image out(img.width, img.height);
  std::vector<std::uint32_t> values;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      exact_node_values(g, gather_window(img, x, y), params, values);
      out.at(x, y) = static_cast<std::uint8_t>(values[g.output_node]);
    }
  return out;
}

// ------------------------- configured lane simulator ------------------------

// Bit-parallel simulation: 64 output pixels advance together, each operation
// node running its assigned circuit's netlist on 64 lanes.
class ConfiguredSim {
 public:
  ConfiguredSim(const AccelGraph& g, const Configuration& cfg, const Catalog& catalog)
      : graph_(&g), circuits_(resolve_configuration(g, cfg, catalog)),
        op_pos_(g.nodes.size(), -1) {
    for (std::size_t k = 0; k < g.op_nodes.size(); ++k) op_pos_[g.op_nodes[k]] = int(k);
  }

  const AccelGraph& graph() const { return *graph_; }

  Image run(const Image& img, const std::vector<std::uint32_t>& params = {}) const {
    check_params(params);
    Image out(img.width, img.height);
    std::vector<std::vector<std::uint64_t>> planes(graph_->nodes.size());
    for (std::size_t i = 0; i < graph_->nodes.size(); ++i)
      planes[i].assign(std::size_t(graph_->nodes[i].width), 0);
    std::vector<LaneEvaluator> evals;
    evals.reserve(circuits_.size());
    for (const AxCircuit* c : circuits_) evals.emplace_back(c->netlist);

    const std::size_t npix = std::size_t(img.width) * img.height;
    std::uint64_t vals[64];
    std::vector<std::uint64_t> operand_buf(64);
    for (std::size_t base = 0; base < npix; base += 64) {
      std::size_t count = std::min<std::size_t>(64, npix - base);
      for (std::size_t i = 0; i < graph_->nodes.size(); ++i) {
        const GraphNode& n = graph_->nodes[i];
        switch (n.kind) {
          case NodeKind::PixelIn: {
            int wx = int(n.value) % 3 - 1, wy = int(n.value) / 3 - 1;
            for (std::size_t j = 0; j < count; ++j) {
              std::size_t p = base + j;
              vals[j] = img.at_clamped(int(p % img.width) + wx, int(p / img.width) + wy);
            }
            pack_values(vals, count, 8, planes[i].data());
            break;
          }
          case NodeKind::ParamIn:
            broadcast(params[n.value], planes[i]);
            break;
          case NodeKind::Const:
            broadcast(n.value, planes[i]);
            break;
          case NodeKind::Op: {
            const OpClass& cls = n.op;
            int k_op = op_pos_[i];
            operand_buf.assign(std::size_t(cls.wa + cls.wb), 0);
            copy_planes(planes[n.a], operand_buf.data(), cls.wa);
            copy_planes(planes[n.b], operand_buf.data() + cls.wa, cls.wb);
            LaneEvaluator& ev = evals[k_op];
            ev.run(operand_buf.data());
            const PortGroup& yport = circuits_[k_op]->netlist.outputs[0];
            for (int k = 0; k < n.width; ++k) planes[i][k] = ev.net_plane(yport.bits[k]);
            break;
          }
          case NodeKind::ShiftLeft:
            for (int k = n.width - 1; k >= 0; --k)
              planes[i][k] = k >= n.amount ? planes[n.a][k - n.amount] : 0;
            break;
          case NodeKind::ShiftRight:
            for (int k = 0; k < n.width; ++k) planes[i][k] = planes[n.a][k + n.amount];
            break;
          case NodeKind::Output: {
            const auto& src = planes[n.a];
            int aw = graph_->nodes[n.a].width;
            std::uint64_t sat = 0;
            for (int k = 8; k < aw; ++k) sat |= src[k];
            for (int k = 0; k < 8; ++k) planes[i][k] = (k < aw ? src[k] : 0) | sat;
            break;
          }
        }
      }
      unpack_values(planes[graph_->output_node].data(), 8, count, vals);
      for (std::size_t j = 0; j < count; ++j) out.pixels[base + j] = std::uint8_t(vals[j]);
    }
    return out;
  }

  // Single-window evaluation of the configured graph. The center pixel of a
  // 3x3 image sees exactly `window`.
  std::uint32_t eval_window(const std::array<std::uint8_t, 9>& window,
                            const std::vector<std::uint32_t>& params = {}) const {
    Image im3(3, 3);
    for (int k = 0; k < 9; ++k) im3.pixels[k] = window[k];
    return run(im3, params).at(1, 1);
  }

 private:
  static void broadcast(std::uint32_t v, std::vector<std::uint64_t>& planes) {
    for (std::size_t k = 0; k < planes.size(); ++k)
      planes[k] = ((v >> k) & 1u) ? ~0ull : 0ull;
  }
  static void copy_planes(const std::vector<std::uint64_t>& src, std::uint64_t* dst, int width) {
    for (int k = 0; k < width; ++k) dst[k] = k < int(src.size()) ? src[k] : 0;
  }
  void check_params(const std::vector<std::uint32_t>& params) const {
    if (int(params.size()) != graph_->param_count)
      throw UserError("graph " + graph_->name + " expects " +
                      std::to_string(graph_->param_count) + " parameters, got " +
                      std::to_string(params.size()));
    for (std::uint32_t p : params)
      if (p > 255) throw UserError("parameter value " + std::to_string(p) + " exceeds 8 bits");
  }

  const AccelGraph* graph_;
  std::vector<const AxCircuit*> circuits_;
  std::vector<int> op_pos_;
};

inline Image simulate(const AccelGraph& g, const Configuration& cfg, const Catalog& catalog,
                      const Image& img, const std::vector<std::uint32_t>& params = {}) {
  return ConfiguredSim(g, cfg, catalog).run(img, params);
}

// ------------------------------- profiling ---------------------------------

// Operand-tuple PMFs per operation node, gathered with the exact reference
// model over all images (and parameter sets, for kernels at runtime).
inline std::map<std::string, Pmf> profile_pmfs(
    const AccelGraph& g, const std::vector<Image>& images,
    const std::vector<std::vector<std::uint32_t>>& param_sets = {{}}) {
  if (images.empty()) throw UserError("profiling requires at least one image");
  if (param_sets.empty()) throw UserError("profiling requires at least one parameter set");
  struct NodeCounts {
    std::unordered_map<std::uint64_t, std::uint64_t> counts;
  };
  std::vector<NodeCounts> per_op(g.op_nodes.size());
  std::vector<std::uint32_t> values;
  for (const auto& params : param_sets)
    for (const Image& img : images)
      for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
          exact_node_values(g, gather_window(img, x, y), params, values);
          for (std::size_t k = 0; k < g.op_nodes.size(); ++k) {
            const GraphNode& n = g.nodes[g.op_nodes[k]];
            per_op[k].counts[Pmf::key(values[n.a], values[n.b])] += 1;
          }
        }
  std::map<std::string, Pmf> pmfs;
  for (std::size_t k = 0; k < g.op_nodes.size(); ++k) {
    const GraphNode& n = g.nodes[g.op_nodes[k]];
    pmfs.emplace(n.id, Pmf::from_counts(n.op.name(), per_op[k].counts));
  }
  return pmfs;
}

// ------------------------------ PMF persistence ----------------------------

inline void save_pmfs(const std::filesystem::path& path, const std::map<std::string, Pmf>& pmfs) {
  CsvWriter out(path);
  out.row({"node_id", "op_class", "a", "b", "prob"});
  for (const auto& [node, pmf] : pmfs)
    for (const auto& [key, p] : pmf.entries)
      out.row({node, pmf.op_class, std::to_string(Pmf::key_a(key)),
               std::to_string(Pmf::key_b(key)), format_double(p)});
}

inline std::map<std::string, Pmf> load_pmfs(const std::filesystem::path& path) {
  CsvTable table = read_csv(path);
  int col_node = table.column("node_id"), col_class = table.column("op_class");
  int col_a = table.column("a"), col_b = table.column("b"), col_p = table.column("prob");
  std::map<std::string, Pmf> pmfs;
  for (const auto& row : table.rows) {
    Pmf& pmf = pmfs[row[col_node]];
    pmf.op_class = row[col_class];
    pmf.entries.emplace_back(Pmf::key(std::stoull(row[col_a]), std::stoull(row[col_b])),
                             parse_double(row[col_p]));
  }
  for (auto& [node, pmf] : pmfs) std::sort(pmf.entries.begin(), pmf.entries.end());
  return pmfs;
}

}  // namespace axdse
