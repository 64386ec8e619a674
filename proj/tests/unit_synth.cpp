#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "axdse/synth.hpp"
#include "test_util.hpp"

using namespace axdse;

namespace {

Catalog make_catalog() {
  std::vector<AxCircuit> circuits;
  for (const OpClass& cls : OpClass::all()) circuits.push_back(gen_exact(cls));
  circuits.push_back(gen_qa_adder(OpClass::add(9), QaParams{8, TruncPolicy::Zero, {}}));
  circuits.push_back(gen_qa_adder(OpClass::add(8), QaParams{3, TruncPolicy::Zero, {5}}));
  circuits.push_back(gen_qa_subtractor(OpClass::sub(10), QaParams{5, TruncPolicy::CopyA, {}}));
  circuits.push_back(gen_qa_subtractor(OpClass::sub(16), QaParams{8, TruncPolicy::Zero, {}}));
  circuits.push_back(gen_broken_array_multiplier(8, 8, 4));
  circuits.push_back(gen_qa_adder(OpClass::add(16), QaParams{6, TruncPolicy::Zero, {12}}));
  for (auto& c : circuits) c.chr = characterize(c);
  return Catalog(std::move(circuits));
}

// Evaluates a composed flat netlist on one window/parameter assignment using
// the independent interpreter from test_util.
std::uint32_t flat_eval(const GateNetlist& flat, const std::array<std::uint8_t, 9>& window,
                        const std::vector<std::uint32_t>& params) {
  std::vector<std::uint8_t> val(flat.net_count, 0);
  for (const auto& port : flat.inputs) {
    std::uint32_t v = 0;
    if (port.name[0] == 'p') v = window[std::stoi(port.name.substr(1))];
    else if (port.name[0] == 'k') v = params.at(std::stoi(port.name.substr(1)));
    for (int k = 0; k < port.width(); ++k) val[port.bits[k]] = (v >> k) & 1u;
  }
  for (const Gate& g : flat.gates) {
    std::uint8_t a = g.a != kNoNet ? val[g.a] : 0;
    std::uint8_t b = g.b != kNoNet ? val[g.b] : 0;
    std::uint8_t y = 0;
    switch (g.kind) {
      case GateKind::Const0: y = 0; break;
      case GateKind::Const1: y = 1; break;
      case GateKind::Buf: y = a; break;
      case GateKind::Not: y = !a; break;
      case GateKind::And: y = a & b; break;
      case GateKind::Or: y = a | b; break;
      case GateKind::Xor: y = a ^ b; break;
      case GateKind::Nand: y = !(a & b); break;
      case GateKind::Nor: y = !(a | b); break;
      case GateKind::Xnor: y = !(a ^ b); break;
    }
    val[g.out] = y;
  }
  std::uint32_t out = 0;
  const auto& yport = flat.outputs[0];
  for (int k = 0; k < yport.width(); ++k) out |= std::uint32_t(val[yport.bits[k]]) << k;
  return out;
}

}  // namespace

TEST_CASE("composed netlists agree with the simulator") {
  Catalog catalog = make_catalog();
  std::mt19937_64 rng(31337);
  for (const char* name : {"sobel", "fixed_gf", "generic_gf"}) {
    AccelGraph g = build_benchmark(name);
    std::vector<Configuration> cfgs = {exact_configuration(g)};
    {
      // one mixed configuration per benchmark
      Configuration mixed = exact_configuration(g);
      for (std::size_t k = 0; k < mixed.circuit_ids.size(); k += 2) {
        const OpClass& cls = g.nodes[g.op_nodes[k]].op;
        for (const AxCircuit* c : catalog.of_class(cls))
          if (c->family != "exact") mixed.circuit_ids[k] = c->id;
      }
      cfgs.push_back(mixed);
    }
    std::vector<std::uint32_t> params;
    if (g.param_count) {
      auto kernel = quantize_kernel_256(gaussian_kernel3(0.55));
      params.assign(kernel.begin(), kernel.end());
    }
    for (const Configuration& cfg : cfgs) {
      GateNetlist flat = simplify(compose(g, cfg, catalog));
      ConfiguredSim sim(g, cfg, catalog);
      for (int i = 0; i < 250; ++i) {
        std::array<std::uint8_t, 9> window;
        for (auto& w : window) w = std::uint8_t(rng());
        REQUIRE(flat_eval(flat, window, params) == sim.eval_window(window, params));
      }
    }
  }
}

TEST_CASE("composing a single-op graph is the circuit plus declared output glue") {
  Catalog catalog = make_catalog();
  detail::GraphBuilder b("single");
  int p0 = b.pixel(0), p1 = b.pixel(1);
  b.output(b.op("add", OpClass::add(8), p0, p1));
  AccelGraph g = b.finish();
  Configuration cfg{{"add8_exact"}};
  GateNetlist flat = compose(g, cfg, catalog);
  const GateNetlist& unit = catalog.by_id("add8_exact").netlist;
  // The 9-bit adder output is clamped to 8 bits: one saturate net plus 8 ORs.
  CHECK(flat.gates.size() == unit.gates.size() + 8);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    std::uint64_t a = rng() & 255, bb = rng() & 255;
    std::uint64_t expect = std::min<std::uint64_t>(a + bb, 255);
    std::array<std::uint8_t, 9> window{};
    window[0] = std::uint8_t(a);
    window[1] = std::uint8_t(bb);
    REQUIRE(flat_eval(flat, window, {}) == expect);
  }
}

TEST_CASE("hw cost is deterministic") {
  Catalog catalog = make_catalog();
  AccelGraph g = build_sobel();
  Configuration cfg = exact_configuration(g);
  cfg.circuit_ids[1] = "add9_qa_c8z";
  HwCost a = hw_cost(g, cfg, catalog);
  HwCost b = hw_cost(g, cfg, catalog);
  CHECK(a.area == b.area);
  CHECK(a.delay == b.delay);
  CHECK(a.power == b.power);
  CHECK(a.area > 0);
  CHECK(a.delay > 0);
}

TEST_CASE("flat area stays within component sum plus output glue") {
  Catalog catalog = make_catalog();
  for (const char* name : {"sobel", "fixed_gf", "generic_gf"}) {
    AccelGraph g = build_benchmark(name);
    Configuration cfg = exact_configuration(g);
    double flat_area = hw_cost(g, cfg, catalog).area;
    double sum = component_area_sum(g, cfg, catalog);
    // The only gates composition adds are the Sobel clamp (9 OR gates).
    double glue = g.nodes[g.nodes[g.output_node].a].width > 8 ? 18.0 : 0.0;
    CHECK(flat_area <= sum + glue);
  }
}

TEST_CASE("downstream truncation eliminates upstream logic") {
  Catalog catalog = make_catalog();
  AccelGraph g = build_sobel();
  Configuration cfg = exact_configuration(g);
  cfg.circuit_ids[1] = "add9_qa_c8z";  // add2 keeps only its MSB
  cfg.circuit_ids[3] = "add9_qa_c8z";  // add4 likewise
  double flat_area = hw_cost(g, cfg, catalog).area;
  double sum = component_area_sum(g, cfg, catalog);
  CHECK(flat_area < 0.95 * sum);

  double exact_area = hw_cost(g, exact_configuration(g), catalog).area;
  CHECK(flat_area < exact_area);
}
