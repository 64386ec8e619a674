#pragma once

#include <string>
#include <vector>

#include "axdse/accel.hpp"
#include "axdse/circgen.hpp"
#include "axdse/netlist.hpp"

namespace axdse {

// ---------------------------------------------------------------------------
// Ground-truth hardware cost: a configuration is flattened into one
// accelerator netlist, structurally simplified, and costed. Cross-component
// reductions (constant fan-in, logic orphaned by downstream truncation)
// fall out of simplify(), which is what makes the flat area differ from the
// sum of the catalog areas.
// ---------------------------------------------------------------------------

inline GateNetlist compose(const AccelGraph& g, const Configuration& cfg,
                           const Catalog& catalog) {
  auto circuits = resolve_configuration(g, cfg, catalog);
  GateNetlist flat;
  std::vector<std::vector<NetId>> nets(g.nodes.size());  // LSB first per node
  NetId zero = kNoNet;
  auto const0 = [&]() {
    if (zero == kNoNet) {
      zero = flat.new_net();
      flat.gates.push_back(Gate{GateKind::Const0, kNoNet, kNoNet, zero});
    }
    return zero;
  };

  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const GraphNode& n = g.nodes[i];
    switch (n.kind) {
      case NodeKind::PixelIn:
      case NodeKind::ParamIn: {
        PortGroup port{n.id, {}};
        for (int k = 0; k < n.width; ++k) port.bits.push_back(flat.new_net());
        nets[i] = port.bits;
        flat.inputs.push_back(std::move(port));
        break;
      }
      case NodeKind::Const: {
        nets[i].resize(n.width);
        for (int k = 0; k < n.width; ++k) {
          NetId bit = flat.new_net();
          flat.gates.push_back(Gate{((n.value >> k) & 1u) ? GateKind::Const1 : GateKind::Const0,
                                    kNoNet, kNoNet, bit});
          nets[i][k] = bit;
        }
        break;
      }
      case NodeKind::Op: {
        const AxCircuit& circuit = *circuits[g.op_position(n.id)];
        const GateNetlist& unit = circuit.netlist;
        std::vector<NetId> remap(unit.net_count, kNoNet);
        auto bind_operand = [&](const PortGroup& port, const std::vector<NetId>& src) {
          for (int k = 0; k < port.width(); ++k)
            remap[port.bits[k]] = k < int(src.size()) ? src[k] : const0();
        };
        bind_operand(unit.inputs[0], nets[n.a]);
        bind_operand(unit.inputs[1], nets[n.b]);
        for (const Gate& gate : unit.gates) {
          Gate h = gate;
          if (h.a != kNoNet) h.a = remap[h.a];
          if (h.b != kNoNet) h.b = remap[h.b];
          NetId out = flat.new_net();
          remap[h.out] = out;
          h.out = out;
          flat.gates.push_back(h);
        }
        nets[i].resize(n.width);
        for (int k = 0; k < n.width; ++k) nets[i][k] = remap[unit.outputs[0].bits[k]];
        break;
      }
      case NodeKind::ShiftLeft: {
        nets[i].resize(n.width);
        for (int k = 0; k < n.width; ++k)
          nets[i][k] = k < n.amount ? const0() : nets[n.a][k - n.amount];
        break;
      }
      case NodeKind::ShiftRight: {
        nets[i].assign(nets[n.a].begin() + n.amount, nets[n.a].end());
        break;
      }
      case NodeKind::Output: {
        const auto& src = nets[n.a];
        nets[i].resize(8);
        if (src.size() <= 8) {
          for (int k = 0; k < 8; ++k) nets[i][k] = k < int(src.size()) ? src[k] : const0();
        } else {
          NetId sat = src[8];
          for (std::size_t k = 9; k < src.size(); ++k) {
            NetId t = flat.new_net();
            flat.gates.push_back(Gate{GateKind::Or, sat, src[k], t});
            sat = t;
          }
          for (int k = 0; k < 8; ++k) {
            NetId t = flat.new_net();
            flat.gates.push_back(Gate{GateKind::Or, src[k], sat, t});
            nets[i][k] = t;
          }
        }
        break;
      }
    }
  }
  flat.outputs.push_back(PortGroup{"y", nets[g.output_node]});
  flat.validate();
  return flat;
}

struct HwCost {
  double area = 0;
  double delay = 0;
  double power = 0;
};

// Cost of the simplified flat accelerator under the relative cost table.
inline HwCost hw_cost(const AccelGraph& g, const Configuration& cfg, const Catalog& catalog,
                      const CostTable& cost = CostTable::defaults()) {
  GateNetlist flat = simplify(compose(g, cfg, catalog));
  HwCost hc;
  hc.area = area(flat, cost);
  hc.delay = depth(flat, cost);
  hc.power = energy_proxy(flat, cost);
  return hc;
}

// Sum of the standalone catalog areas; the additive model the flat netlist is
// compared against.
inline double component_area_sum(const AccelGraph& g, const Configuration& cfg,
                                 const Catalog& catalog) {
  double sum = 0;
  for (const AxCircuit* c : resolve_configuration(g, cfg, catalog)) sum += c->chr.area;
  return sum;
}

}  // namespace axdse
