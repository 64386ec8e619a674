#pragma once

#include <algorithm>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "axdse/circgen.hpp"
#include "axdse/csv.hpp"
#include "axdse/pmf.hpp"

namespace axdse {

// ---------------------------------------------------------------------------
// Step 1: application-aware scoring and per-operation Pareto reduction.
// ---------------------------------------------------------------------------

// Expected absolute arithmetic error of `circuit` under the operation's PMF.
// Only the support tuples are evaluated.
inline double score_wmed(const AxCircuit& circuit, const Pmf& pmf) {
  if (pmf.op_class != circuit.op.name())
    throw UserError("PMF class " + pmf.op_class + " does not match circuit class " +
                    circuit.op.name());
  pmf.validate_for(circuit.op);
  return detail::pmf_error_stats(circuit, pmf).wmed;
}

struct ScoredCircuit {
  std::string id;
  double wmed = 0;
  double area = 0;
};

// Non-dominated subset when minimizing both wmed and area. Points that tie on
// both objectives are collapsed to the lexicographically smallest id.
inline std::vector<ScoredCircuit> pareto_filter(std::vector<ScoredCircuit> candidates) {
  if (candidates.empty()) throw UserError("pareto_filter: empty candidate list");
  std::sort(candidates.begin(), candidates.end(), [](const ScoredCircuit& x, const ScoredCircuit& y) {
    if (x.wmed != y.wmed) return x.wmed < y.wmed;
    if (x.area != y.area) return x.area < y.area;
    return x.id < y.id;
  });
  std::vector<ScoredCircuit> front;
  double best_area = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  while (i < candidates.size()) {
    // Within one wmed value only the smallest area can survive.
    std::size_t j = i;
    while (j < candidates.size() && candidates[j].wmed == candidates[i].wmed &&
           candidates[j].area == candidates[i].area)
      ++j;
    const ScoredCircuit& c = candidates[i];
    if (c.area < best_area) {
      front.push_back(c);
      best_area = c.area;
    }
    // Skip the rest of this wmed group; they are dominated or duplicates.
    while (j < candidates.size() && candidates[j].wmed == candidates[i].wmed) ++j;
    i = j;
  }
  return front;
}

struct ReducedNode {
  std::string node_id;
  std::string op_class;
  std::vector<ScoredCircuit> entries;  // sorted by wmed ascending
};

struct ReducedLibrary {
  std::vector<ReducedNode> nodes;  // in accelerator op-node order

  const ReducedNode& node(const std::string& id) const {
    for (const auto& n : nodes)
      if (n.node_id == id) return n;
    throw UserError("no reduced library for node '" + id + "'");
  }

  std::vector<std::size_t> sizes() const {
    std::vector<std::size_t> s;
    s.reserve(nodes.size());
    for (const auto& n : nodes) s.push_back(n.entries.size());
    return s;
  }

  double configuration_count() const {
    double p = 1;
    for (const auto& n : nodes) p *= static_cast<double>(n.entries.size());
    return p;
  }
};

// Keeps `cap` entries of an already reduced node, evenly spaced along the
// wmed-sorted frontier with both endpoints retained. Used to build small
// instances that an exhaustive oracle can enumerate.
inline std::vector<ScoredCircuit> thin_frontier(const std::vector<ScoredCircuit>& entries,
                                                std::size_t cap) {
  if (cap == 0 || entries.size() <= cap) return entries;
  std::vector<ScoredCircuit> out;
  out.reserve(cap);
  for (std::size_t i = 0; i < cap; ++i) {
    std::size_t idx = (i * (entries.size() - 1) + (cap - 1) / 2) / (cap - 1);
    out.push_back(entries[idx]);
  }
  // Evenly spaced indexes over a strictly sorted list never repeat.
  return out;
}

// Per-node Pareto reduction over (WMED_k, area). The class-exact circuit is
// re-inserted if a degenerate PMF let a cheaper zero-error circuit evict it,
// so every node always retains the identity option.
inline ReducedLibrary reduce_library(const Catalog& catalog,
                                     const std::vector<std::pair<std::string, OpClass>>& op_nodes,
                                     const std::map<std::string, Pmf>& pmfs,
                                     std::size_t cap_per_node = 0) {
  ReducedLibrary reduced;
  reduced.nodes.resize(op_nodes.size());
  std::vector<std::vector<const AxCircuit*>> class_circuits(op_nodes.size());
  for (std::size_t n = 0; n < op_nodes.size(); ++n) {
    if (!pmfs.count(op_nodes[n].first))
      throw UserError("no PMF provided for operation node '" + op_nodes[n].first + "'");
    class_circuits[n] = catalog.of_class(op_nodes[n].second);
    if (class_circuits[n].empty())
      throw UserError("catalog has no circuits of class " + op_nodes[n].second.name());
  }
  parallel_for(op_nodes.size(), [&](std::size_t n) {
    const auto& [node_id, cls] = op_nodes[n];
    const Pmf& pmf = pmfs.at(node_id);
    std::vector<ScoredCircuit> scored(class_circuits[n].size());
    for (std::size_t i = 0; i < scored.size(); ++i) {
      const AxCircuit& c = *class_circuits[n][i];
      scored[i] = ScoredCircuit{c.id, score_wmed(c, pmf), c.chr.area};
    }
    std::vector<ScoredCircuit> front = pareto_filter(std::move(scored));
    const std::string exact_id = cls.name() + "_exact";
    bool has_exact = std::any_of(front.begin(), front.end(),
                                 [&](const ScoredCircuit& s) { return s.id == exact_id; });
    if (!has_exact) {
      const AxCircuit& exact = catalog.exact_of(cls);
      front.push_back(ScoredCircuit{exact.id, 0.0, exact.chr.area});
      std::sort(front.begin(), front.end(), [](const ScoredCircuit& x, const ScoredCircuit& y) {
        return x.wmed != y.wmed ? x.wmed < y.wmed : x.area < y.area;
      });
    }
    front = thin_frontier(front, cap_per_node);
    reduced.nodes[n] = ReducedNode{node_id, cls.name(), std::move(front)};
  });
  return reduced;
}

inline void save_reduced_library(const std::filesystem::path& path, const ReducedLibrary& lib) {
  CsvWriter out(path);
  out.row({"node_id", "op_class", "circuit_id", "wmed", "area"});
  for (const auto& node : lib.nodes)
    for (const auto& e : node.entries)
      out.row({node.node_id, node.op_class, e.id, format_double(e.wmed), format_double(e.area)});
}

inline ReducedLibrary load_reduced_library(const std::filesystem::path& path) {
  CsvTable table = read_csv(path);
  int col_node = table.column("node_id"), col_class = table.column("op_class");
  int col_id = table.column("circuit_id"), col_wmed = table.column("wmed");
  int col_area = table.column("area");
  ReducedLibrary lib;
  for (const auto& row : table.rows) {
    if (lib.nodes.empty() || lib.nodes.back().node_id != row[col_node])
      lib.nodes.push_back(ReducedNode{row[col_node], row[col_class], {}});
    lib.nodes.back().entries.push_back(
        ScoredCircuit{row[col_id], parse_double(row[col_wmed]), parse_double(row[col_area])});
  }
  return lib;
}

}  // namespace axdse
