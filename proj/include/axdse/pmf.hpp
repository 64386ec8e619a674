#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "axdse/opclass.hpp"

namespace axdse {

// Sparse probability mass function over an operation's input tuples,
// gathered by profiling the exact accelerator on benchmark data.
struct Pmf {
  std::string op_class;
  std::vector<std::pair<std::uint64_t, double>> entries;  // key -> probability, sorted by key

  static std::uint64_t key(std::uint64_t a, std::uint64_t b) { return (a << 32) | b; }
  static std::uint64_t key_a(std::uint64_t k) { return k >> 32; }
  static std::uint64_t key_b(std::uint64_t k) { return k & 0xffffffffull; }

  std::size_t support_size() const { return entries.size(); }

  static Pmf from_counts(const std::string& op_class,
                         const std::unordered_map<std::uint64_t, std::uint64_t>& counts) {
    Pmf pmf;
    pmf.op_class = op_class;
    double total = 0;
    for (const auto& [k, c] : counts) total += static_cast<double>(c);
    pmf.entries.reserve(counts.size());
    for (const auto& [k, c] : counts) pmf.entries.emplace_back(k, static_cast<double>(c) / total);
    std::sort(pmf.entries.begin(), pmf.entries.end());
    return pmf;
  }

  static Pmf point_mass(const std::string& op_class, std::uint64_t a, std::uint64_t b) {
    Pmf pmf;
    pmf.op_class = op_class;
    pmf.entries.emplace_back(key(a, b), 1.0);
    return pmf;
  }

  void validate() const {
    double sum = 0;
    std::uint64_t prev_key = 0;
    bool first = true;
    for (const auto& [k, p] : entries) {
      if (!first && k <= prev_key) throw UserError("PMF entries not sorted/unique");
      prev_key = k;
      first = false;
      if (p < 0) throw UserError("negative PMF probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw UserError("PMF probabilities sum to " + std::to_string(sum) + ", expected 1");
  }

  // Distribution checks plus operand-range checks against a concrete class.
  void validate_for(const OpClass& cls) const {
    validate();
    for (const auto& [k, p] : entries)
      if (key_a(k) >= (1ull << cls.wa) || key_b(k) >= (1ull << cls.wb))
        throw UserError("PMF support tuple outside operand range for " + op_class);
  }
};

}  // namespace axdse
