#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "axdse/common.hpp"

namespace axdse {

enum class OpKind : std::uint8_t { Add, Sub, Mul };

inline const char* op_kind_name(OpKind k) {
  switch (k) {
    case OpKind::Add: return "add";
    case OpKind::Sub: return "sub";
    case OpKind::Mul: return "mul";
  }
  return "?";
}

// An operation class: unsigned exact semantics plus declared port widths.
// Subtraction is absolute difference, addition truncates to the declared
// result width (only relevant for add16, whose carry-out is dropped).
struct OpClass {
  OpKind kind = OpKind::Add;
  int wa = 0;
  int wb = 0;
  int wout = 0;

  std::string name() const { return op_kind_name(kind) + std::to_string(wa); }

  int input_bits() const { return wa + wb; }

  std::uint64_t out_mask() const { return wout >= 64 ? ~0ull : (1ull << wout) - 1; }

  std::uint64_t exact(std::uint64_t a, std::uint64_t b) const {
    switch (kind) {
      case OpKind::Add: return (a + b) & out_mask();
      case OpKind::Sub: return a >= b ? a - b : b - a;
      case OpKind::Mul: return a * b;
    }
    return 0;
  }

  // Largest value exact() attains over the full operand domain.
  std::uint64_t max_output() const {
    std::uint64_t ma = (1ull << wa) - 1, mb = (1ull << wb) - 1;
    switch (kind) {
      case OpKind::Add: return std::min(ma + mb, out_mask());
      case OpKind::Sub: return std::max(ma, mb);
      case OpKind::Mul: return ma * mb;
    }
    return 0;
  }

  bool operator==(const OpClass& o) const {
    return kind == o.kind && wa == o.wa && wb == o.wb && wout == o.wout;
  }

  static OpClass add(int w) { return {OpKind::Add, w, w, w == 16 ? 16 : w + 1}; }
  static OpClass sub(int w) { return {OpKind::Sub, w, w, w}; }
  static OpClass mul(int w) { return {OpKind::Mul, w, w, 2 * w}; }

  // The accelerator benchmarks draw from these six instances.
  static const std::vector<OpClass>& all() {
    static const std::vector<OpClass> classes = {add(8), add(9),  add(16),
                                                 sub(10), sub(16), mul(8)};
    return classes;
  }

  static const OpClass& by_name(const std::string& name) {
    for (const OpClass& c : all())
      if (c.name() == name) return c;
    throw UserError("unknown operation class: '" + name + "'");
  }
};

}  // namespace axdse
