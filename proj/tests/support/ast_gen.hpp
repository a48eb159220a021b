#pragma once

// Random generator of parser-reachable ASTs for round-trip properties.
// Only shapes the parser can produce are emitted: rows hold >= 2 non-row
// children, scripts never wrap rows, scripts or big operators, and a radical
// index never has a bare ']' at its top level.

#include <random>
#include <string>
#include <vector>

#include "mathseed/latex.hpp"

namespace mathseed::testing {

class AstGenerator {
 public:
  explicit AstGenerator(std::uint64_t seed) : rng_(seed) {
    for (const auto& s : whitelist_symbols()) {
      if (lookup_command(s) && lookup_command(s)->role == CommandRole::BigOp) {
        bigops_.push_back(s);
      } else {
        atoms_.push_back(s);
      }
    }
  }

  MathNode node(int max_depth) { return any(max_depth, false); }

 private:
  std::mt19937_64 rng_;
  std::vector<std::string> atoms_;
  std::vector<std::string> bigops_;

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  Atom atom(bool no_close_bracket) {
    for (;;) {
      const std::string& s = atoms_[static_cast<std::size_t>(pick(static_cast<int>(atoms_.size())))];
      if (no_close_bracket && s == "]") continue;
      return Atom{s, *symbol_class_of(s)};
    }
  }

  static std::optional<AtomClass> symbol_class_of(const std::string& s) {
    if (const auto* info = lookup_command(s)) return info->cls;
    return symbol_class(s);
  }

  // Any node; in_index forbids a top-level ']' atom.
  MathNode any(int depth, bool in_index) {
    if (depth <= 1) return atom(in_index);
    switch (pick(7)) {
      case 0: return atom(in_index);
      case 1: return row(depth, in_index);
      case 2: return Frac{any(depth - 1, false), any(depth - 1, false)};
      case 3: return script(depth, in_index);
      case 4: return sqrt(depth);
      case 5: return Group{any(depth - 1, false)};
      default: return bigop(depth);
    }
  }

  MathNode row(int depth, bool in_index) {
    const int n = 2 + pick(3);
    std::vector<MathNode> kids;
    for (int i = 0; i < n; ++i) {
      MathNode c = any(depth - 1, in_index);
      for (int tries = 0; c.is<Row>() && tries < 8; ++tries) c = any(depth - 1, in_index);
      if (c.is<Row>()) c = atom(in_index);
      kids.push_back(std::move(c));
    }
    return Row{std::move(kids)};
  }

  MathNode script_base(int depth, bool in_index) {
    if (depth <= 1) return atom(in_index);
    switch (pick(4)) {
      case 0: return atom(in_index);
      case 1: return Group{any(depth - 1, false)};
      case 2: return Frac{any(depth - 1, false), any(depth - 1, false)};
      default: return Sqrt{any(depth - 1, false), std::nullopt};
    }
  }

  MathNode script(int depth, bool in_index) {
    Script s{script_base(depth - 1, in_index), std::nullopt, std::nullopt};
    const int which = pick(3);
    if (which != 1) s.superscript = NodePtr(any(depth - 1, false));
    if (which != 0) s.subscript = NodePtr(any(depth - 1, false));
    return s;
  }

  MathNode sqrt(int depth) {
    Sqrt s{any(depth - 1, false), std::nullopt};
    if (pick(2)) s.index = NodePtr(any(depth - 1, true));
    return s;
  }

  MathNode bigop(int depth) {
    BigOp op{bigops_[static_cast<std::size_t>(pick(static_cast<int>(bigops_.size())))], std::nullopt, std::nullopt};
    const int which = pick(4);
    if (which & 1) op.lower = NodePtr(any(depth - 1, false));
    if (which & 2) op.upper = NodePtr(any(depth - 1, false));
    return op;
  }
};

inline int depth_of(const MathNode& n) {
  return std::visit(
      [](const auto& v) -> int {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Atom>) {
          return 1;
        } else if constexpr (std::is_same_v<T, Row>) {
          int d = 0;
          for (const auto& c : v.children) d = std::max(d, depth_of(c));
          return d + 1;
        } else if constexpr (std::is_same_v<T, Frac>) {
          return 1 + std::max(depth_of(*v.numerator), depth_of(*v.denominator));
        } else if constexpr (std::is_same_v<T, Script>) {
          int d = depth_of(*v.base);
          if (v.superscript) d = std::max(d, depth_of(**v.superscript));
          if (v.subscript) d = std::max(d, depth_of(**v.subscript));
          return d + 1;
        } else if constexpr (std::is_same_v<T, Sqrt>) {
          int d = depth_of(*v.radicand);
          if (v.index) d = std::max(d, depth_of(**v.index));
          return d + 1;
        } else if constexpr (std::is_same_v<T, Group>) {
          return 1 + depth_of(*v.child);
        } else {
          int d = 0;
          if (v.lower) d = std::max(d, depth_of(**v.lower));
          if (v.upper) d = std::max(d, depth_of(**v.upper));
          return d + 1;
        }
      },
      n.v);
}

}  // namespace mathseed::testing
