#pragma once

#include "brbo/corelang.hpp"

namespace brbo {

struct DomTree {
  std::string entry;
  // Immediate dominators for reachable locations; entry maps to itself.
  std::map<std::string, std::string> idom;
  std::vector<std::string> pruned_unreachable;

  bool reachable(const std::string& loc) const { return idom.count(loc) != 0; }
  // Reflexive domination. Unreachable b is vacuously dominated; unreachable a
  // dominates nothing reachable.
  bool dominates(const std::string& a, const std::string& b) const;
  // b, idom(b), ..., entry. Empty for unreachable locations.
  std::vector<std::string> chain(const std::string& b) const;
  // Deepest location dominating every member of locs (they must be reachable).
  std::string common_dominator(const std::vector<std::string>& locs) const;
};

// Iterative dataflow: dom(entry) = {entry}; dom(n) = {n} ∪ ⋂ dom(preds);
// repeat to fixpoint, then read off immediate dominators.
DomTree dominator_tree(const Program& p);

// Transitive data dependencies of the use expression at a `use` edge:
// start from its free variables and close under assignment right-hand sides.
// Havocked variables stay in the slice but contribute no new variables.
// Control dependence (assume guards) is deliberately excluded.
std::set<std::string> backward_slice(const Program& p, std::size_t use_edge);

enum class ConstKind { Bottom, Const, Top };

struct ConstVal {
  ConstKind kind = ConstKind::Bottom;
  Int n;

  static ConstVal bottom() { return {}; }
  static ConstVal top() { return {ConstKind::Top, 0}; }
  static ConstVal cst(Int v) { return {ConstKind::Const, std::move(v)}; }
  bool operator==(const ConstVal&) const = default;
};

ConstVal join(const ConstVal& a, const ConstVal& b);

// Absent variables are Bottom ("not yet defined on any visit").
using ConstState = std::map<std::string, ConstVal>;

struct ConstMap {
  // Reachable locations only.
  std::map<std::string, ConstState> at;

  ConstVal lookup(const std::string& loc, const std::string& var) const;
};

struct ConstOptions {
  // When set, assume(x = e) with a constant e refines x along that edge.
  bool refine_assumes = false;
};

// Flat constant propagation. init_known pins selected inputs; all other
// inputs start Top. Soundness: a Const(n) fact at l means every reachable
// store at l that binds the variable binds it to n.
ConstMap constant_analysis(const Program& p, const std::map<std::string, Int>& init_known,
                           const ConstOptions& opts = {});

std::string to_string(const ConstVal& v);

} // namespace brbo
