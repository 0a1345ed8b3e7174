#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace brbo {

// Unbounded integers everywhere; the language has no overflow semantics.
using Int = boost::multiprecision::cpp_int;

// Two-sorted values. Program variables always hold integers; booleans only
// arise while evaluating guard expressions.
using Value = std::variant<Int, bool>;

struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Expressions

enum class ExprKind {
  IntLit,
  BoolLit,
  Var,
  Add,
  Sub,
  Mul,
  Min,
  Max,
  Lt,
  Le,
  Eq,
  Ne,
  Ge,
  Gt,
  And,
  Or,
  Not,
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprKind kind;
  Int lit;           // IntLit
  bool blit = false; // BoolLit
  std::string name;  // Var
  ExprPtr a, b;      // operands; Not uses a only
};

ExprPtr int_lit(Int n);
ExprPtr bool_lit(bool b);
ExprPtr var(std::string name);
ExprPtr mk_binary(ExprKind k, ExprPtr a, ExprPtr b);
ExprPtr mk_not(ExprPtr a);

inline ExprPtr add(ExprPtr a, ExprPtr b) { return mk_binary(ExprKind::Add, std::move(a), std::move(b)); }
inline ExprPtr sub(ExprPtr a, ExprPtr b) { return mk_binary(ExprKind::Sub, std::move(a), std::move(b)); }
inline ExprPtr mul(ExprPtr a, ExprPtr b) { return mk_binary(ExprKind::Mul, std::move(a), std::move(b)); }
inline ExprPtr emin(ExprPtr a, ExprPtr b) { return mk_binary(ExprKind::Min, std::move(a), std::move(b)); }
inline ExprPtr emax(ExprPtr a, ExprPtr b) { return mk_binary(ExprKind::Max, std::move(a), std::move(b)); }
inline ExprPtr lt(ExprPtr a, ExprPtr b) { return mk_binary(ExprKind::Lt, std::move(a), std::move(b)); }
inline ExprPtr le(ExprPtr a, ExprPtr b) { return mk_binary(ExprKind::Le, std::move(a), std::move(b)); }
inline ExprPtr eq(ExprPtr a, ExprPtr b) { return mk_binary(ExprKind::Eq, std::move(a), std::move(b)); }
inline ExprPtr ne(ExprPtr a, ExprPtr b) { return mk_binary(ExprKind::Ne, std::move(a), std::move(b)); }
inline ExprPtr ge(ExprPtr a, ExprPtr b) { return mk_binary(ExprKind::Ge, std::move(a), std::move(b)); }
inline ExprPtr gt(ExprPtr a, ExprPtr b) { return mk_binary(ExprKind::Gt, std::move(a), std::move(b)); }
inline ExprPtr land(ExprPtr a, ExprPtr b) { return mk_binary(ExprKind::And, std::move(a), std::move(b)); }
inline ExprPtr lor(ExprPtr a, ExprPtr b) { return mk_binary(ExprKind::Or, std::move(a), std::move(b)); }

bool expr_eq(const ExprPtr& a, const ExprPtr& b);

void collect_free_vars(const ExprPtr& e, std::set<std::string>& out);
std::set<std::string> free_vars(const ExprPtr& e);

// ---------------------------------------------------------------------------
// Commands

struct CSkip {
  bool operator==(const CSkip&) const = default;
};
struct CAssign {
  std::string var;
  ExprPtr rhs;
};
struct CHavoc { // x := *
  std::string var;
  bool operator==(const CHavoc&) const = default;
};
struct CAssume {
  ExprPtr cond;
};
struct CUse { // use r (e); e may evaluate negative
  std::string res;
  ExprPtr amount;
};
struct CUbCheck { // ub!(r1, r2 <= e): sum of upper-bound summaries vs e
  std::vector<std::string> res;
  ExprPtr bound;
};
struct CLbCheck { // lb!(e <= r1, r2)
  ExprPtr bound;
  std::vector<std::string> res;
};
struct CReset {
  std::string res;
  bool operator==(const CReset&) const = default;
};

using Cmd = std::variant<CSkip, CAssign, CHavoc, CAssume, CUse, CUbCheck, CLbCheck, CReset>;

bool cmd_eq(const Cmd& a, const Cmd& b);

// Variable written by the command, if any (Assign/Havoc).
std::optional<std::string> assigned_var(const Cmd& c);
// Free variables of the command's expressions (not resource names).
std::set<std::string> cmd_free_vars(const Cmd& c);

// ---------------------------------------------------------------------------
// Programs: edge-labelled control-flow graphs

struct Edge {
  std::string src;
  Cmd cmd;
  std::string tgt;
};

struct Program {
  std::string name;
  std::vector<std::string> inputs;    // declaration order
  ExprPtr pre;                        // defaults to true
  std::vector<std::string> resources; // declaration order
  std::string entry;
  std::vector<Edge> edges;

  std::set<std::string> locations() const;
  bool has_resource(const std::string& r) const;
};

bool program_eq(const Program& a, const Program& b);

// Stable edge identity "src>tgt#k" where k is the index among parallel edges
// with the same (src,tgt), counted in edge-list order.
std::string edge_id(const Program& p, std::size_t edge_index);
std::optional<std::size_t> edge_by_id(const Program& p, const std::string& id);

struct Diagnostic {
  std::string message;
};

// Structural and sort checks; empty result means the program is well-formed.
std::vector<Diagnostic> validate_program(const Program& p);

// Edge indices (edge-list order) of `use r (e)` commands for resource r.
std::vector<std::size_t> use_sites(const Program& p, const std::string& r);

// Variables with at least one proper (non-havoc) assignment. Havoc-only
// variables model unknown input data and count as high, like the inputs.
std::set<std::string> internal_vars(const Program& p);

// ---------------------------------------------------------------------------
// Stores, states, paths

struct ResourceCells {
  Int val = 0;
  Int ub = 0;
  Int cnt = -1;
  Int lb = 0;
  bool operator==(const ResourceCells&) const = default;
};

struct Store {
  std::map<std::string, Value> vars;
  std::map<std::string, ResourceCells> res;
  bool operator==(const Store&) const = default;
};

// Binds exactly the declared inputs and initialises every declared resource
// to (val 0, ub 0, cnt -1, lb 0).
Store initial_store(const Program& p, const std::map<std::string, Int>& inputs);

struct State {
  std::string loc;
  Store store;
  bool operator==(const State&) const = default;
};

struct PathStep {
  Store pre; // equals the preceding state's store in well-formed paths
  Cmd cmd;
  std::optional<Int> havoc; // recorded draw when cmd is a havoc
  State post;
  std::size_t edge = static_cast<std::size_t>(-1); // index of program edge taken
};

struct Path {
  State init;
  std::vector<PathStep> steps;

  const State& last() const { return steps.empty() ? init : steps.back().post; }
};

std::string to_string(const Value& v);

} // namespace brbo
