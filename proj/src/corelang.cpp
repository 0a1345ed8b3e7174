#include "brbo/corelang.hpp"

#include <algorithm>
#include <sstream>

namespace brbo {

ExprPtr int_lit(Int n) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::IntLit;
  e->lit = std::move(n);
  return e;
}

ExprPtr bool_lit(bool b) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::BoolLit;
  e->blit = b;
  return e;
}

ExprPtr var(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Var;
  e->name = std::move(name);
  return e;
}

ExprPtr mk_binary(ExprKind k, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

ExprPtr mk_not(ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Not;
  e->a = std::move(a);
  return e;
}

bool expr_eq(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprKind::IntLit: return a->lit == b->lit;
    case ExprKind::BoolLit: return a->blit == b->blit;
    case ExprKind::Var: return a->name == b->name;
    case ExprKind::Not: return expr_eq(a->a, b->a);
    default: return expr_eq(a->a, b->a) && expr_eq(a->b, b->b);
  }
}

void collect_free_vars(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  if (e->kind == ExprKind::Var) {
    out.insert(e->name);
    return;
  }
  collect_free_vars(e->a, out);
  collect_free_vars(e->b, out);
}

std::set<std::string> free_vars(const ExprPtr& e) {
  std::set<std::string> out;
  collect_free_vars(e, out);
  return out;
}

bool cmd_eq(const Cmd& a, const Cmd& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& ca) -> bool {
        using T = std::decay_t<decltype(ca)>;
        const auto& cb = std::get<T>(b);
        if constexpr (std::is_same_v<T, CSkip>) {
          (void)ca, (void)cb;
          return true;
        } else if constexpr (std::is_same_v<T, CAssign>) {
          return ca.var == cb.var && expr_eq(ca.rhs, cb.rhs);
        } else if constexpr (std::is_same_v<T, CHavoc>) {
          return ca.var == cb.var;
        } else if constexpr (std::is_same_v<T, CAssume>) {
          return expr_eq(ca.cond, cb.cond);
        } else if constexpr (std::is_same_v<T, CUse>) {
          return ca.res == cb.res && expr_eq(ca.amount, cb.amount);
        } else if constexpr (std::is_same_v<T, CUbCheck>) {
          return ca.res == cb.res && expr_eq(ca.bound, cb.bound);
        } else if constexpr (std::is_same_v<T, CLbCheck>) {
          return ca.res == cb.res && expr_eq(ca.bound, cb.bound);
        } else {
          static_assert(std::is_same_v<T, CReset>);
          return ca.res == cb.res;
        }
      },
      a);
}

std::optional<std::string> assigned_var(const Cmd& c) {
  if (const auto* as = std::get_if<CAssign>(&c)) return as->var;
  if (const auto* hv = std::get_if<CHavoc>(&c)) return hv->var;
  return std::nullopt;
}

std::set<std::string> cmd_free_vars(const Cmd& c) {
  std::set<std::string> out;
  std::visit(
      [&](const auto& cc) {
        using T = std::decay_t<decltype(cc)>;
        if constexpr (std::is_same_v<T, CAssign>) {
          collect_free_vars(cc.rhs, out);
          out.insert(cc.var);
        } else if constexpr (std::is_same_v<T, CHavoc>) {
          out.insert(cc.var);
        } else if constexpr (std::is_same_v<T, CAssume>) {
          collect_free_vars(cc.cond, out);
        } else if constexpr (std::is_same_v<T, CUse>) {
          collect_free_vars(cc.amount, out);
        } else if constexpr (std::is_same_v<T, CUbCheck>) {
          collect_free_vars(cc.bound, out);
        } else if constexpr (std::is_same_v<T, CLbCheck>) {
          collect_free_vars(cc.bound, out);
        }
      },
      c);
  return out;
}

std::set<std::string> Program::locations() const {
  std::set<std::string> locs;
  if (!entry.empty()) locs.insert(entry);
  for (const auto& e : edges) {
    locs.insert(e.src);
    locs.insert(e.tgt);
  }
  return locs;
}

bool Program::has_resource(const std::string& r) const {
  return std::find(resources.begin(), resources.end(), r) != resources.end();
}

bool program_eq(const Program& a, const Program& b) {
  if (a.name != b.name || a.inputs != b.inputs || a.resources != b.resources ||
      a.entry != b.entry || a.edges.size() != b.edges.size())
    return false;
  if (!expr_eq(a.pre ? a.pre : bool_lit(true), b.pre ? b.pre : bool_lit(true))) return false;
  for (std::size_t i = 0; i < a.edges.size(); ++i) {
    if (a.edges[i].src != b.edges[i].src || a.edges[i].tgt != b.edges[i].tgt ||
        !cmd_eq(a.edges[i].cmd, b.edges[i].cmd))
      return false;
  }
  return true;
}

std::string edge_id(const Program& p, std::size_t edge_index) {
  if (edge_index >= p.edges.size()) throw ConfigError("edge index out of range");
  const Edge& e = p.edges[edge_index];
  std::size_t k = 0;
  for (std::size_t i = 0; i < edge_index; ++i)
    if (p.edges[i].src == e.src && p.edges[i].tgt == e.tgt) ++k;
  std::ostringstream os;
  os << e.src << ">" << e.tgt << "#" << k;
  return os.str();
}

std::optional<std::size_t> edge_by_id(const Program& p, const std::string& id) {
  for (std::size_t i = 0; i < p.edges.size(); ++i)
    if (edge_id(p, i) == id) return i;
  return std::nullopt;
}

namespace {

enum class Sort { IntS, BoolS, Bad };

// All program variables are integer-sorted; booleans exist only inside guard
// expressions. `bad` collects one message per ill-sorted node.
Sort sort_of(const ExprPtr& e, const Program& p, const std::string& ctx,
             std::vector<Diagnostic>& bad) {
  if (!e) {
    bad.push_back({ctx + ": missing expression"});
    return Sort::Bad;
  }
  auto expect = [&](const ExprPtr& sub, Sort want, const char* what) {
    Sort got = sort_of(sub, p, ctx, bad);
    if (got != Sort::Bad && got != want)
      bad.push_back({ctx + ": " + what + " operand has the wrong sort"});
    return got != Sort::Bad && got == want;
  };
  switch (e->kind) {
    case ExprKind::IntLit: return Sort::IntS;
    case ExprKind::BoolLit: return Sort::BoolS;
    case ExprKind::Var:
      if (p.has_resource(e->name)) {
        bad.push_back({ctx + ": expression reads resource '" + e->name + "'"});
        return Sort::Bad;
      }
      return Sort::IntS;
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul:
    case ExprKind::Min:
    case ExprKind::Max: {
      bool ok = expect(e->a, Sort::IntS, "arithmetic");
      ok = expect(e->b, Sort::IntS, "arithmetic") && ok;
      return ok ? Sort::IntS : Sort::Bad;
    }
    case ExprKind::Lt:
    case ExprKind::Le:
    case ExprKind::Eq:
    case ExprKind::Ne:
    case ExprKind::Ge:
    case ExprKind::Gt: {
      bool ok = expect(e->a, Sort::IntS, "comparison");
      ok = expect(e->b, Sort::IntS, "comparison") && ok;
      return ok ? Sort::BoolS : Sort::Bad;
    }
    case ExprKind::And:
    case ExprKind::Or: {
      bool ok = expect(e->a, Sort::BoolS, "connective");
      ok = expect(e->b, Sort::BoolS, "connective") && ok;
      return ok ? Sort::BoolS : Sort::Bad;
    }
    case ExprKind::Not: {
      bool ok = expect(e->a, Sort::BoolS, "negation");
      return ok ? Sort::BoolS : Sort::Bad;
    }
  }
  return Sort::Bad;
}

void expect_sort(const ExprPtr& e, const Program& p, Sort want, const std::string& ctx,
                 std::vector<Diagnostic>& out) {
  Sort got = sort_of(e, p, ctx, out);
  if (got != Sort::Bad && got != want)
    out.push_back({ctx + ": expression has the wrong sort"});
}

} // namespace

std::vector<Diagnostic> validate_program(const Program& p) {
  std::vector<Diagnostic> out;

  std::set<std::string> input_set;
  for (const auto& x : p.inputs)
    if (!input_set.insert(x).second) out.push_back({"duplicate input '" + x + "'"});
  std::set<std::string> res_set;
  for (const auto& r : p.resources) {
    if (!res_set.insert(r).second) out.push_back({"duplicate resource '" + r + "'"});
    if (input_set.count(r)) out.push_back({"'" + r + "' declared both input and resource"});
  }

  if (!p.edges.empty()) {
    bool entry_is_src = false;
    for (const auto& e : p.edges)
      if (e.src == p.entry) entry_is_src = true;
    if (!entry_is_src)
      out.push_back({"entry '" + p.entry + "' is not the source of any edge"});
  }

  if (p.pre) {
    expect_sort(p.pre, p, Sort::BoolS, "precondition", out);
    for (const auto& v : free_vars(p.pre))
      if (!input_set.count(v))
        out.push_back({"precondition reads non-input variable '" + v + "'"});
  }

  for (std::size_t i = 0; i < p.edges.size(); ++i) {
    const std::string ctx = "edge " + edge_id(p, i);
    const Cmd& c = p.edges[i].cmd;
    std::visit(
        [&](const auto& cc) {
          using T = std::decay_t<decltype(cc)>;
          if constexpr (std::is_same_v<T, CAssign>) {
            if (res_set.count(cc.var))
              out.push_back({ctx + ": assignment to resource '" + cc.var + "'"});
            expect_sort(cc.rhs, p, Sort::IntS, ctx, out);
          } else if constexpr (std::is_same_v<T, CHavoc>) {
            if (res_set.count(cc.var))
              out.push_back({ctx + ": havoc of resource '" + cc.var + "'"});
          } else if constexpr (std::is_same_v<T, CAssume>) {
            expect_sort(cc.cond, p, Sort::BoolS, ctx, out);
          } else if constexpr (std::is_same_v<T, CUse>) {
            if (!res_set.count(cc.res))
              out.push_back({ctx + ": use of undeclared resource '" + cc.res + "'"});
            expect_sort(cc.amount, p, Sort::IntS, ctx, out);
          } else if constexpr (std::is_same_v<T, CUbCheck>) {
            if (cc.res.empty()) out.push_back({ctx + ": empty resource set in ub!"});
            std::set<std::string> seen;
            for (const auto& r : cc.res) {
              if (!res_set.count(r))
                out.push_back({ctx + ": ub! names undeclared resource '" + r + "'"});
              if (!seen.insert(r).second)
                out.push_back({ctx + ": ub! repeats resource '" + r + "'"});
            }
            expect_sort(cc.bound, p, Sort::IntS, ctx, out);
          } else if constexpr (std::is_same_v<T, CLbCheck>) {
            if (cc.res.empty()) out.push_back({ctx + ": empty resource set in lb!"});
            std::set<std::string> seen;
            for (const auto& r : cc.res) {
              if (!res_set.count(r))
                out.push_back({ctx + ": lb! names undeclared resource '" + r + "'"});
              if (!seen.insert(r).second)
                out.push_back({ctx + ": lb! repeats resource '" + r + "'"});
            }
            expect_sort(cc.bound, p, Sort::IntS, ctx, out);
          } else if constexpr (std::is_same_v<T, CReset>) {
            if (!res_set.count(cc.res))
              out.push_back({ctx + ": reset of undeclared resource '" + cc.res + "'"});
          }
        },
        c);
  }

  return out;
}

std::vector<std::size_t> use_sites(const Program& p, const std::string& r) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < p.edges.size(); ++i)
    if (const auto* u = std::get_if<CUse>(&p.edges[i].cmd))
      if (u->res == r) out.push_back(i);
  return out;
}

std::set<std::string> internal_vars(const Program& p) {
  std::set<std::string> out;
  for (const auto& e : p.edges)
    if (const auto* as = std::get_if<CAssign>(&e.cmd)) out.insert(as->var);
  return out;
}

Store initial_store(const Program& p, const std::map<std::string, Int>& inputs) {
  Store s;
  for (const auto& x : p.inputs) {
    auto it = inputs.find(x);
    if (it == inputs.end()) throw ConfigError("missing value for input '" + x + "'");
    s.vars[x] = it->second;
  }
  for (const auto& [x, v] : inputs)
    if (!s.vars.count(x)) throw ConfigError("'" + x + "' is not an input of the program");
  for (const auto& r : p.resources) s.res[r] = ResourceCells{};
  return s;
}

std::string to_string(const Value& v) {
  if (const auto* n = std::get_if<Int>(&v)) return n->str();
  return std::get<bool>(v) ? "true" : "false";
}

} // namespace brbo
