#include "brbo/interp.hpp"

#include <algorithm>

namespace brbo {

Value eval_expr(const Store& s, const ExprPtr& e) {
  if (!e) throw EvalError("missing expression");
  switch (e->kind) {
    case ExprKind::IntLit: return e->lit;
    case ExprKind::BoolLit: return e->blit;
    case ExprKind::Var: {
      auto it = s.vars.find(e->name);
      if (it == s.vars.end()) throw EvalError("unbound variable '" + e->name + "'");
      return it->second;
    }
    default: break;
  }
  if (e->kind == ExprKind::Not) {
    return !eval_bool(s, e->a);
  }
  switch (e->kind) {
    case ExprKind::And: return eval_bool(s, e->a) && eval_bool(s, e->b);
    case ExprKind::Or: return eval_bool(s, e->a) || eval_bool(s, e->b);
    default: break;
  }
  Int a = eval_int(s, e->a);
  Int b = eval_int(s, e->b);
  switch (e->kind) {
    case ExprKind::Add: return Int(a + b);
    case ExprKind::Sub: return Int(a - b);
    case ExprKind::Mul: return Int(a * b);
    case ExprKind::Min: return a < b ? a : b;
    case ExprKind::Max: return a < b ? b : a;
    case ExprKind::Lt: return a < b;
    case ExprKind::Le: return a <= b;
    case ExprKind::Eq: return a == b;
    case ExprKind::Ne: return a != b;
    case ExprKind::Ge: return a >= b;
    case ExprKind::Gt: return a > b;
    default: throw EvalError("malformed expression");
  }
}

Int eval_int(const Store& s, const ExprPtr& e) {
  Value v = eval_expr(s, e);
  if (const Int* n = std::get_if<Int>(&v)) return *n;
  throw EvalError("expected an integer expression");
}

bool eval_bool(const Store& s, const ExprPtr& e) {
  Value v = eval_expr(s, e);
  if (const bool* b = std::get_if<bool>(&v)) return *b;
  throw EvalError("expected a boolean expression");
}

namespace {

const ResourceCells& cells(const Store& s, const std::string& r) {
  auto it = s.res.find(r);
  if (it == s.res.end()) throw EvalError("unknown resource '" + r + "'");
  return it->second;
}

} // namespace

Int summary_sum_ub(const Store& s, const std::vector<std::string>& rs) {
  Int sum = 0;
  for (const auto& r : rs) {
    const ResourceCells& c = cells(s, r);
    sum += c.cnt * c.ub + c.val;
  }
  return sum;
}

Int summary_sum_lb(const Store& s, const std::vector<std::string>& rs) {
  Int sum = 0;
  for (const auto& r : rs) {
    const ResourceCells& c = cells(s, r);
    sum += c.cnt * c.lb + c.val;
  }
  return sum;
}

StepOutcome eval_cmd(const Store& s, const Cmd& c, NondetTape& tape) {
  return std::visit(
      [&](const auto& cc) -> StepOutcome {
        using T = std::decay_t<decltype(cc)>;
        if constexpr (std::is_same_v<T, CSkip>) {
          return Progressed{s};
        } else if constexpr (std::is_same_v<T, CAssign>) {
          Int v = eval_int(s, cc.rhs);
          Store next = s;
          next.vars[cc.var] = std::move(v);
          return Progressed{std::move(next)};
        } else if constexpr (std::is_same_v<T, CHavoc>) {
          if (tape.exhausted()) return TapeExhausted{};
          Store next = s;
          next.vars[cc.var] = tape.draw();
          return Progressed{std::move(next)};
        } else if constexpr (std::is_same_v<T, CAssume>) {
          if (!eval_bool(s, cc.cond)) return BlockedAssume{};
          return Progressed{s};
        } else if constexpr (std::is_same_v<T, CUse>) {
          Int v = eval_int(s, cc.amount); // may be negative
          cells(s, cc.res);
          Store next = s;
          next.res[cc.res].val += v;
          return Progressed{std::move(next)};
        } else if constexpr (std::is_same_v<T, CUbCheck>) {
          Int sum = summary_sum_ub(s, cc.res);
          Int bound = eval_int(s, cc.bound);
          if (sum <= bound) return Progressed{s};
          return ViolatedUb{cc.res, std::move(bound), std::move(sum)};
        } else if constexpr (std::is_same_v<T, CLbCheck>) {
          Int sum = summary_sum_lb(s, cc.res);
          Int bound = eval_int(s, cc.bound);
          if (bound <= sum) return Progressed{s};
          return ViolatedLb{std::move(bound), std::move(sum)};
        } else {
          static_assert(std::is_same_v<T, CReset>);
          cells(s, cc.res);
          Store next = s;
          ResourceCells& rc = next.res[cc.res];
          rc.cnt += 1;
          if (rc.ub < rc.val) rc.ub = rc.val;
          if (rc.val < rc.lb) rc.lb = rc.val;
          rc.val = 0;
          return Progressed{std::move(next)};
        }
      },
      c);
}

namespace {

std::map<std::string, std::vector<std::size_t>> out_index(const Program& p) {
  std::map<std::string, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < p.edges.size(); ++i) out[p.edges[i].src].push_back(i);
  return out;
}

} // namespace

std::vector<EdgeAttempt> step(const Program& p, const State& st, const NondetTape& tape) {
  std::vector<EdgeAttempt> out;
  for (std::size_t i = 0; i < p.edges.size(); ++i) {
    if (p.edges[i].src != st.loc) continue;
    NondetTape local = tape;
    out.push_back({i, eval_cmd(st.store, p.edges[i].cmd, local)});
  }
  return out;
}

namespace {

struct Enumerator {
  const Program& p;
  const HavocDomain& dom;
  const EnumLimits& lim;
  const EnumVisitor& vis;
  std::map<std::string, std::vector<std::size_t>> adj;
  EnumStats stats;
  Path path;
  bool stopped = false; // visitor asked to stop or cap was hit

  Enumerator(const Program& p_, const HavocDomain& dom_, const EnumLimits& lim_,
             const EnumVisitor& vis_)
      : p(p_), dom(dom_), lim(lim_), vis(vis_), adj(out_index(p_)) {}

  // Visits the current path node; returns false to unwind everything.
  bool visit(long depth) {
    if (stats.paths >= lim.state_cap) {
      stats.hit_state_cap = true;
      stopped = true;
      return false;
    }
    ++stats.paths;
    if (vis.on_path && !vis.on_path(path)) {
      stopped = true;
      return false;
    }
    // copy: pushing steps below reallocates the vector behind last()
    const State cur = path.last();
    auto it = adj.find(cur.loc);
    if (it == adj.end()) return true;
    if (depth >= lim.fuel) {
      ++stats.fuel_truncated;
      return true;
    }
    for (std::size_t e : it->second) {
      const Edge& edge = p.edges[e];
      if (const auto* hv = std::get_if<CHavoc>(&edge.cmd)) {
        for (Int v = dom.lo; v <= dom.hi; ++v) {
          Store next = cur.store;
          next.vars[hv->var] = v;
          path.steps.push_back(PathStep{cur.store, edge.cmd, v, State{edge.tgt, std::move(next)}, e});
          bool keep = visit(depth + 1);
          path.steps.pop_back();
          if (!keep) return false;
        }
        continue;
      }
      NondetTape none;
      StepOutcome oc = eval_cmd(cur.store, edge.cmd, none);
      if (auto* pr = std::get_if<Progressed>(&oc)) {
        path.steps.push_back(
            PathStep{cur.store, edge.cmd, std::nullopt, State{edge.tgt, std::move(pr->next)}, e});
        bool keep = visit(depth + 1);
        path.steps.pop_back();
        if (!keep) return false;
      } else if (std::holds_alternative<ViolatedUb>(oc) || std::holds_alternative<ViolatedLb>(oc)) {
        ++stats.violations;
        if (vis.on_violation && !vis.on_violation(ViolationReport{path, e, std::move(oc)})) {
          stopped = true;
          return false;
        }
      }
      // BlockedAssume: dead branch. TapeExhausted cannot happen here.
    }
    return true;
  }
};

} // namespace

EnumStats enumerate_paths(const Program& p, const Store& init, const HavocDomain& dom,
                          const EnumLimits& lim, const EnumVisitor& vis) {
  if (p.pre && !eval_bool(init, p.pre))
    throw ConfigError("initial store violates the program precondition");
  Enumerator en(p, dom, lim, vis);
  en.path.init = State{p.entry, init};
  en.visit(0);
  return en.stats;
}

std::vector<Path> all_paths(const Program& p, const Store& init, const HavocDomain& dom,
                            const EnumLimits& lim) {
  std::vector<Path> out;
  EnumVisitor vis;
  vis.on_path = [&](const Path& path) {
    out.push_back(path);
    return true;
  };
  enumerate_paths(p, init, dom, lim, vis);
  return out;
}

std::optional<std::string> path_check(const Path& path) {
  const Store* prev = &path.init.store;
  for (std::size_t i = 0; i < path.steps.size(); ++i) {
    const PathStep& st = path.steps[i];
    std::string where = "step " + std::to_string(i);
    if (!(st.pre == *prev)) return where + ": pre-store differs from preceding store";
    NondetTape tape;
    if (std::holds_alternative<CHavoc>(st.cmd)) {
      if (!st.havoc) return where + ": havoc step without a recorded draw";
      tape.values.push_back(*st.havoc);
    } else if (st.havoc) {
      return where + ": non-havoc step records a draw";
    }
    StepOutcome oc = eval_cmd(st.pre, st.cmd, tape);
    const auto* pr = std::get_if<Progressed>(&oc);
    if (!pr) return where + ": command does not progress from its pre-store";
    if (!(pr->next == st.post.store)) return where + ": post-store is not reproduced";
    prev = &st.post.store;
  }
  return std::nullopt;
}

namespace {

RunResult finish_run(Path path, RunEnd end, std::optional<ViolationReport> vio) {
  RunResult r;
  r.path = std::move(path);
  r.end = end;
  r.violation = std::move(vio);
  return r;
}

} // namespace

RunResult run_program(const Program& p, Store init, NondetTape tape, long fuel) {
  if (p.pre && !eval_bool(init, p.pre))
    throw ConfigError("initial store violates the program precondition");
  auto adj = out_index(p);
  Path path;
  path.init = State{p.entry, std::move(init)};
  for (long n = 0; n < fuel; ++n) {
    const State& cur = path.last();
    auto it = adj.find(cur.loc);
    if (it == adj.end()) return finish_run(std::move(path), RunEnd::Completed, std::nullopt);
    std::optional<ViolationReport> vio;
    bool tape_out = false;
    bool advanced = false;
    for (std::size_t e : it->second) {
      NondetTape local = tape;
      StepOutcome oc = eval_cmd(cur.store, p.edges[e].cmd, local);
      if (auto* pr = std::get_if<Progressed>(&oc)) {
        std::optional<Int> draw;
        if (std::holds_alternative<CHavoc>(p.edges[e].cmd)) draw = tape.values[tape.cursor];
        path.steps.push_back(PathStep{cur.store, p.edges[e].cmd, draw,
                                      State{p.edges[e].tgt, std::move(pr->next)}, e});
        tape = std::move(local);
        advanced = true;
        break;
      }
      if (std::holds_alternative<ViolatedUb>(oc) || std::holds_alternative<ViolatedLb>(oc)) {
        if (!vio) vio = ViolationReport{path, e, std::move(oc)};
      } else if (std::holds_alternative<TapeExhausted>(oc)) {
        tape_out = true;
      }
    }
    if (advanced) continue;
    if (vio) return finish_run(std::move(path), RunEnd::Violated, std::move(vio));
    if (tape_out) return finish_run(std::move(path), RunEnd::TapeOut, std::nullopt);
    return finish_run(std::move(path), RunEnd::Blocked, std::nullopt);
  }
  return finish_run(std::move(path), RunEnd::FuelOut, std::nullopt);
}

RunResult random_walk(const Program& p, Store init, const HavocDomain& dom, long fuel,
                      std::mt19937_64& rng) {
  if (p.pre && !eval_bool(init, p.pre))
    throw ConfigError("initial store violates the program precondition");
  auto adj = out_index(p);
  long long lo = dom.lo.convert_to<long long>();
  long long hi = dom.hi.convert_to<long long>();
  std::uniform_int_distribution<long long> draw_dist(lo, hi);
  Path path;
  path.init = State{p.entry, std::move(init)};
  for (long n = 0; n < fuel; ++n) {
    const State& cur = path.last();
    auto it = adj.find(cur.loc);
    if (it == adj.end()) return finish_run(std::move(path), RunEnd::Completed, std::nullopt);
    std::vector<std::size_t> order = it->second;
    std::shuffle(order.begin(), order.end(), rng);
    std::optional<ViolationReport> vio;
    bool advanced = false;
    for (std::size_t e : order) {
      const Edge& edge = p.edges[e];
      if (const auto* hv = std::get_if<CHavoc>(&edge.cmd)) {
        Int v(draw_dist(rng));
        Store next = cur.store;
        next.vars[hv->var] = v;
        path.steps.push_back(PathStep{cur.store, edge.cmd, v, State{edge.tgt, std::move(next)}, e});
        advanced = true;
        break;
      }
      NondetTape none;
      StepOutcome oc = eval_cmd(cur.store, edge.cmd, none);
      if (auto* pr = std::get_if<Progressed>(&oc)) {
        path.steps.push_back(
            PathStep{cur.store, edge.cmd, std::nullopt, State{edge.tgt, std::move(pr->next)}, e});
        advanced = true;
        break;
      }
      if (std::holds_alternative<ViolatedUb>(oc) || std::holds_alternative<ViolatedLb>(oc)) {
        if (!vio) vio = ViolationReport{path, e, std::move(oc)};
      }
    }
    if (advanced) continue;
    if (vio) return finish_run(std::move(path), RunEnd::Violated, std::move(vio));
    return finish_run(std::move(path), RunEnd::Blocked, std::nullopt);
  }
  return finish_run(std::move(path), RunEnd::FuelOut, std::nullopt);
}

} // namespace brbo
