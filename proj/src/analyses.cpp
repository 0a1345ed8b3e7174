#include "brbo/analyses.hpp"

#include "brbo/interp.hpp"

#include <algorithm>
#include <deque>

namespace brbo {

bool DomTree::dominates(const std::string& a, const std::string& b) const {
  if (!reachable(b)) return true;
  if (!reachable(a)) return false;
  std::string cur = b;
  for (;;) {
    if (cur == a) return true;
    const std::string& up = idom.at(cur);
    if (up == cur) return false; // reached entry
    cur = up;
  }
}

std::vector<std::string> DomTree::chain(const std::string& b) const {
  std::vector<std::string> out;
  if (!reachable(b)) return out;
  std::string cur = b;
  for (;;) {
    out.push_back(cur);
    const std::string& up = idom.at(cur);
    if (up == cur) return out;
    cur = up;
  }
}

std::string DomTree::common_dominator(const std::vector<std::string>& locs) const {
  if (locs.empty()) throw ConfigError("common_dominator of an empty set");
  std::vector<std::string> acc = chain(locs[0]);
  if (acc.empty()) throw ConfigError("common_dominator of unreachable location");
  for (std::size_t i = 1; i < locs.size(); ++i) {
    std::set<std::string> cd(acc.begin(), acc.end());
    std::vector<std::string> next;
    for (const auto& l : chain(locs[i]))
      if (cd.count(l)) next.push_back(l);
    if (next.empty()) throw ConfigError("common_dominator of unreachable location");
    acc = std::move(next);
  }
  return acc.front(); // chains are deepest-first
}

DomTree dominator_tree(const Program& p) {
  DomTree t;
  t.entry = p.entry;

  // Prune unreachable locations first; the dataflow assumes every node has a
  // path from entry.
  std::map<std::string, std::vector<std::string>> succ;
  for (const auto& e : p.edges) succ[e.src].push_back(e.tgt);
  std::set<std::string> reach;
  std::deque<std::string> work{p.entry};
  reach.insert(p.entry);
  while (!work.empty()) {
    std::string cur = work.front();
    work.pop_front();
    for (const auto& nxt : succ[cur])
      if (reach.insert(nxt).second) work.push_back(nxt);
  }
  for (const auto& l : p.locations())
    if (!reach.count(l)) t.pruned_unreachable.push_back(l);

  std::vector<std::string> nodes(reach.begin(), reach.end());
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) index[nodes[i]] = i;
  const std::size_t n = nodes.size();
  const std::size_t entry = index.at(p.entry);

  std::vector<std::vector<std::size_t>> preds(n);
  for (const auto& e : p.edges) {
    if (!reach.count(e.src) || !reach.count(e.tgt)) continue;
    preds[index.at(e.tgt)].push_back(index.at(e.src));
  }

  // dom sets as bit vectors; start full everywhere except the entry.
  std::vector<std::vector<bool>> dom(n, std::vector<bool>(n, true));
  dom[entry].assign(n, false);
  dom[entry][entry] = true;

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t v = 0; v < n; ++v) {
      if (v == entry) continue;
      std::vector<bool> acc(n, true);
      if (preds[v].empty()) acc.assign(n, false); // only the entry has no preds
      for (std::size_t u : preds[v])
        for (std::size_t i = 0; i < n; ++i) acc[i] = acc[i] && dom[u][i];
      acc[v] = true;
      if (acc != dom[v]) {
        dom[v] = std::move(acc);
        changed = true;
      }
    }
  }

  // idom(v) = the strict dominator with the largest dominator set.
  for (std::size_t v = 0; v < n; ++v) {
    if (v == entry) {
      t.idom[nodes[v]] = nodes[v];
      continue;
    }
    std::size_t best = entry;
    std::size_t best_size = 0;
    for (std::size_t d = 0; d < n; ++d) {
      if (d == v || !dom[v][d]) continue;
      std::size_t size = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (dom[d][i]) ++size;
      if (size > best_size) {
        best_size = size;
        best = d;
      }
    }
    t.idom[nodes[v]] = nodes[best];
  }
  return t;
}

std::set<std::string> backward_slice(const Program& p, std::size_t use_edge) {
  if (use_edge >= p.edges.size()) throw ConfigError("use site index out of range");
  const auto* use = std::get_if<CUse>(&p.edges[use_edge].cmd);
  if (!use) throw ConfigError("edge " + edge_id(p, use_edge) + " is not a use site");
  std::set<std::string> slice = free_vars(use->amount);
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& e : p.edges) {
      const auto* as = std::get_if<CAssign>(&e.cmd);
      if (!as || !slice.count(as->var)) continue;
      for (const auto& v : free_vars(as->rhs))
        grew = slice.insert(v).second || grew;
    }
  }
  return slice;
}

ConstVal join(const ConstVal& a, const ConstVal& b) {
  if (a.kind == ConstKind::Bottom) return b;
  if (b.kind == ConstKind::Bottom) return a;
  if (a.kind == ConstKind::Top || b.kind == ConstKind::Top) return ConstVal::top();
  return a.n == b.n ? a : ConstVal::top();
}

ConstVal ConstMap::lookup(const std::string& loc, const std::string& var) const {
  auto it = at.find(loc);
  if (it == at.end()) return ConstVal::bottom();
  auto jt = it->second.find(var);
  return jt == it->second.end() ? ConstVal::bottom() : jt->second;
}

namespace {

ConstVal abst_eval(const ExprPtr& e, const ConstState& s) {
  if (!e) return ConstVal::top();
  switch (e->kind) {
    case ExprKind::IntLit: return ConstVal::cst(e->lit);
    case ExprKind::Var: {
      auto it = s.find(e->name);
      return it == s.end() ? ConstVal::bottom() : it->second;
    }
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul:
    case ExprKind::Min:
    case ExprKind::Max: {
      ConstVal a = abst_eval(e->a, s);
      ConstVal b = abst_eval(e->b, s);
      if (a.kind == ConstKind::Bottom || b.kind == ConstKind::Bottom) return ConstVal::bottom();
      if (a.kind == ConstKind::Top || b.kind == ConstKind::Top) return ConstVal::top();
      switch (e->kind) {
        case ExprKind::Add: return ConstVal::cst(a.n + b.n);
        case ExprKind::Sub: return ConstVal::cst(a.n - b.n);
        case ExprKind::Mul: return ConstVal::cst(a.n * b.n);
        case ExprKind::Min: return ConstVal::cst(a.n < b.n ? a.n : b.n);
        default: return ConstVal::cst(a.n < b.n ? b.n : a.n);
      }
    }
    default:
      // Boolean-sorted expressions cannot be assigned; treat defensively.
      return ConstVal::top();
  }
}

// assume(x = e) / assume(e = x) refinement, applied recursively through
// conjunctions. Returns false when the edge is provably infeasible.
bool refine(const ExprPtr& cond, ConstState& s) {
  if (!cond) return true;
  if (cond->kind == ExprKind::And) return refine(cond->a, s) && refine(cond->b, s);
  if (cond->kind != ExprKind::Eq) return true;
  const ExprPtr* v = nullptr;
  const ExprPtr* rhs = nullptr;
  if (cond->a && cond->a->kind == ExprKind::Var) {
    v = &cond->a;
    rhs = &cond->b;
  } else if (cond->b && cond->b->kind == ExprKind::Var) {
    v = &cond->b;
    rhs = &cond->a;
  } else {
    return true;
  }
  ConstVal rv = abst_eval(*rhs, s);
  if (rv.kind != ConstKind::Const) return true;
  auto it = s.find((*v)->name);
  if (it == s.end() || it->second.kind == ConstKind::Bottom) {
    s[(*v)->name] = rv;
    return true;
  }
  if (it->second.kind == ConstKind::Top) {
    it->second = rv;
    return true;
  }
  return it->second.n == rv.n;
}

ConstState transfer(const Cmd& c, const ConstState& in, const ConstOptions& opts, bool& feasible) {
  feasible = true;
  ConstState out = in;
  if (const auto* as = std::get_if<CAssign>(&c)) {
    out[as->var] = abst_eval(as->rhs, in);
  } else if (const auto* hv = std::get_if<CHavoc>(&c)) {
    out[hv->var] = ConstVal::top();
  } else if (const auto* asm_ = std::get_if<CAssume>(&c)) {
    if (opts.refine_assumes) feasible = refine(asm_->cond, out);
  }
  return out;
}

ConstState join_states(const ConstState& a, const ConstState& b) {
  ConstState out = a;
  for (const auto& [v, cv] : b) {
    auto it = out.find(v);
    out[v] = it == out.end() ? cv : join(it->second, cv);
  }
  return out;
}

} // namespace

ConstMap constant_analysis(const Program& p, const std::map<std::string, Int>& init_known,
                           const ConstOptions& opts) {
  ConstMap cm;
  ConstState entry_state;
  for (const auto& x : p.inputs) {
    auto it = init_known.find(x);
    entry_state[x] = it == init_known.end() ? ConstVal::top() : ConstVal::cst(it->second);
  }
  cm.at[p.entry] = std::move(entry_state);

  std::map<std::string, std::vector<std::size_t>> adj;
  for (std::size_t i = 0; i < p.edges.size(); ++i) adj[p.edges[i].src].push_back(i);

  std::deque<std::string> work{p.entry};
  std::set<std::string> queued{p.entry};
  while (!work.empty()) {
    std::string loc = work.front();
    work.pop_front();
    queued.erase(loc);
    auto it = adj.find(loc);
    if (it == adj.end()) continue;
    const ConstState& in = cm.at[loc];
    for (std::size_t e : it->second) {
      bool feasible = true;
      ConstState moved = transfer(p.edges[e].cmd, in, opts, feasible);
      if (!feasible) continue;
      const std::string& tgt = p.edges[e].tgt;
      auto cur = cm.at.find(tgt);
      ConstState merged = cur == cm.at.end() ? moved : join_states(cur->second, moved);
      if (cur == cm.at.end() || merged != cur->second) {
        cm.at[tgt] = std::move(merged);
        if (queued.insert(tgt).second) work.push_back(tgt);
      }
    }
  }
  return cm;
}

std::string to_string(const ConstVal& v) {
  switch (v.kind) {
    case ConstKind::Bottom: return "bot";
    case ConstKind::Top: return "top";
    default: return v.n.str();
  }
}

} // namespace brbo
