#pragma once

// Shared helpers for the unit and acceptance suites.

#include "brbo/analyses.hpp"
#include "brbo/corelang.hpp"
#include "brbo/frontend.hpp"
#include "brbo/interp.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace brbo::test {

inline std::string programs_dir() {
#ifdef BRBO_PROGRAMS_DIR
  return BRBO_PROGRAMS_DIR;
#else
  return "programs";
#endif
}

inline std::string docs_dir() {
#ifdef BRBO_DOCS_DIR
  return BRBO_DOCS_DIR;
#else
  return "docs";
#endif
}

inline Program corpus(const std::string& stem) {
  return parse_program_file(programs_dir() + "/" + stem + ".brbo");
}

inline const std::vector<std::string>& corpus_stems() {
  static const std::vector<std::string> stems = {
      "fig2a", "fig2b", "scan_pair", "nested_ticks", "neg_use", "high_low", "pair"};
  return stems;
}

inline std::map<std::string, Int> fig2a_inputs(Int ts, Int text, Int tags, Int rep, Int sep) {
  return {{"#ts", std::move(ts)},
          {"#text", std::move(text)},
          {"#tags", std::move(tags)},
          {"ts#rep", std::move(rep)},
          {"#sep", std::move(sep)}};
}

// Chain-shaped builder: then(c) appends an edge L<n> -> L<n+1> : c.
struct ProgBuilder {
  Program p;
  int n = 0;

  explicit ProgBuilder(std::string name = "t") {
    p.name = std::move(name);
    p.pre = bool_lit(true);
    p.entry = "L0";
  }
  ProgBuilder& input(std::string x) {
    p.inputs.push_back(std::move(x));
    return *this;
  }
  ProgBuilder& resource(std::string r) {
    p.resources.push_back(std::move(r));
    return *this;
  }
  ProgBuilder& pre(ExprPtr e) {
    p.pre = std::move(e);
    return *this;
  }
  ProgBuilder& edge(std::string s, Cmd c, std::string t) {
    p.edges.push_back(Edge{std::move(s), std::move(c), std::move(t)});
    return *this;
  }
  ProgBuilder& then(Cmd c) {
    edge("L" + std::to_string(n), std::move(c), "L" + std::to_string(n + 1));
    ++n;
    return *this;
  }
  std::string here() const { return "L" + std::to_string(n); }
};

inline Program straight_line(std::vector<Cmd> cmds, std::vector<std::string> resources = {"r"}) {
  ProgBuilder b("line");
  for (auto& r : resources) b.resource(std::move(r));
  for (auto& c : cmds) b.then(std::move(c));
  return b.p;
}

// Edge indices of a path, for comparing enumeration output.
inline std::vector<std::size_t> path_sig(const Path& path) {
  std::vector<std::size_t> sig;
  for (const auto& st : path.steps) sig.push_back(st.edge);
  return sig;
}

// Brute-force dominators by node removal: d dominates n iff every entry->n
// walk passes through d, i.e. n becomes unreachable once d is deleted.
struct OracleDoms {
  std::set<std::string> reachable;
  std::map<std::string, std::set<std::string>> doms;
  std::map<std::string, std::string> idom;
  std::set<std::string> pruned;
};

inline std::set<std::string> reach_without(const Program& p, const std::string& removed) {
  std::set<std::string> seen;
  if (p.entry == removed) return seen;
  std::vector<std::string> work{p.entry};
  seen.insert(p.entry);
  while (!work.empty()) {
    std::string cur = work.back();
    work.pop_back();
    for (const auto& e : p.edges) {
      if (e.src != cur || e.tgt == removed) continue;
      if (seen.insert(e.tgt).second) work.push_back(e.tgt);
    }
  }
  return seen;
}

inline OracleDoms oracle_dominators(const Program& p) {
  OracleDoms o;
  o.reachable = reach_without(p, "");
  for (const auto& l : p.locations())
    if (!o.reachable.count(l)) o.pruned.insert(l);
  for (const auto& n : o.reachable) {
    std::set<std::string> ds{n};
    for (const auto& d : o.reachable) {
      if (d == n) continue;
      if (!reach_without(p, d).count(n)) ds.insert(d);
    }
    o.doms[n] = std::move(ds);
  }
  // Strict dominators of n are totally ordered by containment; the immediate
  // one is the strict dominator with the largest dominator set.
  for (const auto& [n, ds] : o.doms) {
    if (n == p.entry) {
      o.idom[n] = n;
      continue;
    }
    std::string best;
    std::size_t best_size = 0;
    for (const auto& d : ds) {
      if (d == n) continue;
      std::size_t sz = o.doms.at(d).size();
      if (best.empty() || sz > best_size) {
        best = d;
        best_size = sz;
      }
    }
    o.idom[n] = best;
  }
  return o;
}

} // namespace brbo::test
