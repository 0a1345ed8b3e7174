#include "brbo/decompose.hpp"

#include "brbo/analyses.hpp"

#include <algorithm>
#include <sstream>

namespace brbo {

std::string Decomposition::origin_of(const std::string& group) const {
  for (const auto& [orig, gs] : groups)
    if (std::find(gs.begin(), gs.end(), group) != gs.end()) return orig;
  return {};
}

std::vector<std::string> Decomposition::all_groups() const {
  std::vector<std::string> out;
  for (const auto& [orig, gs] : groups) out.insert(out.end(), gs.begin(), gs.end());
  return out;
}

ConformanceReport conforms(const Store& orig, const Store& dec, const Decomposition& d) {
  ConformanceReport rep;

  std::set<std::string> names;
  for (const auto& [v, _] : orig.vars) names.insert(v);
  for (const auto& [v, _] : dec.vars) names.insert(v);
  for (const auto& v : names) {
    auto a = orig.vars.find(v);
    auto b = dec.vars.find(v);
    if (a == orig.vars.end() || b == dec.vars.end() || !(a->second == b->second))
      rep.var_mismatches.push_back(v);
  }

  bool slack_ok = true;
  for (const auto& [r, gs] : d.groups) {
    auto it = orig.res.find(r);
    if (it == orig.res.end()) throw ConfigError("original store lacks resource '" + r + "'");
    ConformanceEntry e;
    e.res = r;
    e.orig = it->second.val;
    e.sum = summary_sum_ub(dec, gs);
    e.slack = e.sum - e.orig;
    if (e.slack < 0) slack_ok = false;
    rep.per_resource.push_back(std::move(e));
  }
  rep.conforming = rep.var_mismatches.empty() && slack_ok;
  return rep;
}

Cmd decompose_cmd(const Decomposition& d, const std::string& site_id, const Cmd& c) {
  return std::visit(
      [&](const auto& cc) -> Cmd {
        using T = std::decay_t<decltype(cc)>;
        if constexpr (std::is_same_v<T, CUse>) {
          if (!d.groups.count(cc.res))
            throw ConfigError("no groups declared for resource '" + cc.res + "'");
          auto it = d.sites.find(site_id);
          if (it == d.sites.end())
            throw ConfigError("use site " + site_id + " has no group assignment");
          const auto& gs = d.groups.at(cc.res);
          if (std::find(gs.begin(), gs.end(), it->second) == gs.end())
            throw ConfigError("site " + site_id + " assigned to foreign group '" + it->second +
                              "'");
          return CUse{it->second, cc.amount};
        } else if constexpr (std::is_same_v<T, CUbCheck>) {
          std::vector<std::string> rs;
          for (const auto& r : cc.res) {
            auto it = d.groups.find(r);
            if (it == d.groups.end())
              throw ConfigError("no groups declared for resource '" + r + "'");
            rs.insert(rs.end(), it->second.begin(), it->second.end());
          }
          return CUbCheck{std::move(rs), cc.bound};
        } else if constexpr (std::is_same_v<T, CLbCheck>) {
          std::vector<std::string> rs;
          for (const auto& r : cc.res) {
            auto it = d.groups.find(r);
            if (it == d.groups.end())
              throw ConfigError("no groups declared for resource '" + r + "'");
            rs.insert(rs.end(), it->second.begin(), it->second.end());
          }
          return CLbCheck{cc.bound, std::move(rs)};
        } else if constexpr (std::is_same_v<T, CReset>) {
          throw ConfigError("program already resets resource '" + cc.res +
                            "'; re-transforming is not supported");
        } else {
          return c;
        }
      },
      c);
}

namespace {

void validate_decomposition(const Program& p, const Decomposition& d) {
  {
    auto diags = validate_program(p);
    if (!diags.empty())
      throw ConfigError("program is not well-formed: " + diags.front().message);
  }

  std::set<std::string> taken(p.resources.begin(), p.resources.end());
  for (const auto& x : p.inputs) taken.insert(x);
  for (const auto& e : p.edges)
    for (const auto& v : cmd_free_vars(e.cmd)) taken.insert(v);
  if (p.pre)
    for (const auto& v : free_vars(p.pre)) taken.insert(v);

  std::set<std::string> group_names;
  for (const auto& [orig, gs] : d.groups) {
    if (!p.has_resource(orig))
      throw ConfigError("decomposition names undeclared resource '" + orig + "'");
    if (gs.empty()) throw ConfigError("resource '" + orig + "' has no groups");
    for (const auto& g : gs) {
      if (!group_names.insert(g).second) throw ConfigError("group '" + g + "' declared twice");
      if (taken.count(g))
        throw ConfigError("group '" + g + "' collides with an existing name");
    }
  }
  for (const auto& r : p.resources)
    if (!d.groups.count(r)) throw ConfigError("resource '" + r + "' has no groups");

  for (const auto& [site, g] : d.sites) {
    auto idx = edge_by_id(p, site);
    if (!idx) throw ConfigError("site '" + site + "' is not an edge of the program");
    const auto* use = std::get_if<CUse>(&p.edges[*idx].cmd);
    if (!use) throw ConfigError("site '" + site + "' is not a use edge");
    const auto& gs = d.groups.at(use->res);
    if (std::find(gs.begin(), gs.end(), g) == gs.end())
      throw ConfigError("site '" + site + "' assigned to group '" + g +
                        "' of a different resource");
  }
  for (const auto& r : p.resources)
    for (std::size_t idx : use_sites(p, r))
      if (!d.sites.count(edge_id(p, idx)))
        throw ConfigError("use site " + edge_id(p, idx) + " has no group assignment");

  DomTree dt = dominator_tree(p);
  auto locs = p.locations();
  for (const auto& [g, places] : d.resets) {
    if (!group_names.count(g)) throw ConfigError("reset for unknown group '" + g + "'");
    for (const auto& l : places) {
      if (!locs.count(l)) throw ConfigError("reset location '" + l + "' is not in the program");
      for (const auto& [site, sg] : d.sites) {
        if (sg != g) continue;
        const std::string& src = p.edges[*edge_by_id(p, site)].src;
        if (!dt.dominates(l, src))
          throw ConfigError("reset of '" + g + "' at '" + l + "' does not dominate site " + site);
      }
    }
  }
}

std::string fresh_loc(std::set<std::string>& locs, const std::string& base) {
  std::string name = base;
  while (!locs.insert(name).second) name += "_";
  return name;
}

} // namespace

TransformResult transform_program(const Program& p, const Decomposition& d) {
  validate_decomposition(p, d);

  TransformResult out;
  Program& q = out.program;
  q.name = p.name;
  q.inputs = p.inputs;
  q.pre = p.pre;
  q.entry = p.entry;
  for (const auto& r : p.resources) {
    const auto& gs = d.groups.at(r);
    q.resources.insert(q.resources.end(), gs.begin(), gs.end());
  }
  for (std::size_t i = 0; i < p.edges.size(); ++i) {
    q.edges.push_back(Edge{p.edges[i].src, decompose_cmd(d, edge_id(p, i), p.edges[i].cmd),
                           p.edges[i].tgt});
    out.edge_origin.push_back(i);
  }

  std::set<std::string> locs = p.locations();
  for (const auto& r : p.resources) {
    for (const auto& g : d.groups.at(r)) {
      auto it = d.resets.find(g);
      if (it == d.resets.end()) continue;
      for (const auto& l : it->second) {
        std::string pre_loc = fresh_loc(locs, l + "_rs_" + g);
        for (auto& e : q.edges)
          if (e.tgt == l) e.tgt = pre_loc;
        if (q.entry == l) q.entry = pre_loc;
        q.edges.push_back(Edge{pre_loc, CReset{g}, l});
        out.edge_origin.push_back(TransformResult::npos);
        out.loc_rep[pre_loc] = l;
      }
    }
  }
  return out;
}

bool ReconstructionResult::all_conforming() const {
  if (orig_stuck) return false;
  for (const auto& r : reports)
    if (!r.conforming) return false;
  return true;
}

namespace {

// Map every spliced location of dec to the original location its reset chain
// eventually re-enters.
std::map<std::string, std::string> splice_reps(const Program& orig, const Program& dec) {
  auto olocs = orig.locations();
  std::map<std::string, std::vector<std::size_t>> adj;
  for (std::size_t i = 0; i < dec.edges.size(); ++i) adj[dec.edges[i].src].push_back(i);

  std::map<std::string, std::string> rep;
  for (const auto& l : dec.locations()) {
    if (olocs.count(l)) continue;
    std::string cur = l;
    std::set<std::string> seen;
    while (!olocs.count(cur)) {
      if (!seen.insert(cur).second)
        throw ConfigError("reset chain starting at '" + l + "' loops");
      auto it = adj.find(cur);
      if (it == adj.end() || it->second.size() != 1 ||
          !std::holds_alternative<CReset>(dec.edges[it->second[0]].cmd))
        throw ConfigError("'" + cur + "' is not a spliced reset location");
      cur = dec.edges[it->second[0]].tgt;
    }
    rep[l] = cur;
  }
  return rep;
}

// Index of the k-th edge u -> v in prog, counting in edge-list order.
std::optional<std::size_t> parallel_edge(const Program& prog, const std::string& u,
                                         const std::string& v, std::size_t k) {
  std::size_t seen = 0;
  for (std::size_t i = 0; i < prog.edges.size(); ++i) {
    if (prog.edges[i].src != u || prog.edges[i].tgt != v) continue;
    if (seen == k) return i;
    ++seen;
  }
  return std::nullopt;
}

std::size_t resolve_step_edge(const Program& dec, const Path& tr, std::size_t step_idx) {
  const PathStep& st = tr.steps[step_idx];
  const std::string& u = step_idx == 0 ? tr.init.loc : tr.steps[step_idx - 1].post.loc;
  const std::string& v = st.post.loc;
  if (st.edge < dec.edges.size() && dec.edges[st.edge].src == u && dec.edges[st.edge].tgt == v &&
      cmd_eq(dec.edges[st.edge].cmd, st.cmd))
    return st.edge;
  for (std::size_t i = 0; i < dec.edges.size(); ++i)
    if (dec.edges[i].src == u && dec.edges[i].tgt == v && cmd_eq(dec.edges[i].cmd, st.cmd))
      return i;
  throw ConfigError("path step " + std::to_string(step_idx) +
                    " does not follow an edge of the transformed program");
}

} // namespace

ReconstructionResult reconstruct_original_path(const Program& orig, const Program& dec,
                                               const Decomposition& d, const Path& tr) {
  std::map<std::string, std::string> rep = splice_reps(orig, dec);
  auto rep_of = [&](const std::string& l) -> const std::string& {
    auto it = rep.find(l);
    return it == rep.end() ? l : it->second;
  };

  ReconstructionResult res;
  Store orig_init;
  orig_init.vars = tr.init.store.vars;
  for (const auto& r : orig.resources) orig_init.res[r] = ResourceCells{};
  res.orig_path.init = State{rep_of(tr.init.loc), std::move(orig_init)};
  res.reports.push_back(conforms(res.orig_path.init.store, tr.init.store, d));

  for (std::size_t i = 0; i < tr.steps.size(); ++i) {
    const PathStep& st = tr.steps[i];
    std::size_t dec_edge = resolve_step_edge(dec, tr, i);
    const std::string& u = dec.edges[dec_edge].src;

    if (rep.count(u)) {
      // Inserted reset: the original stays put; the landing state still
      // aligns with the current original state.
      if (!std::holds_alternative<CReset>(st.cmd))
        throw ConfigError("non-reset command leaves spliced location '" + u + "'");
      res.reports.push_back(conforms(res.orig_path.last().store, st.post.store, d));
      continue;
    }

    // Count parallel position among dec edges u -> v, then replay the
    // positionally matching original edge u -> rep(v).
    const std::string& v = dec.edges[dec_edge].tgt;
    std::size_t k = 0;
    for (std::size_t j = 0; j < dec_edge; ++j)
      if (dec.edges[j].src == u && dec.edges[j].tgt == v) ++k;
    auto oidx = parallel_edge(orig, u, rep_of(v), k);
    if (!oidx)
      throw ConfigError("transformed edge " + edge_id(dec, dec_edge) +
                        " has no counterpart in the original program");

    const Edge& oe = orig.edges[*oidx];
    NondetTape tape;
    if (st.havoc) tape.values.push_back(*st.havoc);
    StepOutcome oc = eval_cmd(res.orig_path.last().store, oe.cmd, tape);
    auto* pr = std::get_if<Progressed>(&oc);
    if (!pr) {
      res.orig_stuck = true;
      res.stuck_step = i;
      return res;
    }
    std::optional<Int> draw;
    if (std::holds_alternative<CHavoc>(oe.cmd)) draw = st.havoc;
    res.orig_path.steps.push_back(PathStep{res.orig_path.last().store, oe.cmd, draw,
                                           State{oe.tgt, std::move(pr->next)}, *oidx});
    res.reports.push_back(conforms(res.orig_path.last().store, st.post.store, d));
  }
  return res;
}

InputDomain InputDomain::uniform(const Program& p, Int lo, Int hi) {
  InputDomain dom;
  for (const auto& x : p.inputs) dom.ranges[x] = {lo, hi};
  return dom;
}

namespace {

std::optional<std::map<std::string, Int>> sample_inputs(const Program& p, const InputDomain& dom,
                                                        std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::map<std::string, Int> inputs;
    for (const auto& x : p.inputs) {
      auto it = dom.ranges.find(x);
      if (it == dom.ranges.end()) throw ConfigError("no input range for '" + x + "'");
      long long lo = it->second.first.convert_to<long long>();
      long long hi = it->second.second.convert_to<long long>();
      std::uniform_int_distribution<long long> dist(lo, hi);
      inputs[x] = Int(dist(rng));
    }
    Store s;
    s.vars.clear();
    for (const auto& [k, v] : inputs) s.vars[k] = v;
    if (!p.pre || eval_bool(s, p.pre)) return inputs;
  }
  return std::nullopt;
}

DifftestSummary run_difftest(const Program& p, const Program& dec, const Decomposition& d,
                             const DifftestOptions& opts) {
  DifftestSummary sum;
  for (unsigned trial = 0; trial < opts.trials; ++trial) {
    std::mt19937_64 rng(opts.seed ^ (0x9E3779B97F4A7C15ULL * (trial + 1)));
    auto inputs = sample_inputs(p, opts.inputs, rng);
    if (!inputs) {
      ++sum.trials_skipped;
      continue;
    }
    ++sum.trials_run;
    RunResult walk = random_walk(dec, initial_store(dec, *inputs), opts.havoc, opts.fuel, rng);
    ReconstructionResult rec = reconstruct_original_path(p, dec, d, walk.path);

    sum.aligned_states += rec.reports.size();
    for (const auto& r : rec.reports) {
      for (const auto& e : r.per_resource)
        if (!sum.min_slack || e.slack < *sum.min_slack) sum.min_slack = e.slack;
      if (!r.conforming) {
        ++sum.falsifications;
        if (sum.notes.size() < 5) {
          std::ostringstream os;
          os << "trial " << trial << ": non-conforming state";
          for (const auto& v : r.var_mismatches) os << " var=" << v;
          for (const auto& e : r.per_resource)
            if (e.slack < 0) os << " " << e.res << " slack=" << e.slack.str();
          sum.notes.push_back(os.str());
        }
      }
    }
    if (rec.orig_stuck) {
      ++sum.falsifications;
      ++sum.stuck_originals;
      if (sum.notes.size() < 5)
        sum.notes.push_back("trial " + std::to_string(trial) + ": original stuck at step " +
                            std::to_string(rec.stuck_step));
    }
  }
  return sum;
}

} // namespace

DifftestSummary difftest(const Program& p, const Decomposition& d, const DifftestOptions& opts) {
  TransformResult tr = transform_program(p, d);
  return run_difftest(p, tr.program, d, opts);
}

DifftestSummary difftest_against(const Program& p, const Program& dec, const Decomposition& d,
                                 const DifftestOptions& opts) {
  return run_difftest(p, dec, d, opts);
}

} // namespace brbo
