#include "brbo/select.hpp"

#include <algorithm>

namespace brbo {

namespace {

struct UnionFind {
  std::vector<std::size_t> parent;

  explicit UnionFind(std::size_t n) : parent(n) {
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void merge(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // keep the smaller root so class order follows first-site order
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }
};

std::string group_name(const std::string& res, std::size_t k) {
  return res + "_" + std::to_string(k);
}

} // namespace

Decomposition initial_groups(const Program& p, SelectionTrace* trace) {
  Decomposition d;
  for (const auto& r : p.resources) {
    auto sites = use_sites(p, r);
    if (sites.empty()) {
      d.groups[r] = {group_name(r, 1)};
      continue;
    }
    for (std::size_t k = 0; k < sites.size(); ++k) {
      std::string g = group_name(r, k + 1);
      d.groups[r].push_back(g);
      std::string id = edge_id(p, sites[k]);
      d.sites[id] = g;
      if (trace) trace->initial.emplace_back(id, g);
    }
  }
  return d;
}

Decomposition merge_groups(const Program& p, const Decomposition& d, SelectionTrace* trace) {
  std::set<std::string> internal = internal_vars(p);
  DomTree dt = dominator_tree(p);
  ConstMap cm = constant_analysis(p, {});

  Decomposition out;
  for (const auto& r : p.resources) {
    auto sites = use_sites(p, r);
    if (sites.empty()) {
      out.groups[r] = {group_name(r, 1)};
      continue;
    }

    std::vector<std::set<std::string>> slices;
    slices.reserve(sites.size());
    for (std::size_t s : sites) slices.push_back(backward_slice(p, s));

    UnionFind uf(sites.size());
    // start from the partition d already encodes
    for (std::size_t i = 0; i < sites.size(); ++i)
      for (std::size_t j = i + 1; j < sites.size(); ++j) {
        auto gi = d.sites.find(edge_id(p, sites[i]));
        auto gj = d.sites.find(edge_id(p, sites[j]));
        if (gi != d.sites.end() && gj != d.sites.end() && gi->second == gj->second)
          uf.merge(i, j);
      }
    for (std::size_t i = 0; i < sites.size(); ++i) {
      for (std::size_t j = i + 1; j < sites.size(); ++j) {
        MergeDecision md;
        md.resource = r;
        md.site_a = edge_id(p, sites[i]);
        md.site_b = edge_id(p, sites[j]);
        for (const auto& v : slices[i])
          if (slices[j].count(v) && internal.count(v)) md.shared_low.push_back(v);

        if (!md.shared_low.empty()) {
          const std::string& sa = p.edges[sites[i]].src;
          const std::string& sb = p.edges[sites[j]].src;
          if (dt.reachable(sa) && dt.reachable(sb)) {
            md.dominator = dt.common_dominator({sa, sb});
            for (const auto& v : md.shared_low) {
              ConstVal cv = cm.lookup(md.dominator, v);
              md.const_at_dom[v] = to_string(cv);
              if (cv.kind != ConstKind::Const) md.merged = true;
            }
            if (md.merged) uf.merge(i, j);
          } else {
            md.dominator = "(unreachable)";
          }
        }
        if (trace) trace->merges.push_back(std::move(md));
      }
    }

    // classes in first-site order, renamed <resource>_<k>
    std::map<std::size_t, std::vector<std::size_t>> classes;
    for (std::size_t i = 0; i < sites.size(); ++i) classes[uf.find(i)].push_back(i);
    std::size_t k = 1;
    for (const auto& [root, members] : classes) {
      std::string g = group_name(r, k++);
      out.groups[r].push_back(g);
      for (std::size_t m : members) out.sites[edge_id(p, sites[m])] = g;
    }
  }
  return out;
}

Decomposition place_resets(const Program& p, const Decomposition& d, SelectionTrace* trace) {
  std::set<std::string> internal = internal_vars(p);
  DomTree dt = dominator_tree(p);
  ConstMap cm = constant_analysis(p, {});

  Decomposition out = d;
  out.resets.clear();

  for (const auto& r : p.resources) {
    auto it = d.groups.find(r);
    if (it == d.groups.end()) continue;
    for (const auto& g : it->second) {
      std::vector<std::size_t> sites;
      for (const auto& [id, sg] : d.sites)
        if (sg == g) sites.push_back(*edge_by_id(p, id));
      std::sort(sites.begin(), sites.end());
      if (sites.empty()) continue;

      PlacementDecision pd;
      pd.group = g;
      std::set<std::string> low;
      for (std::size_t s : sites)
        for (const auto& v : backward_slice(p, s))
          if (internal.count(v)) low.insert(v);
      pd.low_vars.assign(low.begin(), low.end());

      std::vector<std::string> sources;
      for (std::size_t s : sites)
        if (dt.reachable(p.edges[s].src)) sources.push_back(p.edges[s].src);
      if (sources.empty()) {
        if (trace)
          trace->warnings.push_back("group " + g + ": all use sites unreachable; no reset");
        continue;
      }

      std::string chosen;
      for (const auto& cand : dt.chain(dt.common_dominator(sources))) {
        pd.chain.push_back(cand);
        std::map<std::string, std::string> snap;
        bool all_const = true;
        for (const auto& v : pd.low_vars) {
          ConstVal cv = cm.lookup(cand, v);
          snap[v] = to_string(cv);
          if (cv.kind != ConstKind::Const) all_const = false;
        }
        pd.constancy.push_back(std::move(snap));
        if (all_const) {
          chosen = cand;
          break;
        }
      }
      if (chosen.empty()) {
        chosen = p.entry;
        pd.fallback = true;
        if (trace)
          trace->warnings.push_back("group " + g +
                                    ": no dominator where low inputs are constant; reset "
                                    "placed at the entry");
      }
      pd.chosen = chosen;
      out.resets[g] = {chosen};
      if (trace) trace->placements.push_back(std::move(pd));
    }
  }
  return out;
}

SelectionResult select(const Program& p) {
  {
    auto diags = validate_program(p);
    if (!diags.empty())
      throw ConfigError("program is not well-formed: " + diags.front().message);
  }
  SelectionResult res;
  Decomposition d0 = initial_groups(p, &res.trace);
  Decomposition d1 = merge_groups(p, d0, &res.trace);
  res.decomposition = place_resets(p, d1, &res.trace);
  return res;
}

} // namespace brbo
