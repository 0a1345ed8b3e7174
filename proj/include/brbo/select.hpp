#pragma once

#include "brbo/analyses.hpp"
#include "brbo/decompose.hpp"

namespace brbo {

struct MergeDecision {
  std::string resource;
  std::string site_a, site_b; // edge ids
  std::vector<std::string> shared_low;
  std::string dominator; // deepest common dominator of the two site sources
  std::map<std::string, std::string> const_at_dom; // shared low var -> lattice value
  bool merged = false;
};

struct PlacementDecision {
  std::string group;
  std::vector<std::string> low_vars;
  std::vector<std::string> chain; // candidates walked, deepest first
  // per candidate: low var -> lattice value at that location
  std::vector<std::map<std::string, std::string>> constancy;
  std::string chosen;
  bool fallback = false; // walk exhausted; placed at entry with a warning
};

struct SelectionTrace {
  // site edge id -> group, before merging
  std::vector<std::pair<std::string, std::string>> initial;
  std::vector<MergeDecision> merges;
  std::vector<PlacementDecision> placements;
  std::vector<std::string> warnings;
};

// One singleton group per use site, named <resource>_<k> in edge-list order.
Decomposition initial_groups(const Program& p, SelectionTrace* trace = nullptr);

// Merge two groups of the same resource when their sites share a low variable
// (in both backward slices and internal, i.e. properly assigned somewhere)
// that is not provably constant at the sites' deepest common dominator.
// Merging is transitive; surviving groups are renamed <resource>_<k> by the
// edge order of their first site.
Decomposition merge_groups(const Program& p, const Decomposition& d,
                           SelectionTrace* trace = nullptr);

// For each group, walk the dominator chain up from the deepest common
// dominator of its site sources and place one reset at the first location
// where every low variable of the group is provably constant. If the walk
// exhausts, fall back to the entry and record a warning.
Decomposition place_resets(const Program& p, const Decomposition& d,
                           SelectionTrace* trace = nullptr);

struct SelectionResult {
  Decomposition decomposition;
  SelectionTrace trace;
};

SelectionResult select(const Program& p);

} // namespace brbo
