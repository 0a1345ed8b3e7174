#pragma once

#include "brbo/corelang.hpp"
#include "brbo/decompose.hpp"

#include <cstdint>

namespace brbo {

struct GenOptions {
  int max_blocks = 3;
  bool allow_nesting = true;
  bool allow_negative_use = true;
  bool allow_checks = true;
  bool allow_second_resource = true;
};

// Random structured program over inputs n, m and resource r (sometimes also
// s): a sequence of scan loops (telescoping use amounts), tick loops
// (capped per-iteration use), occasional nesting, constant and negative
// uses, and pass-through upper-bound checks that hold on every run.
// Deterministic in the seed; always passes validate_program.
Program random_loop_program(std::uint64_t seed, const GenOptions& opt = {});

// Random CFG of skip edges for dominator testing: entry n0, a spanning edge
// from a lower-numbered location for most nodes, plus arbitrary extra edges
// (back, cross, self, parallel). Some locations may end up unreachable.
Program random_cfg(std::uint64_t seed, int max_nodes = 12, bool ensure_reachable = false);

// Random valid decomposition of p: each resource's use sites are partitioned
// arbitrarily, and each group gets zero, one or two resets placed on
// locations dominating all of the group's site sources.
Decomposition random_decomposition(const Program& p, std::uint64_t seed);

} // namespace brbo
