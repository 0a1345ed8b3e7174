#pragma once

#include "brbo/corelang.hpp"
#include "brbo/interp.hpp"

namespace brbo {

// A decomposition splits each original resource into fresh groups, assigns
// every use site to one group of its resource, and optionally places resets.
struct Decomposition {
  // original resource -> groups, in creation order
  std::map<std::string, std::vector<std::string>> groups;
  // edge id ("src>tgt#k") of a use site -> group
  std::map<std::string, std::string> sites;
  // group -> reset placement locations; the selector emits at most one
  std::map<std::string, std::vector<std::string>> resets;

  // original resource owning a group; empty if unknown
  std::string origin_of(const std::string& group) const;
  std::vector<std::string> all_groups() const;
};

// Per original resource: orig <= sum over its groups of cnt*ub + val, with
// slack = sum - orig. Program variables must agree exactly.
struct ConformanceEntry {
  std::string res;
  Int orig;
  Int sum;
  Int slack;
};

struct ConformanceReport {
  bool conforming = false;
  std::vector<std::string> var_mismatches;
  std::vector<ConformanceEntry> per_resource;
};

ConformanceReport conforms(const Store& orig, const Store& dec, const Decomposition& d);

// Rewrites one command for the transformed program: use sites move to their
// assigned group, checks widen to the full group set, everything else is
// untouched. site_id is the edge id in the original program.
Cmd decompose_cmd(const Decomposition& d, const std::string& site_id, const Cmd& c);

struct TransformResult {
  Program program;
  // spliced reset location -> the original location it guards
  std::map<std::string, std::string> loc_rep;
  // per transformed edge: original edge index, or npos for inserted resets
  std::vector<std::size_t> edge_origin;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

// Validates the decomposition (fresh disjoint groups, total site assignment,
// placements dominating their group's sites), rewrites all commands, then
// splices resets: a placement at l introduces a fresh location l' taking all
// of l's in-edges plus the edge l' -reset-> l. A placement at the entry moves
// the entry to l' so the reset still runs first.
TransformResult transform_program(const Program& p, const Decomposition& d);

struct ReconstructionResult {
  Path orig_path;
  // one report per aligned state pair, starting with the initial states
  std::vector<ConformanceReport> reports;
  bool orig_stuck = false;
  std::size_t stuck_step = 0; // index into tr.steps where the original blocked
  bool all_conforming() const;
};

// Replays the original program along the location sequence of a transformed
// path, reusing the recorded havoc draws; inserted reset steps are erased.
// Invariant: for paths of a faithfully transformed program the original never
// sticks and every aligned pair conforms.
ReconstructionResult reconstruct_original_path(const Program& orig, const Program& dec,
                                               const Decomposition& d, const Path& tr);

struct InputDomain {
  // input -> inclusive range
  std::map<std::string, std::pair<Int, Int>> ranges;

  static InputDomain uniform(const Program& p, Int lo, Int hi);
};

struct DifftestOptions {
  unsigned trials = 100;
  std::uint64_t seed = 0;
  HavocDomain havoc;
  InputDomain inputs;
  long fuel = 120;
};

struct DifftestSummary {
  unsigned trials_run = 0;
  unsigned trials_skipped = 0; // no input vector satisfying the precondition
  unsigned long long aligned_states = 0;
  unsigned long long falsifications = 0; // non-conforming pairs + stuck originals
  unsigned long long stuck_originals = 0;
  std::optional<Int> min_slack;
  std::vector<std::string> notes; // first few falsification descriptions
};

// Transforms p under d, runs random walks on the transformed program and
// checks conformance of every aligned state pair against the reconstructed
// original run.
DifftestSummary difftest(const Program& p, const Decomposition& d, const DifftestOptions& opts);

// Same harness against a caller-supplied transformed program; used to show
// that a corrupted transform is caught.
DifftestSummary difftest_against(const Program& p, const Program& dec, const Decomposition& d,
                                 const DifftestOptions& opts);

} // namespace brbo
