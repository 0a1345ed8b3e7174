#pragma once

#include "brbo/decompose.hpp"
#include "brbo/interp.hpp"

namespace brbo {

struct VerdictNoViolation {
  unsigned long long inputs_explored = 0;
  unsigned long long paths_explored = 0;
  long fuel = 0;
};

struct VerdictViolation {
  std::string kind; // "ub", "lb", or "predicate"
  std::map<std::string, Int> inputs;
  Path path;           // prefix leading to the failure
  std::string edge_id; // failing check edge; empty for predicate violations
  std::vector<std::string> res;
  Int bound;  // bound for checks; unused for predicates
  Int actual; // summary sum for checks; unused for predicates
};

struct VerdictResourceLimit {
  unsigned long long inputs_explored = 0;
  unsigned long long paths_explored = 0;
  std::string limit; // "state_cap"
};

using Verdict = std::variant<VerdictNoViolation, VerdictViolation, VerdictResourceLimit>;

// Enumerates all input vectors in the domain that satisfy the precondition
// (lexicographically, in input declaration order) and exhaustively explores
// paths for each. The state cap is a global budget across all inputs; the
// first violation in exploration order wins.
Verdict bounded_verify(const Program& p, const InputDomain& inputs, const HavocDomain& havoc,
                       const EnumLimits& lim);

struct MaxResult {
  Int value = 0;
  unsigned long long paths_explored = 0;
  bool capped = false;             // state cap hit
  unsigned long long fuel_cut = 0; // paths truncated by fuel
};

// Largest value of resource r over every state reachable from the given
// input vector (a prefix maximum: later drops do not lower it).
MaxResult max_resource(const Program& p, const std::string& r,
                       const std::map<std::string, Int>& inputs, const HavocDomain& havoc,
                       const EnumLimits& lim);

// Evaluates pred in every enumerated state at location loc. Predicates may
// read program variables, resources, and summary cells: for a resource
// named R, `ubR`, `cntR` and `lbR` denote its summary values (e.g. ub#sb_1).
Verdict check_predicate_at(const Program& p, const std::string& loc, const ExprPtr& pred,
                           const InputDomain& inputs, const HavocDomain& havoc,
                           const EnumLimits& lim);

Value eval_predicate(const Store& s, const ExprPtr& e);

struct NiBucketStats {
  std::string key; // inputs + low-variable values at segment start
  unsigned long long segments = 0;
  Int min_usage;
  Int max_usage;
};

struct NiProbeReport {
  unsigned trials_run = 0;
  unsigned long long segments_observed = 0; // reset-to-reset only; tails dropped
  unsigned long long buckets = 0;
  Int max_spread; // max over buckets of (max_usage - min_usage); 0 if none
  std::vector<NiBucketStats> bucket_stats;
};

// Diagnostic sampler for non-interference: groups segments between
// consecutive executions of `reset r` by (input vector, low-variable values
// at segment start) and reports the spread of per-segment usage. High
// variables vary through havoc tapes. reset_loc names the guarded location
// (the target of the reset edge); segments at other resets of r are ignored.
NiProbeReport noninterference_probe(const Program& p, const std::string& r,
                                    const std::string& reset_loc,
                                    const std::vector<std::string>& low_vars, unsigned trials,
                                    std::uint64_t seed, const InputDomain& inputs,
                                    const HavocDomain& havoc, long fuel);

} // namespace brbo
