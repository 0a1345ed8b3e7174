#pragma once

#include "brbo/corelang.hpp"

#include <functional>
#include <random>

namespace brbo {

// Replay source for havoc commands. Enumeration mode never consults a tape;
// it branches over the havoc domain instead.
struct NondetTape {
  std::vector<Int> values;
  std::size_t cursor = 0;

  bool exhausted() const { return cursor >= values.size(); }
  Int draw() { return values[cursor++]; }
};

struct Progressed {
  Store next;
};
struct BlockedAssume {};
struct ViolatedUb {
  std::vector<std::string> res;
  Int bound;
  Int actual;
};
struct ViolatedLb {
  Int bound;
  Int actual;
};
struct TapeExhausted {};

using StepOutcome = std::variant<Progressed, BlockedAssume, ViolatedUb, ViolatedLb, TapeExhausted>;

Value eval_expr(const Store& s, const ExprPtr& e);
Int eval_int(const Store& s, const ExprPtr& e);
bool eval_bool(const Store& s, const ExprPtr& e);

// Sum of upper-bound summaries: for each r, cnt(r)*ub(r) + r.
Int summary_sum_ub(const Store& s, const std::vector<std::string>& rs);
Int summary_sum_lb(const Store& s, const std::vector<std::string>& rs);

StepOutcome eval_cmd(const Store& s, const Cmd& c, NondetTape& tape);

// Outcome of attempting each out-edge of st.loc, in edge-list order. Every
// attempt sees the tape at its current cursor (attempts do not advance it).
struct EdgeAttempt {
  std::size_t edge;
  StepOutcome outcome;
};
std::vector<EdgeAttempt> step(const Program& p, const State& st, const NondetTape& tape);

struct HavocDomain {
  Int lo = 0;
  Int hi = 0;
};

inline unsigned long long default_state_cap() {
  if (const char* env = std::getenv("BRBO_STATE_CAP")) {
    unsigned long long v = std::strtoull(env, nullptr, 10);
    if (v > 0) return v;
  }
  return 10'000'000ULL;
}

struct EnumLimits {
  long fuel = 100; // executed commands per path
  unsigned long long state_cap = default_state_cap();
};

struct ViolationReport {
  Path path; // prefix leading to the failed check; the check edge is not taken
  std::size_t edge;
  StepOutcome outcome; // ViolatedUb or ViolatedLb
};

struct EnumStats {
  unsigned long long paths = 0; // well-formed prefixes visited (incl. empty)
  unsigned long long violations = 0;
  bool hit_state_cap = false;
  unsigned long long fuel_truncated = 0; // paths cut while successors remained
};

struct EnumVisitor {
  // Either callback may be empty. Returning false stops the enumeration.
  std::function<bool(const Path&)> on_path;
  std::function<bool(const ViolationReport&)> on_violation;
};

// Exhaustive DFS over branch and havoc choices, prefix-closed: on_path fires
// for every visited prefix, so every prefix of an emitted path was emitted.
// pre: init satisfies p's precondition.
EnumStats enumerate_paths(const Program& p, const Store& init, const HavocDomain& dom,
                          const EnumLimits& lim, const EnumVisitor& vis);

// Materialising helper for small cases.
std::vector<Path> all_paths(const Program& p, const Store& init, const HavocDomain& dom,
                            const EnumLimits& lim);

// Checks alternation (each step's pre equals the preceding store) and that
// each post store is reproduced by eval_cmd under the recorded havoc choice.
// Returns the first problem, or nullopt if the path is well-formed.
std::optional<std::string> path_check(const Path& path);
inline bool path_ok(const Path& path) { return !path_check(path).has_value(); }

enum class RunEnd { Completed, Blocked, Violated, FuelOut, TapeOut };

struct RunResult {
  Path path;
  RunEnd end = RunEnd::Completed;
  std::optional<ViolationReport> violation;
};

// Deterministic single run: at each state take the first out-edge that
// progresses (edge-list order), drawing havocs from the tape.
RunResult run_program(const Program& p, Store init, NondetTape tape, long fuel);

// Random walk used by the differential harness: branch choice and havoc
// draws both come from rng; havocs are sampled from dom.
RunResult random_walk(const Program& p, Store init, const HavocDomain& dom, long fuel,
                      std::mt19937_64& rng);

} // namespace brbo
