#include "brbo/verify.hpp"

#include <algorithm>
#include <sstream>

namespace brbo {

namespace {

// Odometer over input ranges in declaration order; yields vectors
// lexicographically. Returns false once exhausted.
struct InputIter {
  std::vector<std::string> names;
  std::vector<std::pair<Int, Int>> ranges;
  std::vector<Int> cur;
  bool done = false;

  InputIter(const Program& p, const InputDomain& dom) {
    for (const auto& x : p.inputs) {
      auto it = dom.ranges.find(x);
      if (it == dom.ranges.end()) throw ConfigError("no input range for '" + x + "'");
      if (it->second.second < it->second.first) done = true;
      names.push_back(x);
      ranges.push_back(it->second);
      cur.push_back(it->second.first);
    }
  }

  std::map<std::string, Int> values() const {
    std::map<std::string, Int> m;
    for (std::size_t i = 0; i < names.size(); ++i) m[names[i]] = cur[i];
    return m;
  }

  bool advance() {
    if (names.empty()) {
      done = true; // single empty vector
      return false;
    }
    for (std::size_t i = names.size(); i-- > 0;) {
      if (cur[i] < ranges[i].second) {
        ++cur[i];
        for (std::size_t j = i + 1; j < names.size(); ++j) cur[j] = ranges[j].first;
        return true;
      }
    }
    done = true;
    return false;
  }
};

bool pre_holds(const Program& p, const std::map<std::string, Int>& inputs) {
  if (!p.pre) return true;
  Store s;
  for (const auto& [k, v] : inputs) s.vars[k] = v;
  return eval_bool(s, p.pre);
}

} // namespace

Verdict bounded_verify(const Program& p, const InputDomain& inputs, const HavocDomain& havoc,
                       const EnumLimits& lim) {
  {
    auto diags = validate_program(p);
    if (!diags.empty())
      throw ConfigError("program is not well-formed: " + diags.front().message);
  }

  unsigned long long inputs_explored = 0;
  unsigned long long paths_total = 0;
  unsigned long long budget = lim.state_cap;
  std::optional<VerdictViolation> found;

  for (InputIter it(p, inputs); !it.done;) {
    auto vec = it.values();
    if (pre_holds(p, vec)) {
      ++inputs_explored;
      EnumLimits local = lim;
      local.state_cap = budget;
      EnumVisitor vis;
      vis.on_violation = [&](const ViolationReport& rep) {
        VerdictViolation v;
        v.inputs = vec;
        v.path = rep.path;
        v.edge_id = edge_id(p, rep.edge);
        if (const auto* ub = std::get_if<ViolatedUb>(&rep.outcome)) {
          v.kind = "ub";
          v.res = ub->res;
          v.bound = ub->bound;
          v.actual = ub->actual;
        } else {
          const auto& lb = std::get<ViolatedLb>(rep.outcome);
          v.kind = "lb";
          v.bound = lb.bound;
          v.actual = lb.actual;
        }
        found = std::move(v);
        return false;
      };
      EnumStats stats = enumerate_paths(p, initial_store(p, vec), havoc, local, vis);
      paths_total += stats.paths;
      if (found) return *found;
      if (stats.hit_state_cap || stats.paths >= budget)
        return VerdictResourceLimit{inputs_explored, paths_total, "state_cap"};
      budget -= stats.paths;
    }
    it.advance();
  }
  return VerdictNoViolation{inputs_explored, paths_total, lim.fuel};
}

MaxResult max_resource(const Program& p, const std::string& r,
                       const std::map<std::string, Int>& inputs, const HavocDomain& havoc,
                       const EnumLimits& lim) {
  if (!p.has_resource(r)) throw ConfigError("unknown resource '" + r + "'");
  MaxResult out;
  EnumVisitor vis;
  vis.on_path = [&](const Path& path) {
    const Int& v = path.last().store.res.at(r).val;
    if (out.value < v) out.value = v;
    return true;
  };
  EnumStats stats = enumerate_paths(p, initial_store(p, inputs), havoc, lim, vis);
  out.paths_explored = stats.paths;
  out.capped = stats.hit_state_cap;
  out.fuel_cut = stats.fuel_truncated;
  return out;
}

Value eval_predicate(const Store& s, const ExprPtr& e) {
  if (!e) throw EvalError("missing predicate");
  if (e->kind == ExprKind::Var) {
    auto it = s.vars.find(e->name);
    if (it != s.vars.end()) return it->second;
    auto rt = s.res.find(e->name);
    if (rt != s.res.end()) return rt->second.val;
    for (const auto& [prefix, off] : {std::pair<const char*, int>{"ub", 2}, {"cnt", 3}, {"lb", 2}}) {
      if (e->name.rfind(prefix, 0) != 0) continue;
      auto rr = s.res.find(e->name.substr(off));
      if (rr == s.res.end()) continue;
      if (e->name.compare(0, 2, "ub") == 0 && off == 2) return rr->second.ub;
      if (off == 3) return rr->second.cnt;
      return rr->second.lb;
    }
    throw EvalError("predicate reads unknown name '" + e->name + "'");
  }
  // Recurse with the extended lookup.
  switch (e->kind) {
    case ExprKind::IntLit: return e->lit;
    case ExprKind::BoolLit: return e->blit;
    case ExprKind::Not: return !std::get<bool>(eval_predicate(s, e->a));
    case ExprKind::And:
      return std::get<bool>(eval_predicate(s, e->a)) && std::get<bool>(eval_predicate(s, e->b));
    case ExprKind::Or:
      return std::get<bool>(eval_predicate(s, e->a)) || std::get<bool>(eval_predicate(s, e->b));
    default: break;
  }
  Int a = std::get<Int>(eval_predicate(s, e->a));
  Int b = std::get<Int>(eval_predicate(s, e->b));
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
    default: throw EvalError("malformed predicate");
  }
}

Verdict check_predicate_at(const Program& p, const std::string& loc, const ExprPtr& pred,
                           const InputDomain& inputs, const HavocDomain& havoc,
                           const EnumLimits& lim) {
  if (!p.locations().count(loc)) throw ConfigError("unknown location '" + loc + "'");

  unsigned long long inputs_explored = 0;
  unsigned long long paths_total = 0;
  unsigned long long budget = lim.state_cap;
  std::optional<VerdictViolation> found;

  for (InputIter it(p, inputs); !it.done;) {
    auto vec = it.values();
    if (pre_holds(p, vec)) {
      ++inputs_explored;
      EnumLimits local = lim;
      local.state_cap = budget;
      EnumVisitor vis;
      vis.on_path = [&](const Path& path) {
        const State& st = path.last();
        if (st.loc != loc) return true;
        Value v = eval_predicate(st.store, pred);
        const bool* b = std::get_if<bool>(&v);
        if (!b) throw ConfigError("predicate is not boolean-sorted");
        if (*b) return true;
        VerdictViolation vv;
        vv.kind = "predicate";
        vv.inputs = vec;
        vv.path = path;
        found = std::move(vv);
        return false;
      };
      EnumStats stats = enumerate_paths(p, initial_store(p, vec), havoc, local, vis);
      paths_total += stats.paths;
      if (found) return *found;
      if (stats.hit_state_cap || stats.paths >= budget)
        return VerdictResourceLimit{inputs_explored, paths_total, "state_cap"};
      budget -= stats.paths;
    }
    it.advance();
  }
  return VerdictNoViolation{inputs_explored, paths_total, lim.fuel};
}

NiProbeReport noninterference_probe(const Program& p, const std::string& r,
                                    const std::string& reset_loc,
                                    const std::vector<std::string>& low_vars, unsigned trials,
                                    std::uint64_t seed, const InputDomain& inputs,
                                    const HavocDomain& havoc, long fuel) {
  if (!p.has_resource(r)) throw ConfigError("unknown resource '" + r + "'");
  bool has_reset = false;
  for (const auto& e : p.edges) {
    const auto* rs = std::get_if<CReset>(&e.cmd);
    if (rs && rs->res == r && (e.tgt == reset_loc || e.src == reset_loc)) has_reset = true;
  }

  NiProbeReport rep;
  rep.max_spread = 0;
  if (!has_reset) return rep; // nothing to segment

  struct Bucket {
    unsigned long long n = 0;
    Int min_u, max_u;
  };
  std::map<std::string, Bucket> buckets;

  for (unsigned trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * (trial + 1)));
    std::optional<std::map<std::string, Int>> vec;
    for (int attempt = 0; attempt < 64 && !vec; ++attempt) {
      std::map<std::string, Int> m;
      for (const auto& x : p.inputs) {
        auto it = inputs.ranges.find(x);
        if (it == inputs.ranges.end()) throw ConfigError("no input range for '" + x + "'");
        std::uniform_int_distribution<long long> dist(it->second.first.convert_to<long long>(),
                                                      it->second.second.convert_to<long long>());
        m[x] = Int(dist(rng));
      }
      if (pre_holds(p, m)) vec = std::move(m);
    }
    if (!vec) continue;
    ++rep.trials_run;

    RunResult run = random_walk(p, initial_store(p, *vec), havoc, fuel, rng);

    std::ostringstream in_key;
    for (const auto& [k, v] : *vec) in_key << k << "=" << v.str() << ";";

    // indices of reset-r steps guarding reset_loc
    std::vector<std::size_t> marks;
    for (std::size_t i = 0; i < run.path.steps.size(); ++i) {
      const auto* rs = std::get_if<CReset>(&run.path.steps[i].cmd);
      if (!rs || rs->res != r) continue;
      if (run.path.steps[i].post.loc == reset_loc ||
          (i > 0 ? run.path.steps[i - 1].post.loc : run.path.init.loc) == reset_loc)
        marks.push_back(i);
    }
    for (std::size_t m = 0; m + 1 < marks.size(); ++m) {
      const Store& start = run.path.steps[marks[m]].post.store;
      const Store& end = run.path.steps[marks[m + 1]].pre; // before the closing reset
      Int usage = end.res.at(r).val;
      std::ostringstream key;
      key << in_key.str() << "|";
      for (const auto& v : low_vars) {
        auto it = start.vars.find(v);
        key << v << "=" << (it == start.vars.end() ? "?" : to_string(it->second)) << ";";
      }
      ++rep.segments_observed;
      auto [bit, fresh] = buckets.try_emplace(key.str());
      Bucket& b = bit->second;
      if (fresh) {
        b.min_u = usage;
        b.max_u = usage;
      } else {
        if (usage < b.min_u) b.min_u = usage;
        if (b.max_u < usage) b.max_u = usage;
      }
      ++b.n;
    }
  }

  rep.buckets = buckets.size();
  for (const auto& [key, b] : buckets) {
    Int spread = b.max_u - b.min_u;
    if (rep.max_spread < spread) rep.max_spread = spread;
    rep.bucket_stats.push_back(NiBucketStats{key, b.n, b.min_u, b.max_u});
  }
  return rep;
}

} // namespace brbo
