#include "brbo/json_io.hpp"

#include "brbo/frontend.hpp"

#include <fstream>

namespace brbo {

namespace {

const Int kI64Min{std::numeric_limits<std::int64_t>::min()};
const Int kI64Max{std::numeric_limits<std::int64_t>::max()};

} // namespace

json int_to_json(const Int& n) {
  if (n >= kI64Min && n <= kI64Max) return n.convert_to<std::int64_t>();
  return n.str();
}

Int int_from_json(const json& j) {
  if (j.is_number_integer()) return Int(j.get<std::int64_t>());
  if (j.is_string()) return Int(j.get<std::string>());
  throw ConfigError("expected an integer or a decimal string");
}

json store_to_json(const Store& s) {
  json vars = json::object();
  for (const auto& [k, v] : s.vars) {
    if (const Int* n = std::get_if<Int>(&v))
      vars[k] = int_to_json(*n);
    else
      vars[k] = std::get<bool>(v);
  }
  json res = json::object();
  for (const auto& [k, c] : s.res)
    res[k] = json{{"val", int_to_json(c.val)},
                  {"ub", int_to_json(c.ub)},
                  {"cnt", int_to_json(c.cnt)},
                  {"lb", int_to_json(c.lb)}};
  return json{{"vars", std::move(vars)}, {"resources", std::move(res)}};
}

json trace_to_json(const Program& p, const Path& path) {
  json states = json::array();
  json cmds = json::array();
  json havocs = json::array();
  states.push_back(json{{"loc", path.init.loc}, {"store", store_to_json(path.init.store)}});
  for (const auto& st : path.steps) {
    states.push_back(json{{"loc", st.post.loc}, {"store", store_to_json(st.post.store)}});
    cmds.push_back(print_cmd(st.cmd));
    if (st.havoc) havocs.push_back(int_to_json(*st.havoc));
  }
  return json{{"program", p.name},
              {"states", std::move(states)},
              {"cmds", std::move(cmds)},
              {"havocs", std::move(havocs)}};
}

json decomposition_to_json(const Decomposition& d) {
  json groups = json::object();
  for (const auto& [orig, gs] : d.groups) groups[orig] = gs;
  json sites = json::object();
  for (const auto& [site, g] : d.sites) sites[site] = g;
  json resets = json::object();
  for (const auto& [g, locs] : d.resets) {
    if (locs.size() == 1)
      resets[g] = locs[0];
    else
      resets[g] = locs;
  }
  return json{{"groups", std::move(groups)},
              {"sites", std::move(sites)},
              {"resets", std::move(resets)}};
}

Decomposition decomposition_from_json(const json& j) {
  Decomposition d;
  if (!j.is_object()) throw ConfigError("decomposition must be a JSON object");
  if (j.contains("groups"))
    for (const auto& [orig, gs] : j.at("groups").items()) {
      if (!gs.is_array()) throw ConfigError("groups entries must be arrays");
      for (const auto& g : gs) d.groups[orig].push_back(g.get<std::string>());
    }
  if (j.contains("sites"))
    for (const auto& [site, g] : j.at("sites").items())
      d.sites[site] = g.get<std::string>();
  if (j.contains("resets"))
    for (const auto& [g, locs] : j.at("resets").items()) {
      if (locs.is_string())
        d.resets[g] = {locs.get<std::string>()};
      else if (locs.is_array())
        for (const auto& l : locs) d.resets[g].push_back(l.get<std::string>());
      else
        throw ConfigError("reset placements must be a string or an array");
    }
  return d;
}

Decomposition load_decomposition(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  json j = json::parse(in);
  return decomposition_from_json(j);
}

json verdict_to_json(const Program& p, const Verdict& v) {
  return std::visit(
      [&](const auto& vv) -> json {
        using T = std::decay_t<decltype(vv)>;
        if constexpr (std::is_same_v<T, VerdictNoViolation>) {
          return json{{"verdict", "no_violation"},
                      {"inputs_explored", vv.inputs_explored},
                      {"paths_explored", vv.paths_explored},
                      {"fuel", vv.fuel}};
        } else if constexpr (std::is_same_v<T, VerdictViolation>) {
          json inputs = json::object();
          for (const auto& [k, n] : vv.inputs) inputs[k] = int_to_json(n);
          json out{{"verdict", "violation"},
                   {"kind", vv.kind},
                   {"inputs", std::move(inputs)},
                   {"trace", trace_to_json(p, vv.path)}};
          if (!vv.edge_id.empty()) {
            out["edge"] = vv.edge_id;
            out["resources"] = vv.res;
            out["bound"] = int_to_json(vv.bound);
            out["actual"] = int_to_json(vv.actual);
          }
          return out;
        } else {
          return json{{"verdict", "resource_limit"},
                      {"inputs_explored", vv.inputs_explored},
                      {"paths_explored", vv.paths_explored},
                      {"limit", vv.limit}};
        }
      },
      v);
}

json selection_trace_to_json(const SelectionTrace& t) {
  json initial = json::array();
  for (const auto& [site, g] : t.initial)
    initial.push_back(json{{"site", site}, {"group", g}});
  json merges = json::array();
  for (const auto& m : t.merges) {
    json cd = json::object();
    for (const auto& [v, s] : m.const_at_dom) cd[v] = s;
    merges.push_back(json{{"resource", m.resource},
                          {"site_a", m.site_a},
                          {"site_b", m.site_b},
                          {"shared_low", m.shared_low},
                          {"dominator", m.dominator},
                          {"const_at_dominator", std::move(cd)},
                          {"merged", m.merged}});
  }
  json placements = json::array();
  for (const auto& pl : t.placements) {
    json walk = json::array();
    for (std::size_t i = 0; i < pl.chain.size(); ++i) {
      json snap = json::object();
      for (const auto& [v, s] : pl.constancy[i]) snap[v] = s;
      walk.push_back(json{{"location", pl.chain[i]}, {"constancy", std::move(snap)}});
    }
    placements.push_back(json{{"group", pl.group},
                              {"low_vars", pl.low_vars},
                              {"walk", std::move(walk)},
                              {"chosen", pl.chosen},
                              {"fallback", pl.fallback}});
  }
  return json{{"initial", std::move(initial)},
              {"merges", std::move(merges)},
              {"placements", std::move(placements)},
              {"warnings", t.warnings}};
}

json difftest_to_json(const DifftestSummary& s) {
  json out{{"trials_run", s.trials_run},
           {"trials_skipped", s.trials_skipped},
           {"aligned_states", s.aligned_states},
           {"falsifications", s.falsifications},
           {"stuck_originals", s.stuck_originals},
           {"notes", s.notes}};
  if (s.min_slack) out["min_slack"] = int_to_json(*s.min_slack);
  return out;
}

json probe_to_json(const NiProbeReport& r) {
  json buckets = json::array();
  for (const auto& b : r.bucket_stats)
    buckets.push_back(json{{"key", b.key},
                           {"segments", b.segments},
                           {"min_usage", int_to_json(b.min_usage)},
                           {"max_usage", int_to_json(b.max_usage)}});
  return json{{"trials_run", r.trials_run},
              {"segments_observed", r.segments_observed},
              {"buckets", r.buckets},
              {"max_spread", int_to_json(r.max_spread)},
              {"bucket_stats", std::move(buckets)}};
}

json analyses_to_json(const DomTree& dt, const ConstMap& cm) {
  json idom = json::object();
  for (const auto& [l, d] : dt.idom) idom[l] = d;
  json consts = json::object();
  for (const auto& [l, st] : cm.at) {
    json vars = json::object();
    for (const auto& [v, cv] : st) vars[v] = to_string(cv);
    consts[l] = std::move(vars);
  }
  return json{{"entry", dt.entry},
              {"idom", std::move(idom)},
              {"pruned_unreachable", dt.pruned_unreachable},
              {"constants", std::move(consts)}};
}

} // namespace brbo
