#include "brbo/analyses.hpp"
#include "brbo/decompose.hpp"
#include "brbo/frontend.hpp"
#include "brbo/interp.hpp"
#include "brbo/json_io.hpp"
#include "brbo/select.hpp"
#include "brbo/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>

namespace {

using namespace brbo;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find(sep, start);
    if (end == std::string::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

Int parse_int(const std::string& s) {
  try {
    return Int(s);
  } catch (const std::exception&) {
    throw ConfigError("not an integer: '" + s + "'");
  }
}

std::pair<Int, Int> parse_range(const std::string& s) {
  auto pos = s.find("..");
  if (pos == std::string::npos)
    throw ConfigError("range must look like lo..hi, got '" + s + "'");
  Int lo = parse_int(s.substr(0, pos));
  Int hi = parse_int(s.substr(pos + 2));
  if (lo > hi) throw ConfigError("empty range '" + s + "'");
  return {lo, hi};
}

// "lo..hi" uniform over all inputs, or "a=lo..hi,b=lo..hi" per input,
// optionally mixed (the bare range is the default for unnamed inputs).
InputDomain parse_input_spec(const Program& p, const std::string& spec) {
  std::optional<std::pair<Int, Int>> uniform;
  std::map<std::string, std::pair<Int, Int>> named;
  for (const auto& part : split(spec, ',')) {
    if (part.empty()) continue;
    auto eq = part.find('=');
    if (eq == std::string::npos)
      uniform = parse_range(part);
    else
      named[part.substr(0, eq)] = parse_range(part.substr(eq + 1));
  }
  for (const auto& [k, v] : named)
    if (std::find(p.inputs.begin(), p.inputs.end(), k) == p.inputs.end())
      throw ConfigError("unknown input '" + k + "' in --inputs");
  InputDomain dom;
  for (const auto& in : p.inputs) {
    auto it = named.find(in);
    if (it != named.end())
      dom.ranges[in] = it->second;
    else if (uniform)
      dom.ranges[in] = *uniform;
    else
      throw ConfigError("no range given for input '" + in + "'");
  }
  return dom;
}

std::map<std::string, Int> parse_assignments(const std::string& spec) {
  std::map<std::string, Int> out;
  for (const auto& part : split(spec, ',')) {
    if (part.empty()) continue;
    auto eq = part.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected name=value, got '" + part + "'");
    out[part.substr(0, eq)] = parse_int(part.substr(eq + 1));
  }
  return out;
}

HavocDomain parse_havoc(const std::string& spec) {
  auto [lo, hi] = parse_range(spec);
  return HavocDomain{lo, hi};
}

Program load_program(const std::string& path) {
  Program p = parse_program_file(path);
  auto diags = validate_program(p);
  if (!diags.empty()) {
    for (const auto& d : diags) std::cerr << path << ": " << d.message << "\n";
    throw ConfigError("program failed validation");
  }
  return p;
}

void write_output(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw ConfigError("cannot write '" + out + "'");
  f << text;
}

void print_store_text(std::ostream& os, const Store& s) {
  for (const auto& [k, v] : s.vars) os << "  " << k << " = " << to_string(v) << "\n";
  for (const auto& [k, c] : s.res)
    os << "  " << k << ": val=" << c.val << " ub=" << c.ub << " cnt=" << c.cnt
       << " lb=" << c.lb << "\n";
}

void print_trace_text(std::ostream& os, const Path& path) {
  os << path.init.loc << "\n";
  for (const auto& st : path.steps) {
    os << "    " << print_cmd(st.cmd);
    if (st.havoc) os << "    // drew " << *st.havoc;
    os << "\n" << st.post.loc << "\n";
  }
}

const char* run_end_text(RunEnd e) {
  switch (e) {
    case RunEnd::Completed: return "completed";
    case RunEnd::Blocked: return "blocked";
    case RunEnd::Violated: return "violated";
    case RunEnd::FuelOut: return "fuel exhausted";
    case RunEnd::TapeOut: return "tape exhausted";
  }
  return "?";
}

int report_verdict(const Program& p, const Verdict& v, const std::string& format) {
  if (format == "json") {
    std::cout << verdict_to_json(p, v).dump(2) << "\n";
  } else if (const auto* ok = std::get_if<VerdictNoViolation>(&v)) {
    std::cout << "no violation up to bounds: " << ok->inputs_explored << " input vectors, "
              << ok->paths_explored << " paths, fuel " << ok->fuel << "\n";
  } else if (const auto* bad = std::get_if<VerdictViolation>(&v)) {
    std::cout << "violation (" << bad->kind << ") at inputs";
    for (const auto& [k, n] : bad->inputs) std::cout << " " << k << "=" << n;
    std::cout << "\n";
    if (!bad->edge_id.empty())
      std::cout << "  edge " << bad->edge_id << ": bound " << bad->bound << ", actual "
                << bad->actual << "\n";
    print_trace_text(std::cout, bad->path);
  } else {
    const auto& lim = std::get<VerdictResourceLimit>(v);
    std::cout << "resource limit (" << lim.limit << ") after " << lim.inputs_explored
              << " input vectors, " << lim.paths_explored << " paths\n";
  }
  if (std::holds_alternative<VerdictViolation>(v)) return 1;
  if (std::holds_alternative<VerdictResourceLimit>(v)) return 2;
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"selective-amortization resource analysis toolkit"};
  app.require_subcommand(1);

  std::string file, format = "text", out, groups_file, emit_dec;
  std::string inputs_spec, havoc_spec, tape_spec, at_loc, pred_text, group, reset_loc, low_spec;
  long fuel = 400;
  unsigned trials = 100;
  std::uint64_t seed = 0;
  unsigned long long cap = 0;
  bool auto_dec = false, refine = false;

  auto add_file = [&](CLI::App* sub) {
    sub->add_option("file", file, "program file (.brbo)")->required();
  };
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"text", "json"}));
  };

  auto* cmd_parse = app.add_subcommand("parse", "parse and validate, echo the canonical form");
  add_file(cmd_parse);

  auto* cmd_run = app.add_subcommand("run", "execute one run and dump its trace");
  add_file(cmd_run);
  add_format(cmd_run);
  cmd_run->add_option("--inputs", inputs_spec, "concrete inputs, e.g. n=3,m=2");
  cmd_run->add_option("--tape", tape_spec, "comma-separated havoc values (deterministic run)");
  cmd_run->add_option("--seed", seed, "random-walk seed (when no tape is given)");
  cmd_run->add_option("--havoc", havoc_spec, "havoc domain lo..hi for random walks")
      ->default_str("0..3");
  cmd_run->add_option("--fuel", fuel, "maximum executed commands")->default_val(1000);

  auto* cmd_select = app.add_subcommand("select", "pick a decomposition and explain it");
  add_file(cmd_select);
  add_format(cmd_select);
  cmd_select->add_option("-o,--output", out, "write the decomposition JSON here");

  auto* cmd_transform = app.add_subcommand("transform", "rewrite a program under a decomposition");
  add_file(cmd_transform);
  cmd_transform->add_flag("--auto", auto_dec, "use the selection heuristic");
  cmd_transform->add_option("--groups", groups_file, "decomposition JSON file");
  cmd_transform->add_option("-o,--output", out, "write the transformed program here");
  cmd_transform->add_option("--emit-decomposition", emit_dec,
                            "also write the decomposition used");

  auto* cmd_verify = app.add_subcommand("verify", "bounded exhaustive check of ub!/lb! or a predicate");
  add_file(cmd_verify);
  add_format(cmd_verify);
  cmd_verify->add_option("--inputs", inputs_spec, "input ranges: lo..hi or a=lo..hi,b=lo..hi")
      ->default_str("0..2");
  cmd_verify->add_option("--havoc", havoc_spec, "havoc domain lo..hi")->default_str("0..3");
  cmd_verify->add_option("--fuel", fuel, "maximum executed commands per path")->default_val(400);
  cmd_verify->add_option("--cap", cap, "state budget across all inputs (default $BRBO_STATE_CAP or 10^7)");
  cmd_verify->add_option("--at", at_loc, "check a predicate at this location");
  cmd_verify->add_option("--pred", pred_text, "predicate over variables, resources and summaries");

  auto* cmd_difftest = app.add_subcommand("difftest", "conformance fuzzing of a transformation");
  add_file(cmd_difftest);
  add_format(cmd_difftest);
  cmd_difftest->add_flag("--auto", auto_dec, "use the selection heuristic");
  cmd_difftest->add_option("--groups", groups_file, "decomposition JSON file");
  cmd_difftest->add_option("--trials", trials, "random walks to attempt")->default_val(100);
  cmd_difftest->add_option("--seed", seed, "base seed");
  cmd_difftest->add_option("--inputs", inputs_spec, "input ranges")->default_str("0..3");
  cmd_difftest->add_option("--havoc", havoc_spec, "havoc domain lo..hi")->default_str("0..4");
  cmd_difftest->add_option("--fuel", fuel, "walk length limit")->default_val(120);

  auto* cmd_analyze = app.add_subcommand("analyze", "dump dominators and constant facts as JSON");
  add_file(cmd_analyze);
  cmd_analyze->add_flag("--refine-assumes", refine, "refine constants along assume(x = c) edges");

  auto* cmd_probe = app.add_subcommand("probe-ni", "sample per-segment usage spread at a reset");
  add_file(cmd_probe);
  add_format(cmd_probe);
  cmd_probe->add_option("--group", group, "resource whose segments are probed")->required();
  cmd_probe->add_option("--reset-loc", reset_loc, "location guarded by the reset")->required();
  cmd_probe->add_option("--low", low_spec, "comma-separated low variables");
  cmd_probe->add_option("--trials", trials, "random walks to sample")->default_val(200);
  cmd_probe->add_option("--seed", seed, "base seed");
  cmd_probe->add_option("--inputs", inputs_spec, "input ranges")->default_str("0..3");
  cmd_probe->add_option("--havoc", havoc_spec, "havoc domain lo..hi")->default_str("0..4");
  cmd_probe->add_option("--fuel", fuel, "walk length limit")->default_val(200);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*cmd_parse) {
      std::cout << print_program(load_program(file));
      return 0;
    }

    if (*cmd_run) {
      Program p = load_program(file);
      Store init = initial_store(p, parse_assignments(inputs_spec));
      if (p.pre && !eval_bool(init, p.pre)) throw ConfigError("inputs violate the precondition");
      RunResult res;
      if (!tape_spec.empty()) {
        NondetTape tape;
        for (const auto& part : split(tape_spec, ','))
          if (!part.empty()) tape.values.push_back(parse_int(part));
        res = run_program(p, init, tape, fuel);
      } else {
        std::mt19937_64 rng(seed);
        res = random_walk(p, init, havoc_spec.empty() ? HavocDomain{0, 3} : parse_havoc(havoc_spec),
                          fuel, rng);
      }
      if (format == "json") {
        json j = trace_to_json(p, res.path);
        j["end"] = run_end_text(res.end);
        std::cout << j.dump(2) << "\n";
      } else {
        print_trace_text(std::cout, res.path);
        std::cout << "end: " << run_end_text(res.end) << "\n";
        std::cout << "final store:\n";
        print_store_text(std::cout, res.path.last().store);
      }
      return res.end == RunEnd::Violated ? 1 : 0;
    }

    if (*cmd_select) {
      Program p = load_program(file);
      SelectionResult sel = select(p);
      json dec = decomposition_to_json(sel.decomposition);
      if (format == "json") {
        json j{{"decomposition", dec}, {"trace", selection_trace_to_json(sel.trace)}};
        write_output(out.empty() ? "-" : out, j.dump(2) + "\n");
        return 0;
      }
      if (!out.empty()) {
        write_output(out, dec.dump(2) + "\n");
      } else {
        std::cout << dec.dump(2) << "\n";
      }
      std::ostream& os = out.empty() ? std::cerr : std::cout;
      for (const auto& [site, g] : sel.trace.initial)
        os << "site " << site << " -> " << g << "\n";
      for (const auto& m : sel.trace.merges) {
        os << (m.merged ? "merged " : "kept apart ") << m.site_a << " and " << m.site_b;
        if (m.shared_low.empty()) {
          os << " (no shared low vars)\n";
          continue;
        }
        os << " (shared";
        for (const auto& v : m.shared_low) os << " " << v;
        os << "; at " << m.dominator << ":";
        for (const auto& [v, s] : m.const_at_dom) os << " " << v << "=" << s;
        os << ")\n";
      }
      for (const auto& pl : sel.trace.placements) {
        os << "reset " << pl.group << " at " << pl.chosen;
        if (pl.fallback) os << " (fallback)";
        os << "\n";
      }
      for (const auto& w : sel.trace.warnings) os << "warning: " << w << "\n";
      return 0;
    }

    if (*cmd_transform) {
      if (!auto_dec && groups_file.empty())
        throw ConfigError("transform needs --auto or --groups FILE");
      if (auto_dec && !groups_file.empty())
        throw ConfigError("--auto and --groups are mutually exclusive");
      Program p = load_program(file);
      Decomposition dec = auto_dec ? select(p).decomposition : load_decomposition(groups_file);
      TransformResult tr = transform_program(p, dec);
      write_output(out, print_program(tr.program));
      if (!emit_dec.empty()) write_output(emit_dec, decomposition_to_json(dec).dump(2) + "\n");
      return 0;
    }

    if (*cmd_verify) {
      Program p = load_program(file);
      InputDomain dom = parse_input_spec(p, inputs_spec.empty() ? "0..2" : inputs_spec);
      HavocDomain hav = parse_havoc(havoc_spec.empty() ? "0..3" : havoc_spec);
      EnumLimits lim;
      lim.fuel = fuel;
      if (cap > 0) lim.state_cap = cap;
      if (at_loc.empty() != pred_text.empty())
        throw ConfigError("--at and --pred must be given together");
      Verdict v = at_loc.empty()
                      ? bounded_verify(p, dom, hav, lim)
                      : check_predicate_at(p, at_loc, parse_expr_string(pred_text), dom, hav, lim);
      return report_verdict(p, v, format);
    }

    if (*cmd_difftest) {
      if (!auto_dec && groups_file.empty())
        throw ConfigError("difftest needs --auto or --groups FILE");
      Program p = load_program(file);
      Decomposition dec = auto_dec ? select(p).decomposition : load_decomposition(groups_file);
      DifftestOptions opts;
      opts.trials = trials;
      opts.seed = seed;
      opts.fuel = fuel;
      opts.inputs = parse_input_spec(p, inputs_spec.empty() ? "0..3" : inputs_spec);
      opts.havoc = parse_havoc(havoc_spec.empty() ? "0..4" : havoc_spec);
      DifftestSummary s = difftest(p, dec, opts);
      if (format == "json") {
        std::cout << difftest_to_json(s).dump(2) << "\n";
      } else {
        std::cout << s.trials_run << " trials (" << s.trials_skipped << " skipped), "
                  << s.aligned_states << " aligned states\n"
                  << s.falsifications << " falsifications, " << s.stuck_originals
                  << " stuck originals\n";
        if (s.min_slack) std::cout << "min slack: " << *s.min_slack << "\n";
        for (const auto& n : s.notes) std::cout << "note: " << n << "\n";
      }
      return s.falsifications > 0 ? 1 : 0;
    }

    if (*cmd_analyze) {
      Program p = load_program(file);
      ConstOptions copts;
      copts.refine_assumes = refine;
      std::cout << analyses_to_json(dominator_tree(p), constant_analysis(p, {}, copts)).dump(2)
                << "\n";
      return 0;
    }

    if (*cmd_probe) {
      Program p = load_program(file);
      std::vector<std::string> low;
      for (const auto& part : split(low_spec, ','))
        if (!part.empty()) low.push_back(part);
      InputDomain dom = parse_input_spec(p, inputs_spec.empty() ? "0..3" : inputs_spec);
      HavocDomain hav = parse_havoc(havoc_spec.empty() ? "0..4" : havoc_spec);
      NiProbeReport r =
          noninterference_probe(p, group, reset_loc, low, trials, seed, dom, hav, fuel);
      if (format == "json") {
        std::cout << probe_to_json(r).dump(2) << "\n";
      } else {
        std::cout << r.trials_run << " trials, " << r.segments_observed << " segments in "
                  << r.buckets << " buckets\n"
                  << "max spread: " << r.max_spread << "\n";
        for (const auto& b : r.bucket_stats)
          std::cout << "  [" << b.key << "] segments=" << b.segments << " usage "
                    << b.min_usage << ".." << b.max_usage << "\n";
      }
      return 0;
    }
  } catch (const ParseError& e) {
    std::cerr << file << ":" << e.line << ":" << e.col << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
