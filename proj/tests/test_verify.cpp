#include "brbo/select.hpp"
#include "brbo/verify.hpp"
#include "testutil.hpp"

#include <doctest.h>

using namespace brbo;
using namespace brbo::test;

namespace {

// k-bounded loop that uses one unit per iteration, then checks the total.
Program unit_loop(ExprPtr final_bound) {
  ProgBuilder b("loop");
  b.input("n").resource("r").pre(le(int_lit(0), var("n")));
  b.edge("L0", CAssign{"k", int_lit(0)}, "L1");
  b.edge("L1", CAssume{lt(var("k"), var("n"))}, "L2");
  b.edge("L1", CAssume{ge(var("k"), var("n"))}, "L4");
  b.edge("L2", CUse{"r", int_lit(1)}, "L3");
  b.edge("L3", CAssign{"k", add(var("k"), int_lit(1))}, "L1");
  b.edge("L4", CUbCheck{{"r"}, std::move(final_bound)}, "L5");
  return b.p;
}

InputDomain n_domain(Int lo, Int hi) {
  InputDomain dom;
  dom.ranges["n"] = {std::move(lo), std::move(hi)};
  return dom;
}

} // namespace

TEST_CASE("bounded verification explores all inputs satisfying the precondition") {
  Program p = unit_loop(var("n"));
  Verdict v = bounded_verify(p, n_domain(0, 3), {0, 0}, {});
  auto* nv = std::get_if<VerdictNoViolation>(&v);
  REQUIRE(nv);
  CHECK(nv->inputs_explored == 4);
  CHECK(nv->paths_explored > 4);
  CHECK(nv->fuel == 100);

  p.pre = le(int_lit(2), var("n"));
  v = bounded_verify(p, n_domain(0, 3), {0, 0}, {});
  nv = std::get_if<VerdictNoViolation>(&v);
  REQUIRE(nv);
  CHECK(nv->inputs_explored == 2);
}

TEST_CASE("a program without inputs explores the single empty vector") {
  Program p = straight_line({CSkip{}});
  Verdict v = bounded_verify(p, {}, {0, 0}, {});
  auto* nv = std::get_if<VerdictNoViolation>(&v);
  REQUIRE(nv);
  CHECK(nv->inputs_explored == 1);
}

TEST_CASE("violations report the earliest input with a replayable trace") {
  SUBCASE("an off-by-one bound fails already at n = 0") {
    Program p = unit_loop(sub(var("n"), int_lit(1)));
    Verdict verdict = bounded_verify(p, n_domain(0, 3), {0, 0}, {});
    auto* v = std::get_if<VerdictViolation>(&verdict);
    REQUIRE(v);
    CHECK(v->kind == "ub");
    CHECK(v->inputs.at("n") == 0);
    CHECK(v->edge_id == "L4>L5#0");
    CHECK(v->bound == -1);
    CHECK(v->actual == 0);
    CHECK(v->res == std::vector<std::string>{"r"});

    // counterexample validity: the prefix replays and the failing edge
    // reproduces the violation on its final store
    CHECK(path_ok(v->path));
    auto idx = edge_by_id(p, v->edge_id);
    REQUIRE(idx.has_value());
    NondetTape t;
    auto out = eval_cmd(v->path.last().store, p.edges[*idx].cmd, t);
    auto* ub = std::get_if<ViolatedUb>(&out);
    REQUIRE(ub);
    CHECK(ub->actual == v->actual);
  }
  SUBCASE("the first violating input wins, not the first found overall") {
    ProgBuilder b;
    b.input("n").resource("r").pre(le(int_lit(0), var("n")));
    b.then(CUse{"r", var("n")});
    b.then(CUbCheck{{"r"}, int_lit(0)});
    Verdict verdict = bounded_verify(b.p, n_domain(0, 3), {0, 0}, {});
    auto* v = std::get_if<VerdictViolation>(&verdict);
    REQUIRE(v);
    CHECK(v->inputs.at("n") == 1);
  }
  SUBCASE("lower-bound violations carry the mirrored kind") {
    Program p = straight_line({CUse{"r", int_lit(1)}, CLbCheck{int_lit(2), {"r"}}});
    Verdict verdict = bounded_verify(p, {}, {0, 0}, {});
    auto* v = std::get_if<VerdictViolation>(&verdict);
    REQUIRE(v);
    CHECK(v->kind == "lb");
    CHECK(v->bound == 2);
    CHECK(v->actual == 1);
  }
}

TEST_CASE("the state cap turns into a resource-limit verdict") {
  ProgBuilder b;
  b.edge("L0", CSkip{}, "L0");
  EnumLimits lim;
  lim.state_cap = 5;
  Verdict v = bounded_verify(b.p, {}, {0, 0}, lim);
  auto* rl = std::get_if<VerdictResourceLimit>(&v);
  REQUIRE(rl);
  CHECK(rl->limit == "state_cap");
}

TEST_CASE("corpus programs verify clean in small domains") {
  CHECK(std::holds_alternative<VerdictNoViolation>(
      bounded_verify(corpus("scan_pair"), n_domain(0, 3), {0, 4}, {})));
  CHECK(std::holds_alternative<VerdictNoViolation>(
      bounded_verify(corpus("neg_use"), n_domain(0, 3), {0, 0}, {})));
  CHECK(std::holds_alternative<VerdictNoViolation>(
      bounded_verify(corpus("pair"), n_domain(0, 3), {0, 0}, {})));
  InputDomain nm = InputDomain::uniform(corpus("nested_ticks"), 0, 2);
  EnumLimits lim;
  lim.fuel = 200;
  CHECK(std::holds_alternative<VerdictNoViolation>(
      bounded_verify(corpus("nested_ticks"), nm, {0, 2}, lim)));
}

TEST_CASE("per-iteration resets can make a sound bound unprovable") {
  // neg_use nets one unit per iteration only across the refund; resetting
  // both groups inside the body forgets the refund, so the transformed
  // checks overshoot while conformance (original <= summary sum) still
  // holds -- exactly the gap the differential harness tolerates.
  Program p = corpus("neg_use");
  Decomposition d = select(p).decomposition;
  TransformResult tr = transform_program(p, d);
  Verdict verdict = bounded_verify(tr.program, n_domain(0, 3), {0, 0}, {});
  auto* v = std::get_if<VerdictViolation>(&verdict);
  REQUIRE(v);
  CHECK(v->kind == "ub");
  // n <= 1 still passes: one reset each leaves cnt = 0, so the summaries
  // collapse to plain values. From n = 2 on, cnt*ub of the pay group
  // overshoots because the refunds live in the other group.
  CHECK(v->inputs.at("n") == 2);
  CHECK(v->edge_id == "N6>N7#0");
  CHECK(v->bound == 2);
  CHECK(v->actual == 3);

  DifftestOptions opts;
  opts.trials = 80;
  opts.seed = 3;
  opts.inputs = InputDomain::uniform(p, 0, 3);
  opts.fuel = 80;
  DifftestSummary s = difftest(p, d, opts);
  CHECK(s.falsifications == 0);
}

TEST_CASE("max_resource takes the prefix maximum") {
  Program p = straight_line({CUse{"r", int_lit(3)}, CUse{"r", int_lit(-1)}});
  MaxResult m = max_resource(p, "r", {}, {0, 0}, {});
  CHECK(m.value == 3); // the later refund does not lower the peak
  CHECK_FALSE(m.capped);

  CHECK_THROWS_AS(max_resource(p, "zz", {}, {0, 0}, {}), ConfigError);
}

TEST_CASE("max_resource agrees with the bound formula on small instances") {
  Program p = corpus("fig2a");
  EnumLimits lim;
  lim.fuel = 400;

  MaxResult zero = max_resource(p, "#sb", fig2a_inputs(0, 2, 2, 1, 1), {0, 3}, lim);
  CHECK(zero.value == 0); // the outer loop never runs

  // B = #ts*(#text + #tags*ts#rep + #sep) = 1*(1 + 1 + 1)
  MaxResult unit = max_resource(p, "#sb", fig2a_inputs(1, 1, 1, 1, 1), {0, 3}, lim);
  CHECK(unit.value == 3);
}

TEST_CASE("predicates are checked at every enumerated state of a location") {
  SUBCASE("plain variable predicates") {
    Program p = straight_line({CAssign{"x", int_lit(5)}, CSkip{}});
    CHECK(std::holds_alternative<VerdictNoViolation>(
        check_predicate_at(p, "L1", parse_expr_string("x = 5"), {}, {0, 0}, {})));
    Verdict verdict = check_predicate_at(p, "L1", parse_expr_string("x = 4"), {}, {0, 0}, {});
    auto* v = std::get_if<VerdictViolation>(&verdict);
    REQUIRE(v);
    CHECK(v->kind == "predicate");
    CHECK(v->edge_id.empty());
    CHECK(v->path.last().loc == "L1");
  }
  SUBCASE("summary cells are addressable as ub/cnt/lb-prefixed names") {
    Program p = straight_line({CUse{"r", int_lit(3)}, CReset{"r"}, CUse{"r", int_lit(1)}});
    auto ok = [&](const std::string& loc, const std::string& pred) {
      return std::holds_alternative<VerdictNoViolation>(
          check_predicate_at(p, loc, parse_expr_string(pred), {}, {0, 0}, {}));
    };
    CHECK(ok("L1", "r = 3 && cntr = -1 && ubr = 0 && lbr = 0"));
    CHECK(ok("L2", "r = 0 && cntr = 0 && ubr = 3 && lbr = 0"));
    CHECK(ok("L3", "r = 1 && cntr = 0 && ubr = 3"));
    CHECK_FALSE(ok("L3", "ubr = 1"));
  }
  SUBCASE("configuration errors") {
    Program p = straight_line({CSkip{}});
    CHECK_THROWS_AS(check_predicate_at(p, "Q9", parse_expr_string("true"), {}, {0, 0}, {}),
                    ConfigError);
    CHECK_THROWS_AS(check_predicate_at(p, "L1", parse_expr_string("1 + 1"), {}, {0, 0}, {}),
                    ConfigError);
  }
}

TEST_CASE("the running example's loop invariant holds in the original program") {
  Program p = corpus("fig2a");
  ExprPtr inv = parse_expr_string(
      "#sb <= i * #text + p + (i * #tags + j) * ts#rep + i * #sep");
  EnumLimits lim;
  lim.fuel = 300;
  InputDomain dom = InputDomain::uniform(p, 0, 1);
  CHECK(std::holds_alternative<VerdictNoViolation>(
      check_predicate_at(p, "L5", inv, dom, {0, 2}, lim)));
}

TEST_CASE("segment probes quantify per-segment usage spread") {
  auto probe_loop = [](Cmd extra, Cmd use) {
    ProgBuilder b("probe");
    b.input("n").resource("r").pre(le(int_lit(0), var("n")));
    b.p.entry = "P0";
    b.edge("P0", CAssign{"k", int_lit(0)}, "P1");
    b.edge("P1", CAssign{"ph", int_lit(0)}, "P2");
    b.edge("P2", CAssume{lt(var("k"), var("n"))}, "P3");
    b.edge("P2", CAssume{ge(var("k"), var("n"))}, "P9");
    b.edge("P3", CReset{"r"}, "P4");
    b.edge("P4", std::move(extra), "P5");
    b.edge("P5", std::move(use), "P6");
    b.edge("P6", CAssign{"ph", sub(int_lit(1), var("ph"))}, "P7");
    b.edge("P7", CAssign{"k", add(var("k"), int_lit(1))}, "P2");
    b.edge("P9", CSkip{}, "P10");
    return b.p;
  };
  InputDomain dom = n_domain(0, 3);

  SUBCASE("constant segments have zero spread") {
    Program p = probe_loop(CSkip{}, CUse{"r", int_lit(5)});
    NiProbeReport rep = noninterference_probe(p, "r", "P4", {}, 80, 1, dom, {0, 4}, 100);
    CHECK(rep.trials_run == 80);
    CHECK(rep.segments_observed > 0);
    CHECK(rep.max_spread == 0);
    for (const auto& b : rep.bucket_stats) CHECK(b.min_usage == b.max_usage);
  }
  SUBCASE("a havocked amount shows up as spread") {
    Program p = probe_loop(CHavoc{"h"}, CUse{"r", var("h")});
    NiProbeReport rep = noninterference_probe(p, "r", "P4", {}, 200, 1, dom, {0, 4}, 100);
    CHECK(rep.max_spread > 0);
    CHECK(rep.max_spread <= 4); // bounded by the havoc domain width
  }
  SUBCASE("declaring the discriminating variable low splits the buckets") {
    Program p = probe_loop(CSkip{}, CUse{"r", mul(var("ph"), int_lit(3))});
    NiProbeReport coarse = noninterference_probe(p, "r", "P4", {}, 120, 1, dom, {0, 4}, 100);
    CHECK(coarse.max_spread == 3); // phases 0 and 3 fall into one bucket
    NiProbeReport fine =
        noninterference_probe(p, "r", "P4", {"ph"}, 120, 1, dom, {0, 4}, 100);
    CHECK(fine.max_spread == 0);
    CHECK(fine.buckets > coarse.buckets);
  }
  SUBCASE("no matching reset means nothing to segment") {
    Program p = corpus("fig2a");
    NiProbeReport rep = noninterference_probe(p, "#sb", "L4", {}, 20, 1,
                                              InputDomain::uniform(p, 0, 2), {0, 3}, 100);
    CHECK(rep.trials_run == 0);
    CHECK(rep.segments_observed == 0);
    CHECK(rep.max_spread == 0);
  }
  SUBCASE("the transformed example yields segments; spread is reported, not judged") {
    Program p = corpus("fig2b");
    NiProbeReport rep = noninterference_probe(p, "#sb_1", "L3", {"p"}, 120, 4,
                                              InputDomain::uniform(p, 0, 2), {0, 3}, 200);
    CHECK(rep.trials_run == 120);
    CHECK(rep.segments_observed > 0);
    CHECK(rep.max_spread >= 0);
  }
}
