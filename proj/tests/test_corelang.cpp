#include "testutil.hpp"

#include <doctest.h>

#include <algorithm>

using namespace brbo;
using namespace brbo::test;

namespace {

bool has_diag(const std::vector<Diagnostic>& ds, const std::string& needle) {
  return std::any_of(ds.begin(), ds.end(), [&](const Diagnostic& d) {
    return d.message.find(needle) != std::string::npos;
  });
}

} // namespace

TEST_CASE("expression helpers and free variables") {
  ExprPtr e = add(var("a"), mul(int_lit(2), var("b")));
  CHECK(free_vars(e) == std::set<std::string>{"a", "b"});
  CHECK(free_vars(int_lit(7)).empty());
  CHECK(free_vars(mk_not(lt(var("x"), int_lit(0)))) == std::set<std::string>{"x"});

  CHECK(expr_eq(e, add(var("a"), mul(int_lit(2), var("b")))));
  CHECK_FALSE(expr_eq(e, add(var("a"), mul(int_lit(3), var("b")))));
  CHECK_FALSE(expr_eq(e, sub(var("a"), mul(int_lit(2), var("b")))));
  CHECK(expr_eq(nullptr, nullptr));
  CHECK_FALSE(expr_eq(e, nullptr));
}

TEST_CASE("command equality and metadata") {
  Cmd a1 = CAssign{"x", int_lit(1)};
  CHECK(cmd_eq(a1, CAssign{"x", int_lit(1)}));
  CHECK_FALSE(cmd_eq(a1, CAssign{"x", int_lit(2)}));
  CHECK_FALSE(cmd_eq(a1, CAssign{"y", int_lit(1)}));
  CHECK(cmd_eq(CSkip{}, CSkip{}));
  CHECK_FALSE(cmd_eq(CSkip{}, a1));
  CHECK(cmd_eq(CUse{"r", var("n")}, CUse{"r", var("n")}));
  CHECK_FALSE(cmd_eq(CUse{"r", var("n")}, CUse{"s", var("n")}));
  CHECK(cmd_eq(CUbCheck{{"r", "s"}, int_lit(3)}, CUbCheck{{"r", "s"}, int_lit(3)}));
  CHECK_FALSE(cmd_eq(CUbCheck{{"r", "s"}, int_lit(3)}, CUbCheck{{"s", "r"}, int_lit(3)}));

  CHECK(assigned_var(a1) == "x");
  CHECK(assigned_var(CHavoc{"h"}) == "h");
  CHECK_FALSE(assigned_var(CSkip{}).has_value());
  CHECK_FALSE(assigned_var(CAssume{bool_lit(true)}).has_value());
  CHECK_FALSE(assigned_var(CUse{"r", var("n")}).has_value());

  CHECK(cmd_free_vars(CUse{"r", sub(var("l"), var("p"))}) == std::set<std::string>{"l", "p"});
  CHECK(cmd_free_vars(CAssign{"x", add(var("x"), int_lit(1))}) == std::set<std::string>{"x"});
  // resource names in checks are not expression variables
  CHECK(cmd_free_vars(CUbCheck{{"r"}, var("n")}) == std::set<std::string>{"n"});
  CHECK(cmd_free_vars(CReset{"r"}).empty());
}

TEST_CASE("edge ids count parallel edges in list order") {
  ProgBuilder b;
  b.resource("r");
  b.edge("L0", CSkip{}, "L1");
  b.edge("L0", CAssign{"x", int_lit(1)}, "L1");
  b.edge("L0", CSkip{}, "L2");
  b.edge("L0", CSkip{}, "L1");
  const Program& p = b.p;

  CHECK(edge_id(p, 0) == "L0>L1#0");
  CHECK(edge_id(p, 1) == "L0>L1#1");
  CHECK(edge_id(p, 2) == "L0>L2#0");
  CHECK(edge_id(p, 3) == "L0>L1#2");

  for (std::size_t i = 0; i < p.edges.size(); ++i)
    CHECK(edge_by_id(p, edge_id(p, i)) == i);
  CHECK_FALSE(edge_by_id(p, "L0>L1#3").has_value());
  CHECK_FALSE(edge_by_id(p, "nonsense").has_value());
}

TEST_CASE("use sites are reported per resource in edge order") {
  ProgBuilder b;
  b.resource("r").resource("s");
  b.then(CUse{"r", int_lit(1)});
  b.then(CUse{"s", int_lit(2)});
  b.then(CSkip{});
  b.then(CUse{"r", int_lit(3)});
  CHECK(use_sites(b.p, "r") == std::vector<std::size_t>{0, 3});
  CHECK(use_sites(b.p, "s") == std::vector<std::size_t>{1});
  CHECK(use_sites(b.p, "t").empty());
}

TEST_CASE("internal variables require a proper assignment") {
  ProgBuilder b;
  b.input("n").resource("r");
  b.then(CAssign{"x", int_lit(5)});
  b.then(CHavoc{"y"});
  b.then(CHavoc{"z"});
  b.then(CAssign{"z", int_lit(1)});
  auto internal = internal_vars(b.p);
  CHECK(internal.count("x") == 1);
  CHECK(internal.count("z") == 1);
  // havoc-only variables model unknown data and stay high
  CHECK(internal.count("y") == 0);
  CHECK(internal.count("n") == 0);
}

TEST_CASE("locations include the entry and all edge endpoints") {
  Program p;
  p.name = "empty";
  p.pre = bool_lit(true);
  p.entry = "E";
  CHECK(p.locations() == std::set<std::string>{"E"});

  ProgBuilder b;
  b.edge("L0", CSkip{}, "L1");
  b.edge("X", CSkip{}, "Y");
  CHECK(b.p.locations() == std::set<std::string>{"L0", "L1", "X", "Y"});
}

TEST_CASE("validation rejects malformed declarations") {
  SUBCASE("duplicate input") {
    ProgBuilder b;
    b.input("n").input("n");
    CHECK(has_diag(validate_program(b.p), "duplicate input 'n'"));
  }
  SUBCASE("duplicate resource") {
    ProgBuilder b;
    b.resource("r").resource("r");
    CHECK(has_diag(validate_program(b.p), "duplicate resource 'r'"));
  }
  SUBCASE("name is both input and resource") {
    ProgBuilder b;
    b.input("r").resource("r");
    CHECK(has_diag(validate_program(b.p), "declared both input and resource"));
  }
  SUBCASE("entry must start some edge") {
    ProgBuilder b;
    b.edge("A", CSkip{}, "B");
    b.p.entry = "C";
    CHECK(has_diag(validate_program(b.p), "not the source of any edge"));
  }
  SUBCASE("precondition reads only inputs") {
    ProgBuilder b;
    b.input("n").pre(le(var("x"), var("n")));
    CHECK(has_diag(validate_program(b.p), "reads non-input variable 'x'"));
  }
  SUBCASE("precondition must be boolean") {
    ProgBuilder b;
    b.input("n").pre(add(var("n"), int_lit(1)));
    CHECK_FALSE(validate_program(b.p).empty());
  }
}

TEST_CASE("validation rejects resource misuse in commands") {
  SUBCASE("assignment to a resource") {
    ProgBuilder b;
    b.resource("r").then(CAssign{"r", int_lit(0)});
    CHECK(has_diag(validate_program(b.p), "assignment to resource 'r'"));
  }
  SUBCASE("havoc of a resource") {
    ProgBuilder b;
    b.resource("r").then(CHavoc{"r"});
    CHECK(has_diag(validate_program(b.p), "havoc of resource 'r'"));
  }
  SUBCASE("expressions cannot read resources") {
    ProgBuilder b;
    b.resource("r").then(CAssign{"x", var("r")});
    CHECK(has_diag(validate_program(b.p), "expression reads resource 'r'"));
  }
  SUBCASE("use of an undeclared resource") {
    ProgBuilder b;
    b.resource("r").then(CUse{"s", int_lit(1)});
    CHECK(has_diag(validate_program(b.p), "use of undeclared resource 's'"));
  }
  SUBCASE("checks name declared resources, non-empty and without repeats") {
    ProgBuilder b;
    b.resource("r");
    b.then(CUbCheck{{"s"}, int_lit(1)});
    b.then(CUbCheck{{}, int_lit(1)});
    b.then(CUbCheck{{"r", "r"}, int_lit(1)});
    b.then(CLbCheck{int_lit(0), {"s"}});
    auto ds = validate_program(b.p);
    CHECK(has_diag(ds, "ub! names undeclared resource 's'"));
    CHECK(has_diag(ds, "empty resource set in ub!"));
    CHECK(has_diag(ds, "ub! repeats resource 'r'"));
    CHECK(has_diag(ds, "lb! names undeclared resource 's'"));
  }
  SUBCASE("sort errors in command expressions") {
    ProgBuilder b;
    b.resource("r");
    b.then(CAssume{int_lit(1)});                       // int where bool expected
    b.then(CAssign{"x", bool_lit(true)});              // bool where int expected
    b.then(CUse{"r", lt(int_lit(0), int_lit(1))});     // bool amount
    b.then(CAssign{"y", add(var("a"), bool_lit(true))}); // bool inside arithmetic
    CHECK(validate_program(b.p).size() >= 4);
  }
  SUBCASE("a well-formed program has no diagnostics") {
    CHECK(validate_program(corpus("fig2a")).empty());
    CHECK(validate_program(corpus("fig2b")).empty());
  }
}

TEST_CASE("initial store binds exactly the inputs and fresh resource cells") {
  ProgBuilder b;
  b.input("n").input("m").resource("r");
  Store s = initial_store(b.p, {{"n", 3}, {"m", 0}});
  CHECK(s.vars.size() == 2);
  CHECK(std::get<Int>(s.vars.at("n")) == 3);
  CHECK(s.res.size() == 1);
  CHECK(s.res.at("r") == ResourceCells{0, 0, -1, 0});

  CHECK_THROWS_AS(initial_store(b.p, {{"n", 3}}), ConfigError);
  CHECK_THROWS_AS(initial_store(b.p, {{"n", 3}, {"m", 0}, {"q", 1}}), ConfigError);
}

TEST_CASE("program equality is structural") {
  Program a = corpus("fig2a");
  Program b = corpus("fig2a");
  CHECK(program_eq(a, b));
  b.edges[5].cmd = CSkip{};
  CHECK_FALSE(program_eq(a, b));
  b = corpus("fig2a");
  b.entry = "L1";
  CHECK_FALSE(program_eq(a, b));
  b = corpus("fig2a");
  std::swap(b.edges[0], b.edges[1]);
  CHECK_FALSE(program_eq(a, b)); // edge order is part of program identity
}

TEST_CASE("value printing") {
  CHECK(to_string(Value{Int(-7)}) == "-7");
  CHECK(to_string(Value{true}) == "true");
}
