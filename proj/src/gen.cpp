#include "brbo/gen.hpp"

#include "brbo/analyses.hpp"

#include <random>

namespace brbo {

namespace {

struct Builder {
  Program p;
  std::mt19937_64 rng;
  int next_loc = 0;
  int next_var = 0;
  std::string cur;

  explicit Builder(std::uint64_t seed) : rng(seed) { cur = fresh_loc(); }

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  bool chance(int percent) { return pick(1, 100) <= percent; }

  std::string fresh_loc() { return "q" + std::to_string(next_loc++); }
  std::string fresh_var(const char* base) { return base + std::to_string(next_var++); }

  void edge(const std::string& from, Cmd c, const std::string& to) {
    p.edges.push_back(Edge{from, std::move(c), to});
  }
  // one command on the spine: cur -> fresh location
  void cmd(Cmd c) {
    std::string nxt = fresh_loc();
    edge(cur, std::move(c), nxt);
    cur = nxt;
  }
};

// Sound running bound a*n + b*m + c*n*m + d for a resource's value; every
// block adds its worst case, so checks inserted after a block always pass.
struct BoundAcc {
  Int a = 0, b = 0, c = 0, d = 0;

  ExprPtr expr() const {
    ExprPtr e = int_lit(d);
    if (a != 0) e = add(mul(int_lit(a), var("n")), e);
    if (b != 0) e = add(mul(int_lit(b), var("m")), e);
    if (c != 0) e = add(mul(mul(int_lit(c), var("n")), var("m")), e);
    return e;
  }
};

// p := 0; while p < bv { l := *; assume(p < l && l <= bv); use r (l - p);
// p := l }. Total usage telescopes to at most bv.
void scan_loop(Builder& B, const std::string& r, const std::string& bv) {
  std::string pv = B.fresh_var("p");
  std::string lv = B.fresh_var("l");
  B.cmd(CAssign{pv, int_lit(0)});
  std::string head = B.cur;
  std::string body = B.fresh_loc();
  std::string after = B.fresh_loc();
  B.edge(head, CAssume{lt(var(pv), var(bv))}, body);
  B.edge(head, CAssume{ge(var(pv), var(bv))}, after);
  B.cur = body;
  B.cmd(CHavoc{lv});
  B.cmd(CAssume{land(lt(var(pv), var(lv)), le(var(lv), var(bv)))});
  B.cmd(CUse{r, sub(var(lv), var(pv))});
  B.edge(B.cur, CAssign{pv, var(lv)}, head);
  B.cur = after;
}

// k := 0; while k < bv { x := *; assume(0 <= x && x <= m); use r (x);
// <inner>; k := k + 1 }. Usage at most bv * (m + inner bound).
template <class Inner>
void tick_loop(Builder& B, const std::string& r, const std::string& bv, Inner inner) {
  std::string kv = B.fresh_var("k");
  std::string xv = B.fresh_var("x");
  B.cmd(CAssign{kv, int_lit(0)});
  std::string head = B.cur;
  std::string body = B.fresh_loc();
  std::string after = B.fresh_loc();
  B.edge(head, CAssume{lt(var(kv), var(bv))}, body);
  B.edge(head, CAssume{ge(var(kv), var(bv))}, after);
  B.cur = body;
  B.cmd(CHavoc{xv});
  B.cmd(CAssume{land(le(int_lit(0), var(xv)), le(var(xv), var("m")))});
  B.cmd(CUse{r, var(xv)});
  inner();
  B.edge(B.cur, CAssign{kv, add(var(kv), int_lit(1))}, head);
  B.cur = after;
}

} // namespace

Program random_loop_program(std::uint64_t seed, const GenOptions& opt) {
  Builder B(seed);
  B.p.name = "rand" + std::to_string(seed);
  B.p.inputs = {"n", "m"};
  B.p.pre = land(le(int_lit(0), var("n")), le(int_lit(0), var("m")));
  B.p.resources = {"r"};
  B.p.entry = B.cur;

  bool second = opt.allow_second_resource && B.chance(35);
  if (second) B.p.resources.push_back("s");

  BoundAcc r_bound, s_bound;
  int blocks = B.pick(1, std::max(1, opt.max_blocks));
  for (int i = 0; i < blocks && B.p.edges.size() < 30; ++i) {
    int kind = B.pick(0, 6);
    switch (kind) {
      case 0:
        scan_loop(B, "r", "n");
        r_bound.a += 1;
        break;
      case 1:
        scan_loop(B, "r", "m");
        r_bound.b += 1;
        break;
      case 2:
        tick_loop(B, "r", "n", [] {});
        r_bound.c += 1;
        break;
      case 3:
        if (opt.allow_nesting) {
          // scan over m inside each tick iteration: per iteration at most 2m
          tick_loop(B, "r", "n", [&] { scan_loop(B, "r", "m"); });
          r_bound.c += 2;
        } else {
          tick_loop(B, "r", "n", [] {});
          r_bound.c += 1;
        }
        break;
      case 4: {
        int c = B.pick(1, 3);
        B.cmd(CUse{"r", int_lit(c)});
        r_bound.d += c;
        break;
      }
      case 5:
        if (opt.allow_negative_use) {
          B.cmd(CUse{"r", int_lit(-1)});
          break;
        }
        [[fallthrough]];
      default:
        // direct input dependence keeps the slice machinery honest
        B.cmd(CUse{"r", var("n")});
        r_bound.a += 1;
        break;
    }
    if (opt.allow_checks && B.chance(25))
      B.cmd(CUbCheck{{"r"}, r_bound.expr()});
  }

  if (second) {
    tick_loop(B, "s", "n", [] {});
    s_bound.c += 1;
    if (opt.allow_checks && B.chance(50)) {
      BoundAcc joint{r_bound.a + s_bound.a, r_bound.b + s_bound.b, r_bound.c + s_bound.c,
                     r_bound.d + s_bound.d};
      B.cmd(CUbCheck{{"r", "s"}, joint.expr()});
    }
  }

  return std::move(B.p);
}

Program random_cfg(std::uint64_t seed, int max_nodes, bool ensure_reachable) {
  std::mt19937_64 rng(seed);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto loc = [](int i) { return "n" + std::to_string(i); };

  int k = pick(2, std::max(2, max_nodes));
  Program p;
  p.name = "cfg" + std::to_string(seed);
  p.pre = bool_lit(true);
  p.entry = loc(0);
  // n1 always hangs off the entry so the entry has an out-edge; later nodes
  // usually get a spanning edge, sometimes not (possibly unreachable)
  p.edges.push_back(Edge{loc(0), CSkip{}, loc(1)});
  for (int i = 2; i < k; ++i)
    if (ensure_reachable || pick(1, 100) <= 85)
      p.edges.push_back(Edge{loc(pick(0, i - 1)), CSkip{}, loc(i)});
  int extra = pick(0, 2 * k);
  for (int e = 0; e < extra; ++e)
    p.edges.push_back(Edge{loc(pick(0, k - 1)), CSkip{}, loc(pick(0, k - 1))});
  return p;
}

Decomposition random_decomposition(const Program& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };

  DomTree dt = dominator_tree(p);
  Decomposition d;
  for (const auto& r : p.resources) {
    auto sites = use_sites(p, r);
    if (sites.empty()) {
      d.groups[r].push_back(r + "_d1");
      continue;
    }
    std::vector<int> bucket(sites.size());
    for (auto& b : bucket) b = pick(0, static_cast<int>(sites.size()) - 1);
    std::map<int, std::string> names;
    for (std::size_t i = 0; i < sites.size(); ++i) {
      auto it = names.find(bucket[i]);
      if (it == names.end()) {
        std::string g = r + "_d" + std::to_string(names.size() + 1);
        d.groups[r].push_back(g);
        it = names.emplace(bucket[i], std::move(g)).first;
      }
      d.sites[edge_id(p, sites[i])] = it->second;
    }
    // any location dominating the group's deepest common dominator is a
    // valid placement; sample 0-2 of them
    for (const auto& g : d.groups[r]) {
      std::vector<std::string> srcs;
      for (std::size_t i = 0; i < sites.size(); ++i)
        if (d.sites[edge_id(p, sites[i])] == g) srcs.push_back(p.edges[sites[i]].src);
      if (srcs.empty()) continue;
      auto chain = dt.chain(dt.common_dominator(srcs));
      int mode = pick(0, 99);
      if (mode < 20) continue;
      int first = pick(0, static_cast<int>(chain.size()) - 1);
      d.resets[g].push_back(chain[first]);
      if (mode >= 85 && chain.size() > 1) {
        int other = pick(0, static_cast<int>(chain.size()) - 1);
        if (other != first) d.resets[g].push_back(chain[other]);
      }
    }
  }
  return d;
}

} // namespace brbo
