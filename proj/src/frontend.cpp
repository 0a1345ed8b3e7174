#include "brbo/frontend.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace brbo {

namespace {

enum class Tok {
  Ident,
  Number,
  UbBang, // "ub!"
  LbBang, // "lb!"
  Assign, // :=
  Arrow,  // ->
  Colon,
  Comma,
  LParen,
  RParen,
  Star,
  Plus,
  Minus,
  Lt,
  Le,
  Eq,
  Ne,
  Ge,
  Gt,
  AndAnd,
  OrOr,
  Bang,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '#'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '#';
}

struct Lexer {
  const std::string& src;
  std::size_t i = 0;
  int line = 1;
  int col = 1;

  explicit Lexer(const std::string& s) : src(s) {}

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, line, col); }

  void bump(std::size_t n = 1) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  }

  void skip_ws() {
    for (;;) {
      while (i < src.size() && std::isspace(static_cast<unsigned char>(src[i]))) bump();
      if (i + 1 < src.size() && src[i] == '/' && src[i + 1] == '/') {
        while (i < src.size() && src[i] != '\n') bump();
        continue;
      }
      break;
    }
  }

  Token next() {
    skip_ws();
    Token t{Tok::End, "", line, col};
    if (i >= src.size()) return t;
    char c = src[i];
    auto two = [&](char a, char b) { return c == a && i + 1 < src.size() && src[i + 1] == b; };
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      t.text = src.substr(i, j - i);
      bump(j - i);
      // "ub!" / "lb!" are check keywords, not identifiers.
      if ((t.text == "ub" || t.text == "lb") && i < src.size() && src[i] == '!') {
        t.kind = t.text == "ub" ? Tok::UbBang : Tok::LbBang;
        bump();
        return t;
      }
      t.kind = Tok::Ident;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::Number;
      t.text = src.substr(i, j - i);
      bump(j - i);
      return t;
    }
    if (two(':', '=')) { t.kind = Tok::Assign; bump(2); return t; }
    if (two('-', '>')) { t.kind = Tok::Arrow; bump(2); return t; }
    if (two('<', '=')) { t.kind = Tok::Le; bump(2); return t; }
    if (two('>', '=')) { t.kind = Tok::Ge; bump(2); return t; }
    if (two('!', '=')) { t.kind = Tok::Ne; bump(2); return t; }
    if (two('=', '=')) { t.kind = Tok::Eq; bump(2); return t; }
    if (two('&', '&')) { t.kind = Tok::AndAnd; bump(2); return t; }
    if (two('|', '|')) { t.kind = Tok::OrOr; bump(2); return t; }
    switch (c) {
      case ':': t.kind = Tok::Colon; break;
      case ',': t.kind = Tok::Comma; break;
      case '(': t.kind = Tok::LParen; break;
      case ')': t.kind = Tok::RParen; break;
      case '*': t.kind = Tok::Star; break;
      case '+': t.kind = Tok::Plus; break;
      case '-': t.kind = Tok::Minus; break;
      case '<': t.kind = Tok::Lt; break;
      case '>': t.kind = Tok::Gt; break;
      case '=': t.kind = Tok::Eq; break;
      case '!': t.kind = Tok::Bang; break;
      default: fail(std::string("unexpected character '") + c + "'");
    }
    bump();
    return t;
  }
};

struct Parser {
  Lexer lex;
  Token tok;

  explicit Parser(const std::string& s) : lex(s) { tok = lex.next(); }

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, tok.line, tok.col); }

  void advance() { tok = lex.next(); }

  bool at(Tok k) const { return tok.kind == k; }
  bool at_kw(const char* kw) const { return tok.kind == Tok::Ident && tok.text == kw; }

  Token expect(Tok k, const char* what) {
    if (!at(k)) fail(std::string("expected ") + what);
    Token t = tok;
    advance();
    return t;
  }

  void expect_kw(const char* kw) {
    if (!at_kw(kw)) fail(std::string("expected '") + kw + "'");
    advance();
  }

  static bool is_keyword(const std::string& s) {
    static const std::set<std::string> kws = {"program", "inputs",  "pre",   "resources",
                                              "entry",   "edge",    "skip",  "assume",
                                              "use",     "reset",   "min",   "max",
                                              "true",    "false"};
    return kws.count(s) != 0;
  }

  std::string ident() {
    if (!at(Tok::Ident)) fail("expected identifier");
    if (is_keyword(tok.text)) fail("'" + tok.text + "' is a keyword");
    std::string s = tok.text;
    advance();
    return s;
  }

  std::vector<std::string> ident_list() {
    std::vector<std::string> out;
    out.push_back(ident());
    while (at(Tok::Comma)) {
      advance();
      out.push_back(ident());
    }
    return out;
  }

  // Precedence, low to high: || ; && ; comparisons ; + - ; * ; unary.
  ExprPtr expr() { return expr_or(); }

  ExprPtr expr_or() {
    ExprPtr e = expr_and();
    while (at(Tok::OrOr)) {
      advance();
      e = lor(e, expr_and());
    }
    return e;
  }

  ExprPtr expr_and() {
    ExprPtr e = expr_cmp();
    while (at(Tok::AndAnd)) {
      advance();
      e = land(e, expr_cmp());
    }
    return e;
  }

  ExprPtr expr_cmp() {
    ExprPtr e = expr_add();
    switch (tok.kind) {
      case Tok::Lt: advance(); return lt(e, expr_add());
      case Tok::Le: advance(); return le(e, expr_add());
      case Tok::Eq: advance(); return eq(e, expr_add());
      case Tok::Ne: advance(); return ne(e, expr_add());
      case Tok::Ge: advance(); return ge(e, expr_add());
      case Tok::Gt: advance(); return gt(e, expr_add());
      default: return e;
    }
  }

  ExprPtr expr_add() {
    ExprPtr e = expr_mul();
    for (;;) {
      if (at(Tok::Plus)) {
        advance();
        e = add(e, expr_mul());
      } else if (at(Tok::Minus)) {
        advance();
        e = sub(e, expr_mul());
      } else {
        return e;
      }
    }
  }

  ExprPtr expr_mul() {
    ExprPtr e = expr_unary();
    while (at(Tok::Star)) {
      advance();
      e = mul(e, expr_unary());
    }
    return e;
  }

  ExprPtr expr_unary() {
    if (at(Tok::Bang)) {
      advance();
      return mk_not(expr_unary());
    }
    if (at(Tok::Minus)) {
      advance();
      ExprPtr e = expr_unary();
      if (e->kind == ExprKind::IntLit) return int_lit(-e->lit);
      return sub(int_lit(0), e);
    }
    return expr_atom();
  }

  ExprPtr expr_atom() {
    if (at(Tok::Number)) {
      Int n(tok.text);
      advance();
      return int_lit(n);
    }
    if (at(Tok::LParen)) {
      advance();
      ExprPtr e = expr();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (at_kw("true")) {
      advance();
      return bool_lit(true);
    }
    if (at_kw("false")) {
      advance();
      return bool_lit(false);
    }
    if (at_kw("min") || at_kw("max")) {
      bool is_min = tok.text == "min";
      advance();
      expect(Tok::LParen, "'('");
      ExprPtr a = expr();
      expect(Tok::Comma, "','");
      ExprPtr b = expr();
      expect(Tok::RParen, "')'");
      return is_min ? emin(a, b) : emax(a, b);
    }
    if (at(Tok::Ident)) return var(ident());
    fail("expected expression");
  }

  Cmd command() {
    if (at_kw("skip")) {
      advance();
      return CSkip{};
    }
    if (at_kw("assume")) {
      advance();
      expect(Tok::LParen, "'('");
      ExprPtr e = expr();
      expect(Tok::RParen, "')'");
      return CAssume{e};
    }
    if (at_kw("use")) {
      advance();
      std::string r = ident();
      expect(Tok::LParen, "'('");
      ExprPtr e = expr();
      expect(Tok::RParen, "')'");
      return CUse{r, e};
    }
    if (at_kw("reset")) {
      advance();
      return CReset{ident()};
    }
    if (at(Tok::UbBang)) {
      advance();
      expect(Tok::LParen, "'('");
      std::vector<std::string> rs = ident_list();
      expect(Tok::Le, "'<='");
      ExprPtr e = expr();
      expect(Tok::RParen, "')'");
      return CUbCheck{rs, e};
    }
    if (at(Tok::LbBang)) {
      advance();
      expect(Tok::LParen, "'('");
      // additive level: the top-level '<=' separates bound from resources
      ExprPtr e = expr_add();
      expect(Tok::Le, "'<='");
      std::vector<std::string> rs = ident_list();
      expect(Tok::RParen, "')'");
      return CLbCheck{e, rs};
    }
    // x := e  or  x := *
    std::string x = ident();
    expect(Tok::Assign, "':='");
    if (at(Tok::Star)) {
      advance();
      return CHavoc{x};
    }
    return CAssign{x, expr()};
  }

  Program program() {
    Program p;
    expect_kw("program");
    p.name = ident();
    if (at_kw("inputs")) {
      advance();
      p.inputs = ident_list();
    }
    if (at_kw("pre")) {
      advance();
      p.pre = expr();
    } else {
      p.pre = bool_lit(true);
    }
    if (at_kw("resources")) {
      advance();
      p.resources = ident_list();
    }
    expect_kw("entry");
    p.entry = ident();
    while (at_kw("edge")) {
      advance();
      Edge e;
      e.src = ident();
      expect(Tok::Arrow, "'->'");
      e.tgt = ident();
      expect(Tok::Colon, "':'");
      e.cmd = command();
      p.edges.push_back(std::move(e));
    }
    if (!at(Tok::End)) fail("unexpected trailing input");
    return p;
  }
};

int prec_of(ExprKind k) {
  switch (k) {
    case ExprKind::Or: return 1;
    case ExprKind::And: return 2;
    case ExprKind::Lt:
    case ExprKind::Le:
    case ExprKind::Eq:
    case ExprKind::Ne:
    case ExprKind::Ge:
    case ExprKind::Gt: return 3;
    case ExprKind::Add:
    case ExprKind::Sub: return 4;
    case ExprKind::Mul: return 5;
    case ExprKind::Not: return 6;
    default: return 7; // atoms
  }
}

const char* op_text(ExprKind k) {
  switch (k) {
    case ExprKind::Add: return " + ";
    case ExprKind::Sub: return " - ";
    case ExprKind::Mul: return " * ";
    case ExprKind::Lt: return " < ";
    case ExprKind::Le: return " <= ";
    case ExprKind::Eq: return " = ";
    case ExprKind::Ne: return " != ";
    case ExprKind::Ge: return " >= ";
    case ExprKind::Gt: return " > ";
    case ExprKind::And: return " && ";
    case ExprKind::Or: return " || ";
    default: return "?";
  }
}

// Left-associative chains print without parens; right operands at equal
// precedence get them (a - (b - c)). Comparisons are non-associative.
void print_rec(const ExprPtr& e, int parent_prec, bool right_side, std::ostream& os) {
  int prec = prec_of(e->kind);
  bool parens = prec < parent_prec || (prec == parent_prec && right_side && prec != 7);
  if (parens) os << "(";
  switch (e->kind) {
    case ExprKind::IntLit: os << e->lit.str(); break;
    case ExprKind::BoolLit: os << (e->blit ? "true" : "false"); break;
    case ExprKind::Var: os << e->name; break;
    case ExprKind::Min:
    case ExprKind::Max:
      os << (e->kind == ExprKind::Min ? "min(" : "max(");
      print_rec(e->a, 0, false, os);
      os << ", ";
      print_rec(e->b, 0, false, os);
      os << ")";
      break;
    case ExprKind::Not:
      os << "!";
      print_rec(e->a, prec, true, os);
      break;
    default:
      print_rec(e->a, prec, false, os);
      os << op_text(e->kind);
      print_rec(e->b, prec, true, os);
      break;
  }
  if (parens) os << ")";
}

} // namespace

Program parse_program(const std::string& text) {
  Parser p(text);
  return p.program();
}

Program parse_program_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_program(buf.str());
}

ExprPtr parse_expr_string(const std::string& text) {
  Parser p(text);
  ExprPtr e = p.expr();
  if (!p.at(Tok::End)) p.fail("unexpected trailing input after expression");
  return e;
}

std::string print_expr(const ExprPtr& e) {
  std::ostringstream os;
  print_rec(e ? e : bool_lit(true), 0, false, os);
  return os.str();
}

std::string print_cmd(const Cmd& c) {
  std::ostringstream os;
  std::visit(
      [&](const auto& cc) {
        using T = std::decay_t<decltype(cc)>;
        if constexpr (std::is_same_v<T, CSkip>) {
          os << "skip";
        } else if constexpr (std::is_same_v<T, CAssign>) {
          os << cc.var << " := " << print_expr(cc.rhs);
        } else if constexpr (std::is_same_v<T, CHavoc>) {
          os << cc.var << " := *";
        } else if constexpr (std::is_same_v<T, CAssume>) {
          os << "assume(" << print_expr(cc.cond) << ")";
        } else if constexpr (std::is_same_v<T, CUse>) {
          os << "use " << cc.res << " (" << print_expr(cc.amount) << ")";
        } else if constexpr (std::is_same_v<T, CUbCheck>) {
          os << "ub!(";
          for (std::size_t i = 0; i < cc.res.size(); ++i) os << (i ? ", " : "") << cc.res[i];
          os << " <= " << print_expr(cc.bound) << ")";
        } else if constexpr (std::is_same_v<T, CLbCheck>) {
          os << "lb!(" << print_expr(cc.bound) << " <= ";
          for (std::size_t i = 0; i < cc.res.size(); ++i) os << (i ? ", " : "") << cc.res[i];
          os << ")";
        } else {
          static_assert(std::is_same_v<T, CReset>);
          os << "reset " << cc.res;
        }
      },
      c);
  return os.str();
}

std::string print_program(const Program& p) {
  std::ostringstream os;
  os << "program " << p.name << "\n";
  if (!p.inputs.empty()) {
    os << "inputs ";
    for (std::size_t i = 0; i < p.inputs.size(); ++i) os << (i ? ", " : "") << p.inputs[i];
    os << "\n";
  }
  if (p.pre && !(p.pre->kind == ExprKind::BoolLit && p.pre->blit))
    os << "pre " << print_expr(p.pre) << "\n";
  if (!p.resources.empty()) {
    os << "resources ";
    for (std::size_t i = 0; i < p.resources.size(); ++i) os << (i ? ", " : "") << p.resources[i];
    os << "\n";
  }
  os << "entry " << p.entry << "\n";
  for (const auto& e : p.edges)
    os << "edge " << e.src << " -> " << e.tgt << " : " << print_cmd(e.cmd) << "\n";
  return os.str();
}

} // namespace brbo
