// Property parser: SVA-flavored surface syntax over the LTL core.
//
// Surface sugar desugars on the way in:
//   a |-> b        Implies(a, b), wrapped in Always when it is the root
//   a |=> b        Implies(a, Next b), ditto
//   ##1 f          Next f
//   always/G, s_eventually/F, X, U
//   $past(x), $stable(x)
//   t1 <op> t2     comparison atom with a canonical name ("x == $past(x) - 1");
//                  x == $past(x) and x != $past(x) map to stable / not stable
//
// Comments: `//` and `--` to end of line.
#pragma once

#include <cctype>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vaprop/formula.hpp"

namespace vaprop {

struct ParseError : std::runtime_error {
  int line;
  int col;
  ParseError(int line_, int col_, const std::string& what_)
      : std::runtime_error("line " + std::to_string(line_) + ":" +
                           std::to_string(col_) + ": " + what_),
        line(line_),
        col(col_) {}
};

// ---------------------------------------------------------------------------
// Integer terms inside comparison atoms and FSM update rules.

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind : std::uint8_t { Num, Var, Past, Add, Sub, Mul, Neg };
  Kind kind;
  long long num = 0;     // Num
  std::string var;       // Var, Past
  TermPtr lhs, rhs;      // binary; Neg uses lhs
};

inline TermPtr term_num(long long v) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Num;
  t->num = v;
  return t;
}
inline TermPtr term_var(std::string name) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Var;
  t->var = std::move(name);
  return t;
}
inline TermPtr term_past(std::string name) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Past;
  t->var = std::move(name);
  return t;
}
inline TermPtr term_bin(Term::Kind k, TermPtr a, TermPtr b) {
  auto t = std::make_shared<Term>();
  t->kind = k;
  t->lhs = std::move(a);
  t->rhs = std::move(b);
  return t;
}
inline TermPtr term_neg(TermPtr a) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Neg;
  t->lhs = std::move(a);
  return t;
}

enum class CmpOp : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge };

inline const char* cmp_op_text(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "?";
}

// Canonical term text. Parser-produced terms render back to input shape:
// + and - associate left, * binds tighter, parens only where required.
inline std::string render_term(const TermPtr& t) {
  auto bin = [&](const char* op, bool paren_rhs_same) {
    std::string l = render_term(t->lhs);
    std::string r = render_term(t->rhs);
    bool rp = false;
    if (t->rhs->kind == Term::Kind::Add || t->rhs->kind == Term::Kind::Sub)
      rp = paren_rhs_same || t->kind == Term::Kind::Mul;
    bool lp = t->kind == Term::Kind::Mul &&
              (t->lhs->kind == Term::Kind::Add || t->lhs->kind == Term::Kind::Sub);
    if (lp) l = "(" + l + ")";
    if (rp) r = "(" + r + ")";
    return l + " " + op + " " + r;
  };
  switch (t->kind) {
    case Term::Kind::Num: return std::to_string(t->num);
    case Term::Kind::Var: return t->var;
    case Term::Kind::Past: return "$past(" + t->var + ")";
    case Term::Kind::Add: return bin("+", false);
    case Term::Kind::Sub: return bin("-", true);
    case Term::Kind::Mul: return bin("*", false);
    case Term::Kind::Neg: return "-" + render_term(t->lhs);
  }
  return "?";
}

// Decoded meaning of one atom name; the model kernel evaluates these.
struct AtomSemantics {
  enum class Kind : std::uint8_t { Var, PastVar, StableVar, Compare };
  Kind kind = Kind::Var;
  std::string var;           // Var, PastVar, StableVar
  TermPtr lhs, rhs;          // Compare
  CmpOp op = CmpOp::Eq;      // Compare
};

// ---------------------------------------------------------------------------
// Lexer

namespace detail {

enum class Tok : std::uint8_t {
  Ident, Number, LParen, RParen, Semi, At, Comma,
  Bang, AndAnd, OrOr, Arrow, OverlapImpl, NonOverlapImpl, Delay1,
  Plus, Minus, Star,
  EqEq, NotEq, Lt, Le, Gt, Ge,
  KwProperty, KwEndproperty, KwAssert, KwDisable, KwIff,
  KwPosedge, KwNegedge, KwTrue, KwFalse,
  KwU, KwX, KwG, KwF, KwAlways, KwSEventually,
  Past, Stable,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  long long num = 0;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(line_, col_, msg);
  }

  void skip_space() {
    for (;;) {
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
        bump();
      if (pos_ + 1 < src_.size() &&
          ((src_[pos_] == '/' && src_[pos_ + 1] == '/') ||
           (src_[pos_] == '-' && src_[pos_ + 1] == '-'))) {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
        continue;
      }
      break;
    }
  }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  bool eat(char c) {
    if (pos_ < src_.size() && src_[pos_] == c) {
      bump();
      return true;
    }
    return false;
  }

  void advance() {
    skip_space();
    tok_.line = line_;
    tok_.col = col_;
    tok_.text.clear();
    tok_.num = 0;
    if (pos_ >= src_.size()) {
      tok_.kind = Tok::End;
      tok_.text = "<end of input>";
      return;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string id;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        id += src_[pos_];
        bump();
      }
      // bit select sticks to the identifier: data[3]
      if (pos_ < src_.size() && src_[pos_] == '[') {
        std::size_t save = pos_;
        int sline = line_, scol = col_;
        bump();
        std::string idx;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          idx += src_[pos_];
          bump();
        }
        if (!idx.empty() && pos_ < src_.size() && src_[pos_] == ']') {
          bump();
          id += "[" + idx + "]";
        } else {
          pos_ = save;
          line_ = sline;
          col_ = scol;
        }
      }
      tok_.text = id;
      tok_.kind = keyword(id);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string n;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        n += src_[pos_];
        bump();
      }
      tok_.kind = Tok::Number;
      tok_.text = n;
      tok_.num = std::stoll(n);
      return;
    }
    if (c == '$') {
      bump();
      std::string id;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        id += src_[pos_];
        bump();
      }
      if (id == "past") {
        tok_.kind = Tok::Past;
        tok_.text = "$past";
        return;
      }
      if (id == "stable") {
        tok_.kind = Tok::Stable;
        tok_.text = "$stable";
        return;
      }
      fail("unknown system function '$" + id + "'");
    }
    bump();
    switch (c) {
      case '(': tok_.kind = Tok::LParen; tok_.text = "("; return;
      case ')': tok_.kind = Tok::RParen; tok_.text = ")"; return;
      case ';': tok_.kind = Tok::Semi; tok_.text = ";"; return;
      case '@': tok_.kind = Tok::At; tok_.text = "@"; return;
      case ',': tok_.kind = Tok::Comma; tok_.text = ","; return;
      case '+': tok_.kind = Tok::Plus; tok_.text = "+"; return;
      case '*': tok_.kind = Tok::Star; tok_.text = "*"; return;
      case '-':
        if (eat('>')) {
          tok_.kind = Tok::Arrow;
          tok_.text = "->";
        } else {
          tok_.kind = Tok::Minus;
          tok_.text = "-";
        }
        return;
      case '!':
        if (eat('=')) {
          eat('=');  // !== treated as !=
          tok_.kind = Tok::NotEq;
          tok_.text = "!=";
        } else {
          tok_.kind = Tok::Bang;
          tok_.text = "!";
        }
        return;
      case '=':
        if (eat('=')) {
          eat('=');  // === treated as ==
          tok_.kind = Tok::EqEq;
          tok_.text = "==";
          return;
        }
        fail("unexpected '='; use '==' for comparison");
      case '<':
        tok_.kind = eat('=') ? Tok::Le : Tok::Lt;
        tok_.text = tok_.kind == Tok::Le ? "<=" : "<";
        return;
      case '>':
        tok_.kind = eat('=') ? Tok::Ge : Tok::Gt;
        tok_.text = tok_.kind == Tok::Ge ? ">=" : ">";
        return;
      case '&':
        if (eat('&')) {
          tok_.kind = Tok::AndAnd;
          tok_.text = "&&";
          return;
        }
        fail("unexpected '&'; use '&&'");
      case '|':
        if (eat('|')) {
          tok_.kind = Tok::OrOr;
          tok_.text = "||";
          return;
        }
        if (eat('-')) {
          if (eat('>')) {
            tok_.kind = Tok::OverlapImpl;
            tok_.text = "|->";
            return;
          }
          fail("unexpected '|-'; expected '|->'");
        }
        if (eat('=')) {
          if (eat('>')) {
            tok_.kind = Tok::NonOverlapImpl;
            tok_.text = "|=>";
            return;
          }
          fail("unexpected '|='; expected '|=>'");
        }
        fail("unexpected '|'");
      case '#':
        if (eat('#')) {
          if (pos_ < src_.size() && src_[pos_] == '1') {
            bump();
            tok_.kind = Tok::Delay1;
            tok_.text = "##1";
            return;
          }
          fail("only ##1 delay is supported");
        }
        fail("unexpected '#'");
      default:
        fail(std::string("unexpected character '") + c + "'");
    }
  }

  static Tok keyword(const std::string& id) {
    if (id == "property") return Tok::KwProperty;
    if (id == "endproperty") return Tok::KwEndproperty;
    if (id == "assert") return Tok::KwAssert;
    if (id == "disable") return Tok::KwDisable;
    if (id == "iff") return Tok::KwIff;
    if (id == "posedge") return Tok::KwPosedge;
    if (id == "negedge") return Tok::KwNegedge;
    if (id == "true") return Tok::KwTrue;
    if (id == "false") return Tok::KwFalse;
    if (id == "U") return Tok::KwU;
    if (id == "X") return Tok::KwX;
    if (id == "G") return Tok::KwG;
    if (id == "F") return Tok::KwF;
    if (id == "always") return Tok::KwAlways;
    if (id == "s_eventually") return Tok::KwSEventually;
    return Tok::Ident;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token tok_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Parser

struct ParsedProperty {
  std::string name;        // empty for a bare expression
  std::string clock;       // empty when no clocking event was given
  bool negedge = false;
  FormulaPtr disable;      // null when no disable iff clause
  FormulaPtr body;
};

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view src) : lx_(src) {}

  // One property block (with optional trailing assert) or a bare expression.
  ParsedProperty parse_one() {
    ParsedProperty p;
    if (lx_.peek().kind == Tok::KwProperty) {
      parse_block(p);
      if (lx_.peek().kind == Tok::KwAssert) {
        std::vector<ParsedProperty> one{p};
        parse_assert(one);
      }
    } else {
      p.body = parse_root_expr();
    }
    expect_end();
    return p;
  }

  std::vector<ParsedProperty> parse_file() {
    std::vector<ParsedProperty> props;
    while (lx_.peek().kind != Tok::End) {
      if (lx_.peek().kind == Tok::KwProperty) {
        ParsedProperty p;
        parse_block(p);
        props.push_back(std::move(p));
      } else if (lx_.peek().kind == Tok::KwAssert) {
        parse_assert(props);
      } else {
        fail_near("expected 'property' or 'assert'");
      }
    }
    return props;
  }

  FormulaPtr parse_expr_only() {
    FormulaPtr f = parse_impl(0);
    expect_end();
    return f;
  }

  TermPtr parse_term_only() {
    TermPtr t = parse_term();
    expect_end();
    return t;
  }

 private:
  [[noreturn]] void fail_near(const std::string& expectation) {
    const Token& t = lx_.peek();
    throw ParseError(t.line, t.col,
                     "syntax error near '" + t.text + "': " + expectation);
  }

  Token expect(Tok k, const char* what) {
    if (lx_.peek().kind != k) fail_near(std::string("expected ") + what);
    return lx_.take();
  }

  void expect_end() {
    if (lx_.peek().kind != Tok::End) fail_near("expected end of input");
  }

  void parse_block(ParsedProperty& p) {
    expect(Tok::KwProperty, "'property'");
    p.name = expect(Tok::Ident, "property name").text;
    expect(Tok::Semi, "';'");
    if (lx_.peek().kind == Tok::At) {
      lx_.take();
      expect(Tok::LParen, "'('");
      if (lx_.peek().kind == Tok::KwNegedge) {
        p.negedge = true;
        lx_.take();
      } else {
        expect(Tok::KwPosedge, "'posedge' or 'negedge'");
      }
      p.clock = expect(Tok::Ident, "clock name").text;
      expect(Tok::RParen, "')'");
    }
    if (lx_.peek().kind == Tok::KwDisable) {
      lx_.take();
      expect(Tok::KwIff, "'iff'");
      expect(Tok::LParen, "'('");
      p.disable = parse_impl(1);
      expect(Tok::RParen, "')'");
    }
    p.body = parse_root_expr();
    expect(Tok::Semi, "';'");
    expect(Tok::KwEndproperty, "'endproperty'");
  }

  void parse_assert(std::vector<ParsedProperty>& props) {
    expect(Tok::KwAssert, "'assert'");
    expect(Tok::KwProperty, "'property'");
    expect(Tok::LParen, "'('");
    Token name = expect(Tok::Ident, "property name");
    expect(Tok::RParen, "')'");
    expect(Tok::Semi, "';'");
    for (const auto& p : props)
      if (p.name == name.text) return;
    throw ParseError(name.line, name.col,
                     "assert references undefined property '" + name.text + "'");
  }

  // Root expression: a top-level |-> or |=> puts the property under Always,
  // matching the implicit per-cycle evaluation of a clocked assertion.
  FormulaPtr parse_root_expr() {
    root_sva_impl_ = false;
    FormulaPtr f = parse_impl(0);
    if (root_sva_impl_) f = mk_always(f);
    return f;
  }

  // depth 0 only at the root production, before any parenthesis or operator.
  FormulaPtr parse_impl(int depth) {
    FormulaPtr lhs = parse_or();
    Tok k = lx_.peek().kind;
    if (k == Tok::Arrow || k == Tok::OverlapImpl || k == Tok::NonOverlapImpl) {
      lx_.take();
      FormulaPtr rhs = parse_impl(depth + 1);
      if (k == Tok::NonOverlapImpl) rhs = mk_next(std::move(rhs));
      if (depth == 0 && k != Tok::Arrow) root_sva_impl_ = true;
      return mk_implies(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  FormulaPtr parse_or() {
    FormulaPtr f = parse_and();
    while (lx_.peek().kind == Tok::OrOr) {
      lx_.take();
      f = mk_or(std::move(f), parse_and());
    }
    return f;
  }

  FormulaPtr parse_and() {
    FormulaPtr f = parse_until();
    while (lx_.peek().kind == Tok::AndAnd) {
      lx_.take();
      f = mk_and(std::move(f), parse_until());
    }
    return f;
  }

  FormulaPtr parse_until() {
    FormulaPtr f = parse_unary();
    if (lx_.peek().kind == Tok::KwU) {
      lx_.take();
      return mk_until(std::move(f), parse_until());
    }
    return f;
  }

  FormulaPtr parse_unary() {
    switch (lx_.peek().kind) {
      case Tok::Bang:
        lx_.take();
        return mk_not(parse_unary());
      case Tok::KwX:
      case Tok::Delay1:
        lx_.take();
        return mk_next(parse_unary());
      case Tok::KwG:
      case Tok::KwAlways:
        lx_.take();
        return mk_always(parse_unary());
      case Tok::KwF:
      case Tok::KwSEventually:
        lx_.take();
        return mk_eventually(parse_unary());
      default:
        return parse_primary();
    }
  }

  static bool starts_term_tail(Tok k) {
    return k == Tok::Plus || k == Tok::Minus || k == Tok::Star || is_relop(k);
  }

  static bool is_relop(Tok k) {
    return k == Tok::EqEq || k == Tok::NotEq || k == Tok::Lt || k == Tok::Le ||
           k == Tok::Gt || k == Tok::Ge;
  }

  static CmpOp relop(Tok k) {
    switch (k) {
      case Tok::EqEq: return CmpOp::Eq;
      case Tok::NotEq: return CmpOp::Ne;
      case Tok::Lt: return CmpOp::Lt;
      case Tok::Le: return CmpOp::Le;
      case Tok::Gt: return CmpOp::Gt;
      default: return CmpOp::Ge;
    }
  }

  FormulaPtr parse_primary() {
    const Token& t = lx_.peek();
    switch (t.kind) {
      case Tok::LParen: {
        lx_.take();
        FormulaPtr f = parse_impl(1);
        expect(Tok::RParen, "')'");
        return f;
      }
      case Tok::KwTrue:
        lx_.take();
        return tt();
      case Tok::KwFalse:
        lx_.take();
        return ff();
      case Tok::Stable: {
        lx_.take();
        expect(Tok::LParen, "'('");
        Token v = expect(Tok::Ident, "variable name");
        expect(Tok::RParen, "')'");
        return mk_stable(atom(v.text));
      }
      case Tok::Past: {
        lx_.take();
        expect(Tok::LParen, "'('");
        Token v = expect(Tok::Ident, "variable name");
        expect(Tok::RParen, "')'");
        if (starts_term_tail(lx_.peek().kind))
          return parse_comparison(term_past(v.text));
        return mk_past(atom(v.text));
      }
      case Tok::Ident: {
        Token v = lx_.take();
        if (starts_term_tail(lx_.peek().kind))
          return parse_comparison(term_var(v.text));
        return atom(v.text);
      }
      case Tok::Number: {
        Token n = lx_.take();
        return parse_comparison(term_num(n.num));
      }
      case Tok::Minus: {
        lx_.take();
        return parse_comparison(term_neg(parse_factor()));
      }
      default:
        fail_near("expected a property expression");
    }
  }

  // Entered after the leading factor of a comparison's left side.
  FormulaPtr parse_comparison(TermPtr first) {
    TermPtr lhs = parse_term_tail(parse_mul_tail(std::move(first)));
    if (!is_relop(lx_.peek().kind))
      fail_near("expected a comparison operator");
    CmpOp op = relop(lx_.take().kind);
    TermPtr rhs = parse_term();
    return make_comparison(std::move(lhs), op, std::move(rhs));
  }

  TermPtr parse_term() { return parse_term_tail(parse_mul()); }

  TermPtr parse_term_tail(TermPtr f) {
    for (;;) {
      Tok k = lx_.peek().kind;
      if (k == Tok::Plus) {
        lx_.take();
        f = term_bin(Term::Kind::Add, std::move(f), parse_mul());
      } else if (k == Tok::Minus) {
        lx_.take();
        f = term_bin(Term::Kind::Sub, std::move(f), parse_mul());
      } else {
        return f;
      }
    }
  }

  TermPtr parse_mul() { return parse_mul_tail(parse_factor()); }

  TermPtr parse_mul_tail(TermPtr f) {
    while (lx_.peek().kind == Tok::Star) {
      lx_.take();
      f = term_bin(Term::Kind::Mul, std::move(f), parse_factor());
    }
    return f;
  }

  TermPtr parse_factor() {
    const Token& t = lx_.peek();
    switch (t.kind) {
      case Tok::Number:
        return term_num(lx_.take().num);
      case Tok::Ident:
        return term_var(lx_.take().text);
      case Tok::Minus:
        lx_.take();
        return term_neg(parse_factor());
      case Tok::Past: {
        lx_.take();
        expect(Tok::LParen, "'('");
        Token v = expect(Tok::Ident, "variable name");
        expect(Tok::RParen, "')'");
        return term_past(v.text);
      }
      default:
        fail_near("expected a number, variable or $past(...)");
    }
  }

  // x == $past(x) is exactly stability of x; x != $past(x) its negation.
  FormulaPtr make_comparison(TermPtr lhs, CmpOp op, TermPtr rhs) {
    if (op == CmpOp::Eq || op == CmpOp::Ne) {
      const Term *a = lhs.get(), *b = rhs.get();
      if (a->kind == Term::Kind::Past && b->kind == Term::Kind::Var)
        std::swap(a, b);
      if (a->kind == Term::Kind::Var && b->kind == Term::Kind::Past &&
          a->var == b->var) {
        FormulaPtr s = mk_stable(atom(a->var));
        return op == CmpOp::Eq ? s : mk_not(std::move(s));
      }
    }
    std::string name =
        render_term(lhs) + " " + cmp_op_text(op) + " " + render_term(rhs);
    return atom(std::move(name));
  }

  Lexer lx_;
  bool root_sva_impl_ = false;
};

}  // namespace detail

// Bare expression or a full `property ... endproperty` block; returns the
// desugared body.
inline FormulaPtr parse_property(std::string_view text) {
  detail::Parser p(text);
  return p.parse_one().body;
}

inline ParsedProperty parse_property_full(std::string_view text) {
  detail::Parser p(text);
  return p.parse_one();
}

// A file of property blocks with optional `assert property (name);` lines.
inline std::vector<ParsedProperty> parse_property_file(std::string_view text) {
  detail::Parser p(text);
  return p.parse_file();
}

// Boolean expression with no temporal operators (model guards).
inline FormulaPtr parse_guard(std::string_view text) {
  detail::Parser p(text);
  FormulaPtr f = p.parse_expr_only();
  auto reject_temporal = [](auto&& self, const FormulaPtr& g) -> void {
    switch (g->kind()) {
      case Kind::Next:
      case Kind::Eventually:
      case Kind::Always:
      case Kind::Until:
      case Kind::Past1:
      case Kind::Stable:
        throw ParseError(1, 1, "temporal operator not allowed in a guard");
      default:
        break;
    }
    for (const auto& c : g->children()) self(self, c);
  };
  reject_temporal(reject_temporal, f);
  return f;
}

// Arithmetic term (FSM update right-hand sides of int variables).
inline TermPtr parse_term(std::string_view text) {
  detail::Parser p(text);
  return p.parse_term_only();
}

// ---------------------------------------------------------------------------
// Atom-name decoding shared by the model kernel and printers.

inline bool is_plain_ident(std::string_view s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  std::size_t i = 1;
  while (i < s.size() &&
         (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_'))
    ++i;
  if (i == s.size()) return true;
  // optional [digits] suffix
  if (s[i] != '[') return false;
  ++i;
  std::size_t start = i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  return i > start && i + 1 == s.size() && s[i] == ']';
}

// "$past(x)" / "$stable(x)" / plain name / comparison text.
inline AtomSemantics decode_atom(const std::string& name) {
  AtomSemantics out;
  auto wrapped = [&](std::string_view prefix) -> std::optional<std::string> {
    if (name.size() > prefix.size() + 1 && name.rfind(prefix, 0) == 0 &&
        name.back() == ')') {
      std::string inner = name.substr(prefix.size(), name.size() - prefix.size() - 1);
      if (is_plain_ident(inner)) return inner;
    }
    return std::nullopt;
  };
  if (auto v = wrapped("$past(")) {
    out.kind = AtomSemantics::Kind::PastVar;
    out.var = *v;
    return out;
  }
  if (auto v = wrapped("$stable(")) {
    out.kind = AtomSemantics::Kind::StableVar;
    out.var = *v;
    return out;
  }
  if (is_plain_ident(name)) {
    out.kind = AtomSemantics::Kind::Var;
    out.var = name;
    return out;
  }
  // A comparison atom's name is "<term> <op> <term>" with canonical spacing,
  // and relational operators never occur inside term text.
  for (const char* op : {"==", "!=", "<=", ">=", "<", ">"}) {
    std::size_t at = name.find(std::string(" ") + op + " ");
    if (at == std::string::npos) continue;
    out.kind = AtomSemantics::Kind::Compare;
    out.lhs = parse_term(name.substr(0, at));
    out.rhs = parse_term(name.substr(at + std::string(op).size() + 2));
    if (std::string(op) == "==") out.op = CmpOp::Eq;
    else if (std::string(op) == "!=") out.op = CmpOp::Ne;
    else if (std::string(op) == "<=") out.op = CmpOp::Le;
    else if (std::string(op) == ">=") out.op = CmpOp::Ge;
    else if (std::string(op) == "<") out.op = CmpOp::Lt;
    else out.op = CmpOp::Gt;
    return out;
  }
  throw ParseError(1, 1, "cannot decode atom '" + name + "'");
}

}  // namespace vaprop
