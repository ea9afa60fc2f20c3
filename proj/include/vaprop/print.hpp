// Rendering: plain text (round-trips through the parser) and SVA blocks with
// |->, |=>, $past and $stable sugar restored where the tree shape permits.
#pragma once

#include <string>

#include "vaprop/formula.hpp"
#include "vaprop/parse.hpp"

namespace vaprop {

namespace detail {

// Binding strength; parenthesize a child whenever its level drops below what
// its position requires. Mirrors the parser's precedence exactly.
inline int print_level(const Formula& f) {
  switch (f.kind()) {
    case Kind::Implies: return 1;
    case Kind::Or: return 2;
    case Kind::And: return 3;
    case Kind::Until: return 4;
    case Kind::Not:
    case Kind::Next:
    case Kind::Eventually:
    case Kind::Always:
      return 5;
    default: return 6;  // atoms, constants, $past/$stable applications
  }
}

inline std::string render(const FormulaPtr& f, int min_level) {
  auto sub = [](const FormulaPtr& g, int ml) { return render(g, ml); };
  std::string out;
  switch (f->kind()) {
    case Kind::Atom:
      out = is_plain_ident(f->name()) ? f->name() : "(" + f->name() + ")";
      return out;  // comparison atoms carry their own parens
    case Kind::True: out = "true"; break;
    case Kind::False: out = "false"; break;
    case Kind::Not: out = "!" + sub(f->child(0), 5); break;
    case Kind::Next: out = "X " + sub(f->child(0), 5); break;
    case Kind::Eventually: out = "F " + sub(f->child(0), 5); break;
    case Kind::Always: out = "G " + sub(f->child(0), 5); break;
    case Kind::Past1: out = "$past(" + sub(f->child(0), 0) + ")"; return out;
    case Kind::Stable: out = "$stable(" + sub(f->child(0), 0) + ")"; return out;
    case Kind::And: out = sub(f->child(0), 3) + " && " + sub(f->child(1), 4); break;
    case Kind::Or: out = sub(f->child(0), 2) + " || " + sub(f->child(1), 3); break;
    case Kind::Implies:
      out = sub(f->child(0), 2) + " -> " + sub(f->child(1), 1);
      break;
    case Kind::Until: out = sub(f->child(0), 5) + " U " + sub(f->child(1), 4); break;
  }
  if (print_level(*f) < min_level) out = "(" + out + ")";
  return out;
}

}  // namespace detail

// Parses back to a structurally equal formula.
inline std::string pretty_print(const FormulaPtr& f) {
  return detail::render(f, 0);
}

struct SvaText {
  std::string name;
  std::string clock;    // empty: unclocked
  std::string disable;  // empty: no disable iff
  std::string body;

  std::string text() const {
    std::string out = "property " + name + ";\n";
    std::string head;
    if (!clock.empty()) head += "@(posedge " + clock + ") ";
    if (!disable.empty()) head += "disable iff (" + disable + ") ";
    if (!head.empty()) {
      head.pop_back();
      out += "  " + head + "\n";
    }
    out += "  " + body + ";\nendproperty\nassert property (" + name + ");\n";
    return out;
  }
};

// Body text with implication sugar restored at the root: Always(Implies(a, X b))
// prints as `a |=> b`, Always(Implies(a, b)) as `a |-> b`. The parser's
// implicit-Always rule makes both read back as the original tree.
inline std::string render_sva_body(const FormulaPtr& f) {
  if (f->kind() == Kind::Always && f->child(0)->kind() == Kind::Implies) {
    const FormulaPtr& imp = f->child(0);
    const FormulaPtr& lhs = imp->child(0);
    const FormulaPtr& rhs = imp->child(1);
    if (rhs->kind() == Kind::Next)
      return detail::render(lhs, 2) + " |=> " + detail::render(rhs->child(0), 1);
    return detail::render(lhs, 2) + " |-> " + detail::render(rhs, 1);
  }
  return detail::render(f, 0);
}

inline SvaText emit_sva(const FormulaPtr& f, const std::string& name,
                        const std::string& clock, const std::string& disable) {
  SvaText s;
  s.name = name;
  s.clock = clock;
  s.disable = disable;
  s.body = render_sva_body(f);
  return s;
}

}  // namespace vaprop
