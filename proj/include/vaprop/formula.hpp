// Temporal property AST: immutable formula trees with occurrence addressing,
// polarity, substitution, NNF normalization and witness construction.
#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vaprop {

enum class Kind : std::uint8_t {
  Atom,
  True,
  False,
  Not,
  And,
  Or,
  Implies,
  Next,        // X f
  Eventually,  // F f
  Always,      // G f
  Until,       // f U g
  Past1,       // value of f one step earlier ($past)
  Stable,      // f unchanged from the previous step ($stable)
};

inline constexpr int arity(Kind k) {
  switch (k) {
    case Kind::Atom:
    case Kind::True:
    case Kind::False:
      return 0;
    case Kind::Not:
    case Kind::Next:
    case Kind::Eventually:
    case Kind::Always:
    case Kind::Past1:
    case Kind::Stable:
      return 1;
    case Kind::And:
    case Kind::Or:
    case Kind::Implies:
    case Kind::Until:
      return 2;
  }
  return -1;
}

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Immutable node. Shared freely across threads once constructed.
class Formula {
 public:
  Formula(Kind kind, std::string name, std::vector<FormulaPtr> children)
      : kind_(kind), name_(std::move(name)), children_(std::move(children)) {
    assert(static_cast<int>(children_.size()) == arity(kind_));
  }

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const std::vector<FormulaPtr>& children() const { return children_; }
  const FormulaPtr& child(std::size_t i) const { return children_[i]; }
  std::size_t num_children() const { return children_.size(); }

 private:
  Kind kind_;
  std::string name_;  // nonempty only for Atom
  std::vector<FormulaPtr> children_;
};

inline FormulaPtr atom(std::string name) {
  return std::make_shared<Formula>(Kind::Atom, std::move(name),
                                   std::vector<FormulaPtr>{});
}

inline FormulaPtr tt() {
  static const FormulaPtr t =
      std::make_shared<Formula>(Kind::True, "", std::vector<FormulaPtr>{});
  return t;
}

inline FormulaPtr ff() {
  static const FormulaPtr f =
      std::make_shared<Formula>(Kind::False, "", std::vector<FormulaPtr>{});
  return f;
}

inline FormulaPtr mk(Kind k, std::vector<FormulaPtr> children) {
  return std::make_shared<Formula>(k, "", std::move(children));
}

inline FormulaPtr mk_not(FormulaPtr f) { return mk(Kind::Not, {std::move(f)}); }
inline FormulaPtr mk_and(FormulaPtr a, FormulaPtr b) {
  return mk(Kind::And, {std::move(a), std::move(b)});
}
inline FormulaPtr mk_or(FormulaPtr a, FormulaPtr b) {
  return mk(Kind::Or, {std::move(a), std::move(b)});
}
inline FormulaPtr mk_implies(FormulaPtr a, FormulaPtr b) {
  return mk(Kind::Implies, {std::move(a), std::move(b)});
}
inline FormulaPtr mk_next(FormulaPtr f) { return mk(Kind::Next, {std::move(f)}); }
inline FormulaPtr mk_eventually(FormulaPtr f) {
  return mk(Kind::Eventually, {std::move(f)});
}
inline FormulaPtr mk_always(FormulaPtr f) {
  return mk(Kind::Always, {std::move(f)});
}
inline FormulaPtr mk_until(FormulaPtr a, FormulaPtr b) {
  return mk(Kind::Until, {std::move(a), std::move(b)});
}
inline FormulaPtr mk_past(FormulaPtr f) { return mk(Kind::Past1, {std::move(f)}); }
inline FormulaPtr mk_stable(FormulaPtr f) {
  return mk(Kind::Stable, {std::move(f)});
}

// Total structural order; 0 on equality. Used for canonical formula sets.
inline int compare(const Formula& a, const Formula& b) {
  if (a.kind() != b.kind())
    return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
  if (a.kind() == Kind::Atom) return a.name().compare(b.name());
  for (std::size_t i = 0; i < a.num_children(); ++i) {
    int c = compare(*a.child(i), *b.child(i));
    if (c != 0) return c;
  }
  return 0;
}

inline int compare(const FormulaPtr& a, const FormulaPtr& b) {
  if (a.get() == b.get()) return 0;
  return compare(*a, *b);
}

inline bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  return compare(a, b) == 0;
}

struct FormulaLess {
  bool operator()(const FormulaPtr& a, const FormulaPtr& b) const {
    return compare(a, b) < 0;
  }
};

inline std::size_t size_of(const FormulaPtr& f) {
  std::size_t n = 1;
  for (const auto& c : f->children()) n += size_of(c);
  return n;
}

inline bool contains_past(const FormulaPtr& f) {
  if (f->kind() == Kind::Past1 || f->kind() == Kind::Stable) return true;
  for (const auto& c : f->children())
    if (contains_past(c)) return true;
  return false;
}

// Single-step past fragment: no Past1/Stable nested under another one.
inline bool past_depth_ok(const FormulaPtr& f, bool under_past = false) {
  bool is_past = f->kind() == Kind::Past1 || f->kind() == Kind::Stable;
  if (is_past && under_past) return false;
  for (const auto& c : f->children())
    if (!past_depth_ok(c, under_past || is_past)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Occurrence addressing

enum class Polarity : std::uint8_t { Positive, Negative };

inline Polarity flip(Polarity p) {
  return p == Polarity::Positive ? Polarity::Negative : Polarity::Positive;
}

struct OccurrencePath {
  std::vector<std::uint32_t> path;  // child indices from the root
  Polarity polarity = Polarity::Positive;

  bool operator==(const OccurrencePath& o) const { return path == o.path; }
};

struct PathError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every strict-subformula occurrence, deterministic preorder. Polarity is the
// parity of negations and implication left-hand sides crossed from the root.
inline std::vector<OccurrencePath> occurrences(const FormulaPtr& f) {
  std::vector<OccurrencePath> out;
  std::vector<std::uint32_t> path;
  auto walk = [&](auto&& self, const FormulaPtr& node, Polarity pol) -> void {
    for (std::uint32_t i = 0; i < node->num_children(); ++i) {
      Polarity child_pol = pol;
      if (node->kind() == Kind::Not) child_pol = flip(pol);
      if (node->kind() == Kind::Implies && i == 0) child_pol = flip(pol);
      path.push_back(i);
      out.push_back(OccurrencePath{path, child_pol});
      self(self, node->child(i), child_pol);
      path.pop_back();
    }
  };
  walk(walk, f, Polarity::Positive);
  return out;
}

inline FormulaPtr resolve(const FormulaPtr& f, const OccurrencePath& at) {
  FormulaPtr node = f;
  for (std::uint32_t i : at.path) {
    if (i >= node->num_children())
      throw PathError("occurrence path does not resolve in formula");
    node = node->child(i);
  }
  return node;
}

// Replace the addressed occurrence with `value`, sharing all untouched
// subtrees with the input.
inline FormulaPtr substitute_at(const FormulaPtr& f, const OccurrencePath& at,
                                const FormulaPtr& value) {
  auto rebuild = [&](auto&& self, const FormulaPtr& node,
                     std::size_t depth) -> FormulaPtr {
    if (depth == at.path.size()) return value;
    std::uint32_t i = at.path[depth];
    if (i >= node->num_children())
      throw PathError("occurrence path does not resolve in formula");
    std::vector<FormulaPtr> children = node->children();
    children[i] = self(self, node->child(i), depth + 1);
    return std::make_shared<Formula>(node->kind(), node->name(),
                                     std::move(children));
  };
  return rebuild(rebuild, f, 0);
}

inline FormulaPtr substitute(const FormulaPtr& f, const OccurrencePath& at,
                             bool value) {
  return substitute_at(f, at, value ? tt() : ff());
}

// Replace every occurrence of `target` (structural equality) with `value`.
inline FormulaPtr substitute_all(const FormulaPtr& f, const FormulaPtr& target,
                                 const FormulaPtr& value) {
  if (equal(f, target)) return value;
  if (f->num_children() == 0) return f;
  std::vector<FormulaPtr> children;
  children.reserve(f->num_children());
  bool changed = false;
  for (const auto& c : f->children()) {
    FormulaPtr nc = substitute_all(c, target, value);
    changed = changed || nc.get() != c.get();
    children.push_back(std::move(nc));
  }
  if (!changed) return f;
  return std::make_shared<Formula>(f->kind(), f->name(), std::move(children));
}

// ---------------------------------------------------------------------------
// Normalization

// Constant folding only; semantics-preserving.
inline FormulaPtr simplify(const FormulaPtr& f) {
  std::vector<FormulaPtr> cs;
  cs.reserve(f->num_children());
  for (const auto& c : f->children()) cs.push_back(simplify(c));
  auto is_true = [](const FormulaPtr& g) { return g->kind() == Kind::True; };
  auto is_false = [](const FormulaPtr& g) { return g->kind() == Kind::False; };
  auto is_const = [&](const FormulaPtr& g) { return is_true(g) || is_false(g); };
  switch (f->kind()) {
    case Kind::Not:
      if (is_true(cs[0])) return ff();
      if (is_false(cs[0])) return tt();
      if (cs[0]->kind() == Kind::Not) return cs[0]->child(0);
      break;
    case Kind::And:
      if (is_false(cs[0]) || is_false(cs[1])) return ff();
      if (is_true(cs[0])) return cs[1];
      if (is_true(cs[1])) return cs[0];
      break;
    case Kind::Or:
      if (is_true(cs[0]) || is_true(cs[1])) return tt();
      if (is_false(cs[0])) return cs[1];
      if (is_false(cs[1])) return cs[0];
      break;
    case Kind::Implies:
      if (is_false(cs[0]) || is_true(cs[1])) return tt();
      if (is_true(cs[0])) return cs[1];
      if (is_false(cs[1])) return simplify(mk_not(cs[0]));
      break;
    case Kind::Next:
    case Kind::Eventually:
    case Kind::Always:
      if (is_const(cs[0])) return cs[0];
      break;
    case Kind::Until:
      // f U true = true, f U false = false, false U g = g, true U g = F g
      if (is_const(cs[1])) return cs[1];
      if (is_false(cs[0])) return cs[1];
      if (is_true(cs[0])) return mk_eventually(cs[1]);
      break;
    case Kind::Past1:
      if (is_const(cs[0])) return cs[0];
      break;
    case Kind::Stable:
      if (is_const(cs[0])) return tt();
      break;
    default:
      break;
  }
  bool changed = false;
  for (std::size_t i = 0; i < cs.size(); ++i)
    changed = changed || cs[i].get() != f->child(i).get();
  if (!changed) return f;
  return std::make_shared<Formula>(f->kind(), f->name(), std::move(cs));
}

// Negation-normal form: implications eliminated, negation pushed onto
// atomic-level nodes (atoms, constants, Past1/Stable). The fragment has no
// release operator, so a negated Until is expanded with
//   !(f U g)  =  (!g U (!f && !g)) || G !g
inline FormulaPtr nnf(const FormulaPtr& f, bool negated = false) {
  switch (f->kind()) {
    case Kind::Atom:
    case Kind::Past1:
    case Kind::Stable:
      return negated ? mk_not(f) : f;
    case Kind::True:
      return negated ? ff() : tt();
    case Kind::False:
      return negated ? tt() : ff();
    case Kind::Not:
      return nnf(f->child(0), !negated);
    case Kind::And:
      return negated ? mk_or(nnf(f->child(0), true), nnf(f->child(1), true))
                     : mk_and(nnf(f->child(0), false), nnf(f->child(1), false));
    case Kind::Or:
      return negated ? mk_and(nnf(f->child(0), true), nnf(f->child(1), true))
                     : mk_or(nnf(f->child(0), false), nnf(f->child(1), false));
    case Kind::Implies:
      // a -> b  =  !a || b
      return negated ? mk_and(nnf(f->child(0), false), nnf(f->child(1), true))
                     : mk_or(nnf(f->child(0), true), nnf(f->child(1), false));
    case Kind::Next:
      return mk_next(nnf(f->child(0), negated));
    case Kind::Eventually:
      return negated ? mk_always(nnf(f->child(0), true))
                     : mk_eventually(nnf(f->child(0), false));
    case Kind::Always:
      return negated ? mk_eventually(nnf(f->child(0), true))
                     : mk_always(nnf(f->child(0), false));
    case Kind::Until: {
      FormulaPtr a = nnf(f->child(0), negated);
      FormulaPtr b = nnf(f->child(1), negated);
      if (!negated) return mk_until(a, b);
      // a, b are already the negated normalized children here.
      return mk_or(mk_until(b, mk_and(a, b)), mk_always(b));
    }
  }
  throw std::logic_error("nnf: unhandled formula kind");
}

inline FormulaPtr normalize_nnf(const FormulaPtr& f) { return nnf(f); }

// ---------------------------------------------------------------------------
// Interesting-witness construction
//
// witness(f) = f && /\ over strict occurrences psi of  !f[psi <- c(psi)]
// where c is true for negative-polarity occurrences and false for positive
// ones. A path satisfying witness(f) satisfies f with every occurrence
// pulling its weight.
inline FormulaPtr witness_formula(const FormulaPtr& f) {
  FormulaPtr w = f;
  for (const OccurrencePath& occ : occurrences(f)) {
    bool c = occ.polarity == Polarity::Negative;
    w = mk_and(w, mk_not(substitute(f, occ, c)));
  }
  return w;
}

// Atom names appearing in f, sorted and deduplicated.
inline void collect_atoms(const FormulaPtr& f, std::vector<std::string>& out) {
  if (f->kind() == Kind::Atom) out.push_back(f->name());
  for (const auto& c : f->children()) collect_atoms(c, out);
}

inline std::vector<std::string> atoms_of(const FormulaPtr& f) {
  std::vector<std::string> out;
  collect_atoms(f, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace vaprop
