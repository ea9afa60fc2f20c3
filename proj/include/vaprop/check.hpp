// Model checking core: past lowering, the model/automaton product with
// nested-DFS emptiness, counterexample extraction, and an independent
// fixpoint evaluator for LTL on lasso words.
#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vaprop/buchi.hpp"
#include "vaprop/formula.hpp"
#include "vaprop/model.hpp"

namespace vaprop {

struct CheckError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {
inline constexpr std::size_t kProductCap = 1'000'000;
}

struct CheckStats {
  std::size_t product_states = 0;
  std::size_t automaton_states = 0;
  double seconds = 0.0;
};

struct Verdict {
  bool holds = false;
  std::optional<Lasso> counterexample;  // over the model passed to check()
  CheckStats stats;
};

// Rewrites single-step past operators into the shadow-variable atoms the
// model kernel understands: $past(x) and $stable(x) over plain variables.
inline FormulaPtr lower_past(const FormulaPtr& f) {
  switch (f->kind()) {
    case Kind::Past1: {
      const FormulaPtr& c = f->child(0);
      if (c->kind() == Kind::True || c->kind() == Kind::False) return c;
      if (c->kind() == Kind::Atom && is_plain_ident(c->name()))
        return atom("$past(" + c->name() + ")");
      throw CheckError("$past is only supported over a plain variable");
    }
    case Kind::Stable: {
      const FormulaPtr& c = f->child(0);
      if (c->kind() == Kind::True || c->kind() == Kind::False) return tt();
      if (c->kind() == Kind::Atom && is_plain_ident(c->name()))
        return atom("$stable(" + c->name() + ")");
      throw CheckError("$stable is only supported over a plain variable");
    }
    default: {
      if (f->num_children() == 0) return f;
      std::vector<FormulaPtr> kids;
      bool changed = false;
      for (const auto& c : f->children()) {
        kids.push_back(lower_past(c));
        changed = changed || kids.back() != c;
      }
      return changed ? mk(f->kind(), std::move(kids)) : f;
    }
  }
}

// ---------------------------------------------------------------------------
// Reference semantics: evaluate f on the infinite word stem loop^ω.
//
// Positions 0 .. |stem|+2|loop|-1 form an exact finite window: the first loop
// copy carries the stem's past context, the second is the steady state the
// future wraps into. Past operators read position j-1 directly (position 0
// reads itself, matching the shadow initialisation), so values computed here
// are independent of any $past shadows the model may carry.

inline bool eval_on_lasso(const Model& m, const FormulaPtr& f, const Lasso& l) {
  if (!lasso_is_valid(m, l)) throw CheckError("lasso is not a path in the model");
  const std::size_t sl = l.stem.size(), k = l.loop.size(), n = sl + 2 * k;
  auto state_at = [&](std::size_t j) {
    return m.states[j < sl ? l.stem[j] : l.loop[(j - sl) % k]];
  };
  auto next = [&](std::size_t j) { return j + 1 < n ? j + 1 : sl + k; };
  auto prev = [&](std::size_t j) { return j == 0 ? 0 : j - 1; };

  auto value_at = [&](const std::string& var, std::size_t j) {
    return m.value_of(state_at(j), m.resolve_var(var));
  };
  auto term_at = [&](auto&& self, const TermPtr& t, std::size_t j) -> long long {
    switch (t->kind) {
      case Term::Kind::Num: return t->num;
      case Term::Kind::Var: return static_cast<long long>(value_at(t->var, j));
      case Term::Kind::Past:
        return static_cast<long long>(value_at(t->var, prev(j)));
      case Term::Kind::Add: return self(self, t->lhs, j) + self(self, t->rhs, j);
      case Term::Kind::Sub: return self(self, t->lhs, j) - self(self, t->rhs, j);
      case Term::Kind::Mul: return self(self, t->lhs, j) * self(self, t->rhs, j);
      case Term::Kind::Neg: return -self(self, t->lhs, j);
    }
    throw CheckError("bad term");
  };
  auto atom_at = [&](const std::string& name, std::size_t j) -> bool {
    AtomSemantics a = decode_atom(name);
    switch (a.kind) {
      case AtomSemantics::Kind::Var: {
        VarInfo v = m.resolve_var(a.var);
        if (v.width != 1)
          throw ModelError("atom '" + name +
                           "' is a multi-bit variable; use a comparison");
        return value_at(a.var, j) != 0;
      }
      case AtomSemantics::Kind::PastVar: {
        VarInfo v = m.resolve_var(a.var);
        if (v.width != 1)
          throw ModelError("atom '" + name +
                           "' is a multi-bit variable; use a comparison");
        return value_at(a.var, prev(j)) != 0;
      }
      case AtomSemantics::Kind::StableVar:
        return value_at(a.var, j) == value_at(a.var, prev(j));
      case AtomSemantics::Kind::Compare:
        return Model::compare_values(term_at(term_at, a.lhs, j), a.op,
                                     term_at(term_at, a.rhs, j));
    }
    throw CheckError("bad atom");
  };

  using Row = std::vector<char>;
  std::map<const Formula*, Row> memo;
  auto eval = [&](auto&& self, const FormulaPtr& g) -> const Row& {
    auto it = memo.find(g.get());
    if (it != memo.end()) return it->second;
    Row row(n, 0);
    switch (g->kind()) {
      case Kind::True: row.assign(n, 1); break;
      case Kind::False: break;
      case Kind::Atom:
        for (std::size_t j = 0; j < n; ++j) row[j] = atom_at(g->name(), j);
        break;
      case Kind::Not: {
        const Row& c = self(self, g->child(0));
        for (std::size_t j = 0; j < n; ++j) row[j] = !c[j];
        break;
      }
      case Kind::And: {
        const Row& a = self(self, g->child(0));
        const Row& b = self(self, g->child(1));
        for (std::size_t j = 0; j < n; ++j) row[j] = a[j] && b[j];
        break;
      }
      case Kind::Or: {
        const Row& a = self(self, g->child(0));
        const Row& b = self(self, g->child(1));
        for (std::size_t j = 0; j < n; ++j) row[j] = a[j] || b[j];
        break;
      }
      case Kind::Implies: {
        const Row& a = self(self, g->child(0));
        const Row& b = self(self, g->child(1));
        for (std::size_t j = 0; j < n; ++j) row[j] = !a[j] || b[j];
        break;
      }
      case Kind::Next: {
        const Row& c = self(self, g->child(0));
        for (std::size_t j = 0; j < n; ++j) row[j] = c[next(j)];
        break;
      }
      case Kind::Past1: {
        const FormulaPtr& c = g->child(0);
        if (c->kind() == Kind::Atom) {
          AtomSemantics a = decode_atom(c->name());
          if (a.kind == AtomSemantics::Kind::Var) {
            VarInfo v = m.resolve_var(a.var);
            if (v.width != 1)
              throw ModelError("atom '" + c->name() +
                               "' is a multi-bit variable; use a comparison");
            for (std::size_t j = 0; j < n; ++j)
              row[j] = value_at(a.var, prev(j)) != 0;
            break;
          }
          for (std::size_t j = 0; j < n; ++j) row[j] = atom_at(c->name(), prev(j));
          break;
        }
        const Row& cr = self(self, c);
        for (std::size_t j = 0; j < n; ++j) row[j] = cr[prev(j)];
        break;
      }
      case Kind::Stable: {
        const FormulaPtr& c = g->child(0);
        if (c->kind() == Kind::True || c->kind() == Kind::False) {
          row.assign(n, 1);
          break;
        }
        if (c->kind() == Kind::Atom) {
          AtomSemantics a = decode_atom(c->name());
          if (a.kind == AtomSemantics::Kind::Var) {
            for (std::size_t j = 0; j < n; ++j)
              row[j] = value_at(a.var, j) == value_at(a.var, prev(j));
            break;
          }
          for (std::size_t j = 0; j < n; ++j)
            row[j] = atom_at(c->name(), j) == atom_at(c->name(), prev(j));
          break;
        }
        const Row& cr = self(self, c);
        for (std::size_t j = 0; j < n; ++j) row[j] = cr[j] == cr[prev(j)];
        break;
      }
      case Kind::Eventually: {
        // least fixpoint: sweep backwards until stable
        const Row& c = self(self, g->child(0));
        bool changed = true;
        while (changed) {
          changed = false;
          for (std::size_t r = n; r-- > 0;) {
            char v = c[r] || row[next(r)];
            if (v != row[r]) {
              row[r] = v;
              changed = true;
            }
          }
        }
        break;
      }
      case Kind::Always: {
        // greatest fixpoint: start from true, shrink until stable
        const Row& c = self(self, g->child(0));
        row.assign(n, 1);
        bool changed = true;
        while (changed) {
          changed = false;
          for (std::size_t r = n; r-- > 0;) {
            char v = c[r] && row[next(r)];
            if (v != row[r]) {
              row[r] = v;
              changed = true;
            }
          }
        }
        break;
      }
      case Kind::Until: {
        const Row& a = self(self, g->child(0));
        const Row& b = self(self, g->child(1));
        bool changed = true;
        while (changed) {
          changed = false;
          for (std::size_t r = n; r-- > 0;) {
            char v = b[r] || (a[r] && row[next(r)]);
            if (v != row[r]) {
              row[r] = v;
              changed = true;
            }
          }
        }
        break;
      }
    }
    return memo.emplace(g.get(), std::move(row)).first->second;
  };
  return eval(eval, f)[0] != 0;
}

// ---------------------------------------------------------------------------
// Bounded lasso enumeration: every lasso with |stem| <= max_stem and
// |loop| <= max_loop, in DFS order from the initial states. fn returns false
// to stop early. Paths may repeat states, so loops that revisit a state are
// included.

template <typename Fn>
inline void enumerate_lassos(const Model& m, std::size_t max_stem,
                             std::size_t max_loop, Fn&& fn) {
  std::vector<std::uint32_t> path;
  bool stop = false;
  auto go = [&](auto&& self, std::uint32_t s) -> void {
    if (stop) return;
    path.push_back(s);
    std::uint32_t last = path.back();
    for (std::size_t i = 0; i < path.size() && !stop; ++i) {
      if (i > max_stem || path.size() - i > max_loop) continue;
      if (!std::binary_search(m.succ[last].begin(), m.succ[last].end(), path[i]))
        continue;
      Lasso l;
      l.stem.assign(path.begin(), path.begin() + static_cast<long>(i));
      l.loop.assign(path.begin() + static_cast<long>(i), path.end());
      if (!fn(l)) stop = true;
    }
    if (path.size() < max_stem + max_loop)
      for (std::uint32_t t : m.succ[last]) {
        self(self, t);
        if (stop) break;
      }
    path.pop_back();
  };
  for (std::uint32_t s : m.initial) {
    go(go, s);
    if (stop) break;
  }
}

// ---------------------------------------------------------------------------
// check: does every execution of m satisfy f?
//
// Negate, lower past (augmenting the model with the needed shadows), build
// the Büchi automaton and search the product for an accepting cycle with
// nested DFS. Counterexamples are projected back onto the caller's model.

inline Verdict check(const Model& base, const FormulaPtr& f) {
  auto t0 = std::chrono::steady_clock::now();

  std::vector<std::string> pv = past_variables(f);
  Model augmented;
  const Model* m = &base;
  bool project = false;
  if (!pv.empty()) {
    augmented = augment_past(base, pv);
    if (augmented.vars.size() != base.vars.size()) {
      m = &augmented;
      project = true;
    }
  }

  FormulaPtr neg = simplify(nnf(mk_not(lower_past(f))));
  BuchiAutomaton ba = degeneralize(ltl_to_buchi(neg));
  for (const auto& name : ba.atoms) {
    std::set<std::uint32_t> tmp;
    atom_variables(*m, name, tmp);  // fail early on unknown variables
  }

  std::vector<std::uint64_t> sym(m->states.size(), 0);
  std::vector<char> sym_ok(m->states.size(), 0);
  auto symbol = [&](std::uint32_t s) {
    if (!sym_ok[s]) {
      std::uint64_t w = 0;
      for (std::size_t i = 0; i < ba.atoms.size(); ++i)
        if (m->eval_atom(ba.atoms[i], m->states[s])) w |= 1ull << i;
      sym[s] = w;
      sym_ok[s] = 1;
    }
    return sym[s];
  };

  // product nodes interned on discovery; ids are stable handles
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> pid;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pnodes;
  auto intern = [&](std::uint32_t s, std::uint32_t q) {
    auto key = std::make_pair(s, q);
    auto it = pid.find(key);
    if (it != pid.end()) return it->second;
    if (pnodes.size() >= detail::kProductCap)
      throw CheckError("resource limit: product exceeds " +
                       std::to_string(detail::kProductCap) + " states");
    std::uint32_t id = static_cast<std::uint32_t>(pnodes.size());
    pid.emplace(key, id);
    pnodes.push_back(key);
    return id;
  };

  std::vector<std::vector<std::uint32_t>> psucc;
  std::vector<char> psucc_ok;
  auto successors = [&](std::uint32_t id) -> const std::vector<std::uint32_t>& {
    if (psucc.size() < pnodes.size()) {
      psucc.resize(pnodes.size());
      psucc_ok.resize(pnodes.size(), 0);
    }
    if (!psucc_ok[id]) {
      auto [s, q] = pnodes[id];
      std::vector<std::uint32_t> out;
      for (std::uint32_t s2 : m->succ[s])
        for (std::uint32_t q2 : ba.succ[q])
          if (ba.label_satisfied(q2, symbol(s2))) out.push_back(intern(s2, q2));
      psucc[id] = std::move(out);
      psucc_ok[id] = 1;
    }
    return psucc[id];
  };

  auto flag = [](std::vector<char>& v, std::uint32_t id) -> char& {
    if (id >= v.size()) v.resize(id + 1, 0);
    return v[id];
  };
  std::vector<char> blue, red, on_bstack;
  std::vector<std::uint32_t> bstack_pos;
  auto pos_of = [&](std::uint32_t id) -> std::uint32_t& {
    if (id >= bstack_pos.size()) bstack_pos.resize(id + 1, 0);
    return bstack_pos[id];
  };

  std::vector<std::uint32_t> init_nodes;
  for (std::uint32_t s : m->initial)
    for (std::uint32_t q : ba.initial)
      if (ba.label_satisfied(q, symbol(s))) init_nodes.push_back(intern(s, q));

  std::vector<std::uint32_t> bstack, cex_stem, cex_loop;
  struct Frame {
    std::uint32_t id;
    std::size_t i;
  };

  auto red_search = [&](std::uint32_t seed) -> bool {
    std::vector<Frame> frames{{seed, 0}};
    std::vector<std::uint32_t> rpath{seed};
    flag(red, seed) = 1;
    while (!frames.empty()) {
      std::uint32_t id = frames.back().id;
      const auto& ss = successors(id);
      if (frames.back().i < ss.size()) {
        std::uint32_t t = ss[frames.back().i++];
        if (flag(on_bstack, t)) {
          // cycle through the seed: red path, then blue stack from t up
          cex_stem = bstack;
          cex_loop.assign(rpath.begin() + 1, rpath.end());
          for (std::size_t j = pos_of(t); j < bstack.size(); ++j)
            cex_loop.push_back(bstack[j]);
          return true;
        }
        if (!flag(red, t)) {
          flag(red, t) = 1;
          frames.push_back({t, 0});
          rpath.push_back(t);
        }
        continue;
      }
      frames.pop_back();
      rpath.pop_back();
    }
    return false;
  };

  bool found = false;
  std::vector<Frame> frames;
  for (std::uint32_t root : init_nodes) {
    if (found) break;
    if (flag(blue, root)) continue;
    flag(blue, root) = 1;
    flag(on_bstack, root) = 1;
    pos_of(root) = 0;
    bstack.assign(1, root);
    frames.assign(1, Frame{root, 0});
    while (!frames.empty() && !found) {
      std::uint32_t id = frames.back().id;
      const auto& ss = successors(id);
      if (frames.back().i < ss.size()) {
        std::uint32_t t = ss[frames.back().i++];
        if (!flag(blue, t)) {
          flag(blue, t) = 1;
          flag(on_bstack, t) = 1;
          pos_of(t) = static_cast<std::uint32_t>(bstack.size());
          bstack.push_back(t);
          frames.push_back({t, 0});
        }
        continue;
      }
      frames.pop_back();
      if (ba.accepting[pnodes[id].second] && red_search(id)) {
        found = true;
        break;
      }
      bstack.pop_back();
      flag(on_bstack, id) = 0;
    }
  }

  Verdict v;
  v.holds = !found;
  v.stats.product_states = pnodes.size();
  v.stats.automaton_states = ba.num_states();
  if (found) {
    Lasso l;
    auto to_model = [&](std::uint32_t id) {
      std::uint32_t s = pnodes[id].first;
      return project ? m->origin_state[s] : s;
    };
    for (std::uint32_t id : cex_stem) l.stem.push_back(to_model(id));
    for (std::uint32_t id : cex_loop) l.loop.push_back(to_model(id));
    v.counterexample = std::move(l);
  }
  v.stats.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return v;
}

}  // namespace vaprop
