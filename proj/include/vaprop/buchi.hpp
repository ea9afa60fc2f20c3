// LTL to Büchi translation via the classic node-splitting tableau, plus
// counter-based degeneralization and a lasso-word acceptance test used to
// cross-check the construction.
//
// Automata here are state-labeled: a run q0 q1 ... accepts x0 x1 ... when
// every xi satisfies the literal set of qi. The product construction in
// check.hpp consumes the same convention.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vaprop/formula.hpp"

namespace vaprop {

struct TranslateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BuchiAutomaton {
  std::vector<std::string> atoms;  // sorted; bit i of a word symbol = atoms[i]
  // per-state literal constraints as masks over `atoms`
  std::vector<std::uint64_t> pos_mask;
  std::vector<std::uint64_t> neg_mask;
  std::vector<std::vector<std::uint32_t>> succ;  // ascending
  std::vector<std::uint32_t> initial;            // ascending
  bool generalized = true;
  std::vector<std::vector<std::uint32_t>> accept_sets;  // generalized form
  std::vector<bool> accepting;                          // degeneralized form

  std::size_t num_states() const { return succ.size(); }

  bool label_satisfied(std::uint32_t q, std::uint64_t symbol) const {
    return (symbol & pos_mask[q]) == pos_mask[q] && (symbol & neg_mask[q]) == 0;
  }
};

namespace detail {

using FormulaSet = std::vector<FormulaPtr>;  // sorted by structural order

inline bool set_contains(const FormulaSet& s, const FormulaPtr& f) {
  auto it = std::lower_bound(s.begin(), s.end(), f, FormulaLess{});
  return it != s.end() && equal(*it, f);
}

inline void set_insert(FormulaSet& s, const FormulaPtr& f) {
  auto it = std::lower_bound(s.begin(), s.end(), f, FormulaLess{});
  if (it == s.end() || !equal(*it, f)) s.insert(it, f);
}

inline int set_compare(const FormulaSet& a, const FormulaSet& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    int c = compare(a[i], b[i]);
    if (c != 0) return c;
  }
  return 0;
}

struct TableauNode {
  std::set<std::uint32_t> incoming;
  FormulaSet nw, old, nxt;
};

// the virtual predecessor marking initial nodes
inline constexpr std::uint32_t kInit = 0xffffffffu;

struct SetPairLess {
  bool operator()(const std::pair<FormulaSet, FormulaSet>& a,
                  const std::pair<FormulaSet, FormulaSet>& b) const {
    int c = set_compare(a.first, b.first);
    if (c != 0) return c < 0;
    return set_compare(a.second, b.second) < 0;
  }
};

class Tableau {
 public:
  explicit Tableau(const FormulaPtr& f) {
    if (f->kind() == Kind::False) return;  // empty language, no nodes
    TableauNode start;
    start.incoming.insert(kInit);
    if (f->kind() != Kind::True) set_insert(start.nw, f);
    expand(std::move(start));
  }

  std::vector<TableauNode> nodes;

 private:
  std::map<std::pair<FormulaSet, FormulaSet>, std::uint32_t, SetPairLess>
      index_;  // (old, next) -> node id

  void expand(TableauNode node) {
    if (node.nw.empty()) {
      auto key = std::make_pair(node.old, node.nxt);
      auto it = index_.find(key);
      if (it != index_.end()) {
        nodes[it->second].incoming.insert(node.incoming.begin(),
                                          node.incoming.end());
        return;
      }
      std::uint32_t id = static_cast<std::uint32_t>(nodes.size());
      index_.emplace(std::move(key), id);
      nodes.push_back(std::move(node));
      TableauNode next;
      next.incoming.insert(id);
      next.nw = nodes[id].nxt;
      expand(std::move(next));
      return;
    }
    FormulaPtr eta = node.nw.back();
    node.nw.pop_back();
    switch (eta->kind()) {
      case Kind::False:
        return;  // contradiction, drop the node
      case Kind::True:
        expand(std::move(node));
        return;
      case Kind::Atom:
      case Kind::Not: {
        if (eta->kind() == Kind::Not && eta->child(0)->kind() != Kind::Atom)
          throw TranslateError("tableau input must be in negation normal form");
        FormulaPtr negated =
            eta->kind() == Kind::Not ? eta->child(0) : mk_not(eta);
        if (set_contains(node.old, negated)) return;  // contradiction
        set_insert(node.old, eta);
        expand(std::move(node));
        return;
      }
      case Kind::And: {
        set_insert(node.old, eta);
        if (!set_contains(node.old, eta->child(0)))
          set_insert(node.nw, eta->child(0));
        if (!set_contains(node.old, eta->child(1)))
          set_insert(node.nw, eta->child(1));
        expand(std::move(node));
        return;
      }
      case Kind::Or: {
        TableauNode left = node, right = std::move(node);
        set_insert(left.old, eta);
        if (!set_contains(left.old, eta->child(0)))
          set_insert(left.nw, eta->child(0));
        set_insert(right.old, eta);
        if (!set_contains(right.old, eta->child(1)))
          set_insert(right.nw, eta->child(1));
        expand(std::move(left));
        expand(std::move(right));
        return;
      }
      case Kind::Next: {
        set_insert(node.old, eta);
        set_insert(node.nxt, eta->child(0));
        expand(std::move(node));
        return;
      }
      case Kind::Always: {
        // G g = g and X G g, no split; greatest fixpoint needs no promise
        set_insert(node.old, eta);
        set_insert(node.nxt, eta);
        if (!set_contains(node.old, eta->child(0)))
          set_insert(node.nw, eta->child(0));
        expand(std::move(node));
        return;
      }
      case Kind::Eventually: {
        // F g splits: defer via X F g, or fulfill g now
        TableauNode defer = node, now = std::move(node);
        set_insert(defer.old, eta);
        set_insert(defer.nxt, eta);
        set_insert(now.old, eta);
        if (!set_contains(now.old, eta->child(0)))
          set_insert(now.nw, eta->child(0));
        expand(std::move(defer));
        expand(std::move(now));
        return;
      }
      case Kind::Until: {
        // f U g splits: continue via f and X(f U g), or fulfill g now
        TableauNode cont = node, now = std::move(node);
        set_insert(cont.old, eta);
        if (!set_contains(cont.old, eta->child(0)))
          set_insert(cont.nw, eta->child(0));
        set_insert(cont.nxt, eta);
        set_insert(now.old, eta);
        if (!set_contains(now.old, eta->child(1)))
          set_insert(now.nw, eta->child(1));
        expand(std::move(cont));
        expand(std::move(now));
        return;
      }
      case Kind::Implies:
      case Kind::Past1:
      case Kind::Stable:
        throw TranslateError(
            "tableau input must be in negation normal form with past lowered");
    }
  }
};

// all Until/Eventually subformulas, in structural order (deduplicated)
inline void collect_promises(const FormulaPtr& f, FormulaSet& out) {
  if (f->kind() == Kind::Until || f->kind() == Kind::Eventually)
    set_insert(out, f);
  for (std::size_t i = 0; i < f->num_children(); ++i)
    collect_promises(f->child(i), out);
}

}  // namespace detail

// Translates an LTL formula into a state-labeled generalized Büchi automaton.
// Requires negation normal form with past operators already lowered to the
// shadow-variable atoms; TranslateError otherwise.
inline BuchiAutomaton ltl_to_buchi(const FormulaPtr& input) {
  // Constants inside the formula would defeat the fulfilment bookkeeping
  // (true is never recorded in a node's old set), so fold them away first;
  // after simplification they can only survive as the whole formula.
  FormulaPtr f = simplify(input);
  detail::Tableau tab(f);
  BuchiAutomaton a;

  // alphabet support: atoms mentioned anywhere in the formula
  a.atoms = atoms_of(f);
  if (a.atoms.size() > 64)
    throw TranslateError("formula mentions more than 64 distinct atoms");
  auto atom_bit = [&a](const std::string& name) -> std::uint64_t {
    auto it = std::lower_bound(a.atoms.begin(), a.atoms.end(), name);
    return 1ull << static_cast<std::uint64_t>(it - a.atoms.begin());
  };

  std::size_t n = tab.nodes.size();
  a.pos_mask.assign(n, 0);
  a.neg_mask.assign(n, 0);
  a.succ.assign(n, {});
  for (std::uint32_t q = 0; q < n; ++q) {
    for (const FormulaPtr& g : tab.nodes[q].old) {
      if (g->kind() == Kind::Atom) a.pos_mask[q] |= atom_bit(g->name());
      if (g->kind() == Kind::Not) a.neg_mask[q] |= atom_bit(g->child(0)->name());
    }
    for (std::uint32_t src : tab.nodes[q].incoming) {
      if (src == detail::kInit)
        a.initial.push_back(q);
      else
        a.succ[src].push_back(q);
    }
  }
  for (auto& s : a.succ) std::sort(s.begin(), s.end());
  std::sort(a.initial.begin(), a.initial.end());

  // one acceptance set per Until/Eventually subformula: states that either
  // do not owe the promise or fulfil it locally
  detail::FormulaSet promises;
  detail::collect_promises(f, promises);
  for (const FormulaPtr& eta : promises) {
    FormulaPtr goal = eta->kind() == Kind::Until ? eta->child(1) : eta->child(0);
    std::vector<std::uint32_t> fset;
    for (std::uint32_t q = 0; q < n; ++q) {
      if (!detail::set_contains(tab.nodes[q].old, eta) ||
          detail::set_contains(tab.nodes[q].old, goal))
        fset.push_back(q);
    }
    a.accept_sets.push_back(std::move(fset));
  }
  if (a.accept_sets.empty()) {
    // pure safety: every infinite run accepts
    std::vector<std::uint32_t> all(n);
    for (std::uint32_t q = 0; q < n; ++q) all[q] = q;
    a.accept_sets.push_back(std::move(all));
  }
  a.generalized = true;
  return a;
}

// Counter construction: state (q, i) waits on acceptance set i; seeing q in
// set i advances the counter, and a full cycle is witnessed by set-0 states
// at counter 0.
inline BuchiAutomaton degeneralize(const BuchiAutomaton& g) {
  if (!g.generalized) return g;
  std::size_t k = g.accept_sets.size();
  std::vector<std::vector<bool>> in_set(k, std::vector<bool>(g.num_states()));
  for (std::size_t i = 0; i < k; ++i)
    for (std::uint32_t q : g.accept_sets[i]) in_set[i][q] = true;

  BuchiAutomaton b;
  b.atoms = g.atoms;
  b.generalized = false;

  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> ids;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> order;
  auto intern = [&](std::uint32_t q, std::uint32_t i) {
    auto it = ids.find({q, i});
    if (it != ids.end()) return it->second;
    std::uint32_t id = static_cast<std::uint32_t>(order.size());
    ids.emplace(std::make_pair(q, i), id);
    order.emplace_back(q, i);
    b.pos_mask.push_back(g.pos_mask[q]);
    b.neg_mask.push_back(g.neg_mask[q]);
    b.succ.emplace_back();
    b.accepting.push_back(i == 0 && in_set[0][q]);
    return id;
  };

  for (std::uint32_t q : g.initial) b.initial.push_back(intern(q, 0));
  for (std::uint32_t id = 0; id < order.size(); ++id) {
    auto [q, i] = order[id];
    std::uint32_t j =
        in_set[i][q] ? static_cast<std::uint32_t>((i + 1) % k) : i;
    for (std::uint32_t q2 : g.succ[q]) {
      std::uint32_t t = intern(q2, j);  // may grow b.succ
      b.succ[id].push_back(t);
    }
    std::sort(b.succ[id].begin(), b.succ[id].end());
  }
  std::sort(b.initial.begin(), b.initial.end());
  return b;
}

// Does the automaton accept the ultimately periodic word stem loop^ω?
// Word symbols are bit vectors over a.atoms. Decided by SCC analysis of the
// product of the automaton with the word's position graph.
inline bool accepts_lasso(const BuchiAutomaton& a,
                          const std::vector<std::uint64_t>& stem,
                          const std::vector<std::uint64_t>& loop) {
  if (loop.empty()) throw TranslateError("lasso loop must be nonempty");
  std::size_t m = stem.size(), k = loop.size(), len = m + k;
  auto symbol = [&](std::size_t pos) {
    return pos < m ? stem[pos] : loop[pos - m];
  };
  auto next_pos = [&](std::size_t pos) { return pos + 1 < len ? pos + 1 : m; };

  // product node = pos * |Q| + q, built over reachable pairs only
  std::size_t nq = a.num_states();
  if (nq == 0) return false;
  std::vector<char> seen(len * nq, 0);
  std::vector<std::uint32_t> stack;
  auto push = [&](std::size_t pos, std::uint32_t q) {
    std::uint32_t id = static_cast<std::uint32_t>(pos * nq + q);
    if (!seen[id]) {
      seen[id] = 1;
      stack.push_back(id);
    }
  };
  for (std::uint32_t q : a.initial)
    if (a.label_satisfied(q, symbol(0))) push(0, q);
  std::vector<std::uint32_t> reach;
  while (!stack.empty()) {
    std::uint32_t id = stack.back();
    stack.pop_back();
    reach.push_back(id);
    std::size_t pos = id / nq;
    std::uint32_t q = static_cast<std::uint32_t>(id % nq);
    std::size_t np = next_pos(pos);
    for (std::uint32_t q2 : a.succ[q])
      if (a.label_satisfied(q2, symbol(np))) push(np, q2);
  }

  // Tarjan over reachable product nodes
  std::vector<std::uint32_t> num(len * nq, 0), low(len * nq, 0);
  std::vector<char> on(len * nq, 0);
  std::vector<std::uint32_t> st;
  std::uint32_t counter = 0;
  bool found = false;

  std::vector<std::vector<bool>> in_set;
  if (a.generalized) {
    in_set.assign(a.accept_sets.size(), std::vector<bool>(nq));
    for (std::size_t i = 0; i < a.accept_sets.size(); ++i)
      for (std::uint32_t q : a.accept_sets[i]) in_set[i][q] = true;
  }

  // iterative Tarjan: frames carry (node, next successor index)
  struct Frame {
    std::uint32_t id;
    std::size_t next_i;
  };
  std::vector<Frame> frames;
  for (std::uint32_t root : reach) {
    if (num[root] || found) continue;
    frames.push_back({root, 0});
    num[root] = low[root] = ++counter;
    st.push_back(root);
    on[root] = 1;
    while (!frames.empty() && !found) {
      Frame& fr = frames.back();
      std::size_t pos = fr.id / nq;
      std::uint32_t q = static_cast<std::uint32_t>(fr.id % nq);
      std::size_t np = next_pos(pos);
      bool descended = false;
      while (fr.next_i < a.succ[q].size()) {
        std::uint32_t q2 = a.succ[q][fr.next_i++];
        if (!a.label_satisfied(q2, symbol(np))) continue;
        std::uint32_t t = static_cast<std::uint32_t>(np * nq + q2);
        if (!num[t]) {
          frames.push_back({t, 0});
          num[t] = low[t] = ++counter;
          st.push_back(t);
          on[t] = 1;
          descended = true;
          break;
        }
        if (on[t]) low[fr.id] = std::min(low[fr.id], num[t]);
      }
      if (descended) continue;
      // close the frame
      std::uint32_t id = fr.id;
      frames.pop_back();
      if (!frames.empty())
        low[frames.back().id] = std::min(low[frames.back().id], low[id]);
      if (low[id] == num[id]) {
        std::vector<std::uint32_t> comp;
        for (;;) {
          std::uint32_t w = st.back();
          st.pop_back();
          on[w] = 0;
          comp.push_back(w);
          if (w == id) break;
        }
        // a trivial SCC (single node, no self-loop) carries no cycle
        bool has_cycle = comp.size() > 1;
        if (!has_cycle) {
          std::size_t p1 = id / nq;
          std::uint32_t q1 = static_cast<std::uint32_t>(id % nq);
          std::size_t np1 = next_pos(p1);
          for (std::uint32_t q2 : a.succ[q1])
            if (np1 * nq + q2 == id && a.label_satisfied(q2, symbol(np1)))
              has_cycle = true;
        }
        if (!has_cycle) continue;
        if (a.generalized) {
          bool all = true;
          for (std::size_t i = 0; i < in_set.size() && all; ++i) {
            bool hit = false;
            for (std::uint32_t w : comp)
              if (in_set[i][w % nq]) {
                hit = true;
                break;
              }
            all = hit;
          }
          if (all) found = true;
        } else {
          for (std::uint32_t w : comp)
            if (a.accepting[w % nq]) {
              found = true;
              break;
            }
        }
      }
    }
    if (found) break;
  }
  return found;
}

}  // namespace vaprop
