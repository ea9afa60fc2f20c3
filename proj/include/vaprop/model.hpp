// Finite-state models: explicit Kripke structures and compact synchronous
// FSMs compiled to explicit form at load. Variables are booleans or small
// bounded ints bit-blasted into a 64-bit state word.
#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vaprop/formula.hpp"
#include "vaprop/parse.hpp"

namespace vaprop {

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using StateBits = std::uint64_t;

struct VarInfo {
  std::string name;
  int width = 1;
  bool is_int = false;
  bool is_input = false;
  bool is_shadow = false;  // "$past(x)" companion added by augmentation
  int first_bit = 0;
};

// One guarded update; first matching rule wins, no match holds the value.
struct FsmRule {
  FormulaPtr guard;
  FormulaPtr bool_rhs;  // set for bool targets
  TermPtr int_rhs;      // set for int targets
};

struct FsmUpdate {
  std::string var;
  std::vector<FsmRule> rules;
};

struct FsmSpec {
  std::vector<FsmUpdate> updates;
  std::vector<std::string> havoced;  // variables forced nondeterministic
};

struct Lasso {
  std::vector<std::uint32_t> stem;  // may be empty; then loop[0] is initial
  std::vector<std::uint32_t> loop;  // nonempty; loop.back() -> loop[0]

  std::size_t loop_start() const { return stem.size(); }
  std::size_t length() const { return stem.size() + loop.size(); }
  std::uint32_t at(std::size_t i) const {
    return i < stem.size() ? stem[i] : loop[i - stem.size()];
  }
};

class Model {
 public:
  std::string id;
  std::vector<VarInfo> vars;
  std::vector<std::string> bit_names;
  std::vector<StateBits> states;
  std::vector<std::string> state_names;
  std::vector<std::uint32_t> initial;               // sorted, nonempty
  std::vector<std::vector<std::uint32_t>> succ;     // sorted, each nonempty
  std::vector<std::pair<std::uint32_t, std::uint32_t>> deps;  // src influences dst
  // explicit models remember how many states the file declared (stimuli
  // reachability denominator); compiled FSMs construct only reachable states
  int declared_state_count = -1;
  std::optional<FsmSpec> fsm;
  std::vector<std::uint32_t> origin_state;  // augmented model -> source state

  int total_bits() const { return static_cast<int>(bit_names.size()); }

  int var_index(const std::string& name) const {
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (vars[i].name == name) return static_cast<int>(i);
    return -1;
  }

  const VarInfo& var(const std::string& name) const {
    int i = var_index(name);
    if (i < 0) throw ModelError("undeclared variable '" + name + "'");
    return vars[i];
  }

  std::uint64_t value_of(StateBits s, const VarInfo& v) const {
    return (s >> v.first_bit) & ((v.width == 64 ? ~0ull : (1ull << v.width) - 1));
  }

  std::uint64_t value_of(std::uint32_t state, const std::string& name) const {
    return value_of(states[state], var(name));
  }

  static StateBits with_value(StateBits s, const VarInfo& v, std::uint64_t val) {
    std::uint64_t mask = (v.width == 64 ? ~0ull : (1ull << v.width) - 1);
    return (s & ~(mask << v.first_bit)) | ((val & mask) << v.first_bit);
  }

  // --- atom and term evaluation -------------------------------------------

  long long eval_term(const TermPtr& t, StateBits s) const {
    switch (t->kind) {
      case Term::Kind::Num:
        return t->num;
      case Term::Kind::Var:
        return static_cast<long long>(value_of(s, resolve_var(t->var)));
      case Term::Kind::Past:
        return static_cast<long long>(value_of(s, shadow_of(t->var)));
      case Term::Kind::Add:
        return eval_term(t->lhs, s) + eval_term(t->rhs, s);
      case Term::Kind::Sub:
        return eval_term(t->lhs, s) - eval_term(t->rhs, s);
      case Term::Kind::Mul:
        return eval_term(t->lhs, s) * eval_term(t->rhs, s);
      case Term::Kind::Neg:
        return -eval_term(t->lhs, s);
    }
    throw ModelError("bad term");
  }

  bool eval_atom(const std::string& name, StateBits s) const {
    AtomSemantics a = decode_atom(name);
    switch (a.kind) {
      case AtomSemantics::Kind::Var: {
        VarInfo v = resolve_var(a.var);
        if (v.width != 1)
          throw ModelError("atom '" + name +
                           "' is a multi-bit variable; use a comparison");
        return value_of(s, v) != 0;
      }
      case AtomSemantics::Kind::PastVar: {
        const VarInfo& v = shadow_of(a.var);
        if (v.width != 1)
          throw ModelError("atom '" + name +
                           "' is a multi-bit variable; use a comparison");
        return value_of(s, v) != 0;
      }
      case AtomSemantics::Kind::StableVar:
        return value_of(s, resolve_var(a.var)) == value_of(s, shadow_of(a.var));
      case AtomSemantics::Kind::Compare:
        return compare_values(eval_term(a.lhs, s), a.op, eval_term(a.rhs, s));
    }
    throw ModelError("bad atom");
  }

  static bool compare_values(long long l, CmpOp op, long long r) {
    switch (op) {
      case CmpOp::Eq: return l == r;
      case CmpOp::Ne: return l != r;
      case CmpOp::Lt: return l < r;
      case CmpOp::Le: return l <= r;
      case CmpOp::Gt: return l > r;
      case CmpOp::Ge: return l >= r;
    }
    return false;
  }

  // boolean formula over atoms only (guards, disable expressions)
  bool eval_bool(const FormulaPtr& f, StateBits s) const {
    switch (f->kind()) {
      case Kind::Atom: return eval_atom(f->name(), s);
      case Kind::True: return true;
      case Kind::False: return false;
      case Kind::Not: return !eval_bool(f->child(0), s);
      case Kind::And: return eval_bool(f->child(0), s) && eval_bool(f->child(1), s);
      case Kind::Or: return eval_bool(f->child(0), s) || eval_bool(f->child(1), s);
      case Kind::Implies:
        return !eval_bool(f->child(0), s) || eval_bool(f->child(1), s);
      default:
        throw ModelError("temporal operator where a boolean expression is required");
    }
  }

  // "K[1]" resolves to a synthetic 1-bit view into K
  VarInfo resolve_var(const std::string& name) const {
    auto br = name.find('[');
    if (br == std::string::npos) return var(name);
    VarInfo v = var(name.substr(0, br));
    int idx = std::stoi(name.substr(br + 1));
    if (idx >= v.width)
      throw ModelError("bit index out of range in '" + name + "'");
    v.name = name;
    v.first_bit += idx;
    v.width = 1;
    return v;
  }

  const VarInfo& shadow_of(const std::string& name) const {
    int i = var_index("$past(" + name + ")");
    if (i < 0)
      throw ModelError("model not augmented with $past(" + name + ")");
    return vars[i];
  }
};

// ---------------------------------------------------------------------------
// Construction helpers (tests build models programmatically)

class ModelBuilder {
 public:
  void add_bool(const std::string& name, bool is_input = false) {
    add_var(name, 1, false, is_input);
  }

  void add_int(const std::string& name, int width, bool is_input = false) {
    add_var(name, width, true, is_input);
  }

  std::uint32_t add_state(StateBits bits, std::string name = "") {
    if (name.empty()) name = "s" + std::to_string(m_.states.size());
    m_.states.push_back(bits);
    m_.state_names.push_back(std::move(name));
    m_.succ.emplace_back();
    return static_cast<std::uint32_t>(m_.states.size() - 1);
  }

  void add_edge(std::uint32_t from, std::uint32_t to) {
    m_.succ[from].push_back(to);
  }

  void set_initial(std::vector<std::uint32_t> init) { m_.initial = std::move(init); }

  void add_dep(const std::string& src, const std::string& dst) {
    m_.deps.emplace_back(require(src), require(dst));
  }

  Model build() {
    if (m_.initial.empty()) throw ModelError("no initial state");
    std::sort(m_.initial.begin(), m_.initial.end());
    m_.initial.erase(std::unique(m_.initial.begin(), m_.initial.end()),
                     m_.initial.end());
    for (std::size_t s = 0; s < m_.succ.size(); ++s) {
      auto& v = m_.succ[s];
      if (v.empty())
        throw ModelError("non-total transition relation at state '" +
                         m_.state_names[s] + "'");
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    m_.declared_state_count = static_cast<int>(m_.states.size());
    return m_;
  }

 private:
  void add_var(const std::string& name, int width, bool is_int, bool is_input) {
    if (!is_plain_ident(name) || name.find('[') != std::string::npos)
      throw ModelError("bad variable name '" + name + "'");
    if (m_.var_index(name) >= 0)
      throw ModelError("duplicate variable '" + name + "'");
    VarInfo v;
    v.name = name;
    v.width = width;
    v.is_int = is_int;
    v.is_input = is_input;
    v.first_bit = m_.total_bits();
    if (v.first_bit + width > 64) throw ModelError("model exceeds 64 state bits");
    m_.vars.push_back(v);
    if (width == 1 && !is_int) {
      m_.bit_names.push_back(name);
    } else {
      for (int i = 0; i < width; ++i)
        m_.bit_names.push_back(name + "[" + std::to_string(i) + "]");
    }
  }

  std::uint32_t require(const std::string& name) {
    int i = m_.var_index(name);
    if (i < 0) throw ModelError("undeclared variable '" + name + "'");
    return static_cast<std::uint32_t>(i);
  }

  Model m_;
};

// ---------------------------------------------------------------------------
// Queries

inline std::vector<std::uint32_t> reachable_states(const Model& m) {
  std::vector<bool> seen(m.states.size(), false);
  std::vector<std::uint32_t> order;
  std::vector<std::uint32_t> work(m.initial.begin(), m.initial.end());
  for (std::uint32_t s : work) seen[s] = true;
  std::size_t head = 0;
  while (head < work.size()) {
    std::uint32_t s = work[head++];
    order.push_back(s);
    for (std::uint32_t t : m.succ[s])
      if (!seen[t]) {
        seen[t] = true;
        work.push_back(t);
      }
  }
  std::sort(order.begin(), order.end());
  return order;
}

// Variables an atom reads, at the declared-variable level. $past(x) and
// $stable(x) read x (and its shadow when the model carries one).
inline void atom_variables(const Model& m, const std::string& name,
                           std::set<std::uint32_t>& out) {
  AtomSemantics a = decode_atom(name);
  auto add = [&](const std::string& v) {
    std::string base = v.substr(0, v.find('['));
    int i = m.var_index(base);
    if (i < 0) throw ModelError("undeclared variable '" + base + "'");
    out.insert(static_cast<std::uint32_t>(i));
  };
  auto add_term = [&](auto&& self, const TermPtr& t) -> void {
    switch (t->kind) {
      case Term::Kind::Var: add(t->var); break;
      case Term::Kind::Past: {
        add(t->var);
        int sh = m.var_index("$past(" + t->var + ")");
        if (sh >= 0) out.insert(static_cast<std::uint32_t>(sh));
        break;
      }
      case Term::Kind::Num: break;
      default:
        if (t->lhs) self(self, t->lhs);
        if (t->rhs) self(self, t->rhs);
    }
  };
  switch (a.kind) {
    case AtomSemantics::Kind::Var:
      add(a.var);
      break;
    case AtomSemantics::Kind::PastVar:
    case AtomSemantics::Kind::StableVar: {
      add(a.var);
      int sh = m.var_index("$past(" + a.var + ")");
      if (sh >= 0) out.insert(static_cast<std::uint32_t>(sh));
      break;
    }
    case AtomSemantics::Kind::Compare:
      add_term(add_term, a.lhs);
      add_term(add_term, a.rhs);
      break;
  }
}

// Backward closure over dependency edges from the formula's atoms.
inline std::vector<std::uint32_t> cone_of_influence(const Model& m,
                                                    const FormulaPtr& f) {
  std::set<std::uint32_t> cone;
  auto walk = [&](auto&& self, const FormulaPtr& g) -> void {
    if (g->kind() == Kind::Atom) atom_variables(m, g->name(), cone);
    if (g->kind() == Kind::Past1 || g->kind() == Kind::Stable) {
      if (g->child(0)->kind() == Kind::Atom)
        atom_variables(m, "$past(" + g->child(0)->name() + ")", cone);
    }
    for (const auto& c : g->children()) self(self, c);
  };
  walk(walk, f);
  bool grew = true;
  while (grew) {
    grew = false;
    for (auto [src, dst] : m.deps)
      if (cone.count(dst) && !cone.count(src)) {
        cone.insert(src);
        grew = true;
      }
  }
  return {cone.begin(), cone.end()};
}

inline bool lasso_is_valid(const Model& m, const Lasso& l) {
  if (l.loop.empty()) return false;
  for (std::size_t i = 0; i < l.length(); ++i)
    if (l.at(i) >= m.states.size()) return false;
  std::uint32_t first = l.stem.empty() ? l.loop[0] : l.stem[0];
  if (!std::binary_search(m.initial.begin(), m.initial.end(), first)) return false;
  auto connected = [&](std::uint32_t a, std::uint32_t b) {
    return std::binary_search(m.succ[a].begin(), m.succ[a].end(), b);
  };
  for (std::size_t i = 0; i + 1 < l.length(); ++i)
    if (!connected(l.at(i), l.at(i + 1))) return false;
  return connected(l.loop.back(), l.loop[0]);
}

// ---------------------------------------------------------------------------
// Past augmentation: one shadow variable per requested source; shadows follow
// one step behind and start equal to the initial value, so $stable holds on
// the first cycle.

inline Model augment_past(const Model& m, const std::vector<std::string>& vars) {
  std::vector<std::string> need;
  for (const auto& v : vars) {
    m.var(v);  // must exist
    if (m.var_index("$past(" + v + ")") < 0) need.push_back(v);
  }
  std::sort(need.begin(), need.end());
  need.erase(std::unique(need.begin(), need.end()), need.end());
  if (need.empty()) return m;

  Model out;
  out.id = m.id;
  out.vars = m.vars;
  out.bit_names = m.bit_names;
  out.deps = m.deps;
  out.declared_state_count = -1;
  out.fsm = m.fsm;
  std::vector<std::pair<int, VarInfo>> shadows;  // source var idx -> shadow
  for (const auto& name : need) {
    int src = m.var_index(name);
    VarInfo sh = m.vars[src];
    sh.name = "$past(" + name + ")";
    sh.is_shadow = true;
    sh.is_input = false;
    sh.first_bit = out.total_bits();
    if (sh.first_bit + sh.width > 64)
      throw ModelError("model exceeds 64 state bits after augmentation");
    out.vars.push_back(sh);
    if (sh.width == 1 && !sh.is_int) {
      out.bit_names.push_back(sh.name);
    } else {
      for (int i = 0; i < sh.width; ++i)
        out.bit_names.push_back(sh.name + "[" + std::to_string(i) + "]");
    }
    out.deps.emplace_back(static_cast<std::uint32_t>(src),
                          static_cast<std::uint32_t>(out.vars.size() - 1));
    shadows.emplace_back(src, out.vars.back());
  }

  // product of original states with tracked previous values, BFS order
  auto shadow_word = [&](StateBits prev_state) {
    StateBits w = 0;
    for (const auto& [src, sh] : shadows) {
      std::uint64_t val = m.value_of(prev_state, m.vars[src]);
      w |= (val & ((sh.width == 64 ? ~0ull : (1ull << sh.width) - 1)))
           << sh.first_bit;
    }
    return w;
  };

  std::map<std::pair<std::uint32_t, StateBits>, std::uint32_t> index;
  std::vector<std::pair<std::uint32_t, StateBits>> nodes;
  std::vector<int> dup_count(m.states.size(), 0);
  auto intern = [&](std::uint32_t s, StateBits shw) {
    auto key = std::make_pair(s, shw);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    std::uint32_t id = static_cast<std::uint32_t>(nodes.size());
    index.emplace(key, id);
    nodes.push_back(key);
    out.states.push_back(m.states[s] | shw);
    std::string nm = m.state_names[s];
    if (dup_count[s]++ > 0) nm += "#" + std::to_string(dup_count[s] - 1);
    out.state_names.push_back(nm);
    out.origin_state.push_back(s);
    out.succ.emplace_back();
    return id;
  };

  for (std::uint32_t s : m.initial)
    out.initial.push_back(intern(s, shadow_word(m.states[s])));
  for (std::size_t head = 0; head < nodes.size(); ++head) {
    auto [s, shw] = nodes[head];
    StateBits next_shadow = shadow_word(m.states[s]);
    for (std::uint32_t t : m.succ[s]) {
      std::uint32_t id = intern(t, next_shadow);  // may grow out.succ
      out.succ[head].push_back(id);
    }
  }
  for (auto& v : out.succ) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  std::sort(out.initial.begin(), out.initial.end());
  out.initial.erase(std::unique(out.initial.begin(), out.initial.end()),
                    out.initial.end());
  return out;
}

// Past-referenced source variables of a formula (looks inside comparison atoms).
inline std::vector<std::string> past_variables(const FormulaPtr& f) {
  std::set<std::string> out;
  auto scan_term = [&](auto&& self, const TermPtr& t) -> void {
    if (t->kind == Term::Kind::Past) out.insert(t->var);
    if (t->lhs) self(self, t->lhs);
    if (t->rhs) self(self, t->rhs);
  };
  auto walk = [&](auto&& self, const FormulaPtr& g) -> void {
    if (g->kind() == Kind::Past1 || g->kind() == Kind::Stable) {
      if (g->child(0)->kind() == Kind::Atom) out.insert(g->child(0)->name());
    }
    if (g->kind() == Kind::Atom && !is_plain_ident(g->name())) {
      AtomSemantics a = decode_atom(g->name());
      if (a.kind == AtomSemantics::Kind::PastVar ||
          a.kind == AtomSemantics::Kind::StableVar) {
        out.insert(a.var);
      } else if (a.kind == AtomSemantics::Kind::Compare) {
        scan_term(scan_term, a.lhs);
        scan_term(scan_term, a.rhs);
      }
    }
    for (const auto& c : g->children()) self(self, c);
  };
  walk(walk, f);
  return {out.begin(), out.end()};
}

// ---------------------------------------------------------------------------
// FSM compilation: synchronous guarded updates over the current state, inputs
// and havoced variables range over all values each step, everything else
// holds when no rule fires. The relation is total by construction.

namespace detail {

inline constexpr std::size_t kFsmStateCap = 250000;

// free (unconstrained next value) variables: inputs plus havoced
inline std::vector<int> fsm_free_vars(const Model& proto, const FsmSpec& spec) {
  std::vector<int> free_vars;
  for (std::size_t i = 0; i < proto.vars.size(); ++i) {
    bool havoced = std::find(spec.havoced.begin(), spec.havoced.end(),
                             proto.vars[i].name) != spec.havoced.end();
    if (proto.vars[i].is_input || havoced)
      free_vars.push_back(static_cast<int>(i));
  }
  return free_vars;
}

inline std::vector<StateBits> fsm_successors(const Model& proto,
                                             const FsmSpec& spec,
                                             const std::vector<int>& free_vars,
                                             StateBits s) {
  StateBits base = s;
  for (const auto& u : spec.updates) {
    int vi = proto.var_index(u.var);
    if (std::find(free_vars.begin(), free_vars.end(), vi) != free_vars.end())
      continue;
    const VarInfo& v = proto.vars[vi];
    for (const auto& r : u.rules) {
      if (!proto.eval_bool(r.guard, s)) continue;
      std::uint64_t val;
      if (r.int_rhs) {
        long long raw = proto.eval_term(r.int_rhs, s);
        std::uint64_t mask = (v.width == 64 ? ~0ull : (1ull << v.width) - 1);
        val = static_cast<std::uint64_t>(raw) & mask;
      } else {
        val = proto.eval_bool(r.bool_rhs, s) ? 1 : 0;
      }
      base = Model::with_value(base, v, val);
      break;
    }
  }
  std::vector<StateBits> out{base};
  for (int vi : free_vars) {
    const VarInfo& v = proto.vars[vi];
    std::vector<StateBits> next;
    next.reserve(out.size() << v.width);
    for (StateBits b : out)
      for (std::uint64_t val = 0; val < (1ull << v.width); ++val)
        next.push_back(Model::with_value(b, v, val));
    out = std::move(next);
  }
  return out;
}

inline Model compile_fsm(Model proto, const FsmSpec& spec,
                         std::vector<StateBits> init_patterns) {
  std::vector<int> free_vars = fsm_free_vars(proto, spec);
  Model out = std::move(proto);
  out.states.clear();
  out.state_names.clear();
  out.initial.clear();
  out.succ.clear();
  out.fsm = spec;
  out.declared_state_count = -1;

  std::map<StateBits, std::uint32_t> index;
  std::vector<StateBits> order;
  auto intern = [&](StateBits b) {
    auto it = index.find(b);
    if (it != index.end()) return it->second;
    if (order.size() >= kFsmStateCap)
      throw ModelError("resource limit: FSM expands past " +
                       std::to_string(kFsmStateCap) + " states");
    std::uint32_t id = static_cast<std::uint32_t>(order.size());
    index.emplace(b, id);
    order.push_back(b);
    out.states.push_back(b);
    out.state_names.push_back("s" + std::to_string(id));
    out.succ.emplace_back();
    return id;
  };

  std::sort(init_patterns.begin(), init_patterns.end());
  init_patterns.erase(std::unique(init_patterns.begin(), init_patterns.end()),
                      init_patterns.end());
  for (StateBits b : init_patterns) out.initial.push_back(intern(b));
  for (std::size_t head = 0; head < order.size(); ++head) {
    StateBits s = order[head];
    for (StateBits t : fsm_successors(out, spec, free_vars, s)) {
      std::uint32_t id = intern(t);  // may grow out.succ
      out.succ[head].push_back(id);
    }
    std::sort(out.succ[head].begin(), out.succ[head].end());
    out.succ[head].erase(
        std::unique(out.succ[head].begin(), out.succ[head].end()),
        out.succ[head].end());
  }
  std::sort(out.initial.begin(), out.initial.end());
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Havoc: v's next value becomes unconstrained while initial states keep their
// declared v. The dependency graph stays put, so cones are unchanged.

inline Model havoc_variable(const Model& m, const std::string& name) {
  m.var(name);
  if (m.fsm) {
    FsmSpec spec = *m.fsm;
    if (std::find(spec.havoced.begin(), spec.havoced.end(), name) ==
        spec.havoced.end())
      spec.havoced.push_back(name);
    Model proto = m;
    std::vector<StateBits> inits;
    for (std::uint32_t s : m.initial) inits.push_back(m.states[s]);
    Model out = detail::compile_fsm(std::move(proto), spec, std::move(inits));
    return out;
  }

  // Explicit graph: every state grows variants over v's values; an edge
  // s -> t becomes edges from every variant of s to every variant of t.
  const VarInfo v = m.var(name);
  std::uint64_t vals = 1ull << v.width;
  Model out;
  out.id = m.id;
  out.vars = m.vars;
  out.bit_names = m.bit_names;
  out.deps = m.deps;
  out.declared_state_count = m.declared_state_count;

  std::map<StateBits, std::uint32_t> index;
  auto intern = [&](StateBits b, const std::string& base_name) {
    auto it = index.find(b);
    if (it != index.end()) return it->second;
    std::uint32_t id = static_cast<std::uint32_t>(out.states.size());
    index.emplace(b, id);
    out.states.push_back(b);
    out.state_names.push_back(base_name + "/" +
                              std::to_string(m.value_of(b, v)));
    out.succ.emplace_back();
    return id;
  };
  // a variant matching a declared valuation steps exactly as that state, so
  // v stays readable by the others; variants the file never declared fall
  // back to any original agreeing on the non-v bits
  std::map<StateBits, std::vector<std::uint32_t>> exact, proj;
  auto project = [&](StateBits b) { return Model::with_value(b, v, 0); };
  for (std::uint32_t s = 0; s < m.states.size(); ++s) {
    exact[m.states[s]].push_back(s);
    proj[project(m.states[s])].push_back(s);
  }

  for (std::uint32_t s = 0; s < m.states.size(); ++s)
    for (std::uint64_t val = 0; val < vals; ++val)
      intern(Model::with_value(m.states[s], v, val), m.state_names[s]);
  for (auto& [bits, id] : index) {
    auto ex = exact.find(bits);
    const std::vector<std::uint32_t>& srcs =
        ex != exact.end() ? ex->second : proj.at(project(bits));
    std::set<std::uint32_t> outgoing;
    for (std::uint32_t src : srcs)
      for (std::uint32_t t : m.succ[src])
        for (std::uint64_t val = 0; val < vals; ++val)
          outgoing.insert(index.at(Model::with_value(m.states[t], v, val)));
    out.succ[id].assign(outgoing.begin(), outgoing.end());
  }
  for (std::uint32_t s : m.initial)
    out.initial.push_back(index.at(m.states[s]));
  std::sort(out.initial.begin(), out.initial.end());
  out.initial.erase(std::unique(out.initial.begin(), out.initial.end()),
                    out.initial.end());
  return out;
}

// ---------------------------------------------------------------------------
// Loading

namespace detail {

inline const nlohmann::json& field(const nlohmann::json& j, const char* key,
                                   const std::string& where) {
  auto it = j.is_object() ? j.find(key) : j.end();
  if (it == j.end())
    throw ModelError(std::string("model: missing '") + key + "' in " + where);
  return *it;
}

}  // namespace detail

inline Model load_model(const nlohmann::json& j, bool complete_selfloop = false) {
  using nlohmann::json;
  if (!j.is_object()) throw ModelError("model: document is not an object");
  std::string kind = detail::field(j, "kind", "document").get<std::string>();
  if (kind != "explicit" && kind != "fsm")
    throw ModelError("model: kind must be 'explicit' or 'fsm'");

  struct Decl {
    std::string name;
    int width;
    bool is_int;
    bool is_input;
    bool has_init;
    std::uint64_t init;
  };
  std::vector<Decl> decls;
  for (const auto& v : detail::field(j, "vars", "document")) {
    Decl d;
    d.name = detail::field(v, "name", "vars").get<std::string>();
    std::string type = v.value("type", "bool");
    d.is_input = v.value("input", false);
    d.is_int = type == "int";
    if (type != "bool" && type != "int")
      throw ModelError("model: variable '" + d.name + "' has unknown type '" +
                       type + "'");
    d.width = d.is_int ? v.value("width", 0) : 1;
    if (d.is_int && (d.width < 1 || d.width > 16))
      throw ModelError("model: variable '" + d.name +
                       "' needs a width in 1..16");
    d.has_init = v.contains("init");
    d.init = 0;
    if (d.has_init) {
      const auto& iv = v["init"];
      if (iv.is_boolean())
        d.init = iv.get<bool>() ? 1 : 0;
      else
        d.init = iv.get<std::uint64_t>();
      if (d.width < 64 && d.init >= (1ull << d.width))
        throw ModelError("model: init value out of range for '" + d.name + "'");
    }
    decls.push_back(d);
  }

  // variable layout shared by both forms
  auto make_builder = [&] {
    ModelBuilder nb;
    for (const auto& d : decls) {
      if (d.is_int)
        nb.add_int(d.name, d.width, d.is_input);
      else
        nb.add_bool(d.name, d.is_input);
    }
    return nb;
  };

  if (kind == "explicit") {
    ModelBuilder real = make_builder();
    // var layout probe for value packing
    const std::vector<VarInfo> layout = [&] {
      ModelBuilder probe = make_builder();
      probe.add_state(0);
      probe.set_initial({0});
      probe.add_edge(0, 0);
      return probe.build().vars;
    }();
    auto layout_index = [&](const std::string& n) -> int {
      for (std::size_t i = 0; i < layout.size(); ++i)
        if (layout[i].name == n) return static_cast<int>(i);
      return -1;
    };

    std::map<std::string, std::uint32_t> ids;
    for (const auto& s : detail::field(j, "states", "document")) {
      std::string name = detail::field(s, "name", "states").get<std::string>();
      const auto& assign = detail::field(s, "assign", "state '" + name + "'");
      StateBits bits = 0;
      for (const auto& v : layout) {
        auto it = assign.find(v.name);
        if (it == assign.end())
          throw ModelError("model: state '" + name + "' does not assign '" +
                           v.name + "'");
        std::uint64_t val = it->is_boolean() ? (it->get<bool>() ? 1 : 0)
                                             : it->get<std::uint64_t>();
        if (v.width < 64 && val >= (1ull << v.width))
          throw ModelError("model: value out of range for '" + v.name +
                           "' in state '" + name + "'");
        bits = Model::with_value(bits, v, val);
      }
      for (const auto& [k, unused] : assign.items()) {
        (void)unused;
        if (layout_index(k) < 0)
          throw ModelError("undeclared variable '" + k + "' in state '" +
                           name + "'");
      }
      if (ids.count(name))
        throw ModelError("model: duplicate state '" + name + "'");
      ids[name] = real.add_state(bits, name);
    }
    auto state_id = [&](const std::string& n) {
      auto it = ids.find(n);
      if (it == ids.end()) throw ModelError("model: unknown state '" + n + "'");
      return it->second;
    };
    std::vector<std::uint32_t> init;
    for (const auto& s : detail::field(j, "init", "document"))
      init.push_back(state_id(s.get<std::string>()));
    real.set_initial(init);
    std::vector<bool> has_succ(ids.size(), false);
    for (const auto& e : detail::field(j, "edges", "document")) {
      if (!e.is_array() || e.size() != 2)
        throw ModelError("model: each edge must be [from, to]");
      std::uint32_t from = state_id(e[0].get<std::string>());
      real.add_edge(from, state_id(e[1].get<std::string>()));
      has_succ[from] = true;
    }
    if (complete_selfloop)
      for (std::uint32_t s = 0; s < has_succ.size(); ++s)
        if (!has_succ[s]) real.add_edge(s, s);
    for (const auto& d : j.value("deps", json::array()))
      real.add_dep(d[0].get<std::string>(), d[1].get<std::string>());
    Model m = real.build();
    m.id = j.value("name", "model");
    return m;
  }

  // FSM form
  Model proto = [&] {
    ModelBuilder probe = make_builder();
    probe.add_state(0);
    probe.set_initial({0});
    probe.add_edge(0, 0);
    Model m = probe.build();
    m.states.clear();
    m.state_names.clear();
    m.initial.clear();
    m.succ.clear();
    return m;
  }();
  proto.id = j.value("name", "model");

  FsmSpec spec;
  for (const auto& u : j.value("next", json::array())) {
    FsmUpdate upd;
    upd.var = detail::field(u, "var", "next").get<std::string>();
    const VarInfo& v = proto.var(upd.var);
    if (v.is_input)
      throw ModelError("model: input '" + upd.var + "' cannot have update rules");
    for (const auto& r : detail::field(u, "rules", "next '" + upd.var + "'")) {
      FsmRule rule;
      try {
        rule.guard = parse_guard(detail::field(r, "if", "rule").get<std::string>());
        std::string rhs = detail::field(r, "then", "rule").get<std::string>();
        if (v.is_int)
          rule.int_rhs = parse_term(rhs);
        else
          rule.bool_rhs = parse_guard(rhs);
      } catch (const ParseError& e) {
        throw ModelError("model: in update rule for '" + upd.var + "': " +
                         e.what());
      }
      upd.rules.push_back(std::move(rule));
    }
    spec.updates.push_back(std::move(upd));
  }
  // guards and right-hand sides may only read declared variables, no $past
  for (const auto& u : spec.updates)
    for (const auto& r : u.rules) {
      std::vector<std::string> pv = past_variables(r.guard);
      if (r.bool_rhs) {
        auto more = past_variables(r.bool_rhs);
        pv.insert(pv.end(), more.begin(), more.end());
      }
      auto check_term = [&](auto&& self, const TermPtr& t) -> void {
        if (!t) return;
        if (t->kind == Term::Kind::Past)
          throw ModelError("model: $past is not allowed in update rules");
        if (t->kind == Term::Kind::Var) proto.var(t->var);
        self(self, t->lhs);
        self(self, t->rhs);
      };
      if (r.int_rhs) check_term(check_term, r.int_rhs);
      if (!pv.empty())
        throw ModelError("model: $past is not allowed in update rules");
      std::set<std::uint32_t> used;
      auto walk = [&](auto&& self, const FormulaPtr& g) -> void {
        if (g->kind() == Kind::Atom) atom_variables(proto, g->name(), used);
        for (const auto& c : g->children()) self(self, c);
      };
      walk(walk, r.guard);
      if (r.bool_rhs) walk(walk, r.bool_rhs);
    }

  // initial patterns: declared inits, inputs without one range over all values
  std::vector<StateBits> inits{0};
  for (std::size_t i = 0; i < decls.size(); ++i) {
    const Decl& d = decls[i];
    const VarInfo& v = proto.vars[i];
    std::vector<StateBits> next;
    if (d.has_init || !d.is_input) {
      for (StateBits b : inits) next.push_back(Model::with_value(b, v, d.init));
    } else {
      for (StateBits b : inits)
        for (std::uint64_t val = 0; val < (1ull << v.width); ++val)
          next.push_back(Model::with_value(b, v, val));
    }
    inits = std::move(next);
  }

  // derived dependencies: guard and rhs variables feed the target; a held
  // variable feeds itself
  std::set<std::pair<std::uint32_t, std::uint32_t>> dep_set;
  for (const auto& u : spec.updates) {
    std::uint32_t dst = static_cast<std::uint32_t>(proto.var_index(u.var));
    dep_set.emplace(dst, dst);
    for (const auto& r : u.rules) {
      std::set<std::uint32_t> srcs;
      auto walk = [&](auto&& self, const FormulaPtr& g) -> void {
        if (g->kind() == Kind::Atom) atom_variables(proto, g->name(), srcs);
        for (const auto& c : g->children()) self(self, c);
      };
      walk(walk, r.guard);
      if (r.bool_rhs) walk(walk, r.bool_rhs);
      auto walk_term = [&](auto&& self, const TermPtr& t) -> void {
        if (!t) return;
        if (t->kind == Term::Kind::Var)
          srcs.insert(static_cast<std::uint32_t>(proto.var_index(t->var)));
        self(self, t->lhs);
        self(self, t->rhs);
      };
      if (r.int_rhs) walk_term(walk_term, r.int_rhs);
      for (std::uint32_t src : srcs) dep_set.emplace(src, dst);
    }
  }
  for (std::size_t i = 0; i < proto.vars.size(); ++i)
    if (!proto.vars[i].is_input) {
      bool updated = false;
      for (const auto& u : spec.updates) updated |= u.var == proto.vars[i].name;
      if (!updated)
        dep_set.emplace(static_cast<std::uint32_t>(i),
                        static_cast<std::uint32_t>(i));
    }
  for (const auto& d : j.value("deps", json::array())) {
    int src = proto.var_index(d[0].get<std::string>());
    int dst = proto.var_index(d[1].get<std::string>());
    if (src < 0 || dst < 0)
      throw ModelError("model: deps reference an undeclared variable");
    dep_set.emplace(static_cast<std::uint32_t>(src),
                    static_cast<std::uint32_t>(dst));
  }
  proto.deps.assign(dep_set.begin(), dep_set.end());

  return detail::compile_fsm(std::move(proto), spec, std::move(inits));
}

inline Model load_model_file(const std::string& path,
                             bool complete_selfloop = false) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError("model '" + path + "': " + e.what());
  }
  Model m = load_model(j, complete_selfloop);
  if (m.id == "model") {
    auto slash = path.find_last_of('/');
    std::string stem = slash == std::string::npos ? path : path.substr(slash + 1);
    auto dot = stem.find_last_of('.');
    m.id = dot == std::string::npos ? stem : stem.substr(0, dot);
  }
  return m;
}

}  // namespace vaprop
