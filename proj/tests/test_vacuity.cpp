#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>
#include <vector>

#include "generators.hpp"
#include "vaprop/print.hpp"
#include "vaprop/vacuity.hpp"

using namespace vaprop;

namespace {

Model load(const std::string& text) {
  return load_model(nlohmann::json::parse(text));
}

// p and q never hold: the implication antecedent is never enabled
Model never_p() {
  return load(R"json({
    "kind": "explicit",
    "name": "never-p",
    "vars": [{"name": "p", "type": "bool"}, {"name": "q", "type": "bool"}],
    "states": [
      {"name": "a", "assign": {"p": false, "q": false}},
      {"name": "b", "assign": {"p": false, "q": false}}
    ],
    "init": ["a"],
    "edges": [["a", "b"], ["b", "a"], ["b", "b"]]
  })json");
}

// p occurs once, q follows, and one branch then starves q forever; every
// occurrence of G (p -> F q) matters here
Model live_pq() {
  return load(R"json({
    "kind": "explicit",
    "name": "live-pq",
    "vars": [{"name": "p", "type": "bool"}, {"name": "q", "type": "bool"}],
    "states": [
      {"name": "s0", "assign": {"p": true,  "q": false}},
      {"name": "s1", "assign": {"p": false, "q": true}},
      {"name": "s2", "assign": {"p": false, "q": false}}
    ],
    "init": ["s0"],
    "edges": [["s0", "s1"], ["s1", "s1"], ["s1", "s2"], ["s2", "s2"]]
  })json");
}

const OccurrenceCheck* find_single(const VacuityReport& r,
                                   const std::vector<std::uint32_t>& path) {
  for (const auto& rec : r.occurrences)
    if (!rec.simultaneous && rec.paths[0].path == path) return &rec;
  return nullptr;
}

}  // namespace

TEST_CASE("affects: never-enabled antecedent makes the consequent irrelevant") {
  Model m = never_p();
  FormulaPtr f = parse_property("G (p -> F q)");
  auto occs = occurrences(f);
  REQUIRE(occs.size() == 4);  // p->Fq, p, F q, q in preorder

  AffectsResult fq = affects(m, f, occs[2]);  // F q
  CHECK(fq.sat_under_true);   // G (p -> true)
  CHECK(fq.sat_under_false);  // G !p, and p never holds
  CHECK(!fq.affects);

  AffectsResult p = affects(m, f, occs[1]);
  CHECK(!p.sat_under_true);  // G (true -> F q) = G F q, but q never holds
  CHECK(p.sat_under_false);  // G (false -> F q) = true
  CHECK(p.affects);
}

TEST_CASE("affects: satisfied antecedent makes the consequent matter") {
  Model m = load(R"json({
    "kind": "explicit",
    "vars": [{"name": "p", "type": "bool"}, {"name": "q", "type": "bool"}],
    "states": [{"name": "s", "assign": {"p": true, "q": true}}],
    "init": ["s"],
    "edges": [["s", "s"]]
  })json");
  FormulaPtr f = parse_property("G (p -> F q)");
  AffectsResult fq = affects(m, f, occurrences(f)[2]);
  CHECK(fq.sat_under_true);
  CHECK(!fq.sat_under_false);  // G !p fails on the {p,q} state
  CHECK(fq.affects);
}

TEST_CASE("affects: agreement with the replacement-function oracle") {
  // Theorem-level definition, brute forced: an atom occurrence does not
  // affect satisfaction iff replacing it by every state-indexed boolean
  // function leaves the verdict unchanged. Models are small enough to try
  // all 2^|S| functions.
  testgen::ModelGen mg(7311);
  int checked = 0, non_affecting_seen = 0;
  for (int iter = 0; iter < 80; ++iter) {
    Model m = mg.gen(2 + iter % 2, {"p", "q"});
    testgen::FormulaGen fg(880 + iter);
    fg.atoms = {"p", "q"};
    fg.with_const = false;
    FormulaPtr f = fg.gen(3);
    bool base = check(m, f).holds;

    for (const auto& occ : occurrences(f)) {
      if (resolve(f, occ)->kind() != Kind::Atom) continue;
      FormulaPtr probed = substitute_at(f, occ, atom("z"));
      bool all_same = true;
      for (std::uint32_t fn = 0; fn < (1u << m.states.size()); ++fn) {
        ModelBuilder b;
        b.add_bool("p");
        b.add_bool("q");
        b.add_bool("z");
        for (std::size_t s = 0; s < m.states.size(); ++s)
          b.add_state(m.states[s] | (((fn >> s) & 1ull) << 2));
        for (std::size_t s = 0; s < m.states.size(); ++s)
          for (std::uint32_t t : m.succ[s])
            b.add_edge(static_cast<std::uint32_t>(s), t);
        b.set_initial(m.initial);
        if (check(b.build(), probed).holds != base) {
          all_same = false;
          break;
        }
      }
      AffectsResult a = affects(m, f, occ);
      if (a.affects == all_same) {
        CAPTURE(pretty_print(f), iter, occ.path);
        REQUIRE(a.affects != all_same);
      }
      ++checked;
      if (!a.affects) ++non_affecting_seen;
    }
  }
  CHECK(checked > 100);
  CHECK(non_affecting_seen > 5);  // both outcomes exercised
}

TEST_CASE("check_vacuity: never-enabled antecedent is vacuous") {
  Model m = never_p();
  FormulaPtr f = parse_property("G (p -> F q)");
  VacuityReport r = check_vacuity(m, f);
  CHECK(r.holds);
  CHECK(r.verdict == VacuityVerdict::Vacuous);
  CHECK(r.model_id == "never-p");
  REQUIRE(r.occurrences.size() == 4);  // no repeated subformulas, no groups

  const OccurrenceCheck* fq = find_single(r, {0, 1});
  REQUIRE(fq);
  CHECK(!fq->affects);  // the consequent occurrence does not affect
  const OccurrenceCheck* q = find_single(r, {0, 1, 0});
  REQUIRE(q);
  CHECK(!q->affects);
  const OccurrenceCheck* p = find_single(r, {0, 0});
  REQUIRE(p);
  CHECK(p->affects);
  const OccurrenceCheck* imp = find_single(r, {0});
  REQUIRE(imp);
  CHECK(imp->affects);

  // vacuously satisfied: no interesting witness anywhere in the model
  CHECK(!r.witness.has_value());
  CHECK(!interesting_witness(m, f).has_value());
  FormulaPtr w = witness_formula(f);
  enumerate_lassos(m, 4, 4, [&](const Lasso& l) {
    CHECK(!eval_on_lasso(m, w, l));
    return true;
  });

  // consistency of the report invariants
  for (std::size_t i : r.non_affecting) CHECK(!r.occurrences[i].affects);
  for (const auto& rec : r.occurrences)
    CHECK(rec.affects == (rec.sat_under_true != rec.sat_under_false));
}

TEST_CASE("check_vacuity: live model is non-vacuous with a witness") {
  Model m = live_pq();
  FormulaPtr f = parse_property("G (p -> F q)");
  REQUIRE(check(m, f).holds);
  VacuityReport r = check_vacuity(m, f);
  CHECK(r.verdict == VacuityVerdict::NonVacuous);
  CHECK(r.non_affecting.empty());
  for (const auto& rec : r.occurrences) CHECK(rec.affects);

  REQUIRE(r.witness.has_value());
  const Lasso& w = *r.witness;
  CHECK(lasso_is_valid(m, w));
  CHECK(eval_on_lasso(m, f, w));
  CHECK(eval_on_lasso(m, witness_formula(f), w));
}

TEST_CASE("check_vacuity: two states suffice for a fully relevant property") {
  // A carries both the trigger and the payoff; B starves q, so forcing the
  // antecedent true breaks the property and every occurrence matters
  Model m = load(R"json({
    "kind": "explicit",
    "vars": [{"name": "p", "type": "bool"}, {"name": "q", "type": "bool"}],
    "states": [
      {"name": "A", "assign": {"p": true, "q": true}},
      {"name": "B", "assign": {"p": false, "q": false}}
    ],
    "init": ["A"],
    "edges": [["A", "B"], ["B", "B"]]
  })json");
  FormulaPtr f = parse_property("G (p -> F q)");
  VacuityReport r = check_vacuity(m, f);
  CHECK(r.holds);
  CHECK(r.verdict == VacuityVerdict::NonVacuous);
  for (const auto& rec : r.occurrences) CHECK(rec.affects);
  REQUIRE(r.witness.has_value());
  CHECK(eval_on_lasso(m, witness_formula(f), *r.witness));
}

TEST_CASE("check_vacuity: failing property reports fails, nothing else") {
  Model m = live_pq();
  FormulaPtr f = parse_property("G q");
  VacuityReport r = check_vacuity(m, f);
  CHECK(!r.holds);
  CHECK(r.verdict == VacuityVerdict::Fails);
  CHECK(r.occurrences.empty());
  CHECK(r.non_affecting.empty());
  CHECK(!r.witness.has_value());
}

TEST_CASE("check_vacuity: stuck counter satisfies the decrement rule vacuously") {
  // validCounter never exceeds 1, so the antecedent never fires and the
  // consequent side carries no weight
  Model m = load(R"json({
    "kind": "explicit",
    "name": "stuck",
    "vars": [{"name": "validCounter", "type": "int", "width": 3}],
    "states": [
      {"name": "z", "assign": {"validCounter": 0}},
      {"name": "o", "assign": {"validCounter": 1}}
    ],
    "init": ["z"],
    "edges": [["z", "o"], ["o", "z"], ["o", "o"]]
  })json");
  FormulaPtr f = parse_property(
      "(validCounter > 1) |=> (validCounter == $past(validCounter) - 1)");
  VacuityReport r = check_vacuity(m, f);
  CHECK(r.holds);
  CHECK(r.verdict == VacuityVerdict::Vacuous);
  // occurrences: implication, antecedent, X consequent, consequent
  const OccurrenceCheck* next_cons = find_single(r, {0, 1});
  REQUIRE(next_cons);
  CHECK(!next_cons->affects);  // G !(validCounter > 1) holds on this model
  const OccurrenceCheck* ante = find_single(r, {0, 0});
  REQUIRE(ante);
  CHECK(ante->affects);  // forcing it true demands an impossible decrement
  CHECK(!r.witness.has_value());

  // a counter that really counts down from above the threshold is non-vacuous
  Model live = load(R"json({
    "kind": "explicit",
    "name": "live-counter",
    "vars": [{"name": "validCounter", "type": "int", "width": 3}],
    "states": [
      {"name": "c2", "assign": {"validCounter": 2}},
      {"name": "c1", "assign": {"validCounter": 1}},
      {"name": "c0", "assign": {"validCounter": 0}}
    ],
    "init": ["c2"],
    "edges": [["c2", "c1"], ["c1", "c0"], ["c0", "c0"]]
  })json");
  VacuityReport rl = check_vacuity(live, f);
  CHECK(rl.holds);
  CHECK(rl.verdict == VacuityVerdict::NonVacuous);
  REQUIRE(rl.witness.has_value());
  CHECK(eval_on_lasso(live, f, *rl.witness));
}

TEST_CASE("check_vacuity: repeated subformulas get a simultaneous record") {
  // G (p || !p) is a tautology; each single occurrence of p affects on a
  // model where p varies, but substituting both at once never changes
  // anything, which is what flags the vacuity
  Model m = load(R"json({
    "kind": "explicit",
    "vars": [{"name": "p", "type": "bool"}],
    "states": [
      {"name": "s0", "assign": {"p": true}},
      {"name": "s1", "assign": {"p": false}}
    ],
    "init": ["s0"],
    "edges": [["s0", "s1"], ["s1", "s0"]]
  })json");
  FormulaPtr f = parse_property("G (p || !p)");
  VacuityReport r = check_vacuity(m, f);
  CHECK(r.holds);
  CHECK(r.verdict == VacuityVerdict::Vacuous);

  const OccurrenceCheck* group = nullptr;
  for (const auto& rec : r.occurrences)
    if (rec.simultaneous) {
      REQUIRE(group == nullptr);  // exactly one repeated subformula: p
      group = &rec;
    }
  REQUIRE(group);
  REQUIRE(group->paths.size() == 2);
  CHECK(group->paths[0].path == std::vector<std::uint32_t>{0, 0});
  CHECK(group->paths[1].path == std::vector<std::uint32_t>{0, 1, 0});
  CHECK(group->sat_under_true);   // G (true || !true)
  CHECK(group->sat_under_false);  // G (false || !false)
  CHECK(!group->affects);

  // every plain occurrence of p does affect here
  for (const auto& rec : r.occurrences)
    if (!rec.simultaneous && resolve(f, rec.paths[0])->kind() == Kind::Atom)
      CHECK(rec.affects);
}

TEST_CASE("check_vacuity: all-occurrences mode adds proper subsets") {
  Model m = load(R"json({
    "kind": "explicit",
    "vars": [{"name": "p", "type": "bool"}],
    "states": [{"name": "s", "assign": {"p": true}}],
    "init": ["s"],
    "edges": [["s", "s"]]
  })json");
  // three occurrences of p
  FormulaPtr f = parse_property("p && (p && p)");
  VacuityReport single = check_vacuity(m, f, VacuityMode::SingleOccurrence);
  VacuityReport all = check_vacuity(m, f, VacuityMode::AllOccurrences);

  auto count_groups = [](const VacuityReport& r) {
    int n = 0;
    for (const auto& rec : r.occurrences)
      if (rec.simultaneous) ++n;
    return n;
  };
  CHECK(count_groups(single) == 1);  // the full group only
  CHECK(count_groups(all) == 4);     // full group + three 2-subsets

  // cap: a formula with 13 occurrences of p is rejected in subset mode
  FormulaPtr big = atom("p");
  for (int i = 0; i < 12; ++i) big = mk_and(big, atom("p"));
  CHECK_NOTHROW(check_vacuity(m, big, VacuityMode::SingleOccurrence));
  CHECK_THROWS_AS(check_vacuity(m, big, VacuityMode::AllOccurrences),
                  VacuityError);
}

TEST_CASE("interesting_witness: atom property on a single labeled state") {
  Model m = load(R"json({
    "kind": "explicit",
    "vars": [{"name": "p", "type": "bool"}],
    "states": [{"name": "s", "assign": {"p": true}}],
    "init": ["s"],
    "edges": [["s", "s"]]
  })json");
  auto w = interesting_witness(m, atom("p"));
  REQUIRE(w.has_value());
  CHECK(lasso_is_valid(m, *w));
  CHECK(eval_on_lasso(m, atom("p"), *w));
  CHECK(w->loop == std::vector<std::uint32_t>{0});
}

TEST_CASE("vacuity report invariants over random inputs") {
  testgen::ModelGen mg(9617);
  int vac = 0, nonvac = 0, fails = 0;
  for (int iter = 0; iter < 60; ++iter) {
    Model m = mg.gen(2 + iter % 3, {"p", "q"});
    testgen::FormulaGen fg(31 + iter);
    fg.atoms = {"p", "q"};
    FormulaPtr f = fg.gen(3);
    if (occurrences(f).size() > 6) continue;  // keep the check count sane
    VacuityReport r = check_vacuity(m, f);

    if (r.verdict == VacuityVerdict::Fails) {
      ++fails;
      CHECK(!r.holds);
      CHECK(r.occurrences.empty());
      // monotonicity still binds affects() on failing properties: the
      // strengthening substitution cannot rescue a failing formula
      for (const auto& occ : occurrences(f)) {
        AffectsResult a = affects(m, f, occ);
        if (occ.polarity == Polarity::Positive)
          CHECK(!a.sat_under_false);
        else
          CHECK(!a.sat_under_true);
      }
      continue;
    }
    CHECK(r.holds);
    bool any_na = !r.non_affecting.empty();
    CHECK((r.verdict == VacuityVerdict::Vacuous) == any_na);
    (r.verdict == VacuityVerdict::Vacuous ? vac : nonvac)++;

    for (const auto& rec : r.occurrences) {
      CHECK(rec.affects == (rec.sat_under_true != rec.sat_under_false));
      // sandwich direction for a satisfied formula: weakening a pure
      // occurrence must keep it satisfied (groups can mix polarities)
      if (!rec.simultaneous) {
        if (rec.paths[0].polarity == Polarity::Positive)
          CHECK(rec.sat_under_true);
        else
          CHECK(rec.sat_under_false);
      }
    }

    // any witness produced is a genuine one; existence is only guaranteed
    // on the curated fixtures, not on arbitrary random models
    if (r.witness.has_value()) {
      CHECK(lasso_is_valid(m, *r.witness));
      CHECK(eval_on_lasso(m, f, *r.witness));
      CHECK(eval_on_lasso(m, witness_formula(f), *r.witness));
    }
  }
  CHECK(vac > 3);
  CHECK(nonvac > 3);
  CHECK(fails > 3);
}
