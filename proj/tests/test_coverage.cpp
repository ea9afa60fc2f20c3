#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>
#include <vector>

#include "generators.hpp"
#include "vaprop/coverage.hpp"
#include "vaprop/parse.hpp"

using namespace vaprop;

namespace {

Model load(const std::string& text) {
  return load_model(nlohmann::json::parse(text));
}

}  // namespace

TEST_CASE("checker coverage: one cone over a four-variable model") {
  Model m = load(R"json({
    "kind": "explicit",
    "vars": [{"name": "p"}, {"name": "q"}, {"name": "r"}, {"name": "s"}],
    "states": [{"name": "a", "assign": {"p": true, "q": true, "r": false, "s": false}}],
    "init": ["a"],
    "edges": [["a", "a"]]
  })json");
  CheckerCoverage c = checker_coverage(m, {parse_property("G q")});
  CHECK(c.coi_percent == 25.0);
  REQUIRE(c.per_property.size() == 1);
  CHECK(c.per_property[0].coi == std::vector<std::string>{"q"});
  CHECK(c.per_property[0].proof_core == std::vector<std::string>{"q"});
  CHECK(c.proof_core_percent == 25.0);
  CHECK(c.uncovered == std::vector<std::string>{"p", "r", "s"});
}

TEST_CASE("checker coverage: dependency edges widen the cone, not the core") {
  // q is constantly true whatever p does, so havocking p keeps the proof;
  // the declared p -> q dependency still pulls p into the cone
  const char* base = R"json({
    "kind": "explicit",
    "vars": [{"name": "p"}, {"name": "q"}],
    "states": [{"name": "a", "assign": {"p": false, "q": true}},
               {"name": "b", "assign": {"p": true, "q": true}}],
    "init": ["a"],
    "edges": [["a", "b"], ["b", "a"]]%s
  })json";
  Model plain = load(std::string(base).replace(std::string(base).find("%s"), 2, ""));
  Model with_dep = load(std::string(base).replace(std::string(base).find("%s"), 2,
                                                  R"(, "deps": [["p", "q"]])"));
  FormulaPtr f = parse_property("G q");

  CheckerCoverage c0 = checker_coverage(plain, {f});
  CHECK(c0.per_property[0].coi == std::vector<std::string>{"q"});
  CHECK(c0.coi_percent == 50.0);

  CheckerCoverage c1 = checker_coverage(with_dep, {f});
  CHECK(c1.per_property[0].coi == std::vector<std::string>{"p", "q"});
  CHECK(c1.coi_percent == 100.0);
  CHECK(c1.per_property[0].proof_core == std::vector<std::string>{"q"});
  CHECK(c1.proof_core_percent == 50.0);
  CHECK(c1.uncovered.empty());
}

TEST_CASE("checker coverage: rejects properties that do not hold") {
  Model m = load(R"json({
    "kind": "explicit",
    "vars": [{"name": "p"}],
    "states": [{"name": "a", "assign": {"p": false}}],
    "init": ["a"],
    "edges": [["a", "a"]]
  })json");
  CHECK_THROWS_AS(checker_coverage(m, {parse_property("G p")}), CoverageError);
}

TEST_CASE("checker coverage: fsm counter depends on its own updates") {
  Model m = load(R"json({
    "kind": "fsm",
    "vars": [{"name": "K", "type": "int", "width": 3, "init": 0}],
    "next": [{"var": "K", "rules": [
      {"if": "K == 5", "then": "0"},
      {"if": "true", "then": "K + 1"}
    ]}]
  })json");
  FormulaPtr f = parse_property("G (K <= 5)");
  REQUIRE(check(m, f).holds);
  CheckerCoverage c = checker_coverage(m, {f});
  // havocked K ranges over 0..7 and breaks the bound
  CHECK(c.per_property[0].proof_core == std::vector<std::string>{"K"});
  CHECK(c.coi_percent == 100.0);
  CHECK(c.proof_core_percent == 100.0);
}

TEST_CASE("proof core agrees with the exhaustive havoc-subset oracle") {
  // Flip sets must grow monotonically as more variables are havocked, and
  // the reported core must be exactly the cone members whose solo havoc
  // breaks the property.
  std::vector<std::string> vars = {"u", "v", "w", "x"};
  testgen::ModelGen mg(40121);
  int oracles = 0, core_hits = 0, cone_only = 0;
  for (int iter = 0; iter < 120 && oracles < 30; ++iter) {
    Model m = mg.gen(2 + iter % 3, vars);
    testgen::FormulaGen fg(500 + iter);
    fg.atoms = {"u", "v", "w"};
    fg.with_const = false;
    FormulaPtr f = fg.gen(2);
    if (!check(m, f).holds) continue;
    ++oracles;

    std::vector<bool> flips(1u << vars.size());
    for (std::uint32_t mask = 0; mask < flips.size(); ++mask) {
      Model h = m;
      for (std::size_t i = 0; i < vars.size(); ++i)
        if (mask & (1u << i)) h = havoc_variable(h, vars[i]);
      flips[mask] = !check(h, f).holds;
    }
    CHECK(!flips[0]);
    for (std::uint32_t mask = 0; mask < flips.size(); ++mask)
      for (std::size_t i = 0; i < vars.size(); ++i)
        if (!(mask & (1u << i)) && flips[mask])
          CHECK(flips[mask | (1u << i)]);

    CheckerCoverage c = checker_coverage(m, {f});
    const PropertyCoverage& pc = c.per_property[0];
    for (const std::string& name : pc.coi) {
      std::size_t i = std::find(vars.begin(), vars.end(), name) - vars.begin();
      bool in_core = std::find(pc.proof_core.begin(), pc.proof_core.end(),
                               name) != pc.proof_core.end();
      CHECK(in_core == flips[1u << i]);
      if (in_core)
        ++core_hits;
      else
        ++cone_only;
    }
    // core stays within the cone
    for (const std::string& name : pc.proof_core)
      CHECK(std::find(pc.coi.begin(), pc.coi.end(), name) != pc.coi.end());
  }
  CHECK(oracles >= 20);
  CHECK(core_hits > 4);
  CHECK(cone_only > 4);
}

TEST_CASE("stimuli coverage: constant one-state model") {
  Model m = load(R"json({
    "kind": "explicit",
    "vars": [{"name": "p"}, {"name": "q"}],
    "states": [{"name": "a", "assign": {"p": true, "q": false}}],
    "init": ["a"],
    "edges": [["a", "a"]]
  })json");
  StimuliCoverage s = stimuli_coverage(m);
  CHECK(s.toggle_percent == 0.0);
  CHECK(s.reachability_percent == 100.0);
  CHECK(s.percent == 50.0);
}

TEST_CASE("stimuli coverage: a full binary counter toggles everything") {
  Model m = load(R"json({
    "kind": "explicit",
    "vars": [{"name": "b1"}, {"name": "b0"}],
    "states": [
      {"name": "s0", "assign": {"b1": false, "b0": false}},
      {"name": "s1", "assign": {"b1": false, "b0": true}},
      {"name": "s2", "assign": {"b1": true,  "b0": false}},
      {"name": "s3", "assign": {"b1": true,  "b0": true}}
    ],
    "init": ["s0"],
    "edges": [["s0", "s1"], ["s1", "s2"], ["s2", "s3"], ["s3", "s0"]]
  })json");
  StimuliCoverage s = stimuli_coverage(m);
  CHECK(s.toggle_percent == 100.0);
  CHECK(s.reachability_percent == 100.0);
  CHECK(s.percent == 100.0);
}

TEST_CASE("stimuli coverage: unreachable declared states count against it") {
  Model m = load(R"json({
    "kind": "explicit",
    "vars": [{"name": "p"}],
    "states": [{"name": "a", "assign": {"p": false}},
               {"name": "b", "assign": {"p": true}}],
    "init": ["a"],
    "edges": [["a", "a"], ["b", "a"]]
  })json");
  StimuliCoverage s = stimuli_coverage(m);
  CHECK(s.reachability_percent == 50.0);
  CHECK(s.toggle_percent == 0.0);  // p never becomes true on a reachable state
}

TEST_CASE("stimuli toggle matches a direct reachable-state scan") {
  testgen::ModelGen mg(6120);
  for (int iter = 0; iter < 40; ++iter) {
    Model m = mg.gen(2 + iter % 4, {"p", "q", "r"});
    StimuliCoverage s = stimuli_coverage(m);

    // independent breadth-first reach plus per-variable scan
    std::vector<bool> seen(m.states.size());
    std::vector<std::uint32_t> work(m.initial.begin(), m.initial.end());
    for (std::uint32_t v : work) seen[v] = true;
    while (!work.empty()) {
      std::uint32_t s0 = work.back();
      work.pop_back();
      for (std::uint32_t t : m.succ[s0])
        if (!seen[t]) {
          seen[t] = true;
          work.push_back(t);
        }
    }
    int toggled = 0, reach = 0;
    for (std::uint32_t st = 0; st < m.states.size(); ++st) reach += seen[st];
    for (const VarInfo& v : m.vars) {
      std::set<std::uint64_t> vals;
      for (std::uint32_t st = 0; st < m.states.size(); ++st)
        if (seen[st]) vals.insert(m.value_of(m.states[st], v));
      toggled += vals.size() >= 2;
    }
    CHECK(s.toggle_percent == 100.0 * toggled / 3.0);
    CHECK(s.reachability_percent ==
          100.0 * reach / static_cast<double>(m.states.size()));
  }
}

TEST_CASE("formal coverage composites") {
  CheckerCoverage c;
  c.coi_percent = 100.0;
  c.proof_core_percent = 100.0;
  StimuliCoverage s;
  s.percent = 100.0;
  CHECK(formal_coverage(c, s).coi_percent == 100.0);

  c.coi_percent = 80.0;
  c.proof_core_percent = 20.0;
  s.percent = 50.0;
  FormalCoverage prod = formal_coverage(c, s, CompositeRule::Product);
  CHECK(prod.coi_percent == 40.0);
  CHECK(prod.proof_core_percent == 10.0);
  FormalCoverage mn = formal_coverage(c, s, CompositeRule::Min);
  CHECK(mn.coi_percent == 50.0);
  CHECK(mn.proof_core_percent == 20.0);
  FormalCoverage hm = formal_coverage(c, s, CompositeRule::Harmonic);
  CHECK_THAT(hm.coi_percent, Catch::Matchers::WithinAbs(61.5384615, 1e-6));
  CHECK_THAT(hm.proof_core_percent, Catch::Matchers::WithinAbs(28.5714285, 1e-6));

  CHECK(std::string(composite_rule_name(CompositeRule::Product)) == "product");
  CHECK(std::string(composite_rule_name(CompositeRule::Harmonic)) == "harmonic");
}

TEST_CASE("meets_threshold boundaries") {
  CoverageReport r;
  r.formal.coi_percent = 88.0;
  CHECK(meets_threshold(r, 80.0));
  r.formal.coi_percent = 79.9;
  CHECK(!meets_threshold(r, 80.0));
  r.formal.coi_percent = 80.0;
  CHECK(meets_threshold(r, 80.0));
  r.formal.coi_percent = 80.0;
  CHECK(meets_threshold(r));  // default threshold is 80
}

TEST_CASE("coverage never shrinks as proven properties accumulate") {
  testgen::ModelGen mg(77001);
  int sequences = 0;
  for (int iter = 0; iter < 200 && sequences < 60; ++iter) {
    Model m = mg.gen(2 + iter % 3, {"p", "q", "r"});
    testgen::FormulaGen fg(2400 + iter);
    std::vector<FormulaPtr> proven;
    for (int k = 0; k < 10 && proven.size() < 4; ++k) {
      FormulaPtr f = fg.gen(2);
      if (check(m, f).holds) proven.push_back(f);
    }
    if (proven.size() < 2) continue;
    ++sequences;

    double last_coi = -1.0, last_formal = -1.0;
    for (std::size_t n = 1; n <= proven.size(); ++n) {
      std::vector<FormulaPtr> prefix(proven.begin(), proven.begin() + n);
      CoverageReport r = compute_coverage(m, prefix);
      CHECK(r.checker.coi_percent >= last_coi);
      CHECK(r.formal.coi_percent >= last_formal);
      last_coi = r.checker.coi_percent;
      last_formal = r.formal.coi_percent;

      CHECK(r.checker.proof_core_percent <= r.checker.coi_percent);
      CHECK(r.formal.proof_core_percent <= r.formal.coi_percent);
      for (double pct : {r.checker.coi_percent, r.checker.proof_core_percent,
                         r.stimuli.toggle_percent, r.stimuli.reachability_percent,
                         r.stimuli.percent, r.formal.coi_percent,
                         r.formal.proof_core_percent}) {
        CHECK(pct >= 0.0);
        CHECK(pct <= 100.0);
      }

      // determinism
      CoverageReport again = compute_coverage(m, prefix);
      CHECK(again.checker.coi_percent == r.checker.coi_percent);
      CHECK(again.checker.proof_core_percent == r.checker.proof_core_percent);
      CHECK(again.formal.coi_percent == r.formal.coi_percent);
    }
  }
  CHECK(sequences >= 40);
}
