// Coverage metrics over a model and its proven properties: cone-of-influence
// and havoc-based proof cores (checker view), toggle plus reachability
// (stimuli view), and a configurable composite of the two (formal view).
#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "vaprop/check.hpp"
#include "vaprop/formula.hpp"
#include "vaprop/model.hpp"
#include "vaprop/print.hpp"

namespace vaprop {

struct CoverageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PropertyCoverage {
  FormulaPtr formula;
  std::vector<std::string> coi;         // declaration order
  std::vector<std::string> proof_core;  // subset of coi
};

struct CheckerCoverage {
  double coi_percent = 0.0;
  double proof_core_percent = 0.0;
  std::vector<PropertyCoverage> per_property;
  std::vector<std::string> uncovered;  // variables no property's cone touches
};

struct StimuliCoverage {
  double toggle_percent = 0.0;         // variables seen under >= 2 values
  double reachability_percent = 0.0;   // reachable share of declared states
  double percent = 0.0;                // mean of the two
};

enum class CompositeRule { Product, Min, Harmonic };

inline const char* composite_rule_name(CompositeRule r) {
  switch (r) {
    case CompositeRule::Product: return "product";
    case CompositeRule::Min: return "min";
    default: return "harmonic";
  }
}

struct FormalCoverage {
  CompositeRule rule = CompositeRule::Product;
  double coi_percent = 0.0;
  double proof_core_percent = 0.0;
};

struct CoverageReport {
  CheckerCoverage checker;
  StimuliCoverage stimuli;
  FormalCoverage formal;
};

namespace detail {

// shadow companions are bookkeeping, not design state
inline std::vector<std::uint32_t> covered_vars(const Model& m) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < m.vars.size(); ++i)
    if (!m.vars[i].is_shadow) out.push_back(i);
  return out;
}

inline double percent_of(std::size_t part, std::size_t whole) {
  if (whole == 0) return 100.0;
  return 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

}  // namespace detail

// Cones and proof cores for properties already proven on m. A variable is in
// a property's proof core when making its next value nondeterministic breaks
// the proof; havoc only ever adds behavior, so a kept proof is meaningful.
inline CheckerCoverage checker_coverage(const Model& m,
                                        const std::vector<FormulaPtr>& props) {
  CheckerCoverage out;
  std::vector<std::uint32_t> design = detail::covered_vars(m);
  std::set<std::uint32_t> cone_union, core_union;

  for (const FormulaPtr& f : props) {
    if (!check(m, f).holds)
      throw CoverageError("coverage requires proven properties; '" +
                          pretty_print(f) + "' does not hold");
    PropertyCoverage pc;
    pc.formula = f;
    for (std::uint32_t vi : cone_of_influence(m, f)) {
      if (m.vars[vi].is_shadow) continue;
      cone_union.insert(vi);
      pc.coi.push_back(m.vars[vi].name);
      if (!check(havoc_variable(m, m.vars[vi].name), f).holds) {
        core_union.insert(vi);
        pc.proof_core.push_back(m.vars[vi].name);
      }
    }
    out.per_property.push_back(std::move(pc));
  }

  out.coi_percent = detail::percent_of(cone_union.size(), design.size());
  out.proof_core_percent = detail::percent_of(core_union.size(), design.size());
  for (std::uint32_t vi : design)
    if (!cone_union.count(vi)) out.uncovered.push_back(m.vars[vi].name);
  return out;
}

inline StimuliCoverage stimuli_coverage(const Model& m) {
  StimuliCoverage out;
  std::vector<std::uint32_t> design = detail::covered_vars(m);
  std::vector<std::uint32_t> reach = reachable_states(m);

  std::size_t toggled = 0;
  for (std::uint32_t vi : design) {
    std::set<std::uint64_t> seen;
    for (std::uint32_t s : reach) {
      seen.insert(m.value_of(m.states[s], m.vars[vi]));
      if (seen.size() >= 2) break;
    }
    if (seen.size() >= 2) ++toggled;
  }
  out.toggle_percent = detail::percent_of(toggled, design.size());

  // compiled FSMs only materialize reachable states; explicit files may
  // declare states the initial states never reach
  std::size_t declared = m.declared_state_count > 0
                             ? static_cast<std::size_t>(m.declared_state_count)
                             : m.states.size();
  out.reachability_percent = detail::percent_of(reach.size(), declared);
  out.percent = (out.toggle_percent + out.reachability_percent) / 2.0;
  return out;
}

inline FormalCoverage formal_coverage(const CheckerCoverage& checker,
                                      const StimuliCoverage& stimuli,
                                      CompositeRule rule = CompositeRule::Product) {
  auto combine = [rule](double a, double b) {
    switch (rule) {
      case CompositeRule::Product: return a * b / 100.0;
      case CompositeRule::Min: return std::min(a, b);
      default: return a + b == 0.0 ? 0.0 : 2.0 * a * b / (a + b);
    }
  };
  FormalCoverage out;
  out.rule = rule;
  out.coi_percent = combine(checker.coi_percent, stimuli.percent);
  out.proof_core_percent = combine(checker.proof_core_percent, stimuli.percent);
  return out;
}

inline CoverageReport compute_coverage(const Model& m,
                                       const std::vector<FormulaPtr>& props,
                                       CompositeRule rule = CompositeRule::Product) {
  CoverageReport r;
  r.checker = checker_coverage(m, props);
  r.stimuli = stimuli_coverage(m);
  r.formal = formal_coverage(r.checker, r.stimuli, rule);
  return r;
}

// Refinement gate: formal COI coverage at or above the threshold passes.
inline bool meets_threshold(const CoverageReport& r, double threshold = 80.0) {
  return r.formal.coi_percent >= threshold;
}

}  // namespace vaprop
