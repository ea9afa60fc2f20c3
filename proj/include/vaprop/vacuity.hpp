// Vacuity analysis: per-occurrence affect checks via the two-substitution
// biconditional, simultaneous substitution for repeated subformulas, optional
// per-subset checking, and interesting-witness extraction.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vaprop/check.hpp"
#include "vaprop/formula.hpp"
#include "vaprop/model.hpp"

namespace vaprop {

struct VacuityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AffectsResult {
  bool affects = false;
  bool sat_under_true = false;
  bool sat_under_false = false;
};

// Does the occurrence at `at` affect whether m satisfies f? Decided by
// model checking both constant substitutions; the occurrence is irrelevant
// exactly when they agree.
inline AffectsResult affects(const Model& m, const FormulaPtr& f,
                             const OccurrencePath& at) {
  AffectsResult r;
  r.sat_under_true = check(m, substitute(f, at, true)).holds;
  r.sat_under_false = check(m, substitute(f, at, false)).holds;
  r.affects = r.sat_under_true != r.sat_under_false;
  return r;
}

enum class VacuityMode { SingleOccurrence, AllOccurrences };
enum class VacuityVerdict { Fails, NonVacuous, Vacuous };

struct OccurrenceCheck {
  std::vector<OccurrencePath> paths;  // one path, or a group substituted together
  bool simultaneous = false;
  bool affects = false;
  bool sat_under_true = false;
  bool sat_under_false = false;
};

struct VacuityReport {
  FormulaPtr formula;
  std::string model_id;
  bool holds = false;
  VacuityVerdict verdict = VacuityVerdict::Fails;
  std::vector<OccurrenceCheck> occurrences;
  std::vector<std::size_t> non_affecting;  // indices into occurrences
  std::optional<Lasso> witness;            // interesting witness, when one exists
};

// witness(f) = f and, for every strict occurrence, the negation of the
// constant substitution that a satisfying-but-interesting path must escape.
// A counterexample to its negation is therefore an interesting witness.
inline std::optional<Lasso> interesting_witness(const Model& m,
                                                const FormulaPtr& f) {
  Verdict v = check(m, mk_not(witness_formula(f)));
  if (v.holds) return std::nullopt;
  return v.counterexample;
}

namespace detail {
inline constexpr std::size_t kSubsetOccurrenceCap = 12;

inline bool substituted_holds(const Model& m, const FormulaPtr& f,
                              const std::vector<OccurrencePath>& paths,
                              bool value) {
  FormulaPtr g = f;
  for (const auto& p : paths) g = substitute(g, p, value);
  return check(m, g).holds;
}
}  // namespace detail

inline VacuityReport check_vacuity(
    const Model& m, const FormulaPtr& f,
    VacuityMode mode = VacuityMode::SingleOccurrence) {
  VacuityReport r;
  r.formula = f;
  r.model_id = m.id;
  Verdict base = check(m, f);
  r.holds = base.holds;
  if (!base.holds) {
    r.verdict = VacuityVerdict::Fails;
    return r;
  }

  std::vector<OccurrencePath> occs = occurrences(f);
  for (const auto& occ : occs) {
    AffectsResult a = affects(m, f, occ);
    OccurrenceCheck rec;
    rec.paths = {occ};
    rec.affects = a.affects;
    rec.sat_under_true = a.sat_under_true;
    rec.sat_under_false = a.sat_under_false;
    r.occurrences.push_back(std::move(rec));
  }

  // repeated subformulas: substitute every occurrence of the same subformula
  // at once (occurrences of one subformula are pairwise disjoint, so the
  // paths stay valid as the substitutions are folded in)
  std::map<FormulaPtr, std::vector<OccurrencePath>, FormulaLess> groups;
  std::vector<FormulaPtr> group_order;
  for (const auto& occ : occs) {
    FormulaPtr sub = resolve(f, occ);
    auto [it, added] = groups.emplace(sub, std::vector<OccurrencePath>{});
    if (added) group_order.push_back(sub);
    it->second.push_back(occ);
  }
  auto record_group = [&](const std::vector<OccurrencePath>& paths) {
    OccurrenceCheck rec;
    rec.paths = paths;
    rec.simultaneous = true;
    rec.sat_under_true = detail::substituted_holds(m, f, paths, true);
    rec.sat_under_false = detail::substituted_holds(m, f, paths, false);
    rec.affects = rec.sat_under_true != rec.sat_under_false;
    r.occurrences.push_back(std::move(rec));
  };
  for (const FormulaPtr& sub : group_order) {
    const auto& paths = groups.at(sub);
    if (paths.size() < 2) continue;
    record_group(paths);
    if (mode == VacuityMode::AllOccurrences) {
      if (paths.size() > detail::kSubsetOccurrenceCap)
        throw VacuityError(
            "all-occurrences mode supports at most " +
            std::to_string(detail::kSubsetOccurrenceCap) +
            " occurrences of one subformula (got " +
            std::to_string(paths.size()) + ")");
      // proper subsets of size >= 2; singletons and the full group are
      // already recorded above
      std::uint32_t full = (1u << paths.size()) - 1;
      for (std::uint32_t mask = 1; mask < full; ++mask) {
        if ((mask & (mask - 1)) == 0) continue;  // singleton
        std::vector<OccurrencePath> sel;
        for (std::size_t i = 0; i < paths.size(); ++i)
          if (mask & (1u << i)) sel.push_back(paths[i]);
        record_group(sel);
      }
    }
  }

  for (std::size_t i = 0; i < r.occurrences.size(); ++i)
    if (!r.occurrences[i].affects) r.non_affecting.push_back(i);
  r.verdict = r.non_affecting.empty() ? VacuityVerdict::NonVacuous
                                      : VacuityVerdict::Vacuous;
  r.witness = interesting_witness(m, f);
  return r;
}

}  // namespace vaprop
