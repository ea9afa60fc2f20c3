// Report rendering: RunReport to JSON and to a human-readable text table,
// plus the lasso timing table shared with the CLI's counterexample output.
#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "vaprop/model.hpp"
#include "vaprop/pipeline.hpp"
#include "vaprop/print.hpp"

namespace vaprop {

namespace detail {

inline std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

inline void pad_to(std::string& s, std::size_t w) {
  while (s.size() < w) s.push_back(' ');
}

}  // namespace detail

// Monospaced timing table for a lasso: one column per step, one row per
// visible variable, loop entry starred and echoed in the footer.
inline std::string render_lasso_table(const Model& m, const Lasso& l) {
  std::size_t steps = l.length();
  std::vector<std::string> row_names{"step", "state"};
  for (const VarInfo& v : m.vars)
    if (!v.is_shadow) row_names.push_back(v.name);

  std::vector<std::vector<std::string>> cells(row_names.size());
  for (std::size_t i = 0; i < steps; ++i) {
    std::string head = std::to_string(i);
    if (i == l.loop_start()) head += "*";
    cells[0].push_back(head);
    cells[1].push_back(m.state_names[l.at(i)]);
    std::size_t row = 2;
    for (const VarInfo& v : m.vars) {
      if (v.is_shadow) continue;
      cells[row++].push_back(
          std::to_string(m.value_of(m.states[l.at(i)], v)));
    }
  }

  std::size_t name_w = 0;
  for (const std::string& n : row_names) name_w = std::max(name_w, n.size());
  std::vector<std::size_t> col_w(steps, 0);
  for (const auto& row : cells)
    for (std::size_t i = 0; i < steps; ++i)
      col_w[i] = std::max(col_w[i], row[i].size());

  std::string out;
  for (std::size_t r = 0; r < row_names.size(); ++r) {
    std::string line = row_names[r];
    detail::pad_to(line, name_w);
    line += " |";
    for (std::size_t i = 0; i < steps; ++i) {
      line += ' ';
      std::string cell = cells[r][i];
      detail::pad_to(cell, col_w[i]);
      line += cell;
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line;
    out += '\n';
  }
  out += "loop: step" + std::string(l.loop.size() == 1 ? " " : "s ") +
         std::to_string(l.loop_start());
  if (l.loop.size() > 1) out += ".." + std::to_string(steps - 1);
  out += " repeat forever\n";
  return out;
}

inline nlohmann::ordered_json lasso_to_json(const Model& m, const Lasso& l) {
  nlohmann::ordered_json j;
  j["stem"] = nlohmann::ordered_json::array();
  for (std::uint32_t s : l.stem) j["stem"].push_back(m.state_names[s]);
  j["loop"] = nlohmann::ordered_json::array();
  for (std::uint32_t s : l.loop) j["loop"].push_back(m.state_names[s]);
  return j;
}

inline nlohmann::ordered_json coverage_to_json(const Model& m,
                                               const CoverageReport& cov) {
  nlohmann::ordered_json j;
  j["checker"]["coi_percent"] = cov.checker.coi_percent;
  j["checker"]["proof_core_percent"] = cov.checker.proof_core_percent;
  j["checker"]["uncovered"] = nlohmann::ordered_json::array();
  for (const std::string& name : cov.checker.uncovered)
    j["checker"]["uncovered"].push_back(name);
  j["stimuli"]["toggle_percent"] = cov.stimuli.toggle_percent;
  j["stimuli"]["reachability_percent"] = cov.stimuli.reachability_percent;
  j["stimuli"]["percent"] = cov.stimuli.percent;
  j["formal"]["rule"] = composite_rule_name(cov.formal.rule);
  j["formal"]["coi_percent"] = cov.formal.coi_percent;
  j["formal"]["proof_core_percent"] = cov.formal.proof_core_percent;
  return j;
}

// Full machine-readable report. Prompt/response bodies stay in the transcript
// file; exchanges appear here as hash + size digests. The timestamp is the
// single field two otherwise identical runs may differ in.
inline nlohmann::ordered_json report_to_json(const Model& m,
                                             const RunReport& r) {
  nlohmann::ordered_json j;
  j["tool"] = r.tool;
  j["timestamp"] = r.timestamp;
  j["model"] = r.model_id;
  j["soc"] = r.soc_name;
  j["provider"] = r.provider_id;
  j["provider_model"] = r.provider_model;
  j["config"]["threshold"] = r.config.threshold;
  j["config"]["max_iterations"] = r.config.max_iterations;
  j["config"]["mode"] = r.config.mode == VacuityMode::AllOccurrences
                            ? "all-occurrences"
                            : "single";
  j["config"]["rule"] = composite_rule_name(r.config.rule);
  j["config"]["retrieval_k"] = r.config.retrieval_k;
  j["config"]["k_shot"] = r.config.k_shot;
  j["config"]["include_threats"] = r.config.include_threats;
  j["funnel"]["generated"] = r.funnel.generated;
  j["funnel"]["correct"] = r.funnel.correct;
  j["funnel"]["non_vacuous"] = r.funnel.non_vacuous;
  j["funnel"]["sva_emitted"] = r.funnel.sva_emitted;
  j["funnel"]["sva_correct"] = r.funnel.sva_correct;
  j["funnel"]["proved"] = r.funnel.proved;
  j["funnel"]["failed"] = r.funnel.failed;
  j["threshold_met"] = r.threshold_met;
  j["bugs"] = r.bug_count;
  j["incomplete"] = r.incomplete;
  if (r.incomplete) j["incomplete_reason"] = r.incomplete_reason;
  j["coverage"] = coverage_to_json(m, r.coverage);
  j["trajectory"] = nlohmann::ordered_json::array();
  for (const IterationCoverage& pt : r.trajectory) {
    nlohmann::ordered_json e;
    e["iteration"] = pt.iteration;
    e["hint"] = pt.hint;
    e["checker_coi"] = pt.checker_coi;
    e["checker_core"] = pt.checker_core;
    e["stimuli"] = pt.stimuli;
    e["formal_coi"] = pt.formal_coi;
    e["formal_core"] = pt.formal_core;
    e["meets_threshold"] = pt.meets;
    j["trajectory"].push_back(std::move(e));
  }
  j["records"] = nlohmann::ordered_json::array();
  for (const PropertyRecord& rec : r.records) {
    nlohmann::ordered_json e;
    e["id"] = rec.id;
    e["name"] = rec.name;
    e["source"] = rec.source_prompt;
    e["status"] = status_name(rec.status);
    if (rec.vacuity) {
      e["vacuity"] = vacuity_verdict_name(*rec.vacuity);
      e["non_affecting_occurrences"] = rec.non_affecting_count;
    }
    e["raw"] = rec.raw_text;
    if (rec.formula) e["formula"] = pretty_print(rec.formula);
    if (!rec.sva.empty()) e["sva"] = rec.sva;
    if (!rec.parse_error.empty()) e["parse_error"] = rec.parse_error;
    if (rec.holds) e["holds"] = *rec.holds;
    if (rec.cex) {
      e["cex"] = lasso_to_json(m, *rec.cex);
      e["cex_table"] = render_lasso_table(m, *rec.cex);
    }
    e["bug"] = rec.bug;
    if (rec.bug) e["bug_context"] = rec.bug_context;
    j["records"].push_back(std::move(e));
  }
  j["exchanges"] = nlohmann::ordered_json::array();
  for (const ProviderExchange& ex : r.exchanges) {
    nlohmann::ordered_json e;
    e["prompt_hash"] = ex.prompt_hash;
    e["provider"] = ex.provider;
    e["model"] = ex.model;
    e["latency_ms"] = ex.latency_ms;
    e["prompt_chars"] = ex.prompt.size();
    e["response_chars"] = ex.response.size();
    j["exchanges"].push_back(std::move(e));
  }
  j["warnings"] = r.warnings;
  return j;
}

// Human-readable rendering: funnel counts, the coverage table, the per
// iteration trajectory, then failures with their timing tables.
inline std::string render_text_report(const Model& m, const RunReport& r) {
  std::string out;
  out += "== vaprop pipeline report ==\n";
  out += "model: " + r.model_id + "  soc: " + r.soc_name + "  provider: " +
         r.provider_id + " (" + r.provider_model + ")\n";
  if (r.incomplete)
    out += "INCOMPLETE RUN: " + r.incomplete_reason + "\n";
  out += "\nfunnel:\n";
  auto row = [&](const char* label, std::size_t n) {
    std::string line = "  ";
    line += label;
    detail::pad_to(line, 16);
    line += std::to_string(n);
    out += line + "\n";
  };
  row("generated", r.funnel.generated);
  row("correct", r.funnel.correct);
  row("non-vacuous", r.funnel.non_vacuous);
  row("sva-emitted", r.funnel.sva_emitted);
  row("sva-correct", r.funnel.sva_correct);
  row("proved", r.funnel.proved);
  row("failed", r.funnel.failed);

  out += "\ncoverage:\n";
  out += "  checker   COI " + detail::pct(r.coverage.checker.coi_percent) +
         "%  proof core " +
         detail::pct(r.coverage.checker.proof_core_percent) + "%\n";
  out += "  stimuli   " + detail::pct(r.coverage.stimuli.percent) +
         "%  (toggle " + detail::pct(r.coverage.stimuli.toggle_percent) +
         "%, reachability " +
         detail::pct(r.coverage.stimuli.reachability_percent) + "%)\n";
  out += "  formal    COI " + detail::pct(r.coverage.formal.coi_percent) +
         "%  proof core " +
         detail::pct(r.coverage.formal.proof_core_percent) + "%  (" +
         composite_rule_name(r.coverage.formal.rule) + ")\n";
  out += std::string("  threshold ") + detail::pct(r.config.threshold) +
         "%: " + (r.threshold_met ? "met" : "NOT met") + "\n";

  out += "\ntrajectory:\n";
  for (const IterationCoverage& pt : r.trajectory) {
    out += "  iter " + std::to_string(pt.iteration) + ": formal COI " +
           detail::pct(pt.formal_coi) + "%";
    if (!pt.hint.empty()) out += "  hint: " + pt.hint;
    out += "\n";
  }

  if (r.bug_count > 0) {
    out += "\nbugs (" + std::to_string(r.bug_count) + "):\n";
    for (const PropertyRecord& rec : r.records)
      if (rec.bug)
        out += "  " + rec.id + " " + rec.name + ": " + rec.bug_context + "\n";
  }

  out += "\nproperties:\n";
  for (const PropertyRecord& rec : r.records) {
    out += "  " + rec.id + " [" + status_name(rec.status) + "] " + rec.name;
    if (rec.vacuity)
      out += "  (vacuity: " + std::string(vacuity_verdict_name(*rec.vacuity)) +
             ")";
    out += "\n";
    if (rec.formula) out += "    " + pretty_print(rec.formula) + "\n";
  }

  bool any_cex = false;
  for (const PropertyRecord& rec : r.records) any_cex |= rec.cex.has_value();
  if (any_cex) {
    out += "\ncounterexamples:\n";
    for (const PropertyRecord& rec : r.records) {
      if (!rec.cex) continue;
      out += "  " + rec.id + " " + rec.name + ":\n";
      std::string table = render_lasso_table(m, *rec.cex);
      for (std::size_t start = 0; start < table.size();) {
        std::size_t nl = table.find('\n', start);
        if (nl == std::string::npos) nl = table.size();
        out += "    " + table.substr(start, nl - start) + "\n";
        start = nl + 1;
      }
    }
  }
  if (!r.warnings.empty()) {
    out += "\nwarnings:\n";
    for (const std::string& w : r.warnings) out += "  " + w + "\n";
  }
  return out;
}

// Interop stub only: mirrors the records into a TCL-ish script. Never
// validated against any commercial tool.
inline std::string emit_tcl_stub(const RunReport& r) {
  std::string out;
  out += "# vaprop interop stub; unvalidated\n";
  out += "clock " + r.config.clock + "\n";
  for (const PropertyRecord& rec : r.records) {
    if (rec.sva.empty()) continue;
    out += "assert -name " + rec.name + " {" +
           render_sva_body(rec.formula) + "}\n";
  }
  return out;
}

}  // namespace vaprop
