// Orchestration: spec-driven prompt construction, provider-backed property
// generation, vacuity filtering, SVA emission with one repair round, model
// checking, coverage-gated refinement, and bug flagging.
#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "vaprop/check.hpp"
#include "vaprop/coverage.hpp"
#include "vaprop/model.hpp"
#include "vaprop/parse.hpp"
#include "vaprop/print.hpp"
#include "vaprop/prompt.hpp"
#include "vaprop/provider.hpp"
#include "vaprop/retrieval.hpp"
#include "vaprop/spec_file.hpp"
#include "vaprop/vacuity.hpp"

namespace vaprop {

// Funnel position. A record only ever moves forward; proved and failed are
// the two terminal outcomes past sva-correct.
enum class PropertyStatus {
  Generated,
  Correct,
  NonVacuous,
  SvaEmitted,
  SvaCorrect,
  Proved,
  Failed,
};

inline const char* status_name(PropertyStatus s) {
  switch (s) {
    case PropertyStatus::Generated: return "generated";
    case PropertyStatus::Correct: return "correct";
    case PropertyStatus::NonVacuous: return "non-vacuous";
    case PropertyStatus::SvaEmitted: return "sva-emitted";
    case PropertyStatus::SvaCorrect: return "sva-correct";
    case PropertyStatus::Proved: return "proved";
    case PropertyStatus::Failed: return "failed";
  }
  return "unknown";
}

inline int status_rank(PropertyStatus s) { return static_cast<int>(s); }

inline const char* vacuity_verdict_name(VacuityVerdict v) {
  switch (v) {
    case VacuityVerdict::Fails: return "fails";
    case VacuityVerdict::NonVacuous: return "non-vacuous";
    case VacuityVerdict::Vacuous: return "vacuous";
  }
  return "unknown";
}

struct PropertyRecord {
  std::string id;             // p1, p2, ... in creation order
  std::string name;           // property block name when one was given
  std::string source_prompt;  // stage label, e.g. "spec-extraction"
  std::string raw_text;
  std::string parse_error;    // last parser complaint for stuck records
  FormulaPtr formula;         // null until the record reaches correct
  PropertyStatus status = PropertyStatus::Generated;
  std::optional<VacuityVerdict> vacuity;
  std::size_t non_affecting_count = 0;
  std::string sva;            // emitted assertion block
  std::optional<bool> holds;  // absent for records that never reached checking
  std::optional<Lasso> cex;
  bool from_threat_prompt = false;
  bool bug = false;
  std::string bug_context;  // asset names / threat origin behind the flag
};

struct Funnel {
  std::size_t generated = 0;
  std::size_t correct = 0;
  std::size_t non_vacuous = 0;
  std::size_t sva_emitted = 0;
  std::size_t sva_correct = 0;
  std::size_t proved = 0;
  std::size_t failed = 0;
};

inline Funnel funnel_counts(const std::vector<PropertyRecord>& records) {
  Funnel f;
  for (const PropertyRecord& r : records) {
    int rank = status_rank(r.status);
    f.generated += 1;
    f.correct += rank >= status_rank(PropertyStatus::Correct);
    f.non_vacuous += rank >= status_rank(PropertyStatus::NonVacuous);
    f.sva_emitted += rank >= status_rank(PropertyStatus::SvaEmitted);
    f.sva_correct += rank >= status_rank(PropertyStatus::SvaCorrect);
    f.proved += r.status == PropertyStatus::Proved;
    f.failed += r.status == PropertyStatus::Failed;
  }
  return f;
}

struct IterationCoverage {
  int iteration = 0;      // 0 is the initial generation pass
  std::string hint;       // refinement hint that produced this iteration
  double checker_coi = 0.0;
  double checker_core = 0.0;
  double stimuli = 0.0;
  double formal_coi = 0.0;
  double formal_core = 0.0;
  bool meets = false;
};

struct RunConfig {
  double threshold = 80.0;
  int max_iterations = 5;
  VacuityMode mode = VacuityMode::SingleOccurrence;
  CompositeRule rule = CompositeRule::Product;
  std::size_t retrieval_k = 4;
  int k_shot = 2;  // worked examples included in the generation prompt
  bool include_threats = false;
  std::string model_name = "default";
  std::string clock = "clk";
};

struct RunReport {
  std::string tool = "vaprop";
  std::string timestamp;  // the only field two identical runs may differ in
  std::string model_id;
  std::string soc_name;
  std::string provider_id;
  std::string provider_model;
  RunConfig config;
  std::vector<PropertyRecord> records;
  Funnel funnel;
  CoverageReport coverage;
  bool threshold_met = false;
  std::vector<IterationCoverage> trajectory;
  std::vector<ProviderExchange> exchanges;
  std::vector<std::string> warnings;
  std::size_t bug_count = 0;
  bool incomplete = false;
  std::string incomplete_reason;
};

namespace detail {

inline std::string rfc3339_now() {
  std::time_t now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[80];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec);
  return buf;
}

inline std::string trim_copy(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline bool line_starts_word(const std::string& line, const char* word) {
  std::string t = trim_copy(line);
  std::size_t n = std::string(word).size();
  if (t.compare(0, n, word) != 0) return false;
  return t.size() == n || !(std::isalnum(static_cast<unsigned char>(t[n])) ||
                            t[n] == '_');
}

inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  lines.push_back(cur);
  return lines;
}

// property ... endproperty spans, by line, in order of appearance
inline std::vector<std::string> property_spans(const std::string& text) {
  std::vector<std::string> spans;
  std::string buf;
  bool in_span = false;
  for (const std::string& line : split_lines(text)) {
    if (!in_span) {
      if (line_starts_word(line, "property")) {
        in_span = true;
        buf = line;
        buf += '\n';
      }
      continue;
    }
    buf += line;
    buf += '\n';
    if (line_starts_word(line, "endproperty")) {
      spans.push_back(trim_copy(buf));
      in_span = false;
    }
  }
  return spans;
}

}  // namespace detail

// Candidates worth parsing from a provider response: property...endproperty
// spans wherever they appear, plus fenced code blocks that carry a bare
// expression instead of a property block. Prose is ignored.
inline std::vector<std::string> extract_candidates(const std::string& text) {
  std::vector<std::string> out;
  std::string fence;
  std::string outside;
  bool in_fence = false;
  auto flush_fence = [&]() {
    std::vector<std::string> spans = detail::property_spans(fence);
    if (!spans.empty()) {
      for (auto& s : spans) out.push_back(std::move(s));
    } else {
      std::string body = detail::trim_copy(fence);
      if (!body.empty()) out.push_back(std::move(body));
    }
    fence.clear();
  };
  for (const std::string& line : detail::split_lines(text)) {
    if (detail::trim_copy(line).rfind("```", 0) == 0) {
      if (in_fence)
        flush_fence();
      else {
        for (auto& s : detail::property_spans(outside)) out.push_back(std::move(s));
        outside.clear();
      }
      in_fence = !in_fence;
      continue;
    }
    (in_fence ? fence : outside) += line + "\n";
  }
  if (in_fence) flush_fence();  // unterminated fence: take what we got
  for (auto& s : detail::property_spans(outside)) out.push_back(std::move(s));
  return out;
}

struct GenerationOutcome {
  std::vector<PropertyRecord> records;
  std::vector<ProviderExchange> exchanges;
  std::vector<std::string> warnings;
};

namespace detail {

inline ProviderExchange send(Provider& provider, const RunConfig& cfg,
                             const std::string& prompt) {
  ProviderRequest req{prompt, cfg.model_name, 0.0, 4096};
  ProviderResult res = provider.complete(req);
  ProviderExchange e;
  e.prompt_hash = prompt_hash(prompt);
  e.prompt = prompt;
  e.response = std::move(res.text);
  e.latency_ms = res.latency_ms;
  e.provider = provider.id();
  e.model = cfg.model_name;
  return e;
}

}  // namespace detail

// Send one prompt, mint a record per extracted candidate, and promote the
// ones that parse. A candidate that does not parse gets exactly one repair
// round through the sva-fix template; a second failure leaves it at generated.
inline GenerationOutcome generate_properties(Provider& provider,
                                             const PromptLibrary& lib,
                                             const RunConfig& cfg,
                                             const std::string& prompt,
                                             const std::string& source_label,
                                             std::size_t& next_id) {
  GenerationOutcome out;
  out.exchanges.push_back(detail::send(provider, cfg, prompt));
  std::vector<std::string> candidates =
      extract_candidates(out.exchanges.back().response);
  if (candidates.empty()) {
    out.warnings.push_back("response for " + source_label +
                           " contained no property blocks");
    return out;
  }
  for (std::string& cand : candidates) {
    PropertyRecord rec;
    rec.id = "p" + std::to_string(++next_id);
    rec.source_prompt = source_label;
    rec.raw_text = std::move(cand);
    auto adopt = [&rec](const ParsedProperty& p) {
      rec.name = p.name.empty() ? rec.id : p.name;
      rec.formula = p.body;
      rec.status = PropertyStatus::Correct;
      rec.parse_error.clear();
    };
    try {
      adopt(parse_property_full(rec.raw_text));
    } catch (const ParseError& first) {
      rec.parse_error = first.what();
      Prompt fix = lib.render(PromptStage::SvaFix,
                              {{"property", rec.raw_text},
                               {"error", rec.parse_error}});
      out.exchanges.push_back(detail::send(provider, cfg, fix.text));
      std::vector<std::string> repaired =
          extract_candidates(out.exchanges.back().response);
      if (repaired.empty()) {
        out.warnings.push_back("repair round for " + rec.id +
                               " produced no property block");
      } else {
        try {
          rec.raw_text = repaired.front();
          adopt(parse_property_full(rec.raw_text));
        } catch (const ParseError& second) {
          rec.parse_error = second.what();
        }
      }
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

namespace detail {

// Placeholder k-shot examples shipped with the templates; trimmed to the
// configured shot count.
inline std::string example_block(int k) {
  static const char* kExamples[] = {
      "property p_req_grant;\n  @(posedge clk) req |-> ##[0:3] grant;\n"
      "endproperty",
      "property p_fifo_no_overflow;\n  @(posedge clk) full |-> !push;\n"
      "endproperty",
      "property p_lock_release;\n  @(posedge clk) lock |=> lock || release;\n"
      "endproperty",
  };
  std::string out;
  int n = std::min<int>(k, static_cast<int>(std::size(kExamples)));
  for (int i = 0; i < n; ++i) {
    out += kExamples[i];
    out += "\n";
  }
  return out;
}

inline std::string retrieval_query(const SpecFile& spec) {
  std::string q = spec.soc_name;
  for (const IpBlock& ip : spec.ips) q += " " + ip.name + " " + ip.operation;
  for (const Asset& a : spec.assets) {
    q += " " + a.name;
    for (const std::string& s : asset_signals(a)) q += " " + s;
  }
  return q;
}

inline std::string threat_section(const SpecFile& spec) {
  std::string out =
      "Threat model: an adversary may probe or tamper with the assets "
      "below; target assertions at them.\n";
  for (const Asset& a : spec.assets) {
    out += "- " + a.name;
    if (!a.type.empty()) out += " (" + a.type + ")";
    if (!a.owner.empty()) out += " owned by " + a.owner;
    out += "\n";
  }
  return out;
}

inline std::string coverage_summary_text(const Model& m,
                                         const CoverageReport& cov) {
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "checker COI %.1f%%, proof core %.1f%%, stimuli %.1f%%, "
                "formal COI %.1f%%",
                cov.checker.coi_percent, cov.checker.proof_core_percent,
                cov.stimuli.percent, cov.formal.coi_percent);
  std::string out = buf;
  if (!cov.checker.uncovered.empty()) {
    out += "; uncovered:";
    for (const std::string& name : cov.checker.uncovered) out += " " + name;
  }
  return out;
}

// Themes for refinement selection, read off the coverage gaps.
inline std::set<std::string> uncovered_themes(const Model& m,
                                              const CoverageReport& cov) {
  std::set<std::string> themes;
  for (const std::string& name : cov.checker.uncovered) {
    std::uint32_t v = m.var_index(name);
    const VarInfo& var = m.vars[v];
    std::string low;
    for (unsigned char c : var.name)
      low.push_back(static_cast<char>(std::tolower(c)));
    if (low.find("rst") != std::string::npos ||
        low.find("reset") != std::string::npos)
      themes.insert("reset");
    if (var.width > 1) themes.insert("corner");
    if (!var.is_input) themes.insert("sequential");
    for (const auto& [src, dst] : m.deps)
      if (src == v && dst != v) themes.insert("multi-cycle");
  }
  if (cov.stimuli.reachability_percent < 100.0) themes.insert("unreachable");
  return themes;
}

}  // namespace detail

inline RunReport run_pipeline(const Model& m, const SpecFile& spec,
                              const PromptLibrary& lib,
                              const std::vector<RefinementEntry>& db,
                              Provider& provider, const RunConfig& cfg) {
  RunReport report;
  report.timestamp = detail::rfc3339_now();
  report.model_id = m.id;
  report.soc_name = spec.soc_name;
  report.provider_id = provider.id();
  report.provider_model = cfg.model_name;
  report.config = cfg;

  std::size_t next_id = 0;
  std::vector<FormulaPtr> proved;

  // Vacuity filter, SVA emission, model checking and bug flagging for every
  // record still sitting at correct.
  auto process = [&](std::vector<PropertyRecord>& records) {
    for (PropertyRecord& rec : records) {
      if (rec.status != PropertyStatus::Correct) continue;
      VacuityReport vr = check_vacuity(m, rec.formula, cfg.mode);
      rec.vacuity = vr.verdict;
      rec.non_affecting_count = vr.non_affecting.size();
      if (vr.verdict == VacuityVerdict::Vacuous) continue;  // stops at correct
      rec.status = PropertyStatus::NonVacuous;
      SvaText sva = emit_sva(rec.formula, rec.name, cfg.clock, "");
      rec.sva = sva.text();
      rec.status = PropertyStatus::SvaEmitted;
      try {
        parse_property_full(rec.sva);
        rec.status = PropertyStatus::SvaCorrect;
      } catch (const ParseError& e) {
        report.warnings.push_back("emitted SVA for " + rec.id +
                                  " does not read back: " + e.what());
        continue;
      }
      if (vr.holds) {
        rec.holds = true;
        rec.status = PropertyStatus::Proved;
        proved.push_back(rec.formula);
        continue;
      }
      rec.holds = false;
      rec.status = PropertyStatus::Failed;
      Verdict v = check(m, rec.formula);
      rec.cex = v.counterexample;
      std::vector<std::uint32_t> coi = cone_of_influence(m, rec.formula);
      std::string touched;
      for (const Asset& a : spec.assets)
        for (const std::string& s : asset_signals(a)) {
          int idx = m.var_index(s);
          if (idx >= 0 && std::binary_search(coi.begin(), coi.end(),
                                             static_cast<std::uint32_t>(idx))) {
            touched += touched.empty() ? a.name : ", " + a.name;
            break;
          }
        }
      if (!touched.empty()) {
        rec.bug = true;
        rec.bug_context = "failure cone touches asset(s): " + touched;
      } else if (rec.from_threat_prompt) {
        rec.bug = true;
        rec.bug_context = "failed assertion from threat-model prompt";
      }
    }
  };

  auto snapshot_coverage = [&](int iteration, const std::string& hint) {
    report.coverage = compute_coverage(m, proved, cfg.rule);
    report.threshold_met = meets_threshold(report.coverage, cfg.threshold);
    IterationCoverage pt;
    pt.iteration = iteration;
    pt.hint = hint;
    pt.checker_coi = report.coverage.checker.coi_percent;
    pt.checker_core = report.coverage.checker.proof_core_percent;
    pt.stimuli = report.coverage.stimuli.percent;
    pt.formal_coi = report.coverage.formal.coi_percent;
    pt.formal_core = report.coverage.formal.proof_core_percent;
    pt.meets = report.threshold_met;
    report.trajectory.push_back(std::move(pt));
  };

  auto absorb = [&](GenerationOutcome&& got, bool threat_born) {
    for (PropertyRecord& r : got.records) r.from_threat_prompt = threat_born;
    process(got.records);
    for (auto& r : got.records) report.records.push_back(std::move(r));
    for (auto& e : got.exchanges) report.exchanges.push_back(std::move(e));
    for (auto& w : got.warnings) report.warnings.push_back(std::move(w));
  };

  try {
    std::vector<Chunk> corpus = build_corpus(spec_corpus_documents(spec));
    std::string spec_view;
    for (const IpBlock& ip : spec.ips) spec_view += ip_view(spec, ip) + "\n";
    if (spec.ips.empty())
      spec_view = "SoC: " + spec.soc_name + " (" + spec.soc_type + ")\n";
    std::string context;
    for (const Retrieved& r :
         retrieve_context(corpus, detail::retrieval_query(spec), cfg.retrieval_k))
      context += "-- " + r.chunk.doc + " --\n" + r.chunk.text + "\n";

    std::string generation =
        lib.render(PromptStage::SystemSetup, {}).text + "\n\n" +
        lib.render(PromptStage::VacuityRules, {}).text + "\n\n" +
        lib.render(PromptStage::SpecExtraction,
                   {{"spec", spec_view},
                    {"context", context},
                    {"examples", detail::example_block(cfg.k_shot)},
                    {"threats", cfg.include_threats
                                    ? detail::threat_section(spec)
                                    : std::string()}})
            .text;
    absorb(generate_properties(provider, lib, cfg, generation,
                               "spec-extraction", next_id),
           cfg.include_threats);
    snapshot_coverage(0, "");

    std::set<std::size_t> used;
    for (int iter = 1; iter <= cfg.max_iterations && !report.threshold_met;
         ++iter) {
      if (db.empty()) break;
      std::set<std::string> themes = detail::uncovered_themes(m, report.coverage);
      const RefinementEntry& entry = db[select_refinement(db, used, themes)];
      std::string prop_list;
      for (const PropertyRecord& r : report.records)
        if (r.status == PropertyStatus::Proved) prop_list += r.sva + "\n";
      Prompt refine = lib.render(
          PromptStage::Refinement,
          {{"hint", entry.text},
           {"coverage", detail::coverage_summary_text(m, report.coverage)},
           {"properties", prop_list}});
      absorb(generate_properties(provider, lib, cfg, refine.text,
                                 "refinement#" + std::to_string(iter), next_id),
             cfg.include_threats);
      snapshot_coverage(iter, entry.text);
    }
  } catch (const ProviderError& e) {
    report.incomplete = true;
    report.incomplete_reason = e.what();
  } catch (const CheckError& e) {
    report.incomplete = true;
    report.incomplete_reason = e.what();
  }

  if (report.trajectory.empty()) snapshot_coverage(0, "");
  report.funnel = funnel_counts(report.records);
  for (const PropertyRecord& r : report.records) report.bug_count += r.bug;
  return report;
}

}  // namespace vaprop
