// vaprop: property checking, vacuity analysis, coverage, and the full
// generate-check-refine pipeline over explicit-state models.
//
// Exit codes: 0 success, 1 failing properties or flagged bugs, 2 bad input
// or configuration, 3 pipeline finished below the coverage threshold.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vaprop/http_provider.hpp"
#include "vaprop/model.hpp"
#include "vaprop/pipeline.hpp"
#include "vaprop/report.hpp"

namespace fs = std::filesystem;
using namespace vaprop;

namespace {

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw CliError("cannot read " + path.string());
  std::ostringstream body;
  body << in.rdbuf();
  return body.str();
}

std::vector<ParsedProperty> load_props(const fs::path& path) {
  auto props = parse_property_file(read_file(path));
  if (props.empty())
    throw CliError("no properties found in " + path.string());
  return props;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw CliError("cannot write " + path.string());
  out << text;
}

// Probe without truncating so a failed run never eats an existing file.
void ensure_writable(const fs::path& path) {
  if (path.empty()) return;
  std::ofstream probe(path, std::ios::app);
  if (!probe) throw CliError("cannot write " + path.string());
}

std::string prop_label(const ParsedProperty& p, std::size_t i) {
  return p.name.empty() ? "property#" + std::to_string(i + 1) : p.name;
}

void print_indented(std::ostream& os, const std::string& block,
                    const char* pad) {
  std::size_t start = 0;
  while (start < block.size()) {
    std::size_t nl = block.find('\n', start);
    if (nl == std::string::npos) nl = block.size();
    os << pad << block.substr(start, nl - start) << "\n";
    start = nl + 1;
  }
}

// --- check ----------------------------------------------------------------

int cmd_check(const fs::path& model_path, const fs::path& props_path,
              bool complete_selfloop, bool json, const fs::path& out_path) {
  Model m = load_model_file(model_path, complete_selfloop);
  auto props = load_props(props_path);
  ensure_writable(out_path);

  std::ostringstream os;
  nlohmann::ordered_json results = nlohmann::ordered_json::array();
  bool all_hold = true;
  for (std::size_t i = 0; i < props.size(); ++i) {
    std::string label = prop_label(props[i], i);
    Verdict v = check(m, props[i].body);
    all_hold &= v.holds;
    if (json) {
      nlohmann::ordered_json row;
      row["name"] = label;
      row["holds"] = v.holds;
      if (v.counterexample)
        row["cex"] = lasso_to_json(m, *v.counterexample);
      results.push_back(std::move(row));
    } else {
      os << label << ": " << (v.holds ? "proved" : "failed") << "\n";
      if (v.counterexample)
        print_indented(os, render_lasso_table(m, *v.counterexample), "  ");
    }
  }
  std::string text = json ? results.dump(2) + "\n" : os.str();
  std::cout << text;
  if (!out_path.empty()) write_text(out_path, text);
  return all_hold ? 0 : 1;
}

// --- vacuity ----------------------------------------------------------------

int cmd_vacuity(const fs::path& model_path, const fs::path& props_path,
                VacuityMode mode, bool complete_selfloop) {
  Model m = load_model_file(model_path, complete_selfloop);
  auto props = load_props(props_path);

  bool all_non_vacuous = true;
  for (std::size_t i = 0; i < props.size(); ++i) {
    std::string label = prop_label(props[i], i);
    VacuityReport vr = check_vacuity(m, props[i].body, mode);
    if (vr.verdict == VacuityVerdict::Fails) {
      std::cout << label << ": Fails (vacuity undefined)\n";
      all_non_vacuous = false;
      continue;
    }
    bool nv = vr.verdict == VacuityVerdict::NonVacuous;
    all_non_vacuous &= nv;
    std::cout << label << ": Non-Vacuous: " << (nv ? "True" : "False") << "\n";
    for (std::size_t k = 0; k < vr.occurrences.size(); ++k) {
      const OccurrenceCheck& occ = vr.occurrences[k];
      std::cout << "  occ " << k + 1;
      if (occ.simultaneous)
        std::cout << " [group of " << occ.paths.size() << "]";
      else
        std::cout << (occ.paths[0].polarity == Polarity::Positive ? " [+]"
                                                                  : " [-]");
      std::cout << " " << pretty_print(resolve(vr.formula, occ.paths[0]))
                << " : " << (occ.affects ? "affects" : "non-affecting")
                << "\n";
    }
    std::cout << "  witness: " << (vr.witness ? "found" : "none") << "\n";
  }
  return all_non_vacuous ? 0 : 1;
}

// --- coverage ---------------------------------------------------------------

int cmd_coverage(const fs::path& model_path, const fs::path& props_path,
                 CompositeRule rule, bool complete_selfloop) {
  Model m = load_model_file(model_path, complete_selfloop);
  auto props = load_props(props_path);

  std::vector<FormulaPtr> proved;
  for (std::size_t i = 0; i < props.size(); ++i) {
    Verdict v = check(m, props[i].body);
    if (!v.holds)
      throw CliError("coverage needs proved properties; " +
                     prop_label(props[i], i) + " fails on " + m.id);
    proved.push_back(props[i].body);
  }
  CoverageReport r = compute_coverage(m, proved, rule);

  std::size_t denom = detail::covered_vars(m).size();
  auto pct = [&](std::size_t n) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%5.1f", detail::percent_of(n, denom));
    return std::string(buf);
  };
  std::size_t name_w = std::string("property").size();
  for (std::size_t i = 0; i < props.size(); ++i)
    name_w = std::max(name_w, prop_label(props[i], i).size());
  auto pad = [&](std::string s) {
    s.resize(std::max(s.size(), name_w), ' ');
    return s;
  };
  std::cout << pad("property") << "  Checker COI %  Proof Core %\n";
  for (std::size_t i = 0; i < proved.size(); ++i) {
    const PropertyCoverage& pc = r.checker.per_property[i];
    std::cout << pad(prop_label(props[i], i)) << "  " << pct(pc.coi.size())
              << "          " << pct(pc.proof_core.size()) << "\n";
  }
  std::cout << "\n";
  std::cout << "checker   COI " << detail::pct(r.checker.coi_percent)
            << "%  proof core " << detail::pct(r.checker.proof_core_percent)
            << "%\n";
  std::cout << "stimuli   " << detail::pct(r.stimuli.percent) << "%  (toggle "
            << detail::pct(r.stimuli.toggle_percent) << "%, reachability "
            << detail::pct(r.stimuli.reachability_percent) << "%)\n";
  std::cout << "formal    COI " << detail::pct(r.formal.coi_percent)
            << "%  proof core " << detail::pct(r.formal.proof_core_percent)
            << "%  (" << composite_rule_name(rule) << ")\n";
  if (!r.checker.uncovered.empty()) {
    std::cout << "uncovered:";
    for (const std::string& v : r.checker.uncovered) std::cout << " " << v;
    std::cout << "\n";
  }
  return 0;
}

// --- pipeline ---------------------------------------------------------------

fs::path exe_directory(const char* argv0) {
  std::error_code ec;
  fs::path self = fs::read_symlink("/proc/self/exe", ec);
  if (!ec) return self.parent_path();
  fs::path fallback = fs::absolute(argv0, ec);
  return ec ? fs::current_path() : fallback.parent_path();
}

fs::path resolve_prompts_dir(const fs::path& flag, const char* argv0) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("VAPROP_PROMPTS"); env && *env)
    return env;
  return exe_directory(argv0) / ".." / "share" / "prompts";
}

struct PipelineArgs {
  fs::path model, spec, transcript, prompts, prompt_db;
  fs::path out, tcl, save_transcript;
  std::string provider = "replay";
  RunConfig cfg;
  bool complete_selfloop = false;
  bool json = false;
};

int cmd_pipeline(const PipelineArgs& a, const char* argv0) {
  Model m = load_model_file(a.model, a.complete_selfloop);
  SpecFile spec = ingest_spec(ojson::parse(read_file(a.spec)));

  fs::path prompts_dir = resolve_prompts_dir(a.prompts, argv0);
  PromptLibrary lib = PromptLibrary::from_directory(prompts_dir);
  fs::path db_path = a.prompt_db.empty()
                         ? prompts_dir.parent_path() / "prompt_db.txt"
                         : a.prompt_db;
  std::vector<RefinementEntry> db = load_prompt_db(db_path);

  ensure_writable(a.out);
  ensure_writable(a.tcl);
  ensure_writable(a.save_transcript);

  std::unique_ptr<Provider> provider;
  if (a.provider == "replay") {
    if (a.transcript.empty())
      throw CliError("--provider replay needs --transcript");
    provider = std::make_unique<ReplayProvider>(
        ReplayProvider::from_file(a.transcript));
  } else {
    HttpProviderConfig hc = http_config_from_env();
    if (hc.host.empty())
      throw CliError("--provider http needs VAPROP_PROVIDER_URL");
    provider = std::make_unique<HttpProvider>(hc);
  }

  RunReport report = run_pipeline(m, spec, lib, db, *provider, a.cfg);

  std::string text = a.json ? report_to_json(m, report).dump(2) + "\n"
                            : render_text_report(m, report);
  std::cout << text;
  if (!a.out.empty()) write_text(a.out, text);
  if (!a.tcl.empty()) write_text(a.tcl, emit_tcl_stub(report));
  if (!a.save_transcript.empty())
    save_transcript(a.save_transcript, report.exchanges);

  if (report.bug_count > 0) return 1;
  if (!report.threshold_met) return 3;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vacuity-aware property verification toolkit"};
  app.require_subcommand(1);

  fs::path model, props, out;
  bool complete_selfloop = false;
  bool json = false;
  std::string mode = "single";
  std::string rule = "product";

  auto add_common = [&](CLI::App* sub, bool with_props) {
    sub->add_option("--model", model, "model JSON file")
        ->required();
    if (with_props)
      sub->add_option("--props", props, "property file")->required();
    sub->add_flag("--complete-selfloop", complete_selfloop,
                  "give deadlocked states a self loop instead of failing");
  };

  CLI::App* c_check = app.add_subcommand("check", "model check properties");
  add_common(c_check, true);
  c_check->add_flag("--json", json, "machine-readable output");
  c_check->add_option("--out", out, "also write the output to a file");

  CLI::App* c_vac =
      app.add_subcommand("vacuity", "vacuity analysis per property");
  add_common(c_vac, true);
  c_vac->add_option("--mode", mode, "single | all-occurrences")
      ->check(CLI::IsMember({"single", "all-occurrences"}));

  CLI::App* c_cov = app.add_subcommand("coverage", "coverage of proved set");
  add_common(c_cov, true);
  c_cov->add_option("--rule", rule, "product | min | harmonic")
      ->check(CLI::IsMember({"product", "min", "harmonic"}));

  PipelineArgs pa;
  std::string p_mode = "single";
  std::string p_rule = "product";
  CLI::App* c_pipe =
      app.add_subcommand("pipeline", "generate, vet, check, refine");
  c_pipe->add_option("--model", pa.model, "model JSON file")->required();
  c_pipe->add_option("--spec", pa.spec, "design document JSON")->required();
  c_pipe->add_option("--provider", pa.provider, "replay | http")
      ->check(CLI::IsMember({"replay", "http"}));
  c_pipe->add_option("--transcript", pa.transcript,
                     "recorded exchanges for --provider replay");
  c_pipe->add_option("--threshold", pa.cfg.threshold,
                     "formal COI gate, percent")
      ->check(CLI::Range(0.0, 100.0));
  c_pipe->add_option("--max-iter", pa.cfg.max_iterations,
                     "refinement iteration cap")
      ->check(CLI::Range(0, 1000));
  c_pipe->add_option("--mode", p_mode, "single | all-occurrences")
      ->check(CLI::IsMember({"single", "all-occurrences"}));
  c_pipe->add_option("--rule", p_rule, "product | min | harmonic")
      ->check(CLI::IsMember({"product", "min", "harmonic"}));
  c_pipe->add_option("--prompts", pa.prompts, "prompt template directory");
  c_pipe->add_option("--prompt-db", pa.prompt_db, "refinement hint file");
  c_pipe->add_option("--out", pa.out, "also write the report to a file");
  c_pipe->add_option("--tcl", pa.tcl, "write an interop stub script");
  c_pipe->add_option("--save-transcript", pa.save_transcript,
                     "record exchanges for later replay");
  c_pipe->add_flag("--threats", pa.cfg.include_threats,
                   "include the threat-model section in generation");
  c_pipe->add_flag("--json", pa.json, "machine-readable report");
  c_pipe->add_flag("--complete-selfloop", pa.complete_selfloop,
                   "give deadlocked states a self loop instead of failing");

  CLI11_PARSE(app, argc, argv);

  auto parse_mode = [](const std::string& s) {
    return s == "all-occurrences" ? VacuityMode::AllOccurrences
                                  : VacuityMode::SingleOccurrence;
  };
  auto parse_rule = [](const std::string& s) {
    if (s == "min") return CompositeRule::Min;
    if (s == "harmonic") return CompositeRule::Harmonic;
    return CompositeRule::Product;
  };

  try {
    if (app.got_subcommand(c_check))
      return cmd_check(model, props, complete_selfloop, json, out);
    if (app.got_subcommand(c_vac))
      return cmd_vacuity(model, props, parse_mode(mode), complete_selfloop);
    if (app.got_subcommand(c_cov))
      return cmd_coverage(model, props, parse_rule(rule), complete_selfloop);
    pa.cfg.mode = parse_mode(p_mode);
    pa.cfg.rule = parse_rule(p_rule);
    return cmd_pipeline(pa, argv[0]);
  } catch (const std::exception& e) {
    std::cerr << "vaprop: " << e.what() << "\n";
    return 2;
  }
}
