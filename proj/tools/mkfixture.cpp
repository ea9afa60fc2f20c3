// Fixture authoring helper: runs the pipeline against a scripted response
// file and records the exchanges as a replay transcript. The printed summary
// is the raw material for a fixture manifest; numbers still get checked by
// hand before they are frozen.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vaprop/model.hpp"
#include "vaprop/pipeline.hpp"
#include "vaprop/report.hpp"

namespace fs = std::filesystem;
using namespace vaprop;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream body;
  body << in.rdbuf();
  return body.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"record a replay transcript from scripted responses"};
  fs::path model_path, spec_path, script_path, prompts_dir, db_path, out_path;
  RunConfig cfg;
  app.add_option("--model", model_path)->required();
  app.add_option("--spec", spec_path)->required();
  app.add_option("--script", script_path, "JSON {\"responses\": [...]}")
      ->required();
  app.add_option("--prompts", prompts_dir)->required();
  app.add_option("--prompt-db", db_path)->required();
  app.add_option("--out-transcript", out_path)->required();
  app.add_option("--threshold", cfg.threshold);
  app.add_option("--max-iter", cfg.max_iterations);
  app.add_flag("--threats", cfg.include_threats);
  CLI11_PARSE(app, argc, argv);

  try {
    Model m = load_model_file(model_path);
    SpecFile spec = ingest_spec(ojson::parse(read_file(spec_path)), true);
    PromptLibrary lib = PromptLibrary::from_directory(prompts_dir);
    auto db = load_prompt_db(db_path);

    std::vector<std::string> responses;
    ojson script = ojson::parse(read_file(script_path));
    for (const auto& r : script["responses"])
      responses.push_back(r.get<std::string>());
    ScriptedProvider provider(responses);

    RunReport report = run_pipeline(m, spec, lib, db, provider, cfg);
    save_transcript(out_path, report.exchanges);

    nlohmann::ordered_json summary;
    summary["funnel"] = {{"generated", report.funnel.generated},
                         {"correct", report.funnel.correct},
                         {"non_vacuous", report.funnel.non_vacuous},
                         {"sva_emitted", report.funnel.sva_emitted},
                         {"sva_correct", report.funnel.sva_correct},
                         {"proved", report.funnel.proved},
                         {"failed", report.funnel.failed}};
    summary["bugs"] = report.bug_count;
    summary["threshold_met"] = report.threshold_met;
    summary["trajectory_points"] = report.trajectory.size();
    auto& traj = summary["formal_coi_trajectory"] =
        nlohmann::ordered_json::array();
    for (const IterationCoverage& pt : report.trajectory)
      traj.push_back(pt.formal_coi);
    summary["exchanges"] = report.exchanges.size();
    summary["incomplete"] = report.incomplete;
    summary["unused_responses"] = provider.remaining();
    summary["warnings"] = report.warnings;
    std::cout << summary.dump(2) << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "mkfixture: " << e.what() << "\n";
    return 2;
  }
}
