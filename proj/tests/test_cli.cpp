// End-to-end tests that drive the vaprop binary the way a user would.
// Each case runs the real executable against committed fixture files and
// checks stdout plus the exit code.

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using Catch::Matchers::ContainsSubstring;

namespace {

const std::string kCli = VAPROP_CLI_PATH;
const std::string kSrc = VAPROP_SOURCE_DIR;
const std::string kFix = kSrc + "/tests/fixtures";

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr interleaved
};

RunResult run_shell(const std::string& cmd) {
  std::array<char, 4096> buf{};
  RunResult r;
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    r.output.append(buf.data(), n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

RunResult run_cli(const std::string& args) { return run_shell(kCli + " " + args); }

std::string q(const std::string& path) { return "'" + path + "'"; }

}  // namespace

// ---------------------------------------------------------------------------
// check

TEST_CASE("cli check: proved property exits 0") {
  RunResult r = run_cli("check --model " + q(kFix + "/models/toy.json") +
                        " --props " + q(kFix + "/props/gp.sva"));
  CHECK(r.exit_code == 0);
  CHECK_THAT(r.output, ContainsSubstring("p_invariant: proved"));
  CHECK(r.output.find("failed") == std::string::npos);
}

TEST_CASE("cli check: failing property prints a lasso table and exits 1") {
  std::string args = "check --model " + q(kFix + "/models/des3.json") +
                     " --props " + q(kFix + "/props/p_k_update.sva");
  RunResult r = run_cli(args);
  CHECK(r.exit_code == 1);
  CHECK_THAT(r.output, ContainsSubstring("p_k_update: failed"));
  CHECK_THAT(r.output, ContainsSubstring("step"));
  CHECK_THAT(r.output, ContainsSubstring("roundSel"));
  CHECK_THAT(r.output, ContainsSubstring("repeat forever"));
  CHECK_THAT(r.output, ContainsSubstring("*"));  // loop-start marker

  // counterexample rendering is deterministic across runs
  RunResult again = run_cli(args);
  CHECK(again.output == r.output);
  CHECK(again.exit_code == 1);
}

TEST_CASE("cli check: missing input is exit 2 with the path in the message") {
  RunResult r = run_cli("check --model /no/such/model.json --props " +
                        q(kFix + "/props/gp.sva"));
  CHECK(r.exit_code == 2);
  CHECK_THAT(r.output, ContainsSubstring("/no/such/model.json"));

  RunResult r2 = run_cli("check --model " + q(kFix + "/models/toy.json") +
                         " --props /no/such/props.sva");
  CHECK(r2.exit_code == 2);
  CHECK_THAT(r2.output, ContainsSubstring("/no/such/props.sva"));
}

TEST_CASE("cli check: json output carries verdicts and the counterexample") {
  RunResult r = run_cli("check --json --model " +
                        q(kFix + "/models/des3.json") + " --props " +
                        q(kFix + "/props/p_k_update.sva"));
  CHECK(r.exit_code == 1);
  auto j = nlohmann::json::parse(r.output);
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 1);
  CHECK(j[0]["name"] == "p_k_update");
  CHECK(j[0]["holds"] == false);
  CHECK(j[0]["cex"].contains("loop"));
}

// ---------------------------------------------------------------------------
// vacuity

TEST_CASE("cli vacuity: vacuous pass, non-vacuous pass, failing property") {
  RunResult vac = run_cli("vacuity --model " +
                          q(kFix + "/models/never-p.json") + " --props " +
                          q(kFix + "/props/eq1.sva"));
  CHECK(vac.exit_code == 1);
  CHECK_THAT(vac.output, ContainsSubstring("Non-Vacuous: False"));
  CHECK_THAT(vac.output, ContainsSubstring("non-affecting"));
  CHECK_THAT(vac.output, ContainsSubstring("witness: none"));

  RunResult live = run_cli("vacuity --model " +
                           q(kFix + "/models/live-pq.json") + " --props " +
                           q(kFix + "/props/eq1.sva"));
  CHECK(live.exit_code == 0);
  CHECK_THAT(live.output, ContainsSubstring("Non-Vacuous: True"));
  CHECK_THAT(live.output, ContainsSubstring("witness: found"));

  RunResult fails = run_cli("vacuity --model " +
                            q(kFix + "/models/des3.json") + " --props " +
                            q(kFix + "/props/p_k_update.sva"));
  CHECK(fails.exit_code == 1);
  CHECK_THAT(fails.output,
             ContainsSubstring("p_k_update: Fails (vacuity undefined)"));
}

TEST_CASE("cli vacuity: antecedent-only counter property is vacuous") {
  RunResult r = run_cli(
      "vacuity --model " + q(kFix + "/models/counter-stuck.json") +
      " --props " + q(kFix + "/props/p_validCounter_decrement.sva"));
  CHECK(r.exit_code == 1);
  CHECK_THAT(r.output, ContainsSubstring(
                           "p_validCounter_decrement: Non-Vacuous: False"));
  // the consequent never fires, so its occurrence cannot affect the verdict
  CHECK_THAT(r.output, ContainsSubstring("$past(validCounter)"));
  CHECK_THAT(r.output, ContainsSubstring("non-affecting"));
}

// ---------------------------------------------------------------------------
// coverage

TEST_CASE("cli coverage: table matches the library's numbers") {
  RunResult r = run_cli("coverage --model " + q(kFix + "/models/toy.json") +
                        " --props " + q(kFix + "/props/gp.sva"));
  CHECK(r.exit_code == 0);
  CHECK_THAT(r.output, ContainsSubstring("Checker COI %"));
  CHECK_THAT(r.output, ContainsSubstring("Proof Core %"));
  CHECK_THAT(r.output, ContainsSubstring("p_invariant"));
  CHECK_THAT(r.output, ContainsSubstring("checker   COI 100.0%"));
  CHECK_THAT(r.output, ContainsSubstring("reachability 100.0%"));
  CHECK_THAT(r.output, ContainsSubstring("(product)"));
}

TEST_CASE("cli coverage: failing property is an input error") {
  RunResult r = run_cli("coverage --model " + q(kFix + "/models/des3.json") +
                        " --props " + q(kFix + "/props/p_k_update.sva"));
  CHECK(r.exit_code == 2);
  CHECK_THAT(r.output, ContainsSubstring("p_k_update"));
  CHECK_THAT(r.output, ContainsSubstring("fails"));
}

TEST_CASE("cli coverage: composite rule flag changes the combiner") {
  RunResult r = run_cli("coverage --rule min --model " +
                        q(kFix + "/models/toy.json") + " --props " +
                        q(kFix + "/props/gp.sva"));
  CHECK(r.exit_code == 0);
  CHECK_THAT(r.output, ContainsSubstring("(min)"));
  CHECK_THAT(r.output, ContainsSubstring("formal    COI 50.0%"));
}

// ---------------------------------------------------------------------------
// pipeline (replay)

TEST_CASE("cli pipeline: toy-uart replay reproduces the manifest") {
  std::string args = "pipeline --model " + q(kFix + "/toy-uart/model.json") +
                     " --spec " + q(kFix + "/toy-uart/spec.json") +
                     " --provider replay --transcript " +
                     q(kFix + "/toy-uart/transcript.json") + " --prompts " +
                     q(kSrc + "/share/prompts");
  RunResult r = run_cli(args);
  CHECK(r.exit_code == 0);
  CHECK_THAT(r.output, ContainsSubstring("generated     6"));
  CHECK_THAT(r.output, ContainsSubstring("correct       5"));
  CHECK_THAT(r.output, ContainsSubstring("non-vacuous   4"));
  CHECK_THAT(r.output, ContainsSubstring("proved        4"));
  CHECK_THAT(r.output, ContainsSubstring("failed        0"));
  CHECK_THAT(r.output, ContainsSubstring("threshold 80.0%: met"));
  CHECK_THAT(r.output, ContainsSubstring("iter 0: formal COI 72.0%"));
  CHECK_THAT(r.output, ContainsSubstring("iter 1: formal COI 90.0%"));
  CHECK_THAT(r.output,
             ContainsSubstring("Include sequential behavior checks."));
}

TEST_CASE("cli pipeline: json report is stable modulo the timestamp") {
  std::string args = "pipeline --json --model " +
                     q(kFix + "/toy-uart/model.json") + " --spec " +
                     q(kFix + "/toy-uart/spec.json") +
                     " --provider replay --transcript " +
                     q(kFix + "/toy-uart/transcript.json") + " --prompts " +
                     q(kSrc + "/share/prompts");
  RunResult a = run_cli(args);
  RunResult b = run_cli(args);
  CHECK(a.exit_code == 0);
  auto ja = nlohmann::ordered_json::parse(a.output);
  auto jb = nlohmann::ordered_json::parse(b.output);
  CHECK(ja["funnel"]["generated"] == 6);
  CHECK(ja["funnel"]["proved"] == 4);
  CHECK(ja["threshold_met"] == true);
  CHECK(ja["bugs"] == 0);
  CHECK(ja["records"].size() == 6);
  ja.erase("timestamp");
  jb.erase("timestamp");
  CHECK(ja.dump(2) == jb.dump(2));
}

TEST_CASE("cli pipeline: bug fixture exits 1 and names the asset") {
  RunResult r = run_cli(
      "pipeline --model " + q(kFix + "/uart-parity-bug/model.json") +
      " --spec " + q(kFix + "/uart-parity-bug/spec.json") +
      " --provider replay --transcript " +
      q(kFix + "/uart-parity-bug/transcript.json") + " --prompts " +
      q(kSrc + "/share/prompts"));
  CHECK(r.exit_code == 1);
  CHECK_THAT(r.output, ContainsSubstring("bugs (1):"));
  CHECK_THAT(r.output, ContainsSubstring("p_parity_err_gated"));
  CHECK_THAT(r.output, ContainsSubstring("uart_rx_integrity"));
  CHECK_THAT(r.output, ContainsSubstring("counterexamples:"));
}

TEST_CASE("cli pipeline: unreachable threshold exits 3") {
  RunResult r = run_cli(
      "pipeline --threshold 99 --max-iter 1 --model " +
      q(kFix + "/toy-uart/model.json") + " --spec " +
      q(kFix + "/toy-uart/spec.json") + " --provider replay --transcript " +
      q(kFix + "/toy-uart/transcript.json") + " --prompts " +
      q(kSrc + "/share/prompts"));
  CHECK(r.exit_code == 3);
  CHECK_THAT(r.output, ContainsSubstring("threshold 99.0%: NOT met"));
}

TEST_CASE("cli pipeline: replay without a transcript is a config error") {
  RunResult r = run_cli("pipeline --model " + q(kFix + "/toy-uart/model.json") +
                        " --spec " + q(kFix + "/toy-uart/spec.json") +
                        " --provider replay --prompts " +
                        q(kSrc + "/share/prompts"));
  CHECK(r.exit_code == 2);
  CHECK_THAT(r.output, ContainsSubstring("--transcript"));
}

TEST_CASE("cli pipeline: prompts directory can come from the environment") {
  // no --prompts flag; VAPROP_PROMPTS carries the location instead
  RunResult r = run_shell(
      "env VAPROP_PROMPTS=" + q(kSrc + "/share/prompts") + " " + kCli +
      " pipeline --model " + q(kFix + "/toy-uart/model.json") + " --spec " +
      q(kFix + "/toy-uart/spec.json") + " --provider replay --transcript " +
      q(kFix + "/toy-uart/transcript.json"));
  CHECK(r.exit_code == 0);
  CHECK_THAT(r.output, ContainsSubstring("threshold 80.0%: met"));
}

TEST_CASE("cli pipeline: tcl stub and report files are written") {
  auto dir = std::filesystem::temp_directory_path() / "vaprop-cli-out";
  std::filesystem::create_directories(dir);
  auto tcl = dir / "props.tcl";
  auto out = dir / "report.txt";
  std::filesystem::remove(tcl);
  std::filesystem::remove(out);
  RunResult r = run_cli(
      "pipeline --model " + q(kFix + "/toy-uart/model.json") + " --spec " +
      q(kFix + "/toy-uart/spec.json") + " --provider replay --transcript " +
      q(kFix + "/toy-uart/transcript.json") + " --prompts " +
      q(kSrc + "/share/prompts") + " --tcl " + q(tcl.string()) + " --out " +
      q(out.string()));
  CHECK(r.exit_code == 0);
  std::ifstream tin(tcl);
  std::stringstream tcl_body;
  tcl_body << tin.rdbuf();
  CHECK_THAT(tcl_body.str(), ContainsSubstring("assert -name p_tx_handshake"));
  std::ifstream oin(out);
  std::stringstream out_body;
  out_body << oin.rdbuf();
  CHECK(out_body.str() == r.output);
}

TEST_CASE("cli: bad flag values are rejected by the parser") {
  RunResult r = run_cli("pipeline --threshold 150 --model x --spec y");
  CHECK(r.exit_code != 0);
  RunResult r2 = run_cli("vacuity --mode bogus --model x --props y");
  CHECK(r2.exit_code != 0);
  RunResult r3 = run_cli("bogus-subcommand");
  CHECK(r3.exit_code != 0);
}
