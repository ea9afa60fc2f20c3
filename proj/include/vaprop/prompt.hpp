// Prompt templates and the refinement hint database. Templates live as plain
// text files with {placeholder} slots; rendering is strict so a missing value
// fails loudly instead of shipping a half-filled prompt.
#pragma once

#include <cctype>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vaprop {

struct PromptError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class PromptStage {
  SystemSetup,
  VacuityRules,
  VacuityEval,
  CexAnalysis,
  SvaFix,
  Refinement,
  SpecExtraction,
};

inline const char* stage_name(PromptStage s) {
  switch (s) {
    case PromptStage::SystemSetup: return "system-setup";
    case PromptStage::VacuityRules: return "vacuity-rules";
    case PromptStage::VacuityEval: return "vacuity-eval";
    case PromptStage::CexAnalysis: return "cex-analysis";
    case PromptStage::SvaFix: return "sva-fix";
    case PromptStage::Refinement: return "refinement";
    case PromptStage::SpecExtraction: return "spec-extraction";
  }
  return "unknown";
}

inline constexpr PromptStage kAllStages[] = {
    PromptStage::SystemSetup,  PromptStage::VacuityRules,
    PromptStage::VacuityEval,  PromptStage::CexAnalysis,
    PromptStage::SvaFix,       PromptStage::Refinement,
    PromptStage::SpecExtraction,
};

struct Prompt {
  PromptStage stage;
  std::string text;
};

namespace detail {

// A slot is {lowercase_identifier}; JSON braces in embedded examples do not
// qualify and pass through untouched.
inline bool is_slot_body(const std::string& body) {
  if (body.empty()) return false;
  if (!std::islower(static_cast<unsigned char>(body[0]))) return false;
  for (unsigned char c : body)
    if (!std::islower(c) && !std::isdigit(c) && c != '_') return false;
  return true;
}

}  // namespace detail

class PromptLibrary {
 public:
  static PromptLibrary from_directory(const std::filesystem::path& dir) {
    PromptLibrary lib;
    for (PromptStage s : kAllStages) {
      std::filesystem::path file = dir / (std::string(stage_name(s)) + ".txt");
      std::ifstream in(file);
      if (!in)
        throw PromptError("prompt: cannot read template " + file.string());
      std::ostringstream body;
      body << in.rdbuf();
      lib.templates_[s] = body.str();
    }
    return lib;
  }

  const std::string& raw(PromptStage s) const { return templates_.at(s); }

  Prompt render(PromptStage s,
                const std::map<std::string, std::string>& values) const {
    const std::string& tpl = templates_.at(s);
    std::string out;
    out.reserve(tpl.size());
    std::size_t i = 0;
    while (i < tpl.size()) {
      if (tpl[i] != '{') {
        out.push_back(tpl[i++]);
        continue;
      }
      std::size_t close = tpl.find('}', i + 1);
      std::string body =
          close == std::string::npos ? "" : tpl.substr(i + 1, close - i - 1);
      if (!detail::is_slot_body(body)) {
        out.push_back(tpl[i++]);
        continue;
      }
      auto it = values.find(body);
      if (it == values.end())
        throw PromptError(std::string("prompt: template ") + stage_name(s) +
                          " slot {" + body + "} has no value");
      out += it->second;
      i = close + 1;
    }
    return {s, std::move(out)};
  }

 private:
  std::map<PromptStage, std::string> templates_;
};

// One line of the refinement database, tagged by the coverage theme its
// keywords point at so selection can match themes to what is still uncovered.
struct RefinementEntry {
  std::string text;
  std::string tag;  // reset | corner | sequential | unreachable | multi-cycle
};

namespace detail {

inline std::string refinement_tag(const std::string& line) {
  std::string low;
  low.reserve(line.size());
  for (unsigned char c : line) low.push_back(static_cast<char>(std::tolower(c)));
  if (low.find("reset") != std::string::npos) return "reset";
  if (low.find("corner") != std::string::npos) return "corner";
  if (low.find("sequential") != std::string::npos) return "sequential";
  if (low.find("unreachable") != std::string::npos) return "unreachable";
  if (low.find("multi-cycle") != std::string::npos ||
      low.find("multi cycle") != std::string::npos)
    return "multi-cycle";
  return "general";
}

}  // namespace detail

// Line-oriented: one hint per line, '#' comments, optional surrounding quotes.
inline std::vector<RefinementEntry> load_prompt_db(
    const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw PromptError("prompt: cannot read database " + file.string());
  std::vector<RefinementEntry> db;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.pop_back();
    std::size_t first = line.find_first_not_of(' ');
    if (first == std::string::npos) continue;
    line = line.substr(first);
    if (line[0] == '#') continue;
    if (line.size() >= 2 && line.front() == '"' && line.back() == '"')
      line = line.substr(1, line.size() - 2);
    if (line.empty()) continue;
    db.push_back({line, detail::refinement_tag(line)});
  }
  return db;
}

// Pick the next hint in file order, preferring entries whose tag matches an
// active theme, falling back to any unused entry, and wrapping once the
// database is exhausted. Returns the chosen index; db must be non-empty.
inline std::size_t select_refinement(const std::vector<RefinementEntry>& db,
                                     std::set<std::size_t>& used,
                                     const std::set<std::string>& themes) {
  if (db.empty()) throw PromptError("prompt: refinement database is empty");
  if (used.size() >= db.size()) used.clear();
  for (std::size_t i = 0; i < db.size(); ++i)
    if (!used.count(i) && themes.count(db[i].tag)) {
      used.insert(i);
      return i;
    }
  for (std::size_t i = 0; i < db.size(); ++i)
    if (!used.count(i)) {
      used.insert(i);
      return i;
    }
  used.clear();
  used.insert(0);
  return 0;
}

}  // namespace vaprop
