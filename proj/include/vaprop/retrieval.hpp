// Keyword retrieval over fixed-size overlapping text windows. Deliberately
// small: term-frequency scoring is enough to surface the right spec fragment
// for a prompt, and it is fully deterministic.
#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace vaprop {

struct Chunk {
  std::uint32_t id = 0;  // position in the corpus, also the rank tiebreak
  std::string doc;       // source document name
  std::string text;
};

struct Retrieved {
  Chunk chunk;
  double score = 0.0;
};

namespace detail {

// Lowercase alnum runs; '_' separates, so "rx_parity_err" yields three terms
// and a query for "parity" still lands on it.
inline std::vector<std::string> retrieval_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace detail

inline std::vector<Chunk> build_corpus(
    const std::vector<std::pair<std::string, std::string>>& docs,
    std::size_t window = 320, std::size_t overlap = 64) {
  if (window == 0 || overlap >= window)
    window = std::max<std::size_t>(window, overlap + 1);
  std::vector<Chunk> corpus;
  std::uint32_t next_id = 0;
  for (const auto& [name, text] : docs) {
    if (text.empty()) continue;
    std::size_t start = 0;
    while (true) {
      std::size_t len = std::min(window, text.size() - start);
      corpus.push_back({next_id++, name, text.substr(start, len)});
      if (start + len >= text.size()) break;
      start += window - overlap;
    }
  }
  return corpus;
}

// Score = total occurrences of the query's distinct terms in the chunk.
// Ties break toward earlier chunks; k past the corpus size returns everything.
inline std::vector<Retrieved> retrieve_context(const std::vector<Chunk>& corpus,
                                               const std::string& query,
                                               std::size_t k) {
  std::unordered_set<std::string> terms;
  for (auto& t : detail::retrieval_tokens(query)) terms.insert(std::move(t));
  std::vector<Retrieved> scored;
  scored.reserve(corpus.size());
  for (const Chunk& c : corpus) {
    double score = 0.0;
    for (const auto& tok : detail::retrieval_tokens(c.text))
      if (terms.count(tok)) score += 1.0;
    scored.push_back({c, score});
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const Retrieved& a, const Retrieved& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.chunk.id < b.chunk.id;
                   });
  scored.resize(std::min(k, scored.size()));
  return scored;
}

}  // namespace vaprop
