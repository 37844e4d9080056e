#pragma once

#include <cstdio>
#include <filesystem>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <spdlog/spdlog.h>

#include "crossfill/experts.hpp"

namespace crossfill {

/// Source of ranked text snippets for a query. Implementations throw on
/// infrastructure failure; the expert turns that into an empty list.
class SearchBackend {
 public:
  virtual ~SearchBackend() = default;
  virtual std::vector<std::string> query(std::string_view text, std::size_t max_results) const = 0;
};

/// Offline backend: `<dir>/<hash>.txt` holds one snippet per line, best first,
/// where hash is the 16-hex-digit FNV-1a of the folded query.
class FixtureSearchBackend final : public SearchBackend {
 public:
  explicit FixtureSearchBackend(std::filesystem::path dir) : dir_(std::move(dir)) {}

  static std::string file_name(std::string_view query) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(text::fnv1a(text::fold(query))));
    return std::string(buf) + ".txt";
  }

  /// Writes a fixture entry; used to build fixture directories.
  static void write(const std::filesystem::path& dir, std::string_view query, const std::vector<std::string>& snippets) {
    std::string body;
    for (const auto& s : snippets) body += s + "\n";
    write_file(dir / file_name(query), body);
  }

  std::vector<std::string> query(std::string_view text, std::size_t max_results) const override {
    if (!std::filesystem::is_directory(dir_)) throw Error("search fixture directory missing: " + dir_.string());
    const auto path = dir_ / file_name(text);
    std::vector<std::string> out;
    if (!std::filesystem::exists(path)) return out;
    const std::string content = read_file(path);
    for (auto line : text::lines(content)) {
      if (out.size() >= max_results) break;
      if (!text::trim(line).empty()) out.emplace_back(line);
    }
    return out;
  }

 private:
  std::filesystem::path dir_;
};

/// Backend with no documents.
class EmptySearchBackend final : public SearchBackend {
 public:
  std::vector<std::string> query(std::string_view, std::size_t) const override { return {}; }
};

class Stoplist {
 public:
  Stoplist() = default;
  explicit Stoplist(const std::vector<std::string>& words) {
    for (const auto& w : words) {
      try {
        if (auto n = text::normalize_answer(w); !n.empty()) words_.insert(std::move(n));
      } catch (const Error&) {
      }
    }
  }

  bool contains(std::string_view normalized) const { return words_.count(std::string(normalized)) > 0; }
  std::size_t size() const { return words_.size(); }

 private:
  std::set<std::string, std::less<>> words_;
};

inline Stoplist parse_stoplist(std::string_view content) {
  std::vector<std::string> words;
  for (auto line : text::lines(content)) {
    line = text::trim(line);
    if (!line.empty()) words.emplace_back(line);
  }
  return Stoplist(words);
}

inline Stoplist load_stoplist(const std::filesystem::path& path) { return parse_stoplist(read_file(path)); }

struct WebSearchConfig {
  std::size_t max_snippets = 10;
  std::size_t max_ngram = 3;
};

/// Mines snippets for single tokens and concatenations of up to three
/// adjacent tokens. Each occurrence in the snippet at rank r scores 1/r.
/// N-grams that start or end with a stopword, equal a stopword, or repeat a
/// word of the clue itself are not candidates.
class WebSearchExpert final : public Expert {
 public:
  WebSearchExpert(std::shared_ptr<const SearchBackend> backend, std::shared_ptr<const Stoplist> stoplist,
                  WebSearchConfig config = {})
      : backend_(std::move(backend)), stoplist_(std::move(stoplist)), config_(config) {}

  const std::string& id() const override { return id_; }

  CandidateList generate(std::string_view clue, int length) const override {
    return CandidateList::from_scores(std::string(clue), id_, length, detail::as_pairs(scores(clue)));
  }

  std::vector<Candidate> generate_any_length(std::string_view clue) const override {
    return detail::normalized_any_length(scores(clue));
  }

 private:
  static std::vector<std::string> letter_tokens(std::string_view s) {
    std::vector<std::string> out;
    for (auto& t : text::tokenize(s)) {
      if (std::all_of(t.begin(), t.end(), [](char c) { return c >= 'a' && c <= 'z'; })) {
        out.push_back(text::to_upper_ascii(t));
      } else {
        out.emplace_back();  // digit-bearing token: breaks adjacency
      }
    }
    return out;
  }

  std::map<std::string, double> scores(std::string_view clue) const {
    std::map<std::string, double> out;
    std::vector<std::string> snippets;
    try {
      snippets = backend_->query(clue, config_.max_snippets);
    } catch (const std::exception& e) {
      spdlog::warn("websearch: backend failed for '{}': {}", clue, e.what());
      return out;
    }
    std::set<std::string> clue_words;
    for (auto& t : letter_tokens(clue)) clue_words.insert(std::move(t));
    for (std::size_t rank = 0; rank < snippets.size(); ++rank) {
      const double weight = 1.0 / static_cast<double>(rank + 1);
      const auto tokens = letter_tokens(snippets[rank]);
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        std::string gram;
        for (std::size_t n = 1; n <= config_.max_ngram && i + n <= tokens.size(); ++n) {
          const std::string& last = tokens[i + n - 1];
          if (last.empty()) break;
          gram += last;
          if (stoplist_->contains(tokens[i]) || stoplist_->contains(last) || stoplist_->contains(gram)) continue;
          if (clue_words.count(gram)) continue;
          out[gram] += weight;
        }
      }
    }
    return out;
  }

  std::string id_{expert_ids::kWebSearch};
  std::shared_ptr<const SearchBackend> backend_;
  std::shared_ptr<const Stoplist> stoplist_;
  WebSearchConfig config_;
};

}  // namespace crossfill
