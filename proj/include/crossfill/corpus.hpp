#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crossfill/puzzle.hpp"
#include "crossfill/text.hpp"

namespace crossfill {

struct ClueRecord {
  std::string clue;
  std::string answer;  // normalized
  std::string source;
  std::uint64_t frequency = 1;

  bool operator==(const ClueRecord&) const = default;
};

struct LoadWarning {
  std::size_t line = 0;
  std::string message;
};

struct LoadOptions {
  /// Loading fails when more than this fraction of non-blank lines is malformed.
  double max_skipped_fraction = 0.01;
};

/// Historical clue/answer pairs, deduplicated on (clue, answer).
class ClueDb {
 public:
  ClueDb() = default;

  /// Adds a record, merging frequency into an existing identical pair.
  void add(ClueRecord record) {
    const auto key = std::make_pair(record.clue, record.answer);
    if (auto it = lookup_.find(key); it != lookup_.end()) {
      records_[it->second].frequency += record.frequency;
      return;
    }
    lookup_.emplace(key, records_.size());
    records_.push_back(std::move(record));
  }

  const std::vector<ClueRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

 private:
  std::vector<ClueRecord> records_;
  std::map<std::pair<std::string, std::string>, std::size_t> lookup_;
};

template <typename T>
struct Loaded {
  T value;
  std::vector<LoadWarning> warnings;
  std::size_t lines = 0;
};

namespace detail {

inline void check_skip_budget(std::string_view what, std::size_t skipped, std::size_t total, const LoadOptions& opts) {
  if (total == 0) return;
  const double fraction = static_cast<double>(skipped) / static_cast<double>(total);
  if (fraction > opts.max_skipped_fraction) {
    throw Error(std::string(what) + ": " + std::to_string(skipped) + " of " + std::to_string(total) +
                " lines malformed, above the allowed fraction");
  }
}

}  // namespace detail

/// Parses `clue<TAB>answer<TAB>source<TAB>frequency` lines.
inline Loaded<ClueDb> parse_clue_db(std::string_view content, const LoadOptions& opts = {}) {
  Loaded<ClueDb> out;
  std::size_t line_no = 0;
  for (std::string_view line : text::lines(content)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    ++out.lines;
    const auto fields = text::split(line, '\t');
    const auto warn = [&](std::string msg) { out.warnings.push_back({line_no, std::move(msg)}); };
    if (fields.size() != 4) {
      warn("expected 4 tab-separated fields, found " + std::to_string(fields.size()));
      continue;
    }
    const auto freq = text::parse_int<std::uint64_t>(fields[3]);
    if (!freq || *freq == 0) {
      warn("frequency must be a positive integer");
      continue;
    }
    const std::string_view clue = text::trim(fields[0]);
    if (clue.empty()) {
      warn("empty clue");
      continue;
    }
    std::string answer;
    try {
      answer = text::normalize_answer(fields[1]);
    } catch (const Error& e) {
      warn(e.what());
      continue;
    }
    if (answer.empty()) {
      warn("empty answer");
      continue;
    }
    out.value.add(ClueRecord{std::string(clue), std::move(answer), std::string(text::trim(fields[2])), *freq});
  }
  detail::check_skip_budget("clue corpus", out.warnings.size(), out.lines, opts);
  return out;
}

inline Loaded<ClueDb> load_clue_db(const std::filesystem::path& path, const LoadOptions& opts = {}) {
  return parse_clue_db(read_file(path), opts);
}

/// Word list with frequencies and wildcard pattern lookup (`?` matches any letter).
class Lexicon {
 public:
  struct Entry {
    std::string word;
    std::uint64_t frequency = 0;
  };

  Lexicon() = default;

  explicit Lexicon(const std::vector<std::pair<std::string, std::uint64_t>>& words) {
    std::map<std::string, std::uint64_t> merged;
    for (const auto& [w, f] : words) merged[w] += f;
    for (auto& [w, f] : merged) {
      if (w.empty() || f == 0) continue;
      auto& bucket = by_length_[w.size()];
      bucket.entries.push_back({w, f});
    }
    for (auto& [len, bucket] : by_length_) {
      std::sort(bucket.entries.begin(), bucket.entries.end(), [](const Entry& a, const Entry& b) {
        return a.frequency != b.frequency ? a.frequency > b.frequency : a.word < b.word;
      });
      bucket.postings.assign(len * text::kAlphabetSize, {});
      for (std::uint32_t i = 0; i < bucket.entries.size(); ++i) {
        const auto& w = bucket.entries[i].word;
        for (std::size_t p = 0; p < len; ++p) bucket.postings[p * text::kAlphabetSize + (w[p] - 'A')].push_back(i);
      }
      size_ += bucket.entries.size();
    }
  }

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  /// Every word matching `pattern`, most frequent first (ties alphabetical).
  std::vector<Entry> match(std::string_view pattern) const {
    std::vector<Entry> out;
    const auto it = by_length_.find(pattern.size());
    if (it == by_length_.end()) return out;
    const Bucket& bucket = it->second;

    const std::vector<std::uint32_t>* shortest = nullptr;
    for (std::size_t p = 0; p < pattern.size(); ++p) {
      if (pattern[p] == '?') continue;
      if (!text::is_upper_letter(pattern[p])) return out;
      const auto& list = bucket.postings[p * text::kAlphabetSize + (pattern[p] - 'A')];
      if (!shortest || list.size() < shortest->size()) shortest = &list;
    }
    const auto matches = [&](const std::string& w) {
      for (std::size_t p = 0; p < pattern.size(); ++p) {
        if (pattern[p] != '?' && pattern[p] != w[p]) return false;
      }
      return true;
    };
    if (!shortest) return bucket.entries;
    for (std::uint32_t i : *shortest) {
      if (matches(bucket.entries[i].word)) out.push_back(bucket.entries[i]);
    }
    return out;
  }

  std::optional<Entry> most_frequent(std::string_view pattern) const {
    auto all = match(pattern);
    if (all.empty()) return std::nullopt;
    return all.front();
  }

 private:
  struct Bucket {
    std::vector<Entry> entries;                       // frequency-descending
    std::vector<std::vector<std::uint32_t>> postings;  // [position * 26 + letter] -> ascending entry indices
  };
  std::map<std::size_t, Bucket> by_length_;
  std::size_t size_ = 0;
};

/// Parses `word<TAB>frequency` lines; words are normalized.
inline Loaded<Lexicon> parse_lexicon(std::string_view content, const LoadOptions& opts = {}) {
  Loaded<Lexicon> out;
  std::vector<std::pair<std::string, std::uint64_t>> words;
  std::size_t line_no = 0;
  for (std::string_view line : text::lines(content)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    ++out.lines;
    const auto fields = text::split(line, '\t');
    const auto freq = fields.size() == 2 ? text::parse_int<std::uint64_t>(fields[1]) : std::nullopt;
    if (!freq || *freq == 0) {
      out.warnings.push_back({line_no, "expected word<TAB>positive frequency"});
      continue;
    }
    try {
      auto word = text::normalize_answer(fields[0]);
      if (word.empty()) {
        out.warnings.push_back({line_no, "empty word"});
        continue;
      }
      words.emplace_back(std::move(word), *freq);
    } catch (const Error& e) {
      out.warnings.push_back({line_no, e.what()});
    }
  }
  detail::check_skip_budget("lexicon", out.warnings.size(), out.lines, opts);
  out.value = Lexicon(words);
  return out;
}

inline Loaded<Lexicon> load_lexicon(const std::filesystem::path& path, const LoadOptions& opts = {}) {
  return parse_lexicon(read_file(path), opts);
}

}  // namespace crossfill
