#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "crossfill/candidates.hpp"
#include "crossfill/corpus.hpp"
#include "crossfill/encoder.hpp"
#include "crossfill/text.hpp"

namespace crossfill {

namespace expert_ids {
inline constexpr std::string_view kClueDb = "cluedb";
inline constexpr std::string_view kSimilarity = "similarity";
inline constexpr std::string_view kKnowledgeGraph = "kg";
inline constexpr std::string_view kWebSearch = "websearch";
inline constexpr std::string_view kLexicon = "lexicon";
inline constexpr std::string_view kRuleBased = "rulebased";
}  // namespace expert_ids

/// A candidate generator: (clue, answer length) -> ranked list.
///
/// Implementations are immutable after construction and safe to call from
/// several threads. They never throw for "no answer"; an empty list with
/// confidence 0 is the neutral result.
class Expert {
 public:
  virtual ~Expert() = default;

  virtual const std::string& id() const = 0;
  virtual CandidateList generate(std::string_view clue, int length) const = 0;

  /// Answers of every length, probabilities normalized over the whole set.
  /// Used by two-step word games that transform a word before measuring it.
  virtual std::vector<Candidate> generate_any_length(std::string_view /*clue*/) const { return {}; }
};

using ExpertPtr = std::shared_ptr<const Expert>;

namespace detail {

inline std::vector<Candidate> normalized_any_length(const std::map<std::string, double>& scores) {
  std::vector<Candidate> out;
  double total = 0.0;
  for (const auto& [a, s] : scores) {
    if (s > 0.0 && is_canonical_answer(a)) total += s;
  }
  if (!(total > 0.0)) return out;
  for (const auto& [a, s] : scores) {
    if (s > 0.0 && is_canonical_answer(a)) out.push_back({a, s / total});
  }
  CandidateList::sort_ranked(out);
  return out;
}

inline std::vector<std::pair<std::string, double>> as_pairs(const std::map<std::string, double>& scores) {
  return {scores.begin(), scores.end()};
}

}  // namespace detail

/// Fixed answers per clue text; used for fixtures and as a delegate in tests.
class StaticExpert final : public Expert {
 public:
  StaticExpert(std::string id, std::map<std::string, std::vector<std::pair<std::string, double>>> answers,
               double confidence = 1.0)
      : id_(std::move(id)), answers_(std::move(answers)), confidence_(confidence) {}

  const std::string& id() const override { return id_; }

  CandidateList generate(std::string_view clue, int length) const override {
    const auto it = answers_.find(std::string(clue));
    if (it == answers_.end()) return CandidateList::empty(std::string(clue), id_);
    auto list = CandidateList::from_scores(std::string(clue), id_, length, it->second);
    if (list.empty()) return list;
    return CandidateList(list.clue_id(), id_, list.candidates(), confidence_);
  }

  std::vector<Candidate> generate_any_length(std::string_view clue) const override {
    const auto it = answers_.find(std::string(clue));
    if (it == answers_.end()) return {};
    std::map<std::string, double> scores;
    for (const auto& [a, s] : it->second) scores[a] += s;
    return detail::normalized_any_length(scores);
  }

 private:
  std::string id_;
  std::map<std::string, std::vector<std::pair<std::string, double>>> answers_;
  double confidence_;
};

struct ClueDbConfig {
  double exact_weight = 1.0;
  double normalized_weight = 0.6;
  double token_set_weight = 0.3;
};

/// Retrieves answers of previously seen clues. A record matches at the best
/// of three tiers: identical text, identical folded text (case and
/// diacritics ignored), identical token set. Score = tier weight x frequency.
class ClueDbExpert final : public Expert {
 public:
  explicit ClueDbExpert(std::shared_ptr<const ClueDb> db, ClueDbConfig config = {})
      : db_(std::move(db)), config_(config) {
    const auto& records = db_->records();
    for (std::size_t i = 0; i < records.size(); ++i) {
      exact_[records[i].clue].push_back(i);
      folded_[text::fold(records[i].clue)].push_back(i);
      token_set_[token_set_key(records[i].clue)].push_back(i);
    }
  }

  const std::string& id() const override { return id_; }

  static std::string token_set_key(std::string_view clue) {
    auto tokens = text::tokenize(clue);
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    std::string key;
    for (const auto& t : tokens) {
      if (!key.empty()) key.push_back(' ');
      key += t;
    }
    return key;
  }

  /// Best matching tier weight per matched record index.
  std::map<std::size_t, double> matches(std::string_view clue) const {
    std::map<std::size_t, double> tier;
    const auto visit = [&](const auto& index, const std::string& key, double weight) {
      const auto it = index.find(key);
      if (it == index.end()) return;
      for (std::size_t r : it->second) {
        auto [pos, inserted] = tier.emplace(r, weight);
        if (!inserted) pos->second = std::max(pos->second, weight);
      }
    };
    visit(exact_, std::string(clue), config_.exact_weight);
    visit(folded_, text::fold(clue), config_.normalized_weight);
    const std::string tokens = token_set_key(clue);
    if (!tokens.empty()) visit(token_set_, tokens, config_.token_set_weight);
    return tier;
  }

  CandidateList generate(std::string_view clue, int length) const override {
    return CandidateList::from_scores(std::string(clue), id_, length, detail::as_pairs(scores(clue)));
  }

  std::vector<Candidate> generate_any_length(std::string_view clue) const override {
    return detail::normalized_any_length(scores(clue));
  }

 private:
  std::map<std::string, double> scores(std::string_view clue) const {
    std::map<std::string, double> out;
    for (const auto& [r, weight] : matches(clue)) {
      const auto& rec = db_->records()[r];
      out[rec.answer] += weight * static_cast<double>(rec.frequency);
    }
    return out;
  }

  std::string id_{expert_ids::kClueDb};
  std::shared_ptr<const ClueDb> db_;
  ClueDbConfig config_;
  std::unordered_map<std::string, std::vector<std::size_t>> exact_;
  std::unordered_map<std::string, std::vector<std::size_t>> folded_;
  std::unordered_map<std::string, std::vector<std::size_t>> token_set_;
};

/// Exact cosine index over the encoded clues of a clue database.
class SimilarityIndex {
 public:
  struct Neighbor {
    std::size_t record = 0;
    double cosine = 0.0;
  };

  SimilarityIndex(std::shared_ptr<const ClueDb> db, std::unique_ptr<TextEncoder> encoder)
      : db_(std::move(db)), encoder_(std::move(encoder)) {
    std::vector<std::string> clues;
    clues.reserve(db_->size());
    for (const auto& r : db_->records()) clues.push_back(r.clue);
    encoder_->fit(clues);
    std::vector<SparseVector> vectors;
    vectors.reserve(clues.size());
    for (const auto& c : clues) vectors.push_back(encoder_->encode(c));
    index_ = CosineIndex(vectors);
  }

  std::vector<Neighbor> nearest(std::string_view clue, std::size_t k) const {
    std::vector<Neighbor> out;
    for (const auto& hit : index_.nearest(encoder_->encode(clue), k)) out.push_back({hit.doc, hit.score});
    return out;
  }

  const ClueDb& db() const { return *db_; }
  const TextEncoder& encoder() const { return *encoder_; }
  std::size_t size() const { return index_.size(); }

 private:
  std::shared_ptr<const ClueDb> db_;
  std::unique_ptr<TextEncoder> encoder_;
  CosineIndex index_;
};

inline std::shared_ptr<const SimilarityIndex> build_similarity_index(
    std::shared_ptr<const ClueDb> db, std::unique_ptr<TextEncoder> encoder = std::make_unique<TrigramTfidfEncoder>()) {
  return std::make_shared<const SimilarityIndex>(std::move(db), std::move(encoder));
}

struct SimilarityConfig {
  std::size_t k = 50;
  double temperature = 0.05;
};

/// Answers of the k stored clues closest to the query, weighted by a softmax
/// over their cosine similarities.
class SimilarityExpert final : public Expert {
 public:
  explicit SimilarityExpert(std::shared_ptr<const SimilarityIndex> index, SimilarityConfig config = {})
      : index_(std::move(index)), config_(config) {}

  const std::string& id() const override { return id_; }

  CandidateList generate(std::string_view clue, int length) const override {
    return CandidateList::from_scores(std::string(clue), id_, length, detail::as_pairs(scores(clue)));
  }

  std::vector<Candidate> generate_any_length(std::string_view clue) const override {
    return detail::normalized_any_length(scores(clue));
  }

 private:
  std::map<std::string, double> scores(std::string_view clue) const {
    const auto hits = index_->nearest(clue, config_.k);
    std::vector<double> cos;
    cos.reserve(hits.size());
    for (const auto& h : hits) cos.push_back(h.cosine);
    const auto weights = softmax(cos, config_.temperature);
    std::map<std::string, double> out;
    for (std::size_t i = 0; i < hits.size(); ++i) out[index_->db().records()[hits[i].record].answer] += weights[i];
    return out;
  }

  std::string id_{expert_ids::kSimilarity};
  std::shared_ptr<const SimilarityIndex> index_;
  SimilarityConfig config_;
};

/// Lexicon words matching `pattern` (`?` = any letter), probability
/// proportional to frequency.
inline CandidateList lexicon_generate(std::string_view pattern, const Lexicon& lexicon, std::string clue_id = {}) {
  std::vector<std::pair<std::string, double>> scores;
  for (const auto& e : lexicon.match(pattern)) scores.emplace_back(e.word, static_cast<double>(e.frequency));
  return CandidateList::from_scores(std::move(clue_id), std::string(expert_ids::kLexicon),
                                    static_cast<int>(pattern.size()), scores, 1.0);
}

/// Frequency prior over every lexicon word of the requested length.
class LexiconExpert final : public Expert {
 public:
  explicit LexiconExpert(std::shared_ptr<const Lexicon> lexicon) : lexicon_(std::move(lexicon)) {}

  const std::string& id() const override { return id_; }

  CandidateList generate(std::string_view clue, int length) const override {
    if (length < 1) return CandidateList::empty(std::string(clue), id_);
    return lexicon_generate(std::string(static_cast<std::size_t>(length), '?'), *lexicon_, std::string(clue));
  }

 private:
  std::string id_{expert_ids::kLexicon};
  std::shared_ptr<const Lexicon> lexicon_;
};

}  // namespace crossfill
