#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crossfill/text.hpp"

namespace crossfill {

inline constexpr double kNormTolerance = 1e-9;

struct Candidate {
  std::string answer;
  double probability = 0.0;

  bool operator==(const Candidate&) const = default;
};

inline bool is_canonical_answer(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), text::is_upper_letter);
}

/// A ranked, normalized answer list for one clue from one source.
///
/// Invariants (checked by every constructor): distinct canonical answers of a
/// single length, positive probabilities in descending order summing to 1,
/// confidence in [0,1]. An empty list always has confidence 0.
class CandidateList {
 public:
  CandidateList() = default;

  CandidateList(std::string clue_id, std::string expert, std::vector<Candidate> candidates, double confidence)
      : clue_id_(std::move(clue_id)),
        expert_(std::move(expert)),
        candidates_(std::move(candidates)),
        confidence_(candidates_.empty() ? 0.0 : confidence) {
    validate();
  }

  static CandidateList empty(std::string clue_id, std::string expert) {
    return CandidateList(std::move(clue_id), std::move(expert), {}, 0.0);
  }

  /// Builds a list from unnormalized scores. Duplicate answers are summed;
  /// non-positive scores, non-canonical answers and answers whose length
  /// differs from `length` (when `length` > 0) are dropped. Without an explicit
  /// confidence, the share of positive score mass that survived the filters
  /// is used.
  static CandidateList from_scores(std::string clue_id, std::string expert, int length,
                                   const std::vector<std::pair<std::string, double>>& scores,
                                   std::optional<double> confidence = std::nullopt) {
    std::map<std::string, double> kept;
    double total = 0.0;
    double retained = 0.0;
    for (const auto& [answer, score] : scores) {
      if (!(score > 0.0) || !std::isfinite(score)) continue;
      total += score;
      if (!is_canonical_answer(answer)) continue;
      if (length > 0 && answer.size() != static_cast<std::size_t>(length)) continue;
      kept[answer] += score;
      retained += score;
    }
    if (kept.empty() || !(retained > 0.0)) return empty(std::move(clue_id), std::move(expert));
    std::vector<Candidate> cands;
    cands.reserve(kept.size());
    for (const auto& [answer, score] : kept) cands.push_back({answer, score / retained});
    sort_ranked(cands);
    const double conf = confidence.value_or(retained / total);
    return CandidateList(std::move(clue_id), std::move(expert), std::move(cands), std::clamp(conf, 0.0, 1.0));
  }

  /// Descending probability, ties alphabetical.
  static void sort_ranked(std::vector<Candidate>& cands) {
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      return a.probability != b.probability ? a.probability > b.probability : a.answer < b.answer;
    });
  }

  const std::string& clue_id() const { return clue_id_; }
  const std::string& expert() const { return expert_; }
  double confidence() const { return confidence_; }
  const std::vector<Candidate>& candidates() const { return candidates_; }

  std::size_t size() const { return candidates_.size(); }
  bool empty() const { return candidates_.empty(); }
  auto begin() const { return candidates_.begin(); }
  auto end() const { return candidates_.end(); }
  const Candidate& operator[](std::size_t i) const { return candidates_[i]; }
  const Candidate& top() const { return candidates_.front(); }

  std::size_t answer_length() const { return candidates_.empty() ? 0 : candidates_.front().answer.size(); }

  double probability_of(std::string_view answer) const {
    for (const auto& c : candidates_) {
      if (c.answer == answer) return c.probability;
    }
    return 0.0;
  }

  /// Zero-based rank of `answer`, if present.
  std::optional<std::size_t> rank_of(std::string_view answer) const {
    for (std::size_t i = 0; i < candidates_.size(); ++i) {
      if (candidates_[i].answer == answer) return i;
    }
    return std::nullopt;
  }

  double total_probability() const {
    double s = 0.0;
    for (const auto& c : candidates_) s += c.probability;
    return s;
  }

  bool operator==(const CandidateList&) const = default;

 private:
  void validate() const {
    if (!(confidence_ >= 0.0 && confidence_ <= 1.0)) throw Error("candidate list confidence outside [0,1]");
    if (candidates_.empty()) return;
    const std::size_t len = candidates_.front().answer.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < candidates_.size(); ++i) {
      const auto& c = candidates_[i];
      if (!is_canonical_answer(c.answer)) throw Error("candidate '" + c.answer + "' is not canonical A-Z");
      if (c.answer.size() != len) throw Error("candidate list mixes answer lengths");
      if (!(c.probability > 0.0)) throw Error("candidate probability must be positive");
      if (i > 0 && c.probability > candidates_[i - 1].probability) throw Error("candidate list not in descending order");
      sum += c.probability;
    }
    std::vector<std::string_view> answers;
    answers.reserve(candidates_.size());
    for (const auto& c : candidates_) answers.push_back(c.answer);
    std::sort(answers.begin(), answers.end());
    if (auto dup = std::adjacent_find(answers.begin(), answers.end()); dup != answers.end()) {
      throw Error("duplicate candidate '" + std::string(*dup) + "'");
    }
    if (std::abs(sum - 1.0) > kNormTolerance) throw Error("candidate probabilities do not sum to 1");
  }

  std::string clue_id_;
  std::string expert_;
  std::vector<Candidate> candidates_;
  double confidence_ = 0.0;
};

}  // namespace crossfill
