#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <spdlog/spdlog.h>

#include "crossfill/candidates.hpp"
#include "crossfill/experts.hpp"
#include "crossfill/text.hpp"

namespace crossfill {

/// Answer-length buckets sharing one expert weight vector.
enum class LengthBucket { Short, Medium, Long, VeryLong };

inline constexpr std::array<LengthBucket, 4> kAllBuckets{LengthBucket::Short, LengthBucket::Medium, LengthBucket::Long,
                                                        LengthBucket::VeryLong};

inline LengthBucket bucket_for(std::size_t length) {
  if (length <= 3) return LengthBucket::Short;
  if (length <= 6) return LengthBucket::Medium;
  if (length <= 9) return LengthBucket::Long;
  return LengthBucket::VeryLong;
}

inline std::string_view bucket_name(LengthBucket b) {
  switch (b) {
    case LengthBucket::Short:
      return "2-3";
    case LengthBucket::Medium:
      return "4-6";
    case LengthBucket::Long:
      return "7-9";
    case LengthBucket::VeryLong:
      return "10+";
  }
  return "?";
}

inline std::optional<LengthBucket> parse_bucket(std::string_view s) {
  for (auto b : kAllBuckets) {
    if (bucket_name(b) == s) return b;
  }
  return std::nullopt;
}

/// Per-bucket expert weights; each bucket's weights are >= 0 and sum to 1.
class WeightTable {
 public:
  using Weights = std::map<std::string, double>;

  WeightTable() = default;

  static WeightTable uniform(const std::vector<std::string>& experts) {
    if (experts.empty()) throw Error("weight table needs at least one expert");
    Weights w;
    for (const auto& e : experts) w[e] = 1.0 / static_cast<double>(experts.size());
    WeightTable t;
    for (auto b : kAllBuckets) t.set(b, w);
    return t;
  }

  void set(LengthBucket b, Weights weights) {
    double sum = 0.0;
    for (const auto& [e, w] : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw Error("negative or non-finite weight for expert '" + e + "'");
      sum += w;
    }
    if (weights.empty() || std::abs(sum - 1.0) > 1e-6) {
      throw Error("weights of bucket " + std::string(bucket_name(b)) + " do not sum to 1");
    }
    buckets_[b] = std::move(weights);
  }

  bool has_bucket(LengthBucket b) const { return buckets_.count(b) > 0; }

  const Weights& bucket(LengthBucket b) const {
    const auto it = buckets_.find(b);
    if (it == buckets_.end()) throw Error("no weights for bucket " + std::string(bucket_name(b)));
    return it->second;
  }

  double weight(LengthBucket b, std::string_view expert) const {
    const auto& w = bucket(b);
    const auto it = w.find(std::string(expert));
    if (it == w.end()) throw Error("unknown expert '" + std::string(expert) + "' in weight table");
    return it->second;
  }

  /// `bucket.expert = weight` lines in bucket then expert order.
  std::string serialize() const {
    std::string out;
    char buf[64];
    for (const auto& [b, weights] : buckets_) {
      for (const auto& [e, w] : weights) {
        std::snprintf(buf, sizeof buf, "%.17g", w);
        out += std::string(bucket_name(b)) + "." + e + " = " + buf + "\n";
      }
    }
    return out;
  }

  static WeightTable parse(std::string_view content) {
    std::map<LengthBucket, Weights> raw;
    std::size_t line_no = 0;
    for (auto line : text::lines(content)) {
      ++line_no;
      line = text::trim(line);
      if (line.empty() || line.front() == '#') continue;
      const auto eq = line.find('=');
      const auto dot = line.find('.');
      if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq) {
        throw Error("weights line " + std::to_string(line_no) + ": expected bucket.expert = weight");
      }
      const auto bucket = parse_bucket(text::trim(line.substr(0, dot)));
      const auto expert = text::trim(line.substr(dot + 1, eq - dot - 1));
      const auto value = text::parse_double(line.substr(eq + 1));
      if (!bucket || expert.empty() || !value) throw Error("weights line " + std::to_string(line_no) + ": malformed");
      raw[*bucket][std::string(expert)] = *value;
    }
    WeightTable t;
    for (auto& [b, w] : raw) t.set(b, std::move(w));
    return t;
  }

  bool operator==(const WeightTable&) const = default;

 private:
  std::map<LengthBucket, Weights> buckets_;
};

inline constexpr std::string_view kMergedExpertId = "merged";

/// Weighted average of per-expert lists: p(a) is proportional to
/// sum_e w_e(bucket) * confidence_e * p_e(a). Inputs are combined in expert-id
/// order, so the result does not depend on the order of `lists`.
///
/// If every nonempty list carries zero weight or zero confidence the nonempty
/// lists are averaged with equal weight, so the result is empty only when all
/// inputs are.
inline CandidateList merge_lists(const std::vector<CandidateList>& lists, const WeightTable& weights, int length) {
  std::vector<const CandidateList*> ordered;
  for (const auto& l : lists) ordered.push_back(&l);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const CandidateList* a, const CandidateList* b) { return a->expert() < b->expert(); });
  const LengthBucket b = bucket_for(static_cast<std::size_t>(std::max(length, 0)));
  const std::string clue_id = ordered.empty() ? std::string{} : ordered.front()->clue_id();

  std::map<std::string, double> acc;
  double mass = 0.0;
  bool any = false;
  for (const auto* l : ordered) {
    const double w = weights.weight(b, l->expert());
    if (l->empty()) continue;
    if (l->answer_length() != static_cast<std::size_t>(length)) {
      throw Error("list from '" + l->expert() + "' has answers of length " + std::to_string(l->answer_length()) +
                  ", expected " + std::to_string(length));
    }
    any = true;
    const double scale = w * l->confidence();
    mass += scale;
    for (const auto& c : *l) acc[c.answer] += scale * c.probability;
  }
  if (!any) return CandidateList::empty(clue_id, std::string(kMergedExpertId));
  if (!(mass > 0.0)) {
    acc.clear();
    for (const auto* l : ordered) {
      for (const auto& c : *l) acc[c.answer] += c.probability;
    }
    mass = 0.0;
  }
  std::vector<std::pair<std::string, double>> scores(acc.begin(), acc.end());
  return CandidateList::from_scores(clue_id, std::string(kMergedExpertId), length, scores, std::min(mass, 1.0));
}

struct FilterConstraints {
  int length = 0;
  std::string pattern;  // '?' or A-Z per position; empty = no fixed letters
};

inline bool matches_pattern(std::string_view word, std::string_view pattern) {
  if (word.size() != pattern.size()) return false;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (pattern[i] != '?' && pattern[i] != word[i]) return false;
  }
  return true;
}

/// Drops candidates of the wrong length or contradicting fixed letters, then
/// renormalizes. Confidence shrinks by the share of probability removed.
inline CandidateList filter_list(const CandidateList& list, const FilterConstraints& constraints) {
  std::vector<std::pair<std::string, double>> kept;
  double retained = 0.0;
  for (const auto& c : list) {
    if (c.answer.size() != static_cast<std::size_t>(constraints.length)) continue;
    if (!constraints.pattern.empty() && !matches_pattern(c.answer, constraints.pattern)) continue;
    kept.emplace_back(c.answer, c.probability);
    retained += c.probability;
  }
  return CandidateList::from_scores(list.clue_id(), list.expert(), constraints.length, kept,
                                    std::clamp(list.confidence() * retained, 0.0, 1.0));
}

struct TrainingPair {
  std::string clue;
  std::string gold;  // normalized
};

/// 1 / (1-based rank of gold), 0 when absent.
inline double reciprocal_rank(const CandidateList& list, std::string_view gold) {
  const auto r = list.rank_of(gold);
  return r ? 1.0 / static_cast<double>(*r + 1) : 0.0;
}

namespace detail {

struct PreparedPair {
  std::string gold;
  int length = 0;
  std::vector<CandidateList> lists;
};

inline std::vector<PreparedPair> prepare_pairs(const std::vector<TrainingPair>& pairs, const std::vector<ExpertPtr>& experts) {
  std::vector<PreparedPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (p.gold.empty()) throw Error("training pair with empty gold answer");
    PreparedPair prepared{p.gold, static_cast<int>(p.gold.size()), {}};
    for (const auto& e : experts) prepared.lists.push_back(e->generate(p.clue, prepared.length));
    out.push_back(std::move(prepared));
  }
  return out;
}

/// (mean reciprocal rank, mean gold probability), compared lexicographically.
using Objective = std::pair<double, double>;

inline Objective evaluate(const std::vector<const PreparedPair*>& pairs, const WeightTable& table) {
  if (pairs.empty()) return {0.0, 0.0};
  double rr = 0.0;
  double gp = 0.0;
  for (const auto* p : pairs) {
    const auto merged = merge_lists(p->lists, table, p->length);
    rr += reciprocal_rank(merged, p->gold);
    gp += merged.probability_of(p->gold);
  }
  const auto n = static_cast<double>(pairs.size());
  return {rr / n, gp / n};
}

}  // namespace detail

/// Mean reciprocal rank of the gold answers in the merged lists.
inline double training_mrr(const std::vector<TrainingPair>& pairs, const std::vector<ExpertPtr>& experts,
                           const WeightTable& table) {
  const auto prepared = detail::prepare_pairs(pairs, experts);
  std::vector<const detail::PreparedPair*> all;
  for (const auto& p : prepared) all.push_back(&p);
  return detail::evaluate(all, table).first;
}

struct TrainingOptions {
  double step = 0.05;
  std::size_t max_cycles = 200;
};

/// Cyclic coordinate ascent on each bucket's weight simplex. A move sets one
/// expert's weight to a grid value and rescales the others proportionally; it
/// is taken only if it strictly improves mean reciprocal rank, or keeps it and
/// strictly raises the mean gold probability. Stops after a full cycle
/// without improvement. Buckets without training pairs keep `initial`.
inline WeightTable train_weights(const std::vector<TrainingPair>& pairs, const std::vector<ExpertPtr>& experts,
                                 const WeightTable& initial, const TrainingOptions& options = {}) {
  if (experts.empty()) throw Error("train_weights needs at least one expert");
  const auto prepared = detail::prepare_pairs(pairs, experts);
  std::map<LengthBucket, std::vector<const detail::PreparedPair*>> by_bucket;
  for (const auto& p : prepared) by_bucket[bucket_for(static_cast<std::size_t>(p.length))].push_back(&p);

  std::vector<std::string> ids;
  for (const auto& e : experts) ids.push_back(e->id());
  std::sort(ids.begin(), ids.end());

  WeightTable table = initial;
  const auto steps = static_cast<int>(std::lround(1.0 / options.step));
  constexpr double kMinGain = 1e-12;

  for (auto b : kAllBuckets) {
    const auto it = by_bucket.find(b);
    if (it == by_bucket.end()) {
      spdlog::warn("train_weights: no training pairs in bucket {}, keeping initial weights", bucket_name(b));
      continue;
    }
    WeightTable::Weights current;
    for (const auto& id : ids) current[id] = initial.weight(b, id);
    if (ids.size() == 1) {
      current[ids.front()] = 1.0;
      table.set(b, current);
      continue;
    }
    table.set(b, current);
    auto best = detail::evaluate(it->second, table);

    for (std::size_t cycle = 0; cycle < options.max_cycles; ++cycle) {
      bool improved = false;
      for (const auto& id : ids) {
        std::optional<WeightTable::Weights> best_move;
        for (int k = 0; k <= steps; ++k) {
          const double v = std::min(1.0, static_cast<double>(k) / static_cast<double>(steps));
          WeightTable::Weights trial = current;
          double others = 0.0;
          for (const auto& [e, w] : current) {
            if (e != id) others += w;
          }
          for (auto& [e, w] : trial) {
            if (e == id) {
              w = v;
            } else if (others > 0.0) {
              w = w * (1.0 - v) / others;
            } else {
              w = (1.0 - v) / static_cast<double>(ids.size() - 1);
            }
          }
          WeightTable candidate = table;
          candidate.set(b, trial);
          const auto score = detail::evaluate(it->second, candidate);
          const bool better =
              score.first > best.first || (score.first == best.first && score.second > best.second + kMinGain);
          if (better) {
            best = score;
            best_move = trial;
          }
        }
        if (best_move) {
          current = *best_move;
          table.set(b, current);
          improved = true;
        }
      }
      if (!improved) break;
    }
  }
  return table;
}

}  // namespace crossfill
