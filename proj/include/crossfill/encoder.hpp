#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "crossfill/text.hpp"

namespace crossfill {

/// Sparse vector as (dimension, value) pairs sorted by dimension.
using SparseVector = std::vector<std::pair<std::uint32_t, double>>;

inline double dot(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      s += i->second * j->second;
      ++i;
      ++j;
    }
  }
  return s;
}

inline double l2_norm(const SparseVector& v) {
  double s = 0.0;
  for (const auto& [_, x] : v) s += x * x;
  return std::sqrt(s);
}

inline double cosine(const SparseVector& a, const SparseVector& b) {
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

/// Deterministic text -> vector map. `fit` sees the indexed corpus once and
/// must complete before any concurrent `encode` calls.
class TextEncoder {
 public:
  virtual ~TextEncoder() = default;
  virtual void fit(const std::vector<std::string>& corpus) = 0;
  virtual SparseVector encode(std::string_view text) const = 0;
};

/// Character 3-gram TF-IDF over the folded, lowercased text, L2-normalized.
/// Words are separated by single spaces and the whole string is padded with
/// one space on each side, so short words still produce trigrams.
class TrigramTfidfEncoder final : public TextEncoder {
 public:
  static std::vector<std::uint32_t> trigrams(std::string_view raw) {
    std::string s = " ";
    bool space = true;
    for (char c : text::fold(raw)) {
      const bool keep = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
      if (keep) {
        s.push_back(c);
        space = false;
      } else if (!space) {
        s.push_back(' ');
        space = true;
      }
    }
    if (!space) s.push_back(' ');
    std::vector<std::uint32_t> out;
    if (s.size() < 3) return out;
    out.reserve(s.size() - 2);
    for (std::size_t i = 0; i + 2 < s.size(); ++i) {
      out.push_back((static_cast<std::uint32_t>(static_cast<unsigned char>(s[i])) << 16) |
                    (static_cast<std::uint32_t>(static_cast<unsigned char>(s[i + 1])) << 8) |
                    static_cast<std::uint32_t>(static_cast<unsigned char>(s[i + 2])));
    }
    return out;
  }

  void fit(const std::vector<std::string>& corpus) override {
    document_frequency_.clear();
    documents_ = corpus.size();
    for (const auto& doc : corpus) {
      auto grams = trigrams(doc);
      std::sort(grams.begin(), grams.end());
      grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
      for (auto g : grams) ++document_frequency_[g];
    }
  }

  /// Smoothed idf; grams unseen during fit get the maximal weight.
  double idf(std::uint32_t gram) const {
    const auto it = document_frequency_.find(gram);
    const double df = it == document_frequency_.end() ? 0.0 : static_cast<double>(it->second);
    return std::log((1.0 + static_cast<double>(documents_)) / (1.0 + df)) + 1.0;
  }

  SparseVector encode(std::string_view raw) const override {
    auto grams = trigrams(raw);
    std::sort(grams.begin(), grams.end());
    SparseVector v;
    for (std::size_t i = 0; i < grams.size();) {
      std::size_t j = i;
      while (j < grams.size() && grams[j] == grams[i]) ++j;
      v.emplace_back(grams[i], static_cast<double>(j - i) * idf(grams[i]));
      i = j;
    }
    const double n = l2_norm(v);
    if (n > 0.0) {
      for (auto& [_, x] : v) x /= n;
    }
    return v;
  }

 private:
  std::unordered_map<std::uint32_t, std::size_t> document_frequency_;
  std::size_t documents_ = 0;
};

/// Exact cosine k-nearest-neighbour search through an inverted index.
class CosineIndex {
 public:
  struct Hit {
    std::size_t doc = 0;
    double score = 0.0;
  };

  CosineIndex() = default;

  explicit CosineIndex(const std::vector<SparseVector>& docs) : norms_(docs.size()) {
    for (std::size_t d = 0; d < docs.size(); ++d) {
      norms_[d] = l2_norm(docs[d]);
      for (const auto& [dim, x] : docs[d]) postings_[dim].emplace_back(d, x);
    }
  }

  std::size_t size() const { return norms_.size(); }

  /// Up to `k` documents with positive cosine, best first, ties by document order.
  std::vector<Hit> nearest(const SparseVector& query, std::size_t k) const {
    std::vector<Hit> hits;
    const double qn = l2_norm(query);
    if (qn == 0.0 || k == 0 || norms_.empty()) return hits;
    std::vector<double> acc(norms_.size(), 0.0);
    std::vector<char> seen(norms_.size(), 0);
    std::vector<std::size_t> touched;
    for (const auto& [dim, q] : query) {
      const auto it = postings_.find(dim);
      if (it == postings_.end()) continue;
      for (const auto& [doc, x] : it->second) {
        if (!seen[doc]) {
          seen[doc] = 1;
          touched.push_back(doc);
        }
        acc[doc] += q * x;
      }
    }
    for (std::size_t doc : touched) {
      const double score = acc[doc] / (qn * norms_[doc]);
      if (score > 0.0) hits.push_back({doc, score});
    }
    const auto better = [](const Hit& a, const Hit& b) { return a.score != b.score ? a.score > b.score : a.doc < b.doc; };
    if (hits.size() > k) {
      std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(k), hits.end(), better);
      hits.resize(k);
    } else {
      std::sort(hits.begin(), hits.end(), better);
    }
    return hits;
  }

 private:
  std::vector<double> norms_;
  std::unordered_map<std::uint32_t, std::vector<std::pair<std::size_t, double>>> postings_;
};

/// Softmax of `scores / temperature`, shifted by the maximum for stability.
inline std::vector<double> softmax(const std::vector<double>& scores, double temperature) {
  std::vector<double> out(scores.size());
  if (scores.empty()) return out;
  const double hi = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp((scores[i] - hi) / temperature);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return out;
}

}  // namespace crossfill
