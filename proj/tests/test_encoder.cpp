#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "crossfill/encoder.hpp"

using namespace crossfill;

namespace {

// Dense reference: trigram strings over " " + words joined by " " + " ".
std::map<std::string, int> gram_counts(const std::string& raw) {
  std::string padded = " ";
  for (const auto& t : text::tokenize(raw)) padded += t + " ";
  std::map<std::string, int> counts;
  if (padded.size() < 3) return counts;
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) ++counts[padded.substr(i, 3)];
  return counts;
}

struct Reference {
  std::vector<std::map<std::string, double>> docs;
  std::map<std::string, int> df;
  std::size_t n = 0;

  explicit Reference(const std::vector<std::string>& corpus) : n(corpus.size()) {
    for (const auto& d : corpus) {
      for (const auto& [g, c] : gram_counts(d)) ++df[g];
    }
    for (const auto& d : corpus) docs.push_back(vec(d));
  }

  double idf(const std::string& g) const {
    const auto it = df.find(g);
    const double f = it == df.end() ? 0.0 : it->second;
    return std::log((1.0 + static_cast<double>(n)) / (1.0 + f)) + 1.0;
  }

  std::map<std::string, double> vec(const std::string& s) const {
    std::map<std::string, double> v;
    for (const auto& [g, c] : gram_counts(s)) v[g] = c * idf(g);
    return v;
  }

  static double cos(const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
    double d = 0, na = 0, nb = 0;
    for (const auto& [g, x] : a) {
      na += x * x;
      if (auto it = b.find(g); it != b.end()) d += x * it->second;
    }
    for (const auto& [g, x] : b) nb += x * x;
    return na == 0 || nb == 0 ? 0.0 : d / std::sqrt(na * nb);
  }
};

std::vector<std::string> random_corpus(std::mt19937& rng, std::size_t n) {
  const std::vector<std::string> words{"fleur", "rose", "rosier", "ciel", "bleu", "mer", "poisson", "plat",
                                       "outil", "lime", "ongle", "chat", "chien", "arbre", "été", "hiver"};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::string s;
    const int len = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < len; ++k) s += (k ? " " : "") + words[rng() % words.size()];
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST(TrigramEncoder, SelfSimilarityIsOne) {
  TrigramTfidfEncoder enc;
  enc.fit({"poissons plats", "formule de politesse"});
  const auto v = enc.encode("Poissons plats");
  EXPECT_NEAR(dot(v, v), 1.0, 1e-12);
  EXPECT_NEAR(l2_norm(v), 1.0, 1e-12);
  EXPECT_TRUE(enc.encode("").empty());
}

TEST(TrigramEncoder, DisjointGramsHaveZeroCosine) {
  TrigramTfidfEncoder enc;
  enc.fit({});
  EXPECT_EQ(cosine(enc.encode("abc"), enc.encode("xyz")), 0.0);
}

TEST(TrigramEncoder, CloseWordsScoreHigher) {
  TrigramTfidfEncoder enc;
  enc.fit({"apitoie", "apitoyer", "strasbourg"});
  const auto a = enc.encode("apitoie");
  EXPECT_GT(cosine(a, enc.encode("apitoyer")), cosine(a, enc.encode("strasbourg")));
}

TEST(TrigramEncoder, MatchesDenseReference) {
  std::mt19937 rng(4);
  const auto corpus = random_corpus(rng, 60);
  TrigramTfidfEncoder enc;
  enc.fit(corpus);
  const Reference ref(corpus);
  for (const std::string q : {"rose fleur", "hiver bleu chat", "mer", "zzz été"}) {
    for (const auto& d : corpus) {
      EXPECT_NEAR(cosine(enc.encode(q), enc.encode(d)), Reference::cos(ref.vec(q), ref.vec(d)), 1e-12);
    }
  }
}

TEST(CosineIndex, ExactNeighborsMatchBruteForce) {
  std::mt19937 rng(9);
  const auto corpus = random_corpus(rng, 100);
  TrigramTfidfEncoder enc;
  enc.fit(corpus);
  std::vector<SparseVector> vecs;
  for (const auto& d : corpus) vecs.push_back(enc.encode(d));
  const CosineIndex index(vecs);
  const Reference ref(corpus);
  for (int trial = 0; trial < 30; ++trial) {
    const auto q = random_corpus(rng, 1).front();
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t d = 0; d < corpus.size(); ++d) {
      const double c = Reference::cos(ref.vec(q), ref.docs[d]);
      if (c > 0) all.emplace_back(c, d);
    }
    for (const std::size_t k : {1u, 3u, 10u, 200u}) {
      const auto hits = index.nearest(enc.encode(q), k);
      ASSERT_EQ(hits.size(), std::min<std::size_t>(k, all.size()));
      // Compare score sequences; equal scores may legitimately swap documents.
      std::vector<double> expected;
      for (const auto& [c, d] : all) expected.push_back(c);
      std::sort(expected.rbegin(), expected.rend());
      for (std::size_t i = 0; i < hits.size(); ++i) {
        EXPECT_NEAR(hits[i].score, expected[i], 1e-9);
        EXPECT_NEAR(hits[i].score, Reference::cos(ref.vec(q), ref.docs[hits[i].doc]), 1e-9);
      }
    }
  }
}

TEST(CosineIndex, EmptyIndex) {
  const CosineIndex index;
  EXPECT_TRUE(index.nearest({{1, 1.0}}, 5).empty());
}

TEST(Softmax, SumsToOneAndIsShiftInvariant) {
  const auto p = softmax({0.9, 0.8, 0.1}, 0.05);
  double s = 0;
  for (double x : p) s += x;
  EXPECT_NEAR(s, 1.0, 1e-12);
  EXPECT_NEAR(p[0] / p[1], std::exp(0.1 / 0.05), 1e-9);
  const auto q = softmax({10.9, 10.8, 10.1}, 0.05);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(p[i], q[i], 1e-12);
}
