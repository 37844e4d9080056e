#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "crossfill/solver.hpp"
#include "support/oracles.hpp"

using namespace crossfill;

namespace {

constexpr double kEps = BPConfig{}.epsilon;

LetterDistribution point(char c, double p) {
  LetterDistribution d{};
  const double rest = (1.0 - p) / 25.0;
  d.fill(rest);
  d[letter_index(c)] = p;
  return d;
}

CellMarginal both(const LetterDistribution& a, const LetterDistribution& d) {
  CellMarginal m;
  m.has_across = m.has_down = true;
  m.across = a;
  m.down = d;
  return m;
}

LetterDistribution random_distribution(std::mt19937& rng, double peak) {
  LetterDistribution d{};
  std::uniform_real_distribution<double> u(0, 1);
  double z = 0;
  for (auto& x : d) z += (x = u(rng));
  for (auto& x : d) x = x / z * (1 - peak);
  d[rng() % 26] += peak;
  return d;
}

std::map<std::string, double> as_map(const CandidateList& l) {
  std::map<std::string, double> out;
  for (const auto& c : l) out[c.answer] = c.probability;
  return out;
}

Puzzle puzzle(const std::vector<std::string>& rows, const std::vector<std::string>& solution = {}) {
  return parse_puzzle(oracle::puzzle_document(rows, solution));
}

}  // namespace

TEST(LetterMarginal, PointMass) {
  const auto d = letter_marginal(CandidateList("c", "e", {{"AB", 1.0}}, 1.0), 0);
  EXPECT_NEAR(d[letter_index('A')], 1.0, 1e-4);
  EXPECT_EQ(argmax_letter(d), letter_index('A'));
  const auto b = letter_marginal(CandidateList("c", "e", {{"AB", 0.5}, {"CB", 0.5}}, 1.0), 1);
  EXPECT_NEAR(b[letter_index('B')], 1.0, 1e-4);
  EXPECT_THROW(letter_marginal(CandidateList("c", "e", {{"AB", 1.0}}, 1.0), 2), Error);
  const auto u = letter_marginal(CandidateList::empty("c", "e"), 0);
  EXPECT_DOUBLE_EQ(u[7], 1.0 / 26.0);
}

TEST(LetterMarginal, MatchesSummation) {
  std::mt19937 rng(71);
  for (int n = 0; n < 200; ++n) {
    std::vector<std::pair<std::string, double>> scores;
    for (int k = 0; k < 20; ++k) {
      std::string w;
      for (int i = 0; i < 4; ++i) w.push_back(static_cast<char>('A' + rng() % 26));
      scores.emplace_back(w, 0.01 + (rng() % 1000) / 100.0);
    }
    const auto list = CandidateList::from_scores("c", "e", 4, scores);
    for (std::size_t pos = 0; pos < 4; ++pos) {
      const auto got = letter_marginal(list, pos);
      const auto want = oracle::letter_sum(list, pos, kEps);
      double sum = 0;
      for (int i = 0; i < 26; ++i) {
        EXPECT_NEAR(got[i], want[i], 1e-12);
        sum += got[i];
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
    }
  }
}

TEST(BuildNetwork, Provenance) {
  const auto p = puzzle({"..", ".#"});  // across (0,0) len 2, down (0,0) len 2
  ASSERT_EQ(p.slots().size(), 2u);
  const Lexicon lex({{"AB", 3}, {"AC", 1}, {"XYZ", 5}});
  const auto given = CandidateList("A1", "merged", {{"AB", 1.0}}, 1.0);
  const auto net = build_network(p, {given, CandidateList::empty("D1", "merged")}, lex);
  EXPECT_EQ(net.slots[0].source, SlotSource::Experts);
  EXPECT_EQ(net.slots[0].candidates, given);
  EXPECT_EQ(net.slots[1].source, SlotSource::Lexicon);
  const auto m = as_map(net.slots[1].candidates);
  EXPECT_DOUBLE_EQ(m.at("AB"), 0.75);
  EXPECT_DOUBLE_EQ(m.at("AC"), 0.25);
  const auto bare = build_network(p, {given, CandidateList::empty("D1", "merged")}, Lexicon());
  EXPECT_EQ(bare.slots[1].source, SlotSource::Uniform);
  EXPECT_TRUE(bare.slots[1].candidates.empty());
  EXPECT_EQ(net.links().size(), 1u);
  EXPECT_THROW(build_network(p, {given}, lex), Error);
}

TEST(BPRerank, ZeroIterationsIsIdentity) {
  std::mt19937 rng(73);
  const auto net = oracle::random_tree_network(rng, 4, 5, 4, false);
  const auto out = bp_rerank(net, {0, 0.5, kEps});
  for (std::size_t s = 0; s < net.slots.size(); ++s) EXPECT_EQ(out.slots[s].candidates, net.slots[s].candidates);
}

TEST(BPRerank, OneRoundTwoSlots) {
  const auto p = puzzle({"..", ".#"});
  const auto across = CandidateList("A1", "merged", {{"AB", 0.5}, {"CD", 0.5}}, 1.0);
  const auto down = CandidateList("D1", "merged", {{"AX", 1.0}}, 1.0);
  const auto net = build_network(p, {across, down}, Lexicon());
  const auto out = bp_rerank(net, {1, 0.5, kEps});
  // Down sends its floored first-letter law, damped half-way from uniform.
  const double z = 1 + 25 * kEps;
  const double mA = 0.5 / z + 0.5 / 26;
  const double mC = 0.5 * kEps / z + 0.5 / 26;
  const auto m = as_map(out.slots[0].candidates);
  EXPECT_EQ(out.slots[0].candidates[0].answer, "AB");
  EXPECT_NEAR(m.at("AB"), mA / (mA + mC), 1e-12);
  EXPECT_NEAR(m.at("CD"), mC / (mA + mC), 1e-12);
  EXPECT_EQ(out.slots[1].candidates[0].answer, "AX");
}

TEST(BPRerank, MessagesStayNormalized) {
  std::mt19937 rng(79);
  for (int trial = 0; trial < 20; ++trial) {
    const auto net = oracle::random_tree_network(rng, 6, 5, 5, trial % 2 == 0);
    std::size_t rounds = 0;
    bp_rerank(net, {}, [&](std::size_t, std::span<const LetterDistribution> messages) {
      ++rounds;
      for (const auto& msg : messages) {
        double s = 0;
        for (double x : msg) {
          EXPECT_GE(x, 0.0);
          s += x;
        }
        EXPECT_NEAR(s, 1.0, 1e-9);
      }
    });
    EXPECT_EQ(rounds, 25u);
  }
}

TEST(BPRerank, ExactOnTreesWithoutDamping) {
  std::mt19937 rng(83);
  for (int trial = 0; trial < 60; ++trial) {
    const auto net = oracle::random_tree_network(rng, 2 + rng() % 5, 5, 4, trial % 2 == 0);
    const auto exact = oracle::exact_marginals(net);
    const auto out = bp_rerank(net, {25, 0.0, 1e-15});
    EXPECT_LT(oracle::max_candidate_error(out, exact), 1e-6);
    EXPECT_LT(oracle::max_letter_error(out, exact), 1e-6);
  }
}

TEST(BPRerank, DampedReachesTheSameFixedPoint) {
  std::mt19937 rng(89);
  for (int trial = 0; trial < 30; ++trial) {
    const auto net = oracle::random_tree_network(rng, 2 + rng() % 5, 5, 4, trial % 2 == 0);
    const auto exact = oracle::exact_marginals(net);
    EXPECT_LT(oracle::max_candidate_error(bp_rerank(net, {200, 0.5, 1e-15}), exact), 1e-6);
  }
}

TEST(BPRerank, EmptySlotSendsUniform) {
  const auto p = puzzle({"..", ".#"});
  const auto across = CandidateList("A1", "merged", {{"AB", 0.5}, {"CD", 0.5}}, 1.0);
  const auto net = build_network(p, {across, CandidateList::empty("D1", "merged")}, Lexicon());
  const auto out = bp_rerank(net, {});
  EXPECT_NEAR(as_map(out.slots[0].candidates).at("AB"), 0.5, 1e-12);
  EXPECT_TRUE(out.slots[1].candidates.empty());
}

TEST(CharProbability, Examples) {
  CellMarginal m = both(point('E', 1.0), point('E', 1.0));
  EXPECT_DOUBLE_EQ(char_probability(m)[letter_index('E')], 1.0);
  m = both(point('E', 0.5), point('E', 0.5));
  EXPECT_DOUBLE_EQ(char_probability(m)[letter_index('E')], 0.25);
  std::mt19937 rng(97);
  for (int n = 0; n < 100; ++n) {
    m = both(random_distribution(rng, 0.3), random_distribution(rng, 0.3));
    const auto p = char_probability(m);
    for (int i = 0; i < 26; ++i) EXPECT_DOUBLE_EQ(p[i], m.across[i] * m.down[i]);
  }
  CellMarginal blind;
  blind.has_across = true;
  blind.across = point('Q', 0.7);
  EXPECT_DOUBLE_EQ(char_probability(blind)[letter_index('Q')], 0.7);
}

TEST(FixLetters, ThresholdExamples) {
  // 0.9999^2 = 0.99980001 misses the strict bound but passes the relaxed one.
  EXPECT_EQ(fixed_letter(both(point('E', 0.9999), point('E', 0.9999))), 'E');
  EXPECT_EQ(fixed_letter(both(point('E', 1.0), point('E', 1.0))), 'E');
  EXPECT_FALSE(fixed_letter(both(point('E', 0.95), point('E', 0.95))));
  // Product above 0.99 but one direction at 0.9 exactly.
  EXPECT_FALSE(fixed_letter(both(point('E', 0.9), point('E', 0.9))));
  // Disagreeing argmaxes are never fixed.
  EXPECT_FALSE(fixed_letter(both(point('E', 0.99999), point('A', 0.99999))));
}

TEST(FixLetters, BlindCellsUseOneSide) {
  CellMarginal m;
  m.has_down = true;
  m.down = point('R', 0.99995);
  EXPECT_EQ(fixed_letter(m), 'R');
  m.down = point('R', 0.95);
  EXPECT_FALSE(fixed_letter(m));
  EXPECT_FALSE(fixed_letter(CellMarginal{}));
}

TEST(FixLetters, MatchesReferenceChecker) {
  std::mt19937 rng(101);
  std::uniform_real_distribution<double> peak(0.85, 1.0);
  for (int n = 0; n < 2000; ++n) {
    CellMarginal m;
    m.cell = {n, 0};
    const int kind = n % 4;
    m.has_across = kind != 1;
    m.has_down = kind != 2;
    if (m.has_across) m.across = random_distribution(rng, peak(rng));
    if (m.has_down) m.down = random_distribution(rng, peak(rng));
    if (kind == 3 && m.has_across && m.has_down) m.down = m.across;  // forces agreement often
    const auto want = oracle::reference_fix(m.has_across ? std::optional(m.across) : std::nullopt,
                                            m.has_down ? std::optional(m.down) : std::nullopt);
    EXPECT_EQ(fixed_letter(m), want);
    const auto fixed = fix_letters({m});
    EXPECT_EQ(fixed.size(), want ? 1u : 0u);
  }
}

TEST(GreedyFill, PointMassesFillTheGrid) {
  const auto p = puzzle({"..", ".."});
  std::vector<CandidateList> lists;
  const std::map<std::string, std::string> words{{"A0,0", "RE"}, {"A1,0", "LA"}, {"D0,0", "RL"}, {"D0,1", "EA"}};
  for (const auto& s : p.slots()) lists.push_back(CandidateList(s.id, "merged", {{words.at(s.id), 1.0}}, 1.0));
  const auto net = build_network(p, lists, Lexicon());
  const auto st = greedy_word_fill(p, net, {});
  EXPECT_EQ(st.unfilled(p.grid()), 0u);
  for (std::size_t s = 0; s < p.slots().size(); ++s) {
    EXPECT_EQ(*st.placed[s], words.at(p.slots()[s].id));
    EXPECT_EQ(st.placed_by[s], "list");
  }
}

TEST(GreedyFill, ConflictingSlotStaysEmpty) {
  const auto p = puzzle({"...", ".##"});  // A1 (0,0) len 3, D1 (0,0) len 2
  const auto a = CandidateList("A1", "merged", {{"XYZ", 1.0}}, 1.0);
  const auto d = CandidateList("D1", "merged", {{"QB", 1.0}}, 1.0);
  const auto net = build_network(p, {a, d}, Lexicon());
  const auto st = greedy_word_fill(p, net, {{Cell{0, 0}, 'Q'}});
  std::size_t across = 0;
  while (p.slots()[across].direction != Direction::Across) ++across;
  EXPECT_FALSE(st.placed[across]);
  EXPECT_TRUE(st.fixed[p.grid().index({0, 0})]);
  EXPECT_FALSE(st.letters[p.grid().index({0, 1})]);
  EXPECT_FALSE(st.letters[p.grid().index({0, 2})]);
  EXPECT_EQ(st.unfilled(p.grid()), 2u);
}

TEST(GreedyFill, MatchesReferenceGreedy) {
  std::mt19937 rng(103);
  const auto p = puzzle({"....", ".#..", "....", "..#."});
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<CandidateList> lists;
    for (const auto& s : p.slots()) {
      std::vector<std::pair<std::string, double>> scores;
      const int n = static_cast<int>(rng() % 5);
      for (int k = 0; k < n; ++k) {
        std::string w;
        for (int i = 0; i < s.length; ++i) w.push_back(static_cast<char>('A' + rng() % 2));
        scores.emplace_back(w, 1.0 + rng() % 4);
      }
      lists.push_back(CandidateList::from_scores(s.id, "merged", s.length, scores, 1.0));
    }
    std::map<std::pair<int, int>, char> fixed_map;
    std::vector<FixedLetter> fixed;
    if (rng() % 2) {
      fixed.push_back({Cell{0, 0}, static_cast<char>('A' + rng() % 2)});
      fixed_map[{0, 0}] = fixed.back().letter;
    }
    ConstraintNetwork net;
    net.cells = crossings(p);
    for (std::size_t s = 0; s < lists.size(); ++s) net.slots.push_back({p.slots()[s].id, p.slots()[s].length, lists[s], SlotSource::Experts});
    const auto st = greedy_word_fill(p, net, fixed);
    EXPECT_EQ(st.placed, oracle::reference_greedy(p, lists, fixed_map));
  }
}

TEST(ImplicitFill, Examples) {
  const auto p = puzzle({"..", "#."});  // A1 (0,0) len 2, D1 (0,1) len 2
  const Lexicon lex({{"LA", 9}, {"BA", 1}, {"AB", 2}});
  auto st = empty_fill(p);
  std::size_t down = 0;
  while (p.slots()[down].direction != Direction::Down) ++down;
  st.place(p.grid(), down, p.slots()[down], "AB", "list");
  const auto out = implicit_fill(p, st, lex);
  std::size_t across = 1 - down;
  EXPECT_EQ(*out.placed[across], "LA");
  EXPECT_EQ(out.placed_by[across], "implicit");
  // Nothing left to place: unchanged.
  const auto again = implicit_fill(p, out, lex);
  EXPECT_EQ(again.placed, out.placed);
  EXPECT_EQ(again.letters, out.letters);
}

TEST(ImplicitFill, MatchesPatternScan) {
  std::mt19937 rng(107);
  const auto p = puzzle({"...", "...", "..."});
  std::vector<std::pair<std::string, std::uint64_t>> words;
  for (int i = 0; i < 60; ++i) {
    std::string w;
    for (int k = 0; k < 3; ++k) w.push_back(static_cast<char>('A' + rng() % 3));
    words.emplace_back(w, 1 + rng() % 20);
  }
  const Lexicon lex(words);
  std::map<std::string, std::uint64_t> freq;
  for (const auto& [w, f] : words) freq[w] += f;
  for (int trial = 0; trial < 50; ++trial) {
    auto st = empty_fill(p);
    // Place three random slots from the lexicon, leaving three to the implicit phase.
    for (std::size_t s = 0; s < 3; ++s) {
      const std::size_t slot = (s * 2 + trial) % p.slots().size();
      if (st.placed[slot]) continue;
      const auto m = lex.match(st.pattern(p.grid(), p.slots()[slot]));
      if (!m.empty()) st.place(p.grid(), slot, p.slots()[slot], m[rng() % m.size()].word, "list");
    }
    auto expected = st;
    for (std::size_t s = 0; s < p.slots().size(); ++s) {
      if (expected.placed[s]) continue;
      const std::string pattern = expected.pattern(p.grid(), p.slots()[s]);
      std::optional<std::string> best;
      for (const auto& [w, f] : freq) {
        bool ok = true;
        for (int i = 0; i < 3; ++i) ok = ok && (pattern[i] == '?' || pattern[i] == w[i]);
        if (ok && (!best || f > freq.at(*best))) best = w;  // map order breaks ties alphabetically
      }
      if (best) expected.place(p.grid(), s, p.slots()[s], *best, "implicit");
    }
    const auto got = implicit_fill(p, st, lex);
    EXPECT_EQ(got.placed, expected.placed);
    EXPECT_EQ(got.letters, expected.letters);
  }
}
