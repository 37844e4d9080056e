#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "crossfill/harness.hpp"

using namespace crossfill;

namespace {

const std::string kFixtures = CROSSFILL_FIXTURES;

Environment fixture_environment() { return Environment::from_config(Config::load(kFixtures + "/fixture.conf")); }

Metrics words(double w) { return Metrics{w, w, w}; }

}  // namespace

TEST(ChallengeScore, WorkedValues) {
  auto s = challenge_score(words(100), 600, 600);
  EXPECT_DOUBLE_EQ(s.total, 115.0);
  EXPECT_DOUBLE_EQ(s.time_bonus, 0.0);
  s = challenge_score(words(100), 300, 600, 110);
  EXPECT_DOUBLE_EQ(s.base, 110.0);
  EXPECT_DOUBLE_EQ(s.time_bonus, 7.5);
  EXPECT_DOUBLE_EQ(s.total, 132.5);
  s = challenge_score(words(0), 600, 600);
  EXPECT_DOUBLE_EQ(s.total, 0.0);
  s = challenge_score(words(50), 0, 600);
  EXPECT_DOUBLE_EQ(s.total, 50.0 + 15.0);
}

TEST(ChallengeScore, LateSubmissionKeepsOnlyBase) {
  const auto s = challenge_score(words(100), 601, 600);
  EXPECT_DOUBLE_EQ(s.time_bonus, 0.0);
  EXPECT_DOUBLE_EQ(s.perfection_bonus, 0.0);
  EXPECT_DOUBLE_EQ(s.total, 100.0);
}

TEST(ChallengeScore, Monotone) {
  double prev = -1;
  for (int w = 0; w <= 100; w += 5) {
    const double t = challenge_score(words(w), 200, 600).total;
    EXPECT_GT(t, prev);
    prev = t;
  }
  prev = 1e9;
  for (int e = 0; e <= 600; e += 50) {
    const double t = challenge_score(words(70), e, 600).total;
    EXPECT_LT(t, prev);
    prev = t;
  }
}

TEST(ChallengeScore, RejectsBadTimes) {
  EXPECT_THROW(challenge_score(words(1), 1, 0), Error);
  EXPECT_THROW(challenge_score(words(1), -1, 10), Error);
}

TEST(Config, ParsesValuesPathsAndLists) {
  const auto c = Config::parse("# comment\na = 1.5\nfile = x/y.tsv  # trailing\nabs = /tmp/z\nl = a, b,, c\n", "/base");
  EXPECT_DOUBLE_EQ(c.number("a", 0), 1.5);
  EXPECT_DOUBLE_EQ(c.number("missing", 7), 7.0);
  EXPECT_EQ(*c.path("file"), std::filesystem::path("/base/x/y.tsv"));
  EXPECT_EQ(*c.path("abs"), std::filesystem::path("/tmp/z"));
  EXPECT_EQ(c.list("l"), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_FALSE(c.get("none"));
  EXPECT_THROW(c.number("file", 0), Error);
  EXPECT_THROW(Config::parse("no equals sign"), Error);
  EXPECT_THROW(Config::parse(" = v"), Error);
}

TEST(Config, UnknownExpertIds) {
  EXPECT_NO_THROW(check_expert_ids(all_expert_ids()));
  try {
    check_expert_ids({"cluedb", "oracle"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("unknown expert id"), std::string::npos);
  }
  EXPECT_THROW(Environment::from_config(Config::parse("experts = cluedb, wat")), Error);
  EXPECT_THROW(Environment::from_config(Config::parse("bp.damping = 1")), Error);
}

TEST(Environment, ActiveSetAndWeights) {
  const auto env = fixture_environment();
  EXPECT_EQ(env.active(), (std::vector<std::string>{"cluedb", "kg", "rulebased"}));
  EXPECT_EQ(env.expert("kg")->id(), "kg");
  const auto w = env.weights({"cluedb", "kg"});
  EXPECT_DOUBLE_EQ(w.weight(kAllBuckets.front(), "cluedb"), 0.5);
  EXPECT_DOUBLE_EQ(w.weight(kAllBuckets.back(), "kg"), 0.5);
}

TEST(Testset, MatchesHandAggregation) {
  const auto env = fixture_environment();
  const auto report = run_testset(kFixtures + "/testset", env, env.active());
  ASSERT_EQ(report.puzzles.size(), 6u);
  EXPECT_EQ(report.skipped, 0u);

  // Means recomputed from the per-puzzle rows.
  std::map<std::string, std::vector<Metrics>> by_source;
  for (const auto& p : report.puzzles) {
    by_source[p.source].push_back(p.metrics);
    by_source["overall"].push_back(p.metrics);
  }
  ASSERT_EQ(report.rows.size(), 3u);
  for (const auto& row : report.rows) {
    const auto& ms = by_source.at(row.source);
    double w = 0, l = 0, i = 0;
    for (const auto& m : ms) {
      w += m.words_correct;
      l += m.letters_correct;
      i += m.letters_inserted;
    }
    EXPECT_EQ(row.puzzles, ms.size());
    EXPECT_NEAR(row.metrics.words_correct, w / ms.size(), 1e-9) << row.source;
    EXPECT_NEAR(row.metrics.letters_correct, l / ms.size(), 1e-9) << row.source;
    EXPECT_NEAR(row.metrics.letters_inserted, i / ms.size(), 1e-9) << row.source;
  }

  EXPECT_EQ(report.rows[0].source, "alpha");
  EXPECT_EQ(report.rows[1].source, "beta");
  EXPECT_EQ(report.rows[2].source, "overall");
  EXPECT_NEAR(report.rows[0].metrics.words_correct, 250.0 / 3, 1e-9);
  EXPECT_NEAR(report.rows[0].metrics.letters_correct, 2200.0 / 27, 1e-9);
  EXPECT_NEAR(report.rows[1].metrics.words_correct, 50.0, 1e-9);
  EXPECT_NEAR(report.rows[1].metrics.letters_correct, 400.0 / 9, 1e-9);
  EXPECT_NEAR(report.rows[2].metrics.words_correct, 200.0 / 3, 1e-9);
  EXPECT_NEAR(report.rows[2].metrics.letters_correct, 1700.0 / 27, 1e-9);
  for (const auto& r : report.rows) EXPECT_DOUBLE_EQ(r.metrics.letters_inserted, 100.0);
}

TEST(Testset, ThreadCountDoesNotChangeTheCsv) {
  auto c = Config::load(kFixtures + "/fixture.conf");
  const auto one = Environment::from_config(c);
  c.set("threads", "4");
  c.set("agents", "threaded");
  const auto four = Environment::from_config(c);
  const auto a = testset_csv(run_testset(kFixtures + "/testset", one, one.active()));
  const auto b = testset_csv(run_testset(kFixtures + "/testset", four, four.active()));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a,
            "source,puzzles,words_correct,letters_correct,letters_inserted\n"
            "alpha,3,83.3333,81.4815,100.0000\n"
            "beta,3,50.0000,44.4444,100.0000\n"
            "overall,6,66.6667,62.9630,100.0000\n"
            "# skipped,0\n");
}

TEST(Testset, UnreadablePuzzlesAreSkipped) {
  const auto dir = std::filesystem::temp_directory_path() / "crossfill_testset_skip";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  std::filesystem::copy_file(kFixtures + "/oracle.xw", dir / "good.xw");
  {
    std::ofstream(dir / "bad.xw") << "ROWS x\n";
    std::ofstream(dir / "notes.txt") << "ignored\n";
  }
  const auto env = fixture_environment();
  const auto report = run_testset(dir, env, {"cluedb"});
  EXPECT_EQ(report.puzzles.size(), 1u);
  EXPECT_EQ(report.skipped, 1u);
  EXPECT_NE(testset_csv(report).find("# skipped,1\n"), std::string::npos);
  std::filesystem::remove_all(dir);
  EXPECT_THROW(run_testset(dir, env, {"cluedb"}), Error);
}

TEST(Ablation, DropsAgainstFull) {
  const auto env = fixture_environment();
  const auto subsets = parse_subsets(read_file(kFixtures + "/subsets.txt"));
  ASSERT_EQ(subsets.size(), 3u);
  const auto rows = run_ablation(kFixtures + "/testset", env, subsets);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].name, "Full");
  EXPECT_FALSE(rows[0].drop);
  EXPECT_NEAR(rows[0].metrics.words_correct, 200.0 / 3, 1e-9);
  EXPECT_NEAR(rows[1].metrics.words_correct, 50.0, 1e-9);
  EXPECT_NEAR(*rows[1].drop, 50.0 / 3, 1e-9);
  EXPECT_NEAR(rows[2].metrics.words_correct, 50.0 / 3, 1e-9);
  EXPECT_NEAR(*rows[2].drop, 50.0, 1e-9);
  EXPECT_NEAR(*rows[3].drop, 0.0, 1e-9);
  // The Full row is the plain test-set run.
  EXPECT_EQ(testset_csv(rows[0].testset), testset_csv(run_testset(kFixtures + "/testset", env, env.active())));
  const auto table = ablation_table(rows);
  EXPECT_EQ(table.substr(0, table.find('\n')), "configuration,words_correct,letters_correct,word_drop");
  EXPECT_NE(table.find("Full,66.6667,62.9630,-\n"), std::string::npos);
  EXPECT_NE(table.find("no-cluedb,50.0000,"), std::string::npos);
  EXPECT_NE(table.find(",16.6667\n"), std::string::npos);
}

TEST(Ablation, SubsetParsing) {
  const auto s = parse_subsets("# c\nonly-db = cluedb\n\nmix = kg , lexicon\n");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[1].name, "mix");
  EXPECT_EQ(s[1].experts, (std::vector<std::string>{"kg", "lexicon"}));
  EXPECT_THROW(parse_subsets("x = cluedb, nope"), Error);
  EXPECT_THROW(parse_subsets("just a name"), Error);
}

TEST(TrainingPairs, Parsing) {
  const auto pairs = parse_training_pairs("Malade\till\nbroken line\n\nVide\t\nÉté\tété\n");
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].gold, "ILL");
  EXPECT_EQ(pairs[1].gold, "ETE");
  EXPECT_EQ(pairs[1].clue, "Été");
}
