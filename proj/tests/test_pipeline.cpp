#include <map>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "crossfill/pipeline.hpp"
#include "support/oracles.hpp"

using namespace crossfill;

namespace {

using Table = std::map<std::string, std::vector<std::pair<std::string, double>>>;

Puzzle oracle_puzzle() { return load_puzzle(std::string(CROSSFILL_FIXTURES) + "/oracle.xw"); }

ExpertPtr clue_db_expert() {
  return std::make_shared<ClueDbExpert>(
      std::make_shared<const ClueDb>(load_clue_db(std::string(CROSSFILL_FIXTURES) + "/clues.tsv").value));
}

// Answers by slot id for the oracle grid, through the clue texts.
ExpertPtr partial_expert(const Puzzle& p, const std::map<std::string, std::string>& by_slot) {
  Table t;
  for (const auto& s : p.slots()) {
    if (auto it = by_slot.find(s.id); it != by_slot.end()) t[s.clue] = {{it->second, 1.0}};
  }
  return std::make_shared<StaticExpert>("partial", t, 1.0);
}

}  // namespace

TEST(Solve, OracleGridIsSolvedExactly) {
  const auto p = oracle_puzzle();
  const auto report = solve(p, {clue_db_expert()}, WeightTable::uniform({"cluedb"}), Lexicon());
  ASSERT_TRUE(report.metrics);
  EXPECT_DOUBLE_EQ(report.metrics->words_correct, 100.0);
  EXPECT_DOUBLE_EQ(report.metrics->letters_correct, 100.0);
  EXPECT_DOUBLE_EQ(report.metrics->letters_inserted, 100.0);
  EXPECT_EQ(report.unfilled_cells, 0u);
  EXPECT_EQ(report.fixed_letters, 21u);
  for (const auto& s : report.slots) EXPECT_EQ(s.source, "cluedb");
  EXPECT_EQ(report.rows[0], "SALUT");
  EXPECT_EQ(report.title, "Oracle 5x5");
}

TEST(Solve, NoExpertsAndNoLexiconStillReports) {
  const auto p = oracle_puzzle();
  const auto report = solve(p, {}, WeightTable(), Lexicon());
  ASSERT_TRUE(report.metrics);
  EXPECT_EQ(report.metrics->letters_inserted, 0.0);
  EXPECT_EQ(report.metrics->words_correct, 0.0);
  EXPECT_EQ(report.unfilled_cells, 21u);
  for (const auto& s : report.slots) EXPECT_FALSE(s.word);
  const auto text = serialize_report(report, false);
  EXPECT_NE(text.find("A1\t-\t-\t0.000000000"), std::string::npos);
  EXPECT_NE(text.find(".#.#."), std::string::npos);
}

TEST(Solve, PartialCoverageMatchesHandCount) {
  const auto p = oracle_puzzle();
  // Known: A1 SALUT, A3 SORTE, D1 SOLES (correct) and A2 LIMAS (one wrong letter).
  const auto e = partial_expert(p, {{"A1", "SALUT"}, {"A3", "SORTE"}, {"D1", "SOLES"}, {"A2", "LIMAS"}});
  const auto report = solve(p, {e}, WeightTable::uniform({"partial"}), Lexicon());
  ASSERT_TRUE(report.metrics);
  // 21 open cells: rows 0, 2, 4 (15) and column 0 rows 1, 3 (2) are filled = 17;
  // only (2,3) is wrong. Correct words: A1, A3, D1 of six.
  EXPECT_NEAR(report.metrics->words_correct, 50.0, 1e-9);
  EXPECT_NEAR(report.metrics->letters_correct, 100.0 * 16 / 21, 1e-9);
  EXPECT_NEAR(report.metrics->letters_inserted, 100.0 * 17 / 21, 1e-9);
  EXPECT_EQ(report.unfilled_cells, 4u);
  EXPECT_EQ(report.rows[2], "LIMAS");
}

TEST(Solve, LexiconFallbackFillsUncoveredSlots) {
  const auto p = oracle_puzzle();
  const auto e = partial_expert(p, {{"A1", "SALUT"}, {"A2", "LIMES"}, {"A3", "SORTE"}});
  const Lexicon lex({{"SOLES", 5}, {"LIMER", 4}, {"TASSE", 3}, {"XXXXX", 100}});
  const auto report = solve(p, {e}, WeightTable::uniform({"partial"}), lex);
  ASSERT_TRUE(report.metrics);
  EXPECT_DOUBLE_EQ(report.metrics->words_correct, 100.0);
  for (const auto& s : report.slots) {
    EXPECT_EQ(s.source, s.id[0] == 'D' ? "lexicon" : "partial") << s.id;
  }
}

TEST(Solve, ReportsAreDeterministic) {
  const auto p = oracle_puzzle();
  const auto e = partial_expert(p, {{"A1", "SALUT"}, {"D2", "LIMER"}, {"A2", "LIMAS"}});
  const std::vector<ExpertPtr> experts{e, clue_db_expert()};
  const auto weights = WeightTable::uniform({"partial", "cluedb"});
  const Lexicon lex({{"SOLES", 5}, {"TASSE", 3}});
  const auto base = serialize_report(solve(p, experts, weights, lex), false);
  SolverConfig threaded;
  threaded.agent_mode = AgentMode::Threaded;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    SolverConfig shuffled = threaded;
    shuffled.shuffle_seed = seed;
    EXPECT_EQ(serialize_report(solve(p, experts, weights, lex, shuffled), false), base);
  }
  EXPECT_EQ(serialize_report(solve(p, experts, weights, lex, threaded), false), base);
}

TEST(Solve, TraceIsNormalized) {
  const auto p = oracle_puzzle();
  const auto e = partial_expert(p, {{"A1", "SALUT"}, {"A2", "LIMAS"}});
  SolveTrace trace;
  solve(p, {e, clue_db_expert()}, WeightTable::uniform({"partial", "cluedb"}), Lexicon({{"SOLES", 2}, {"SALLE", 1}}), {},
        &trace);
  EXPECT_FALSE(trace.lists.empty());
  EXPECT_FALSE(trace.distributions.empty());
  for (const auto& l : trace.lists) {
    if (!l.empty()) EXPECT_NEAR(l.total_probability(), 1.0, 1e-9);
  }
  for (const auto& d : trace.distributions) {
    double s = 0;
    for (double x : d) s += x;
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
}

TEST(Solve, DuplicateExpertIdsRejected) {
  const auto p = oracle_puzzle();
  EXPECT_THROW(solve(p, {clue_db_expert(), clue_db_expert()}, WeightTable::uniform({"cluedb"}), Lexicon()), Error);
}

TEST(Solve, StatusPhasesPublished) {
  const auto p = oracle_puzzle();
  InProcessBus bus;
  ExpertAgent agent(bus, clue_db_expert());
  std::vector<std::string> phases;
  auto sub = bus.subscribe(std::string(topics::kSolverStatus), [&](const Envelope& e) {
    const auto st = payload::decode_status(e.payload);
    if (phases.empty() || phases.back() != st.phase) phases.push_back(st.phase);
  });
  solve_on(bus, {"cluedb"}, p, WeightTable::uniform({"cluedb"}), Lexicon(), {});
  EXPECT_EQ(phases, (std::vector<std::string>{"gather", "propagate", "fill", "done"}));
}

TEST(ScoreSolution, HandCountedGrids) {
  const auto p = parse_puzzle(oracle::puzzle_document({"..", ".."}, {"RE", "LA"}));
  SolveReport r;
  r.rows = {"RE", "LA"};
  auto m = score_solution(r, p);
  EXPECT_DOUBLE_EQ(m.words_correct, 100.0);
  r.rows = {"..", ".."};
  m = score_solution(r, p);
  EXPECT_DOUBLE_EQ(m.words_correct + m.letters_correct + m.letters_inserted, 0.0);
  // Three cells filled, two right: only the first row word is complete and correct.
  r.rows = {"RE", "X."};
  m = score_solution(r, p);
  EXPECT_DOUBLE_EQ(m.words_correct, 25.0);
  EXPECT_DOUBLE_EQ(m.letters_correct, 50.0);
  EXPECT_DOUBLE_EQ(m.letters_inserted, 75.0);
  EXPECT_THROW(score_solution(r, parse_puzzle(oracle::puzzle_document({"..", ".."}))), Error);
}

TEST(SerializeReport, Format) {
  SolveReport r;
  r.title = "T";
  r.rows = {"AB"};
  r.slots = {{"A0,0", "AB", "cluedb", 0.5}};
  r.metrics = Metrics{100, 50, 75};
  r.wall_ms = 1.5;
  EXPECT_EQ(serialize_report(r),
            "TITLE T\nGRID\nAB\nSLOTS\nA0,0\tAB\tcluedb\t0.500000000\nMETRICS\nfixed_letters 0\nunfilled_cells 0\n"
            "words_correct 100.0000\nletters_correct 50.0000\nletters_inserted 75.0000\nTIME\nwall_ms 1.500\n");
  EXPECT_EQ(serialize_report(r, false).find("TIME"), std::string::npos);
}
