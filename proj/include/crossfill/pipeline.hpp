#pragma once

#include <chrono>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "crossfill/bus.hpp"
#include "crossfill/merge.hpp"
#include "crossfill/solver.hpp"

namespace crossfill {

/// Percentages over slots and open cells.
struct Metrics {
  double words_correct = 0.0;
  double letters_correct = 0.0;
  double letters_inserted = 0.0;
};

struct SlotOutcome {
  std::string id;
  std::optional<std::string> word;
  std::string source;  // expert id, "lexicon", "implicit" or "-"
  double probability = 0.0;
};

struct SolveReport {
  std::string title;
  std::string source;
  std::vector<std::string> rows;  // letters, '#' for blocks, '.' for unfilled
  std::vector<SlotOutcome> slots;
  std::size_t fixed_letters = 0;
  std::size_t unfilled_cells = 0;
  std::optional<Metrics> metrics;
  double wall_ms = 0.0;
};

inline constexpr char kUnfilled = '.';

/// A slot counts as correct when every one of its cells holds the solution
/// letter.
inline Metrics score_solution(const SolveReport& report, const Puzzle& puzzle) {
  if (!puzzle.solution()) throw Error("puzzle has no solution to score against");
  const Grid& grid = puzzle.grid();
  if (report.rows.size() != static_cast<std::size_t>(grid.rows())) throw Error("report grid does not match the puzzle");
  const auto at = [&](Cell c) { return report.rows[c.row].at(static_cast<std::size_t>(c.col)); };

  std::size_t open = 0, inserted = 0, correct = 0;
  for (int r = 0; r < grid.rows(); ++r) {
    for (int c = 0; c < grid.cols(); ++c) {
      if (!grid.is_open({r, c})) continue;
      ++open;
      const char l = at({r, c});
      if (text::is_upper_letter(l)) ++inserted;
      if (l == puzzle.solution_at({r, c})) ++correct;
    }
  }
  std::size_t words = 0;
  for (const auto& slot : puzzle.slots()) {
    bool ok = true;
    for (int i = 0; i < slot.length && ok; ++i) ok = at(slot.cell(i)) == puzzle.solution_at(slot.cell(i));
    if (ok) ++words;
  }
  const auto pct = [](std::size_t n, std::size_t d) { return d == 0 ? 0.0 : 100.0 * static_cast<double>(n) / static_cast<double>(d); };
  return {pct(words, puzzle.slots().size()), pct(correct, open), pct(inserted, open)};
}

inline std::string format_double(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

/// Structured text form. Timing is optional so that reports of identical
/// runs can be compared byte for byte.
inline std::string serialize_report(const SolveReport& r, bool include_timing = true) {
  std::string out;
  if (!r.title.empty()) out += "TITLE " + r.title + "\n";
  if (!r.source.empty()) out += "SOURCE " + r.source + "\n";
  out += "GRID\n";
  for (const auto& row : r.rows) out += row + "\n";
  out += "SLOTS\n";
  for (const auto& s : r.slots) {
    out += s.id + "\t" + s.word.value_or("-") + "\t" + s.source + "\t" + format_double("%.9f", s.probability) + "\n";
  }
  out += "METRICS\n";
  out += "fixed_letters " + std::to_string(r.fixed_letters) + "\n";
  out += "unfilled_cells " + std::to_string(r.unfilled_cells) + "\n";
  if (r.metrics) {
    out += "words_correct " + format_double("%.4f", r.metrics->words_correct) + "\n";
    out += "letters_correct " + format_double("%.4f", r.metrics->letters_correct) + "\n";
    out += "letters_inserted " + format_double("%.4f", r.metrics->letters_inserted) + "\n";
  }
  if (include_timing) out += "TIME\nwall_ms " + format_double("%.3f", r.wall_ms) + "\n";
  return out;
}

/// Every list and letter law the pipeline produced, in production order.
struct SolveTrace {
  std::vector<CandidateList> lists;
  std::vector<LetterDistribution> distributions;
};

struct SolverConfig {
  BPConfig bp;
  GatherPolicy gather;  // required ids are taken from here; the rest of the active set is optional
  std::string run_id = "solve";
  AgentMode agent_mode = AgentMode::Inline;
  std::optional<std::uint64_t> shuffle_seed;  // permute bus dispatch order
};

namespace detail {

inline std::string provenance(const std::map<std::string, CandidateList>& lists, const std::string& word) {
  std::string best = "-";
  std::size_t best_rank = 0;
  for (const auto& [id, list] : lists) {
    const auto r = list.rank_of(word);
    if (r && (best == "-" || *r < best_rank)) {
      best = id;
      best_rank = *r;
    }
  }
  return best;
}

}  // namespace detail

/// Runs the pipeline against experts already serving `bus`.
inline SolveReport solve_on(Transport& bus, const std::set<std::string>& active, const Puzzle& puzzle,
                            const WeightTable& weights, const Lexicon& lexicon, const SolverConfig& config,
                            SolveTrace* trace = nullptr) {
  const auto t0 = std::chrono::steady_clock::now();
  CorrelationIds ids(config.run_id);
  GatherPolicy policy;
  policy.deadline = config.gather.deadline;
  for (const auto& id : active) (config.gather.required.count(id) ? policy.required : policy.optional).insert(id);

  const auto& slots = puzzle.slots();
  std::vector<std::map<std::string, CandidateList>> per_expert;
  std::vector<CandidateList> filtered;
  per_expert.reserve(slots.size());
  filtered.reserve(slots.size());
  publish_status(bus, config.run_id, "gather", 0.0);
  for (std::size_t s = 0; s < slots.size(); ++s) {
    auto gathered = request_candidates(bus, ids, slots[s].clue, slots[s].length, policy);
    std::vector<CandidateList> lists;
    for (const auto& [id, list] : gathered.lists) lists.push_back(list);
    auto merged = merge_lists(lists, weights, slots[s].length);
    auto kept = filter_list(merged, {slots[s].length, {}});
    if (trace) {
      trace->lists.insert(trace->lists.end(), lists.begin(), lists.end());
      trace->lists.push_back(merged);
      trace->lists.push_back(kept);
    }
    per_expert.push_back(std::move(gathered.lists));
    filtered.push_back(std::move(kept));
    publish_status(bus, config.run_id, "gather", static_cast<double>(s + 1) / static_cast<double>(slots.size()));
  }

  publish_status(bus, config.run_id, "propagate", 0.0);
  const auto network = build_network(puzzle, filtered, lexicon);
  BPObserver observer;
  if (trace) {
    observer = [trace](std::size_t, std::span<const LetterDistribution> msgs) {
      trace->distributions.insert(trace->distributions.end(), msgs.begin(), msgs.end());
    };
  }
  const auto reranked = bp_rerank(network, config.bp, observer);
  const auto marginals = letter_marginals(reranked, config.bp.epsilon);
  if (trace) {
    for (const auto& v : network.slots) trace->lists.push_back(v.candidates);
    for (const auto& v : reranked.slots) trace->lists.push_back(v.candidates);
    for (const auto& m : marginals) {
      trace->distributions.push_back(m.across);
      trace->distributions.push_back(m.down);
    }
  }

  publish_status(bus, config.run_id, "fill", 0.0);
  const auto fixed = fix_letters(marginals);
  auto state = greedy_word_fill(puzzle, reranked, fixed);
  state = implicit_fill(puzzle, std::move(state), lexicon);

  SolveReport report;
  report.title = puzzle.title();
  report.source = puzzle.source();
  const Grid& grid = puzzle.grid();
  for (int r = 0; r < grid.rows(); ++r) {
    std::string row;
    for (int c = 0; c < grid.cols(); ++c) {
      if (!grid.is_open({r, c})) {
        row.push_back('#');
      } else {
        const auto& l = state.letters[grid.index({r, c})];
        row.push_back(l ? *l : kUnfilled);
      }
    }
    report.rows.push_back(std::move(row));
  }
  for (std::size_t s = 0; s < slots.size(); ++s) {
    SlotOutcome o{slots[s].id, state.placed[s], "-", 0.0};
    if (o.word) {
      if (state.placed_by[s] == "implicit") {
        o.source = "implicit";
      } else if (reranked.slots[s].source == SlotSource::Lexicon) {
        o.source = std::string(expert_ids::kLexicon);
      } else {
        o.source = detail::provenance(per_expert[s], *o.word);
      }
      o.probability = reranked.slots[s].candidates.probability_of(*o.word);
    }
    report.slots.push_back(std::move(o));
  }
  report.fixed_letters = fixed.size();
  report.unfilled_cells = state.unfilled(grid);
  if (puzzle.solution()) report.metrics = score_solution(report, puzzle);
  report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  publish_status(bus, config.run_id, "done", 1.0);
  return report;
}

/// Serves `experts` on a private in-process bus and solves.
inline SolveReport solve(const Puzzle& puzzle, const std::vector<ExpertPtr>& experts, const WeightTable& weights,
                         const Lexicon& lexicon, const SolverConfig& config = {}, SolveTrace* trace = nullptr) {
  const auto t0 = std::chrono::steady_clock::now();
  auto bus = config.shuffle_seed ? std::make_unique<InProcessBus>(*config.shuffle_seed) : std::make_unique<InProcessBus>();
  std::set<std::string> active;
  std::vector<std::unique_ptr<ExpertAgent>> agents;
  for (const auto& e : experts) {
    if (!active.insert(e->id()).second) throw Error("duplicate expert id '" + e->id() + "'");
    agents.push_back(std::make_unique<ExpertAgent>(*bus, e, config.agent_mode));
  }
  auto report = solve_on(*bus, active, puzzle, weights, lexicon, config, trace);
  report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace crossfill
