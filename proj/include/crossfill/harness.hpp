#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "crossfill/corpus.hpp"
#include "crossfill/experts.hpp"
#include "crossfill/knowledge_graph.hpp"
#include "crossfill/merge.hpp"
#include "crossfill/pipeline.hpp"
#include "crossfill/rule_based.hpp"
#include "crossfill/web_search.hpp"

namespace crossfill {

struct ChallengeScore {
  double base = 0.0;
  double time_bonus = 0.0;
  double perfection_bonus = 0.0;
  double total = 0.0;
};

inline constexpr double kMaxTimeBonus = 15.0;
inline constexpr double kPerfectionBonus = 15.0;

/// Competition points: a share of `base_max` for correct words, a bonus
/// linear in unused time, and a flat bonus for a perfect grid. Past the time
/// limit only the base counts.
inline ChallengeScore challenge_score(const Metrics& m, double elapsed, double limit, double base_max = 100.0) {
  if (!(limit > 0.0)) throw Error("time limit must be positive");
  if (elapsed < 0.0) throw Error("elapsed time must not be negative");
  ChallengeScore s;
  s.base = m.words_correct / 100.0 * base_max;
  if (elapsed <= limit) {
    s.time_bonus = kMaxTimeBonus * (1.0 - elapsed / limit);
    s.perfection_bonus = m.words_correct == 100.0 ? kPerfectionBonus : 0.0;
  }
  s.total = s.base + s.time_bonus + s.perfection_bonus;
  return s;
}

/// `key = value` lines, `#` comments. Relative paths resolve against the
/// directory of the file.
class Config {
 public:
  Config() = default;

  static Config parse(std::string_view content, std::filesystem::path base_dir = {}) {
    Config c;
    c.base_ = std::move(base_dir);
    std::size_t n = 0;
    for (auto line : text::lines(content)) {
      ++n;
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = text::trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw Error("config line " + std::to_string(n) + ": expected key = value");
      const auto key = std::string(text::trim(line.substr(0, eq)));
      if (key.empty()) throw Error("config line " + std::to_string(n) + ": empty key");
      c.values_[key] = std::string(text::trim(line.substr(eq + 1)));
    }
    return c;
  }

  static Config load(const std::filesystem::path& path) {
    return parse(read_file(path), std::filesystem::absolute(path).parent_path());
  }

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::optional<std::string> get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  std::string get_or(const std::string& key, std::string fallback) const { return get(key).value_or(std::move(fallback)); }

  std::optional<std::filesystem::path> path(const std::string& key) const {
    const auto v = get(key);
    if (!v || v->empty()) return std::nullopt;
    std::filesystem::path p(*v);
    return p.is_absolute() || base_.empty() ? p : base_ / p;
  }

  double number(const std::string& key, double fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    const auto d = text::parse_double(*v);
    if (!d) throw Error("config key '" + key + "' is not a number: " + *v);
    return *d;
  }

  std::vector<std::string> list(const std::string& key) const {
    std::vector<std::string> out;
    const auto v = get(key);
    if (!v) return out;
    for (auto item : text::split(*v, ',')) {
      item = text::trim(item);
      if (!item.empty()) out.emplace_back(item);
    }
    return out;
  }

 private:
  std::filesystem::path base_;
  std::map<std::string, std::string> values_;
};

inline const std::vector<std::string>& all_expert_ids() {
  static const std::vector<std::string> ids{
      std::string(expert_ids::kClueDb),    std::string(expert_ids::kSimilarity), std::string(expert_ids::kKnowledgeGraph),
      std::string(expert_ids::kWebSearch), std::string(expert_ids::kLexicon),    std::string(expert_ids::kRuleBased)};
  return ids;
}

inline void check_expert_ids(const std::vector<std::string>& ids) {
  const auto& known = all_expert_ids();
  for (const auto& id : ids) {
    if (std::find(known.begin(), known.end(), id) == known.end()) throw Error("unknown expert id '" + id + "'");
  }
}

/// Loaded corpora plus every expert the configuration can build. Experts are
/// built once and shared between runs and subsets.
class Environment {
 public:
  static Environment from_config(const Config& config) {
    Environment env;
    env.config_ = config;

    auto db = std::make_shared<ClueDb>();
    if (auto p = config.path("clue_db")) *db = load_clue_db(*p, {config.number("max_skipped_fraction", 0.01)}).value;
    auto lexicon = std::make_shared<Lexicon>();
    if (auto p = config.path("lexicon")) *lexicon = load_lexicon(*p, {config.number("max_skipped_fraction", 0.01)}).value;
    env.lexicon_ = lexicon;

    SimilarityConfig sim;
    sim.k = static_cast<std::size_t>(config.number("similarity.k", static_cast<double>(sim.k)));
    sim.temperature = config.number("similarity.temperature", sim.temperature);

    auto similarity = std::make_shared<SimilarityExpert>(build_similarity_index(db), sim);
    env.experts_[std::string(expert_ids::kClueDb)] = std::make_shared<ClueDbExpert>(db);
    env.experts_[std::string(expert_ids::kSimilarity)] = similarity;
    env.experts_[std::string(expert_ids::kLexicon)] = std::make_shared<LexiconExpert>(lexicon);

    auto graph = std::make_shared<KnowledgeGraph>();
    if (auto p = config.path("knowledge_graph")) *graph = load_knowledge_graph(*p);
    env.experts_[std::string(expert_ids::kKnowledgeGraph)] = std::make_shared<KnowledgeGraphExpert>(graph, sim);

    auto stoplist = std::make_shared<Stoplist>();
    if (auto p = config.path("stoplist")) *stoplist = load_stoplist(*p);
    std::shared_ptr<const SearchBackend> backend = std::make_shared<EmptySearchBackend>();
    if (auto p = config.path("search_fixtures")) backend = std::make_shared<FixtureSearchBackend>(*p);
    WebSearchConfig web;
    web.max_snippets = static_cast<std::size_t>(config.number("websearch.max_snippets", static_cast<double>(web.max_snippets)));
    env.experts_[std::string(expert_ids::kWebSearch)] = std::make_shared<WebSearchExpert>(backend, stoplist, web);

    MarkerTable markers;
    if (auto p = config.path("markers")) markers = load_marker_table(*p);
    env.experts_[std::string(expert_ids::kRuleBased)] = std::make_shared<RuleBasedExpert>(markers, similarity);

    env.active_ = config.list("experts");
    if (env.active_.empty()) env.active_ = all_expert_ids();
    check_expert_ids(env.active_);

    if (auto p = config.path("weights")) env.weights_ = WeightTable::parse(read_file(*p));

    env.solver_.bp.iterations = static_cast<std::size_t>(config.number("bp.iterations", static_cast<double>(env.solver_.bp.iterations)));
    env.solver_.bp.damping = config.number("bp.damping", env.solver_.bp.damping);
    env.solver_.bp.epsilon = config.number("bp.epsilon", env.solver_.bp.epsilon);
    env.solver_.gather.deadline =
        std::chrono::milliseconds(static_cast<long long>(config.number("gather.deadline_ms", 5000.0)));
    for (const auto& id : config.list("gather.required")) env.solver_.gather.required.insert(id);
    if (config.get_or("agents", "inline") == "threaded") env.solver_.agent_mode = AgentMode::Threaded;
    env.threads_ = static_cast<std::size_t>(std::max(1.0, config.number("threads", 1.0)));
    if (env.solver_.bp.damping < 0.0 || env.solver_.bp.damping >= 1.0) throw Error("bp.damping must lie in [0, 1)");
    return env;
  }

  const std::vector<std::string>& active() const { return active_; }
  void set_active(std::vector<std::string> ids) {
    check_expert_ids(ids);
    active_ = std::move(ids);
  }

  std::vector<ExpertPtr> experts(const std::vector<std::string>& ids) const {
    check_expert_ids(ids);
    std::vector<ExpertPtr> out;
    for (const auto& id : ids) out.push_back(experts_.at(id));
    return out;
  }

  ExpertPtr expert(const std::string& id) const { return experts(std::vector<std::string>{id}).front(); }

  /// The configured table, or uniform weights over `ids`.
  WeightTable weights(const std::vector<std::string>& ids) const {
    if (weights_) return *weights_;
    return WeightTable::uniform(ids.empty() ? all_expert_ids() : ids);
  }

  const Lexicon& lexicon() const { return *lexicon_; }
  const SolverConfig& solver() const { return solver_; }
  SolverConfig& solver() { return solver_; }
  std::size_t threads() const { return threads_; }
  const Config& config() const { return config_; }

  SolveReport solve(const Puzzle& puzzle, const std::vector<std::string>& ids) const {
    return crossfill::solve(puzzle, experts(ids), weights(ids), *lexicon_, solver_);
  }

 private:
  Config config_;
  std::map<std::string, ExpertPtr> experts_;
  std::shared_ptr<const Lexicon> lexicon_;
  std::optional<WeightTable> weights_;
  std::vector<std::string> active_;
  SolverConfig solver_;
  std::size_t threads_ = 1;
};

struct PuzzleResult {
  std::string file;  // name relative to the test-set directory
  std::string source;
  Metrics metrics;
};

struct SourceRow {
  std::string source;  // "overall" for the last row
  std::size_t puzzles = 0;
  Metrics metrics;
};

struct TestsetReport {
  std::vector<PuzzleResult> puzzles;  // sorted by file
  std::vector<SourceRow> rows;        // sorted by source, then the overall row
  std::size_t skipped = 0;
};

inline constexpr std::string_view kPuzzleExtension = ".xw";
inline constexpr std::string_view kOverallRow = "overall";

inline std::vector<std::filesystem::path> puzzle_files(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == kPuzzleExtension) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

/// Unweighted means per source and over all puzzles.
inline std::vector<SourceRow> aggregate(const std::vector<PuzzleResult>& results) {
  std::map<std::string, std::vector<const Metrics*>> groups;
  std::vector<const Metrics*> all;
  for (const auto& r : results) {
    groups[r.source].push_back(&r.metrics);
    all.push_back(&r.metrics);
  }
  const auto mean = [](const std::vector<const Metrics*>& ms) {
    Metrics m;
    for (const auto* x : ms) {
      m.words_correct += x->words_correct;
      m.letters_correct += x->letters_correct;
      m.letters_inserted += x->letters_inserted;
    }
    if (!ms.empty()) {
      const double n = static_cast<double>(ms.size());
      m.words_correct /= n;
      m.letters_correct /= n;
      m.letters_inserted /= n;
    }
    return m;
  };
  std::vector<SourceRow> rows;
  for (const auto& [source, ms] : groups) rows.push_back({source, ms.size(), mean(ms)});
  rows.push_back({std::string(kOverallRow), all.size(), mean(all)});
  return rows;
}

/// Solves every `*.xw` puzzle of `dir` with the expert set `ids`. Unreadable
/// or unsolvable puzzles are skipped with a warning and counted.
inline TestsetReport run_testset(const std::filesystem::path& dir, const Environment& env,
                                 const std::vector<std::string>& ids) {
  const auto files = puzzle_files(dir);
  std::vector<std::optional<PuzzleResult>> results(files.size());
  const auto work = [&](std::size_t i) {
    try {
      const auto puzzle = load_puzzle(files[i]);
      if (!puzzle.solution()) throw Error("puzzle has no solution");
      const auto report = env.solve(puzzle, ids);
      results[i] = PuzzleResult{files[i].filename().string(), puzzle.source(), *report.metrics};
    } catch (const std::exception& e) {
      spdlog::warn("skipping {}: {}", files[i].string(), e.what());
    }
  };
  const std::size_t threads = std::min(env.threads(), std::max<std::size_t>(files.size(), 1));
  if (threads <= 1) {
    for (std::size_t i = 0; i < files.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.push_back(std::async(std::launch::async, [&] {
        for (std::size_t i = next++; i < files.size(); i = next++) work(i);
      }));
    }
    for (auto& f : pool) f.get();
  }
  TestsetReport report;
  for (auto& r : results) {
    if (r) {
      report.puzzles.push_back(std::move(*r));
    } else {
      ++report.skipped;
    }
  }
  report.rows = aggregate(report.puzzles);
  return report;
}

inline std::string testset_csv(const TestsetReport& report) {
  std::string out = "source,puzzles,words_correct,letters_correct,letters_inserted\n";
  for (const auto& r : report.rows) {
    out += r.source + "," + std::to_string(r.puzzles) + "," + format_double("%.4f", r.metrics.words_correct) + "," +
           format_double("%.4f", r.metrics.letters_correct) + "," + format_double("%.4f", r.metrics.letters_inserted) +
           "\n";
  }
  out += "# skipped," + std::to_string(report.skipped) + "\n";
  return out;
}

struct ExpertSubset {
  std::string name;
  std::vector<std::string> experts;
};

/// `name = id, id, ...` per line; `#` comments.
inline std::vector<ExpertSubset> parse_subsets(std::string_view content) {
  std::vector<ExpertSubset> out;
  std::size_t n = 0;
  for (auto line : text::lines(content)) {
    ++n;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error("subsets line " + std::to_string(n) + ": expected name = ids");
    ExpertSubset s{std::string(text::trim(line.substr(0, eq))), {}};
    for (auto id : text::split(line.substr(eq + 1), ',')) {
      id = text::trim(id);
      if (!id.empty()) s.experts.emplace_back(id);
    }
    check_expert_ids(s.experts);
    out.push_back(std::move(s));
  }
  return out;
}

struct AblationRow {
  std::string name;
  Metrics metrics;              // overall row of the subset's test-set run
  std::optional<double> drop;   // words-correct points lost against Full
  TestsetReport testset;
};

inline constexpr std::string_view kFullConfiguration = "Full";

/// One test-set run for the configured expert set ("Full") and one per subset.
inline std::vector<AblationRow> run_ablation(const std::filesystem::path& dir, const Environment& env,
                                             const std::vector<ExpertSubset>& subsets) {
  for (const auto& s : subsets) check_expert_ids(s.experts);
  std::vector<AblationRow> rows;
  auto full = run_testset(dir, env, env.active());
  const Metrics full_metrics = full.rows.back().metrics;
  rows.push_back({std::string(kFullConfiguration), full_metrics, std::nullopt, std::move(full)});
  for (const auto& s : subsets) {
    auto t = run_testset(dir, env, s.experts);
    const Metrics m = t.rows.back().metrics;
    rows.push_back({s.name, m, full_metrics.words_correct - m.words_correct, std::move(t)});
  }
  return rows;
}

inline std::string ablation_table(const std::vector<AblationRow>& rows) {
  std::string out = "configuration,words_correct,letters_correct,word_drop\n";
  for (const auto& r : rows) {
    out += r.name + "," + format_double("%.4f", r.metrics.words_correct) + "," +
           format_double("%.4f", r.metrics.letters_correct) + "," +
           (r.drop ? format_double("%.4f", *r.drop) : std::string("-")) + "\n";
  }
  return out;
}

/// `clue<TAB>answer` lines for weight training.
inline std::vector<TrainingPair> parse_training_pairs(std::string_view content) {
  std::vector<TrainingPair> out;
  std::size_t n = 0;
  for (auto line : text::lines(content)) {
    ++n;
    if (text::trim(line).empty()) continue;
    const auto fields = text::split(line, '\t');
    if (fields.size() < 2) {
      spdlog::warn("training line {}: expected clue<TAB>answer", n);
      continue;
    }
    try {
      auto gold = text::normalize_answer(fields[1]);
      if (gold.empty()) throw Error("empty answer");
      out.push_back({std::string(text::trim(fields[0])), std::move(gold)});
    } catch (const Error& e) {
      spdlog::warn("training line {}: {}", n, e.what());
    }
  }
  return out;
}

}  // namespace crossfill
