// Command-line front end: solve, eval, ablate, train-weights, score.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "crossfill/harness.hpp"

namespace {

using namespace crossfill;

Environment environment(const std::string& config_path) {
  if (config_path.empty()) return Environment::from_config(Config{});
  return Environment::from_config(Config::load(config_path));
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file(out, text);
  }
}

/// Reads `words_correct` from a solve report or a `key = value` file.
Metrics read_metrics(const std::string& path) {
  Metrics m;
  bool found = false;
  const std::string content = read_file(path);
  for (auto line : text::lines(content)) {
    line = text::trim(line);
    for (const char sep : {'=', ' ', '\t'}) {
      const auto pos = line.find(sep);
      if (pos == std::string_view::npos) continue;
      const auto key = text::trim(line.substr(0, pos));
      const auto value = text::parse_double(text::trim(line.substr(pos + 1)));
      if (!value) continue;
      if (key == "words_correct") {
        m.words_correct = *value;
        found = true;
      } else if (key == "letters_correct") {
        m.letters_correct = *value;
      } else if (key == "letters_inserted") {
        m.letters_inserted = *value;
      }
      break;
    }
  }
  if (!found) throw Error("no words_correct entry in " + path);
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crossfill: crossword solver with expert candidate lists and belief propagation"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  std::string config_path;
  std::string out;

  auto* solve_cmd = app.add_subcommand("solve", "Solve one puzzle and print the report");
  std::string puzzle_path;
  std::vector<std::string> expert_list;
  bool no_timing = false;
  solve_cmd->add_option("puzzle", puzzle_path, "Puzzle file")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--config", config_path, "Configuration file")->check(CLI::ExistingFile);
  solve_cmd->add_option("--experts", expert_list, "Active expert ids (comma separated)")->delimiter(',');
  solve_cmd->add_option("--out", out, "Write the report here instead of stdout");
  solve_cmd->add_flag("--no-timing", no_timing, "Omit the wall-clock section");

  auto* eval_cmd = app.add_subcommand("eval", "Solve a directory of puzzles and aggregate metrics by source");
  std::string dir;
  std::string csv;
  eval_cmd->add_option("dir", dir, "Directory of .xw puzzles")->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--csv", csv, "Write the table here instead of stdout");

  auto* ablate_cmd = app.add_subcommand("ablate", "Evaluate expert subsets against the full configuration");
  std::string subsets_path;
  ablate_cmd->add_option("dir", dir, "Directory of .xw puzzles")->required()->check(CLI::ExistingDirectory);
  ablate_cmd->add_option("--config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
  ablate_cmd->add_option("--subsets", subsets_path, "Subset file: name = id, id, ...")->required()->check(CLI::ExistingFile);
  ablate_cmd->add_option("--out", out, "Write the table here instead of stdout");

  auto* train_cmd = app.add_subcommand("train-weights", "Fit merge weights on clue/answer pairs");
  std::string corpus_path;
  train_cmd->add_option("corpus", corpus_path, "clue<TAB>answer file")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--out", out, "Weight table output")->required();

  auto* score_cmd = app.add_subcommand("score", "Competition score from metrics and timing");
  std::string metrics_path;
  double elapsed = 0.0;
  double limit = 0.0;
  double base_max = 100.0;
  score_cmd->add_option("--metrics", metrics_path, "Solve report or key = value metrics file")->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--elapsed", elapsed, "Seconds used")->required()->check(CLI::NonNegativeNumber);
  score_cmd->add_option("--limit", limit, "Seconds allowed")->required()->check(CLI::PositiveNumber);
  score_cmd->add_option("--base-max", base_max, "Points for a fully correct grid")->check(CLI::IsMember({100.0, 110.0}));

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::warn);

  try {
    if (*solve_cmd) {
      auto env = environment(config_path);
      if (!expert_list.empty()) env.set_active(expert_list);
      const auto puzzle = load_puzzle(puzzle_path);
      const auto report = env.solve(puzzle, env.active());
      emit(serialize_report(report, !no_timing), out);
    } else if (*eval_cmd) {
      const auto env = environment(config_path);
      emit(testset_csv(run_testset(dir, env, env.active())), csv);
    } else if (*ablate_cmd) {
      const auto env = environment(config_path);
      const auto subsets = parse_subsets(read_file(subsets_path));
      emit(ablation_table(run_ablation(dir, env, subsets)), out);
    } else if (*train_cmd) {
      const auto env = environment(config_path);
      const auto pairs = parse_training_pairs(read_file(corpus_path));
      if (pairs.empty()) throw Error("no training pairs in " + corpus_path);
      const auto experts = env.experts(env.active());
      const auto initial = env.weights(env.active());
      const auto trained = train_weights(pairs, experts, initial);
      write_file(out, trained.serialize());
      std::cout << "pairs " << pairs.size() << "\n"
                << "mrr_initial " << format_double("%.6f", training_mrr(pairs, experts, initial)) << "\n"
                << "mrr_trained " << format_double("%.6f", training_mrr(pairs, experts, trained)) << "\n";
    } else if (*score_cmd) {
      const auto s = challenge_score(read_metrics(metrics_path), elapsed, limit, base_max);
      std::cout << "base " << format_double("%.4f", s.base) << "\n"
                << "time_bonus " << format_double("%.4f", s.time_bonus) << "\n"
                << "perfection_bonus " << format_double("%.4f", s.perfection_bonus) << "\n"
                << "total " << format_double("%.4f", s.total) << "\n";
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
