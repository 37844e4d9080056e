#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crossfill/candidates.hpp"
#include "crossfill/corpus.hpp"
#include "crossfill/experts.hpp"
#include "crossfill/merge.hpp"
#include "crossfill/puzzle.hpp"

namespace crossfill {

using LetterDistribution = std::array<double, text::kAlphabetSize>;

inline LetterDistribution uniform_letters() {
  LetterDistribution d;
  d.fill(1.0 / static_cast<double>(text::kAlphabetSize));
  return d;
}

inline std::size_t letter_index(char c) { return static_cast<std::size_t>(c - 'A'); }
inline char index_letter(std::size_t i) { return static_cast<char>('A' + i); }

/// Highest-probability letter; ties go to the alphabetically first.
inline std::size_t argmax_letter(const LetterDistribution& d) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (d[i] > d[best]) best = i;
  }
  return best;
}

/// Floors every entry at `epsilon` and rescales to unit mass. An all-zero
/// input becomes uniform.
inline void floor_and_normalize(LetterDistribution& d, double epsilon) {
  double sum = 0.0;
  for (double& x : d) {
    x = std::max(x, epsilon);
    sum += x;
  }
  if (!(sum > 0.0)) {
    d = uniform_letters();
    return;
  }
  for (double& x : d) x /= sum;
}

struct BPConfig {
  std::size_t iterations = 25;
  double damping = 0.5;
  double epsilon = 1e-6;
};

/// p(c) = sum of probabilities of candidates with letter c at `position`,
/// floored at epsilon and renormalized. Empty lists give the uniform law.
inline LetterDistribution letter_marginal(const CandidateList& list, std::size_t position, double epsilon = BPConfig{}.epsilon) {
  if (list.empty()) return uniform_letters();
  if (position >= list.answer_length()) throw Error("letter position outside the answer");
  LetterDistribution d{};
  for (const auto& c : list) d[letter_index(c.answer[position])] += c.probability;
  floor_and_normalize(d, epsilon);
  return d;
}

enum class SlotSource { Experts, Lexicon, Uniform };

inline std::string_view slot_source_name(SlotSource s) {
  switch (s) {
    case SlotSource::Experts:
      return "experts";
    case SlotSource::Lexicon:
      return "lexicon";
    case SlotSource::Uniform:
      return "uniform";
  }
  return "?";
}

struct SlotVariable {
  std::string id;
  int length = 0;
  CandidateList candidates;  // empty: unconstrained (uniform letters per cell)
  SlotSource source = SlotSource::Experts;
};

/// Slots as variables over their candidate lists; cells covered by two
/// slots are equality constraints between letters.
struct ConstraintNetwork {
  std::vector<SlotVariable> slots;
  std::vector<Crossing> cells;

  struct Link {
    std::size_t across_slot;
    int across_pos;
    std::size_t down_slot;
    int down_pos;
  };

  std::vector<Link> links() const {
    std::vector<Link> out;
    for (const auto& x : cells) {
      if (x.across && x.down) out.push_back({x.across->slot, x.across->position, x.down->slot, x.down->position});
    }
    return out;
  }
};

/// Slot lists in puzzle slot order. Empty lists fall back to the lexicon's
/// frequency prior for the slot length; if that is empty too the slot stays
/// unconstrained.
inline ConstraintNetwork build_network(const Puzzle& puzzle, const std::vector<CandidateList>& merged,
                                       const Lexicon& lexicon) {
  if (merged.size() != puzzle.slots().size()) throw Error("one merged list per slot is required");
  ConstraintNetwork net;
  net.cells = crossings(puzzle);
  for (std::size_t s = 0; s < merged.size(); ++s) {
    const Slot& slot = puzzle.slots()[s];
    SlotVariable var{slot.id, slot.length, merged[s], SlotSource::Experts};
    if (var.candidates.empty()) {
      var.candidates = lexicon_generate(std::string(static_cast<std::size_t>(slot.length), '?'), lexicon, slot.id);
      var.source = var.candidates.empty() ? SlotSource::Uniform : SlotSource::Lexicon;
    }
    net.slots.push_back(std::move(var));
  }
  return net;
}

/// Called after every BP round with the current link messages
/// (`messages[2*l]` across->down, `messages[2*l+1]` down->across).
using BPObserver = std::function<void(std::size_t round, std::span<const LetterDistribution> messages)>;

/// Synchronous damped sum-product over the slot/cell network. Each slot
/// sends, through each of its crossings, the letter distribution implied by
/// its prior times the messages arriving at its other crossings. Lists are
/// then rescored as prior x incoming messages and re-sorted.
inline ConstraintNetwork bp_rerank(const ConstraintNetwork& network, const BPConfig& config,
                                   const BPObserver& observer = {}) {
  const auto links = network.links();
  const std::size_t n_slots = network.slots.size();

  // Per slot: (link index, position in this slot, message index arriving here).
  struct Port {
    std::size_t link;
    int pos;
    std::size_t incoming;
    std::size_t outgoing;
  };
  std::vector<std::vector<Port>> ports(n_slots);
  for (std::size_t l = 0; l < links.size(); ++l) {
    ports[links[l].across_slot].push_back({l, links[l].across_pos, 2 * l + 1, 2 * l});
    ports[links[l].down_slot].push_back({l, links[l].down_pos, 2 * l, 2 * l + 1});
  }

  std::vector<LetterDistribution> messages(2 * links.size(), uniform_letters());
  std::vector<LetterDistribution> next(messages.size());
  std::vector<double> prefix;
  std::vector<double> suffix;

  for (std::size_t round = 0; round < config.iterations; ++round) {
    for (std::size_t s = 0; s < n_slots; ++s) {
      const auto& var = network.slots[s];
      const auto& my_ports = ports[s];
      if (var.candidates.empty()) {
        for (const auto& p : my_ports) next[p.outgoing] = uniform_letters();
        continue;
      }
      for (const auto& p : my_ports) next[p.outgoing].fill(0.0);
      const std::size_t k = my_ports.size();
      prefix.assign(k + 1, 1.0);
      suffix.assign(k + 1, 1.0);
      for (const auto& cand : var.candidates) {
        for (std::size_t i = 0; i < k; ++i) {
          prefix[i + 1] = prefix[i] * messages[my_ports[i].incoming][letter_index(cand.answer[my_ports[i].pos])];
        }
        for (std::size_t i = k; i-- > 0;) {
          suffix[i] = suffix[i + 1] * messages[my_ports[i].incoming][letter_index(cand.answer[my_ports[i].pos])];
        }
        for (std::size_t i = 0; i < k; ++i) {
          next[my_ports[i].outgoing][letter_index(cand.answer[my_ports[i].pos])] +=
              cand.probability * prefix[i] * suffix[i + 1];
        }
      }
      for (const auto& p : my_ports) floor_and_normalize(next[p.outgoing], config.epsilon);
    }
    for (std::size_t m = 0; m < messages.size(); ++m) {
      for (std::size_t c = 0; c < text::kAlphabetSize; ++c) {
        messages[m][c] = (1.0 - config.damping) * next[m][c] + config.damping * messages[m][c];
      }
    }
    if (observer) observer(round, messages);
  }

  ConstraintNetwork out = network;
  if (config.iterations == 0) return out;
  for (std::size_t s = 0; s < n_slots; ++s) {
    const auto& var = network.slots[s];
    if (var.candidates.empty()) continue;
    std::vector<std::pair<std::string, double>> scores;
    scores.reserve(var.candidates.size());
    for (const auto& cand : var.candidates) {
      double w = cand.probability;
      for (const auto& p : ports[s]) w *= messages[p.incoming][letter_index(cand.answer[p.pos])];
      scores.emplace_back(cand.answer, w);
    }
    auto reranked = CandidateList::from_scores(var.candidates.clue_id(), var.candidates.expert(), var.length, scores,
                                               var.candidates.confidence());
    if (!reranked.empty()) out.slots[s].candidates = std::move(reranked);
  }
  return out;
}

/// Directional letter laws of one cell. A direction with no covering slot
/// holds the uniform law and `has_*` is false.
struct CellMarginal {
  Cell cell;
  bool has_across = false;
  bool has_down = false;
  LetterDistribution across = uniform_letters();
  LetterDistribution down = uniform_letters();
};

using LetterMarginals = std::vector<CellMarginal>;

inline LetterMarginals letter_marginals(const ConstraintNetwork& network, double epsilon = BPConfig{}.epsilon) {
  LetterMarginals out;
  out.reserve(network.cells.size());
  for (const auto& x : network.cells) {
    CellMarginal m;
    m.cell = x.cell;
    if (x.across) {
      m.has_across = true;
      m.across = letter_marginal(network.slots[x.across->slot].candidates, static_cast<std::size_t>(x.across->position), epsilon);
    }
    if (x.down) {
      m.has_down = true;
      m.down = letter_marginal(network.slots[x.down->slot].candidates, static_cast<std::size_t>(x.down->position), epsilon);
    }
    out.push_back(m);
  }
  return out;
}

/// Elementwise product of the two directional laws, not renormalized. A
/// missing direction contributes the factor 1.
inline LetterDistribution char_probability(const CellMarginal& m) {
  LetterDistribution p;
  for (std::size_t c = 0; c < p.size(); ++c) {
    p[c] = (m.has_across ? m.across[c] : 1.0) * (m.has_down ? m.down[c] : 1.0);
  }
  return p;
}

struct FixedLetter {
  Cell cell;
  char letter = 'A';
  bool operator==(const FixedLetter&) const = default;
};

inline constexpr double kFixStrict = 0.9999;
inline constexpr double kFixRelaxed = 0.99;
inline constexpr double kFixPerDirection = 0.9;

/// Commits a letter to a cell when both directions agree on their most
/// likely letter c and either p(c) > 99.99%, or p(c) > 99% with each
/// direction above 90%. p(c) is the raw product of the directional laws.
inline std::optional<char> fixed_letter(const CellMarginal& m) {
  if (!m.has_across && !m.has_down) return std::nullopt;
  const std::size_t best_a = argmax_letter(m.has_across ? m.across : m.down);
  const std::size_t best_d = argmax_letter(m.has_down ? m.down : m.across);
  if (best_a != best_d) return std::nullopt;
  const std::size_t c = best_a;
  const double pa = m.has_across ? m.across[c] : 1.0;
  const double pd = m.has_down ? m.down[c] : 1.0;
  const double p = char_probability(m)[c];
  if (p > kFixStrict || (p > kFixRelaxed && pa > kFixPerDirection && pd > kFixPerDirection)) return index_letter(c);
  return std::nullopt;
}

inline std::vector<FixedLetter> fix_letters(const LetterMarginals& marginals) {
  std::vector<FixedLetter> out;
  for (const auto& m : marginals) {
    if (auto c = fixed_letter(m)) out.push_back({m.cell, *c});
  }
  return out;
}

/// Grid letters plus per-slot placements.
struct FillState {
  std::vector<std::optional<char>> letters;   // per grid cell index
  std::vector<bool> fixed;                    // letter came from letter fixing
  std::vector<std::optional<std::string>> placed;  // per slot
  std::vector<std::string> placed_by;              // "list", "implicit" or ""

  std::string pattern(const Grid& grid, const Slot& slot) const {
    std::string p;
    for (int i = 0; i < slot.length; ++i) {
      const auto& l = letters[grid.index(slot.cell(i))];
      p.push_back(l ? *l : '?');
    }
    return p;
  }

  void place(const Grid& grid, std::size_t slot_index, const Slot& slot, const std::string& word, std::string how) {
    for (int i = 0; i < slot.length; ++i) letters[grid.index(slot.cell(i))] = word[i];
    placed[slot_index] = word;
    placed_by[slot_index] = std::move(how);
  }

  std::size_t unfilled(const Grid& grid) const {
    std::size_t n = 0;
    for (int r = 0; r < grid.rows(); ++r) {
      for (int c = 0; c < grid.cols(); ++c) {
        if (grid.is_open({r, c}) && !letters[grid.index({r, c})]) ++n;
      }
    }
    return n;
  }
};

inline FillState empty_fill(const Puzzle& puzzle) {
  FillState st;
  st.letters.assign(puzzle.grid().size(), std::nullopt);
  st.fixed.assign(puzzle.grid().size(), false);
  st.placed.assign(puzzle.slots().size(), std::nullopt);
  st.placed_by.assign(puzzle.slots().size(), "");
  return st;
}

/// Writes the fixed letters, then visits slots by descending top-candidate
/// probability (ties in slot order) and places each slot's most probable
/// candidate that agrees with every letter already on the grid.
inline FillState greedy_word_fill(const Puzzle& puzzle, const ConstraintNetwork& network,
                                  const std::vector<FixedLetter>& fixed) {
  FillState st = empty_fill(puzzle);
  const Grid& grid = puzzle.grid();
  for (const auto& f : fixed) {
    st.letters[grid.index(f.cell)] = f.letter;
    st.fixed[grid.index(f.cell)] = true;
  }
  std::vector<std::size_t> order;
  for (std::size_t s = 0; s < network.slots.size(); ++s) {
    if (!network.slots[s].candidates.empty()) order.push_back(s);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return network.slots[a].candidates.top().probability > network.slots[b].candidates.top().probability;
  });
  for (std::size_t s : order) {
    const Slot& slot = puzzle.slots()[s];
    const std::string pattern = st.pattern(grid, slot);
    for (const auto& cand : network.slots[s].candidates) {
      if (matches_pattern(cand.answer, pattern)) {
        st.place(grid, s, slot, cand.answer, "list");
        break;
      }
    }
  }
  return st;
}

/// Fills each still-unplaced slot, in slot order, with the most frequent
/// lexicon word matching the letters already on the grid.
inline FillState implicit_fill(const Puzzle& puzzle, FillState state, const Lexicon& lexicon) {
  const Grid& grid = puzzle.grid();
  for (std::size_t s = 0; s < puzzle.slots().size(); ++s) {
    if (state.placed[s]) continue;
    const Slot& slot = puzzle.slots()[s];
    if (auto best = lexicon.most_frequent(state.pattern(grid, slot))) state.place(grid, s, slot, best->word, "implicit");
  }
  return state;
}

}  // namespace crossfill
