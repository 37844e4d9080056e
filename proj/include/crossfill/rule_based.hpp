#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crossfill/closed_lists.hpp"
#include "crossfill/experts.hpp"

namespace crossfill {

enum class RuleKind {
  Tail,
  Head,
  Reverse,
  Devowel,
  Roman,
  Greek,
  Element,
  Cardinal,
  Number,
  Pronoun,
  Conjunction,
  Preposition,
  Article,
  Department,
};

inline std::optional<RuleKind> parse_rule_kind(std::string_view s) {
  static const std::map<std::string_view, RuleKind> names{
      {"tail", RuleKind::Tail},          {"head", RuleKind::Head},
      {"reverse", RuleKind::Reverse},    {"devowel", RuleKind::Devowel},
      {"roman", RuleKind::Roman},        {"greek", RuleKind::Greek},
      {"element", RuleKind::Element},    {"cardinal", RuleKind::Cardinal},
      {"number", RuleKind::Number},      {"pronoun", RuleKind::Pronoun},
      {"conjunction", RuleKind::Conjunction}, {"preposition", RuleKind::Preposition},
      {"article", RuleKind::Article},    {"department", RuleKind::Department}};
  const auto it = names.find(s);
  if (it == names.end()) return std::nullopt;
  return it->second;
}

inline bool is_word_game(RuleKind k) {
  return k == RuleKind::Tail || k == RuleKind::Head || k == RuleKind::Reverse || k == RuleKind::Devowel;
}

struct Marker {
  std::string text;  // folded
  RuleKind kind;
};

/// Trigger phrases; matched on folded clue text at word boundaries.
class MarkerTable {
 public:
  MarkerTable() = default;
  explicit MarkerTable(std::vector<Marker> markers) : markers_(std::move(markers)) {
    // longest first so a phrase wins over its own suffix
    std::stable_sort(markers_.begin(), markers_.end(),
                     [](const Marker& a, const Marker& b) { return a.text.size() > b.text.size(); });
  }

  const std::vector<Marker>& markers() const { return markers_; }

  struct Hit {
    const Marker* marker;
    std::size_t pos;
  };

  /// First boundary-aligned occurrence of each matching marker.
  std::vector<Hit> find_all(std::string_view folded) const {
    std::vector<Hit> hits;
    for (const auto& m : markers_) {
      if (auto pos = find(folded, m.text)) hits.push_back({&m, *pos});
    }
    return hits;
  }

  static std::optional<std::size_t> find(std::string_view folded, std::string_view marker) {
    const auto is_alnum = [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); };
    for (std::size_t pos = folded.find(marker); pos != std::string_view::npos; pos = folded.find(marker, pos + 1)) {
      const bool left = pos == 0 || !is_alnum(folded[pos - 1]);
      const std::size_t end = pos + marker.size();
      const bool right = end >= folded.size() || !is_alnum(folded[end]) || marker.back() == '\'';
      if (left && right) return pos;
    }
    return std::nullopt;
  }

 private:
  std::vector<Marker> markers_;
};

/// Parses `marker<TAB>rule-kind` lines; `#` starts a comment line.
inline MarkerTable parse_marker_table(std::string_view content) {
  std::vector<Marker> markers;
  std::size_t line_no = 0;
  for (auto line : text::lines(content)) {
    ++line_no;
    if (text::trim(line).empty() || text::trim(line).front() == '#') continue;
    const auto fields = text::split(line, '\t');
    if (fields.size() != 2) throw Error("marker table line " + std::to_string(line_no) + ": expected marker<TAB>kind");
    const auto kind = parse_rule_kind(text::trim(fields[1]));
    if (!kind) throw Error("marker table line " + std::to_string(line_no) + ": unknown rule kind '" +
                           std::string(text::trim(fields[1])) + "'");
    std::string folded = text::fold(fields[0]);
    if (folded.empty()) throw Error("marker table line " + std::to_string(line_no) + ": empty marker");
    markers.push_back({std::move(folded), *kind});
  }
  return MarkerTable(std::move(markers));
}

inline MarkerTable load_marker_table(const std::filesystem::path& path) { return parse_marker_table(read_file(path)); }

namespace rules {

using Scores = std::map<std::string, double>;

inline std::string normalize_or_empty(std::string_view s) {
  try {
    return text::normalize_answer(s);
  } catch (const Error&) {
    return {};
  }
}

inline std::string reversed(std::string s) {
  std::reverse(s.begin(), s.end());
  return s;
}

inline bool is_vowel(char c) {
  return c == 'A' || c == 'E' || c == 'I' || c == 'O' || c == 'U' || c == 'Y';
}

inline std::string consonant_skeleton(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (!is_vowel(c)) out.push_back(c);
  }
  return out;
}

/// Number written in the folded clue, as digits or as French words.
inline std::optional<int> find_number(std::string_view folded) {
  for (std::size_t i = 0; i < folded.size(); ++i) {
    if (folded[i] < '0' || folded[i] > '9') continue;
    std::size_t j = i;
    while (j < folded.size() && folded[j] >= '0' && folded[j] <= '9') ++j;
    if (j - i <= 4) return text::parse_int<int>(folded.substr(i, j - i));
    i = j;
  }
  static const std::map<std::string, int> words = [] {
    std::map<std::string, int> m;
    for (int n = 0; n <= 1000; ++n) m.emplace(text::normalize_answer(closed_lists::number_to_words(n)), n);
    return m;
  }();
  const auto tokens = text::tokenize(folded);
  std::optional<int> best;
  std::size_t best_span = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string joined;
    for (std::size_t n = 1; n <= 6 && i + n <= tokens.size(); ++n) {
      joined += text::to_upper_ascii(tokens[i + n - 1]);
      if (auto it = words.find(joined); it != words.end() && n > best_span) {
        best = it->second;
        best_span = n;
      }
    }
    if (best) return best;
  }
  return best;
}

inline void add_uniform(Scores& out, const std::vector<std::string_view>& items, std::optional<int> length,
                        double weight = 1.0) {
  for (auto item : items) {
    const std::string a = normalize_or_empty(item);
    if (a.empty()) continue;
    if (length && a.size() != static_cast<std::size_t>(*length)) continue;
    out[a] += weight;
  }
}

/// Every string over {N,S,E,O} of the given length; named compass points weigh more.
inline Scores cardinal(std::optional<int> length) {
  Scores out;
  if (length && *length >= 1 && *length <= 6) {
    static constexpr std::string_view letters = "NSEO";
    std::size_t total = 1;
    for (int i = 0; i < *length; ++i) total *= 4;
    for (std::size_t code = 0; code < total; ++code) {
      std::string s;
      std::size_t c = code;
      for (int i = 0; i < *length; ++i) {
        s.push_back(letters[c % 4]);
        c /= 4;
      }
      out[s] += 1.0;
    }
  }
  add_uniform(out, closed_lists::compass_points(), length, 10.0);
  return out;
}

inline Scores closed_list(RuleKind kind, std::string_view folded, std::optional<int> length) {
  Scores out;
  const auto tokens = text::tokenize(folded);
  switch (kind) {
    case RuleKind::Roman: {
      if (auto n = find_number(folded); n && *n >= 1) {
        out[closed_lists::to_roman(*n)] += 1.0;
      } else {
        for (int n = 1; n <= 100; ++n) {
          const auto r = closed_lists::to_roman(n);
          if (!length || r.size() == static_cast<std::size_t>(*length)) out[r] += 1.0;
        }
      }
      break;
    }
    case RuleKind::Greek:
      add_uniform(out, closed_lists::greek_letters(), length);
      break;
    case RuleKind::Element: {
      for (const auto& e : closed_lists::elements()) {
        const std::string name = text::fold(e.name);
        if (std::find(tokens.begin(), tokens.end(), name) != tokens.end()) out[text::to_upper_ascii(e.symbol)] += 1.0;
      }
      if (out.empty()) {
        for (const auto& e : closed_lists::elements()) {
          const std::string sym = text::to_upper_ascii(e.symbol);
          if (!length || sym.size() == static_cast<std::size_t>(*length)) out[sym] += 1.0;
        }
      }
      break;
    }
    case RuleKind::Cardinal:
      out = cardinal(length);
      break;
    case RuleKind::Number:
      if (auto n = find_number(folded)) out[normalize_or_empty(closed_lists::number_to_words(*n))] += 1.0;
      break;
    case RuleKind::Pronoun:
      add_uniform(out, closed_lists::pronouns(), length);
      break;
    case RuleKind::Conjunction:
      add_uniform(out, closed_lists::conjunctions(), length);
      break;
    case RuleKind::Preposition:
      add_uniform(out, closed_lists::prepositions(), length);
      break;
    case RuleKind::Article:
      add_uniform(out, closed_lists::articles(), length);
      break;
    case RuleKind::Department: {
      const auto n = find_number(folded);
      for (const auto& d : closed_lists::departments()) {
        if (n && text::parse_int<int>(d.code) == *n) out[normalize_or_empty(d.name)] += 1.0;
      }
      if (out.empty()) {
        for (const auto& d : closed_lists::departments()) {
          const auto a = normalize_or_empty(d.name);
          if (!a.empty() && (!length || a.size() == static_cast<std::size_t>(*length))) out[a] += 1.0;
        }
      }
      break;
    }
    default:
      break;
  }
  out.erase("");
  return out;
}

/// Adds `part` scaled to unit mass (after the optional length filter).
inline void accumulate(Scores& total, const Scores& part, std::optional<int> length) {
  double mass = 0.0;
  for (const auto& [a, s] : part) {
    if (s > 0.0 && (!length || a.size() == static_cast<std::size_t>(*length))) mass += s;
  }
  if (!(mass > 0.0)) return;
  for (const auto& [a, s] : part) {
    if (s > 0.0 && (!length || a.size() == static_cast<std::size_t>(*length))) total[a] += s / mass;
  }
}

/// Folded clue with [pos, pos+len) removed and stray separators trimmed.
inline std::string strip_marker(std::string_view folded, std::size_t pos, std::size_t len) {
  std::string rest = std::string(folded.substr(0, pos)) + " " + std::string(folded.substr(pos + len));
  std::string out;
  bool space = true;
  for (char c : rest) {
    const bool sep = c == ' ' || c == ':' || c == ',' || c == ';' || c == '.' || c == '!' || c == '?' || c == '-' ||
                     c == '(' || c == ')';
    if (sep) {
      if (!space) out.push_back(' ');
      space = true;
    } else {
      out.push_back(c);
      space = false;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

}  // namespace rules

/// Word-game and closed-list expert.
///
/// Closed lists fire on trigger markers (Roman numerals, Greek letters,
/// chemical symbols, compass strings, numbers in words, grammar lists,
/// departments). Word games: `tail`/`head` take the last/first letters of the
/// word after the marker; `reverse` reverses candidates for the rest of the
/// clue; `devowel` keeps candidates of any length whose consonant skeleton
/// fits. The rest of the clue is answered by the delegate expert, by closed
/// lists triggered inside it, and by its own words. When a word game fires,
/// closed lists are only applied to the rest of the clue.
class RuleBasedExpert final : public Expert {
 public:
  explicit RuleBasedExpert(MarkerTable markers, ExpertPtr delegate = nullptr)
      : markers_(std::move(markers)), delegate_(std::move(delegate)) {}

  const std::string& id() const override { return id_; }

  CandidateList generate(std::string_view clue, int length) const override {
    if (length < 1) return CandidateList::empty(std::string(clue), id_);
    return CandidateList::from_scores(std::string(clue), id_, length, detail::as_pairs(scores(clue, length)), 1.0);
  }

  std::vector<Candidate> generate_any_length(std::string_view clue) const override {
    return detail::normalized_any_length(scores(clue, std::nullopt));
  }

 private:
  rules::Scores closed_lists_for(std::string_view folded, std::optional<int> length) const {
    rules::Scores total;
    std::set<RuleKind> seen;
    for (const auto& hit : markers_.find_all(folded)) {
      const RuleKind kind = hit.marker->kind;
      if (is_word_game(kind) || !seen.insert(kind).second) continue;
      rules::accumulate(total, rules::closed_list(kind, folded, length), length);
    }
    return total;
  }

  /// Candidates for the part of a two-step clue that names the hidden word.
  rules::Scores inner_candidates(std::string_view rest, std::optional<int> length) const {
    rules::Scores sources;
    if (delegate_) {
      rules::Scores from_delegate;
      if (length) {
        for (const auto& c : delegate_->generate(rest, *length)) from_delegate[c.answer] += c.probability;
      } else {
        for (const auto& c : delegate_->generate_any_length(rest)) from_delegate[c.answer] += c.probability;
      }
      rules::accumulate(sources, from_delegate, length);
    }
    rules::accumulate(sources, closed_lists_for(rest, length), length);
    rules::Scores own_words;
    for (const auto& t : text::tokenize(rest)) {
      if (auto w = rules::normalize_or_empty(t); !w.empty()) own_words[w] += 1.0;
    }
    rules::accumulate(sources, own_words, length);
    return sources;
  }

  rules::Scores scores(std::string_view clue, std::optional<int> length) const {
    const std::string folded = text::fold(clue);
    rules::Scores total;
    std::set<RuleKind> games;
    for (const auto& hit : markers_.find_all(folded)) {
      const RuleKind kind = hit.marker->kind;
      if (!is_word_game(kind) || !games.insert(kind).second) continue;
      const std::size_t end = hit.pos + hit.marker->text.size();
      const std::string rest = rules::strip_marker(folded, hit.pos, hit.marker->text.size());
      rules::Scores part;
      switch (kind) {
        case RuleKind::Tail:
        case RuleKind::Head: {
          if (!length) break;
          const auto after = text::tokenize(std::string_view(folded).substr(end));
          if (after.empty()) break;
          const std::string word = rules::normalize_or_empty(after.front());
          const auto n = static_cast<std::size_t>(*length);
          if (word.size() < n) break;
          part[kind == RuleKind::Tail ? word.substr(word.size() - n) : word.substr(0, n)] += 1.0;
          break;
        }
        case RuleKind::Reverse:
          for (const auto& [a, s] : inner_candidates(rest, length)) part[rules::reversed(a)] += s;
          break;
        case RuleKind::Devowel:
          for (const auto& [a, s] : inner_candidates(rest, std::nullopt)) {
            const std::string skeleton = rules::consonant_skeleton(a);
            if (skeleton.empty() || skeleton == a) continue;
            part[skeleton] += s;
          }
          break;
        default:
          break;
      }
      rules::accumulate(total, part, length);
    }
    if (games.empty()) total = closed_lists_for(folded, length);
    return total;
  }

  std::string id_{expert_ids::kRuleBased};
  MarkerTable markers_;
  ExpertPtr delegate_;
};

}  // namespace crossfill
