#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace crossfill {

/// Raised for malformed inputs and contract violations across the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace text {

inline constexpr std::size_t kAlphabetSize = 26;

inline bool is_upper_letter(char c) { return c >= 'A' && c <= 'Z'; }

/// Decodes one code point starting at `pos` and advances `pos`.
/// Malformed sequences decode to U+FFFD and consume one byte.
inline char32_t next_codepoint(std::string_view s, std::size_t& pos) {
  const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
  const unsigned char lead = byte(pos);
  if (lead < 0x80) {
    ++pos;
    return lead;
  }
  int extra = 0;
  char32_t cp = 0;
  if ((lead & 0xE0) == 0xC0) {
    extra = 1;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    extra = 2;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    extra = 3;
    cp = lead & 0x07;
  } else {
    ++pos;
    return 0xFFFD;
  }
  for (int i = 1; i <= extra; ++i) {
    if (pos + i >= s.size() || (byte(pos + i) & 0xC0) != 0x80) {
      ++pos;
      return 0xFFFD;
    }
    cp = (cp << 6) | (byte(pos + i) & 0x3F);
  }
  pos += extra + 1;
  return cp;
}

namespace detail {

// Base letters for U+0100..U+017F; '*' marks ligatures handled separately.
inline constexpr std::string_view kLatinExtA =
    "AaAaAaCcCcCcCcDdDdEeEeEeEeEeGgGgGgGgHhHhIiIiIiIiIi**JjKkkLlLlLlLlLlNnNnNnnNnOoOoOo**RrRrRrSsSsSsSs"
    "TtTtTtUuUuUuUuUuUuWwYyYZzZzZzs";
static_assert(kLatinExtA.size() == 128);

// Base letters for U+00C0..U+00FF; '*' = multi-letter, '-' = not a letter.
inline constexpr std::string_view kLatin1 =
    "AAAAAA*CEEEEIIIIDNOOOOO-OUUUUY**aaaaaa*ceeeeiiiidnooooo-ouuuuy*y";
static_assert(kLatin1.size() == 64);

}  // namespace detail

/// Lowercase ASCII spelling of a letter code point with diacritics removed,
/// or nullopt when `cp` is not a letter this library can represent.
inline std::optional<std::string_view> fold_letter(char32_t cp) {
  if (cp >= 'a' && cp <= 'z') {
    static constexpr std::string_view lower = "abcdefghijklmnopqrstuvwxyz";
    return lower.substr(cp - 'a', 1);
  }
  if (cp >= 'A' && cp <= 'Z') return fold_letter(cp - 'A' + 'a');
  if (cp >= 0xC0 && cp <= 0xFF) {
    switch (cp) {
      case 0xC6:
      case 0xE6:
        return "ae";
      case 0xDE:
      case 0xFE:
        return "th";
      case 0xDF:
        return "ss";
      default:
        break;
    }
    const char base = detail::kLatin1[cp - 0xC0];
    if (base == '-' || base == '*') return std::nullopt;
    return fold_letter(static_cast<char32_t>(base));
  }
  if (cp >= 0x100 && cp <= 0x17F) {
    switch (cp) {
      case 0x132:
      case 0x133:
        return "ij";
      case 0x152:
      case 0x153:
        return "oe";
      default:
        break;
    }
    return fold_letter(static_cast<char32_t>(detail::kLatinExtA[cp - 0x100]));
  }
  return std::nullopt;
}

inline bool is_apostrophe(char32_t cp) {
  return cp == '\'' || cp == 0x2019 || cp == 0x2018 || cp == 0x02BC || cp == 0x0060 || cp == 0x00B4;
}

inline bool is_dash(char32_t cp) { return cp == '-' || (cp >= 0x2010 && cp <= 0x2015); }

inline bool is_space(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == 0xA0 || cp == 0x202F || cp == 0x2009;
}

/// Case- and diacritic-insensitive form of free text: lowercase ASCII letters
/// and digits, `'` for every apostrophe variant, `-` for dashes, ASCII
/// punctuation kept, single spaces, trimmed. Unknown symbols become spaces.
inline std::string fold(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  const auto emit = [&](std::string_view piece) {
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.append(piece);
  };
  for (std::size_t pos = 0; pos < raw.size();) {
    const char32_t cp = next_codepoint(raw, pos);
    if (auto letter = fold_letter(cp)) {
      emit(*letter);
    } else if (cp >= '0' && cp <= '9') {
      const char d = static_cast<char>(cp);
      emit(std::string_view(&d, 1));
    } else if (is_apostrophe(cp)) {
      emit("'");
    } else if (is_dash(cp)) {
      emit("-");
    } else if (cp < 0x80 && std::ispunct(static_cast<int>(cp))) {
      const char p = static_cast<char>(cp);
      emit(std::string_view(&p, 1));
    } else {
      pending_space = true;
    }
  }
  return out;
}

/// Canonical grid form of an answer: uppercase A-Z, diacritics stripped,
/// ligatures expanded, spaces/hyphens/apostrophes dropped.
/// Throws Error("unrepresentable character ...") for anything else.
inline std::string normalize_answer(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (std::size_t pos = 0; pos < raw.size();) {
    const std::size_t at = pos;
    const char32_t cp = next_codepoint(raw, pos);
    if (auto letter = fold_letter(cp)) {
      for (char c : *letter) out.push_back(static_cast<char>(c - 'a' + 'A'));
    } else if (is_space(cp) || is_dash(cp) || is_apostrophe(cp)) {
      continue;
    } else {
      throw Error("unrepresentable character in answer '" + std::string(raw) + "' at byte " +
                  std::to_string(at));
    }
  }
  return out;
}

/// Maximal runs of [a-z0-9] in the folded text.
inline std::vector<std::string> tokenize(std::string_view raw) {
  const std::string folded = fold(raw);
  std::vector<std::string> tokens;
  std::string current;
  for (char c : folded) {
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      current.push_back(c);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

inline std::string to_upper_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

inline std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t at = s.find(sep, start);
    if (at == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, at - start));
    start = at + 1;
  }
}

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
  s = trim(s);
  Int value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  std::string buf(s);
  char* end = nullptr;
  const double value = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size()) return std::nullopt;
  return value;
}

/// Splits text into lines, dropping a trailing '\r' from each.
inline std::vector<std::string_view> lines(std::string_view s) {
  std::vector<std::string_view> out = split(s, '\n');
  if (!out.empty() && out.back().empty()) out.pop_back();
  for (auto& line : out) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  }
  return out;
}

/// 64-bit FNV-1a; stable across platforms, used for fixture file names.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace text
}  // namespace crossfill
