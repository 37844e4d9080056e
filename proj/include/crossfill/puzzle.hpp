#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "crossfill/text.hpp"

namespace crossfill {

enum class CellKind : std::uint8_t { Open, Block };
enum class Direction : std::uint8_t { Across, Down };

inline char direction_letter(Direction d) { return d == Direction::Across ? 'A' : 'D'; }

struct Cell {
  int row = 0;
  int col = 0;
  auto operator<=>(const Cell&) const = default;
};

class Grid {
 public:
  Grid(int rows, int cols, std::vector<CellKind> cells) : rows_(rows), cols_(cols), cells_(std::move(cells)) {
    if (rows_ < 1 || cols_ < 1) throw Error("grid dimensions must be positive");
    if (cells_.size() != static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_)) {
      throw Error("grid cell count does not match rows x cols");
    }
  }

  /// Builds a grid from rows of '.' (open) and '#' (block).
  static Grid from_rows(const std::vector<std::string>& rows) {
    if (rows.empty()) throw Error("grid has no rows");
    const int cols = static_cast<int>(rows.front().size());
    std::vector<CellKind> cells;
    cells.reserve(rows.size() * static_cast<std::size_t>(cols));
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != cols) throw Error("grid rows have unequal lengths");
      for (char c : row) {
        if (c == '.') {
          cells.push_back(CellKind::Open);
        } else if (c == '#') {
          cells.push_back(CellKind::Block);
        } else {
          throw Error(std::string("invalid grid character '") + c + "'");
        }
      }
    }
    return Grid(static_cast<int>(rows.size()), cols, std::move(cells));
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  bool contains(Cell c) const { return c.row >= 0 && c.row < rows_ && c.col >= 0 && c.col < cols_; }
  CellKind at(Cell c) const { return cells_[index(c)]; }
  bool is_open(Cell c) const { return contains(c) && at(c) == CellKind::Open; }
  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c.col);
  }
  std::size_t size() const { return cells_.size(); }

  std::size_t open_count() const {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), CellKind::Open));
  }

  std::vector<std::string> to_rows() const {
    std::vector<std::string> out(static_cast<std::size_t>(rows_), std::string(static_cast<std::size_t>(cols_), '.'));
    for (int r = 0; r < rows_; ++r) {
      for (int c = 0; c < cols_; ++c) {
        if (at({r, c}) == CellKind::Block) out[r][c] = '#';
      }
    }
    return out;
  }

  bool operator==(const Grid&) const = default;

 private:
  int rows_;
  int cols_;
  std::vector<CellKind> cells_;
};

struct Slot {
  std::string id;
  Direction direction = Direction::Across;
  Cell start;
  int length = 0;
  std::string clue;

  Cell cell(int position) const {
    return direction == Direction::Across ? Cell{start.row, start.col + position} : Cell{start.row + position, start.col};
  }

  bool operator==(const Slot&) const = default;
};

/// Maximal runs of open cells of length >= 2, row-major by start cell with
/// Across before Down at equal start. Ids default to e.g. "A0,3".
inline std::vector<Slot> extract_slots(const Grid& grid) {
  std::vector<Slot> slots;
  const auto run_length = [&](Cell start, Direction d) {
    int n = 0;
    Cell c = start;
    while (grid.is_open(c)) {
      ++n;
      if (d == Direction::Across) {
        ++c.col;
      } else {
        ++c.row;
      }
    }
    return n;
  };
  for (int r = 0; r < grid.rows(); ++r) {
    for (int c = 0; c < grid.cols(); ++c) {
      const Cell cell{r, c};
      if (!grid.is_open(cell)) continue;
      for (Direction d : {Direction::Across, Direction::Down}) {
        const Cell before = d == Direction::Across ? Cell{r, c - 1} : Cell{r - 1, c};
        if (grid.is_open(before)) continue;
        const int len = run_length(cell, d);
        if (len < 2) continue;
        Slot slot;
        slot.id = std::string(1, direction_letter(d)) + std::to_string(r) + "," + std::to_string(c);
        slot.direction = d;
        slot.start = cell;
        slot.length = len;
        slots.push_back(std::move(slot));
      }
    }
  }
  return slots;
}

/// One side of a crossing: which slot covers the cell and at which position.
struct SlotPosition {
  std::size_t slot = 0;
  int position = 0;
  bool operator==(const SlotPosition&) const = default;
};

struct Crossing {
  Cell cell;
  std::optional<SlotPosition> across;
  std::optional<SlotPosition> down;

  bool is_blind() const { return across.has_value() != down.has_value(); }
};

/// Per-cell coverage over a slot list; cells covered by nothing get no entry.
inline std::vector<Crossing> crossings_of(const Grid& grid, const std::vector<Slot>& slots) {
  std::vector<std::optional<SlotPosition>> across(grid.size());
  std::vector<std::optional<SlotPosition>> down(grid.size());
  for (std::size_t s = 0; s < slots.size(); ++s) {
    for (int i = 0; i < slots[s].length; ++i) {
      auto& side = slots[s].direction == Direction::Across ? across : down;
      side[grid.index(slots[s].cell(i))] = SlotPosition{s, i};
    }
  }
  std::vector<Crossing> out;
  for (int r = 0; r < grid.rows(); ++r) {
    for (int c = 0; c < grid.cols(); ++c) {
      const Cell cell{r, c};
      if (!grid.is_open(cell)) continue;
      const std::size_t k = grid.index(cell);
      if (!across[k] && !down[k]) continue;
      out.push_back(Crossing{cell, across[k], down[k]});
    }
  }
  return out;
}

/// A parsed crossword. Immutable once constructed; the constructor enforces
/// slot/grid agreement, id uniqueness, full coverage, and solution geometry.
class Puzzle {
 public:
  Puzzle(Grid grid, std::vector<Slot> slots, std::optional<std::vector<std::string>> solution = std::nullopt,
         std::string source = {}, std::string title = {})
      : grid_(std::move(grid)),
        slots_(std::move(slots)),
        solution_(std::move(solution)),
        source_(std::move(source)),
        title_(std::move(title)) {
    validate();
  }

  const Grid& grid() const { return grid_; }
  const std::vector<Slot>& slots() const { return slots_; }
  const std::optional<std::vector<std::string>>& solution() const { return solution_; }
  const std::string& source() const { return source_; }
  const std::string& title() const { return title_; }

  std::optional<std::size_t> slot_index(std::string_view id) const {
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      if (slots_[i].id == id) return i;
    }
    return std::nullopt;
  }

  char solution_at(Cell c) const { return (*solution_)[c.row][c.col]; }

  std::string solution_word(const Slot& slot) const {
    std::string word;
    for (int i = 0; i < slot.length; ++i) word.push_back(solution_at(slot.cell(i)));
    return word;
  }

  bool operator==(const Puzzle&) const = default;

 private:
  void validate() const {
    std::set<std::string> ids;
    for (const auto& slot : slots_) {
      if (!ids.insert(slot.id).second) throw Error("duplicate slot id '" + slot.id + "'");
    }
    const auto derived = extract_slots(grid_);
    if (derived.size() != slots_.size()) {
      throw Error("clue count mismatch: grid has " + std::to_string(derived.size()) + " slots, " +
                  std::to_string(slots_.size()) + " clues declared");
    }
    for (std::size_t i = 0; i < derived.size(); ++i) {
      const auto& d = derived[i];
      const auto& s = slots_[i];
      if (d.direction != s.direction || d.start != s.start || d.length != s.length) {
        throw Error("clue '" + s.id + "' does not match the grid slot at " + d.id + " (length " +
                    std::to_string(d.length) + ")");
      }
    }
    const auto cover = crossings_of(grid_, slots_);
    if (cover.size() != grid_.open_count()) throw Error("grid has an open cell covered by no slot");
    if (solution_) {
      const auto& rows = *solution_;
      if (rows.size() != static_cast<std::size_t>(grid_.rows())) throw Error("solution row count mismatch");
      for (int r = 0; r < grid_.rows(); ++r) {
        if (rows[r].size() != static_cast<std::size_t>(grid_.cols())) throw Error("solution column count mismatch");
        for (int c = 0; c < grid_.cols(); ++c) {
          const char ch = rows[r][c];
          const bool open = grid_.at({r, c}) == CellKind::Open;
          if (open ? !text::is_upper_letter(ch) : ch != '#') {
            throw Error("solution letter at " + std::to_string(r) + "," + std::to_string(c) +
                        " violates the grid geometry");
          }
        }
      }
    }
  }

  Grid grid_;
  std::vector<Slot> slots_;
  std::optional<std::vector<std::string>> solution_;
  std::string source_;
  std::string title_;
};

inline std::vector<Crossing> crossings(const Puzzle& puzzle) { return crossings_of(puzzle.grid(), puzzle.slots()); }

/// Cells covered by exactly one slot.
inline std::vector<Cell> blind_cells(const Puzzle& puzzle) {
  std::vector<Cell> out;
  for (const auto& x : crossings(puzzle)) {
    if (x.is_blind()) out.push_back(x.cell);
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

// Puzzle text format:
//
//   ROWS <n>
//   COLS <n>
//   SOURCE <tag>          (optional)
//   TITLE <text>          (optional)
//   GRID
//   <rows of . and #>
//   ACROSS
//   <id>\t<row>,<col>\t<length>\t<clue>
//   DOWN
//   ...
//   SOLUTION              (optional)
//   <rows of A-Z and #>
inline Puzzle parse_puzzle(std::string_view document) {
  enum class Section { Header, Grid, Across, Down, Solution };
  Section section = Section::Header;
  std::optional<int> rows;
  std::optional<int> cols;
  std::string source;
  std::string title;
  std::vector<std::string> grid_rows;
  std::vector<std::string> solution_rows;
  bool has_solution = false;
  std::vector<Slot> declared;

  std::size_t line_no = 0;
  const auto fail = [&](const std::string& why) -> Error {
    return Error("puzzle line " + std::to_string(line_no) + ": " + why);
  };

  for (std::string_view raw : text::lines(document)) {
    ++line_no;
    const std::string_view line = section == Section::Across || section == Section::Down ? raw : text::trim(raw);
    if (text::trim(line).empty()) continue;
    const std::string_view keyword = text::trim(line);
    if (keyword == "GRID") {
      section = Section::Grid;
      continue;
    }
    if (keyword == "ACROSS") {
      section = Section::Across;
      continue;
    }
    if (keyword == "DOWN") {
      section = Section::Down;
      continue;
    }
    if (keyword == "SOLUTION") {
      section = Section::Solution;
      has_solution = true;
      continue;
    }
    switch (section) {
      case Section::Header: {
        const std::size_t sp = line.find_first_of(" \t");
        const std::string_view key = line.substr(0, sp);
        const std::string_view value = sp == std::string_view::npos ? std::string_view{} : text::trim(line.substr(sp));
        if (key == "ROWS") {
          rows = text::parse_int<int>(value);
          if (!rows || *rows < 1) throw fail("ROWS must be a positive integer");
        } else if (key == "COLS") {
          cols = text::parse_int<int>(value);
          if (!cols || *cols < 1) throw fail("COLS must be a positive integer");
        } else if (key == "SOURCE") {
          source = std::string(value);
        } else if (key == "TITLE") {
          title = std::string(value);
        } else {
          throw fail("unknown header key '" + std::string(key) + "'");
        }
        break;
      }
      case Section::Grid:
        grid_rows.emplace_back(line);
        break;
      case Section::Solution: {
        std::string row(line);
        for (char& c : row) {
          if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
        }
        solution_rows.push_back(std::move(row));
        break;
      }
      case Section::Across:
      case Section::Down: {
        const auto fields = text::split(line, '\t');
        if (fields.size() != 4) throw fail("clue line needs 4 tab-separated fields");
        const auto coords = text::split(fields[1], ',');
        if (coords.size() != 2) throw fail("clue position must be row,col");
        const auto r = text::parse_int<int>(coords[0]);
        const auto c = text::parse_int<int>(coords[1]);
        const auto len = text::parse_int<int>(fields[2]);
        if (!r || !c || !len) throw fail("clue position/length must be integers");
        Slot slot;
        slot.id = std::string(text::trim(fields[0]));
        if (slot.id.empty()) throw fail("empty clue id");
        slot.direction = section == Section::Across ? Direction::Across : Direction::Down;
        slot.start = {*r, *c};
        slot.length = *len;
        slot.clue = std::string(text::trim(fields[3]));
        declared.push_back(std::move(slot));
        break;
      }
    }
  }
  if (!rows || !cols) throw Error("puzzle header must declare ROWS and COLS");
  if (grid_rows.size() != static_cast<std::size_t>(*rows)) throw Error("GRID block row count differs from ROWS");
  for (const auto& row : grid_rows) {
    if (row.size() != static_cast<std::size_t>(*cols)) throw Error("GRID block row width differs from COLS");
  }
  Grid grid = Grid::from_rows(grid_rows);

  std::sort(declared.begin(), declared.end(), [](const Slot& a, const Slot& b) {
    return std::tie(a.start, a.direction) < std::tie(b.start, b.direction);
  });
  std::optional<std::vector<std::string>> solution;
  if (has_solution) solution = std::move(solution_rows);
  return Puzzle(std::move(grid), std::move(declared), std::move(solution), std::move(source), std::move(title));
}

inline Puzzle load_puzzle(const std::filesystem::path& path) { return parse_puzzle(read_file(path)); }

inline std::string serialize_puzzle(const Puzzle& puzzle) {
  std::ostringstream out;
  out << "ROWS " << puzzle.grid().rows() << "\n";
  out << "COLS " << puzzle.grid().cols() << "\n";
  if (!puzzle.source().empty()) out << "SOURCE " << puzzle.source() << "\n";
  if (!puzzle.title().empty()) out << "TITLE " << puzzle.title() << "\n";
  out << "GRID\n";
  for (const auto& row : puzzle.grid().to_rows()) out << row << "\n";
  for (Direction d : {Direction::Across, Direction::Down}) {
    out << (d == Direction::Across ? "ACROSS\n" : "DOWN\n");
    for (const auto& slot : puzzle.slots()) {
      if (slot.direction != d) continue;
      out << slot.id << '\t' << slot.start.row << ',' << slot.start.col << '\t' << slot.length << '\t' << slot.clue
          << "\n";
    }
  }
  if (puzzle.solution()) {
    out << "SOLUTION\n";
    for (const auto& row : *puzzle.solution()) out << row << "\n";
  }
  return out.str();
}

}  // namespace crossfill
