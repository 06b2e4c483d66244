#include "sicgen/state_table.hpp"

#include <cctype>
#include <sstream>
#include <unordered_map>

namespace sicgen {

namespace {

// Positions are counted from the most significant of `width` bits, so that
// position 0 is the first printed field.
inline bool bit_at(std::uint64_t word, int pos, int width) {
  return (word >> (width - 1 - pos)) & 1u;
}

}  // namespace

bool CellShape::key_level(RowKey key, int i) const {
  return bit_at(key, i, key_width());
}

bool CellShape::key_edge_prev(RowKey key, int j) const {
  return bit_at(key, levels + 2 * j, key_width());
}

bool CellShape::key_edge_cur(RowKey key, int j) const {
  return bit_at(key, levels + 2 * j + 1, key_width());
}

bool CellShape::key_state_prev(RowKey key, int k) const {
  return bit_at(key, levels + 2 * edges + k, key_width());
}

std::uint32_t CellShape::key_prev_states(RowKey key) const {
  return key & ((std::uint32_t{1} << memories) - 1);
}

bool CellShape::label_level(Configuration c, int i) const {
  return bit_at(c.bits, i, label_width());
}

bool CellShape::label_edge_prev(Configuration c, int j) const {
  return bit_at(c.bits, levels + 2 * j, label_width());
}

bool CellShape::label_edge_cur(Configuration c, int j) const {
  return bit_at(c.bits, levels + 2 * j + 1, label_width());
}

bool CellShape::label_state_prev(Configuration c, int k) const {
  return bit_at(c.bits, levels + 2 * edges + 2 * k, label_width());
}

bool CellShape::label_state_cur(Configuration c, int k) const {
  return bit_at(c.bits, levels + 2 * edges + 2 * k + 1, label_width());
}

Configuration CellShape::label_of(RowKey key, std::uint32_t next) const {
  // The top N + 2M key bits carry over unchanged; the low K previous-state
  // bits get interleaved with the next-state bits.
  std::uint64_t label = std::uint64_t{key} >> memories;
  for (int k = 0; k < memories; ++k) {
    label = (label << 1) | (key_state_prev(key, k) ? 1u : 0u);
    label = (label << 1) | (bit_at(next, k, memories) ? 1u : 0u);
  }
  return Configuration{label};
}

RowKey CellShape::key_of(Configuration c) const {
  std::uint64_t key = c.bits >> (2 * memories);
  for (int k = 0; k < memories; ++k) {
    key = (key << 1) | (label_state_prev(c, k) ? 1u : 0u);
  }
  return static_cast<RowKey>(key);
}

std::uint32_t CellShape::next_of(Configuration c) const {
  std::uint32_t next = 0;
  for (int k = 0; k < memories; ++k) {
    next = (next << 1) | (label_state_cur(c, k) ? 1u : 0u);
  }
  return next;
}

std::uint32_t CellShape::current_inputs(Configuration c) const {
  std::uint32_t value = 0;
  for (int i = 0; i < levels; ++i) {
    value = (value << 1) | (label_level(c, i) ? 1u : 0u);
  }
  for (int j = 0; j < edges; ++j) {
    value = (value << 1) | (label_edge_cur(c, j) ? 1u : 0u);
  }
  return value;
}

std::string CellShape::format_label(Configuration c) const {
  std::string out;
  const int width = label_width();
  out.reserve(2 * static_cast<std::size_t>(width));
  for (int pos = 0; pos < width; ++pos) {
    if (pos > 0) out.push_back(',');
    out.push_back(bit_at(c.bits, pos, width) ? '1' : '0');
  }
  return out;
}

std::optional<Configuration> CellShape::parse_label(std::string_view text) const {
  std::uint64_t bits = 0;
  int fields = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t comma = text.find(',', i);
    std::string_view field = text.substr(i, comma == std::string_view::npos
                                                ? std::string_view::npos
                                                : comma - i);
    if (field != "0" && field != "1") return std::nullopt;
    bits = (bits << 1) | (field == "1" ? 1u : 0u);
    ++fields;
    if (comma == std::string_view::npos) break;
    i = comma + 1;
    if (i == text.size()) return std::nullopt;  // trailing comma
  }
  if (fields != label_width()) return std::nullopt;
  return Configuration{bits};
}

namespace {

std::vector<std::string> names_of_kind(const StateTable& t, PinKind kind) {
  std::vector<std::string> out;
  for (const auto& d : t.declarations) {
    if (d.kind == kind) out.push_back(d.name);
  }
  return out;
}

}  // namespace

std::vector<std::string> StateTable::level_names() const {
  return names_of_kind(*this, PinKind::LevelInput);
}

std::vector<std::string> StateTable::edge_names() const {
  return names_of_kind(*this, PinKind::EdgeInput);
}

std::vector<std::string> StateTable::memory_names() const {
  return names_of_kind(*this, PinKind::Memory);
}

std::vector<std::string> StateTable::input_names() const {
  std::vector<std::string> out;
  for (const auto& d : declarations) {
    if (d.kind != PinKind::Memory) out.push_back(d.name);
  }
  return out;
}

std::vector<std::int32_t> StateTable::next_by_key() const {
  std::vector<std::int32_t> lookup(shape.key_count(), -1);
  for (const auto& row : rows) {
    lookup[row.key] = static_cast<std::int32_t>(row.next);
  }
  return lookup;
}

namespace {

std::string locate(int line, int column, const std::string& message) {
  if (line <= 0) return message;  // programmatically built tables
  std::string out = "line " + std::to_string(line);
  if (column > 0) out += ", column " + std::to_string(column);
  return out + ": " + message;
}

}  // namespace

ParseError::ParseError(int line_, int column_, const std::string& message)
    : std::runtime_error(locate(line_, column_, message)),
      line(line_),
      column(column_) {}

namespace {

struct Token {
  std::string_view text;
  int column = 0;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
    }
    tokens.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return tokens;
}

bool valid_identifier(std::string_view s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char ch : s) {
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' && ch != '.' &&
        ch != '-') {
      return false;
    }
  }
  return true;
}

int parse_bit(const Token& tok, int line, const char* what) {
  if (tok.text == "0") return 0;
  if (tok.text == "1") return 1;
  throw ParseError(line, tok.column, std::string("invalid ") + what + " value '" +
                                         std::string(tok.text) +
                                         "' (expected 0 or 1)");
}

// R and F are shorthand for the rising (0->1) and falling (1->0) pairs.
std::pair<int, int> parse_edge_pair(const Token& tok, int line) {
  if (tok.text == "R" || tok.text == "01") return {0, 1};
  if (tok.text == "F" || tok.text == "10") return {1, 0};
  if (tok.text == "00") return {0, 0};
  if (tok.text == "11") return {1, 1};
  throw ParseError(line, tok.column,
                   "invalid edge value '" + std::string(tok.text) +
                       "' (expected R, F, 00, 01, 10, or 11)");
}

CellShape shape_of(const std::vector<PinDeclaration>& decls) {
  CellShape shape;
  for (const auto& d : decls) {
    switch (d.kind) {
      case PinKind::LevelInput: ++shape.levels; break;
      case PinKind::EdgeInput: ++shape.edges; break;
      case PinKind::Memory: ++shape.memories; break;
    }
  }
  return shape;
}

// Shared tail of parse_state_table and make_state_table: declaration
// validation, row deduplication, determinism check.
StateTable finalize_table(std::string cell_name,
                          std::vector<PinDeclaration> declarations,
                          const std::vector<StateTableRow>& rows,
                          std::vector<std::string>* warnings, int eof_line) {
  if (!valid_identifier(cell_name)) {
    throw ParseError(0, 0, "invalid cell name '" + cell_name + "'");
  }
  for (std::size_t a = 0; a < declarations.size(); ++a) {
    if (!valid_identifier(declarations[a].name)) {
      throw ParseError(0, 0, "invalid pin name '" + declarations[a].name + "'");
    }
    for (std::size_t b = 0; b < a; ++b) {
      if (declarations[a].name == declarations[b].name) {
        throw ParseError(0, 0, "duplicate pin name '" + declarations[a].name + "'");
      }
    }
  }

  StateTable table;
  table.cell_name = std::move(cell_name);
  table.declarations = std::move(declarations);
  table.shape = shape_of(table.declarations);

  if (table.shape.memories == 0) {
    throw ParseError(eof_line, 0,
                     "cell has no memory elements; sequential behavior "
                     "requires at least one 'state' declaration");
  }
  if (table.shape.key_width() > kMaxKeyWidth) {
    throw ParseError(eof_line, 0,
                     "key width N+2M+K = " + std::to_string(table.shape.key_width()) +
                         " exceeds the supported maximum of " +
                         std::to_string(kMaxKeyWidth));
  }
  if (rows.empty()) {
    throw ParseError(eof_line, 0, "table has no rows");
  }

  std::unordered_map<RowKey, std::size_t> first_with_key;
  first_with_key.reserve(rows.size());
  for (const auto& row : rows) {
    auto [it, inserted] = first_with_key.emplace(row.key, table.rows.size());
    if (inserted) {
      table.rows.push_back(row);
      continue;
    }
    const StateTableRow& prior = table.rows[it->second];
    if (prior.next != row.next) {
      throw ParseError(row.line, 0,
                       "conflicting rows: key already given at line " +
                           std::to_string(prior.line) +
                           " with different next states (nondeterministic "
                           "state table)");
    }
    if (warnings) {
      warnings->push_back("line " + std::to_string(row.line) +
                          ": exact duplicate row ignored (first given at line " +
                          std::to_string(prior.line) + ")");
    }
  }
  table.given_row_count = table.rows.size();
  return table;
}

}  // namespace

StateTable parse_state_table(std::string_view text,
                             std::vector<std::string>* warnings) {
  enum class Section { Header, Declarations, Rows };
  Section section = Section::Header;

  std::string cell_name;
  std::vector<PinDeclaration> declarations;
  std::vector<StateTableRow> rows;
  CellShape shape;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    ++line_no;
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;

    if (std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    std::vector<Token> tokens = tokenize(line);
    if (tokens.empty()) continue;

    switch (section) {
      case Section::Header: {
        if (tokens[0].text != "cell") {
          throw ParseError(line_no, tokens[0].column,
                           "expected 'cell <name>' header");
        }
        if (tokens.size() < 2) {
          throw ParseError(line_no, tokens[0].column, "cell name missing");
        }
        if (tokens.size() > 2) {
          throw ParseError(line_no, tokens[2].column,
                           "unexpected token after cell name");
        }
        if (!valid_identifier(tokens[1].text)) {
          throw ParseError(line_no, tokens[1].column,
                           "invalid cell name '" + std::string(tokens[1].text) + "'");
        }
        cell_name = std::string(tokens[1].text);
        section = Section::Declarations;
        break;
      }

      case Section::Declarations: {
        if (tokens[0].text == "table") {
          if (tokens.size() > 1) {
            throw ParseError(line_no, tokens[1].column,
                             "unexpected token after 'table'");
          }
          shape = shape_of(declarations);
          if (shape.memories == 0) {
            throw ParseError(line_no, tokens[0].column,
                             "cell has no memory elements; sequential behavior "
                             "requires at least one 'state' declaration");
          }
          section = Section::Rows;
          break;
        }
        PinDeclaration decl;
        if (tokens[0].text == "input") {
          if (tokens.size() < 2) {
            throw ParseError(line_no, tokens[0].column,
                             "pin kind missing (expected 'level' or 'edge')");
          }
          if (tokens[1].text == "level") {
            decl.kind = PinKind::LevelInput;
          } else if (tokens[1].text == "edge") {
            decl.kind = PinKind::EdgeInput;
          } else {
            throw ParseError(line_no, tokens[1].column,
                             "unknown pin kind '" + std::string(tokens[1].text) +
                                 "' (expected 'level' or 'edge')");
          }
          if (tokens.size() < 3) {
            throw ParseError(line_no, tokens[0].column, "pin name missing");
          }
          if (tokens.size() > 3) {
            throw ParseError(line_no, tokens[3].column,
                             "unexpected token after pin name");
          }
          decl.name = std::string(tokens[2].text);
        } else if (tokens[0].text == "state") {
          if (tokens.size() < 2) {
            throw ParseError(line_no, tokens[0].column, "pin name missing");
          }
          if (tokens.size() > 2) {
            throw ParseError(line_no, tokens[2].column,
                             "unexpected token after pin name");
          }
          decl.kind = PinKind::Memory;
          decl.name = std::string(tokens[1].text);
        } else {
          throw ParseError(line_no, tokens[0].column,
                           "unknown declaration '" + std::string(tokens[0].text) +
                               "' (expected 'input', 'state', or 'table')");
        }
        if (!valid_identifier(decl.name)) {
          throw ParseError(line_no, tokens.back().column,
                           "invalid pin name '" + decl.name + "'");
        }
        for (const auto& prior : declarations) {
          if (prior.name == decl.name) {
            throw ParseError(line_no, tokens.back().column,
                             "duplicate pin name '" + decl.name + "'");
          }
        }
        declarations.push_back(std::move(decl));
        // Growing the declaration list only ever widens the key; reject as
        // soon as it crosses the cap so the error points at the culprit.
        if (shape_of(declarations).key_width() > kMaxKeyWidth) {
          throw ParseError(line_no, tokens[0].column,
                           "key width N+2M+K = " +
                               std::to_string(shape_of(declarations).key_width()) +
                               " exceeds the supported maximum of " +
                               std::to_string(kMaxKeyWidth));
        }
        break;
      }

      case Section::Rows: {
        if (tokens[0].text == "input" || tokens[0].text == "state") {
          throw ParseError(line_no, tokens[0].column,
                           "declarations must appear before 'table'");
        }
        const std::size_t value_count = static_cast<std::size_t>(shape.levels) +
                                        static_cast<std::size_t>(shape.edges) +
                                        static_cast<std::size_t>(shape.memories);
        const std::size_t expected_tokens =
            value_count + 1 + static_cast<std::size_t>(shape.memories);
        if (tokens.size() != expected_tokens ||
            tokens[value_count].text != ":") {
          std::ostringstream msg;
          msg << "row width mismatch: expected " << shape.levels
              << " level value(s), " << shape.edges << " edge value(s), "
              << shape.memories << " previous state value(s), ':', then "
              << shape.memories << " next state value(s)";
          throw ParseError(line_no, tokens[0].column, msg.str());
        }

        std::size_t t = 0;
        RowKey key = 0;
        for (int i = 0; i < shape.levels; ++i) {
          key = (key << 1) | static_cast<RowKey>(parse_bit(tokens[t++], line_no, "level"));
        }
        for (int j = 0; j < shape.edges; ++j) {
          auto [prev, cur] = parse_edge_pair(tokens[t++], line_no);
          key = (key << 2) | static_cast<RowKey>((prev << 1) | cur);
        }
        for (int k = 0; k < shape.memories; ++k) {
          key = (key << 1) | static_cast<RowKey>(parse_bit(tokens[t++], line_no, "state"));
        }
        ++t;  // ':'
        std::uint32_t next = 0;
        for (int k = 0; k < shape.memories; ++k) {
          next = (next << 1) |
                 static_cast<std::uint32_t>(parse_bit(tokens[t++], line_no, "next state"));
        }
        rows.push_back({key, next, line_no});
        break;
      }
    }
  }

  if (section == Section::Header) {
    throw ParseError(line_no, 0, "expected 'cell <name>' header");
  }
  if (section == Section::Declarations) {
    throw ParseError(line_no, 0, "missing 'table' section");
  }
  return finalize_table(std::move(cell_name), std::move(declarations), rows,
                        warnings, line_no);
}

StateTable make_state_table(std::string cell_name,
                            std::vector<PinDeclaration> declarations,
                            const std::vector<StateTableRow>& rows,
                            std::vector<std::string>* warnings) {
  CellShape shape = shape_of(declarations);
  if (shape.key_width() <= kMaxKeyWidth) {
    const RowKey key_mask = static_cast<RowKey>(shape.key_count() - 1);
    const std::uint32_t next_mask = (std::uint32_t{1} << shape.memories) - 1;
    for (const auto& row : rows) {
      if ((row.key & ~key_mask) != 0 || (row.next & ~next_mask) != 0) {
        throw ParseError(row.line, 0, "row value out of range for declared pins");
      }
    }
  }
  return finalize_table(std::move(cell_name), std::move(declarations), rows,
                        warnings, 0);
}

std::string serialize_state_table(const StateTable& table) {
  std::ostringstream out;
  out << "cell " << table.cell_name << "\n";
  for (const auto& d : table.declarations) {
    switch (d.kind) {
      case PinKind::LevelInput: out << "input level " << d.name << "\n"; break;
      case PinKind::EdgeInput: out << "input edge " << d.name << "\n"; break;
      case PinKind::Memory: out << "state " << d.name << "\n"; break;
    }
  }
  out << "table\n";
  const CellShape& shape = table.shape;
  for (const auto& row : table.rows) {
    for (int i = 0; i < shape.levels; ++i) {
      if (i > 0) out << ' ';
      out << (shape.key_level(row.key, i) ? '1' : '0');
    }
    for (int j = 0; j < shape.edges; ++j) {
      if (shape.levels > 0 || j > 0) out << ' ';
      const bool prev = shape.key_edge_prev(row.key, j);
      const bool cur = shape.key_edge_cur(row.key, j);
      if (!prev && cur) {
        out << 'R';
      } else if (prev && !cur) {
        out << 'F';
      } else {
        out << (prev ? '1' : '0') << (cur ? '1' : '0');
      }
    }
    for (int k = 0; k < shape.memories; ++k) {
      if (shape.levels > 0 || shape.edges > 0 || k > 0) out << ' ';
      out << (shape.key_state_prev(row.key, k) ? '1' : '0');
    }
    out << " :";
    for (int k = 0; k < shape.memories; ++k) {
      out << ' ' << (bit_at(row.next, k, shape.memories) ? '1' : '0');
    }
    out << "\n";
  }
  return out.str();
}

StateTable expand(const StateTable& table) {
  StateTable out = table;
  std::vector<bool> present(table.shape.key_count(), false);
  for (const auto& row : table.rows) present[row.key] = true;

  // Unspecified behavior means the memory elements hold their values.
  for (std::uint64_t key = 0; key < table.shape.key_count(); ++key) {
    if (present[key]) continue;
    const RowKey k = static_cast<RowKey>(key);
    out.rows.push_back({k, table.shape.key_prev_states(k), 0});
  }
  return out;
}

CompletenessReport validate_complete(const StateTable& table) {
  CompletenessReport report;
  report.row_count = table.rows.size();
  report.expected_row_count = table.shape.key_count();

  std::vector<std::uint8_t> seen(table.shape.key_count(), 0);
  for (const auto& row : table.rows) {
    if (seen[row.key] < 2) ++seen[row.key];
  }
  for (std::uint64_t key = 0; key < table.shape.key_count(); ++key) {
    if (seen[key] == 0) {
      report.missing_keys.push_back(static_cast<RowKey>(key));
    } else if (seen[key] > 1) {
      report.duplicate_keys.push_back(static_cast<RowKey>(key));
    }
  }
  return report;
}

}  // namespace sicgen
