#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sicgen {

// Hard cap on the row-key width N + 2M + K. Keeps dense enumeration of the
// key space (expansion, completeness checks, vertex lookup) within a few
// hundred MB.
inline constexpr int kMaxKeyWidth = 24;

enum class PinKind { LevelInput, EdgeInput, Memory };

struct PinDeclaration {
  std::string name;
  PinKind kind = PinKind::LevelInput;

  friend bool operator==(const PinDeclaration&, const PinDeclaration&) = default;
};

/// Row lookup key: level values, (previous, current) per edge input, previous
/// memory values. Packed most-significant-field-first, width N + 2M + K.
using RowKey = std::uint32_t;

/// One SICSTG vertex. Packs, most significant field first: level input
/// values, (previous, current) per edge input, (previous, current) per
/// memory element. Integer order therefore equals lexicographic order on
/// the printed label.
struct Configuration {
  std::uint64_t bits = 0;

  friend auto operator<=>(const Configuration&, const Configuration&) = default;
};

/// Pin counts of a cell and the bit geometry of keys and labels derived from
/// them. All field accessors index pins in declaration order within their
/// kind (level inputs, edge inputs, memory elements).
struct CellShape {
  int levels = 0;    // N
  int edges = 0;     // M
  int memories = 0;  // K

  int key_width() const { return levels + 2 * edges + memories; }
  int label_width() const { return levels + 2 * edges + 2 * memories; }
  int input_count() const { return levels + edges; }
  std::uint64_t key_count() const { return std::uint64_t{1} << key_width(); }

  friend bool operator==(const CellShape&, const CellShape&) = default;

  bool key_level(RowKey key, int i) const;
  bool key_edge_prev(RowKey key, int j) const;
  bool key_edge_cur(RowKey key, int j) const;
  bool key_state_prev(RowKey key, int k) const;
  /// Previous memory values of a key, packed as a K-bit value.
  std::uint32_t key_prev_states(RowKey key) const;

  bool label_level(Configuration c, int i) const;
  bool label_edge_prev(Configuration c, int j) const;
  bool label_edge_cur(Configuration c, int j) const;
  bool label_state_prev(Configuration c, int k) const;
  bool label_state_cur(Configuration c, int k) const;

  /// Vertex label of the row key -> next; key_of/next_of invert it.
  Configuration label_of(RowKey key, std::uint32_t next) const;
  RowKey key_of(Configuration c) const;
  std::uint32_t next_of(Configuration c) const;

  /// Current input values: level bits then current edge bits, N + M wide.
  /// These are the positions that may change along a SIC edge.
  std::uint32_t current_inputs(Configuration c) const;

  std::string format_label(Configuration c) const;  // e.g. "0,0,1,0,0"
  std::optional<Configuration> parse_label(std::string_view text) const;
};

struct StateTableRow {
  RowKey key = 0;
  std::uint32_t next = 0;
  int line = 0;  // source line; 0 for rows synthesized by expand()
};

struct StateTable {
  std::string cell_name;
  std::vector<PinDeclaration> declarations;
  CellShape shape;
  std::vector<StateTableRow> rows;
  /// Rows [0, given_row_count) came from the input; the rest were added by
  /// expand().
  std::size_t given_row_count = 0;

  std::vector<std::string> level_names() const;
  std::vector<std::string> edge_names() const;
  std::vector<std::string> memory_names() const;
  /// Input pin names in declaration order (levels and edges interleaved as
  /// declared).
  std::vector<std::string> input_names() const;

  /// Next-state value per key, 2^key_width entries, -1 where no row exists.
  std::vector<std::int32_t> next_by_key() const;
};

struct ParseError : std::runtime_error {
  ParseError(int line, int column, const std::string& message);

  int line = 0;
  int column = 0;
};

/// Parses the .st text format. Non-fatal findings (exact duplicate rows)
/// are appended to *warnings when given.
StateTable parse_state_table(std::string_view text,
                             std::vector<std::string>* warnings = nullptr);

/// Canonical text for a table; parse_state_table(serialize_state_table(t))
/// reproduces t.
std::string serialize_state_table(const StateTable& table);

/// Builds a table from parts, applying the same validation as the parser
/// (unique names, at least one memory element, width cap, deterministic
/// rows). Exact duplicate rows are dropped with a warning; conflicting
/// duplicates throw ParseError.
StateTable make_state_table(std::string cell_name,
                            std::vector<PinDeclaration> declarations,
                            const std::vector<StateTableRow>& rows,
                            std::vector<std::string>* warnings = nullptr);

/// Completes the table: every absent key gets a row that holds its previous
/// memory values. Given rows are preserved bit-exact; synthesized rows are
/// appended in ascending key order. Idempotent.
StateTable expand(const StateTable& table);

struct CompletenessReport {
  std::uint64_t row_count = 0;
  std::uint64_t expected_row_count = 0;  // 2^(N + 2M + K)
  std::vector<RowKey> missing_keys;
  std::vector<RowKey> duplicate_keys;

  bool complete() const {
    return missing_keys.empty() && duplicate_keys.empty() &&
           row_count == expected_row_count;
  }
};

CompletenessReport validate_complete(const StateTable& table);

}  // namespace sicgen
