#include "sicgen/state_table.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "test_util.hpp"

using namespace sicgen;

namespace {

std::map<RowKey, std::uint32_t> row_map(const StateTable& t) {
  std::map<RowKey, std::uint32_t> m;
  for (const auto& row : t.rows) m[row.key] = row.next;
  return m;
}

TEST(Parse, DffFixture) {
  const StateTable t = testutil::parse(testutil::kDffText);
  EXPECT_EQ(t.cell_name, "dff");
  EXPECT_EQ(t.shape.levels, 1);
  EXPECT_EQ(t.shape.edges, 1);
  EXPECT_EQ(t.shape.memories, 1);
  EXPECT_EQ(t.rows.size(), 8u);
  EXPECT_EQ(t.given_row_count, 8u);

  // Keys pack (D, CLK_prev, CLK_cur, Q_prev); R = 01, F = 10.
  const std::map<RowKey, std::uint32_t> expected = {
      {0b0010, 0}, {0b0011, 0}, {0b1010, 1}, {0b1011, 1},
      {0b0100, 0}, {0b0101, 1}, {0b1100, 0}, {0b1101, 1},
  };
  EXPECT_EQ(row_map(t), expected);
}

TEST(Parse, EdgePairSpellingsAreEquivalent) {
  const char* pairs_text = R"(cell dff
input level D
input edge CLK
state Q
table
0 01 0 : 0
0 01 1 : 0
1 01 0 : 1
1 01 1 : 1
0 10 0 : 0
0 10 1 : 1
1 10 0 : 0
1 10 1 : 1
)";
  EXPECT_EQ(row_map(testutil::parse(pairs_text)),
            row_map(testutil::parse(testutil::kDffText)));
}

TEST(Parse, EmptyTableBody) {
  const char* text = "cell c\ninput level A\nstate Q\ntable\n";
  try {
    parse_state_table(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("no rows"), std::string::npos);
  }
}

TEST(Parse, ConflictingDuplicateKeyIsError) {
  const char* text = R"(cell c
input level D
input edge CLK
state Q
table
0 R 0 : 0
0 R 0 : 1
)";
  try {
    parse_state_table(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line, 7);
    EXPECT_NE(std::string(e.what()).find("nondeterministic"), std::string::npos);
  }
}

TEST(Parse, ExactDuplicateIsDeduplicatedWithWarning) {
  const char* text = R"(cell c
input level D
state Q
table
0 0 : 0
0 0 : 0
0 1 : 0
1 0 : 1
1 1 : 1
)";
  std::vector<std::string> warnings;
  const StateTable t = parse_state_table(text, &warnings);
  EXPECT_EQ(t.rows.size(), 4u);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("duplicate row"), std::string::npos);
}

TEST(Parse, UnknownPinKind) {
  const char* text = "cell c\ninput analog A\nstate Q\ntable\n0 0 : 0\n";
  try {
    parse_state_table(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line, 2);
    EXPECT_NE(std::string(e.what()).find("unknown pin kind"), std::string::npos);
  }
}

TEST(Parse, ZeroMemoryElements) {
  const char* text = "cell c\ninput level A\ntable\n0 : \n";
  EXPECT_THROW(parse_state_table(text), ParseError);
}

TEST(Parse, RowWidthMismatch) {
  const char* text = "cell c\ninput level A\nstate Q\ntable\n0 0 0 : 0\n";
  try {
    parse_state_table(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line, 5);
    EXPECT_NE(std::string(e.what()).find("width mismatch"), std::string::npos);
  }
}

TEST(Parse, DuplicatePinName) {
  const char* text = "cell c\ninput level A\nstate A\ntable\n0 0 : 0\n";
  EXPECT_THROW(parse_state_table(text), ParseError);
}

TEST(Parse, WidthCeiling) {
  // 12 edge inputs and one memory element: N + 2M + K = 25 > 24.
  std::string text = "cell wide\n";
  for (int j = 0; j < 12; ++j) {
    text += "input edge E" + std::to_string(j) + "\n";
  }
  text += "state Q\ntable\n";
  try {
    parse_state_table(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("maximum"), std::string::npos);
  }
}

TEST(Parse, MissingHeaderAndMissingTable) {
  EXPECT_THROW(parse_state_table("input level A\n"), ParseError);
  EXPECT_THROW(parse_state_table("cell c\ninput level A\nstate Q\n"), ParseError);
}

TEST(Parse, CommentsAndBlankLinesIgnored) {
  const char* text = R"(
# a comment
cell c   # trailing comment

input level D
state Q
table

0 0 : 0   # hold
0 1 : 0
1 0 : 1
1 1 : 1
)";
  EXPECT_EQ(testutil::parse(text).rows.size(), 4u);
}

TEST(Labels, RisingClockVertexLabel) {
  // Row (D=0, CLK 0->1, Q 0->0) labels as 0,0,1,0,0.
  const CellShape shape{1, 1, 1};
  const Configuration c = shape.label_of(0b0010, 0);
  EXPECT_EQ(c.bits, 0b00100u);
  EXPECT_EQ(shape.format_label(c), "0,0,1,0,0");
  EXPECT_EQ(shape.parse_label("0,0,1,0,0"), std::optional<Configuration>(c));
  EXPECT_EQ(shape.key_of(c), 0b0010u);
  EXPECT_EQ(shape.next_of(c), 0u);
}

TEST(Labels, RoundTripRandom) {
  std::mt19937 rng(7);
  for (int iter = 0; iter < 200; ++iter) {
    const StateTable t = testutil::random_cell(rng);
    for (const auto& row : t.rows) {
      const Configuration c = t.shape.label_of(row.key, row.next);
      EXPECT_EQ(t.shape.key_of(c), row.key);
      EXPECT_EQ(t.shape.next_of(c), row.next);
      EXPECT_EQ(t.shape.parse_label(t.shape.format_label(c)),
                std::optional<Configuration>(c));
    }
  }
}

TEST(Expand, DffMatchesHoldRows) {
  const StateTable t = expand(testutil::parse(testutil::kDffText));
  EXPECT_EQ(t.rows.size(), 16u);
  EXPECT_EQ(t.given_row_count, 8u);

  // The eight rows added for the non-transitioning clock pairs 00 and 11.
  const std::map<RowKey, std::uint32_t> added = {
      {0b0000, 0}, {0b0001, 1}, {0b0110, 0}, {0b0111, 1},
      {0b1000, 0}, {0b1001, 1}, {0b1110, 0}, {0b1111, 1},
  };
  std::map<RowKey, std::uint32_t> actual_added;
  for (std::size_t i = 8; i < t.rows.size(); ++i) {
    actual_added[t.rows[i].key] = t.rows[i].next;
  }
  EXPECT_EQ(actual_added, added);

  // Key (D=0, CLK=(0,0), Q=1) gains next state 1.
  EXPECT_EQ(row_map(t).at(0b0001), 1u);
}

TEST(Expand, Idempotent) {
  const StateTable once = expand(testutil::parse(testutil::kDffText));
  const StateTable twice = expand(once);
  ASSERT_EQ(once.rows.size(), twice.rows.size());
  for (std::size_t i = 0; i < once.rows.size(); ++i) {
    EXPECT_EQ(once.rows[i].key, twice.rows[i].key);
    EXPECT_EQ(once.rows[i].next, twice.rows[i].next);
  }
}

TEST(Expand, SrLatchStyleMissingKey) {
  // Level-only cell with one key left out; the hold row must appear for
  // exactly the keys absent from the input, found here by enumerating the
  // whole key space.
  const char* text = R"(cell srl
input level S
input level R
state Q
table
0 0 0 : 0
0 0 1 : 1
0 1 0 : 0
0 1 1 : 0
1 0 0 : 1
1 0 1 : 1
1 1 0 : 0
)";
  const StateTable given = testutil::parse(text);
  const StateTable expanded = expand(given);

  std::set<RowKey> given_keys;
  for (const auto& row : given.rows) given_keys.insert(row.key);
  std::set<RowKey> missing;
  for (std::uint64_t key = 0; key < given.shape.key_count(); ++key) {
    if (!given_keys.count(static_cast<RowKey>(key))) {
      missing.insert(static_cast<RowKey>(key));
    }
  }
  EXPECT_EQ(missing, std::set<RowKey>{0b111});

  EXPECT_EQ(expanded.rows.size(), 8u);
  const auto rows = row_map(expanded);
  EXPECT_EQ(rows.at(0b111), 1u);  // holds Q = 1
}

TEST(Expand, PropertiesOverRandomCells) {
  std::mt19937 rng(11);
  for (int iter = 0; iter < 100; ++iter) {
    const StateTable t = testutil::random_cell(rng, 10);
    const StateTable e = expand(t);

    // Cardinality.
    EXPECT_EQ(e.rows.size(), t.shape.key_count());
    // Conservatism: the original rows are a bit-exact prefix.
    ASSERT_LE(t.rows.size(), e.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      EXPECT_EQ(t.rows[i].key, e.rows[i].key);
      EXPECT_EQ(t.rows[i].next, e.rows[i].next);
    }
    // Hold semantics for every synthesized row.
    for (std::size_t i = t.rows.size(); i < e.rows.size(); ++i) {
      EXPECT_EQ(e.rows[i].next, e.shape.key_prev_states(e.rows[i].key));
    }
    // Idempotence.
    const StateTable ee = expand(e);
    ASSERT_EQ(e.rows.size(), ee.rows.size());
    for (std::size_t i = 0; i < e.rows.size(); ++i) {
      EXPECT_EQ(e.rows[i].key, ee.rows[i].key);
      EXPECT_EQ(e.rows[i].next, ee.rows[i].next);
    }
  }
}

TEST(ValidateComplete, ExpandedDff) {
  const CompletenessReport r = validate_complete(expand(testutil::parse(testutil::kDffText)));
  EXPECT_EQ(r.row_count, 16u);
  EXPECT_EQ(r.expected_row_count, 16u);
  EXPECT_TRUE(r.complete());
  EXPECT_TRUE(r.missing_keys.empty());
  EXPECT_TRUE(r.duplicate_keys.empty());
}

TEST(ValidateComplete, RawDffMissingOnlyNonTransitions) {
  const StateTable t = testutil::parse(testutil::kDffText);
  const CompletenessReport r = validate_complete(t);
  EXPECT_EQ(r.row_count, 8u);
  ASSERT_EQ(r.missing_keys.size(), 8u);
  for (RowKey key : r.missing_keys) {
    // Every missing key has a non-transitioning clock: pair 00 or 11.
    EXPECT_EQ(t.shape.key_edge_prev(key, 0), t.shape.key_edge_cur(key, 0));
  }
}

TEST(ValidateComplete, DetectsDeletedRow) {
  StateTable t = expand(testutil::parse(testutil::kDffText));
  const RowKey removed = t.rows[12].key;
  t.rows.erase(t.rows.begin() + 12);
  const CompletenessReport r = validate_complete(t);
  EXPECT_FALSE(r.complete());
  ASSERT_EQ(r.missing_keys.size(), 1u);
  EXPECT_EQ(r.missing_keys[0], removed);
}

TEST(Parse, TruncationsFailCleanly) {
  // Every prefix of a valid file either parses or raises ParseError;
  // nothing else may escape.
  const std::string text = testutil::kDffText;
  for (std::size_t len = 0; len <= text.size(); ++len) {
    try {
      parse_state_table(text.substr(0, len));
    } catch (const ParseError&) {
    }
  }
}

TEST(Serialize, RoundTripDff) {
  const StateTable t = testutil::parse(testutil::kDffText);
  const StateTable again = parse_state_table(serialize_state_table(t));
  EXPECT_EQ(again.cell_name, t.cell_name);
  EXPECT_EQ(again.declarations, t.declarations);
  EXPECT_EQ(again.given_row_count, t.given_row_count);
  ASSERT_EQ(again.rows.size(), t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    EXPECT_EQ(again.rows[i].key, t.rows[i].key);
    EXPECT_EQ(again.rows[i].next, t.rows[i].next);
  }
}

TEST(Serialize, RoundTripRandomCells) {
  std::mt19937 rng(23);
  for (int iter = 0; iter < 100; ++iter) {
    const StateTable t = testutil::random_cell(rng);
    const StateTable again = parse_state_table(serialize_state_table(t));
    EXPECT_EQ(again.cell_name, t.cell_name);
    EXPECT_EQ(again.declarations, t.declarations);
    ASSERT_EQ(again.rows.size(), t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      EXPECT_EQ(again.rows[i].key, t.rows[i].key);
      EXPECT_EQ(again.rows[i].next, t.rows[i].next);
    }
  }
}

}  // namespace
