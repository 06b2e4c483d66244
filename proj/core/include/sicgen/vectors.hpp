#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sicgen/dcpw.hpp"
#include "sicgen/sicstg.hpp"
#include "sicgen/state_table.hpp"

namespace sicgen {

struct TestVector {
  std::uint32_t step = 0;      // 1-based
  std::uint32_t stimulus = 0;  // level bits then current edge bits, N+M wide
  std::uint32_t expected = 0;  // current memory values, K wide
};

struct TestVectorSequence {
  std::string cell_name;
  std::vector<PinDeclaration> declarations;
  CellShape shape;
  /// Configuration the bench must establish before applying step 1; its
  /// current values seed the previous edge-input and memory values.
  Configuration initial;
  std::vector<TestVector> steps;
};

/// One test vector per traversed edge: the destination's current input
/// values as stimulus, its current memory values as expected response.
/// `table` supplies the pin names; its shape must match the graph.
TestVectorSequence walk_to_vectors(const PostmanWalk& walk, const SicGraph& g,
                                   const StateTable& table);

struct ReplayMismatch {
  std::uint32_t step = 0;
  int memory = 0;  // memory element index, declaration order
  bool expected = false;
  bool simulated = false;
};

struct ReplayReport {
  std::size_t steps_replayed = 0;
  std::vector<ReplayMismatch> mismatches;

  bool ok() const { return mismatches.empty(); }
};

/// Simulates the table as the reference model and compares each step's
/// expected values against it. The table must be complete.
ReplayReport replay(const StateTable& expanded_table,
                    const TestVectorSequence& sequence);

struct CoverageReport {
  std::string cell_name;
  CellShape shape;
  std::size_t vertex_count = 0;
  std::size_t edge_count = 0;
  std::size_t walk_length = 0;
  std::size_t repeated_traversals = 0;
  Configuration start;
  std::vector<std::uint32_t> edge_histogram;  // traversal count per edge id
  std::vector<Configuration> untestable;      // configurations pruned away
  std::vector<std::pair<Configuration, Configuration>> dropped_edges;
  std::vector<std::string> notes;

  bool complete() const;  // every edge traversed at least once
};

CoverageReport coverage(const PostmanWalk& walk, const SicGraph& g,
                        const SccReport& scc_report);

std::string format_report(const CoverageReport& report);

/// CSV with `# cell:` / `# initial:` metadata lines, a header naming the
/// input pins (declaration order) and expect_<memory> columns, then one row
/// per step.
std::string to_csv(const TestVectorSequence& sequence);

/// Parses a vector CSV against a reference table (which defines the pin
/// split and widths). Pin-name differences are reported as warnings, not
/// errors, so vectors can be replayed against a different implementation
/// of the same interface.
TestVectorSequence parse_csv(std::string_view text, const StateTable& reference,
                             std::vector<std::string>* warnings = nullptr);

}  // namespace sicgen
