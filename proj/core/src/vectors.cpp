#include "sicgen/vectors.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace sicgen {

namespace {

inline bool bit_at(std::uint32_t word, int pos, int width) {
  return (word >> (width - 1 - pos)) & 1u;
}

// Stimulus bit position (grouped: levels then edge currents) for each input
// pin in declaration order.
std::vector<int> stimulus_positions(const std::vector<PinDeclaration>& decls,
                                    const CellShape& shape) {
  std::vector<int> positions;
  int level_seen = 0, edge_seen = 0;
  for (const auto& d : decls) {
    if (d.kind == PinKind::LevelInput) {
      positions.push_back(level_seen++);
    } else if (d.kind == PinKind::EdgeInput) {
      positions.push_back(shape.levels + edge_seen++);
    }
  }
  return positions;
}

}  // namespace

TestVectorSequence walk_to_vectors(const PostmanWalk& walk, const SicGraph& g,
                                   const StateTable& table) {
  if (table.shape != g.shape) {
    throw std::invalid_argument("state table shape does not match graph");
  }
  validate_walk(g, walk);

  TestVectorSequence seq;
  seq.cell_name = table.cell_name;
  seq.declarations = table.declarations;
  seq.shape = g.shape;
  seq.initial = g.vertices[walk.start_vertex];
  seq.steps.reserve(walk.traversals.size());
  std::uint32_t step = 0;
  for (std::uint32_t e : walk.traversals) {
    const Configuration dst = g.vertices[g.edges[e].dst];
    seq.steps.push_back({++step, g.shape.current_inputs(dst), g.shape.next_of(dst)});
  }
  return seq;
}

ReplayReport replay(const StateTable& expanded_table,
                    const TestVectorSequence& sequence) {
  const CellShape& shape = expanded_table.shape;
  if (shape != sequence.shape) {
    throw std::invalid_argument(
        "vector sequence pin counts do not match the state table");
  }
  const std::vector<std::int32_t> next_by_key = expanded_table.next_by_key();

  // Previous values carried between steps, seeded from the initial
  // configuration's current values.
  std::uint32_t prev_edges = 0;
  for (int j = 0; j < shape.edges; ++j) {
    prev_edges = (prev_edges << 1) |
                 (shape.label_edge_cur(sequence.initial, j) ? 1u : 0u);
  }
  std::uint32_t prev_states = shape.next_of(sequence.initial);

  ReplayReport report;
  for (const TestVector& vec : sequence.steps) {
    std::uint32_t cur_edges = 0;
    RowKey key = 0;
    for (int i = 0; i < shape.levels; ++i) {
      key = (key << 1) |
            static_cast<RowKey>(bit_at(vec.stimulus, i, shape.input_count()));
    }
    for (int j = 0; j < shape.edges; ++j) {
      const std::uint32_t prev = bit_at(prev_edges, j, shape.edges) ? 1u : 0u;
      const std::uint32_t cur =
          bit_at(vec.stimulus, shape.levels + j, shape.input_count()) ? 1u : 0u;
      key = (key << 2) | (prev << 1) | cur;
      cur_edges = (cur_edges << 1) | cur;
    }
    key = (key << shape.memories) | prev_states;

    const std::int32_t next = next_by_key[key];
    if (next < 0) {
      throw std::logic_error("state table has no row for key " +
                             std::to_string(key) +
                             "; table is not complete");
    }
    for (int k = 0; k < shape.memories; ++k) {
      const bool simulated = bit_at(static_cast<std::uint32_t>(next), k, shape.memories);
      const bool expected = bit_at(vec.expected, k, shape.memories);
      if (simulated != expected) {
        report.mismatches.push_back({vec.step, k, expected, simulated});
      }
    }
    prev_edges = cur_edges;
    prev_states = static_cast<std::uint32_t>(next);
    ++report.steps_replayed;
  }
  return report;
}

bool CoverageReport::complete() const {
  if (edge_histogram.empty()) return false;
  return *std::min_element(edge_histogram.begin(), edge_histogram.end()) >= 1;
}

CoverageReport coverage(const PostmanWalk& walk, const SicGraph& g,
                        const SccReport& scc_report) {
  validate_walk(g, walk);

  CoverageReport report;
  report.shape = g.shape;
  report.vertex_count = g.vertices.size();
  report.edge_count = g.edges.size();
  report.walk_length = walk.length();
  report.start = g.vertices[walk.start_vertex];
  report.edge_histogram.assign(g.edges.size(), 0);
  for (std::uint32_t e : walk.traversals) ++report.edge_histogram[e];
  for (std::uint32_t count : report.edge_histogram) {
    if (count > 1) report.repeated_traversals += count - 1;
  }
  report.untestable = scc_report.pruned_vertices;
  report.dropped_edges = scc_report.dropped_edges;

  if (scc_report.policy) {
    report.notes.push_back(std::string("scc policy: ") +
                           (*scc_report.policy == PrunePolicy::Strict
                                ? "strict"
                                : "largest-component"));
  }
  if (scc_report.component_count > 1) {
    report.notes.push_back("components found after pruning: " +
                           std::to_string(scc_report.component_count) +
                           "; only one was kept");
  }
  return report;
}

std::string format_report(const CoverageReport& report) {
  std::ostringstream out;
  if (!report.cell_name.empty()) out << "cell: " << report.cell_name << "\n";

  out << "[graph]\n";
  out << "vertices: " << report.vertex_count << "\n";
  out << "edges: " << report.edge_count << "\n";
  out << "pruned configurations: " << report.untestable.size() << "\n";
  out << "dropped edges: " << report.dropped_edges.size() << "\n";

  out << "\n[walk]\n";
  out << "start: " << report.shape.format_label(report.start) << "\n";
  out << "length: " << report.walk_length << "\n";
  out << "edges covered: " << report.edge_count << "\n";
  out << "repeated traversals: " << report.repeated_traversals << "\n";

  out << "\n[histogram]\n";
  if (report.edge_histogram.empty()) {
    out << "empty\n";
  } else {
    const auto [min_it, max_it] = std::minmax_element(
        report.edge_histogram.begin(), report.edge_histogram.end());
    std::size_t once = 0;
    for (std::uint32_t c : report.edge_histogram) {
      if (c == 1) ++once;
    }
    out << "min: " << *min_it << "\n";
    out << "max: " << *max_it << "\n";
    out << "traversed once: " << once << "\n";
    out << "traversed more than once: " << report.edge_histogram.size() - once
        << "\n";
  }

  out << "\n[untestable configurations]\n";
  if (report.untestable.empty()) {
    out << "none\n";
  } else {
    for (const Configuration& c : report.untestable) {
      out << report.shape.format_label(c) << "\n";
    }
  }

  out << "\n[dropped edges]\n";
  if (report.dropped_edges.empty()) {
    out << "none\n";
  } else {
    for (const auto& [src, dst] : report.dropped_edges) {
      out << report.shape.format_label(src) << " -> "
          << report.shape.format_label(dst) << "\n";
    }
  }

  out << "\n[notes]\n";
  if (report.notes.empty()) {
    out << "none\n";
  } else {
    for (const std::string& note : report.notes) out << note << "\n";
  }
  return out.str();
}

std::string to_csv(const TestVectorSequence& seq) {
  std::ostringstream out;
  out << "# cell: " << seq.cell_name << "\n";
  out << "# initial: " << seq.shape.format_label(seq.initial) << "\n";

  const std::vector<int> positions =
      stimulus_positions(seq.declarations, seq.shape);
  out << "step";
  for (const auto& d : seq.declarations) {
    if (d.kind != PinKind::Memory) out << ',' << d.name;
  }
  for (const auto& d : seq.declarations) {
    if (d.kind == PinKind::Memory) out << ",expect_" << d.name;
  }
  out << "\n";

  for (const TestVector& vec : seq.steps) {
    out << vec.step;
    for (int pos : positions) {
      out << ',' << (bit_at(vec.stimulus, pos, seq.shape.input_count()) ? '1' : '0');
    }
    for (int k = 0; k < seq.shape.memories; ++k) {
      out << ',' << (bit_at(vec.expected, k, seq.shape.memories) ? '1' : '0');
    }
    out << "\n";
  }
  return out.str();
}

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    std::string_view field = line.substr(
        start, comma == std::string_view::npos ? std::string_view::npos
                                               : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
      field.remove_prefix(1);
    }
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' ||
                              field.back() == '\r')) {
      field.remove_suffix(1);
    }
    fields.emplace_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

TestVectorSequence parse_csv(std::string_view text, const StateTable& reference,
                             std::vector<std::string>* warnings) {
  TestVectorSequence seq;
  seq.declarations = reference.declarations;
  seq.shape = reference.shape;

  bool saw_initial = false;
  bool saw_header = false;
  const std::vector<int> positions =
      stimulus_positions(reference.declarations, reference.shape);
  const int inputs = reference.shape.input_count();
  const int memories = reference.shape.memories;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    ++line_no;
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    if (line.front() == '#') {
      std::string_view body = line.substr(1);
      while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
      if (body.rfind("cell:", 0) == 0) {
        std::string_view name = body.substr(5);
        while (!name.empty() && name.front() == ' ') name.remove_prefix(1);
        seq.cell_name = std::string(name);
      } else if (body.rfind("initial:", 0) == 0) {
        std::string_view label = body.substr(8);
        while (!label.empty() && label.front() == ' ') label.remove_prefix(1);
        const auto parsed = reference.shape.parse_label(label);
        if (!parsed) {
          throw ParseError(line_no, 0,
                           "initial configuration '" + std::string(label) +
                               "' does not match the cell's " +
                               std::to_string(reference.shape.label_width()) +
                               "-bit label width");
        }
        seq.initial = *parsed;
        saw_initial = true;
      }
      continue;  // other comment lines are ignored
    }

    const std::vector<std::string> fields = split_csv_line(line);
    if (!saw_header) {
      const std::size_t expected = 1 + static_cast<std::size_t>(inputs) + memories;
      if (fields.empty() || fields[0] != "step" || fields.size() != expected) {
        throw ParseError(line_no, 0,
                         "bad header: expected 'step', " +
                             std::to_string(inputs) + " input column(s) and " +
                             std::to_string(memories) + " expect_ column(s)");
      }
      if (warnings) {
        const std::vector<std::string> inputs_ref = reference.input_names();
        for (int i = 0; i < inputs; ++i) {
          if (fields[1 + i] != inputs_ref[i]) {
            warnings->push_back("input column '" + fields[1 + i] +
                                "' does not match pin '" + inputs_ref[i] + "'");
          }
        }
        const std::vector<std::string> mems_ref = reference.memory_names();
        for (int k = 0; k < memories; ++k) {
          if (fields[1 + inputs + k] != "expect_" + mems_ref[k]) {
            warnings->push_back("column '" + fields[1 + inputs + k] +
                                "' does not match 'expect_" + mems_ref[k] + "'");
          }
        }
      }
      saw_header = true;
      continue;
    }

    if (fields.size() != 1 + static_cast<std::size_t>(inputs) + memories) {
      throw ParseError(line_no, 0, "row has " + std::to_string(fields.size()) +
                                       " field(s), expected " +
                                       std::to_string(1 + inputs + memories));
    }
    TestVector vec;
    try {
      vec.step = static_cast<std::uint32_t>(std::stoul(fields[0]));
    } catch (const std::exception&) {
      throw ParseError(line_no, 0, "bad step number '" + fields[0] + "'");
    }
    for (int i = 0; i < inputs; ++i) {
      const std::string& f = fields[1 + i];
      if (f != "0" && f != "1") {
        throw ParseError(line_no, 0, "bad stimulus bit '" + f + "'");
      }
      if (f == "1") {
        vec.stimulus |= 1u << (inputs - 1 - positions[i]);
      }
    }
    for (int k = 0; k < memories; ++k) {
      const std::string& f = fields[1 + inputs + k];
      if (f != "0" && f != "1") {
        throw ParseError(line_no, 0, "bad expected bit '" + f + "'");
      }
      if (f == "1") {
        vec.expected |= 1u << (memories - 1 - k);
      }
    }
    seq.steps.push_back(vec);
  }

  if (!saw_header) {
    throw ParseError(line_no, 0, "missing CSV header");
  }
  if (!saw_initial) {
    throw ParseError(line_no, 0, "missing '# initial:' metadata line");
  }
  return seq;
}

}  // namespace sicgen
