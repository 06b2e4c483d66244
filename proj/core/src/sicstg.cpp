#include "sicgen/sicstg.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace sicgen {

SicGraph make_graph(const CellShape& shape, std::vector<Configuration> vertices,
                    std::vector<SicEdge> edges) {
  std::sort(vertices.begin(), vertices.end());
  if (std::adjacent_find(vertices.begin(), vertices.end()) != vertices.end()) {
    throw std::invalid_argument("duplicate vertex label");
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw std::invalid_argument("parallel edge");
  }
  const std::uint32_t n = static_cast<std::uint32_t>(vertices.size());
  for (const SicEdge& e : edges) {
    if (e.src >= n || e.dst >= n) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (e.src == e.dst) {
      throw std::invalid_argument("self-loop");
    }
  }

  SicGraph g;
  g.shape = shape;
  g.vertices = std::move(vertices);
  g.edges = std::move(edges);
  g.first_out.assign(n + 1, 0);
  for (const SicEdge& e : g.edges) ++g.first_out[e.src + 1];
  for (std::uint32_t v = 0; v < n; ++v) g.first_out[v + 1] += g.first_out[v];
  return g;
}

std::vector<Configuration> build_vertices(const StateTable& expanded_table) {
  const CompletenessReport report = validate_complete(expanded_table);
  if (!report.complete()) {
    throw std::invalid_argument(
        "state table is not complete (" + std::to_string(report.row_count) +
        " rows, expected " + std::to_string(report.expected_row_count) +
        "); expand it first");
  }
  std::vector<Configuration> vertices;
  vertices.reserve(expanded_table.rows.size());
  for (const auto& row : expanded_table.rows) {
    vertices.push_back(expanded_table.shape.label_of(row.key, row.next));
  }
  std::sort(vertices.begin(), vertices.end());
  return vertices;
}

SicGraph build_edges(const CellShape& shape,
                     const std::vector<Configuration>& vertices) {
  std::vector<Configuration> sorted = vertices;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("duplicate vertex label");
  }

  // Index vertices by row key. Distinct labels sharing a key would mean a
  // nondeterministic source table; reject.
  std::vector<std::int32_t> index_of_key(shape.key_count(), -1);
  for (std::uint32_t v = 0; v < sorted.size(); ++v) {
    const RowKey key = shape.key_of(sorted[v]);
    if (index_of_key[key] >= 0) {
      throw std::invalid_argument(
          "two configurations share row key " + std::to_string(key) +
          "; vertex set does not come from a deterministic table");
    }
    index_of_key[key] = static_cast<std::int32_t>(v);
  }

  const int inputs = shape.input_count();
  std::vector<SicEdge> edges;
  std::vector<std::uint32_t> dsts;
  for (std::uint32_t u = 0; u < sorted.size(); ++u) {
    const Configuration c = sorted[u];

    // Successor key shared by every out-edge of u: u's current edge values
    // become the previous edge values, u's current memory values become the
    // previous memory values. Only the flipped input varies.
    RowKey base = 0;
    for (int i = 0; i < shape.levels; ++i) {
      base = (base << 1) | (shape.label_level(c, i) ? 1u : 0u);
    }
    for (int j = 0; j < shape.edges; ++j) {
      const RowKey cur = shape.label_edge_cur(c, j) ? 1u : 0u;
      base = (base << 2) | (cur << 1) | cur;
    }
    for (int k = 0; k < shape.memories; ++k) {
      base = (base << 1) | (shape.label_state_cur(c, k) ? 1u : 0u);
    }

    dsts.clear();
    for (int p = 0; p < inputs; ++p) {
      // Flip input p: a level bit directly, or the current half of an edge
      // pair (its previous half keeps u's current value).
      const int bit_pos = p < shape.levels
                              ? shape.key_width() - 1 - p
                              : shape.memories + 2 * (shape.edges - 1 - (p - shape.levels));
      const RowKey dst_key = base ^ (RowKey{1} << bit_pos);
      const std::int32_t dst = index_of_key[dst_key];
      if (dst >= 0 && static_cast<std::uint32_t>(dst) != u) {
        dsts.push_back(static_cast<std::uint32_t>(dst));
      }
    }
    std::sort(dsts.begin(), dsts.end());
    for (std::uint32_t dst : dsts) edges.push_back({u, dst});
  }
  return make_graph(shape, std::move(sorted), std::move(edges));
}

namespace {

// Tarjan with an explicit frame stack; component ids are then renumbered by
// smallest contained vertex index, which equals smallest label because the
// vertex list is sorted.
std::pair<std::size_t, std::vector<std::uint32_t>> tarjan_components(
    const SicGraph& g) {
  const std::uint32_t n = static_cast<std::uint32_t>(g.vertices.size());
  constexpr std::uint32_t kUnvisited = 0xffffffffu;

  std::vector<std::uint32_t> index(n, kUnvisited);
  std::vector<std::uint32_t> lowlink(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::uint32_t> scc_stack;
  std::vector<std::uint32_t> raw_component(n, 0);
  std::uint32_t next_index = 0;
  std::uint32_t raw_count = 0;

  struct Frame {
    std::uint32_t vertex;
    std::uint32_t edge;  // next out-edge id to explore
  };
  std::vector<Frame> frames;

  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    frames.push_back({root, g.first_out[root]});
    index[root] = lowlink[root] = next_index++;
    scc_stack.push_back(root);
    on_stack[root] = true;

    while (!frames.empty()) {
      Frame& frame = frames.back();
      const std::uint32_t v = frame.vertex;
      if (frame.edge < g.first_out[v + 1]) {
        const std::uint32_t w = g.edges[frame.edge].dst;
        ++frame.edge;
        if (index[w] == kUnvisited) {
          frames.push_back({w, g.first_out[w]});
          index[w] = lowlink[w] = next_index++;
          scc_stack.push_back(w);
          on_stack[w] = true;
        } else if (on_stack[w]) {
          lowlink[v] = std::min(lowlink[v], index[w]);
        }
        continue;
      }
      if (lowlink[v] == index[v]) {
        while (true) {
          const std::uint32_t w = scc_stack.back();
          scc_stack.pop_back();
          on_stack[w] = false;
          raw_component[w] = raw_count;
          if (w == v) break;
        }
        ++raw_count;
      }
      frames.pop_back();
      if (!frames.empty()) {
        lowlink[frames.back().vertex] =
            std::min(lowlink[frames.back().vertex], lowlink[v]);
      }
    }
  }

  // Renumber by smallest contained vertex.
  std::vector<std::uint32_t> renumber(raw_count, 0xffffffffu);
  std::uint32_t next_id = 0;
  for (std::uint32_t v = 0; v < n; ++v) {
    if (renumber[raw_component[v]] == 0xffffffffu) {
      renumber[raw_component[v]] = next_id++;
    }
  }
  std::vector<std::uint32_t> component(n, 0);
  for (std::uint32_t v = 0; v < n; ++v) {
    component[v] = renumber[raw_component[v]];
  }
  return {raw_count, std::move(component)};
}

SicGraph induced_subgraph(const SicGraph& g, const std::vector<bool>& keep) {
  const std::uint32_t n = static_cast<std::uint32_t>(g.vertices.size());
  std::vector<std::uint32_t> remap(n, 0);
  std::vector<Configuration> vertices;
  for (std::uint32_t v = 0; v < n; ++v) {
    if (keep[v]) {
      remap[v] = static_cast<std::uint32_t>(vertices.size());
      vertices.push_back(g.vertices[v]);
    }
  }
  std::vector<SicEdge> edges;
  for (const SicEdge& e : g.edges) {
    if (keep[e.src] && keep[e.dst]) {
      edges.push_back({remap[e.src], remap[e.dst]});
    }
  }
  return make_graph(g.shape, std::move(vertices), std::move(edges));
}

}  // namespace

SccReport scc(const SicGraph& g) {
  SccReport report;
  auto [count, component] = tarjan_components(g);
  report.component_count = count;
  report.component_of = std::move(component);
  return report;
}

PruneResult prune_and_check(const SicGraph& g, PrunePolicy policy) {
  const std::uint32_t n = static_cast<std::uint32_t>(g.vertices.size());

  std::vector<std::uint32_t> in_degree(n, 0);
  std::vector<std::uint32_t> out_degree(n, 0);
  for (const SicEdge& e : g.edges) {
    ++out_degree[e.src];
    ++in_degree[e.dst];
  }

  // Reverse adjacency, needed to decrement sources when a vertex dies.
  std::vector<std::uint32_t> first_in(n + 1, 0);
  for (const SicEdge& e : g.edges) ++first_in[e.dst + 1];
  for (std::uint32_t v = 0; v < n; ++v) first_in[v + 1] += first_in[v];
  std::vector<std::uint32_t> in_edges(g.edges.size());
  {
    std::vector<std::uint32_t> cursor = first_in;
    for (std::uint32_t e = 0; e < g.edges.size(); ++e) {
      in_edges[cursor[g.edges[e].dst]++] = e;
    }
  }

  std::vector<bool> alive(n, true);
  std::deque<std::uint32_t> dead;
  for (std::uint32_t v = 0; v < n; ++v) {
    if (in_degree[v] == 0 || out_degree[v] == 0) {
      dead.push_back(v);
      alive[v] = false;
    }
  }
  while (!dead.empty()) {
    const std::uint32_t v = dead.front();
    dead.pop_front();
    for (std::uint32_t e = g.first_out[v]; e < g.first_out[v + 1]; ++e) {
      const std::uint32_t w = g.edges[e].dst;
      if (alive[w] && --in_degree[w] == 0) {
        alive[w] = false;
        dead.push_back(w);
      }
    }
    for (std::uint32_t i = first_in[v]; i < first_in[v + 1]; ++i) {
      const std::uint32_t w = g.edges[in_edges[i]].src;
      if (alive[w] && --out_degree[w] == 0) {
        alive[w] = false;
        dead.push_back(w);
      }
    }
  }

  SccReport report;
  report.policy = policy;
  for (std::uint32_t v = 0; v < n; ++v) {
    if (!alive[v]) report.pruned_vertices.push_back(g.vertices[v]);
  }
  for (const SicEdge& e : g.edges) {
    if (!alive[e.src] || !alive[e.dst]) {
      report.dropped_edges.emplace_back(g.vertices[e.src], g.vertices[e.dst]);
    }
  }

  SicGraph pruned = induced_subgraph(g, alive);
  if (pruned.vertices.empty()) {
    throw ConnectivityError(
        "graph is empty after pruning zero-degree vertices; the cell has no "
        "single-input-change cycle");
  }

  auto [count, component] = tarjan_components(pruned);
  report.component_count = count;

  if (count == 1) {
    report.component_of.assign(pruned.vertices.size(), 0);
    return {std::move(pruned), std::move(report)};
  }

  if (policy == PrunePolicy::Strict) {
    std::vector<std::size_t> sizes(count, 0);
    for (std::uint32_t c : component) ++sizes[c];
    std::ostringstream msg;
    msg << "graph is not strongly connected: " << count << " components";
    for (std::size_t c = 0; c < count; ++c) {
      msg << "\n  component " << c << " (" << sizes[c] << " vertices):";
      std::size_t shown = 0;
      for (std::uint32_t v = 0; v < pruned.vertices.size(); ++v) {
        if (component[v] != c) continue;
        if (shown == 8) {
          msg << " ...";
          break;
        }
        msg << ' ' << g.shape.format_label(pruned.vertices[v]);
        ++shown;
      }
    }
    throw ConnectivityError(msg.str());
  }

  // LargestComponent: keep the component with the most internal edges; ties
  // go to the one containing the smallest label (= smallest component id).
  std::vector<std::size_t> edge_count(count, 0);
  for (const SicEdge& e : pruned.edges) {
    if (component[e.src] == component[e.dst]) ++edge_count[component[e.src]];
  }
  std::uint32_t keep_id = 0;
  for (std::uint32_t c = 1; c < count; ++c) {
    if (edge_count[c] > edge_count[keep_id]) keep_id = c;
  }

  std::vector<bool> keep(pruned.vertices.size(), false);
  for (std::uint32_t v = 0; v < pruned.vertices.size(); ++v) {
    keep[v] = component[v] == keep_id;
    if (!keep[v]) report.pruned_vertices.push_back(pruned.vertices[v]);
  }
  for (const SicEdge& e : pruned.edges) {
    if (!keep[e.src] || !keep[e.dst]) {
      report.dropped_edges.emplace_back(pruned.vertices[e.src],
                                        pruned.vertices[e.dst]);
    }
  }
  std::sort(report.pruned_vertices.begin(), report.pruned_vertices.end());

  SicGraph kept = induced_subgraph(pruned, keep);
  if (kept.edges.empty()) {
    throw ConnectivityError("no edges survive component selection");
  }
  report.component_of.assign(kept.vertices.size(), keep_id);
  return {std::move(kept), std::move(report)};
}

std::string dump_edge_list(const SicGraph& g) {
  std::ostringstream out;
  for (const SicEdge& e : g.edges) {
    out << g.shape.format_label(g.vertices[e.src]) << " -> "
        << g.shape.format_label(g.vertices[e.dst]) << "\n";
  }
  return out.str();
}

std::string to_dot(const SicGraph& g) {
  std::ostringstream out;
  out << "digraph sicstg {\n";
  for (const Configuration& c : g.vertices) {
    out << "  \"" << g.shape.format_label(c) << "\";\n";
  }
  for (const SicEdge& e : g.edges) {
    out << "  \"" << g.shape.format_label(g.vertices[e.src]) << "\" -> \""
        << g.shape.format_label(g.vertices[e.dst]) << "\";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace sicgen
