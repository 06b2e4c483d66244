#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sicgen/state_table.hpp"

namespace sicgen {

struct SicEdge {
  std::uint32_t src = 0;
  std::uint32_t dst = 0;

  friend auto operator<=>(const SicEdge&, const SicEdge&) = default;
};

/// Directed graph over configurations. Vertices are sorted ascending by
/// label, edges by (src, dst); edge ids are indices into `edges`. Out-edges
/// of vertex v are the id range [first_out[v], first_out[v+1]).
struct SicGraph {
  CellShape shape;
  std::vector<Configuration> vertices;
  std::vector<SicEdge> edges;
  std::vector<std::uint32_t> first_out;

  std::uint32_t out_degree(std::uint32_t v) const {
    return first_out[v + 1] - first_out[v];
  }
};

/// Normalizes and validates the parts into a SicGraph: sorts, rejects
/// duplicate labels, self-loops, parallel edges and out-of-range indices,
/// and builds the adjacency index.
SicGraph make_graph(const CellShape& shape, std::vector<Configuration> vertices,
                    std::vector<SicEdge> edges);

/// One configuration per row of a complete table, sorted by label.
std::vector<Configuration> build_vertices(const StateTable& expanded_table);

/// All single-input-change transitions between the given configurations.
/// An edge u -> v exists iff v holds u's current memory values as previous
/// values, holds u's current edge-input values as previous values, and
/// differs from u in exactly one current input value.
SicGraph build_edges(const CellShape& shape,
                     const std::vector<Configuration>& vertices);

enum class PrunePolicy { Strict, LargestComponent };

struct SccReport {
  std::size_t component_count = 0;
  /// Component id per vertex of the examined graph (for prune_and_check:
  /// per surviving vertex). Components are numbered by ascending smallest
  /// contained label.
  std::vector<std::uint32_t> component_of;
  std::vector<Configuration> pruned_vertices;
  std::vector<std::pair<Configuration, Configuration>> dropped_edges;
  std::optional<PrunePolicy> policy;
};

struct ConnectivityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Strongly connected component decomposition (iterative Tarjan).
SccReport scc(const SicGraph& g);

struct PruneResult {
  SicGraph graph;
  SccReport report;
};

/// Deletes vertices with zero in- or out-degree until none remain (deletion
/// can create new zero-degree vertices, so this iterates to a fixpoint),
/// then decomposes into SCCs. Strict policy requires a single component;
/// LargestComponent keeps the component with the most edges (ties broken by
/// smallest contained label) and records everything dropped.
/// Throws ConnectivityError when nothing survives or, under Strict, when
/// more than one component remains.
PruneResult prune_and_check(const SicGraph& g, PrunePolicy policy);

/// One "src_label -> dst_label" line per edge.
std::string dump_edge_list(const SicGraph& g);

std::string to_dot(const SicGraph& g);

}  // namespace sicgen
