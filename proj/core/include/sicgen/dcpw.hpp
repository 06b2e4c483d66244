#pragma once

#include <cstdint>
#include <vector>

#include "sicgen/sicstg.hpp"

namespace sicgen {

struct ImbalanceTable {
  std::vector<std::uint32_t> in_degree;
  std::vector<std::uint32_t> out_degree;
  std::vector<std::int32_t> imbalance;  // in_degree - out_degree
};

ImbalanceTable imbalances(const SicGraph& g);

/// Unit-cost shortest path distances between all vertex pairs, plus one
/// concrete shortest-path tree per source for path reconstruction:
/// into_edge[u * order + v] is the id of the last edge on the chosen
/// shortest u -> v path (-1 on the diagonal).
struct DistanceMatrix {
  std::uint32_t order = 0;
  std::vector<std::int32_t> distance;
  std::vector<std::int32_t> into_edge;

  std::int32_t at(std::uint32_t u, std::uint32_t v) const {
    return distance[static_cast<std::size_t>(u) * order + v];
  }
};

/// Throws ConnectivityError if any pair is unreachable (the graph was
/// supposed to be strongly connected).
DistanceMatrix all_pairs_shortest(const SicGraph& g);

/// Edge duplications that balance every vertex, with minimal total count.
struct Augmentation {
  std::vector<std::uint32_t> duplication;  // per edge id
  std::uint64_t total_added = 0;
};

/// Exact minimum augmentation via the transportation problem: vertices with
/// excess in-degree supply extra departures, vertices with excess out-degree
/// demand extra arrivals, shipping one unit from u to v costs dist(u, v).
/// The optimal flow is decomposed along the shortest-path trees of `dist`.
Augmentation min_cost_augmentation(const SicGraph& g, const ImbalanceTable& imb,
                                   const DistanceMatrix& dist);

/// Closed walk: traversals[i] is a SicGraph edge id; consecutive traversals
/// are incident and the last one returns to start_vertex.
struct PostmanWalk {
  std::uint32_t start_vertex = 0;
  std::vector<std::uint32_t> traversals;

  std::size_t length() const { return traversals.size(); }
};

/// Eulerian circuit of the multigraph formed by g plus aug's duplicates
/// (iterative Hierholzer). Every vertex of the multigraph must be balanced
/// and all edges must lie in one strongly connected component.
PostmanWalk eulerian_circuit(const SicGraph& g, const Augmentation& aug,
                             std::uint32_t start_vertex);

/// Directed Chinese postman walk: minimum-length closed walk covering every
/// edge of g at least once. g must be strongly connected and have edges.
/// The walk starts at the smallest-label vertex with outgoing edges.
PostmanWalk dcpw(const SicGraph& g);

/// Structural checks: ids in range, incidence, closure, every edge covered.
/// Throws std::logic_error on violation.
void validate_walk(const SicGraph& g, const PostmanWalk& walk);

/// One edge id per line, then a summary line with length, edge count, and
/// repetition count.
std::string dump_walk(const SicGraph& g, const PostmanWalk& walk);

}  // namespace sicgen
