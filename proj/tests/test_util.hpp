#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "sicgen/sicstg.hpp"
#include "sicgen/state_table.hpp"

namespace testutil {

// Positive edge-triggered D flip-flop: D level-sensitive, CLK edge-sensitive,
// one memory element.
inline constexpr char kDffText[] = R"(# D flip-flop, positive edge triggered
cell dff
input level D
input edge CLK
state Q
table
0 R 0 : 0
0 R 1 : 0
1 R 0 : 1
1 R 1 : 1
0 F 0 : 0
0 F 1 : 1
1 F 0 : 0
1 F 1 : 1
)";

// Toggles on both clock edges. Its SICSTG splits into two disjoint 2-cycles
// after pruning, which makes it the canonical not-strongly-connected cell.
inline constexpr char kDualEdgeToggleText[] = R"(cell dtog
input edge C
state Q
table
R 0 : 1
R 1 : 0
F 0 : 1
F 1 : 0
)";

// Transparent buffer: Q follows D. After pruning its SICSTG is a single
// 2-cycle, the smallest walkable graph.
inline constexpr char kBufText[] = R"(cell buf
input level D
state Q
table
0 0 : 0
0 1 : 0
1 0 : 1
1 1 : 1
)";

inline sicgen::StateTable parse(const char* text) {
  return sicgen::parse_state_table(text);
}

/// Random cell with K >= 1, N + M >= 1, N + 2M + K <= max_width. Declaration
/// order is shuffled so kinds interleave. Rows cover a random subset of the
/// key space with random next states.
inline sicgen::StateTable random_cell(std::mt19937& rng, int max_width = 8) {
  int n = 0, m = 0, k = 0;
  do {
    n = static_cast<int>(rng() % 4);
    m = static_cast<int>(rng() % 3);
    k = 1 + static_cast<int>(rng() % 2);
  } while (n + m < 1 || n + 2 * m + k > max_width);

  std::vector<sicgen::PinDeclaration> decls;
  for (int i = 0; i < n; ++i) {
    decls.push_back({"L" + std::to_string(i), sicgen::PinKind::LevelInput});
  }
  for (int j = 0; j < m; ++j) {
    decls.push_back({"E" + std::to_string(j), sicgen::PinKind::EdgeInput});
  }
  for (int q = 0; q < k; ++q) {
    decls.push_back({"Q" + std::to_string(q), sicgen::PinKind::Memory});
  }
  std::shuffle(decls.begin(), decls.end(), rng);

  const sicgen::CellShape shape{n, m, k};
  std::vector<sicgen::StateTableRow> rows;
  for (std::uint64_t key = 0; key < shape.key_count(); ++key) {
    if (rng() % 10 < 7) {
      rows.push_back({static_cast<sicgen::RowKey>(key),
                      static_cast<std::uint32_t>(rng() % (1u << k)), 0});
    }
  }
  if (rows.empty()) {
    rows.push_back({0, static_cast<std::uint32_t>(rng() % (1u << k)), 0});
  }
  return sicgen::make_state_table("rand", std::move(decls), rows);
}

/// Upper bound on the minimal duplication total of a strongly connected
/// digraph: ship every surplus unit to the nearest demand with remaining
/// capacity, using this function's own breadth-first distances. Any valid
/// shipping plan bounds the optimum from above.
inline int greedy_duplication_bound(std::uint32_t n,
                                    const std::vector<sicgen::SicEdge>& edges,
                                    const std::vector<int>& imbalance) {
  std::vector<std::vector<int>> dist(n, std::vector<int>(n, -1));
  for (std::uint32_t src = 0; src < n; ++src) {
    std::vector<std::uint32_t> queue = {src};
    dist[src][src] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (const auto& e : edges) {
        if (e.src == queue[head] && dist[src][e.dst] < 0) {
          dist[src][e.dst] = dist[src][e.src] + 1;
          queue.push_back(e.dst);
        }
      }
    }
  }

  std::vector<int> demand(n, 0);
  for (std::uint32_t v = 0; v < n; ++v) {
    if (imbalance[v] < 0) demand[v] = -imbalance[v];
  }
  int cost = 0;
  for (std::uint32_t v = 0; v < n; ++v) {
    for (int unit = 0; unit < imbalance[v]; ++unit) {
      int best = -1;
      for (std::uint32_t w = 0; w < n; ++w) {
        if (demand[w] > 0 && (best < 0 || dist[v][w] < dist[v][best])) {
          best = static_cast<int>(w);
        }
      }
      --demand[best];
      cost += dist[v][best];
    }
  }
  return cost;
}

/// Random strongly connected digraph: a cycle through all vertices plus
/// random chords. Regenerates until the greedy shipping bound certifies
/// that the exhaustive duplication oracle will finish within its budget.
inline sicgen::SicGraph random_scc_graph(std::mt19937& rng, int max_vertices = 8,
                                         int max_edges = 20,
                                         int max_greedy_bound = 12) {
  const sicgen::CellShape shape{3, 0, 1};  // label geometry only
  while (true) {
    const std::uint32_t n = 2 + rng() % (max_vertices - 1);
    std::vector<sicgen::Configuration> vertices;
    for (std::uint32_t v = 0; v < n; ++v) {
      vertices.push_back(sicgen::Configuration{v});
    }
    std::vector<sicgen::SicEdge> edges;
    for (std::uint32_t v = 0; v < n; ++v) {
      edges.push_back({v, (v + 1) % n});
    }
    const int extra_target = static_cast<int>(rng() % 13);
    for (int tries = 0; tries < 64 && static_cast<int>(edges.size()) <
                                          std::min<int>(max_edges, n + extra_target);
         ++tries) {
      const std::uint32_t a = rng() % n;
      const std::uint32_t b = rng() % n;
      if (a == b) continue;
      const sicgen::SicEdge candidate{a, b};
      if (std::find(edges.begin(), edges.end(), candidate) != edges.end()) {
        continue;
      }
      edges.push_back(candidate);
    }

    std::vector<int> imbalance(n, 0);
    for (const auto& e : edges) {
      --imbalance[e.src];
      ++imbalance[e.dst];
    }
    if (greedy_duplication_bound(n, edges, imbalance) > max_greedy_bound) {
      continue;
    }
    return sicgen::make_graph(shape, std::move(vertices), std::move(edges));
  }
}

}  // namespace testutil
