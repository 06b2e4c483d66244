#include "sicgen/dcpw.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>

namespace sicgen {

ImbalanceTable imbalances(const SicGraph& g) {
  ImbalanceTable table;
  const std::size_t n = g.vertices.size();
  table.in_degree.assign(n, 0);
  table.out_degree.assign(n, 0);
  for (const SicEdge& e : g.edges) {
    ++table.out_degree[e.src];
    ++table.in_degree[e.dst];
  }
  table.imbalance.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    table.imbalance[v] = static_cast<std::int32_t>(table.in_degree[v]) -
                         static_cast<std::int32_t>(table.out_degree[v]);
  }
  return table;
}

DistanceMatrix all_pairs_shortest(const SicGraph& g) {
  const std::uint32_t n = static_cast<std::uint32_t>(g.vertices.size());
  DistanceMatrix m;
  m.order = n;
  m.distance.assign(static_cast<std::size_t>(n) * n, -1);
  m.into_edge.assign(static_cast<std::size_t>(n) * n, -1);

  std::vector<std::uint32_t> queue(n);
  for (std::uint32_t src = 0; src < n; ++src) {
    std::int32_t* dist = m.distance.data() + static_cast<std::size_t>(src) * n;
    std::int32_t* into = m.into_edge.data() + static_cast<std::size_t>(src) * n;
    dist[src] = 0;
    std::size_t head = 0, tail = 0;
    queue[tail++] = src;
    while (head < tail) {
      const std::uint32_t v = queue[head++];
      for (std::uint32_t e = g.first_out[v]; e < g.first_out[v + 1]; ++e) {
        const std::uint32_t w = g.edges[e].dst;
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          into[w] = static_cast<std::int32_t>(e);
          queue[tail++] = w;
        }
      }
    }
    if (tail != n) {
      throw ConnectivityError(
          "graph is not strongly connected: vertex " +
          g.shape.format_label(g.vertices[src]) + " cannot reach all vertices");
    }
  }
  return m;
}

namespace {

// Successive-shortest-path min cost flow on the transportation network:
// Dijkstra over reduced costs with per-node potentials. Arc costs are
// non-negative, so zero initial potentials are valid. Arc k and k^1 are a
// forward/residual pair.
class FlowNetwork {
 public:
  explicit FlowNetwork(std::uint32_t node_count)
      : adjacency_(node_count), node_count_(node_count) {}

  void add_arc(std::uint32_t from, std::uint32_t to, std::int64_t capacity,
               std::int64_t cost) {
    adjacency_[from].push_back(static_cast<std::uint32_t>(arcs_.size()));
    arcs_.push_back({from, to, capacity, cost});
    adjacency_[to].push_back(static_cast<std::uint32_t>(arcs_.size()));
    arcs_.push_back({to, from, 0, -cost});
  }

  // Returns total flow shipped from source to sink at minimum cost.
  std::int64_t run(std::uint32_t source, std::uint32_t sink) {
    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
    const std::uint32_t n = node_count_;
    std::vector<std::int64_t> potential(n, 0);
    std::vector<std::int64_t> dist(n);
    std::vector<std::int32_t> pred(n);
    // (distance, node): equal distances pop in node order, keeping the
    // chosen paths deterministic.
    using HeapEntry = std::pair<std::int64_t, std::uint32_t>;
    std::int64_t shipped = 0;

    while (true) {
      dist.assign(n, kInf);
      pred.assign(n, -1);
      dist[source] = 0;
      std::priority_queue<HeapEntry, std::vector<HeapEntry>,
                          std::greater<HeapEntry>>
          heap;
      heap.push({0, source});
      while (!heap.empty()) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[v]) continue;
        for (std::uint32_t a : adjacency_[v]) {
          const Arc& arc = arcs_[a];
          if (arc.residual <= 0) continue;
          const std::int64_t reduced =
              d + arc.cost + potential[v] - potential[arc.to];
          if (reduced < dist[arc.to]) {
            dist[arc.to] = reduced;
            pred[arc.to] = static_cast<std::int32_t>(a);
            heap.push({reduced, arc.to});
          }
        }
      }
      if (pred[sink] < 0) break;
      for (std::uint32_t v = 0; v < n; ++v) {
        if (dist[v] < kInf) potential[v] += dist[v];
      }

      std::int64_t bottleneck = kInf;
      for (std::int32_t a = pred[sink]; a >= 0; a = pred[arcs_[a].from]) {
        bottleneck = std::min(bottleneck, arcs_[a].residual);
        if (arcs_[a].from == source) break;
      }
      for (std::int32_t a = pred[sink]; a >= 0; a = pred[arcs_[a].from]) {
        arcs_[a].residual -= bottleneck;
        arcs_[a ^ 1].residual += bottleneck;
        if (arcs_[a].from == source) break;
      }
      shipped += bottleneck;
    }
    return shipped;
  }

  // Flow pushed through forward arc id (arcs are created in add_arc order).
  std::int64_t flow(std::size_t arc_id) const {
    return arcs_[2 * arc_id + 1].residual;
  }

 private:
  struct Arc {
    std::uint32_t from = 0;
    std::uint32_t to = 0;
    std::int64_t residual = 0;
    std::int64_t cost = 0;
  };

  std::vector<Arc> arcs_;
  std::vector<std::vector<std::uint32_t>> adjacency_;
  std::uint32_t node_count_;
};

}  // namespace

Augmentation min_cost_augmentation(const SicGraph& g, const ImbalanceTable& imb,
                                   const DistanceMatrix& dist) {
  Augmentation aug;
  aug.duplication.assign(g.edges.size(), 0);

  std::vector<std::pair<std::uint32_t, std::int64_t>> supplies;  // excess in
  std::vector<std::pair<std::uint32_t, std::int64_t>> demands;   // excess out
  std::int64_t total_supply = 0;
  for (std::uint32_t v = 0; v < imb.imbalance.size(); ++v) {
    if (imb.imbalance[v] > 0) {
      supplies.emplace_back(v, imb.imbalance[v]);
      total_supply += imb.imbalance[v];
    } else if (imb.imbalance[v] < 0) {
      demands.emplace_back(v, -imb.imbalance[v]);
    }
  }
  if (supplies.empty() && demands.empty()) return aug;
  if (supplies.empty() != demands.empty()) {
    throw std::invalid_argument("imbalances do not sum to zero");
  }

  const std::uint32_t s = static_cast<std::uint32_t>(supplies.size());
  const std::uint32_t d = static_cast<std::uint32_t>(demands.size());
  const std::uint32_t source = s + d;
  const std::uint32_t sink = s + d + 1;
  FlowNetwork net(s + d + 2);
  for (std::uint32_t i = 0; i < s; ++i) {
    net.add_arc(source, i, supplies[i].second, 0);
  }
  std::size_t first_ship_arc = s;
  for (std::uint32_t i = 0; i < s; ++i) {
    for (std::uint32_t j = 0; j < d; ++j) {
      net.add_arc(i, s + j, total_supply,
                  dist.at(supplies[i].first, demands[j].first));
    }
  }
  for (std::uint32_t j = 0; j < d; ++j) {
    net.add_arc(s + j, sink, demands[j].second, 0);
  }

  const std::int64_t shipped = net.run(source, sink);
  if (shipped != total_supply) {
    throw std::invalid_argument("transportation problem infeasible");
  }

  // Duplicate the shortest u -> v path once per shipped unit, walking the
  // source-rooted tree backwards from v.
  for (std::uint32_t i = 0; i < s; ++i) {
    for (std::uint32_t j = 0; j < d; ++j) {
      const std::int64_t f =
          net.flow(first_ship_arc + static_cast<std::size_t>(i) * d + j);
      if (f == 0) continue;
      const std::uint32_t u = supplies[i].first;
      std::uint32_t v = demands[j].first;
      std::int32_t hops = 0;
      while (v != u) {
        const std::int32_t e =
            dist.into_edge[static_cast<std::size_t>(u) * dist.order + v];
        aug.duplication[e] += static_cast<std::uint32_t>(f);
        v = g.edges[e].src;
        ++hops;
      }
      if (hops != dist.at(u, demands[j].first)) {
        throw std::logic_error("shortest-path tree disagrees with distances");
      }
      aug.total_added += static_cast<std::uint64_t>(f) * hops;
    }
  }
  return aug;
}

PostmanWalk eulerian_circuit(const SicGraph& g, const Augmentation& aug,
                             std::uint32_t start_vertex) {
  const std::uint32_t n = static_cast<std::uint32_t>(g.vertices.size());
  if (aug.duplication.size() != g.edges.size()) {
    throw std::invalid_argument("augmentation does not match graph");
  }
  if (start_vertex >= n) {
    throw std::invalid_argument("start vertex out of range");
  }

  std::vector<std::uint64_t> out_m(n, 0), in_m(n, 0);
  std::uint64_t instance_count = 0;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const std::uint64_t copies = 1 + aug.duplication[e];
    out_m[g.edges[e].src] += copies;
    in_m[g.edges[e].dst] += copies;
    instance_count += copies;
  }
  for (std::uint32_t v = 0; v < n; ++v) {
    if (out_m[v] != in_m[v]) {
      throw std::invalid_argument(
          "multigraph is not balanced at vertex " +
          g.shape.format_label(g.vertices[v]));
    }
  }
  if (out_m[start_vertex] == 0) {
    throw std::invalid_argument("start vertex has no outgoing edges");
  }

  // Edge instances per vertex, ascending edge id (duplicates adjacent).
  std::vector<std::uint64_t> first_instance(n + 1, 0);
  for (std::uint32_t v = 0; v < n; ++v) {
    first_instance[v + 1] = first_instance[v] + out_m[v];
  }
  std::vector<std::uint32_t> instances(instance_count);
  {
    std::vector<std::uint64_t> cursor = first_instance;
    for (std::uint32_t v = 0; v < n; ++v) {
      for (std::uint32_t e = g.first_out[v]; e < g.first_out[v + 1]; ++e) {
        for (std::uint32_t c = 0; c <= aug.duplication[e]; ++c) {
          instances[cursor[v]++] = e;
        }
      }
    }
  }

  // Hierholzer with an explicit stack; cycles splice themselves in because
  // finished vertices emit their incoming edge in reverse order.
  std::vector<std::uint64_t> next_unused = first_instance;
  struct Visit {
    std::uint32_t vertex;
    std::int64_t incoming;  // edge id that led here, -1 for the start
  };
  std::vector<Visit> stack;
  stack.push_back({start_vertex, -1});
  PostmanWalk walk;
  walk.start_vertex = start_vertex;
  walk.traversals.reserve(instance_count);
  while (!stack.empty()) {
    const Visit top = stack.back();
    if (next_unused[top.vertex] < first_instance[top.vertex + 1]) {
      const std::uint32_t e = instances[next_unused[top.vertex]++];
      stack.push_back({g.edges[e].dst, e});
    } else {
      if (top.incoming >= 0) {
        walk.traversals.push_back(static_cast<std::uint32_t>(top.incoming));
      }
      stack.pop_back();
    }
  }
  std::reverse(walk.traversals.begin(), walk.traversals.end());

  if (walk.traversals.size() != instance_count) {
    throw std::invalid_argument(
        "multigraph edges are not reachable from the start vertex; graph is "
        "not strongly connected");
  }
  return walk;
}

PostmanWalk dcpw(const SicGraph& g) {
  if (g.vertices.empty() || g.edges.empty()) {
    throw std::invalid_argument("graph has no edges to cover");
  }
  const ImbalanceTable imb = imbalances(g);
  const DistanceMatrix dist = all_pairs_shortest(g);
  const Augmentation aug = min_cost_augmentation(g, imb, dist);

  std::uint32_t start = 0;
  while (start < g.vertices.size() && g.out_degree(start) == 0) ++start;
  return eulerian_circuit(g, aug, start);
}

void validate_walk(const SicGraph& g, const PostmanWalk& walk) {
  if (walk.traversals.empty()) {
    throw std::logic_error("walk is empty");
  }
  std::vector<bool> covered(g.edges.size(), false);
  std::uint32_t at = walk.start_vertex;
  for (std::uint32_t e : walk.traversals) {
    if (e >= g.edges.size()) {
      throw std::logic_error("walk references edge id out of range");
    }
    if (g.edges[e].src != at) {
      throw std::logic_error("walk traversals are not incident");
    }
    at = g.edges[e].dst;
    covered[e] = true;
  }
  if (at != walk.start_vertex) {
    throw std::logic_error("walk is not closed");
  }
  for (std::size_t e = 0; e < covered.size(); ++e) {
    if (!covered[e]) {
      throw std::logic_error("walk does not cover edge " + std::to_string(e));
    }
  }
}

std::string dump_walk(const SicGraph& g, const PostmanWalk& walk) {
  std::string out;
  for (std::uint32_t e : walk.traversals) {
    out += std::to_string(e);
    out += '\n';
  }
  out += "# length " + std::to_string(walk.length()) + " edges " +
         std::to_string(g.edges.size()) + " repetitions " +
         std::to_string(walk.length() - g.edges.size()) + "\n";
  return out;
}

}  // namespace sicgen
