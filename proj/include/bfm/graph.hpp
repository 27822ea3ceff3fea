#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "bfm/dense.hpp"
#include "bfm/errors.hpp"

namespace bfm {

// Directed sensing graph: edge (i, j) means agent i measures/receives from j.
// Vertices are 0-indexed in code; diagnostics and file formats use 1-indexing.
struct FormationGraph {
  int n = 0;
  int l = 0;
  std::vector<std::pair<int, int>> edges;      // (tail, head) in insertion order
  std::vector<std::vector<int>> neighbor_sets; // per-vertex N_i, edge order

  int followers() const { return n - l; }
  int m() const { return static_cast<int>(edges.size()); }
  bool is_leader(int v) const { return v < l; }

  // Raw factory: bounds, self-loop and duplicate checks only. Used to build
  // graphs that deliberately violate the leader-follower construction rules
  // (e.g. to exercise cycle detection) and for rigidity analysis of arbitrary
  // digraphs.
  static FormationGraph from_edges(int n, int l,
                                   std::vector<std::pair<int, int>> edge_list) {
    if (n <= 0 || l < 0 || l > n)
      throw Error(Fault::BadVertex, "invalid vertex/leader counts n=" +
                                        std::to_string(n) + " l=" + std::to_string(l));
    FormationGraph g;
    g.n = n;
    g.l = l;
    g.neighbor_sets.assign(static_cast<size_t>(n), {});
    for (const auto& [tail, head] : edge_list) {
      if (tail < 0 || tail >= n || head < 0 || head >= n)
        throw Error(Fault::BadVertex,
                    "edge (" + std::to_string(tail + 1) + "," + std::to_string(head + 1) +
                        ") references a vertex outside 1.." + std::to_string(n));
      if (tail == head)
        throw Error(Fault::SelfLoop, "self-loop at vertex " + std::to_string(tail + 1));
      for (const auto& e : g.edges)
        if (e.first == tail && e.second == head)
          throw Error(Fault::DuplicateEdge,
                      "edge (" + std::to_string(tail + 1) + "," +
                          std::to_string(head + 1) + ") repeated");
      g.edges.emplace_back(tail, head);
      g.neighbor_sets[static_cast<size_t>(tail)].push_back(head);
    }
    return g;
  }
};

// Builds the leader-follower graph by follower insertion: vertices 0..l-1 are
// leaders, follower l+k takes its k-th neighbor list, every neighbor strictly
// preceding it. The result is acyclic by construction.
inline FormationGraph build_acyclic_lf_graph(
    int l, const std::vector<std::vector<int>>& follower_neighbor_lists) {
  if (l < 3)
    throw Error(Fault::TooFewLeaders,
                "formation needs at least 3 leaders, got " + std::to_string(l));

  const int n = l + static_cast<int>(follower_neighbor_lists.size());
  FormationGraph g;
  g.n = n;
  g.l = l;
  g.neighbor_sets.assign(static_cast<size_t>(n), {});

  for (size_t k = 0; k < follower_neighbor_lists.size(); ++k) {
    const int i = l + static_cast<int>(k);
    const auto& nbrs = follower_neighbor_lists[k];
    if (nbrs.size() < 3)
      throw Error(Fault::TooFewNeighbors,
                  "follower " + std::to_string(i + 1) + " has " +
                      std::to_string(nbrs.size()) + " neighbors, needs at least 3");
    for (int j : nbrs) {
      if (j < 0 || j >= i)
        throw Error(Fault::ForwardReference,
                    "follower " + std::to_string(i + 1) + " references vertex " +
                        std::to_string(j + 1) + " which does not precede it");
      for (int seen : g.neighbor_sets[static_cast<size_t>(i)])
        if (seen == j)
          throw Error(Fault::DuplicateEdge,
                      "follower " + std::to_string(i + 1) + " lists neighbor " +
                          std::to_string(j + 1) + " twice");
      g.edges.emplace_back(i, j);
      g.neighbor_sets[static_cast<size_t>(i)].push_back(j);
    }
  }
  return g;
}

// Topological order in which every edge points from a later vertex to an
// earlier one; leaders (and generally low indices) come first. Throws
// CycleFound with a witness cycle when no such order exists.
inline std::vector<int> validate_acyclic(const FormationGraph& g) {
  const int n = g.n;
  std::vector<int> unplaced_out(static_cast<size_t>(n), 0);
  std::vector<std::vector<int>> rdeps(static_cast<size_t>(n));
  for (const auto& [tail, head] : g.edges) {
    ++unplaced_out[static_cast<size_t>(tail)];
    rdeps[static_cast<size_t>(head)].push_back(tail);
  }

  // Min-index priority selection keeps the order deterministic and yields the
  // insertion order for construction-conformant graphs.
  std::vector<int> order;
  order.reserve(static_cast<size_t>(n));
  std::vector<bool> placed(static_cast<size_t>(n), false);
  std::vector<int> ready;
  for (int v = 0; v < n; ++v)
    if (unplaced_out[static_cast<size_t>(v)] == 0) ready.push_back(v);

  while (!ready.empty()) {
    std::sort(ready.begin(), ready.end(), std::greater<int>());
    const int v = ready.back();
    ready.pop_back();
    if (placed[static_cast<size_t>(v)]) continue;
    placed[static_cast<size_t>(v)] = true;
    order.push_back(v);
    for (int w : rdeps[static_cast<size_t>(v)])
      if (--unplaced_out[static_cast<size_t>(w)] == 0) ready.push_back(w);
  }

  if (static_cast<int>(order.size()) == n) return order;

  // Stalled: every remaining vertex still has an unplaced out-neighbor, so a
  // walk through unplaced out-neighbors must revisit one, closing a cycle.
  int start = 0;
  while (placed[static_cast<size_t>(start)]) ++start;
  std::vector<int> walk;
  std::vector<int> pos_in_walk(static_cast<size_t>(n), -1);
  int v = start;
  while (pos_in_walk[static_cast<size_t>(v)] < 0) {
    pos_in_walk[static_cast<size_t>(v)] = static_cast<int>(walk.size());
    walk.push_back(v);
    for (int w : g.neighbor_sets[static_cast<size_t>(v)]) {
      if (!placed[static_cast<size_t>(w)]) {
        v = w;
        break;
      }
    }
  }

  std::string cycle;
  for (size_t k = static_cast<size_t>(pos_in_walk[static_cast<size_t>(v)]);
       k < walk.size(); ++k)
    cycle += std::to_string(walk[k] + 1) + ",";
  cycle += std::to_string(v + 1);
  throw Error(Fault::CycleFound, "directed cycle [" + cycle + "]");
}

// m x n incidence matrix: row k has -1 at the tail (sensing agent) of edge k
// and +1 at its head.
inline DenseMatrix incidence_matrix(const FormationGraph& g) {
  DenseMatrix h(g.m(), g.n);
  for (int k = 0; k < g.m(); ++k) {
    h.at(k, g.edges[static_cast<size_t>(k)].first) = -1.0;
    h.at(k, g.edges[static_cast<size_t>(k)].second) = 1.0;
  }
  return h;
}

}  // namespace bfm
