#ifndef TOPOGEN_GRAPH_HPP_
#define TOPOGEN_GRAPH_HPP_

// Neighborhood graphs G_beta over a loss matrix: {a,b} is an edge iff both
// directed losses exist and are <= beta.

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "topogen/common.hpp"
#include "topogen/measurement.hpp"

namespace topogen {

using Edge = std::pair<NodeId, NodeId>;  // first < second

class BoundedGraph {
 public:
  BoundedGraph() = default;

  /// Builds a graph from explicit edges. Edge endpoints must be in `nodes`.
  BoundedGraph(double beta, NodeSet nodes, const std::vector<Edge>& edges) : beta_(beta), nodes_(std::move(nodes)) {
    normalize(nodes_);
    adjacency_.assign(nodes_.size(), {});
    for (const auto& [a, b] : edges) {
      if (a == b) throw InputError("self-loop on node " + std::to_string(a));
      const std::size_t ia = require_index(a);
      const std::size_t ib = require_index(b);
      adjacency_[ia].push_back(ib);
      adjacency_[ib].push_back(ia);
    }
    for (auto& list : adjacency_) {
      std::sort(list.begin(), list.end());
      list.erase(std::unique(list.begin(), list.end()), list.end());
    }
  }

  double beta() const { return beta_; }
  const NodeSet& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }

  std::optional<std::size_t> index_of(NodeId id) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id);
    if (it == nodes_.end() || *it != id) return std::nullopt;
    return static_cast<std::size_t>(it - nodes_.begin());
  }

  std::size_t require_index(NodeId id) const {
    if (auto idx = index_of(id)) return *idx;
    throw InputError("unknown node " + std::to_string(id));
  }

  /// Neighbor indices of the node at `index`, ascending.
  const std::vector<std::size_t>& adjacent(std::size_t index) const { return adjacency_[index]; }

  std::size_t degree(NodeId id) const { return adjacency_[require_index(id)].size(); }

  bool has_edge(NodeId a, NodeId b) const {
    auto ia = index_of(a);
    auto ib = index_of(b);
    if (!ia || !ib) return false;
    const auto& list = adjacency_[*ia];
    return std::binary_search(list.begin(), list.end(), *ib);
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (std::size_t i = 0; i < adjacency_.size(); ++i) {
      for (std::size_t j : adjacency_[i]) {
        if (i < j) out.emplace_back(nodes_[i], nodes_[j]);
      }
    }
    return out;
  }

  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (const auto& list : adjacency_) twice += list.size();
    return twice / 2;
  }

 private:
  double beta_ = 0.0;
  NodeSet nodes_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

/// An undirected pair together with the worse of its two directed losses.
struct PairBound {
  NodeId a = 0;
  NodeId b = 0;
  double loss = 0.0;
};

/// Every pair measured in both directions. An edge {a,b} exists in G_beta
/// exactly when `loss <= beta`.
inline std::vector<PairBound> symmetric_pairs(const LossMatrix& matrix) {
  std::vector<PairBound> out;
  for (const auto& [pair, stats] : matrix.entries()) {
    if (pair.first >= pair.second) continue;
    if (const auto* back = matrix.find(pair.second, pair.first)) {
      out.push_back({pair.first, pair.second, std::max(stats.mean_loss, back->mean_loss)});
    }
  }
  return out;
}

inline BoundedGraph neighborhood_graph(const NodeSet& nodes, const std::vector<PairBound>& pairs, double beta) {
  std::vector<Edge> edges;
  for (const auto& p : pairs) {
    if (p.loss <= beta) edges.emplace_back(p.a, p.b);
  }
  return BoundedGraph(beta, nodes, edges);
}

/// G_beta over all matrix nodes, isolated ones included.
inline BoundedGraph neighborhood_graph(const LossMatrix& matrix, double beta) {
  return neighborhood_graph(matrix.nodes(), symmetric_pairs(matrix), beta);
}

/// N(u, beta): neighbors of `u` in the graph.
inline NodeSet bounded_neighbors(const BoundedGraph& graph, NodeId u) {
  NodeSet out;
  for (std::size_t j : graph.adjacent(graph.require_index(u))) out.push_back(graph.nodes()[j]);
  return out;
}

inline BoundedGraph induced_subgraph(const BoundedGraph& graph, const NodeSet& keep) {
  std::vector<Edge> edges;
  for (const auto& e : graph.edges()) {
    if (contains(keep, e.first) && contains(keep, e.second)) edges.push_back(e);
  }
  NodeSet nodes;
  for (NodeId id : keep) {
    if (graph.index_of(id)) nodes.push_back(id);
  }
  return BoundedGraph(graph.beta(), nodes, edges);
}

/// The grid of link-budget bounds to evaluate. Defaults cover every budget an
/// AT86RF231 can realize.
struct GraphFamily {
  double beta_min = 31.0;
  double beta_max = 104.0;
  double step = 1.0;

  void validate() const {
    if (!std::isfinite(beta_min) || !std::isfinite(beta_max) || !(beta_min <= beta_max)) {
      throw InputError("beta grid requires beta_min <= beta_max");
    }
    if (!(step > 0.0)) throw InputError("beta grid step must be positive");
  }

  std::vector<double> grid() const {
    validate();
    const auto count = static_cast<std::size_t>(std::floor((beta_max - beta_min) / step + 1e-9)) + 1;
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(beta_min + static_cast<double>(i) * step);
    return out;
  }

  bool covers(double beta) const { return beta >= beta_min && beta <= beta_max; }
};

/// beta -> ascending list of node degrees, one per node.
using DegreeDistribution = std::map<double, std::vector<std::size_t>>;

inline DegreeDistribution degree_distribution(const LossMatrix& matrix, const GraphFamily& family) {
  const auto pairs = symmetric_pairs(matrix);
  DegreeDistribution out;
  for (double beta : family.grid()) {
    const auto graph = neighborhood_graph(matrix.nodes(), pairs, beta);
    std::vector<std::size_t> degrees;
    degrees.reserve(graph.size());
    for (std::size_t i = 0; i < graph.size(); ++i) degrees.push_back(graph.adjacent(i).size());
    std::sort(degrees.begin(), degrees.end());
    out.emplace(beta, std::move(degrees));
  }
  return out;
}

/// Maximal connected node sets, largest first; equal sizes ordered by their
/// smallest node id.
inline std::vector<NodeSet> connected_components(const BoundedGraph& graph) {
  std::vector<NodeSet> components;
  std::vector<bool> seen(graph.size(), false);
  for (std::size_t start = 0; start < graph.size(); ++start) {
    if (seen[start]) continue;
    NodeSet component;
    std::queue<std::size_t> queue;
    queue.push(start);
    seen[start] = true;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop();
      component.push_back(graph.nodes()[u]);
      for (std::size_t v : graph.adjacent(u)) {
        if (!seen[v]) {
          seen[v] = true;
          queue.push(v);
        }
      }
    }
    normalize(component);
    components.push_back(std::move(component));
  }
  std::stable_sort(components.begin(), components.end(), [](const NodeSet& a, const NodeSet& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.front() < b.front();
  });
  return components;
}

struct EdgeDelta {
  double beta_from = 0.0;
  double beta_to = 0.0;
  std::size_t added = 0;
  std::size_t removed = 0;  // always zero for a well-formed family
};

/// Edge changes between consecutive grid points.
inline std::vector<EdgeDelta> monotonicity_report(const LossMatrix& matrix, const GraphFamily& family) {
  const auto grid = family.grid();
  if (grid.size() < 2) throw InputError("monotonicity report needs at least two grid points");
  const auto pairs = symmetric_pairs(matrix);
  std::vector<EdgeDelta> out;
  auto previous = neighborhood_graph(matrix.nodes(), pairs, grid.front()).edges();
  for (std::size_t i = 1; i < grid.size(); ++i) {
    auto current = neighborhood_graph(matrix.nodes(), pairs, grid[i]).edges();
    std::vector<Edge> diff;
    std::set_difference(current.begin(), current.end(), previous.begin(), previous.end(), std::back_inserter(diff));
    EdgeDelta delta{grid[i - 1], grid[i], diff.size(), 0};
    diff.clear();
    std::set_difference(previous.begin(), previous.end(), current.begin(), current.end(), std::back_inserter(diff));
    delta.removed = diff.size();
    out.push_back(delta);
    previous = std::move(current);
  }
  return out;
}

}  // namespace topogen

#endif  // TOPOGEN_GRAPH_HPP_
