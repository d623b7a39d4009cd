#ifndef TOPOGEN_DEGREE_SELECT_HPP_
#define TOPOGEN_DEGREE_SELECT_HPP_

// Constant-degree induced subgraphs. For a bound beta and degree c the
// program is
//
//   maximize   sum_u x(u)
//   subject to c * x(u) <= sum_{v in N(u)} x(v) <= c + m * (1 - x(u))
//
// with m the maximum degree of G_beta. A selected node therefore has exactly
// c selected neighbors; for an unselected node both sides are vacuous.

#include <stdexcept>
#include <string>
#include <vector>

#include "topogen/graph.hpp"
#include "topogen/ilp.hpp"

namespace topogen {

struct DegreeSelection {
  double beta = 0.0;
  int c = 0;
  NodeSet selected;
  std::vector<NodeSet> components;  // of the induced subgraph, largest first
  std::size_t objective = 0;
};

inline std::size_t max_degree(const BoundedGraph& graph) {
  std::size_t m = 0;
  for (std::size_t i = 0; i < graph.size(); ++i) m = std::max(m, graph.adjacent(i).size());
  return m;
}

/// One variable per node (in node-id order, named x<id>) and two inequalities
/// per node:
///   c*x(u) - sum x(v) <= 0
///   sum x(v) + m*x(u) <= c + m
inline ilp::BinaryProgram build_degree_program(const BoundedGraph& graph, int c) {
  if (c < 1) throw InputError("target degree c must be at least 1");
  const auto m = static_cast<std::int64_t>(max_degree(graph));
  ilp::BinaryProgram program(ilp::Sense::kMaximize);
  for (NodeId id : graph.nodes()) program.add_variable("x" + std::to_string(id), 1);
  for (std::size_t u = 0; u < graph.size(); ++u) {
    const std::string tag = std::to_string(graph.nodes()[u]);
    std::vector<ilp::Term> lower{{u, c}};
    std::vector<ilp::Term> upper{{u, m}};
    for (std::size_t v : graph.adjacent(u)) {
      lower.push_back({v, -1});
      upper.push_back({v, 1});
    }
    program.add_constraint(std::move(lower), ilp::Comparator::kLessEqual, 0, "deg_lo_" + tag);
    program.add_constraint(std::move(upper), ilp::Comparator::kLessEqual, c + m, "deg_hi_" + tag);
  }
  return program;
}

/// True when every selected node has exactly `c` selected neighbors.
inline bool is_c_regular(const BoundedGraph& graph, const NodeSet& selected, int c) {
  for (NodeId u : selected) {
    std::size_t count = 0;
    for (std::size_t v : graph.adjacent(graph.require_index(u))) {
      if (contains(selected, graph.nodes()[v])) ++count;
    }
    if (count != static_cast<std::size_t>(c)) return false;
  }
  return true;
}

/// Solves the degree program on one graph.
inline DegreeSelection select_on_graph(const BoundedGraph& graph, int c, const ilp::SolveOptions& options = {}) {
  const auto program = build_degree_program(graph, c);
  const auto solution = ilp::solve(program, options);
  // x = 0 everywhere is always feasible.
  if (!solution.optimal()) throw std::logic_error("degree program reported infeasible");
  DegreeSelection out{graph.beta(), c, {}, {}, 0};
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (solution.assignment[i]) out.selected.push_back(graph.nodes()[i]);
  }
  out.objective = out.selected.size();
  if (!is_c_regular(graph, out.selected, c)) {
    throw std::logic_error("selection at beta " + std::to_string(graph.beta()) + " is not " + std::to_string(c) +
                           "-regular");
  }
  out.components = connected_components(induced_subgraph(graph, out.selected));
  return out;
}

/// Runs the degree program on every grid graph and keeps the nonempty
/// selections, ordered by beta.
inline std::vector<DegreeSelection> select_constant_degree(const LossMatrix& matrix, int c, const GraphFamily& family,
                                                           const ilp::SolveOptions& options = {}) {
  if (c < 1) throw InputError("target degree c must be at least 1");
  const auto pairs = symmetric_pairs(matrix);
  std::vector<DegreeSelection> out;
  std::vector<Edge> previous_edges;
  for (double beta : family.grid()) {
    const auto graph = neighborhood_graph(matrix.nodes(), pairs, beta);
    auto edges = graph.edges();
    if (!std::includes(edges.begin(), edges.end(), previous_edges.begin(), previous_edges.end())) {
      throw std::logic_error("edge set shrank at beta " + std::to_string(beta));
    }
    previous_edges = std::move(edges);
    auto selection = select_on_graph(graph, c, options);
    if (selection.objective > 0) out.push_back(std::move(selection));
  }
  return out;
}

/// Picks the selection with the largest connected component and restricts it
/// to that component. Ties go to the smaller beta, then to the component with
/// the smaller smallest node id.
inline DegreeSelection largest_component_selection(const std::vector<DegreeSelection>& selections) {
  if (selections.empty()) throw InputError("no selections to choose from");
  const DegreeSelection* best = nullptr;
  const NodeSet* best_component = nullptr;
  for (const auto& s : selections) {
    if (s.components.empty()) continue;
    const NodeSet& comp = s.components.front();
    bool take = best_component == nullptr;
    if (!take) {
      if (comp.size() != best_component->size()) {
        take = comp.size() > best_component->size();
      } else if (s.beta != best->beta) {
        take = s.beta < best->beta;
      } else {
        take = comp.front() < best_component->front();
      }
    }
    if (take) {
      best = &s;
      best_component = &comp;
    }
  }
  if (best == nullptr) return DegreeSelection{selections.front().beta, selections.front().c, {}, {}, 0};
  return DegreeSelection{best->beta, best->c, *best_component, {*best_component}, best_component->size()};
}

}  // namespace topogen

#endif  // TOPOGEN_DEGREE_SELECT_HPP_
