#ifndef TOPOGEN_TREE_HPP_
#define TOPOGEN_TREE_HPP_

// Layered tree topologies rooted at a chosen node.
//
// A layered tree assigns nodes to hop levels 0..depth around a root. It is
// acceptable when
//   1. it is connected: every level-i node has a G_beta neighbor at level i-1,
//   2. level 0 holds only the root,
//   3. level i holds at least kappa(i) nodes,
//   4. no node at level i has a G_(beta+margin) neighbor at levels 0..i-2,
//      so small channel fluctuations cannot shortcut the layering.

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "topogen/graph.hpp"
#include "topogen/ilp.hpp"

namespace topogen {

/// Required breadth per depth.
class Kappa {
 public:
  enum class Kind { kConstant, kLinear, kTable };

  static Kappa constant(std::size_t k) {
    if (k < 1) throw InputError("constant kappa must be at least 1");
    Kappa out;
    out.kind_ = Kind::kConstant;
    out.constant_ = k;
    return out;
  }

  /// kappa(d) = d + 1
  static Kappa linear() {
    Kappa out;
    out.kind_ = Kind::kLinear;
    return out;
  }

  /// `table[i]` is kappa(i + 1). Depths past the table reuse the last entry.
  static Kappa table(std::vector<std::size_t> table) {
    if (table.empty()) throw InputError("kappa table must not be empty");
    for (auto v : table) {
      if (v < 1) throw InputError("kappa table entries must be at least 1");
    }
    Kappa out;
    out.kind_ = Kind::kTable;
    out.table_ = std::move(table);
    return out;
  }

  /// Parses `const:K`, `linear` or `table:1=2,2=3,...` (depths 1..n, each once).
  static Kappa parse(std::string_view text) {
    if (text == "linear") return linear();
    auto number = [&](std::string_view s) {
      std::size_t v = 0;
      if (!detail::parse_number(s, v)) throw InputError("bad number '" + std::string(s) + "' in kappa spec");
      return v;
    };
    if (text.starts_with("const:")) return constant(number(text.substr(6)));
    if (text.starts_with("table:")) {
      std::map<std::size_t, std::size_t> entries;
      std::string_view rest = text.substr(6);
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string_view item = rest.substr(0, comma);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) throw InputError("kappa table item '" + std::string(item) + "' lacks '='");
        const std::size_t depth = number(item.substr(0, eq));
        if (!entries.emplace(depth, number(item.substr(eq + 1))).second) {
          throw InputError("kappa table repeats depth " + std::to_string(depth));
        }
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      }
      std::vector<std::size_t> values;
      for (const auto& [depth, value] : entries) {
        if (depth != values.size() + 1) throw InputError("kappa table depths must be 1..n without gaps");
        values.push_back(value);
      }
      return table(std::move(values));
    }
    throw InputError("unknown kappa spec '" + std::string(text) + "' (expected const:K, linear or table:...)");
  }

  std::size_t operator()(std::size_t depth) const {
    switch (kind_) {
      case Kind::kConstant:
        return constant_;
      case Kind::kLinear:
        return depth + 1;
      case Kind::kTable:
        return depth == 0 ? 1 : table_[std::min(depth, table_.size()) - 1];
    }
    return 1;
  }

  Kind kind() const { return kind_; }

  std::string to_string() const {
    switch (kind_) {
      case Kind::kConstant:
        return "const:" + std::to_string(constant_);
      case Kind::kLinear:
        return "linear";
      case Kind::kTable: {
        std::string out = "table:";
        for (std::size_t i = 0; i < table_.size(); ++i) {
          if (i) out += ',';
          out += std::to_string(i + 1) + '=' + std::to_string(table_[i]);
        }
        return out;
      }
    }
    return "linear";
  }

 private:
  Kind kind_ = Kind::kLinear;
  std::size_t constant_ = 1;
  std::vector<std::size_t> table_;
};

struct LayeredTree {
  NodeId root = 0;
  double beta = 0.0;
  double margin = 0.0;
  std::vector<NodeSet> levels;  // levels[0] == {root}
  std::size_t depth = 0;        // == levels.size() - 1

  std::size_t node_count() const {
    std::size_t n = 0;
    for (const auto& l : levels) n += l.size();
    return n;
  }

  NodeSet all_nodes() const {
    NodeSet out;
    for (const auto& l : levels) out.insert(out.end(), l.begin(), l.end());
    normalize(out);
    return out;
  }
};

namespace detail {

// Layer construction on prebuilt graphs. `strong` is G_(beta+margin) over the
// same node list as `graph`.
inline LayeredTree monitored_bfs(const BoundedGraph& graph, const BoundedGraph& strong, NodeId root, double margin,
                                 const Kappa& kappa) {
  const std::size_t n = graph.size();
  constexpr std::size_t kUnplaced = static_cast<std::size_t>(-1);
  std::vector<std::size_t> level_of(n, kUnplaced);
  const std::size_t r = graph.require_index(root);
  level_of[r] = 0;
  std::vector<std::vector<std::size_t>> levels{{r}};
  std::size_t depth = 0;
  while (true) {
    std::vector<std::size_t> next;
    for (std::size_t u : levels[depth]) {
      for (std::size_t v : graph.adjacent(u)) {
        if (level_of[v] != kUnplaced) continue;  // already in levels 0..depth+1
        bool weak = true;
        for (std::size_t w : strong.adjacent(v)) {
          if (level_of[w] != kUnplaced && level_of[w] + 1 < depth + 1) {
            weak = false;
            break;
          }
        }
        if (weak) {
          level_of[v] = depth + 1;
          next.push_back(v);
        }
      }
    }
    ++depth;
    if (next.size() < kappa(depth)) {
      for (std::size_t v : next) level_of[v] = kUnplaced;
      break;
    }
    std::sort(next.begin(), next.end());
    levels.push_back(std::move(next));
  }
  LayeredTree tree{root, graph.beta(), margin, {}, depth - 1};
  for (const auto& level : levels) {
    NodeSet ids;
    for (std::size_t i : level) ids.push_back(graph.nodes()[i]);
    tree.levels.push_back(std::move(ids));
  }
  return tree;
}

}  // namespace detail

/// Breadth-first layering from `root` over G_beta. A candidate joins level
/// d+1 only if it has no G_(beta+margin) neighbor in levels 0..d-1. Growth
/// stops at the first level with fewer than kappa(level) nodes; that level is
/// dropped.
inline LayeredTree monitored_bfs(const LossMatrix& matrix, NodeId root, double beta, double margin,
                                 const Kappa& kappa) {
  if (!matrix.has_node(root)) throw InputError("unknown root node " + std::to_string(root));
  if (!(margin >= 0.0)) throw InputError("margin must be non-negative");
  const auto pairs = symmetric_pairs(matrix);
  return detail::monitored_bfs(neighborhood_graph(matrix.nodes(), pairs, beta),
                               neighborhood_graph(matrix.nodes(), pairs, beta + margin), root, margin, kappa);
}

/// Deepest first, then fewer nodes, smaller beta, smaller root.
inline bool tree_order(const LayeredTree& a, const LayeredTree& b) {
  if (a.depth != b.depth) return a.depth > b.depth;
  if (a.node_count() != b.node_count()) return a.node_count() < b.node_count();
  if (a.beta != b.beta) return a.beta < b.beta;
  return a.root < b.root;
}

/// One tree for every (beta, root) combination, best first.
inline std::vector<LayeredTree> sweep_trees(const LossMatrix& matrix, const Kappa& kappa, double margin,
                                            const GraphFamily& family) {
  if (!(margin >= 0.0)) throw InputError("margin must be non-negative");
  const auto pairs = symmetric_pairs(matrix);
  std::vector<LayeredTree> out;
  for (double beta : family.grid()) {
    const auto graph = neighborhood_graph(matrix.nodes(), pairs, beta);
    const auto strong = neighborhood_graph(matrix.nodes(), pairs, beta + margin);
    for (NodeId root : matrix.nodes()) out.push_back(detail::monitored_bfs(graph, strong, root, margin, kappa));
  }
  std::stable_sort(out.begin(), out.end(), tree_order);
  return out;
}

/// Node-reduction program. Variables are the nodes of levels 1..depth in
/// level order (named x<id>); the root is the constant 1.
///   minimize   sum x(u)
///   subject to sum_{u in level i} x(u) >= kappa(i)                 for each i
///              x(u) <= sum_{v in level i-1, v ~ u} x(v)             for each u
inline ilp::BinaryProgram build_reduction_program(const LayeredTree& tree, const BoundedGraph& graph,
                                                  const Kappa& kappa) {
  ilp::BinaryProgram program(ilp::Sense::kMinimize);
  std::map<NodeId, std::size_t> var;
  for (std::size_t i = 1; i < tree.levels.size(); ++i) {
    for (NodeId u : tree.levels[i]) var[u] = program.add_variable("x" + std::to_string(u), 1);
  }
  for (std::size_t i = 1; i < tree.levels.size(); ++i) {
    std::vector<ilp::Term> breadth;
    for (NodeId u : tree.levels[i]) breadth.push_back({var.at(u), 1});
    program.add_constraint(std::move(breadth), ilp::Comparator::kGreaterEqual,
                           static_cast<std::int64_t>(kappa(i)), "breadth_" + std::to_string(i));
    for (NodeId u : tree.levels[i]) {
      std::vector<ilp::Term> parent{{var.at(u), 1}};
      std::int64_t constant = 0;
      for (NodeId v : tree.levels[i - 1]) {
        if (!graph.has_edge(u, v)) continue;
        if (i == 1) {
          constant += 1;
        } else {
          parent.push_back({var.at(v), -1});
        }
      }
      program.add_constraint(std::move(parent), ilp::Comparator::kLessEqual, constant,
                             "parent_" + std::to_string(u));
    }
  }
  return program;
}

/// One violated requirement.
struct Violation {
  int requirement = 0;  // 1..4
  std::string detail;
  NodeSet nodes;
  std::vector<Edge> links;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Re-checks the four requirements of `tree` against `fresh` at the tree's
/// beta and margin.
inline ValidationReport revalidate(const LayeredTree& tree, const LossMatrix& fresh, const Kappa& kappa) {
  const NodeSet members = tree.all_nodes();
  NodeSet missing;
  for (NodeId id : members) {
    if (!fresh.has_node(id)) missing.push_back(id);
  }
  if (!missing.empty()) throw InputError("fresh matrix lacks tree nodes " + join_ids(missing));

  ValidationReport report;
  const auto pairs = symmetric_pairs(fresh);
  const auto graph = neighborhood_graph(fresh.nodes(), pairs, tree.beta);
  const auto strong = neighborhood_graph(fresh.nodes(), pairs, tree.beta + tree.margin);
  auto worse_loss = [&](NodeId a, NodeId b) {
    auto ab = fresh.loss(a, b);
    auto ba = fresh.loss(b, a);
    if (!ab || !ba) return std::numeric_limits<double>::infinity();
    return std::max(*ab, *ba);
  };

  if (tree.levels.empty() || tree.levels[0].size() != 1 || tree.levels[0][0] != tree.root) {
    report.violations.push_back({2, "level 0 must consist of the root alone", tree.levels.empty() ? NodeSet{} : tree.levels[0], {}});
  }

  // Requirement 1: a parent link at beta for every non-root node.
  std::map<NodeId, std::size_t> level_of;
  for (std::size_t i = 0; i < tree.levels.size(); ++i) {
    for (NodeId v : tree.levels[i]) level_of[v] = i;
  }
  std::vector<std::size_t> connected(tree.levels.size(), 0);
  if (!tree.levels.empty()) connected[0] = tree.levels[0].size();
  for (std::size_t i = 1; i < tree.levels.size(); ++i) {
    for (NodeId v : tree.levels[i]) {
      bool has_parent = false;
      std::optional<Edge> closest;
      double closest_loss = std::numeric_limits<double>::infinity();
      for (NodeId u : tree.levels[i - 1]) {
        if (graph.has_edge(u, v)) {
          has_parent = true;
          break;
        }
        const double l = worse_loss(u, v);
        if (!closest || l < closest_loss) {
          closest = Edge{std::min(u, v), std::max(u, v)};
          closest_loss = l;
        }
      }
      if (has_parent) {
        ++connected[i];
        continue;
      }
      Violation violation{1, "node " + std::to_string(v) + " at level " + std::to_string(i) +
                                  " has no link within beta to level " + std::to_string(i - 1),
                          {v}, {}};
      if (closest) {
        violation.links.push_back(*closest);
        violation.detail += " (closest link " + std::to_string(closest->first) + "-" +
                            std::to_string(closest->second) + " at " + detail::format_double(closest_loss) + " dB)";
      }
      report.violations.push_back(std::move(violation));
    }
  }

  // Requirement 3: breadth counted over nodes that still have a parent.
  for (std::size_t i = 1; i < tree.levels.size(); ++i) {
    if (connected[i] < kappa(i)) {
      report.violations.push_back({3, "level " + std::to_string(i) + " keeps " + std::to_string(connected[i]) +
                                          " connected nodes, requires " + std::to_string(kappa(i)),
                                   tree.levels[i], {}});
    }
  }

  // Requirement 4: no strong link skipping a level.
  for (std::size_t i = 2; i < tree.levels.size(); ++i) {
    for (NodeId v : tree.levels[i]) {
      for (std::size_t w : strong.adjacent(strong.require_index(v))) {
        const NodeId other = strong.nodes()[w];
        auto it = level_of.find(other);
        if (it == level_of.end() || it->second + 2 > i) continue;
        report.violations.push_back({4, "link " + std::to_string(other) + "-" + std::to_string(v) + " at " +
                                            detail::format_double(worse_loss(other, v)) +
                                            " dB is within beta+margin and joins levels " +
                                            std::to_string(it->second) + " and " + std::to_string(i),
                                     {other, v}, {Edge{std::min(other, v), std::max(other, v)}}});
      }
    }
  }
  return report;
}

/// Smallest subset of the tree's nodes that keeps its depth and all four
/// requirements.
inline LayeredTree reduce_tree(const LayeredTree& tree, const LossMatrix& matrix, const Kappa& kappa,
                               const ilp::SolveOptions& options = {}) {
  const auto graph = neighborhood_graph(matrix, tree.beta);
  const auto program = build_reduction_program(tree, graph, kappa);
  const auto solution = ilp::solve(program, options);
  if (!solution.optimal()) throw InputError("reduction infeasible: tree does not satisfy its kappa requirement");
  LayeredTree reduced{tree.root, tree.beta, tree.margin, {tree.levels.front()}, tree.depth};
  std::size_t var = 0;
  for (std::size_t i = 1; i < tree.levels.size(); ++i) {
    NodeSet level;
    for (NodeId u : tree.levels[i]) {
      if (solution.assignment[var++]) level.push_back(u);
    }
    reduced.levels.push_back(std::move(level));
  }
  if (!revalidate(reduced, matrix, kappa).ok()) {
    throw std::logic_error("reduced tree violates its requirements");
  }
  return reduced;
}

}  // namespace topogen

#endif  // TOPOGEN_TREE_HPP_
