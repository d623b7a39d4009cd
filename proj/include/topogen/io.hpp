#ifndef TOPOGEN_IO_HPP_
#define TOPOGEN_IO_HPP_

// File formats: JSON documents for every artifact the pipeline exchanges,
// DOT for graph drawings, CSV for degree distributions.
//
// Every JSON document carries a "format" tag and a "version". Readers reject
// documents with a different tag.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "topogen/degree_select.hpp"
#include "topogen/graph.hpp"
#include "topogen/measurement.hpp"
#include "topogen/radio.hpp"
#include "topogen/synth.hpp"
#include "topogen/tree.hpp"

namespace topogen::io {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kMatrixFormat = "topogen-loss-matrix";
inline constexpr const char* kPositionsFormat = "topogen-positions";
inline constexpr const char* kSelectionFormat = "topogen-degree-selection";
inline constexpr const char* kTreeFormat = "topogen-layered-tree";
inline constexpr const char* kTreeListFormat = "topogen-layered-tree-list";
inline constexpr const char* kProfileFormat = "topogen-transceiver-profile";
inline constexpr const char* kScenarioFormat = "topogen-scenario";

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

inline std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

inline Json parse_document(const std::string& text, const char* format) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != format) {
    throw InputError(std::string("expected a '") + format + "' document");
  }
  if (doc.value("version", 0) != kFormatVersion) {
    throw InputError(std::string("unsupported ") + format + " version");
  }
  return doc;
}

template <typename F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed document: ") + e.what());
  }
}

inline Json header(const char* format) { return Json{{"format", format}, {"version", kFormatVersion}}; }

// ---------------------------------------------------------------------------
// Loss matrix

inline Json to_json(const LossMatrix& matrix, const Json& meta = Json::object()) {
  Json doc = header(kMatrixFormat);
  doc["channel"] = matrix.channel() ? Json(*matrix.channel()) : Json(nullptr);
  if (!meta.empty()) doc["meta"] = meta;
  doc["nodes"] = matrix.nodes();
  Json entries = Json::array();
  for (const auto& [pair, s] : matrix.entries()) {
    entries.push_back(
        {{"tx", pair.first}, {"rx", pair.second}, {"mean_loss", s.mean_loss}, {"stddev", s.stddev}, {"count", s.count}});
  }
  doc["entries"] = std::move(entries);
  return doc;
}

inline LossMatrix matrix_from_json(const Json& doc) {
  return guarded([&] {
    std::optional<int> channel;
    if (!doc.at("channel").is_null()) channel = doc.at("channel").get<int>();
    LossMatrix matrix(channel);
    for (const auto& id : doc.at("nodes")) matrix.add_node(id.get<NodeId>());
    for (const auto& e : doc.at("entries")) {
      matrix.set_entry(e.at("tx").get<NodeId>(), e.at("rx").get<NodeId>(),
                       {e.at("mean_loss").get<double>(), e.at("stddev").get<double>(), e.at("count").get<std::uint64_t>()});
    }
    return matrix;
  });
}

inline LossMatrix read_matrix(const std::string& text) { return matrix_from_json(parse_document(text, kMatrixFormat)); }

inline LossMatrix load_matrix(const std::filesystem::path& path) {
  try {
    return read_matrix(read_text(path));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Positions

inline Json positions_to_json(const NodePositions& positions) {
  Json doc = header(kPositionsFormat);
  Json list = Json::array();
  for (const auto& [id, p] : positions) list.push_back({{"id", id}, {"x", p.x}, {"y", p.y}, {"z", p.z}});
  doc["positions"] = std::move(list);
  return doc;
}

inline NodePositions positions_from_list(const Json& list) {
  return guarded([&] {
    NodePositions out;
    for (const auto& p : list) {
      out[p.at("id").get<NodeId>()] =
          Position{p.at("x").get<double>(), p.at("y").get<double>(), p.value("z", 0.0)};
    }
    return out;
  });
}

inline NodePositions read_positions(const std::string& text) {
  return positions_from_list(parse_document(text, kPositionsFormat).at("positions"));
}

// ---------------------------------------------------------------------------
// Degree selections

inline Json to_json(const DegreeSelection& s) {
  Json components = Json::array();
  for (const auto& c : s.components) components.push_back(c);
  return Json{{"beta", s.beta},       {"c", s.c},
              {"objective", s.objective}, {"selected", s.selected},
              {"components", std::move(components)}};
}

inline DegreeSelection selection_from_json(const Json& j) {
  return guarded([&] {
    DegreeSelection s;
    s.beta = j.at("beta").get<double>();
    s.c = j.at("c").get<int>();
    s.selected = j.at("selected").get<NodeSet>();
    normalize(s.selected);
    for (const auto& c : j.at("components")) s.components.push_back(c.get<NodeSet>());
    s.objective = s.selected.size();
    return s;
  });
}

inline Json selections_document(int c, const std::vector<DegreeSelection>& all,
                                const std::optional<DegreeSelection>& best) {
  Json doc = header(kSelectionFormat);
  doc["c"] = c;
  doc["best"] = best ? to_json(*best) : Json(nullptr);
  Json list = Json::array();
  for (const auto& s : all) list.push_back(to_json(s));
  doc["selections"] = std::move(list);
  return doc;
}

// ---------------------------------------------------------------------------
// Layered trees

inline Json to_json(const LayeredTree& tree, const Kappa& kappa) {
  Json doc = header(kTreeFormat);
  doc["root"] = tree.root;
  doc["beta"] = tree.beta;
  doc["margin"] = tree.margin;
  doc["kappa"] = kappa.to_string();
  doc["depth"] = tree.depth;
  doc["node_count"] = tree.node_count();
  Json levels = Json::array();
  for (const auto& l : tree.levels) levels.push_back(l);
  doc["levels"] = std::move(levels);
  return doc;
}

struct TreeDocument {
  LayeredTree tree;
  Kappa kappa;
};

inline TreeDocument tree_from_json(const Json& doc) {
  return guarded([&] {
    TreeDocument out{{}, Kappa::parse(doc.at("kappa").get<std::string>())};
    out.tree.root = doc.at("root").get<NodeId>();
    out.tree.beta = doc.at("beta").get<double>();
    out.tree.margin = doc.at("margin").get<double>();
    for (const auto& l : doc.at("levels")) {
      NodeSet level = l.get<NodeSet>();
      normalize(level);
      out.tree.levels.push_back(std::move(level));
    }
    if (out.tree.levels.empty()) throw InputError("tree has no levels");
    out.tree.depth = out.tree.levels.size() - 1;
    if (doc.contains("depth") && doc.at("depth").get<std::size_t>() != out.tree.depth) {
      throw InputError("tree depth does not match its level list");
    }
    return out;
  });
}

inline TreeDocument read_tree(const std::string& text) { return tree_from_json(parse_document(text, kTreeFormat)); }

inline Json tree_list_document(const std::vector<LayeredTree>& trees, const Kappa& kappa) {
  Json doc = header(kTreeListFormat);
  Json list = Json::array();
  for (const auto& t : trees) {
    Json item = to_json(t, kappa);
    item.erase("format");
    item.erase("version");
    list.push_back(std::move(item));
  }
  doc["trees"] = std::move(list);
  return doc;
}

// ---------------------------------------------------------------------------
// Transceiver profiles

inline Json to_json(const TransceiverProfile& p) {
  Json doc = header(kProfileFormat);
  doc["name"] = p.name;
  doc["tx_levels"] = p.tx_levels;
  doc["sensitivity_levels"] = p.sensitivity_levels;
  return doc;
}

inline TransceiverProfile read_profile(const std::string& text) {
  const Json doc = parse_document(text, kProfileFormat);
  auto profile = guarded([&] {
    return TransceiverProfile{doc.value("name", std::string("custom")), doc.at("tx_levels").get<std::vector<Dbm>>(),
                              doc.at("sensitivity_levels").get<std::vector<Dbm>>()};
  });
  profile.validate();
  return profile;
}

// ---------------------------------------------------------------------------
// Scenarios
//
//   {"kind": "positions", "positions": [...], <model>}
//   {"kind": "grid", "rows": 3, "cols": 4, "spacing": 2.0, <model>}
//   {"kind": "chain", "n": 6, "on_loss": 45, "off_loss": 90}
//
// <model> = reference_loss, path_loss_exponent, shadowing_sigma,
//           asymmetry_sigma, seed, channel, samples_per_link (all optional)

struct ScenarioResult {
  LossMatrix matrix;
  std::optional<NodePositions> positions;
};

inline SynthScenario model_from_json(const Json& doc) {
  return guarded([&] {
    SynthScenario s;
    s.reference_loss = doc.value("reference_loss", s.reference_loss);
    s.path_loss_exponent = doc.value("path_loss_exponent", s.path_loss_exponent);
    s.shadowing_sigma = doc.value("shadowing_sigma", s.shadowing_sigma);
    s.asymmetry_sigma = doc.value("asymmetry_sigma", s.asymmetry_sigma);
    s.seed = doc.value("seed", s.seed);
    s.channel = doc.value("channel", s.channel);
    s.samples_per_link = doc.value("samples_per_link", s.samples_per_link);
    return s;
  });
}

/// `seed_override`, when set, replaces the file's seed.
inline ScenarioResult run_scenario(const std::string& text, std::optional<std::uint64_t> seed_override = {}) {
  const Json doc = parse_document(text, kScenarioFormat);
  const std::string kind = guarded([&] { return doc.at("kind").get<std::string>(); });
  SynthScenario model = model_from_json(doc);
  if (seed_override) model.seed = *seed_override;
  if (kind == "chain") {
    return guarded([&] {
      return ScenarioResult{chain_scenario(doc.at("n").get<std::size_t>(), doc.at("on_loss").get<double>(),
                                           doc.at("off_loss").get<double>(), model.channel, model.samples_per_link),
                            std::nullopt};
    });
  }
  if (kind == "grid") {
    model.positions = guarded([&] {
      return grid_positions(doc.at("rows").get<std::size_t>(), doc.at("cols").get<std::size_t>(),
                            doc.at("spacing").get<double>());
    });
  } else if (kind == "positions") {
    model.positions = positions_from_list(doc.at("positions"));
  } else {
    throw InputError("unknown scenario kind '" + kind + "'");
  }
  return ScenarioResult{generate(model), model.positions};
}

// ---------------------------------------------------------------------------
// DOT and CSV

namespace detail {

inline void dot_node(std::ostringstream& out, NodeId id, const NodePositions* positions) {
  out << "  \"" << id << '"';
  if (positions) {
    if (auto it = positions->find(id); it != positions->end()) {
      out << " [pos=\"" << topogen::detail::format_double(it->second.x) << ','
          << topogen::detail::format_double(it->second.y) << "!\"]";
    }
  }
  out << ";\n";
}

}  // namespace detail

inline std::string to_dot(const BoundedGraph& graph, const NodePositions* positions = nullptr,
                          const std::string& name = "G") {
  std::ostringstream out;
  out << "graph \"" << name << "\" {\n  label=\"beta = " << topogen::detail::format_double(graph.beta())
      << " dB\";\n  node [shape=circle];\n";
  for (NodeId id : graph.nodes()) detail::dot_node(out, id, positions);
  for (const auto& [a, b] : graph.edges()) out << "  \"" << a << "\" -- \"" << b << "\";\n";
  out << "}\n";
  return out.str();
}

/// Levels are drawn as ranks; edges are the G_beta links among tree nodes.
inline std::string to_dot(const LayeredTree& tree, const BoundedGraph& graph) {
  std::ostringstream out;
  out << "graph \"tree_" << tree.root << "\" {\n  label=\"root " << tree.root << ", beta = "
      << topogen::detail::format_double(tree.beta) << " dB, margin = " << topogen::detail::format_double(tree.margin)
      << " dB, depth " << tree.depth << "\";\n  rankdir=TB;\n  node [shape=circle];\n";
  for (std::size_t i = 0; i < tree.levels.size(); ++i) {
    out << "  { rank=same;";
    for (NodeId id : tree.levels[i]) out << " \"" << id << '"';
    out << " }\n";
  }
  const auto members = tree.all_nodes();
  for (const auto& [a, b] : induced_subgraph(graph, members).edges()) {
    out << "  \"" << a << "\" -- \"" << b << "\";\n";
  }
  out << "}\n";
  return out.str();
}

/// `beta,degree,count` rows, one per distinct degree at each beta.
inline std::string degree_csv(const DegreeDistribution& dist) {
  std::ostringstream out;
  out << "beta,degree,count\n";
  for (const auto& [beta, degrees] : dist) {
    std::size_t i = 0;
    while (i < degrees.size()) {
      std::size_t j = i;
      while (j < degrees.size() && degrees[j] == degrees[i]) ++j;
      out << topogen::detail::format_double(beta) << ',' << degrees[i] << ',' << (j - i) << '\n';
      i = j;
    }
  }
  return out.str();
}

inline std::string monotonicity_csv(const std::vector<EdgeDelta>& deltas) {
  std::ostringstream out;
  out << "beta_from,beta_to,added_edges\n";
  for (const auto& d : deltas) {
    out << topogen::detail::format_double(d.beta_from) << ',' << topogen::detail::format_double(d.beta_to) << ','
        << d.added << '\n';
  }
  return out.str();
}

}  // namespace topogen::io

#endif  // TOPOGEN_IO_HPP_
