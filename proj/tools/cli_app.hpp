#ifndef TOPOGEN_TOOLS_CLI_APP_HPP_
#define TOPOGEN_TOOLS_CLI_APP_HPP_

// The topogen command line. run_cli() is the whole program; main() only
// forwards argv, so tests drive commands in-process.
//
// Exit codes: 0 success, 1 usage error, 2 input error, 3 verification failed.

#include <openssl/evp.h>

#include <filesystem>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "topogen/degree_select.hpp"
#include "topogen/graph.hpp"
#include "topogen/io.hpp"
#include "topogen/measurement.hpp"
#include "topogen/radio.hpp"
#include "topogen/synth.hpp"
#include "topogen/tree.hpp"

#ifndef TOPOGEN_VERSION
#define TOPOGEN_VERSION "dev"
#endif

namespace topogen::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitVerifyFailed = 3;

namespace fs = std::filesystem;
using io::Json;

inline std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return out.str();
}

struct GlobalOptions {
  double beta_min = 31.0;
  double beta_max = 104.0;
  double beta_step = 1.0;
  double margin = 15.0;
  std::string kappa = "linear";
  int guard = 3;
  std::string profile;
  std::string out = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
};

class Runner {
 public:
  Runner(const GlobalOptions& opts, std::ostream& out, std::ostream& err) : opts_(opts), out_(out), err_(err) {}

  GraphFamily family() const {
    GraphFamily f{opts_.beta_min, opts_.beta_max, opts_.beta_step};
    f.validate();
    return f;
  }

  TransceiverProfile profile() {
    if (opts_.profile.empty()) return at86rf231_profile();
    auto text = io::read_text(opts_.profile);
    note_input(opts_.profile, text);
    return io::read_profile(text);
  }

  LossMatrix matrix(const std::string& path) {
    const auto text = io::read_text(path);
    note_input(path, text);
    try {
      return io::read_matrix(text);
    } catch (const InputError& e) {
      throw InputError(path + ": " + e.what());
    }
  }

  int ingest(const std::vector<std::string>& logs, const std::string& aggregator_name, std::uint64_t min_count) {
    const auto aggregator = Aggregator::parse(aggregator_name);
    std::vector<LossSample> samples;
    std::size_t rejected = 0;
    for (const auto& path : logs) {
      const auto text = io::read_text(path);
      note_input(path, text);
      auto parsed = parse_campaign_log(std::string_view(text));
      rejected += parsed.rejections.size();
      for (std::size_t i = 0; i < parsed.rejections.size(); ++i) {
        if (i == 10) {
          out_ << "  ... " << parsed.rejections.size() - 10 << " more rejected lines in " << fs::path(path).filename().string() << "\n";
          break;
        }
        out_ << "  rejected " << fs::path(path).filename().string() << ":" << parsed.rejections[i].line << ": "
             << parsed.rejections[i].reason << "\n";
      }
      samples.insert(samples.end(), parsed.samples.begin(), parsed.samples.end());
    }
    const auto matrix = build_loss_matrix(samples, aggregator);
    out_ << "ingested " << samples.size() << " samples, rejected " << rejected << " lines, " << matrix.nodes().size()
         << " nodes, " << matrix.entries().size() << " directed entries\n";
    if (samples.empty()) err_ << "warning: no valid samples; writing an empty matrix\n";
    const auto low = warn_low_counts(matrix, min_count);
    if (!low.empty()) {
      err_ << "warning: " << low.size() << " directed entries have fewer than " << min_count << " samples\n";
      for (std::size_t i = 0; i < low.size() && i < 10; ++i) {
        err_ << "  " << low[i].tx << "->" << low[i].rx << ": " << low[i].count << "\n";
      }
    }
    emit("matrix.json", io::dump(io::to_json(matrix, Json{{"aggregator", aggregator.name()}})));
    config_["aggregator"] = aggregator.name();
    config_["min_count"] = min_count;
    return kExitOk;
  }

  int analyze(const std::string& matrix_path, const std::string& positions_path, bool correlation) {
    const auto m = matrix(matrix_path);
    const auto fam = family();
    const auto dist = degree_distribution(m, fam);
    emit("degree_distribution.csv", io::degree_csv(dist));
    out_ << "nodes " << m.nodes().size() << ", directed entries " << m.entries().size() << "\n";
    std::optional<double> first_edge;
    std::optional<double> full_mesh;
    for (const auto& [beta, degrees] : dist) {
      if (!first_edge && !degrees.empty() && degrees.back() > 0) first_edge = beta;
      if (!full_mesh && !degrees.empty() && degrees.front() + 1 == degrees.size()) full_mesh = beta;
    }
    out_ << "first edge at beta " << (first_edge ? topogen::detail::format_double(*first_edge) : "-")
         << ", full mesh at beta " << (full_mesh ? topogen::detail::format_double(*full_mesh) : "-") << "\n";
    if (fam.grid().size() >= 2) {
      const auto deltas = monotonicity_report(m, fam);
      for (const auto& d : deltas) {
        if (d.removed != 0) throw std::logic_error("edge set shrank between grid points");
      }
      emit("monotonicity.csv", io::monotonicity_csv(deltas));
    }
    if (correlation || !positions_path.empty()) {
      if (positions_path.empty()) throw InputError("--correlation requires --positions");
      const auto text = io::read_text(positions_path);
      note_input(positions_path, text);
      const double r = distance_loss_correlation(m, io::read_positions(text));
      std::ostringstream line;
      line << std::fixed << std::setprecision(4) << r;
      out_ << "distance-loss correlation: " << line.str() << "\n";
      emit("correlation.txt", line.str() + "\n");
    }
    return kExitOk;
  }

  int degree(const std::string& matrix_path, int c) {
    const auto m = matrix(matrix_path);
    config_["c"] = c;
    const auto selections = select_constant_degree(m, c, family());
    if (selections.empty()) {
      out_ << "no nonempty selection at any beta for c = " << c << "\n";
      emit("selections.json", io::dump(io::selections_document(c, selections, std::nullopt)));
      return kExitOk;
    }
    const auto best = largest_component_selection(selections);
    const auto graph = neighborhood_graph(m, best.beta);
    if (!is_c_regular(graph, best.selected, c)) throw std::logic_error("chosen component is not c-regular");
    out_ << selections.size() << " bounds with a nonempty selection\n";
    out_ << "best: beta " << topogen::detail::format_double(best.beta) << " dB, " << best.selected.size()
         << " nodes {" << join_ids(best.selected) << "}\n";
    emit("selections.json", io::dump(io::selections_document(c, selections, best)));
    emit("degree.dot", io::to_dot(induced_subgraph(graph, best.selected), nullptr, "degree_c" + std::to_string(c)));
    return kExitOk;
  }

  int tree(const std::string& matrix_path, bool reduce, std::optional<NodeId> root, std::optional<double> beta,
           std::size_t top) {
    const auto m = matrix(matrix_path);
    const auto kappa = Kappa::parse(opts_.kappa);
    GraphFamily fam = family();
    if (beta) fam = GraphFamily{*beta, *beta, 1.0};
    std::vector<LayeredTree> trees;
    if (root) {
      if (!m.has_node(*root)) throw InputError("unknown root node " + std::to_string(*root));
      for (double b : fam.grid()) trees.push_back(monitored_bfs(m, *root, b, opts_.margin, kappa));
      std::stable_sort(trees.begin(), trees.end(), tree_order);
      config_["root"] = *root;
    } else {
      trees = sweep_trees(m, kappa, opts_.margin, fam);
    }
    if (beta) config_["beta"] = *beta;
    config_["reduce"] = reduce;
    if (trees.empty()) throw InputError("matrix has no nodes");
    LayeredTree best = trees.front();
    out_ << "best tree: root " << best.root << ", beta " << topogen::detail::format_double(best.beta) << " dB, depth "
         << best.depth << ", " << best.node_count() << " nodes\n";
    if (reduce) {
      best = reduce_tree(best, m, kappa);
      out_ << "reduced to " << best.node_count() << " nodes\n";
    }
    for (std::size_t i = 0; i < best.levels.size(); ++i) {
      out_ << "  level " << i << ": {" << join_ids(best.levels[i]) << "}\n";
    }
    if (trees.size() > top) trees.resize(top);
    emit("trees.json", io::dump(io::tree_list_document(trees, kappa)));
    emit("tree.json", io::dump(io::to_json(best, kappa)));
    emit("tree.dot", io::to_dot(best, neighborhood_graph(m, best.beta)));
    return kExitOk;
  }

  int settings(int beta) {
    const auto p = profile();
    const auto list = settings_for_bound(beta, p, opts_.guard);
    std::ostringstream text;
    text << "profile " << p.name << ", beta " << beta << " dB, guard " << opts_.guard << " dB\n";
    for (const auto& s : list) {
      text << format_setting(s.base);
      if (s.saturated) {
        text << "  guarded: saturated";
        if (s.guarded) text << " (best " << format_setting(*s.guarded) << ")";
      } else if (s.guarded) {
        text << "  guarded: " << format_setting(*s.guarded);
      }
      text << "\n";
    }
    out_ << text.str();
    emit("settings.txt", text.str());
    return kExitOk;
  }

  int verify(const std::string& tree_path, const std::string& matrix_path) {
    const auto tree_text = io::read_text(tree_path);
    note_input(tree_path, tree_text);
    const auto doc = io::read_tree(tree_text);
    const auto fresh = matrix(matrix_path);
    const auto report = revalidate(doc.tree, fresh, doc.kappa);
    std::ostringstream text;
    if (report.ok()) {
      text << "PASS: all requirements hold for root " << doc.tree.root << " at beta "
           << topogen::detail::format_double(doc.tree.beta) << " dB\n";
    } else {
      text << "FAIL: " << report.violations.size() << " violation(s)\n";
      for (const auto& v : report.violations) text << "  requirement " << v.requirement << ": " << v.detail << "\n";
    }
    out_ << text.str();
    emit("verify.txt", text.str());
    return report.ok() ? kExitOk : kExitVerifyFailed;
  }

  int sweep_report(const std::vector<std::string>& matrices) {
    const auto kappa = Kappa::parse(opts_.kappa);
    const auto fam = family();
    std::ostringstream csv;
    csv << "testbed,nodes,max_depth,beta_min,beta_max,note\n";
    out_ << std::left << std::setw(20) << "testbed" << std::setw(7) << "nodes" << std::setw(7) << "depth"
         << "beta range\n";
    for (const auto& path : matrices) {
      const auto m = matrix(path);
      const auto trees = sweep_trees(m, kappa, opts_.margin, fam);
      const std::string name = fs::path(path).stem().string();
      std::size_t depth = trees.empty() ? 0 : trees.front().depth;
      double lo = 0;
      double hi = 0;
      bool any = false;
      for (const auto& t : trees) {
        if (t.depth != depth) continue;
        lo = any ? std::min(lo, t.beta) : t.beta;
        hi = any ? std::max(hi, t.beta) : t.beta;
        any = true;
      }
      const std::string note = depth < 2 ? "no multi-hop" : "";
      const std::string range = any ? topogen::detail::format_double(lo) + "-" + topogen::detail::format_double(hi) : "-";
      csv << name << ',' << m.nodes().size() << ',' << depth << ',' << (any ? topogen::detail::format_double(lo) : "")
          << ',' << (any ? topogen::detail::format_double(hi) : "") << ',' << note << '\n';
      out_ << std::left << std::setw(20) << name << std::setw(7) << m.nodes().size() << std::setw(7) << depth << range
           << (note.empty() ? "" : "  " + note) << "\n";
    }
    emit("sweep_report.csv", csv.str());
    return kExitOk;
  }

  int synth(const std::string& scenario_path) {
    const auto text = io::read_text(scenario_path);
    note_input(scenario_path, text);
    std::optional<std::uint64_t> seed;
    if (opts_.seed_set) seed = opts_.seed;
    const auto result = io::run_scenario(text, seed);
    emit("matrix.json", io::dump(io::to_json(result.matrix, Json{{"generator", kGeneratorId}})));
    if (result.positions) emit("positions.json", io::dump(io::positions_to_json(*result.positions)));
    out_ << "generated " << result.matrix.nodes().size() << " nodes, " << result.matrix.entries().size()
         << " directed entries\n";
    return kExitOk;
  }

  /// Writes `<command>.manifest.json` next to the outputs.
  void write_manifest(const std::string& command) {
    Json doc{{"tool", "topogen"}, {"version", TOPOGEN_VERSION}, {"command", command}};
    Json config{{"beta_min", opts_.beta_min}, {"beta_max", opts_.beta_max}, {"beta_step", opts_.beta_step},
                {"margin", opts_.margin},     {"kappa", opts_.kappa},       {"guard", opts_.guard},
                {"profile", opts_.profile.empty() ? "AT86RF231 (built-in)" : fs::path(opts_.profile).filename().string()}};
    if (opts_.seed_set) config["seed"] = opts_.seed;
    for (const auto& [k, v] : config_.items()) config[k] = v;
    doc["config"] = std::move(config);
    doc["inputs"] = inputs_;
    doc["outputs"] = outputs_;
    io::write_text(fs::path(opts_.out) / (command + ".manifest.json"), io::dump(doc));
  }

 private:
  void note_input(const std::string& path, const std::string& content) {
    inputs_.push_back({{"name", fs::path(path).filename().string()}, {"sha256", sha256_hex(content)}});
  }

  void emit(const std::string& name, const std::string& content) {
    io::write_text(fs::path(opts_.out) / name, content);
    outputs_.push_back(name);
  }

  const GlobalOptions& opts_;
  std::ostream& out_;
  std::ostream& err_;
  Json config_ = Json::object();
  Json inputs_ = Json::array();
  Json outputs_ = Json::array();
};

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Topology construction for dense wireless testbeds", "topogen"};
  app.require_subcommand(1);
  app.set_version_flag("--version", TOPOGEN_VERSION);

  GlobalOptions g;
  app.add_option("--beta-min", g.beta_min, "Smallest link budget of the beta grid (dB)");
  app.add_option("--beta-max", g.beta_max, "Largest link budget of the beta grid (dB)");
  app.add_option("--beta-step", g.beta_step, "Beta grid step (dB)");
  app.add_option("--margin", g.margin, "Fluctuation margin eta (dB)");
  app.add_option("--kappa", g.kappa, "Breadth requirement: const:K, linear, or table:1=2,2=3,...");
  app.add_option("--guard", g.guard, "Extra budget for guarded settings (dB)");
  app.add_option("--profile", g.profile, "Transceiver profile file (default: built-in AT86RF231)");
  app.add_option("--out", g.out, "Output directory");
  auto* seed_opt = app.add_option("--seed", g.seed, "Seed override for synthetic scenarios");

  std::vector<std::string> logs;
  std::string aggregator = "mean";
  std::uint64_t min_count = 250;
  auto* ingest = app.add_subcommand("ingest", "Build a loss matrix from campaign logs");
  ingest->add_option("logs", logs, "Campaign log files")->required()->check(CLI::ExistingFile);
  ingest->add_option("--aggregator", aggregator, "mean, median or pNN");
  ingest->add_option("--min-count", min_count, "Warn about entries with fewer samples");

  std::string matrix_path;
  std::string positions_path;
  bool correlation = false;
  auto* analyze = app.add_subcommand("analyze", "Degree distribution, edge growth and distance correlation");
  analyze->add_option("matrix", matrix_path, "Loss matrix file")->required()->check(CLI::ExistingFile);
  analyze->add_option("--positions", positions_path, "Node positions file")->check(CLI::ExistingFile);
  analyze->add_flag("--correlation", correlation, "Report the distance-loss correlation");

  int c = 3;
  auto* degree = app.add_subcommand("degree", "Constant-degree induced subgraphs over the beta grid");
  degree->add_option("matrix", matrix_path, "Loss matrix file")->required()->check(CLI::ExistingFile);
  degree->add_option("--c", c, "Target node degree")->required()->check(CLI::PositiveNumber);

  bool reduce = false;
  std::optional<NodeId> root;
  std::optional<double> beta;
  std::size_t top = 10;
  auto* tree = app.add_subcommand("tree", "Layered trees over roots and bounds");
  tree->add_option("matrix", matrix_path, "Loss matrix file")->required()->check(CLI::ExistingFile);
  tree->add_flag("--reduce", reduce, "Minimize the node count of the best tree");
  tree->add_option("--root", root, "Only consider this root");
  tree->add_option("--beta", beta, "Only consider this bound (dB)");
  tree->add_option("--top", top, "Number of trees kept in trees.json");

  int settings_beta = 0;
  auto* settings = app.add_subcommand("settings", "Transceiver settings realizing a bound");
  settings->add_option("beta", settings_beta, "Link budget (dB)")->required();

  std::string tree_path;
  auto* verify = app.add_subcommand("verify", "Check a stored tree against a fresh matrix");
  verify->add_option("tree", tree_path, "Tree file")->required()->check(CLI::ExistingFile);
  verify->add_option("matrix", matrix_path, "Fresh loss matrix file")->required()->check(CLI::ExistingFile);

  std::vector<std::string> matrices;
  auto* sweep = app.add_subcommand("sweep-report", "Maximum tree depth per testbed");
  sweep->add_option("matrices", matrices, "Loss matrix files")->required()->check(CLI::ExistingFile);

  std::string scenario_path;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic loss matrix");
  synth->add_option("scenario", scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  g.seed_set = seed_opt->count() > 0;

  Runner runner(g, out, err);
  try {
    int code = kExitOk;
    std::string name;
    if (ingest->parsed()) {
      name = "ingest";
      code = runner.ingest(logs, aggregator, min_count);
    } else if (analyze->parsed()) {
      name = "analyze";
      code = runner.analyze(matrix_path, positions_path, correlation);
    } else if (degree->parsed()) {
      name = "degree";
      code = runner.degree(matrix_path, c);
    } else if (tree->parsed()) {
      name = "tree";
      code = runner.tree(matrix_path, reduce, root, beta, top);
    } else if (settings->parsed()) {
      name = "settings";
      code = runner.settings(settings_beta);
    } else if (verify->parsed()) {
      name = "verify";
      code = runner.verify(tree_path, matrix_path);
    } else if (sweep->parsed()) {
      name = "sweep-report";
      code = runner.sweep_report(matrices);
    } else if (synth->parsed()) {
      name = "synth";
      code = runner.synth(scenario_path);
    }
    runner.write_manifest(name);
    return code;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::length_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

inline int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(std::move(args), out, err);
}

}  // namespace topogen::cli

#endif  // TOPOGEN_TOOLS_CLI_APP_HPP_
