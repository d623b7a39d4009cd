#include "topogen/io.hpp"

#include <gtest/gtest.h>

#include <random>

#include "support/oracles.hpp"

namespace topogen {
namespace {

TEST(MatrixJson, RoundTrip) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = oracle::random_matrix(rng, 8, 0.6, 31, 104);
    m.set_entry(1, 2, {47.123456789012345, 1.0 / 3.0, 17});
    m.add_node(99);
    const auto text = io::dump(io::to_json(m));
    const auto back = io::read_matrix(text);
    EXPECT_EQ(back, m);
    EXPECT_EQ(io::dump(io::to_json(back)), text);
  }
}

TEST(MatrixJson, Metadata) {
  LossMatrix m;
  const auto doc = io::to_json(m, io::Json{{"generator", "x"}});
  EXPECT_EQ(doc.at("meta").at("generator"), "x");
  EXPECT_TRUE(doc.at("channel").is_null());
  EXPECT_EQ(io::read_matrix(io::dump(doc)), m);
}

TEST(MatrixJson, Errors) {
  EXPECT_THROW(io::read_matrix("not json"), InputError);
  EXPECT_THROW(io::read_matrix(R"({"format":"topogen-layered-tree","version":1})"), InputError);
  EXPECT_THROW(io::read_matrix(R"({"format":"topogen-loss-matrix","version":7})"), InputError);
  EXPECT_THROW(io::read_matrix(R"({"format":"topogen-loss-matrix","version":1,"channel":null,"nodes":[]})"),
               InputError);
  EXPECT_THROW(io::read_matrix(R"({"format":"topogen-loss-matrix","version":1,"channel":11,"nodes":[1],
      "entries":[{"tx":1,"rx":1,"mean_loss":3,"stddev":0,"count":1}]})"),
               InputError);
  EXPECT_THROW(io::load_matrix("/nonexistent/matrix.json"), InputError);
}

TEST(PositionsJson, RoundTrip) {
  const NodePositions p{{1, {0, 0, 0}}, {4, {1.5, -2.25, 3}}};
  EXPECT_EQ(io::read_positions(io::dump(io::positions_to_json(p))), p);
}

TEST(TreeJson, RoundTrip) {
  LayeredTree t;
  t.root = 8;
  t.beta = 46;
  t.margin = 15;
  t.levels = {{8}, {5, 12}, {4, 7, 10}};
  t.depth = 2;
  const auto doc = io::to_json(t, Kappa::linear());
  EXPECT_EQ(doc.at("node_count"), 6);
  const auto back = io::read_tree(io::dump(doc));
  EXPECT_EQ(back.tree.levels, t.levels);
  EXPECT_EQ(back.tree.root, 8u);
  EXPECT_EQ(back.tree.depth, 2u);
  EXPECT_EQ(back.kappa.to_string(), "linear");

  auto bad = doc;
  bad["depth"] = 5;
  EXPECT_THROW(io::tree_from_json(bad), InputError);
  bad = doc;
  bad["kappa"] = "nope";
  EXPECT_THROW(io::tree_from_json(bad), InputError);

  const auto list = io::tree_list_document({t, t}, Kappa::constant(2));
  EXPECT_EQ(list.at("trees").size(), 2u);
  EXPECT_FALSE(list.at("trees")[0].contains("format"));
}

TEST(SelectionJson, RoundTrip) {
  const DegreeSelection s{47, 3, {1, 2, 3, 4}, {{1, 2, 3, 4}}, 4};
  const auto back = io::selection_from_json(io::to_json(s));
  EXPECT_EQ(back.beta, 47.0);
  EXPECT_EQ(back.c, 3);
  EXPECT_EQ(back.selected, s.selected);
  EXPECT_EQ(back.components, s.components);
  EXPECT_EQ(back.objective, 4u);
  const auto doc = io::selections_document(3, {s}, s);
  EXPECT_EQ(doc.at("c"), 3);
  EXPECT_EQ(doc.at("selections").size(), 1u);
  EXPECT_TRUE(io::selections_document(3, {}, std::nullopt).at("best").is_null());
}

TEST(ProfileJson, RoundTripAndValidation) {
  const auto p = at86rf231_profile();
  const auto back = io::read_profile(io::dump(io::to_json(p)));
  EXPECT_EQ(back.name, p.name);
  EXPECT_EQ(back.tx_levels, p.tx_levels);
  EXPECT_EQ(back.sensitivity_levels, p.sensitivity_levels);
  EXPECT_THROW(io::read_profile(R"({"format":"topogen-transceiver-profile","version":1,
      "tx_levels":[3,0],"sensitivity_levels":[-90]})"),
               InputError);
}

TEST(Scenario, Kinds) {
  const auto chain = io::run_scenario(
      R"({"format":"topogen-scenario","version":1,"kind":"chain","n":4,"on_loss":45,"off_loss":90})");
  EXPECT_EQ(chain.matrix, chain_scenario(4, 45, 90));
  EXPECT_FALSE(chain.positions.has_value());

  const std::string grid_text =
      R"({"format":"topogen-scenario","version":1,"kind":"grid","rows":3,"cols":4,"spacing":2,
          "shadowing_sigma":6,"seed":5})";
  const auto grid = io::run_scenario(grid_text);
  SynthScenario model;
  model.shadowing_sigma = 6;
  model.seed = 5;
  EXPECT_EQ(grid.matrix, grid_scenario(3, 4, 2, model));
  ASSERT_TRUE(grid.positions.has_value());
  EXPECT_EQ(grid.positions->size(), 12u);
  EXPECT_FALSE(io::run_scenario(grid_text, 6).matrix == grid.matrix);

  const auto placed = io::run_scenario(
      R"({"format":"topogen-scenario","version":1,"kind":"positions",
          "positions":[{"id":1,"x":0,"y":0,"z":0},{"id":2,"x":10,"y":0,"z":0}]})");
  EXPECT_EQ(placed.matrix.loss(1, 2), 60.0);

  EXPECT_THROW(io::run_scenario(R"({"format":"topogen-scenario","version":1,"kind":"torus"})"), InputError);
  EXPECT_THROW(io::run_scenario(R"({"format":"topogen-scenario","version":1,"kind":"grid","rows":3})"),
               InputError);
}

TEST(Dot, GraphExport) {
  const auto g = neighborhood_graph(chain_scenario(3, 45, 90), 50);
  const NodePositions pos{{1, {0, 0, 0}}, {2, {1.5, 0, 0}}};
  const auto dot = io::to_dot(g, &pos, "chain");
  EXPECT_EQ(dot,
            "graph \"chain\" {\n  label=\"beta = 50 dB\";\n  node [shape=circle];\n"
            "  \"1\" [pos=\"0,0!\"];\n  \"2\" [pos=\"1.5,0!\"];\n  \"3\";\n"
            "  \"1\" -- \"2\";\n  \"2\" -- \"3\";\n}\n");
}

TEST(Dot, TreeExportRanksLevels) {
  const auto m = chain_scenario(3, 45, 90);
  const auto t = monitored_bfs(m, 2, 50, 15, Kappa::constant(1));
  const auto dot = io::to_dot(t, neighborhood_graph(m, 50));
  EXPECT_NE(dot.find("{ rank=same; \"2\" }"), std::string::npos);
  EXPECT_NE(dot.find("{ rank=same; \"1\" \"3\" }"), std::string::npos);
  EXPECT_NE(dot.find("\"1\" -- \"2\""), std::string::npos);
}

TEST(Csv, DegreeAndMonotonicity) {
  const auto m = chain_scenario(3, 45, 90);
  const auto dist = degree_distribution(m, GraphFamily{44, 46, 1});
  EXPECT_EQ(io::degree_csv(dist), "beta,degree,count\n44,0,3\n45,1,2\n45,2,1\n46,1,2\n46,2,1\n");
  EXPECT_EQ(io::monotonicity_csv(monotonicity_report(m, GraphFamily{44, 46, 1})),
            "beta_from,beta_to,added_edges\n44,45,2\n45,46,0\n");
}

}  // namespace
}  // namespace topogen
