#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "models.hpp"
#include "spe/condition.hpp"
#include "spe/errors.hpp"
#include "spe/serialize.hpp"
#include "spe/translator.hpp"
#include "testutil.hpp"

using namespace spe;
using namespace spe::testmodels;

TEST_CASE("outcomes round-trip with explicit flags and infinity tokens") {
  std::vector<Outcomes> cases = {
      Outcomes::empty(),
      Outcomes::strings({"a", "b"}, true),
      Outcomes::reals({-1.5, 0, 2.25}),
      Outcomes::interval(-kInf, true, 3.5, false),
      Outcomes::interval(0.1, true, kInf, true),
      union_of(Outcomes::strings({"x"}), Outcomes::interval(0, false, 1, true)),
  };
  for (const Outcomes& v : cases) {
    std::string text = outcomes_to_json_text(v);
    CHECK(outcomes_from_json_text(text) == v);
  }
  CHECK(outcomes_to_json_text(Outcomes::interval(-kInf, true, 1, false)).find("-inf") !=
        std::string::npos);
}

TEST_CASE("graph save and load preserve structure and probabilities") {
  Graph g;
  NodeId root = indian_gpa(g);
  std::string text = save_graph(g, root);
  LoadedGraph loaded = load_graph(text);
  CHECK(loaded.graph.size() == g.size());
  CHECK(loaded.graph.reachable_count(loaded.root) == g.reachable_count(root));
  for (const char* q : {"GPA <= 4", "Perfect == 1", "Nationality == 'USA' and GPA > 3"}) {
    EventPtr e = compile_event_text(q);
    CHECK(prob(loaded.graph, loaded.root, e) == prob(g, root, e));
  }

  // shared nodes stay shared through the file
  Graph g2;
  NodeId shared = uniform_leaf(g2, "X", 0, 1);
  NodeId a = g2.product({shared, uniform_leaf(g2, "Y", 0, 1)});
  NodeId b = g2.product({shared, uniform_leaf(g2, "Y", 2, 5)});
  NodeId root2 = g2.sum({a, b}, {0.5, 0.5});
  LoadedGraph loaded2 = load_graph(save_graph(g2, root2));
  CHECK(loaded2.graph.reachable_count(loaded2.root) == g2.reachable_count(root2));
}

TEST_CASE("loading validates and rejects malformed graphs") {
  CHECK_THROWS_AS(load_graph("not json"), SpeError);
  CHECK_THROWS_AS(load_graph("{\"format\": \"other\"}"), SpeError);
  // sum over mismatched scopes fails validation on load
  std::string bad = R"({
    "format": "spe-graph-v1",
    "root": 2,
    "nodes": [
      {"id": 0, "kind": "leaf", "var": "X",
       "dist": {"kind": "real", "family": "uniform", "params": [0, 1], "lo": 0, "hi": 1},
       "env": [{"var": "X", "transform": {"kind": "id", "var": "X"}}]},
      {"id": 1, "kind": "leaf", "var": "Y",
       "dist": {"kind": "real", "family": "uniform", "params": [0, 1], "lo": 0, "hi": 1},
       "env": [{"var": "Y", "transform": {"kind": "id", "var": "Y"}}]},
      {"id": 2, "kind": "sum", "children": [0, 1], "weights": [0.5, 0.5]}
    ]})";
  CHECK_THROWS_AS(load_graph(bad), SpeError);
}

TEST_CASE("transform and event serialization round-trips through graphs") {
  Graph g;
  Environment env = id_env("X");
  env.entries.emplace_back("Z", polynomial(root(identity("X"), 2), {11, 5}));
  env.entries.emplace_back(
      "W", logarithm(abs_value(polynomial(identity("Z"), {0, 1, 2})), 2.0));
  auto pw = piecewise(
      {{polynomial(identity("Z"), {0, 1}),
        containment(identity("Z"), Outcomes::interval(-kInf, true, 0, true))},
       {polynomial(identity("Z"), {0, 2}),
        containment(identity("Z"), Outcomes::interval(0, false, kInf, true))}});
  env.entries.emplace_back("V", pw);
  NodeId leaf = g.leaf("X", make_dist_real(gamma_cdf(2, 1), 0, kInf), env);
  LoadedGraph loaded = load_graph(save_graph(g, leaf));
  const auto& l = std::get<LeafNode>(loaded.graph.node(loaded.root).data);
  CHECK(transforms_equal(l.env.entries[1].second,
                         polynomial(root(identity("X"), 2), {11, 5})));
  CHECK(transforms_equal(l.env.entries[2].second,
                         logarithm(abs_value(polynomial(identity("Z"), {0, 1, 2})), 2.0)));
  CHECK(transforms_equal(l.env.entries[3].second, pw));
}

TEST_CASE("posterior graphs survive the file format") {
  auto rng = testutil::make_rng(5150);
  int done = 0;
  while (done < 10) {
    Graph g;
    RandomSpe spe_ = random_spe(g, rng);
    EventPtr e = typed_event(rng, g, spe_.root, spe_.vars);
    if (!(prob(g, spe_.root, e) > 1e-3)) continue;
    ++done;
    NodeId post = condition(g, spe_.root, e);
    LoadedGraph loaded = load_graph(save_graph(g, post));
    for (int k = 0; k < 10; ++k) {
      EventPtr probe = random_event(rng, spe_.vars);
      CHECK(prob(loaded.graph, loaded.root, probe) == prob(g, post, probe));
    }
  }
}
