#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "models.hpp"
#include "spe/condition.hpp"
#include "spe/errors.hpp"
#include "testutil.hpp"

using namespace spe;
using namespace spe::testmodels;

namespace {

EventPtr ivl(const std::string& x, double lo, bool lo_open, double hi, bool hi_open) {
  return containment(identity(x), Outcomes::interval(lo, lo_open, hi, hi_open));
}

EventPtr eq(const std::string& x, double r) {
  return containment(identity(x), Outcomes::reals({r}));
}

const SumNode& as_sum(const Graph& g, NodeId id) {
  return std::get<SumNode>(g.node(id).data);
}

std::vector<double> normalized_weights(const Graph& g, NodeId id) {
  const auto& s = as_sum(g, id);
  double z = 0;
  for (double w : s.weights) z += w;
  std::vector<double> out;
  for (double w : s.weights) out.push_back(w / z);
  return out;
}

}  // namespace

TEST_CASE("worked example posterior weights and structure") {
  Graph g;
  NodeId prior = indian_gpa(g);
  NodeId post = condition(g, prior, gpa_condition_event());
  CHECK(validate(g, post).empty());

  auto w = normalized_weights(g, post);
  REQUIRE(w.size() == 2);
  // 0.09/0.27125 and 0.18125/0.27125
  CHECK(w[0] == doctest::Approx(0.09 / 0.27125).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(0.18125 / 0.27125).epsilon(1e-12));

  // inside the second component: the perfect-score mixture reweights to
  // .15/(.15+.2125) vs .2125/(.15+.2125)
  const auto& usa = std::get<ProductNode>(g.node(as_sum(g, post).children[1]).data);
  NodeId inner_sum = -1;
  for (NodeId c : usa.children)
    if (std::holds_alternative<SumNode>(g.node(c).data)) inner_sum = c;
  REQUIRE(inner_sum >= 0);
  auto wu = normalized_weights(g, inner_sum);
  REQUIRE(wu.size() == 2);
  CHECK(wu[0] == doctest::Approx(0.15 / 0.3625).epsilon(1e-12));
  CHECK(wu[1] == doctest::Approx(0.2125 / 0.3625).epsilon(1e-12));

  // the India component: uniform body re-truncated to (8,10)
  const auto& india = std::get<ProductNode>(g.node(as_sum(g, post).children[0]).data);
  bool found_u810 = false;
  for (NodeId c : india.children) {
    if (std::holds_alternative<LeafNode>(g.node(c).data)) {
      const auto& l = std::get<LeafNode>(g.node(c).data);
      if (l.var == "GPA" && std::holds_alternative<DistReal>(l.dist)) {
        const auto& dr = std::get<DistReal>(l.dist);
        CHECK(dr.lo == doctest::Approx(8.0));
        CHECK(dr.hi == doctest::Approx(10.0));
        found_u810 = true;
      }
    }
  }
  CHECK(found_u810);

  // conditioning on the full space keeps every probe probability
  EventPtr full = containment(identity("GPA"),
                              union_of(Outcomes::all_reals(), Outcomes::all_strings()));
  NodeId same = condition(g, prior, full);
  for (double cut : {1.0, 3.0, 4.0, 9.0}) {
    EventPtr e = ivl("GPA", -kInf, true, cut, false);
    CHECK(prob(g, same, e) == doctest::Approx(prob(g, prior, e)).epsilon(1e-12));
  }

  // conditioning independent products on the full space is the identity
  // (interning maps the rebuilt nodes back onto the originals)
  Graph gp;
  NodeId indep = gp.product({uniform_leaf(gp, "X", 0, 1), normal_leaf(gp, "Y", 0, 1)});
  EventPtr full_x = containment(identity("X"), Outcomes::full_space());
  CHECK(condition(gp, indep, full_x) == indep);
}

TEST_CASE("conditioning on a zero-probability event fails loudly") {
  Graph g;
  NodeId prior = indian_gpa(g);
  CHECK_THROWS_AS(condition(g, prior, ivl("GPA", 20, false, 30, false)), SpeError);
  CHECK_THROWS_AS(
      condition(g, prior, containment(identity("Nationality"), Outcomes::strings({"Mars"}))),
      SpeError);
}

TEST_CASE("continuous leaf conditioned on a union splits into a mixture") {
  Graph g;
  NodeId leaf = normal_leaf(g, "X", 0, 2);
  EventPtr e = containment(identity("X"),
                           union_of(Outcomes::interval(-3, false, -1, false),
                                    Outcomes::interval(1, false, 2, false)));
  NodeId post = condition(g, leaf, e);
  REQUIRE(std::holds_alternative<SumNode>(g.node(post).data));
  const auto& s = as_sum(g, post);
  CHECK(s.children.size() == 2);
  // region weights proportional to prior masses
  double m1 = prob(g, leaf, ivl("X", -3, false, -1, false));
  double m2 = prob(g, leaf, ivl("X", 1, false, 2, false));
  auto w = normalized_weights(g, post);
  CHECK(w[0] == doctest::Approx(m1 / (m1 + m2)).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(m2 / (m1 + m2)).epsilon(1e-12));
}

TEST_CASE("integer leaf conditioned on a finite set becomes atom mixture") {
  Graph g;
  NodeId leaf = g.leaf("N", make_dist_int(poisson_cdf(5), 0, kInf), id_env("N"));
  NodeId post = condition(g, leaf, containment(identity("N"), Outcomes::reals({2, 3, 9})));
  REQUIRE(std::holds_alternative<SumNode>(g.node(post).data));
  const auto& s = as_sum(g, post);
  CHECK(s.children.size() == 3);
  for (NodeId c : s.children) {
    const auto& l = std::get<LeafNode>(g.node(c).data);
    const auto& di = std::get<DistInt>(l.dist);
    CHECK(di.hi - di.lo == doctest::Approx(0.5));
  }
  // posterior mass proportional to the prior atom masses
  double p2 = prob(g, post, eq("N", 2));
  double p3 = prob(g, post, eq("N", 3));
  double prior2 = prob(g, leaf, eq("N", 2));
  double prior3 = prob(g, leaf, eq("N", 3));
  CHECK(p2 / p3 == doctest::Approx(prior2 / prior3).epsilon(1e-9));

  // singleton survivor collapses the sum shell
  NodeId single = condition(g, leaf, containment(identity("N"), Outcomes::reals({4})));
  CHECK(std::holds_alternative<LeafNode>(g.node(single).data));
}

TEST_CASE("product conditioned on an overlapping union becomes a sum of products") {
  Graph g;
  NodeId prior = g.product({uniform_leaf(g, "X", 0, 4), uniform_leaf(g, "Y", 0, 4),
                            uniform_leaf(g, "Z", 0, 4)});
  // two overlapping boxes over X,Y (Z unconstrained): inner in outer -> 5 cells
  EventPtr inner = conjunction({ivl("X", 1, false, 2, false), ivl("Y", 1, false, 2, false)});
  EventPtr outer = conjunction({ivl("X", 0.5, false, 3, false), ivl("Y", 0.5, false, 3, false)});
  NodeId post = condition(g, prior, disjunction({inner, outer}));
  REQUIRE(std::holds_alternative<SumNode>(g.node(post).data));
  CHECK(as_sum(g, post).children.size() == 5);
  for (NodeId c : as_sum(g, post).children)
    CHECK(std::holds_alternative<ProductNode>(g.node(c).data));
  CHECK(validate(g, post).empty());

  // unconditioned children stay physically shared with the prior
  const auto& prior_children = std::get<ProductNode>(g.node(prior).data).children;
  NodeId z_leaf = prior_children[2];
  for (NodeId c : as_sum(g, post).children) {
    const auto& pc = std::get<ProductNode>(g.node(c).data).children;
    CHECK(std::find(pc.begin(), pc.end(), z_leaf) != pc.end());
  }
}

TEST_CASE("closure: conditional probabilities match the ratio form") {
  auto rng = testutil::make_rng(424242);
  int spes = 0;
  while (spes < 40) {
    Graph g;
    RandomSpe spe_ = random_spe(g, rng);
    EventPtr e = typed_event(rng, g, spe_.root, spe_.vars);
    double pe = prob(g, spe_.root, e);
    if (!(pe > 1e-4)) continue;
    ++spes;
    NodeId post = condition(g, spe_.root, e);
    CHECK(validate(g, post).empty());
    for (int k = 0; k < 25; ++k) {
      EventPtr probe = random_event(rng, spe_.vars);
      double joint = prob(g, spe_.root, conjunction({e, probe}));
      double conditional = prob(g, post, probe);
      CAPTURE(spes);
      CHECK(conditional == doctest::Approx(joint / pe).epsilon(1e-9));
    }
  }
}

TEST_CASE("conditioning twice is idempotent in distribution") {
  auto rng = testutil::make_rng(11);
  int done = 0;
  while (done < 10) {
    Graph g;
    RandomSpe spe_ = random_spe(g, rng);
    EventPtr e = typed_event(rng, g, spe_.root, spe_.vars);
    double pe = prob(g, spe_.root, e);
    if (!(pe > 1e-3)) continue;
    ++done;
    NodeId once = condition(g, spe_.root, e);
    NodeId twice = condition(g, once, e);
    for (int k = 0; k < 20; ++k) {
      EventPtr probe = random_event(rng, spe_.vars);
      CHECK(prob(g, twice, probe) == doctest::Approx(prob(g, once, probe)).epsilon(1e-9));
    }
  }
}

TEST_CASE("caching on and off produce identical posteriors") {
  auto rng = testutil::make_rng(99);
  for (int iter = 0; iter < 10; ++iter) {
    Graph g;
    RandomSpe spe_ = random_spe(g, rng);
    EventPtr e = typed_event(rng, g, spe_.root, spe_.vars);
    if (!(prob(g, spe_.root, e) > 1e-3)) continue;
    ConditionOptions cached, uncached;
    uncached.memoize = false;
    uncached.query.memoize = false;
    NodeId a = condition(g, spe_.root, e, nullptr, cached);
    NodeId b = condition(g, spe_.root, e, nullptr, uncached);
    for (int k = 0; k < 10; ++k) {
      EventPtr probe = random_event(rng, spe_.vars);
      CHECK(prob(g, a, probe) == prob(g, b, probe));
    }
  }
}

TEST_CASE("equality conditioning: continuous point becomes an atom") {
  Graph g;
  NodeId leaf = normal_leaf(g, "X", 0, 1);
  NodeId post = constrain(g, leaf, eq("X", 1.5));
  REQUIRE(std::holds_alternative<LeafNode>(g.node(post).data));
  CHECK(prob(g, post, eq("X", 1.5)) == doctest::Approx(1.0));
  CHECK(prob(g, post, ivl("X", 0, false, 1, false)) == 0.0);

  // a point outside a truncated support has zero density
  Graph g2;
  NodeId trunc = normal_leaf(g2, "X", 0, 1, 2.0, kInf);
  CHECK_THROWS_AS(constrain(g2, trunc, eq("X", 0.0)), SpeError);

  // string equality against a continuous leaf is unsupported
  CHECK_THROWS_AS(
      constrain(g, leaf, containment(identity("X"), Outcomes::strings({"s"}))), SpeError);
}

TEST_CASE("equality conditioning keeps only minimal-degree mixture components") {
  Graph g;
  NodeId mixed = g.sum({normal_leaf(g, "X", 0, 1), atom_leaf(g, "X", 3)}, {0.5, 0.5});
  NodeId post = constrain(g, mixed, eq("X", 3.0));
  // only the atom child survives
  CHECK(prob(g, post, eq("X", 3.0)) == doctest::Approx(1.0));
  CHECK(std::holds_alternative<LeafNode>(g.node(post).data));

  // at a non-atom point the continuous child survives instead
  NodeId post2 = constrain(g, mixed, eq("X", 0.25));
  CHECK(prob(g, post2, eq("X", 0.25)) == doctest::Approx(1.0));
}

TEST_CASE("equality conditioning on a discrete-hidden continuous-observed chain") {
  // three steps; hidden H[t] in {0,1}, X[t] ~ normal(mu[H[t]], 1)
  const double p0 = 0.5;
  const double trans[2] = {0.2, 0.8};  // P(H[t]=1 | H[t-1])
  const double mu[2] = {0.0, 3.0};
  const double obs[3] = {0.4, 2.6, 2.9};

  Graph g;
  // enumerate the prior as a sum over all 8 hidden paths
  std::vector<NodeId> paths;
  std::vector<double> weights;
  for (int h0 = 0; h0 < 2; ++h0) {
    for (int h1 = 0; h1 < 2; ++h1) {
      for (int h2 = 0; h2 < 2; ++h2) {
        double w = (h0 ? p0 : 1 - p0);
        w *= h1 ? trans[h0] : 1 - trans[h0];
        w *= h2 ? trans[h1] : 1 - trans[h1];
        paths.push_back(g.product(
            {atom_leaf(g, "H0", h0), atom_leaf(g, "H1", h1), atom_leaf(g, "H2", h2),
             normal_leaf(g, "X0", mu[h0], 1), normal_leaf(g, "X1", mu[h1], 1),
             normal_leaf(g, "X2", mu[h2], 1)}));
        weights.push_back(w);
      }
    }
  }
  NodeId prior = g.sum(paths, weights);

  NodeId post = constrain(
      g, prior, conjunction({eq("X0", obs[0]), eq("X1", obs[1]), eq("X2", obs[2])}));
  CHECK(validate(g, post).empty());

  // brute-force Bayes over the 8 paths
  auto phi = [](double x, double m) {
    return std::exp(-0.5 * (x - m) * (x - m)) / std::sqrt(2 * M_PI);
  };
  double z = 0.0;
  double marg[3] = {0, 0, 0};
  int idx = 0;
  for (int h0 = 0; h0 < 2; ++h0) {
    for (int h1 = 0; h1 < 2; ++h1) {
      for (int h2 = 0; h2 < 2; ++h2) {
        double w = weights[idx++];
        double lik = phi(obs[0], mu[h0]) * phi(obs[1], mu[h1]) * phi(obs[2], mu[h2]);
        z += w * lik;
        if (h0) marg[0] += w * lik;
        if (h1) marg[1] += w * lik;
        if (h2) marg[2] += w * lik;
      }
    }
  }
  const char* names[3] = {"H0", "H1", "H2"};
  for (int t = 0; t < 3; ++t) {
    double expect = marg[t] / z;
    CHECK(prob(g, post, eq(names[t], 1)) == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("visit counts are linear for single-conjunction events") {
  // chain of nested sums with binary fan-out
  Graph g;
  NodeId level = g.sum({uniform_leaf(g, "X", 0, 1), uniform_leaf(g, "X", 0.25, 2)}, {0.5, 0.5});
  for (int d = 0; d < 4; ++d) {
    NodeId other = g.sum({uniform_leaf(g, "X", 0, 1.5 + d), uniform_leaf(g, "X", 0.5, 2 + d)},
                         {0.3, 0.7});
    level = g.sum({level, other}, {0.4, 0.6});
  }
  ConditionStats stats;
  condition(g, level, ivl("X", 0.4, false, 0.9, false), &stats);
  CHECK(stats.node_visits <= static_cast<long>(g.reachable_count(level)));

  // full-scope conjunction on a product visits every node exactly once
  Graph g2;
  NodeId root = g2.product({uniform_leaf(g2, "X", 0, 1), uniform_leaf(g2, "Y", 0, 1),
                            g2.sum({uniform_leaf(g2, "Z", 0, 2), uniform_leaf(g2, "Z", 1, 3)},
                                   {0.5, 0.5})});
  ConditionStats s2;
  condition(g2, root,
            conjunction({ivl("X", 0.1, false, 0.9, false), ivl("Y", 0.1, false, 0.9, false),
                         ivl("Z", 1.2, false, 1.8, false)}),
            &s2);
  CHECK(s2.node_visits == static_cast<long>(g2.reachable_count(root)));

  // a disjunctive event may exceed the node count
  ConditionStats s3;
  condition(g2, root,
            disjunction({conjunction({ivl("X", 0.0, false, 0.5, false),
                                      ivl("Y", 0.0, false, 0.9, false)}),
                         conjunction({ivl("X", 0.3, false, 0.9, false),
                                      ivl("Y", 0.2, false, 1.0, false)})}),
            &s3);
  CHECK(s3.node_visits >= static_cast<long>(g2.reachable_count(root)));
}
