// Acceptance suite: runs every acceptance criterion end to end and prints
// one pass/fail line per criterion. Exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "models.hpp"
#include "spe/condition.hpp"
#include "spe/errors.hpp"
#include "spe/serialize.hpp"
#include "spe/translator.hpp"

using namespace spe;
using namespace spe::testmodels;

namespace {

struct Criterion {
  int number;
  std::string name;
  std::function<bool(std::string&)> run;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool close(double got, double want, double tol) { return std::fabs(got - want) <= tol; }

const char* kGpaProgram = R"(
Nationality ~ choice({'India': 0.5, 'USA': 0.5})
if (Nationality == 'India'):
    Perfect ~ bernoulli(p=0.10)
    if Perfect:
        GPA ~ atom(10)
    else:
        GPA ~ uniform(0, 10)
else:
    Perfect ~ bernoulli(p=0.15)
    if Perfect:
        GPA ~ atom(4)
    else:
        GPA ~ uniform(0, 4)
)";

const char* kGpaEvent = "((Nationality == 'USA') and (GPA > 3)) or (8 < GPA < 10)";

std::string hmm_program(int n_step) {
  return R"(
p_transition = [.2, .8]
mu_x = [[5, 7], [5, 15]]
mu_y = [[5, 8], [3, 8]]
n_step = )" +
         std::to_string(n_step) + R"(
Z = array(n_step)
X = array(n_step)
Y = array(n_step)
separated ~ bernoulli(p=.4)
switch separated cases (s in [0, 1]):
    Z[0] ~ bernoulli(p=.5)
    switch Z[0] cases (z in [0, 1]):
        X[0] ~ normal(mu_x[s][z], 1)
        Y[0] ~ poisson(mu_y[s][z])
    for t in range(1, n_step):
        switch Z[t-1] cases (z in [0, 1]):
            Z[t] ~ bernoulli(p_transition[z])
        switch Z[t] cases (z in [0, 1]):
            X[t] ~ normal(mu_x[s][z], 1)
            Y[t] ~ poisson(mu_y[s][z])
)";
}

std::vector<double> normalized_weights(const Graph& g, NodeId id) {
  const auto& s = std::get<SumNode>(g.node(id).data);
  double z = 0;
  for (double w : s.weights) z += w;
  std::vector<double> out;
  for (double w : s.weights) out.push_back(w / z);
  return out;
}

// ---- 1. Indian GPA end to end ----

bool criterion_gpa(std::string& detail) {
  auto start = std::chrono::steady_clock::now();
  TranslateResult r = translate_source(kGpaProgram);
  NodeId post = condition(r.graph, r.root, compile_event_text(kGpaEvent));
  if (!validate(r.graph, post).empty()) {
    detail = "posterior fails validation";
    return false;
  }
  if (!std::holds_alternative<SumNode>(r.graph.node(post).data)) {
    detail = "posterior root is not a mixture";
    return false;
  }
  auto w = normalized_weights(r.graph, post);
  const double exact0 = 0.09 / 0.27125, exact1 = 0.18125 / 0.27125;
  bool ok = w.size() == 2 && close(w[0], exact0, 1e-9) && close(w[1], exact1, 1e-9) &&
            close(w[0], 0.33, 5e-3) && close(w[1], 0.67, 5e-3);

  // the second component holds the reweighted perfect-score mixture
  NodeId usa = std::get<SumNode>(r.graph.node(post).data).children[1];
  NodeId inner = -1;
  for (NodeId c : std::get<ProductNode>(r.graph.node(usa).data).children)
    if (std::holds_alternative<SumNode>(r.graph.node(c).data)) inner = c;
  if (inner < 0) {
    detail = "posterior USA component has no mixture child";
    return false;
  }
  auto wu = normalized_weights(r.graph, inner);
  const double usa0 = 0.15 / 0.3625, usa1 = 0.2125 / 0.3625;
  ok = ok && wu.size() == 2 && close(wu[0], usa0, 1e-9) && close(wu[1], usa1, 1e-9) &&
       close(wu[0], 0.41, 5e-3) && close(wu[1], 0.59, 5e-3);

  double secs = seconds_since(start);
  std::ostringstream os;
  os << "root [" << w[0] << ", " << w[1] << "], inner [" << wu[0] << ", " << wu[1] << "], "
     << secs << " s";
  detail = os.str();
  return ok && secs < 1.0;
}

// ---- 2. Preimage of the cubic and the branch-split posterior ----

bool criterion_cubic(std::string& detail) {
  auto start = std::chrono::steady_clock::now();
  // Exact roots of p(x) = 2 for p = -x^3 + x^2 + 6x (independently verified);
  // the text prints -2.174 for the first, its own figure rounds it to -2.2.
  const double r_lo = -2.1774096808992836;
  const double r_hi = 0.32163717426329597;

  auto cubic = polynomial(identity("X"), {0, 6, 1, -1});
  Outcomes pre = preimage(cubic, Outcomes::interval(0, false, 2, false));
  Outcomes left = intersection_of(pre, Outcomes::interval(-kInf, true, 1, true));
  if (!left.is_union() || left.as_union().members.size() != 2) {
    detail = "left-branch preimage is not two intervals";
    return false;
  }
  const auto& m0 = left.as_union().members[0].as_interval();
  const auto& m1 = left.as_union().members[1].as_interval();
  bool endpoints_exact = close(m0.lo, r_lo, 1e-9) && close(m0.hi, -2.0, 1e-9) &&
                         close(m1.lo, 0.0, 1e-9) && close(m1.hi, r_hi, 1e-9);
  bool endpoints_printed = close(m0.hi, -2.0, 1e-3) && close(m1.lo, 0.0, 1e-3) &&
                           close(m1.hi, 0.321, 1e-3) && close(m0.lo, -2.174, 5e-3);

  // Posterior component weights, with the right branch as the printed
  // analysis has it (5*sqrt(X) - 9, reaching [0,2]); the program text's +11
  // variant leaves the right branch no mass and is recorded below. The
  // figure labels a flat mixture, so nested sums are flattened here.
  TranslateResult consistent = translate_source(
      "X ~ normal(0, 2)\n"
      "if X < 1:\n"
      "    Z ~ -X**3 + X**2 + 6*X\n"
      "else:\n"
      "    Z ~ 5*sqrt(X) - 9\n");
  NodeId post = condition(consistent.graph, consistent.root,
                          compile_event_text("Z**2 <= 4 and Z >= 0"));
  std::function<void(const Graph&, NodeId, double, std::vector<double>*)> flatten =
      [&](const Graph& g, NodeId id, double mass, std::vector<double>* out) {
        if (std::holds_alternative<SumNode>(g.node(id).data)) {
          const auto& s = std::get<SumNode>(g.node(id).data);
          double z = 0;
          for (double w : s.weights) z += w;
          for (size_t i = 0; i < s.children.size(); ++i)
            flatten(g, s.children[i], mass * s.weights[i] / z, out);
        } else {
          out->push_back(mass);
        }
      };
  std::vector<double> w;
  flatten(consistent.graph, post, 1.0, &w);
  bool weights_ok = w.size() == 3 && close(w[0], 0.16, 1e-2) && close(w[1], 0.49, 1e-2);
  double right_weight = w.size() == 3 ? w[2] : 0.0;

  TranslateResult literal = translate_source(
      "X ~ normal(0, 2)\n"
      "if X < 1:\n"
      "    Z ~ -X**3 + X**2 + 6*X\n"
      "else:\n"
      "    Z ~ 5*sqrt(X) + 11\n");
  NodeId lit_post = condition(literal.graph, literal.root,
                              compile_event_text("Z**2 <= 4 and Z >= 0"));
  std::vector<double> wl;
  flatten(literal.graph, lit_post, 1.0, &wl);

  double secs = seconds_since(start);
  std::ostringstream os;
  os << "intervals [" << m0.lo << ", " << m0.hi << "] u [" << m1.lo << ", " << m1.hi
     << "] (text prints -2.174 for " << r_lo << "); component weights [" << w[0] << ", "
     << w[1] << "] with right branch " << right_weight << " recorded, not asserted"
     << "; +11 program keeps " << wl.size() << " components; " << secs << " s";
  detail = os.str();
  return endpoints_exact && endpoints_printed && weights_ok && secs < 1.0;
}

// ---- 3. Disjoin bound ----

EventPtr random_rect(std::mt19937_64& rng, const std::vector<std::string>& dims) {
  std::uniform_real_distribution<double> lo(-10, 8);
  std::vector<EventPtr> lits;
  size_t nvars = 1 + rng() % dims.size();
  std::vector<std::string> names = dims;
  std::shuffle(names.begin(), names.end(), rng);
  for (size_t i = 0; i < nvars; ++i) {
    double a = std::round(lo(rng));
    double b = a + 1 + static_cast<double>(rng() % 6);
    lits.push_back(containment(identity(names[i]),
                               Outcomes::interval(a, rng() % 2 == 0, b, rng() % 2 == 0)));
  }
  return lits.size() == 1 ? lits[0] : conjunction(lits);
}

bool point_satisfies(const EventPtr& e, const std::map<std::string, double>& pt) {
  switch (e->kind) {
    case Event::Kind::containment: {
      auto it = pt.find(*vars(e->transform).begin());
      if (it == pt.end()) return false;
      auto y = evaluate(e->transform, it->second);
      return y && contains_real(e->values, *y);
    }
    case Event::Kind::conjunction:
      for (const auto& c : e->children)
        if (!point_satisfies(c, pt)) return false;
      return true;
    default:
      for (const auto& c : e->children)
        if (point_satisfies(c, pt)) return true;
      return false;
  }
}

bool criterion_disjoin(std::string& detail) {
  auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1234321);
  std::vector<std::string> dims = {"X", "Y", "Z"};
  std::uniform_real_distribution<double> probe(-12, 12);
  size_t max_clauses = 0;
  for (int iter = 0; iter < 200; ++iter) {
    size_t h = 1 + rng() % 3;
    std::vector<std::string> use(dims.begin(), dims.begin() + h);
    size_t m = 1 + rng() % 5;
    std::vector<EventPtr> boxes;
    for (size_t i = 0; i < m; ++i) boxes.push_back(random_rect(rng, use));
    EventPtr e = boxes.size() == 1 ? boxes[0] : disjunction(boxes);
    EventPtr dj = disjoin(e);
    auto clauses = dnf_clauses(dj);
    max_clauses = std::max(max_clauses, clauses.size());

    size_t norm_m = dnf_clauses(normalize(e)).size();
    size_t bound = 1;
    for (size_t i = 0; i < use.size(); ++i) bound *= 2 * norm_m - 1;
    if (clauses.size() > bound) {
      detail = "clause bound exceeded: " + std::to_string(clauses.size()) + " > " +
               std::to_string(bound);
      return false;
    }
    for (size_t i = 0; i < clauses.size(); ++i) {
      for (size_t j = i + 1; j < clauses.size(); ++j) {
        if (!clauses_disjoint(clauses[i], clauses[j])) {
          detail = "clauses " + std::to_string(i) + "," + std::to_string(j) + " overlap";
          return false;
        }
      }
    }
    for (int k = 0; k < 1000; ++k) {
      std::map<std::string, double> pt;
      for (const auto& x : use) pt[x] = std::round(probe(rng) * 4) / 4 + 0.1;
      if (point_satisfies(e, pt) != point_satisfies(dj, pt)) {
        detail = "semantic mismatch at a probe point";
        return false;
      }
    }
  }

  // the nested two-box figure: exactly five clauses
  EventPtr inner = conjunction(
      {containment(identity("X"), Outcomes::interval(1, false, 2, false)),
       containment(identity("Y"), Outcomes::interval(1, false, 2, false))});
  EventPtr outer = conjunction(
      {containment(identity("X"), Outcomes::interval(0, false, 3, false)),
       containment(identity("Y"), Outcomes::interval(0, false, 3, false))});
  size_t five = dnf_clauses(disjoin(disjunction({inner, outer}))).size();

  double secs = seconds_since(start);
  std::ostringstream os;
  os << "200 instances, max clauses " << max_clauses << ", two-box case -> " << five
     << " clauses, " << secs << " s";
  detail = os.str();
  return five == 5 && secs < 10.0;
}

// ---- 4. Closure under conditioning ----

bool criterion_closure(std::string& detail) {
  auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240710);
  int spes = 0;
  double worst = 0;
  while (spes < 100) {
    Graph g;
    RandomSpe s = random_spe(g, rng);
    EventPtr e = typed_event(rng, g, s.root, s.vars);
    double pe = prob(g, s.root, e);
    if (!(pe > 1e-4)) continue;
    ++spes;
    NodeId post = condition(g, s.root, e);
    for (int k = 0; k < 50; ++k) {
      EventPtr probe = random_event(rng, s.vars);
      double joint = prob(g, s.root, conjunction({e, probe}));
      double got = prob(g, post, probe);
      double err = std::fabs(got - joint / pe);
      worst = std::max(worst, err);
      if (err > 1e-9) {
        std::ostringstream os;
        os << "spe " << spes << ": |" << got << " - " << joint / pe << "| = " << err;
        detail = os.str();
        return false;
      }
    }
  }
  double secs = seconds_since(start);
  std::ostringstream os;
  os << "100 graphs x 50 probes, worst error " << worst << ", " << secs << " s";
  detail = os.str();
  return secs < 60.0;
}

// ---- 5. Linear-time conditioning ----

EventPtr full_scope_conjunction(const Graph& g, NodeId root, std::mt19937_64& rng) {
  auto sorts = var_sorts(g, root);
  std::vector<EventPtr> lits;
  for (const auto& x : scope(g, root)) {
    if (sorts[x].strings) {
      lits.push_back(containment(identity(x), Outcomes::strings({"a", "b"})));
    } else {
      double lo = -40 - static_cast<double>(rng() % 4);
      double hi = 40 + static_cast<double>(rng() % 4);
      lits.push_back(containment(identity(x), Outcomes::interval(lo, true, hi, false)));
    }
  }
  return lits.size() == 1 ? lits[0] : conjunction(lits);
}

NodeId random_sorted_spe(Graph& g, std::mt19937_64& rng, std::vector<std::string>* names_out) {
  // every variable keeps one sort across all branches
  static const std::vector<std::string> pool = {"X", "Y", "Z", "W"};
  size_t n = 1 + rng() % 4;
  std::vector<std::string> names(pool.begin(), pool.begin() + n);
  std::map<std::string, bool> is_str;
  for (const auto& x : names) is_str[x] = rng() % 4 == 0;
  std::function<NodeId(const std::vector<std::string>&, int)> build =
      [&](const std::vector<std::string>& vs, int depth) -> NodeId {
    if (vs.size() == 1 && (depth <= 0 || rng() % 2 == 0)) {
      std::uniform_real_distribution<double> uni(0.1, 0.9);
      if (is_str[vs[0]])
        return g.leaf(vs[0], make_dist_str({{"a", uni(rng)}, {"b", uni(rng)}}), id_env(vs[0]));
      switch (rng() % 4) {
        case 0:
          return g.leaf(vs[0], make_dist_real(normal_cdf(uni(rng), 1), -kInf, kInf),
                        id_env(vs[0]));
        case 1:
          return g.leaf(vs[0], make_dist_real(uniform_cdf(-1, 2), -1, 2), id_env(vs[0]));
        case 2:
          return g.leaf(vs[0], make_dist_int(poisson_cdf(2 + uni(rng)), 0, kInf),
                        id_env(vs[0]));
        default:
          return g.leaf(vs[0], make_dist_int(binomial_cdf(1, uni(rng)), 0, 1), id_env(vs[0]));
      }
    }
    if (vs.size() > 1 && (depth <= 0 || rng() % 2 == 0)) {
      std::vector<std::string> left(vs.begin(), vs.begin() + vs.size() / 2);
      std::vector<std::string> right(vs.begin() + vs.size() / 2, vs.end());
      return g.product({build(left, depth - 1), build(right, depth - 1)});
    }
    std::uniform_real_distribution<double> w(0.2, 0.8);
    NodeId a = build(vs, depth - 1);
    NodeId b = build(vs, depth - 1);
    double wa = w(rng);
    return g.sum({a, b}, {wa, 1 - wa});
  };
  *names_out = names;
  return build(names, 3);
}

bool criterion_linear_visits(std::string& detail) {
  auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(777);

  TranslateResult hmm = translate_source(hmm_program(10));
  ConditionStats stats;
  condition(hmm.graph, hmm.root, full_scope_conjunction(hmm.graph, hmm.root, rng), &stats);
  long reachable = static_cast<long>(hmm.graph.reachable_count(hmm.root));
  if (stats.node_visits != reachable) {
    detail = "hmm(10): " + std::to_string(stats.node_visits) + " visits vs " +
             std::to_string(reachable) + " nodes";
    return false;
  }
  long hmm_visits = stats.node_visits;

  for (int iter = 0; iter < 50; ++iter) {
    Graph g;
    std::vector<std::string> names;
    NodeId root = random_sorted_spe(g, rng, &names);
    ConditionStats s2;
    condition(g, root, full_scope_conjunction(g, root, rng), &s2);
    long count = static_cast<long>(g.reachable_count(root));
    if (s2.node_visits != count) {
      detail = "random spe " + std::to_string(iter) + ": " + std::to_string(s2.node_visits) +
               " visits vs " + std::to_string(count) + " nodes";
      return false;
    }
  }
  double secs = seconds_since(start);
  std::ostringstream os;
  os << "hmm(10): " << hmm_visits << " visits == " << reachable
     << " nodes; 50 random graphs exact, " << secs << " s";
  detail = os.str();
  return true;
}

// ---- 6. HMM scaling ----

bool criterion_hmm_scaling(std::string& detail) {
  auto start = std::chrono::steady_clock::now();
  std::vector<size_t> counts;
  for (int n : {2, 4, 8, 16}) {
    TranslateResult r = translate_source(hmm_program(n));
    counts.push_back(r.graph.reachable_count(r.root));
  }
  bool linear = true;
  for (size_t i = 1; i < counts.size(); ++i)
    linear = linear && (double(counts[i]) / double(counts[i - 1]) <= 2.2);

  TranslateOptions off;
  off.optimize = false;
  TranslateResult raw = translate_source(hmm_program(8), off);
  size_t raw8 = raw.graph.reachable_count(raw.root);
  bool blowup = raw8 >= 10 * counts[2];

  double secs = seconds_since(start);
  std::ostringstream os;
  os << "optimized nodes {" << counts[0] << ", " << counts[1] << ", " << counts[2] << ", "
     << counts[3] << "}, unoptimized at 8 steps: " << raw8 << ", " << secs << " s";
  detail = os.str();
  return linear && blowup;
}

// ---- 7. Measure-zero conditioning on a hidden chain ----

bool criterion_measure_zero(std::string& detail) {
  auto start = std::chrono::steady_clock::now();
  const double obs[3] = {0.4, 2.6, 2.9};
  const double mu[2] = {0.0, 3.0};
  const double trans[2] = {0.2, 0.8};

  TranslateResult r = translate_source(R"(
mu = [0, 3]
p_trans = [.2, .8]
Z = array(3)
X = array(3)
Z[0] ~ bernoulli(p=.5)
switch Z[0] cases (z in [0, 1]):
    X[0] ~ normal(mu[z], 1)
for t in range(1, 3):
    switch Z[t-1] cases (z in [0, 1]):
        Z[t] ~ bernoulli(p_trans[z])
    switch Z[t] cases (z in [0, 1]):
        X[t] ~ normal(mu[z], 1)
)");
  NodeId post = constrain(r.graph, r.root,
                          compile_event_text("X[0] == 0.4 and X[1] == 2.6 and X[2] == 2.9"));

  auto phi = [](double x, double m) {
    return std::exp(-0.5 * (x - m) * (x - m)) / std::sqrt(2 * M_PI);
  };
  double z = 0.0, marg[3] = {0, 0, 0};
  for (int h0 = 0; h0 < 2; ++h0) {
    for (int h1 = 0; h1 < 2; ++h1) {
      for (int h2 = 0; h2 < 2; ++h2) {
        double w = (h0 ? 0.5 : 0.5);
        w *= h1 ? trans[h0] : 1 - trans[h0];
        w *= h2 ? trans[h1] : 1 - trans[h1];
        double lik = phi(obs[0], mu[h0]) * phi(obs[1], mu[h1]) * phi(obs[2], mu[h2]);
        z += w * lik;
        if (h0) marg[0] += w * lik;
        if (h1) marg[1] += w * lik;
        if (h2) marg[2] += w * lik;
      }
    }
  }
  double worst = 0;
  for (int t = 0; t < 3; ++t) {
    double got = prob(r.graph, post,
                      compile_event_text("Z[" + std::to_string(t) + "] == 1"));
    worst = std::max(worst, std::fabs(got - marg[t] / z));
  }
  double secs = seconds_since(start);
  std::ostringstream os;
  os << "worst posterior error " << worst << " across 3 steps, " << secs << " s";
  detail = os.str();
  return worst <= 1e-9;
}

// ---- 8. Round trip through source ----

bool criterion_round_trip(std::string& detail) {
  auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(808808);
  double worst = 0;
  for (int iter = 0; iter < 100; ++iter) {
    Graph g;
    RandomSpe s = random_spe(g, rng, 3, 2);
    std::string source = to_source(g, s.root);
    TranslateResult rt = translate_source(source);
    for (int k = 0; k < 50; ++k) {
      EventPtr probe = random_event(rng, s.vars);
      double a = prob(g, s.root, probe);
      double b = prob(rt.graph, rt.root, probe);
      worst = std::max(worst, std::fabs(a - b));
      if (std::fabs(a - b) > 1e-9) {
        std::ostringstream os;
        os << "iteration " << iter << ": " << a << " vs " << b << " on " << to_string(probe);
        detail = os.str();
        return false;
      }
    }
  }
  double secs = seconds_since(start);
  std::ostringstream os;
  os << "100 graphs x 50 probes, worst difference " << worst << ", " << secs << " s";
  detail = os.str();
  return true;
}

// ---- 9. Monte Carlo consistency ----

std::string random_program(std::mt19937_64& rng, std::vector<std::string>* vars_out) {
  std::uniform_real_distribution<double> uni(0, 1);
  std::ostringstream os;
  std::vector<std::string> vars;
  auto sample_line = [&](const std::string& name, const std::string& indent) {
    switch (rng() % 5) {
      case 0:
        os << indent << name << " ~ normal(" << uni(rng) * 4 - 2 << ", " << 0.5 + uni(rng)
           << ")\n";
        break;
      case 1:
        os << indent << name << " ~ uniform(" << -uni(rng) << ", " << 1 + uni(rng) << ")\n";
        break;
      case 2:
        os << indent << name << " ~ poisson(" << 1 + 3 * uni(rng) << ")\n";
        break;
      case 3:
        os << indent << name << " ~ bernoulli(p=" << 0.2 + 0.6 * uni(rng) << ")\n";
        break;
      default:
        os << indent << name << " ~ choice({'a': " << 0.2 + uni(rng) << ", 'b': "
           << 0.2 + uni(rng) << "})\n";
        break;
    }
  };
  sample_line("A", "");
  os << "B ~ normal(" << uni(rng) * 2 << ", 1)\n";
  vars = {"A", "B"};
  if (rng() % 2 == 0) {
    os << "T = B**2 + " << uni(rng) << "\n";
    vars.push_back("T");
  }
  // a branch on B defining C both ways
  os << "if B < " << uni(rng) << ":\n";
  sample_line("C", "    ");
  os << "else:\n";
  sample_line("C", "    ");
  vars.push_back("C");
  if (rng() % 2 == 0) os << "condition(B > " << -0.5 - uni(rng) << ")\n";
  *vars_out = vars;
  return os.str();
}

bool criterion_monte_carlo(std::string& detail) {
  auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(5557);

  struct Program {
    std::string text;
    std::vector<std::string> queries;
  };
  std::vector<Program> programs = {
      {kGpaProgram,
       {"GPA <= 4", "Nationality == 'India'", "Perfect == 1 or GPA > 9",
        std::string(kGpaEvent)}},
      {hmm_program(2), {"X[0] <= 5.5", "Z[1] == 1", "Y[0] == 5 or X[1] > 7"}},
      {"X ~ normal(0, 2)\nif X < 1:\n    Z ~ -X**3 + X**2 + 6*X\nelse:\n    Z ~ 5*sqrt(X) + 11\n",
       {"Z >= 0", "X < 1 and Z > 2", "Z**2 <= 4 and Z >= 0"}},
  };
  for (int i = 0; i < 10; ++i) {
    std::vector<std::string> names;
    std::string text = random_program(rng, &names);
    Program p{text, {}};
    std::uniform_real_distribution<double> uni(-1, 2);
    for (int q = 0; q < 3; ++q) {
      const std::string& v = names[rng() % names.size()];
      double cut = uni(rng);
      p.queries.push_back(v == "A" && text.find("A ~ choice") != std::string::npos
                              ? "A == 'a'"
                              : v + " <= " + std::to_string(cut));
    }
    programs.push_back(std::move(p));
  }

  const int n = 100000;
  double worst_sigma = 0;
  for (size_t pi = 0; pi < programs.size(); ++pi) {
    TranslateResult r = translate_source(programs[pi].text);
    std::vector<std::string> names = scope(r.graph, r.root);
    std::mt19937_64 sim(9000 + pi);
    std::vector<Assignment> draws;
    draws.reserve(n);
    for (int k = 0; k < n; ++k) draws.push_back(simulate(r.graph, r.root, names, sim));
    for (const auto& text : programs[pi].queries) {
      EventPtr e = compile_event_text(text);
      double exact = prob(r.graph, r.root, e);
      long hits = 0;
      for (const auto& a : draws) {
        std::function<bool(const EventPtr&)> sat = [&](const EventPtr& ev) -> bool {
          switch (ev->kind) {
            case Event::Kind::containment: {
              const Outcome& o = a.at(*vars(ev->transform).begin());
              if (!o.is_real())
                return ev->transform->kind == Transform::Kind::identity &&
                       contains(ev->values, o);
              auto y = evaluate(ev->transform, o.real());
              return y && contains_real(ev->values, *y);
            }
            case Event::Kind::conjunction:
              for (const auto& c : ev->children)
                if (!sat(c)) return false;
              return true;
            default:
              for (const auto& c : ev->children)
                if (sat(c)) return true;
              return false;
          }
        };
        hits += sat(e);
      }
      double mc = double(hits) / n;
      double se = std::sqrt(std::max(exact * (1 - exact), 1e-12) / n);
      double sigmas = std::fabs(mc - exact) / (se + 1e-3 / 5);
      worst_sigma = std::max(worst_sigma, sigmas);
      if (std::fabs(mc - exact) > 5 * se + 1e-3) {
        std::ostringstream os;
        os << "program " << pi << " query '" << text << "': exact " << exact << " vs mc "
           << mc;
        detail = os.str();
        return false;
      }
    }
  }
  double secs = seconds_since(start);
  std::ostringstream os;
  os << programs.size() << " programs, worst deviation " << worst_sigma
     << " sigma-equivalents, " << secs << " s";
  detail = os.str();
  return true;
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "mixed-type student model end to end", criterion_gpa},
      {2, "cubic preimage and branch-split posterior", criterion_cubic},
      {3, "disjoin bound and the two-box partition", criterion_disjoin},
      {4, "closure under conditioning", criterion_closure},
      {5, "linear-time conditioning visit counts", criterion_linear_visits},
      {6, "hidden chain node-count scaling", criterion_hmm_scaling},
      {7, "measure-zero equality conditioning", criterion_measure_zero},
      {8, "source round trip preserves distributions", criterion_round_trip},
      {9, "exact probabilities vs Monte Carlo", criterion_monte_carlo},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << c.number << ": " << c.name
              << " -- " << detail << "\n";
    failures += !ok;
  }
  if (failures) {
    std::cout << failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all 9 criteria passed\n";
  return 0;
}
