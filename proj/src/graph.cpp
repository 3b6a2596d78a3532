#include "spe/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "spe/errors.hpp"

namespace spe {

namespace {

std::string fmt12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12e", x);
  return buf;
}

std::string dist_key(const Distribution& d) {
  if (std::holds_alternative<DistReal>(d)) {
    const auto& dr = std::get<DistReal>(d);
    std::string out = "R:" + dr.F->family();
    for (double p : dr.F->params()) out += "," + fmt12(p);
    return out + "|" + fmt12(dr.lo) + "," + fmt12(dr.hi);
  }
  if (std::holds_alternative<DistInt>(d)) {
    const auto& di = std::get<DistInt>(d);
    std::string out = "I:" + di.F->family();
    for (double p : di.F->params()) out += "," + fmt12(p);
    return out + "|" + fmt12(di.lo) + "," + fmt12(di.hi);
  }
  const auto& ds = std::get<DistStr>(d);
  std::string out = "S:";
  for (const auto& [s, w] : ds.atoms) out += s + "=" + fmt12(w) + ";";
  return out;
}

std::string transform_key(const TransformPtr& t) { return to_string(t); }

std::string env_key(const Environment& env) {
  std::string out;
  for (const auto& [x, t] : env.entries) out += x + "->" + transform_key(t) + ";";
  return out;
}

}  // namespace

std::string node_key(const Node& node) {
  if (std::holds_alternative<LeafNode>(node.data)) {
    const auto& l = std::get<LeafNode>(node.data);
    return "L|" + l.var + "|" + dist_key(l.dist) + "|" + env_key(l.env);
  }
  if (std::holds_alternative<SumNode>(node.data)) {
    const auto& s = std::get<SumNode>(node.data);
    std::string out = "S|";
    for (size_t i = 0; i < s.children.size(); ++i)
      out += std::to_string(s.children[i]) + ":" + fmt12(s.weights[i]) + ",";
    return out;
  }
  const auto& p = std::get<ProductNode>(node.data);
  std::string out = "P|";
  for (NodeId c : p.children) out += std::to_string(c) + ",";
  return out;
}

NodeId Graph::push(Node node, const std::string& key) {
  if (interning_) {
    auto it = intern_.find(key);
    if (it != intern_.end()) return it->second;
  }
  NodeId id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(std::move(node));
  intern_.emplace(key, id);
  return id;
}

NodeId Graph::leaf(std::string var, Distribution dist, Environment env) {
  if (env.entries.empty() || env.entries.front().first != var ||
      env.entries.front().second->kind != Transform::Kind::identity ||
      env.entries.front().second->var != var)
    fail(ErrorKind::domain, "leaf environment must start with the identity of its variable");
  Node n;
  n.scope.reserve(env.entries.size());
  for (const auto& [x, t] : env.entries) n.scope.push_back(x);
  std::sort(n.scope.begin(), n.scope.end());
  if (std::adjacent_find(n.scope.begin(), n.scope.end()) != n.scope.end())
    fail(ErrorKind::domain, "duplicate variable in leaf environment");
  n.data = LeafNode{std::move(var), std::move(dist), std::move(env)};
  std::string key = node_key(n);
  return push(std::move(n), key);
}

NodeId Graph::sum(std::vector<NodeId> children, std::vector<double> weights) {
  if (children.empty() || children.size() != weights.size())
    fail(ErrorKind::domain, "sum needs matching children and weights");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0 || !std::isfinite(w)) fail(ErrorKind::domain, "sum weights must be finite and nonnegative");
    total += w;
  }
  if (!(total > 0)) fail(ErrorKind::domain, "sum weights need a positive total");
  if (children.size() == 1) return children[0];
  const auto& first_scope = node(children[0]).scope;
  for (NodeId c : children) {
    if (node(c).scope != first_scope)
      fail(ErrorKind::domain, "sum children must share one scope");
  }
  Node n;
  n.scope = first_scope;
  n.data = SumNode{std::move(children), std::move(weights)};
  std::string key = node_key(n);
  return push(std::move(n), key);
}

NodeId Graph::product(std::vector<NodeId> children) {
  if (children.empty()) fail(ErrorKind::domain, "product needs children");
  // Flatten nested products into one level.
  std::vector<NodeId> flat;
  for (NodeId c : children) {
    if (std::holds_alternative<ProductNode>(node(c).data)) {
      const auto& pc = std::get<ProductNode>(node(c).data).children;
      flat.insert(flat.end(), pc.begin(), pc.end());
    } else {
      flat.push_back(c);
    }
  }
  if (flat.size() == 1) return flat[0];
  Node n;
  size_t total = 0;
  for (NodeId c : flat) total += node(c).scope.size();
  n.scope.reserve(total);
  for (NodeId c : flat)
    n.scope.insert(n.scope.end(), node(c).scope.begin(), node(c).scope.end());
  std::sort(n.scope.begin(), n.scope.end());
  if (std::adjacent_find(n.scope.begin(), n.scope.end()) != n.scope.end())
    fail(ErrorKind::domain, "product children must have disjoint scopes");
  n.data = ProductNode{std::move(flat)};
  std::string key = node_key(n);
  return push(std::move(n), key);
}

NodeId Graph::append_raw(Node node) {
  NodeId id = static_cast<NodeId>(nodes_.size());
  std::string key = node_key(node);
  nodes_.push_back(std::move(node));
  intern_.emplace(key, id);  // first id wins on duplicates
  return id;
}

std::vector<NodeId> Graph::reachable(NodeId root) const {
  std::vector<NodeId> out;
  std::vector<bool> seen(nodes_.size(), false);
  std::vector<NodeId> stack = {root};
  while (!stack.empty()) {
    NodeId id = stack.back();
    stack.pop_back();
    if (seen[static_cast<size_t>(id)]) continue;
    seen[static_cast<size_t>(id)] = true;
    out.push_back(id);
    const Node& n = node(id);
    if (std::holds_alternative<SumNode>(n.data)) {
      for (NodeId c : std::get<SumNode>(n.data).children) stack.push_back(c);
    } else if (std::holds_alternative<ProductNode>(n.data)) {
      for (NodeId c : std::get<ProductNode>(n.data).children) stack.push_back(c);
    }
  }
  return out;
}

size_t Graph::reachable_count(NodeId root) const { return reachable(root).size(); }

const std::vector<std::string>& scope(const Graph& g, NodeId id) {
  return g.node(id).scope;
}

namespace {

void validate_node(const Graph& g, NodeId id, std::vector<Violation>* out) {
  const Node& n = g.node(id);
  if (std::holds_alternative<LeafNode>(n.data)) {
    const auto& l = std::get<LeafNode>(n.data);
    const auto& entries = l.env.entries;
    if (entries.empty() || entries.front().first != l.var ||
        entries.front().second->kind != Transform::Kind::identity ||
        entries.front().second->var != l.var) {
      out->push_back({id, "C1", "leaf environment must map its variable to the identity"});
      return;
    }
    std::set<std::string> defined = {l.var};
    for (size_t i = 1; i < entries.size(); ++i) {
      for (const std::string& x : vars(entries[i].second)) {
        if (!defined.count(x)) {
          out->push_back({id, "C2",
                          "environment entry '" + entries[i].first +
                              "' references undefined variable '" + x + "'"});
          return;
        }
      }
      defined.insert(entries[i].first);
    }
    return;
  }
  if (std::holds_alternative<ProductNode>(n.data)) {
    const auto& p = std::get<ProductNode>(n.data);
    std::set<std::string> seen;
    for (NodeId c : p.children) {
      if (c >= id) {
        out->push_back({id, "acyclic", "product child does not precede its parent"});
        return;
      }
      for (const std::string& x : g.node(c).scope) {
        if (!seen.insert(x).second) {
          out->push_back({id, "C3", "product children share variable '" + x + "'"});
          return;
        }
      }
    }
    return;
  }
  const auto& s = std::get<SumNode>(n.data);
  double total = 0.0;
  for (NodeId c : s.children) {
    if (c >= id) {
      out->push_back({id, "acyclic", "sum child does not precede its parent"});
      return;
    }
    if (g.node(c).scope != g.node(s.children[0]).scope) {
      out->push_back({id, "C4", "sum children scopes differ"});
      return;
    }
  }
  for (double w : s.weights) total += w;
  if (!(total > 0)) out->push_back({id, "C5", "sum weight total is not positive"});
}

}  // namespace

std::vector<Violation> validate(const Graph& g, NodeId root) {
  std::vector<Violation> out;
  for (NodeId id : g.reachable(root)) validate_node(g, id, &out);
  return out;
}

std::string event_key(const EventPtr& e) { return to_string(e); }

namespace {

struct ProbMemo {
  std::unordered_map<std::string, double> cache;
};

double prob_rec(const Graph& g, NodeId id, const EventPtr& e, const QueryOptions& opts,
                ProbMemo* memo);

double prob_clause(const Graph& g, const ProductNode& p, const std::vector<EventPtr>& lits,
                   const QueryOptions& opts, ProbMemo* memo) {
  // Group literals by the owning child; factors multiply in log space.
  std::vector<std::vector<EventPtr>> owned(p.children.size());
  for (const EventPtr& lit : lits) {
    auto lv = vars(lit);
    bool placed = false;
    for (size_t i = 0; i < p.children.size(); ++i) {
      const auto& sc = g.node(p.children[i]).scope;
      bool all = true;
      for (const auto& x : lv)
        if (!std::binary_search(sc.begin(), sc.end(), x)) all = false;
      if (all) {
        owned[i].push_back(lit);
        placed = true;
        break;
      }
    }
    if (!placed)
      fail(ErrorKind::scope, "event variable outside the scope of every product child");
  }
  double log_acc = 0.0;
  for (size_t i = 0; i < p.children.size(); ++i) {
    if (owned[i].empty()) continue;
    double pi = prob_rec(g, p.children[i], conjunction(owned[i]), opts, memo);
    log_acc += std::log(pi);
  }
  return std::exp(log_acc);
}

double prob_product(const Graph& g, NodeId id, const ProductNode& p, const EventPtr& e,
                    const QueryOptions& opts, ProbMemo* memo) {
  EventPtr d = to_dnf(e);
  if (d->kind != Event::Kind::disjunction)
    return prob_clause(g, p, clause_literals(d), opts, memo);

  const auto& clauses = d->children;
  size_t ell = clauses.size();
  if (ell > static_cast<size_t>(opts.max_ie_clauses))
    fail(ErrorKind::too_complex,
         "inclusion-exclusion over " + std::to_string(ell) + " clauses exceeds the limit");
  double total = 0.0;
  for (uint64_t mask = 1; mask < (1ull << ell); ++mask) {
    std::vector<EventPtr> lits;
    int bits = 0;
    for (size_t i = 0; i < ell; ++i) {
      if (mask & (1ull << i)) {
        ++bits;
        auto cl = clause_literals(clauses[i]);
        lits.insert(lits.end(), cl.begin(), cl.end());
      }
    }
    double term = prob_clause(g, p, lits, opts, memo);
    total += (bits % 2 == 1) ? term : -term;
  }
  return std::min(1.0, std::max(0.0, total));
}

double prob_rec(const Graph& g, NodeId id, const EventPtr& e, const QueryOptions& opts,
                ProbMemo* memo) {
  std::string key;
  if (memo) {
    key = std::to_string(id) + "#" + event_key(e);
    auto it = memo->cache.find(key);
    if (it != memo->cache.end()) return it->second;
  }
  const Node& n = g.node(id);
  double result;
  if (std::holds_alternative<LeafNode>(n.data)) {
    const auto& l = std::get<LeafNode>(n.data);
    EventPtr solved = substitute_env(e, l.env);
    result = prob_of(l.dist, eval_along(solved, l.var));
  } else if (std::holds_alternative<SumNode>(n.data)) {
    const auto& s = std::get<SumNode>(n.data);
    double z = 0.0, acc = 0.0;
    for (size_t i = 0; i < s.children.size(); ++i) {
      z += s.weights[i];
      if (s.weights[i] > 0) acc += s.weights[i] * prob_rec(g, s.children[i], e, opts, memo);
    }
    result = acc / z;
  } else {
    result = prob_product(g, id, std::get<ProductNode>(n.data), e, opts, memo);
  }
  if (memo) memo->cache.emplace(std::move(key), result);
  return result;
}

}  // namespace

double prob(const Graph& g, NodeId root, const EventPtr& e, const QueryOptions& opts) {
  for (const std::string& x : vars(e)) {
    const auto& sc = g.node(root).scope;
    if (!std::binary_search(sc.begin(), sc.end(), x))
      fail(ErrorKind::scope, "event variable '" + x + "' is not in the scope");
  }
  ProbMemo memo;
  return prob_rec(g, root, e, opts, opts.memoize ? &memo : nullptr);
}

namespace {

// Equality-conjunction shape required by the density semantics: literals
// with identity transforms and singleton outcomes on distinct variables.
struct PointLiteral {
  std::string var;
  Outcome value;
};

std::vector<PointLiteral> point_literals(const EventPtr& e) {
  std::vector<PointLiteral> out;
  std::set<std::string> seen;
  for (const EventPtr& lit : clause_literals(e)) {
    if (lit->transform->kind != Transform::Kind::identity)
      fail(ErrorKind::unsupported_event, "density requires literals on non-transformed variables");
    const std::string& x = lit->transform->var;
    if (!seen.insert(x).second)
      fail(ErrorKind::unsupported_event, "density requires distinct variables per literal");
    if (lit->values.is_reals() && lit->values.as_reals().items.size() == 1) {
      double r = lit->values.as_reals().items[0];
      if (!std::isfinite(r))
        fail(ErrorKind::unsupported_event, "density point must be finite");
      out.push_back({x, Outcome(r)});
    } else if (lit->values.is_strings() && !lit->values.as_strings().complemented &&
               lit->values.as_strings().items.size() == 1) {
      out.push_back({x, Outcome(lit->values.as_strings().items[0])});
    } else {
      fail(ErrorKind::unsupported_event, "density requires singleton equality literals");
    }
  }
  return out;
}

Density density_rec(const Graph& g, NodeId id, const std::vector<PointLiteral>& lits,
                    const QueryOptions& opts);

Density density_sum(const Graph& g, const SumNode& s, const std::vector<PointLiteral>& lits,
                    const QueryOptions& opts) {
  std::vector<Density> ds;
  ds.reserve(s.children.size());
  for (NodeId c : s.children) ds.push_back(density_rec(g, c, lits, opts));
  double z = 0.0;
  for (double w : s.weights) z += w;
  int best = -1;
  for (size_t i = 0; i < ds.size(); ++i) {
    if (ds[i].value > 0 && (best < 0 || ds[i].degree < best)) best = ds[i].degree;
  }
  if (best < 0) return {1, 0.0};
  double acc = 0.0;
  for (size_t i = 0; i < ds.size(); ++i)
    if (ds[i].degree == best) acc += s.weights[i] * ds[i].value;
  return {best, acc / z};
}

Density density_rec(const Graph& g, NodeId id, const std::vector<PointLiteral>& lits,
                    const QueryOptions& opts) {
  const Node& n = g.node(id);
  if (std::holds_alternative<LeafNode>(n.data)) {
    const auto& l = std::get<LeafNode>(n.data);
    const PointLiteral* mine = nullptr;
    for (const auto& pl : lits) {
      if (std::binary_search(n.scope.begin(), n.scope.end(), pl.var)) {
        if (pl.var != l.var)
          fail(ErrorKind::unsupported_event,
               "density point on transformed variable '" + pl.var + "'");
        mine = &pl;
      }
    }
    if (!mine) return {0, 1.0};
    return density_at(l.dist, mine->value);
  }
  if (std::holds_alternative<SumNode>(n.data))
    return density_sum(g, std::get<SumNode>(n.data), lits, opts);

  const auto& p = std::get<ProductNode>(n.data);
  int degree = 0;
  double value = 1.0;
  for (NodeId c : p.children) {
    const auto& sc = g.node(c).scope;
    std::vector<PointLiteral> owned;
    for (const auto& pl : lits)
      if (std::binary_search(sc.begin(), sc.end(), pl.var)) owned.push_back(pl);
    if (owned.empty()) continue;
    Density d = density_rec(g, c, owned, opts);
    degree += d.degree;
    value *= d.value;
  }
  return {degree, value};
}

}  // namespace

Density density(const Graph& g, NodeId root, const EventPtr& e, const QueryOptions& opts) {
  auto lits = point_literals(e);
  if (lits.empty()) fail(ErrorKind::unsupported_event, "density requires at least one literal");
  for (const auto& pl : lits) {
    const auto& sc = g.node(root).scope;
    if (!std::binary_search(sc.begin(), sc.end(), pl.var))
      fail(ErrorKind::scope, "density variable '" + pl.var + "' is not in the scope");
  }
  return density_rec(g, root, lits, opts);
}

double next_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

namespace {

void simulate_rec(const Graph& g, NodeId id, std::mt19937_64& rng, Assignment* out) {
  const Node& n = g.node(id);
  if (std::holds_alternative<LeafNode>(n.data)) {
    const auto& l = std::get<LeafNode>(n.data);
    Outcome base = sample(l.dist, next_uniform(rng));
    out->insert_or_assign(l.var, base);
    for (size_t i = 1; i < l.env.entries.size(); ++i) {
      const auto& [x, t] = l.env.entries[i];
      auto tv = vars(t);
      const std::string& y = *tv.begin();
      auto it = out->find(y);
      if (it == out->end() || !it->second.is_real())
        fail(ErrorKind::numeric, "transform of an undefined or non-real value");
      auto val = evaluate(t, it->second.real());
      if (!val) fail(ErrorKind::numeric, "sampled value outside transform domain");
      out->insert_or_assign(x, Outcome(*val));
    }
    return;
  }
  if (std::holds_alternative<ProductNode>(n.data)) {
    for (NodeId c : std::get<ProductNode>(n.data).children) simulate_rec(g, c, rng, out);
    return;
  }
  const auto& s = std::get<SumNode>(n.data);
  double z = 0.0;
  for (double w : s.weights) z += w;
  double u = next_uniform(rng) * z;
  double acc = 0.0;
  size_t pick = s.children.size() - 1;
  for (size_t i = 0; i < s.children.size(); ++i) {
    acc += s.weights[i];
    if (u < acc) {
      pick = i;
      break;
    }
  }
  simulate_rec(g, s.children[pick], rng, out);
}

}  // namespace

Assignment simulate(const Graph& g, NodeId root, std::span<const std::string> request,
                    std::mt19937_64& rng) {
  for (const std::string& x : request) {
    const auto& sc = g.node(root).scope;
    if (!std::binary_search(sc.begin(), sc.end(), x))
      fail(ErrorKind::scope, "simulate variable '" + x + "' is not in the scope");
  }
  Assignment all;
  simulate_rec(g, root, rng, &all);
  Assignment out;
  for (const std::string& x : request) {
    auto it = all.find(x);
    if (it != all.end()) out.insert(*it);
  }
  return out;
}

}  // namespace spe
