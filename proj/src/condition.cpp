#include "spe/condition.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "spe/errors.hpp"

namespace spe {

namespace {

struct Ctx {
  Graph& g;
  const ConditionOptions& opts;
  ConditionStats* stats;
  std::unordered_map<std::string, NodeId> memo;

  void visit(NodeId) {
    if (stats) ++stats->node_visits;
  }
};

NodeId condition_rec(Ctx& ctx, NodeId id, const EventPtr& e);

// ---- Leaf cases ----

NodeId condition_leaf_str(Ctx& ctx, NodeId id, const LeafNode& l, const Outcomes& v) {
  // Real components of v carry no nominal mass; only the string part acts.
  const Outcomes* strpart = nullptr;
  if (v.is_strings()) {
    strpart = &v;
  } else if (v.is_union()) {
    for (const Outcomes& m : v.as_union().members)
      if (m.is_strings()) strpart = &m;
  }
  if (!strpart) fail(ErrorKind::zero_probability, "conditioning event has zero probability");
  const auto& ss = strpart->as_strings();
  const auto& ds = std::get<DistStr>(l.dist);
  std::vector<std::pair<std::string, double>> atoms;
  double total = 0.0;
  for (const auto& [s, w] : ds.atoms) {
    bool listed = std::binary_search(ss.items.begin(), ss.items.end(), s);
    bool keep = ss.complemented ? !listed : listed;
    if (keep) {
      atoms.emplace_back(s, w);
      total += w;
    }
  }
  if (!(total > 0)) fail(ErrorKind::zero_probability, "conditioning event has zero probability");
  return ctx.g.leaf(l.var, make_dist_str(std::move(atoms)), l.env);
}

NodeId condition_leaf_real(Ctx& ctx, NodeId id, const LeafNode& l, const Outcomes& v) {
  const auto& dr = std::get<DistReal>(l.dist);
  Outcomes w = intersection_of(Outcomes::interval(dr.lo, false, dr.hi, false), v);
  if (w.is_interval()) {
    const auto& iv = w.as_interval();
    return ctx.g.leaf(l.var, make_dist_real(dr.F, iv.lo, iv.hi), l.env);
  }
  if (w.is_union()) {
    std::vector<NodeId> children;
    std::vector<double> weights;
    for (const Outcomes& m : w.as_union().members) {
      double wm = prob_of(l.dist, m);
      if (wm > 0) {
        children.push_back(
            condition_rec(ctx, id, containment(identity(l.var), m)));
        weights.push_back(wm);
      }
    }
    if (children.empty())
      fail(ErrorKind::zero_probability, "conditioning event has zero probability");
    return ctx.g.sum(std::move(children), std::move(weights));
  }
  fail(ErrorKind::zero_probability, "conditioning event has zero probability");
}

NodeId condition_leaf_int(Ctx& ctx, NodeId id, const LeafNode& l, const Outcomes& v) {
  const auto& di = std::get<DistInt>(l.dist);
  Outcomes w = intersection_of(Outcomes::interval(di.lo, false, di.hi, false), v);
  if (w.is_reals()) {
    std::vector<NodeId> children;
    std::vector<double> weights;
    for (double r : w.as_reals().items) {
      double wm = prob_of(l.dist, Outcomes::point(r));
      if (wm > 0) {
        children.push_back(ctx.g.leaf(l.var, make_dist_int(di.F, r - 0.5, r), l.env));
        weights.push_back(wm);
      }
    }
    if (children.empty())
      fail(ErrorKind::zero_probability, "conditioning event has zero probability");
    return ctx.g.sum(std::move(children), std::move(weights));
  }
  if (w.is_interval()) {
    const auto& iv = w.as_interval();
    // Shrink to the nearest atoms satisfying the open/closed bounds.
    double lo = iv.lo_open ? di.F->next_atom(iv.lo) : di.F->ceil_atom(iv.lo);
    double hi = iv.hi_open ? di.F->prev_atom(iv.hi) : di.F->floor_atom(iv.hi);
    if (lo > hi || !(di.F->cdf(di.F->floor_atom(hi)) - di.F->cdf(di.F->prev_atom(lo)) > 0))
      fail(ErrorKind::zero_probability, "conditioning event has zero probability");
    return ctx.g.leaf(l.var, make_dist_int(di.F, lo, hi), l.env);
  }
  if (w.is_union()) {
    std::vector<NodeId> children;
    std::vector<double> weights;
    for (const Outcomes& m : w.as_union().members) {
      double wm = prob_of(l.dist, m);
      if (wm > 0) {
        children.push_back(condition_rec(ctx, id, containment(identity(l.var), m)));
        weights.push_back(wm);
      }
    }
    if (children.empty())
      fail(ErrorKind::zero_probability, "conditioning event has zero probability");
    return ctx.g.sum(std::move(children), std::move(weights));
  }
  fail(ErrorKind::zero_probability, "conditioning event has zero probability");
}

NodeId condition_leaf(Ctx& ctx, NodeId id, const LeafNode& l, const EventPtr& e) {
  Outcomes v = eval_along(substitute_env(e, l.env), l.var);
  if (std::holds_alternative<DistStr>(l.dist)) return condition_leaf_str(ctx, id, l, v);
  if (std::holds_alternative<DistReal>(l.dist)) return condition_leaf_real(ctx, id, l, v);
  return condition_leaf_int(ctx, id, l, v);
}

// ---- Sum ----

NodeId condition_sum(Ctx& ctx, NodeId id, const SumNode& s, const EventPtr& e) {
  std::vector<NodeId> children;
  std::vector<double> weights;
  for (size_t i = 0; i < s.children.size(); ++i) {
    if (s.weights[i] <= 0) continue;
    double pi = prob(ctx.g, s.children[i], e, ctx.opts.query);
    double wi = s.weights[i] * pi;
    if (wi > 0) {
      children.push_back(condition_rec(ctx, s.children[i], e));
      weights.push_back(wi);
    }
  }
  if (children.empty())
    fail(ErrorKind::zero_probability, "conditioning event has zero probability");
  return ctx.g.sum(std::move(children), std::move(weights));
}

// ---- Product ----

NodeId condition_product_clause(Ctx& ctx, NodeId id, const ProductNode& p,
                                const EventPtr& clause) {
  std::vector<std::vector<EventPtr>> owned(p.children.size());
  for (const EventPtr& lit : clause_literals(clause)) {
    auto lv = vars(lit);
    bool placed = false;
    for (size_t i = 0; i < p.children.size() && !placed; ++i) {
      const auto& sc = ctx.g.node(p.children[i]).scope;
      bool all = true;
      for (const auto& x : lv)
        if (!std::binary_search(sc.begin(), sc.end(), x)) all = false;
      if (all) {
        owned[i].push_back(lit);
        placed = true;
      }
    }
    if (!placed)
      fail(ErrorKind::scope, "event variable outside the scope of every product child");
  }
  std::vector<NodeId> children;
  for (size_t i = 0; i < p.children.size(); ++i) {
    if (owned[i].empty()) {
      children.push_back(ctx.opts.share_subtrees ? p.children[i]
                                                 : copy_subtree(ctx.g, p.children[i]));
    } else {
      children.push_back(condition_rec(ctx, p.children[i], conjunction(owned[i])));
    }
  }
  return ctx.g.product(std::move(children));
}

NodeId condition_product(Ctx& ctx, NodeId id, const ProductNode& p, const EventPtr& e) {
  EventPtr d = disjoin(e);
  auto clauses = dnf_clauses(d);
  if (clauses.size() == 1) {
    if (!is_clause(clauses[0]) ||
        [&] {
          for (const auto& lit : clause_literals(clauses[0]))
            if (lit->values.is_empty()) return true;
          return false;
        }())
      fail(ErrorKind::zero_probability, "conditioning event has zero probability");
    return condition_product_clause(ctx, id, p, clauses[0]);
  }
  std::vector<NodeId> children;
  std::vector<double> weights;
  for (const EventPtr& clause : clauses) {
    double wi = prob(ctx.g, id, clause, ctx.opts.query);
    if (wi > 0) {
      children.push_back(condition_rec(ctx, id, clause));
      weights.push_back(wi);
    }
  }
  if (children.empty())
    fail(ErrorKind::zero_probability, "conditioning event has zero probability");
  return ctx.g.sum(std::move(children), std::move(weights));
}

NodeId condition_rec(Ctx& ctx, NodeId id, const EventPtr& e) {
  std::string key;
  if (ctx.opts.memoize) {
    key = std::to_string(id) + "#" + event_key(e);
    auto it = ctx.memo.find(key);
    if (it != ctx.memo.end()) return it->second;
  }
  ctx.visit(id);
  // Copy the node out: appending conditioned nodes reallocates the table.
  const Node n = ctx.g.node(id);
  NodeId result;
  if (std::holds_alternative<LeafNode>(n.data)) {
    result = condition_leaf(ctx, id, std::get<LeafNode>(n.data), e);
  } else if (std::holds_alternative<SumNode>(n.data)) {
    result = condition_sum(ctx, id, std::get<SumNode>(n.data), e);
  } else {
    result = condition_product(ctx, id, std::get<ProductNode>(n.data), e);
  }
  if (ctx.opts.memoize) ctx.memo.emplace(std::move(key), result);
  return result;
}

}  // namespace

NodeId condition(Graph& g, NodeId root, const EventPtr& e, ConditionStats* stats,
                 const ConditionOptions& opts) {
  Ctx ctx{g, opts, stats, {}};
  return condition_rec(ctx, root, e);
}

NodeId copy_subtree(Graph& g, NodeId root) {
  const Node n = g.node(root);
  if (std::holds_alternative<LeafNode>(n.data)) {
    const auto& l = std::get<LeafNode>(n.data);
    return g.leaf(l.var, l.dist, l.env);
  }
  if (std::holds_alternative<SumNode>(n.data)) {
    const auto& s = std::get<SumNode>(n.data);
    std::vector<NodeId> children;
    for (NodeId c : s.children) children.push_back(copy_subtree(g, c));
    return g.sum(std::move(children), s.weights);
  }
  const auto& p = std::get<ProductNode>(n.data);
  std::vector<NodeId> children;
  for (NodeId c : p.children) children.push_back(copy_subtree(g, c));
  return g.product(std::move(children));
}

// ---- Measure-zero equality conditioning ----

namespace {

struct PointLit {
  std::string var;
  EventPtr literal;
  bool is_real;
  double real_value;
};

std::vector<PointLit> split_points(const EventPtr& e) {
  std::vector<PointLit> out;
  std::set<std::string> seen;
  for (const EventPtr& lit : clause_literals(e)) {
    if (lit->transform->kind != Transform::Kind::identity)
      fail(ErrorKind::unsupported_event,
           "equality conditioning requires non-transformed variables");
    const std::string& x = lit->transform->var;
    if (!seen.insert(x).second)
      fail(ErrorKind::unsupported_event, "duplicate variable in equality conjunction");
    if (lit->values.is_reals() && lit->values.as_reals().items.size() == 1) {
      out.push_back({x, lit, true, lit->values.as_reals().items[0]});
    } else if (lit->values.is_strings() && !lit->values.as_strings().complemented &&
               lit->values.as_strings().items.size() == 1) {
      out.push_back({x, lit, false, 0.0});
    } else {
      fail(ErrorKind::unsupported_event,
           "equality conditioning requires singleton equality literals");
    }
  }
  return out;
}

EventPtr points_event(const std::vector<PointLit>& lits) {
  std::vector<EventPtr> es;
  for (const auto& pl : lits) es.push_back(pl.literal);
  return conjunction(std::move(es));
}

Density density_of_points(const Graph& g, NodeId id, const std::vector<PointLit>& lits,
                          const QueryOptions& opts) {
  return density(g, id, points_event(lits), opts);
}

NodeId constrain_rec(Ctx& ctx, NodeId id, const std::vector<PointLit>& lits);

NodeId constrain_leaf(Ctx& ctx, NodeId id, const LeafNode& l,
                      const std::vector<PointLit>& lits) {
  const PointLit* mine = nullptr;
  for (const auto& pl : lits) {
    if (pl.var != l.var)
      fail(ErrorKind::unsupported_event,
           "equality conditioning on transformed variable '" + pl.var + "'");
    mine = &pl;
  }
  if (!mine) return id;
  if (std::holds_alternative<DistReal>(l.dist)) {
    if (!mine->is_real)
      fail(ErrorKind::unsupported_event, "string equality against a continuous variable");
    Density d = density_at(l.dist, Outcome(mine->real_value));
    if (d.value == 0.0)
      fail(ErrorKind::zero_density, "equality point has zero density");
    double r = mine->real_value;
    return ctx.g.leaf(l.var, make_dist_int(atomic_cdf(r), r - 0.5, r), l.env);
  }
  return condition_rec(ctx, id, mine->literal);
}

NodeId constrain_sum(Ctx& ctx, NodeId id, const SumNode& s,
                     const std::vector<PointLit>& lits) {
  std::vector<Density> ds;
  for (NodeId c : s.children)
    ds.push_back(density_of_points(ctx.g, c, lits, ctx.opts.query));
  int best = -1;
  for (size_t i = 0; i < ds.size(); ++i)
    if (s.weights[i] > 0 && ds[i].value > 0 && (best < 0 || ds[i].degree < best))
      best = ds[i].degree;
  if (best < 0) fail(ErrorKind::zero_density, "equality point has zero density");
  std::vector<NodeId> children;
  std::vector<double> weights;
  for (size_t i = 0; i < ds.size(); ++i) {
    double wi = s.weights[i] * ds[i].value;
    if (wi > 0 && ds[i].degree == best) {
      children.push_back(constrain_rec(ctx, s.children[i], lits));
      weights.push_back(wi);
    }
  }
  return ctx.g.sum(std::move(children), std::move(weights));
}

NodeId constrain_product(Ctx& ctx, NodeId id, const ProductNode& p,
                         const std::vector<PointLit>& lits) {
  std::vector<NodeId> children;
  for (NodeId c : p.children) {
    const auto& sc = ctx.g.node(c).scope;
    std::vector<PointLit> owned;
    for (const auto& pl : lits)
      if (std::binary_search(sc.begin(), sc.end(), pl.var)) owned.push_back(pl);
    if (owned.empty()) {
      children.push_back(ctx.opts.share_subtrees ? c : copy_subtree(ctx.g, c));
    } else {
      children.push_back(constrain_rec(ctx, c, owned));
    }
  }
  return ctx.g.product(std::move(children));
}

NodeId constrain_rec(Ctx& ctx, NodeId id, const std::vector<PointLit>& lits) {
  std::string key;
  if (ctx.opts.memoize) {
    key = "c0|" + std::to_string(id) + "#" + event_key(points_event(lits));
    auto it = ctx.memo.find(key);
    if (it != ctx.memo.end()) return it->second;
  }
  ctx.visit(id);
  const Node n = ctx.g.node(id);  // copy; appends reallocate the table
  NodeId result;
  if (std::holds_alternative<LeafNode>(n.data)) {
    result = constrain_leaf(ctx, id, std::get<LeafNode>(n.data), lits);
  } else if (std::holds_alternative<SumNode>(n.data)) {
    result = constrain_sum(ctx, id, std::get<SumNode>(n.data), lits);
  } else {
    result = constrain_product(ctx, id, std::get<ProductNode>(n.data), lits);
  }
  if (ctx.opts.memoize) ctx.memo.emplace(std::move(key), result);
  return result;
}

}  // namespace

NodeId constrain(Graph& g, NodeId root, const EventPtr& e, ConditionStats* stats,
                 const ConditionOptions& opts) {
  auto lits = split_points(e);
  if (lits.empty()) fail(ErrorKind::unsupported_event, "empty equality conjunction");
  Ctx ctx{g, opts, stats, {}};
  Density d = density_of_points(g, root, lits, opts.query);
  if (d.value == 0.0) fail(ErrorKind::zero_density, "equality point has zero density");
  return constrain_rec(ctx, root, lits);
}

}  // namespace spe
