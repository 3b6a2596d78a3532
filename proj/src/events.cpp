#include "spe/events.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "spe/errors.hpp"

namespace spe {

namespace {

constexpr size_t kDnfLiteralBudget = 1u << 20;
constexpr size_t kDisjoinBudget = 1u << 20;

}  // namespace

EventPtr containment(TransformPtr t, Outcomes v) {
  if (!t) fail(ErrorKind::domain, "containment needs a transform");
  auto e = std::make_shared<Event>();
  e->kind = Event::Kind::containment;
  e->transform = std::move(t);
  e->values = std::move(v);
  return e;
}

EventPtr conjunction(std::vector<EventPtr> children) {
  if (children.empty()) fail(ErrorKind::domain, "conjunction needs children");
  if (children.size() == 1) return children[0];
  auto e = std::make_shared<Event>();
  e->kind = Event::Kind::conjunction;
  e->children = std::move(children);
  return e;
}

EventPtr disjunction(std::vector<EventPtr> children) {
  if (children.empty()) fail(ErrorKind::domain, "disjunction needs children");
  if (children.size() == 1) return children[0];
  auto e = std::make_shared<Event>();
  e->kind = Event::Kind::disjunction;
  e->children = std::move(children);
  return e;
}

std::set<std::string> vars(const EventPtr& e) {
  if (e->kind == Event::Kind::containment) return vars(e->transform);
  std::set<std::string> out;
  for (const auto& c : e->children) {
    auto cv = vars(c);
    out.insert(cv.begin(), cv.end());
  }
  return out;
}

bool events_equal(const EventPtr& a, const EventPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  if (a->kind == Event::Kind::containment)
    return transforms_equal(a->transform, b->transform) && a->values == b->values;
  if (a->children.size() != b->children.size()) return false;
  for (size_t i = 0; i < a->children.size(); ++i)
    if (!events_equal(a->children[i], b->children[i])) return false;
  return true;
}

Outcomes eval_along(const EventPtr& e, const std::string& x) {
  switch (e->kind) {
    case Event::Kind::containment: {
      auto tv = vars(e->transform);
      if (tv.size() == 1 && *tv.begin() == x) return preimage(e->transform, e->values);
      return Outcomes::empty();
    }
    case Event::Kind::conjunction: {
      Outcomes acc = eval_along(e->children[0], x);
      for (size_t i = 1; i < e->children.size(); ++i)
        acc = intersection_of(acc, eval_along(e->children[i], x));
      return acc;
    }
    case Event::Kind::disjunction: {
      std::vector<Outcomes> parts;
      for (const auto& c : e->children) parts.push_back(eval_along(c, x));
      return union_of(parts);
    }
  }
  return Outcomes::empty();
}

namespace {

bool has_string_component(const Outcomes& v) {
  if (v.is_strings()) return true;
  if (v.is_union()) {
    for (const Outcomes& m : v.as_union().members)
      if (m.is_strings()) return true;
  }
  return false;
}

bool has_real_component(const Outcomes& v) {
  if (v.is_reals() || v.is_interval()) return true;
  if (v.is_union()) {
    for (const Outcomes& m : v.as_union().members)
      if (!m.is_strings()) return true;
  }
  return false;
}

// Complement within the full mixed space: the sort-local complement plus the
// entirety of any sort the input does not touch.
Outcomes full_complement(const Outcomes& v) {
  Outcomes c = complement(v);
  if (v.is_empty()) return c;
  if (!has_string_component(v)) c = union_of(c, Outcomes::all_strings());
  if (!has_real_component(v)) c = union_of(c, Outcomes::all_reals());
  return c;
}

EventPtr negate_literal(const EventPtr& e, const Outcomes& comp) {
  if (comp.is_union()) {
    std::vector<EventPtr> lits;
    for (const Outcomes& m : comp.as_union().members)
      lits.push_back(containment(e->transform, m));
    return disjunction(std::move(lits));
  }
  return containment(e->transform, comp);
}

EventPtr negate_rec(const EventPtr& e, bool full) {
  switch (e->kind) {
    case Event::Kind::containment: {
      bool id = e->transform->kind == Transform::Kind::identity;
      Outcomes c = (full && id) ? full_complement(e->values) : complement(e->values);
      return negate_literal(e, c);
    }
    case Event::Kind::conjunction: {
      std::vector<EventPtr> out;
      for (const auto& c : e->children) out.push_back(negate_rec(c, full));
      return disjunction(std::move(out));
    }
    case Event::Kind::disjunction: {
      std::vector<EventPtr> out;
      for (const auto& c : e->children) out.push_back(negate_rec(c, full));
      return conjunction(std::move(out));
    }
  }
  return e;
}

}  // namespace

EventPtr negate(const EventPtr& e) { return negate_rec(e, false); }

EventPtr negate_full(const EventPtr& e) { return negate_rec(e, true); }

bool is_literal(const EventPtr& e) { return e->kind == Event::Kind::containment; }

bool is_clause(const EventPtr& e) {
  if (is_literal(e)) return true;
  if (e->kind != Event::Kind::conjunction) return false;
  for (const auto& c : e->children)
    if (!is_literal(c)) return false;
  return true;
}

std::vector<EventPtr> clause_literals(const EventPtr& e) {
  if (is_literal(e)) return {e};
  if (e->kind != Event::Kind::conjunction)
    fail(ErrorKind::unsupported_event, "expected a clause of literals");
  for (const auto& c : e->children)
    if (!is_literal(c)) fail(ErrorKind::unsupported_event, "expected a clause of literals");
  return e->children;
}

std::vector<EventPtr> dnf_clauses(const EventPtr& e) {
  if (e->kind == Event::Kind::disjunction) return e->children;
  return {e};
}

namespace {

using Clause = std::vector<EventPtr>;  // literals

std::vector<Clause> dnf_clause_lists(const EventPtr& e) {
  switch (e->kind) {
    case Event::Kind::containment:
      return {{e}};
    case Event::Kind::disjunction: {
      std::vector<Clause> out;
      for (const auto& c : e->children) {
        auto sub = dnf_clause_lists(c);
        out.insert(out.end(), sub.begin(), sub.end());
      }
      return out;
    }
    case Event::Kind::conjunction: {
      std::vector<Clause> acc = {{}};
      for (const auto& c : e->children) {
        auto sub = dnf_clause_lists(c);
        std::vector<Clause> next;
        if (acc.size() * sub.size() > kDnfLiteralBudget)
          fail(ErrorKind::too_complex, "event too complex to convert to DNF");
        for (const Clause& a : acc) {
          for (const Clause& b : sub) {
            Clause merged = a;
            merged.insert(merged.end(), b.begin(), b.end());
            next.push_back(std::move(merged));
          }
        }
        acc = std::move(next);
      }
      return acc;
    }
  }
  return {};
}

EventPtr clause_event(const Clause& c) {
  if (c.size() == 1) return c[0];
  return conjunction(std::vector<EventPtr>(c.begin(), c.end()));
}

EventPtr clauses_event(const std::vector<Clause>& cs) {
  if (cs.empty()) fail(ErrorKind::domain, "empty clause list");
  std::vector<EventPtr> parts;
  for (const Clause& c : cs) parts.push_back(clause_event(c));
  if (parts.size() == 1) return parts[0];
  return disjunction(std::move(parts));
}

// Split a literal into solved (identity-transform, non-union) literals.
std::vector<EventPtr> solve_literal(const EventPtr& lit) {
  auto tv = vars(lit->transform);
  if (tv.size() != 1)
    fail(ErrorKind::unsupported_event, "literal transform must be univariate");
  const std::string& x = *tv.begin();
  Outcomes w = preimage(lit->transform, lit->values);
  TransformPtr id = identity(x);
  std::vector<EventPtr> out;
  if (w.is_union()) {
    for (const Outcomes& m : w.as_union().members) out.push_back(containment(id, m));
  } else {
    out.push_back(containment(id, w));
  }
  return out;
}

// Merge same-variable literals within a solved clause by intersection,
// keeping first-occurrence order. Intersections of non-union outcomes stay
// non-union; empty results are kept as explicit empty literals.
Clause merge_clause(const Clause& lits) {
  std::vector<std::string> order;
  std::map<std::string, Outcomes> sets;
  for (const EventPtr& lit : lits) {
    const std::string& x = lit->transform->var;
    auto it = sets.find(x);
    if (it == sets.end()) {
      order.push_back(x);
      sets.emplace(x, lit->values);
    } else {
      it->second = intersection_of(it->second, lit->values);
    }
  }
  Clause out;
  for (const std::string& x : order) out.push_back(containment(identity(x), sets[x]));
  return out;
}

std::vector<Clause> normalize_clause_lists(const EventPtr& e) {
  // Solve every literal, distribute to DNF, then merge within clauses.
  std::vector<Clause> raw;
  switch (e->kind) {
    case Event::Kind::containment: {
      for (const EventPtr& lit : solve_literal(e)) raw.push_back({lit});
      break;
    }
    case Event::Kind::conjunction:
    case Event::Kind::disjunction: {
      std::vector<EventPtr> solved;
      for (const auto& c : e->children) {
        auto sub = normalize_clause_lists(c);
        solved.push_back(clauses_event(sub));
      }
      EventPtr combined = e->kind == Event::Kind::conjunction
                              ? conjunction(std::move(solved))
                              : disjunction(std::move(solved));
      raw = dnf_clause_lists(combined);
      break;
    }
  }
  std::vector<Clause> out;
  for (const Clause& c : raw) out.push_back(merge_clause(c));
  return out;
}

}  // namespace

EventPtr to_dnf(const EventPtr& e) { return clauses_event(dnf_clause_lists(e)); }

EventPtr normalize(const EventPtr& e) { return clauses_event(normalize_clause_lists(e)); }

bool clauses_disjoint(const EventPtr& a, const EventPtr& b) {
  if (!is_clause(a) || !is_clause(b))
    fail(ErrorKind::unsupported_event, "disjointness is defined on solved clauses");
  auto lits_a = clause_literals(a);
  auto lits_b = clause_literals(b);
  auto check = [](const std::vector<EventPtr>& lits) {
    for (const auto& l : lits) {
      if (l->transform->kind != Transform::Kind::identity)
        fail(ErrorKind::unsupported_event, "clauses must be in solved form");
      if (l->values.is_empty()) return true;
    }
    return false;
  };
  if (check(lits_a) || check(lits_b)) return true;
  for (const auto& la : lits_a) {
    for (const auto& lb : lits_b) {
      if (la->transform->var != lb->transform->var) continue;
      if (intersection_of(la->values, lb->values).is_empty()) return true;
    }
  }
  return false;
}

namespace {

bool clause_is_empty(const Clause& c) {
  for (const auto& lit : c)
    if (lit->values.is_empty()) return true;
  return false;
}

// Multiply a set of live clauses by the negation of a solved clause,
// merging literals and dropping empty results as they appear. Eager
// pruning keeps the intermediate clause count at the size of the cell
// arrangement rather than the full distributive product.
std::vector<Clause> multiply_by_negation(const std::vector<Clause>& live,
                                         const EventPtr& neg) {
  // The negation of a solved clause is a (possibly nested) disjunction of
  // literals, one per complement piece.
  std::vector<EventPtr> neg_lits;
  std::function<void(const EventPtr&)> flatten = [&](const EventPtr& part) {
    if (is_literal(part)) {
      neg_lits.push_back(part);
      return;
    }
    for (const EventPtr& c : part->children) flatten(c);
  };
  flatten(neg);
  std::vector<Clause> next;
  for (const Clause& c : live) {
    for (const EventPtr& l : neg_lits) {
      Clause extended = c;
      extended.push_back(l);
      Clause merged = merge_clause(extended);
      if (!clause_is_empty(merged)) next.push_back(std::move(merged));
    }
  }
  return next;
}

std::vector<Clause> disjoin_clauses(std::vector<Clause> cls, size_t* budget) {
  if (*budget == 0) fail(ErrorKind::too_complex, "disjoin recursion budget exhausted");
  --*budget;
  std::erase_if(cls, clause_is_empty);
  if (cls.size() <= 1) return cls;
  std::vector<Clause> out = {cls[0]};
  for (size_t i = 1; i < cls.size(); ++i) {
    EventPtr ei = clause_event(cls[i]);
    std::vector<Clause> live = {cls[i]};
    bool intersected = false;
    for (size_t j = 0; j < i && !live.empty(); ++j) {
      EventPtr ej = clause_event(cls[j]);
      if (clauses_disjoint(ej, ei)) continue;
      intersected = true;
      live = multiply_by_negation(live, negate_full(ej));
    }
    if (!intersected) {
      out.push_back(cls[i]);
      continue;
    }
    auto sub = disjoin_clauses(std::move(live), budget);
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

}  // namespace

EventPtr disjoin(const EventPtr& e) {
  size_t budget = kDisjoinBudget;
  std::vector<Clause> cls = disjoin_clauses(normalize_clause_lists(e), &budget);
  if (cls.empty()) {
    const std::string x = *vars(e).begin();
    return containment(identity(x), Outcomes::empty());
  }
  return clauses_event(cls);
}

namespace {

TransformPtr substitute_transform(const TransformPtr& t, const std::string& x,
                                  const TransformPtr& repl) {
  switch (t->kind) {
    case Transform::Kind::identity:
      return t->var == x ? repl : t;
    case Transform::Kind::reciprocal:
      return reciprocal(substitute_transform(t->inner, x, repl));
    case Transform::Kind::abs_value:
      return abs_value(substitute_transform(t->inner, x, repl));
    case Transform::Kind::root:
      return root(substitute_transform(t->inner, x, repl), t->root_degree);
    case Transform::Kind::exponential:
      return exponential(substitute_transform(t->inner, x, repl), t->base);
    case Transform::Kind::logarithm:
      return logarithm(substitute_transform(t->inner, x, repl), t->base);
    case Transform::Kind::polynomial:
      return polynomial(substitute_transform(t->inner, x, repl), t->coeffs);
    case Transform::Kind::piecewise: {
      std::vector<std::pair<TransformPtr, EventPtr>> pieces;
      for (const auto& [pt, pe] : t->pieces)
        pieces.emplace_back(substitute_transform(pt, x, repl), substitute(pe, x, repl));
      return piecewise(std::move(pieces));
    }
  }
  return t;
}

}  // namespace

EventPtr substitute(const EventPtr& e, const std::string& x, const TransformPtr& t) {
  if (e->kind == Event::Kind::containment)
    return containment(substitute_transform(e->transform, x, t), e->values);
  std::vector<EventPtr> out;
  for (const auto& c : e->children) out.push_back(substitute(c, x, t));
  return e->kind == Event::Kind::conjunction ? conjunction(std::move(out))
                                             : disjunction(std::move(out));
}

bool Environment::has(const std::string& x) const { return find(x) != nullptr; }

const TransformPtr* Environment::find(const std::string& x) const {
  for (const auto& [name, t] : entries)
    if (name == x) return &t;
  return nullptr;
}

std::vector<std::string> Environment::names() const {
  std::vector<std::string> out;
  for (const auto& [name, t] : entries) out.push_back(name);
  return out;
}

EventPtr substitute_env(const EventPtr& e, const Environment& env) {
  if (env.entries.empty()) fail(ErrorKind::scope, "empty environment");
  EventPtr acc = e;
  for (size_t i = env.entries.size(); i-- > 1;)
    acc = substitute(acc, env.entries[i].first, env.entries[i].second);
  const std::string& base = env.entries.front().first;
  for (const std::string& x : vars(acc)) {
    if (x != base)
      fail(ErrorKind::scope, "event variable '" + x + "' is not in the environment");
  }
  return acc;
}

std::string to_string(const EventPtr& e) {
  switch (e->kind) {
    case Event::Kind::containment:
      return "(" + to_string(e->transform) + " in " + to_string(e->values) + ")";
    case Event::Kind::conjunction: {
      std::string out = "(";
      for (size_t i = 0; i < e->children.size(); ++i) {
        if (i) out += " and ";
        out += to_string(e->children[i]);
      }
      return out + ")";
    }
    case Event::Kind::disjunction: {
      std::string out = "(";
      for (size_t i = 0; i < e->children.size(); ++i) {
        if (i) out += " or ";
        out += to_string(e->children[i]);
      }
      return out + ")";
    }
  }
  return "?";
}

}  // namespace spe
