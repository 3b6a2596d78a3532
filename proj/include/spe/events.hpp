#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "spe/outcomes.hpp"
#include "spe/transforms.hpp"

namespace spe {

// A predicate over transformed variables: containment literals closed under
// conjunction and disjunction.
struct Event {
  enum class Kind { containment, conjunction, disjunction };

  Kind kind;
  TransformPtr transform;        // containment
  Outcomes values;               // containment
  std::vector<EventPtr> children;  // conjunction / disjunction, >= 2
};

EventPtr containment(TransformPtr t, Outcomes v);
EventPtr conjunction(std::vector<EventPtr> children);
EventPtr disjunction(std::vector<EventPtr> children);

std::set<std::string> vars(const EventPtr& e);
std::string to_string(const EventPtr& e);
bool events_equal(const EventPtr& a, const EventPtr& b);

// The satisfying set along dimension x.
Outcomes eval_along(const EventPtr& e, const std::string& x);

// De Morgan negation; literal complements split unions into disjunctions.
// Complements are sort-local (the complement of a real set carries no
// strings and vice versa), mirroring the outcome algebra.
EventPtr negate(const EventPtr& e);

// Negation against the full mixed space: identity literals complement to
// everything outside their value set, including the other sort. Used where
// a true set complement is required (disjoining, branch splitting).
EventPtr negate_full(const EventPtr& e);

// Disjunctive normal form (clauses of literals), semantics preserved.
EventPtr to_dnf(const EventPtr& e);

// Solved DNF: identity transforms, non-union outcomes, one literal per
// variable within each clause (same-variable literals merged by
// intersection; empty results kept as explicit empty literals).
EventPtr normalize(const EventPtr& e);

// True iff two solved-DNF clauses are disjoint; throws on other inputs.
bool clauses_disjoint(const EventPtr& a, const EventPtr& b);

// Solved DNF with pairwise-disjoint clauses; empty clauses dropped.
EventPtr disjoin(const EventPtr& e);

// Syntactic substitution of x by a transform.
EventPtr substitute(const EventPtr& e, const std::string& x, const TransformPtr& t);

// Ordered variable -> transform map; entries topologically ordered so each
// transform references only the base variable or earlier entries.
struct Environment {
  std::vector<std::pair<std::string, TransformPtr>> entries;

  bool has(const std::string& x) const;
  const TransformPtr* find(const std::string& x) const;
  std::vector<std::string> names() const;
};

// Rewrites e as an event on the environment's base variable.
EventPtr substitute_env(const EventPtr& e, const Environment& env);

// Structural helpers over solved-DNF shapes.
bool is_literal(const EventPtr& e);
bool is_clause(const EventPtr& e);  // literal or conjunction of literals
std::vector<EventPtr> clause_literals(const EventPtr& e);
std::vector<EventPtr> dnf_clauses(const EventPtr& e);  // e must be in DNF

}  // namespace spe
