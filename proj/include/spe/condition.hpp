#pragma once

#include "spe/graph.hpp"

namespace spe {

struct ConditionStats {
  long node_visits = 0;  // nodes actually conditioned; memo hits not counted
};

struct ConditionOptions {
  bool memoize = true;
  // With sharing off, untouched subtrees are materialized as fresh copies
  // instead of referencing the input graph (tree semantics; used by the
  // no-optimization mode for scaling comparisons).
  bool share_subtrees = true;
  QueryOptions query;
};

// Fresh structural copy of a subtree (no sharing when interning is off).
NodeId copy_subtree(Graph& g, NodeId root);

// Exact conditioning on a positive-probability event. The returned node
// defines the posterior distribution; unconditioned subtrees are shared with
// the input graph. Throws zero_probability when the event has no mass.
NodeId condition(Graph& g, NodeId root, const EventPtr& e,
                 ConditionStats* stats = nullptr, const ConditionOptions& opts = {});

// Exact conditioning on a conjunction of (possibly measure-zero) equality
// constraints on non-transformed variables. Throws zero_density when the
// generalized density of the point is zero.
NodeId constrain(Graph& g, NodeId root, const EventPtr& e,
                 ConditionStats* stats = nullptr, const ConditionOptions& opts = {});

}  // namespace spe
