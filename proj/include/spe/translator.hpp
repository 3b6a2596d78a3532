#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spe/ast.hpp"
#include "spe/condition.hpp"
#include "spe/graph.hpp"

namespace spe {

struct RestrictionViolation {
  std::string code;  // R1..R4
  std::string message;
  int line = 0;
};

// Static checks over a desugared program: fresh definitions (R1), matching
// branch variables (R2), univariate transforms (R3), constant distribution
// parameters (R4).
std::vector<RestrictionViolation> check_restrictions(const CommandPtr& program);

struct TranslateOptions {
  bool optimize = true;
};

struct TranslateResult {
  Graph graph{true};
  NodeId root = -1;
  size_t nodes_before_optimize = 0;
  size_t nodes_after_optimize = 0;
  std::vector<std::string> warnings;
};

// Translates a parsed program into a sum-product graph. Throws on
// restriction violations and zero-probability conditions.
TranslateResult translate(const CommandPtr& program, const TranslateOptions& opts = {});

// Convenience: parse + desugar + check + translate.
TranslateResult translate_source(const std::string& text, const TranslateOptions& opts = {});

// Compiles an expression into an event over the graph's variables.
EventPtr compile_event(const ExprPtr& e);
EventPtr compile_event_text(const std::string& text);

// True when the event is a conjunction of single-point equality literals on
// plain variables, the shape handled by constrain.
bool is_equality_conjunction(const EventPtr& e);

// Factorization + deduplication pass; returns the new root in the same graph.
NodeId optimize_graph(Graph& g, NodeId root);

// Renders the graph as an equivalent source program (semantics-preserving,
// not syntax-preserving).
std::string to_source(const Graph& g, NodeId root);

}  // namespace spe
