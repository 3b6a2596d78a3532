#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace spe {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class BinOp { add, sub, mul, div, pow, lt, le, gt, ge, eq, ne, elem };

struct Expr {
  enum class Kind {
    number,
    string,
    name,
    index,    // base[index] (possibly chained via base being an index)
    list,
    dict,
    call,
    neg,
    bin,
    logical_and,
    logical_or,
    logical_not,
  };

  Kind kind;
  double number = 0.0;
  std::string text;                  // name / string / call target
  ExprPtr base;                      // index base, neg/not operand
  ExprPtr index;                     // index subscript
  std::vector<ExprPtr> items;        // list, call args, and/or children
  std::vector<std::pair<std::string, ExprPtr>> pairs;  // dict entries, call kwargs
  BinOp op = BinOp::add;
  ExprPtr lhs, rhs;
  int line = 0, column = 0;
};

struct Command;
using CommandPtr = std::shared_ptr<const Command>;

struct Command {
  enum class Kind {
    sequence,
    sample,       // target ~ value
    assign,       // target = value (transform, constant binding, or array declaration)
    if_else,
    for_loop,
    switch_cases,
    condition_event,
    constrain_event,
  };

  Kind kind;
  std::vector<CommandPtr> body;  // sequence
  ExprPtr target;
  ExprPtr value;                 // sample/assign RHS; condition/constrain event
  std::vector<std::pair<ExprPtr, CommandPtr>> branches;  // if/elif tests and bodies
  CommandPtr else_body;          // may be null
  std::string binder;            // for / switch
  ExprPtr lo, hi;                // for-loop range
  ExprPtr scrutinee;             // switch
  ExprPtr values_list;           // switch case values
  int line = 0;
};

// Parses a full program; throws SpeError(parse) with line/column on the
// first syntax error.
CommandPtr parse_program(const std::string& text);

// Parses a single expression (used for CLI events and queries).
ExprPtr parse_expression(const std::string& text);

// Capture-aware syntactic substitution of a name by an expression; nested
// for/switch binders of the same name shadow it.
ExprPtr substitute_name(const ExprPtr& e, const std::string& name, const ExprPtr& value);
CommandPtr substitute_name(const CommandPtr& c, const std::string& name, const ExprPtr& value);

// Expands switch-cases into if/elif chains and unrolls for loops, resolving
// case lists and range bounds against constant bindings seen so far.
CommandPtr desugar(const CommandPtr& c);

}  // namespace spe
