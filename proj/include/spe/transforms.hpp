#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "spe/outcomes.hpp"

namespace spe {

struct Event;
using EventPtr = std::shared_ptr<const Event>;

struct Transform;
using TransformPtr = std::shared_ptr<const Transform>;

// A univariate many-to-one real transform. Every non-piecewise chain
// terminates in a single Identity; piecewise appears only at the top level.
struct Transform {
  enum class Kind {
    identity,
    reciprocal,
    abs_value,
    root,
    exponential,
    logarithm,
    polynomial,
    piecewise,
  };

  Kind kind;
  std::string var;                 // identity
  TransformPtr inner;              // unary chains
  int root_degree = 0;             // root
  double base = 0.0;               // exponential / logarithm, > 1
  std::vector<double> coeffs;      // polynomial, ascending, trailing zeros stripped
  std::vector<std::pair<TransformPtr, EventPtr>> pieces;  // piecewise
};

TransformPtr identity(std::string var);
TransformPtr reciprocal(TransformPtr inner);
TransformPtr abs_value(TransformPtr inner);
TransformPtr root(TransformPtr inner, int degree);
TransformPtr exponential(TransformPtr inner, double base);
TransformPtr logarithm(TransformPtr inner, double base);
TransformPtr polynomial(TransformPtr inner, std::vector<double> coeffs);
TransformPtr piecewise(std::vector<std::pair<TransformPtr, EventPtr>> pieces);

bool transforms_equal(const TransformPtr& a, const TransformPtr& b);
std::set<std::string> vars(const TransformPtr& t);
std::string to_string(const TransformPtr& t);

// Real-function valuation; nullopt outside the domain of definition.
std::optional<double> evaluate(const TransformPtr& t, double r);

// The set of inputs on which the transform is defined.
Outcomes domain_of(const TransformPtr& t);

// One inversion step of the outermost constructor at a single extended real:
// the set of inner-transform values mapping to r.
Outcomes finv(const TransformPtr& t, double r);

// Generalized inverse: reals r with evaluate(t, r) in v; strings pass through
// identity only.
Outcomes preimage(const TransformPtr& t, const Outcomes& v);

// Polynomial helpers. Coefficients ascending; at least one entry.
std::pair<double, double> poly_limits(const std::vector<double>& coeffs);
Outcomes poly_solve(double r, const std::vector<double>& coeffs);
Outcomes poly_lte(bool strict, double r, const std::vector<double>& coeffs);

// All real roots, ascending, duplicates merged within 1e-9. Throws on the
// all-zero polynomial.
std::vector<double> poly_roots(std::vector<double> coeffs);

}  // namespace spe
