#pragma once

#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace spe {

constexpr double kInf = std::numeric_limits<double>::infinity();

// A single point of the mixed outcome space: a finite real or a string.
struct Outcome {
  std::variant<double, std::string> value;

  Outcome(double r) : value(r) {}
  Outcome(const char* s) : value(std::string(s)) {}
  Outcome(std::string s) : value(std::move(s)) {}

  bool is_real() const { return value.index() == 0; }
  double real() const { return std::get<double>(value); }
  const std::string& str() const { return std::get<std::string>(value); }
};

class Outcomes;

// Variants of a symbolic outcome set. Members are kept canonical by the
// factory functions on Outcomes; do not construct these directly.
struct EmptySet {};

// complemented=false denotes the listed strings, complemented=true denotes
// all strings except the listed ones (the list may then be empty).
struct StrSet {
  std::vector<std::string> items;  // sorted, unique
  bool complemented = false;
};

// Finite real set. Sorted, unique. May contain +-inf sentinels produced by
// the polynomial solver; sentinels are never members of intervals.
struct RealSet {
  std::vector<double> items;
};

// lo < hi. Flags true mean the endpoint is excluded. Infinite endpoints are
// always open.
struct Interval {
  double lo, hi;
  bool lo_open, hi_open;
};

struct UnionSet {
  std::vector<Outcomes> members;  // >= 2, pairwise disjoint, non-union
};

class Outcomes {
 public:
  using Repr = std::variant<EmptySet, StrSet, RealSet, Interval, UnionSet>;

  Outcomes() : repr_(EmptySet{}) {}

  static Outcomes empty() { return Outcomes(); }
  static Outcomes strings(std::vector<std::string> items, bool complemented = false);
  static Outcomes reals(std::vector<double> items);
  static Outcomes point(double r) { return reals({r}); }
  static Outcomes interval(double lo, bool lo_open, double hi, bool hi_open);
  static Outcomes all_reals() { return interval(-kInf, true, kInf, true); }
  static Outcomes all_strings() { return strings({}, true); }
  static Outcomes full_space();

  bool is_empty() const { return std::holds_alternative<EmptySet>(repr_); }
  bool is_strings() const { return std::holds_alternative<StrSet>(repr_); }
  bool is_reals() const { return std::holds_alternative<RealSet>(repr_); }
  bool is_interval() const { return std::holds_alternative<Interval>(repr_); }
  bool is_union() const { return std::holds_alternative<UnionSet>(repr_); }

  const StrSet& as_strings() const { return std::get<StrSet>(repr_); }
  const RealSet& as_reals() const { return std::get<RealSet>(repr_); }
  const Interval& as_interval() const { return std::get<Interval>(repr_); }
  const UnionSet& as_union() const { return std::get<UnionSet>(repr_); }
  const Repr& repr() const { return repr_; }

  bool operator==(const Outcomes& other) const;

 private:
  Repr repr_;
  friend Outcomes assemble_parts(std::vector<Outcomes> parts);
};

Outcomes union_of(std::span<const Outcomes> vs);
Outcomes union_of(const Outcomes& a, const Outcomes& b);
Outcomes intersection_of(std::span<const Outcomes> vs);
Outcomes intersection_of(const Outcomes& a, const Outcomes& b);
Outcomes complement(const Outcomes& v);

bool contains(const Outcomes& v, const Outcome& o);
bool contains_real(const Outcomes& v, double r);

std::string to_string(const Outcomes& v);

}  // namespace spe
