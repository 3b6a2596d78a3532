#include "spe/translator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>

#include "spe/errors.hpp"

namespace spe {

namespace {

// ---- Compile-time constant values (macro bindings, case lists, params) ----

struct ConstValue {
  std::variant<double, std::string, std::vector<ConstValue>> v;

  bool is_number() const { return v.index() == 0; }
  bool is_string() const { return v.index() == 1; }
  bool is_list() const { return v.index() == 2; }
  double number() const { return std::get<double>(v); }
  const std::string& str() const { return std::get<std::string>(v); }
  const std::vector<ConstValue>& list() const { return std::get<std::vector<ConstValue>>(v); }
};

using ConstEnv = std::map<std::string, ConstValue>;

std::optional<ConstValue> const_eval(const ExprPtr& e, const ConstEnv& env) {
  switch (e->kind) {
    case Expr::Kind::number:
      return ConstValue{e->number};
    case Expr::Kind::string:
      return ConstValue{e->text};
    case Expr::Kind::name: {
      auto it = env.find(e->text);
      if (it == env.end()) return std::nullopt;
      return it->second;
    }
    case Expr::Kind::list: {
      std::vector<ConstValue> items;
      for (const auto& item : e->items) {
        auto v = const_eval(item, env);
        if (!v) return std::nullopt;
        items.push_back(*v);
      }
      return ConstValue{std::move(items)};
    }
    case Expr::Kind::neg: {
      auto v = const_eval(e->base, env);
      if (!v || !v->is_number()) return std::nullopt;
      return ConstValue{-v->number()};
    }
    case Expr::Kind::index: {
      auto base = const_eval(e->base, env);
      auto idx = const_eval(e->index, env);
      if (!base || !idx || !base->is_list() || !idx->is_number()) return std::nullopt;
      long i = static_cast<long>(idx->number());
      if (i < 0 || static_cast<size_t>(i) >= base->list().size())
        fail(ErrorKind::parse, "constant index out of range (line " + std::to_string(e->line) + ")");
      return base->list()[static_cast<size_t>(i)];
    }
    case Expr::Kind::bin: {
      auto l = const_eval(e->lhs, env);
      auto r = const_eval(e->rhs, env);
      if (!l || !r || !l->is_number() || !r->is_number()) return std::nullopt;
      switch (e->op) {
        case BinOp::add:
          return ConstValue{l->number() + r->number()};
        case BinOp::sub:
          return ConstValue{l->number() - r->number()};
        case BinOp::mul:
          return ConstValue{l->number() * r->number()};
        case BinOp::div:
          return ConstValue{l->number() / r->number()};
        case BinOp::pow:
          return ConstValue{std::pow(l->number(), r->number())};
        default:
          return std::nullopt;
      }
    }
    case Expr::Kind::call: {
      if (e->text == "sqrt" || e->text == "exp" || e->text == "log" || e->text == "abs") {
        if (e->items.size() != 1) return std::nullopt;
        auto v = const_eval(e->items[0], env);
        if (!v || !v->is_number()) return std::nullopt;
        double x = v->number();
        if (e->text == "sqrt") return ConstValue{std::sqrt(x)};
        if (e->text == "exp") return ConstValue{std::exp(x)};
        if (e->text == "log") return ConstValue{std::log(x)};
        return ConstValue{std::fabs(x)};
      }
      return std::nullopt;
    }
    default:
      return std::nullopt;
  }
}

// Mangled variable name of a sample/assign target or variable reference:
// indexed names resolve their constant subscripts, e.g. Z[2].
std::optional<std::string> mangle_name(const ExprPtr& e, const ConstEnv& env) {
  if (e->kind == Expr::Kind::name) {
    if (env.count(e->text)) return std::nullopt;  // macro constant, not a variable
    return e->text;
  }
  if (e->kind == Expr::Kind::index) {
    if (e->base->kind != Expr::Kind::name) return std::nullopt;
    if (env.count(e->base->text)) return std::nullopt;  // constant list indexing
    auto idx = const_eval(e->index, env);
    if (!idx || !idx->is_number()) return std::nullopt;
    long i = static_cast<long>(idx->number());
    char buf[32];
    std::snprintf(buf, sizeof(buf), "[%ld]", i);
    return e->base->text + buf;
  }
  return std::nullopt;
}

// ---- Transform compilation (symbolic polynomial algebra) ----

struct TVal {
  std::optional<double> constant;
  TransformPtr t;

  bool is_const() const { return constant.has_value(); }
};

std::pair<TransformPtr, std::vector<double>> as_poly(const TransformPtr& t) {
  if (t->kind == Transform::Kind::polynomial) return {t->inner, t->coeffs};
  return {t, {0.0, 1.0}};
}

TransformPtr from_poly(const TransformPtr& inner, std::vector<double> coeffs) {
  while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
  if (coeffs.size() == 2 && coeffs[0] == 0.0 && coeffs[1] == 1.0) return inner;
  return polynomial(inner, std::move(coeffs));
}

[[noreturn]] void combine_fail(int line) {
  fail(ErrorKind::restriction,
       "expression is not a univariate transform chain (line " + std::to_string(line) + ")");
}

TVal tv_add(const TVal& a, const TVal& b, int line) {
  if (a.is_const() && b.is_const()) return {*a.constant + *b.constant, nullptr};
  if (a.is_const() || b.is_const()) {
    double c = a.is_const() ? *a.constant : *b.constant;
    const TransformPtr& t = a.is_const() ? b.t : a.t;
    auto [inner, coeffs] = as_poly(t);
    coeffs[0] += c;
    return {std::nullopt, from_poly(inner, std::move(coeffs))};
  }
  auto [i1, c1] = as_poly(a.t);
  auto [i2, c2] = as_poly(b.t);
  if (!transforms_equal(i1, i2)) combine_fail(line);
  c1.resize(std::max(c1.size(), c2.size()), 0.0);
  for (size_t i = 0; i < c2.size(); ++i) c1[i] += c2[i];
  return {std::nullopt, from_poly(i1, std::move(c1))};
}

TVal tv_scale(const TVal& a, double k) {
  if (a.is_const()) return {*a.constant * k, nullptr};
  auto [inner, coeffs] = as_poly(a.t);
  for (double& c : coeffs) c *= k;
  return {std::nullopt, from_poly(inner, std::move(coeffs))};
}

TVal tv_mul(const TVal& a, const TVal& b, int line) {
  if (a.is_const() && b.is_const()) return {*a.constant * *b.constant, nullptr};
  if (a.is_const()) return *a.constant == 0.0 ? TVal{0.0, nullptr} : tv_scale(b, *a.constant);
  if (b.is_const()) return *b.constant == 0.0 ? TVal{0.0, nullptr} : tv_scale(a, *b.constant);
  auto [i1, c1] = as_poly(a.t);
  auto [i2, c2] = as_poly(b.t);
  if (!transforms_equal(i1, i2)) combine_fail(line);
  std::vector<double> out(c1.size() + c2.size() - 1, 0.0);
  for (size_t i = 0; i < c1.size(); ++i)
    for (size_t j = 0; j < c2.size(); ++j) out[i + j] += c1[i] * c2[j];
  return {std::nullopt, from_poly(i1, std::move(out))};
}

TVal tv_pow(const TVal& a, const TVal& b, int line) {
  if (a.is_const() && b.is_const()) return {std::pow(*a.constant, *b.constant), nullptr};
  if (a.is_const()) {
    double base = *a.constant;
    if (base <= 0.0)
      fail(ErrorKind::restriction,
           "exponential base must be positive (line " + std::to_string(line) + ")");
    if (base == 1.0) return {1.0, nullptr};
    if (base > 1.0) return {std::nullopt, exponential(b.t, base)};
    // 0 < base < 1: b^t = (1/b)^(-t), keeping the base above one.
    return {std::nullopt, exponential(tv_scale(b, -1.0).t, 1.0 / base)};
  }
  if (!b.is_const()) combine_fail(line);
  double p = *b.constant;
  double ip;
  if (std::modf(p, &ip) == 0.0) {
    long n = static_cast<long>(ip);
    if (n == 0) return {1.0, nullptr};
    bool negative = n < 0;
    n = std::labs(n);
    TVal acc = a;
    for (long i = 1; i < n; ++i) acc = tv_mul(acc, a, line);
    if (negative) return {std::nullopt, reciprocal(acc.t)};
    return acc;
  }
  double inv = 1.0 / p;
  double iinv;
  if (p > 0 && std::fabs(std::modf(inv, &iinv)) < 1e-12 && iinv >= 2) {
    return {std::nullopt, root(a.t, static_cast<int>(iinv))};
  }
  fail(ErrorKind::restriction,
       "unsupported exponent " + std::to_string(p) + " (line " + std::to_string(line) + ")");
}

TVal compile_tval(const ExprPtr& e, const ConstEnv& env) {
  if (auto c = const_eval(e, env)) {
    if (c->is_number()) return {c->number(), nullptr};
    fail(ErrorKind::restriction,
         "non-numeric constant in arithmetic (line " + std::to_string(e->line) + ")");
  }
  switch (e->kind) {
    case Expr::Kind::name:
    case Expr::Kind::index: {
      auto nm = mangle_name(e, env);
      if (!nm)
        fail(ErrorKind::restriction,
             "cannot resolve variable reference (line " + std::to_string(e->line) + ")");
      return {std::nullopt, identity(*nm)};
    }
    case Expr::Kind::neg:
      return tv_scale(compile_tval(e->base, env), -1.0);
    case Expr::Kind::bin: {
      TVal a = compile_tval(e->lhs, env);
      TVal b = compile_tval(e->rhs, env);
      switch (e->op) {
        case BinOp::add:
          return tv_add(a, b, e->line);
        case BinOp::sub:
          return tv_add(a, tv_scale(b, -1.0), e->line);
        case BinOp::mul:
          return tv_mul(a, b, e->line);
        case BinOp::div: {
          if (b.is_const()) {
            if (*b.constant == 0.0)
              fail(ErrorKind::restriction, "division by zero (line " + std::to_string(e->line) + ")");
            if (a.is_const()) return {*a.constant / *b.constant, nullptr};
            return tv_scale(a, 1.0 / *b.constant);
          }
          TVal recip{std::nullopt, reciprocal(b.t)};
          if (a.is_const()) return *a.constant == 1.0 ? recip : tv_scale(recip, *a.constant);
          return tv_mul(a, recip, e->line);
        }
        case BinOp::pow:
          return tv_pow(a, b, e->line);
        default:
          fail(ErrorKind::restriction,
               "comparison inside arithmetic (line " + std::to_string(e->line) + ")");
      }
    }
    case Expr::Kind::call: {
      auto unary_arg = [&]() -> TVal {
        if (e->items.size() < 1)
          fail(ErrorKind::parse, e->text + " expects an argument (line " + std::to_string(e->line) + ")");
        TVal a = compile_tval(e->items[0], env);
        if (a.is_const())
          fail(ErrorKind::restriction,
               e->text + " of a constant should fold (line " + std::to_string(e->line) + ")");
        return a;
      };
      if (e->text == "sqrt") return {std::nullopt, root(unary_arg().t, 2)};
      if (e->text == "abs") return {std::nullopt, abs_value(unary_arg().t)};
      if (e->text == "exp") return {std::nullopt, exponential(unary_arg().t, std::exp(1.0))};
      if (e->text == "log") {
        TVal a = unary_arg();
        double base = std::exp(1.0);
        if (e->items.size() == 2) {
          auto b = const_eval(e->items[1], env);
          if (!b || !b->is_number())
            fail(ErrorKind::parse, "log base must be constant (line " + std::to_string(e->line) + ")");
          base = b->number();
        }
        return {std::nullopt, logarithm(a.t, base)};
      }
      if (e->text == "root") {
        if (e->items.size() != 2)
          fail(ErrorKind::parse, "root expects (expr, degree) (line " + std::to_string(e->line) + ")");
        TVal a = compile_tval(e->items[0], env);
        auto n = const_eval(e->items[1], env);
        if (a.is_const() || !n || !n->is_number())
          fail(ErrorKind::parse, "root expects (expr, constant degree)");
        return {std::nullopt, root(a.t, static_cast<int>(n->number()))};
      }
      fail(ErrorKind::restriction,
           "unknown function '" + e->text + "' in transform (line " + std::to_string(e->line) + ")");
    }
    default:
      fail(ErrorKind::restriction,
           "unsupported expression in transform (line " + std::to_string(e->line) + ")");
  }
}

// ---- Event compilation ----

Outcomes const_to_outcomes(const ConstValue& c, int line) {
  if (c.is_number()) return Outcomes::point(c.number());
  if (c.is_string()) return Outcomes::strings({c.str()});
  std::vector<double> nums;
  std::vector<std::string> strs;
  for (const ConstValue& item : c.list()) {
    if (item.is_number()) {
      nums.push_back(item.number());
    } else if (item.is_string()) {
      strs.push_back(item.str());
    } else {
      fail(ErrorKind::parse, "nested lists in membership test (line " + std::to_string(line) + ")");
    }
  }
  Outcomes out = Outcomes::empty();
  if (!nums.empty()) out = union_of(out, Outcomes::reals(nums));
  if (!strs.empty()) out = union_of(out, Outcomes::strings(strs));
  return out;
}

EventPtr literal_from(const TVal& t, BinOp o, const ConstValue& c, int line);

EventPtr event_from_comparison(BinOp op, const ExprPtr& lhs, const ExprPtr& rhs,
                               const ConstEnv& env, int line) {
  auto lc = const_eval(lhs, env);
  auto rc = const_eval(rhs, env);
  if (lc && rc) fail(ErrorKind::parse, "event compares two constants (line " + std::to_string(line) + ")");
  if (!lc && !rc) {
    // t1 OP t2 rewrites to (t1 - t2) OP 0 when both sides share one variable.
    TVal a = compile_tval(lhs, env);
    TVal b = compile_tval(rhs, env);
    TVal diff = tv_add(a, tv_scale(b, -1.0), line);
    if (diff.is_const())
      fail(ErrorKind::parse, "event is constant (line " + std::to_string(line) + ")");
    return literal_from(diff, op, ConstValue{0.0}, line);
  }
  bool const_on_left = lc.has_value();
  const ConstValue& c = const_on_left ? *lc : *rc;
  TVal t = compile_tval(const_on_left ? rhs : lhs, env);
  if (t.is_const()) fail(ErrorKind::parse, "event is constant (line " + std::to_string(line) + ")");
  // Normalize to  t OP' c  by flipping the relation when the constant is on
  // the left.
  BinOp o = op;
  if (const_on_left) {
    switch (op) {
      case BinOp::lt:
        o = BinOp::gt;
        break;
      case BinOp::le:
        o = BinOp::ge;
        break;
      case BinOp::gt:
        o = BinOp::lt;
        break;
      case BinOp::ge:
        o = BinOp::le;
        break;
      default:
        break;
    }
  }
  return literal_from(t, o, c, line);
}

EventPtr literal_from(const TVal& t, BinOp o, const ConstValue& c, int line) {
  if (o == BinOp::elem) {
    return containment(t.t, const_to_outcomes(c, line));
  }
  if (c.is_string()) {
    if (o != BinOp::eq && o != BinOp::ne)
      fail(ErrorKind::parse, "strings only support equality tests (line " + std::to_string(line) + ")");
    if (t.t->kind != Transform::Kind::identity)
      fail(ErrorKind::parse,
           "string comparison requires an untransformed variable (line " + std::to_string(line) + ")");
    Outcomes v = Outcomes::strings({c.str()}, o == BinOp::ne);
    return containment(t.t, v);
  }
  if (!c.is_number())
    fail(ErrorKind::parse, "comparison against a list (line " + std::to_string(line) + ")");
  double r = c.number();
  switch (o) {
    case BinOp::lt:
      return containment(t.t, Outcomes::interval(-kInf, true, r, true));
    case BinOp::le:
      return containment(t.t, Outcomes::interval(-kInf, true, r, false));
    case BinOp::gt:
      return containment(t.t, Outcomes::interval(r, true, kInf, true));
    case BinOp::ge:
      return containment(t.t, Outcomes::interval(r, false, kInf, true));
    case BinOp::eq:
      return containment(t.t, Outcomes::point(r));
    case BinOp::ne:
      return containment(t.t, complement(Outcomes::point(r)));
    default:
      fail(ErrorKind::parse, "unsupported comparison (line " + std::to_string(line) + ")");
  }
}

EventPtr compile_event_rec(const ExprPtr& e, const ConstEnv& env) {
  switch (e->kind) {
    case Expr::Kind::logical_and: {
      std::vector<EventPtr> children;
      for (const auto& c : e->items) children.push_back(compile_event_rec(c, env));
      return conjunction(std::move(children));
    }
    case Expr::Kind::logical_or: {
      std::vector<EventPtr> children;
      for (const auto& c : e->items) children.push_back(compile_event_rec(c, env));
      return disjunction(std::move(children));
    }
    case Expr::Kind::logical_not:
      return negate(compile_event_rec(e->base, env));
    case Expr::Kind::bin:
      if (e->op == BinOp::add || e->op == BinOp::sub || e->op == BinOp::mul ||
          e->op == BinOp::div || e->op == BinOp::pow)
        fail(ErrorKind::parse, "arithmetic expression used as an event (line " +
                                   std::to_string(e->line) + ")");
      return event_from_comparison(e->op, e->lhs, e->rhs, env, e->line);
    case Expr::Kind::name:
    case Expr::Kind::index: {
      // Truthiness of a bare variable: nonzero.
      TVal t = compile_tval(e, env);
      if (t.is_const()) fail(ErrorKind::parse, "constant event (line " + std::to_string(e->line) + ")");
      return containment(t.t, complement(Outcomes::point(0.0)));
    }
    default:
      fail(ErrorKind::parse, "expression is not an event (line " + std::to_string(e->line) + ")");
  }
}

}  // namespace

EventPtr compile_event(const ExprPtr& e) {
  ConstEnv empty;
  return compile_event_rec(e, empty);
}

// ---- Desugaring (switch expansion and loop unrolling) ----

namespace {

ExprPtr materialize(const ConstValue& v, int line) {
  auto e = std::make_shared<Expr>();
  e->line = line;
  if (v.is_number()) {
    e->kind = Expr::Kind::number;
    e->number = v.number();
  } else if (v.is_string()) {
    e->kind = Expr::Kind::string;
    e->text = v.str();
  } else {
    e->kind = Expr::Kind::list;
    for (const ConstValue& item : v.list()) e->items.push_back(materialize(item, line));
  }
  return e;
}

CommandPtr desugar_rec(const CommandPtr& c, ConstEnv& env) {
  if (!c) return c;
  switch (c->kind) {
    case Command::Kind::sequence: {
      auto out = std::make_shared<Command>(*c);
      for (auto& b : out->body) b = desugar_rec(b, env);
      return out;
    }
    case Command::Kind::assign: {
      if (c->target->kind == Expr::Kind::name &&
          !(c->value->kind == Expr::Kind::call && c->value->text == "array")) {
        if (auto v = const_eval(c->value, env)) env[c->target->text] = *v;
      }
      return c;
    }
    case Command::Kind::if_else: {
      auto out = std::make_shared<Command>(*c);
      for (auto& [test, body] : out->branches) body = desugar_rec(body, env);
      out->else_body = desugar_rec(c->else_body, env);
      return out;
    }
    case Command::Kind::for_loop: {
      auto lo = const_eval(c->lo, env);
      auto hi = const_eval(c->hi, env);
      if (!lo || !hi || !lo->is_number() || !hi->is_number())
        fail(ErrorKind::parse,
             "range bounds must be constants (line " + std::to_string(c->line) + ")");
      const CommandPtr& body = c->branches.front().second;
      std::vector<CommandPtr> cmds;
      for (long i = static_cast<long>(lo->number()); i < static_cast<long>(hi->number()); ++i) {
        auto value = std::make_shared<Expr>();
        value->kind = Expr::Kind::number;
        value->number = static_cast<double>(i);
        cmds.push_back(desugar_rec(substitute_name(body, c->binder, value), env));
      }
      if (cmds.empty())
        fail(ErrorKind::parse, "for loop over an empty range (line " + std::to_string(c->line) + ")");
      auto out = std::make_shared<Command>();
      out->kind = Command::Kind::sequence;
      out->body = std::move(cmds);
      out->line = c->line;
      return out;
    }
    case Command::Kind::switch_cases: {
      auto values = const_eval(c->values_list, env);
      if (!values || !values->is_list() || values->list().empty())
        fail(ErrorKind::parse, "switch cases need a nonempty constant list (line " +
                                   std::to_string(c->line) + ")");
      auto out = std::make_shared<Command>();
      out->kind = Command::Kind::if_else;
      out->line = c->line;
      const CommandPtr& body = c->branches.front().second;
      for (const ConstValue& v : values->list()) {
        ExprPtr value = materialize(v, c->line);
        auto test = std::make_shared<Expr>();
        test->kind = Expr::Kind::bin;
        test->op = BinOp::elem;
        test->lhs = c->scrutinee;
        auto lst = std::make_shared<Expr>();
        lst->kind = Expr::Kind::list;
        lst->items = {value};
        test->rhs = lst;
        test->line = c->line;
        out->branches.emplace_back(test, desugar_rec(substitute_name(body, c->binder, value), env));
      }
      return out;
    }
    default:
      return c;
  }
}

}  // namespace

CommandPtr desugar(const CommandPtr& c) {
  ConstEnv env;
  return desugar_rec(c, env);
}

EventPtr compile_event_text(const std::string& text) {
  return compile_event(parse_expression(text));
}

bool is_equality_conjunction(const EventPtr& e) {
  if (!is_clause(e)) return false;
  std::set<std::string> seen;
  for (const EventPtr& lit : clause_literals(e)) {
    if (lit->transform->kind != Transform::Kind::identity) return false;
    if (!seen.insert(lit->transform->var).second) return false;
    bool single_real =
        lit->values.is_reals() && lit->values.as_reals().items.size() == 1 &&
        std::isfinite(lit->values.as_reals().items[0]);
    bool single_str = lit->values.is_strings() &&
                      !lit->values.as_strings().complemented &&
                      lit->values.as_strings().items.size() == 1;
    if (!single_real && !single_str) return false;
  }
  return true;
}

// ---- Restriction checks ----

namespace {

void collect_rv_refs(const ExprPtr& e, const ConstEnv& env, std::set<std::string>* out) {
  if (!e) return;
  if (e->kind == Expr::Kind::name || e->kind == Expr::Kind::index) {
    if (auto nm = mangle_name(e, env)) {
      out->insert(*nm);
      return;
    }
  }
  collect_rv_refs(e->base, env, out);
  collect_rv_refs(e->index, env, out);
  collect_rv_refs(e->lhs, env, out);
  collect_rv_refs(e->rhs, env, out);
  for (const auto& item : e->items) collect_rv_refs(item, env, out);
  for (const auto& [k, v] : e->pairs) collect_rv_refs(v, env, out);
}

bool is_distribution_call(const ExprPtr& e) {
  if (e->kind != Expr::Kind::call) return false;
  static const std::set<std::string> kFamilies = {
      "normal", "uniform", "gamma", "beta", "poisson",
      "binomial", "bernoulli", "choice", "atom", "atomic"};
  return kFamilies.count(e->text) > 0;
}

struct CheckState {
  ConstEnv consts;
  std::map<std::string, long> arrays;
  std::set<std::string> defined;
  std::vector<RestrictionViolation>* out;
};

void check_rec(const CommandPtr& c, CheckState& st);

void check_branch_sets(const CommandPtr& c, CheckState& st) {
  std::vector<std::set<std::string>> branch_new;
  std::set<std::string> base = st.defined;
  auto run_branch = [&](const CommandPtr& body) {
    CheckState sub{st.consts, st.arrays, base, st.out};
    check_rec(body, sub);
    std::set<std::string> fresh;
    for (const auto& x : sub.defined)
      if (!base.count(x)) fresh.insert(x);
    branch_new.push_back(fresh);
    st.consts = sub.consts;
    st.arrays = sub.arrays;
  };
  for (const auto& [test, body] : c->branches) run_branch(body);
  if (c->else_body) run_branch(c->else_body);
  // Without an else, a chain may still be exhaustive (e.g. over the values
  // of a selector); a positive-probability residual surfaces at translation.
  for (size_t i = 1; i < branch_new.size(); ++i) {
    if (branch_new[i] != branch_new[0]) {
      st.out->push_back({"R2", "if/else branches define different variables", c->line});
      break;
    }
  }
  for (const auto& fresh : branch_new)
    st.defined.insert(fresh.begin(), fresh.end());
}

void check_rec(const CommandPtr& c, CheckState& st) {
  switch (c->kind) {
    case Command::Kind::sequence:
      for (const auto& b : c->body) check_rec(b, st);
      return;
    case Command::Kind::sample: {
      auto nm = mangle_name(c->target, st.consts);
      if (!nm) {
        st.out->push_back({"R1", "sample target is not a resolvable variable", c->line});
        return;
      }
      if (st.defined.count(*nm)) {
        st.out->push_back({"R1", "variable '" + *nm + "' is redefined", c->line});
        return;
      }
      if (!is_distribution_call(c->value)) {
        // `x ~ expr` with a transform on the right defines a derived
        // variable; apply the transform-assignment checks.
        std::set<std::string> refs;
        collect_rv_refs(c->value, st.consts, &refs);
        std::set<std::string> rv_refs;
        for (const auto& r : refs)
          if (st.defined.count(r)) rv_refs.insert(r);
        if (rv_refs.size() != 1) {
          st.out->push_back({"R3",
                             "transforms must be univariate; expression references " +
                                 std::to_string(rv_refs.size()) + " variables",
                             c->line});
          return;
        }
        st.defined.insert(*nm);
        return;
      }
      // R4: parameters must be constants after macro expansion; the
      // workaround for finite-support parameters is a switch over them.
      for (const auto& arg : c->value->items) {
        std::set<std::string> refs;
        collect_rv_refs(arg, st.consts, &refs);
        if (!refs.empty())
          st.out->push_back({"R4",
                             "distribution parameter references variable '" + *refs.begin() +
                                 "'; use switch over a finite-support variable",
                             c->line});
      }
      for (const auto& [k, arg] : c->value->pairs) {
        std::set<std::string> refs;
        collect_rv_refs(arg, st.consts, &refs);
        if (!refs.empty())
          st.out->push_back({"R4",
                             "distribution parameter references variable '" + *refs.begin() +
                                 "'; use switch over a finite-support variable",
                             c->line});
      }
      st.defined.insert(*nm);
      return;
    }
    case Command::Kind::assign: {
      // array declaration
      if (c->value->kind == Expr::Kind::call && c->value->text == "array") {
        if (c->target->kind == Expr::Kind::name) st.arrays[c->target->text] = 0;
        return;
      }
      if (auto v = const_eval(c->value, st.consts)) {
        if (c->target->kind == Expr::Kind::name && !st.defined.count(c->target->text)) {
          st.consts[c->target->text] = *v;
          return;
        }
      }
      auto nm = mangle_name(c->target, st.consts);
      if (!nm) {
        st.out->push_back({"R1", "assignment target is not a resolvable variable", c->line});
        return;
      }
      if (st.defined.count(*nm)) {
        st.out->push_back({"R1", "variable '" + *nm + "' is redefined", c->line});
        return;
      }
      std::set<std::string> refs;
      collect_rv_refs(c->value, st.consts, &refs);
      std::set<std::string> rv_refs;
      for (const auto& r : refs)
        if (st.defined.count(r)) rv_refs.insert(r);
      if (rv_refs.size() != 1) {
        st.out->push_back({"R3",
                           "transforms must be univariate; expression references " +
                               std::to_string(rv_refs.size()) + " variables",
                           c->line});
        return;
      }
      st.defined.insert(*nm);
      return;
    }
    case Command::Kind::if_else:
      check_branch_sets(c, st);
      return;
    case Command::Kind::condition_event:
    case Command::Kind::constrain_event:
      return;
    default:
      st.out->push_back({"R1", "switch/for must be desugared before checking", c->line});
      return;
  }
}

}  // namespace

std::vector<RestrictionViolation> check_restrictions(const CommandPtr& program) {
  std::vector<RestrictionViolation> out;
  CheckState st{{}, {}, {}, &out};
  check_rec(program, st);
  return out;
}

// ---- Translation ----

namespace {

struct TState {
  Graph g;
  std::optional<NodeId> root;
  ConstEnv consts;
  std::set<std::string> rvs;
  std::vector<std::string>* warnings;
  bool optimize = true;

  explicit TState(bool interning) : g(interning) {}

  ConditionOptions condition_opts() const {
    ConditionOptions opts;
    opts.memoize = optimize;
    opts.share_subtrees = optimize;
    return opts;
  }
};

Distribution compile_distribution(const ExprPtr& e, const ConstEnv& env) {
  auto num_arg = [&](size_t i, const char* kw) -> std::optional<double> {
    for (const auto& [k, v] : e->pairs) {
      if (k == kw) {
        auto c = const_eval(v, env);
        if (!c || !c->is_number())
          fail(ErrorKind::restriction, "distribution parameter '" + std::string(kw) +
                                           "' must be a numeric constant (line " +
                                           std::to_string(e->line) + ")");
        return c->number();
      }
    }
    if (i < e->items.size()) {
      auto c = const_eval(e->items[i], env);
      if (!c || !c->is_number())
        fail(ErrorKind::restriction,
             "distribution parameters must be numeric constants (line " +
                 std::to_string(e->line) + ")");
      return c->number();
    }
    return std::nullopt;
  };
  auto require = [&](std::optional<double> v, const char* kw) {
    if (!v)
      fail(ErrorKind::parse, e->text + " is missing parameter '" + std::string(kw) +
                                 "' (line " + std::to_string(e->line) + ")");
    return *v;
  };
  const std::string& f = e->text;
  if (f == "normal") {
    double mean = require(num_arg(0, "mean"), "mean");
    double std_ = require(num_arg(1, "std"), "std");
    return make_dist_real(normal_cdf(mean, std_), -kInf, kInf);
  }
  if (f == "uniform") {
    double lo = require(num_arg(0, "lo"), "lo");
    double hi = require(num_arg(1, "hi"), "hi");
    return make_dist_real(uniform_cdf(lo, hi), lo, hi);
  }
  if (f == "gamma") {
    double shape = require(num_arg(0, "shape"), "shape");
    double scale = num_arg(1, "scale").value_or(1.0);
    return make_dist_real(gamma_cdf(shape, scale), 0.0, kInf);
  }
  if (f == "beta") {
    double a = require(num_arg(0, "a"), "a");
    double b = require(num_arg(1, "b"), "b");
    return make_dist_real(beta_cdf(a, b), 0.0, 1.0);
  }
  if (f == "poisson") {
    double mean = require(num_arg(0, "mean"), "mean");
    return make_dist_int(poisson_cdf(mean), 0.0, kInf);
  }
  if (f == "binomial") {
    double n = require(num_arg(0, "n"), "n");
    double p = require(num_arg(1, "p"), "p");
    return make_dist_int(binomial_cdf(static_cast<int>(n), p), 0.0, n);
  }
  if (f == "bernoulli") {
    double p = require(num_arg(0, "p"), "p");
    return make_dist_int(binomial_cdf(1, p), 0.0, 1.0);
  }
  if (f == "atom" || f == "atomic") {
    double loc = require(num_arg(0, "loc"), "loc");
    return make_dist_int(atomic_cdf(loc), loc - 0.5, loc);
  }
  if (f == "choice") {
    if (e->items.size() != 1 || e->items[0]->kind != Expr::Kind::dict)
      fail(ErrorKind::parse, "choice expects a {'label': weight} dict (line " +
                                 std::to_string(e->line) + ")");
    std::vector<std::pair<std::string, double>> atoms;
    for (const auto& [key, v] : e->items[0]->pairs) {
      auto c = const_eval(v, env);
      if (!c || !c->is_number())
        fail(ErrorKind::parse, "choice weights must be numeric constants (line " +
                                   std::to_string(e->line) + ")");
      atoms.emplace_back(key, c->number());
    }
    return make_dist_str(std::move(atoms));
  }
  fail(ErrorKind::parse, "unknown distribution '" + f + "' (line " + std::to_string(e->line) + ")");
}

NodeId join_product(TState& st, NodeId extra) {
  if (!st.root) return extra;
  return st.g.product({*st.root, extra});
}

NodeId assign_transform(TState& st, NodeId id, const std::string& x, const TransformPtr& t,
                        const std::string& y) {
  const Node n = st.g.node(id);  // copy; appends reallocate the table
  if (std::holds_alternative<LeafNode>(n.data)) {
    const auto& l = std::get<LeafNode>(n.data);
    if (std::holds_alternative<DistStr>(l.dist))
      fail(ErrorKind::restriction, "cannot transform the nominal variable '" + y + "'");
    Environment env = l.env;
    env.entries.emplace_back(x, t);
    return st.g.leaf(l.var, l.dist, std::move(env));
  }
  if (std::holds_alternative<SumNode>(n.data)) {
    const auto& s = std::get<SumNode>(n.data);
    std::vector<NodeId> children;
    for (NodeId c : s.children) children.push_back(assign_transform(st, c, x, t, y));
    return st.g.sum(std::move(children), s.weights);
  }
  const auto& p = std::get<ProductNode>(n.data);
  std::vector<NodeId> children;
  bool placed = false;
  for (NodeId c : p.children) {
    const auto& sc = st.g.node(c).scope;
    if (!placed && std::binary_search(sc.begin(), sc.end(), y)) {
      children.push_back(assign_transform(st, c, x, t, y));
      placed = true;
    } else {
      children.push_back(c);
    }
  }
  if (!placed) fail(ErrorKind::scope, "variable '" + y + "' not found in any product child");
  return st.g.product(std::move(children));
}

NodeId factor_sum(Graph& g, NodeId sum_id) {
  if (!std::holds_alternative<SumNode>(g.node(sum_id).data)) return sum_id;
  const SumNode s = std::get<SumNode>(g.node(sum_id).data);  // copy before appends
  std::vector<std::vector<NodeId>> sets;
  for (NodeId c : s.children) {
    if (std::holds_alternative<ProductNode>(g.node(c).data)) {
      auto kids = std::get<ProductNode>(g.node(c).data).children;
      std::sort(kids.begin(), kids.end());
      sets.push_back(std::move(kids));
    } else {
      sets.push_back({c});
    }
  }
  std::vector<NodeId> common = sets[0];
  for (size_t i = 1; i < sets.size(); ++i) {
    std::vector<NodeId> next;
    std::set_intersection(common.begin(), common.end(), sets[i].begin(), sets[i].end(),
                          std::back_inserter(next));
    common = std::move(next);
  }
  if (common.empty()) return sum_id;
  std::vector<std::vector<NodeId>> rests;
  bool all_empty = true, any_empty = false;
  for (const auto& set : sets) {
    std::vector<NodeId> rest;
    std::set_difference(set.begin(), set.end(), common.begin(), common.end(),
                        std::back_inserter(rest));
    any_empty = any_empty || rest.empty();
    all_empty = all_empty && rest.empty();
    rests.push_back(std::move(rest));
  }
  if (all_empty) return g.product(common);
  if (any_empty) return sum_id;  // cannot hoist without breaking C4
  std::vector<NodeId> inner_children;
  for (auto& rest : rests)
    inner_children.push_back(rest.size() == 1 ? rest[0] : g.product(rest));
  NodeId inner = g.sum(std::move(inner_children), s.weights);
  common.push_back(inner);
  return g.product(std::move(common));
}

void run_command(TState& st, const CommandPtr& c);

void run_if(TState& st, const std::vector<std::pair<ExprPtr, CommandPtr>>& branches,
            size_t index, const CommandPtr& else_body) {
  if (index >= branches.size()) {
    if (else_body) run_command(st, else_body);
    return;
  }
  const auto& [test, body] = branches[index];
  EventPtr e = compile_event_rec(test, st.consts);
  if (!st.root)
    fail(ErrorKind::restriction, "if-test before any variable is defined");
  double pt = prob(st.g, *st.root, e);
  if (pt <= 0.0) {
    if (st.warnings) st.warnings->push_back("dropping zero-probability branch");
    run_if(st, branches, index + 1, else_body);
    return;
  }
  if (pt >= 1.0) {
    if (st.warnings)
      st.warnings->push_back("test holds almost surely; dropping remaining branches");
    st.root = condition(st.g, *st.root, e, nullptr, st.condition_opts());
    run_command(st, body);
    return;
  }
  NodeId base = *st.root;
  st.root = condition(st.g, base, e, nullptr, st.condition_opts());
  run_command(st, body);
  NodeId taken = *st.root;
  std::set<std::string> taken_rvs = st.rvs;

  st.root = condition(st.g, base, negate_full(e), nullptr, st.condition_opts());
  run_if(st, branches, index + 1, else_body);
  NodeId skipped = *st.root;
  st.rvs.insert(taken_rvs.begin(), taken_rvs.end());

  NodeId merged = st.g.sum({taken, skipped}, {pt, 1.0 - pt});
  if (st.optimize) merged = factor_sum(st.g, merged);
  st.root = merged;
}

void run_command(TState& st, const CommandPtr& c) {
  switch (c->kind) {
    case Command::Kind::sequence:
      for (const auto& b : c->body) run_command(st, b);
      return;
    case Command::Kind::sample: {
      auto nm = mangle_name(c->target, st.consts);
      if (!nm) fail(ErrorKind::restriction, "unresolvable sample target (line " +
                                                std::to_string(c->line) + ")");
      if (is_distribution_call(c->value)) {
        Distribution d = compile_distribution(c->value, st.consts);
        Environment env;
        env.entries.emplace_back(*nm, identity(*nm));
        NodeId leaf = st.g.leaf(*nm, std::move(d), std::move(env));
        st.root = join_product(st, leaf);
        st.rvs.insert(*nm);
        return;
      }
      // `x ~ expr` with a transform on the right is treated as a derived
      // variable, matching programs that use ~ for assignments.
      TVal t = compile_tval(c->value, st.consts);
      if (t.is_const())
        fail(ErrorKind::restriction,
             "sampled expression is neither a distribution nor a transform (line " +
                 std::to_string(c->line) + ")");
      const std::string y = *vars(t.t).begin();
      if (!st.root || !st.rvs.count(y))
        fail(ErrorKind::scope, "undefined variable '" + y + "' (line " + std::to_string(c->line) + ")");
      st.root = assign_transform(st, *st.root, *nm, t.t, y);
      st.rvs.insert(*nm);
      return;
    }
    case Command::Kind::assign: {
      if (c->value->kind == Expr::Kind::call && c->value->text == "array") return;
      if (c->target->kind == Expr::Kind::name && !st.rvs.count(c->target->text)) {
        if (auto v = const_eval(c->value, st.consts)) {
          st.consts[c->target->text] = *v;
          return;
        }
      }
      auto nm = mangle_name(c->target, st.consts);
      if (!nm) fail(ErrorKind::restriction, "unresolvable assignment target (line " +
                                                std::to_string(c->line) + ")");
      TVal t = compile_tval(c->value, st.consts);
      if (t.is_const())
        fail(ErrorKind::restriction, "constant assignment to an existing variable (line " +
                                         std::to_string(c->line) + ")");
      const std::string y = *vars(t.t).begin();
      if (!st.root || !st.rvs.count(y))
        fail(ErrorKind::scope, "undefined variable '" + y + "' (line " + std::to_string(c->line) + ")");
      st.root = assign_transform(st, *st.root, *nm, t.t, y);
      st.rvs.insert(*nm);
      return;
    }
    case Command::Kind::if_else:
      run_if(st, c->branches, 0, c->else_body);
      return;
    case Command::Kind::condition_event: {
      if (!st.root) fail(ErrorKind::restriction, "condition before any variable is defined");
      EventPtr e = compile_event_rec(c->value, st.consts);
      if (is_equality_conjunction(e)) {
        st.root = constrain(st.g, *st.root, e, nullptr, st.condition_opts());
      } else {
        st.root = condition(st.g, *st.root, e, nullptr, st.condition_opts());
      }
      return;
    }
    case Command::Kind::constrain_event: {
      if (!st.root) fail(ErrorKind::restriction, "constrain before any variable is defined");
      EventPtr e = compile_event_rec(c->value, st.consts);
      st.root = constrain(st.g, *st.root, e, nullptr, st.condition_opts());
      return;
    }
    default:
      fail(ErrorKind::restriction, "switch/for must be desugared before translation");
  }
}

NodeId optimize_rec(Graph& g, NodeId id, std::map<NodeId, NodeId>* remap) {
  auto it = remap->find(id);
  if (it != remap->end()) return it->second;
  const Node n = g.node(id);
  NodeId result;
  if (std::holds_alternative<LeafNode>(n.data)) {
    const auto& l = std::get<LeafNode>(n.data);
    result = g.leaf(l.var, l.dist, l.env);
  } else if (std::holds_alternative<SumNode>(n.data)) {
    const auto& s = std::get<SumNode>(n.data);
    std::vector<NodeId> children;
    for (NodeId c : s.children) children.push_back(optimize_rec(g, c, remap));
    result = factor_sum(g, g.sum(std::move(children), s.weights));
  } else {
    const auto& p = std::get<ProductNode>(n.data);
    std::vector<NodeId> children;
    for (NodeId c : p.children) children.push_back(optimize_rec(g, c, remap));
    result = g.product(std::move(children));
  }
  remap->emplace(id, result);
  return result;
}

}  // namespace

NodeId optimize_graph(Graph& g, NodeId root) {
  std::map<NodeId, NodeId> remap;
  return optimize_rec(g, root, &remap);
}

TranslateResult translate(const CommandPtr& program, const TranslateOptions& opts) {
  CommandPtr desugared = desugar(program);
  auto violations = check_restrictions(desugared);
  if (!violations.empty()) {
    std::string msg = "restriction violations:";
    for (const auto& v : violations)
      msg += "\n  [" + v.code + "] line " + std::to_string(v.line) + ": " + v.message;
    fail(ErrorKind::restriction, msg);
  }
  TranslateResult out;
  TState st(opts.optimize);
  st.warnings = &out.warnings;
  st.optimize = opts.optimize;
  run_command(st, desugared);
  if (!st.root) fail(ErrorKind::restriction, "program defines no variables");
  out.nodes_before_optimize = st.g.reachable_count(*st.root);
  NodeId root = *st.root;
  if (opts.optimize) root = optimize_graph(st.g, root);
  out.nodes_after_optimize = st.g.reachable_count(root);
  out.graph = std::move(st.g);
  out.root = root;
  return out;
}

TranslateResult translate_source(const std::string& text, const TranslateOptions& opts) {
  return translate(parse_program(text), opts);
}

// ---- Reverse translation ----

namespace {

std::string fmt_num(double x) {
  if (x == kInf) return "inf";
  if (x == -kInf) return "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string transform_expr(const TransformPtr& t) {
  switch (t->kind) {
    case Transform::Kind::identity:
      return t->var;
    case Transform::Kind::reciprocal:
      return "(1/(" + transform_expr(t->inner) + "))";
    case Transform::Kind::abs_value:
      return "abs(" + transform_expr(t->inner) + ")";
    case Transform::Kind::root:
      if (t->root_degree == 2) return "sqrt(" + transform_expr(t->inner) + ")";
      return "root(" + transform_expr(t->inner) + ", " + std::to_string(t->root_degree) + ")";
    case Transform::Kind::exponential:
      if (t->base == std::exp(1.0)) return "exp(" + transform_expr(t->inner) + ")";
      return "(" + fmt_num(t->base) + " ** (" + transform_expr(t->inner) + "))";
    case Transform::Kind::logarithm:
      if (t->base == std::exp(1.0)) return "log(" + transform_expr(t->inner) + ")";
      return "log(" + transform_expr(t->inner) + ", " + fmt_num(t->base) + ")";
    case Transform::Kind::polynomial: {
      std::string inner = transform_expr(t->inner);
      std::string out = "(";
      bool first = true;
      for (size_t i = 0; i < t->coeffs.size(); ++i) {
        if (t->coeffs[i] == 0.0 && !(i == 0 && t->coeffs.size() == 1)) continue;
        if (!first) out += " + ";
        first = false;
        if (i == 0) {
          out += fmt_num(t->coeffs[i]);
        } else if (i == 1) {
          out += fmt_num(t->coeffs[i]) + "*" + inner;
        } else {
          out += fmt_num(t->coeffs[i]) + "*" + inner + "**" + std::to_string(i);
        }
      }
      if (first) out += "0";
      return out + ")";
    }
    case Transform::Kind::piecewise:
      fail(ErrorKind::unsupported_event, "piecewise transforms have no source form");
  }
  return "?";
}

struct Emitter {
  const Graph& g;
  // Selector draws are emitted unconditionally up front so that every
  // if/elif branch defines the same variables (nested mixtures would
  // otherwise introduce selectors in only one branch).
  std::vector<std::string> prologue;
  std::vector<std::string> lines;
  std::set<std::string> used;
  int selector = 0;

  std::string fresh_selector() {
    std::string name;
    do {
      name = "b_" + std::to_string(selector++);
    } while (used.count(name));
    used.insert(name);
    return name;
  }

  void line(int indent, const std::string& text) {
    lines.push_back(std::string(static_cast<size_t>(indent) * 4, ' ') + text);
  }

  void emit_leaf(const LeafNode& l, int indent) {
    if (std::holds_alternative<DistStr>(l.dist)) {
      const auto& ds = std::get<DistStr>(l.dist);
      std::string args = "{";
      for (size_t i = 0; i < ds.atoms.size(); ++i) {
        if (i) args += ", ";
        args += "'" + ds.atoms[i].first + "': " + fmt_num(ds.atoms[i].second);
      }
      line(indent, l.var + " ~ choice(" + args + "})");
    } else if (std::holds_alternative<DistReal>(l.dist)) {
      const auto& dr = std::get<DistReal>(l.dist);
      std::string args;
      auto params = dr.F->params();
      for (size_t i = 0; i < params.size(); ++i) {
        if (i) args += ", ";
        args += fmt_num(params[i]);
      }
      line(indent, l.var + " ~ " + dr.F->family() + "(" + args + ")");
      auto [slo, shi] = dr.F->support();
      bool lo_tight = dr.lo <= slo;
      bool hi_tight = dr.hi >= shi;
      if (!lo_tight && !hi_tight) {
        line(indent, "condition(" + fmt_num(dr.lo) + " <= " + l.var + " <= " + fmt_num(dr.hi) + ")");
      } else if (!lo_tight) {
        line(indent, "condition(" + fmt_num(dr.lo) + " <= " + l.var + ")");
      } else if (!hi_tight) {
        line(indent, "condition(" + l.var + " <= " + fmt_num(dr.hi) + ")");
      }
    } else {
      const auto& di = std::get<DistInt>(l.dist);
      if (di.F->family() == "atomic") {
        line(indent, l.var + " ~ atom(" + fmt_num(di.F->params()[0]) + ")");
      } else {
        std::string args;
        auto params = di.F->params();
        for (size_t i = 0; i < params.size(); ++i) {
          if (i) args += ", ";
          args += fmt_num(params[i]);
        }
        line(indent, l.var + " ~ " + di.F->family() + "(" + args + ")");
        auto [slo, shi] = di.F->support();
        bool lo_tight = di.lo <= slo;
        bool hi_tight = di.hi >= shi;
        if (!lo_tight && !hi_tight) {
          line(indent,
               "condition(" + fmt_num(di.lo) + " <= " + l.var + " <= " + fmt_num(di.hi) + ")");
        } else if (!lo_tight) {
          line(indent, "condition(" + fmt_num(di.lo) + " <= " + l.var + ")");
        } else if (!hi_tight) {
          line(indent, "condition(" + l.var + " <= " + fmt_num(di.hi) + ")");
        }
      }
    }
    for (size_t i = 1; i < l.env.entries.size(); ++i) {
      const auto& [x, t] = l.env.entries[i];
      line(indent, x + " = " + transform_expr(t));
    }
  }

  void emit(NodeId id, int indent) {
    const Node& n = g.node(id);
    if (std::holds_alternative<LeafNode>(n.data)) {
      emit_leaf(std::get<LeafNode>(n.data), indent);
      return;
    }
    if (std::holds_alternative<ProductNode>(n.data)) {
      for (NodeId c : std::get<ProductNode>(n.data).children) emit(c, indent);
      return;
    }
    const auto& s = std::get<SumNode>(n.data);
    double z = 0.0;
    for (double w : s.weights) z += w;
    std::string sel = fresh_selector();
    std::string dict = "{";
    for (size_t i = 0; i < s.children.size(); ++i) {
      if (i) dict += ", ";
      dict += "'" + std::to_string(i + 1) + "': " + fmt_num(s.weights[i] / z);
    }
    prologue.push_back(sel + " ~ choice(" + dict + "})");
    for (size_t i = 0; i < s.children.size(); ++i) {
      std::string kw = i == 0 ? "if" : "elif";
      line(indent, kw + " (" + sel + " == '" + std::to_string(i + 1) + "'):");
      emit(s.children[i], indent + 1);
    }
  }
};

}  // namespace

std::string to_source(const Graph& g, NodeId root) {
  Emitter em{g, {}, {}, {}, 0};
  for (const auto& x : g.node(root).scope) em.used.insert(x);
  em.emit(root, 0);
  std::string out;
  for (const auto& l : em.prologue) out += l + "\n";
  for (const auto& l : em.lines) out += l + "\n";
  return out;
}

}  // namespace spe
