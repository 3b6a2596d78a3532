#include "spe/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "spe/errors.hpp"
#include "spe/events.hpp"

namespace spe {

namespace {

std::vector<double> strip_trailing_zeros(std::vector<double> c) {
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  return c;
}

double eval_poly(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
  return acc;
}

void require_inner(const TransformPtr& inner, const char* what) {
  if (!inner) fail(ErrorKind::domain, std::string(what) + ": missing inner transform");
  if (inner->kind == Transform::Kind::piecewise)
    fail(ErrorKind::domain, std::string(what) + ": piecewise must be top-level");
}

}  // namespace

TransformPtr identity(std::string var) {
  auto t = std::make_shared<Transform>();
  t->kind = Transform::Kind::identity;
  t->var = std::move(var);
  return t;
}

TransformPtr reciprocal(TransformPtr inner) {
  require_inner(inner, "reciprocal");
  auto t = std::make_shared<Transform>();
  t->kind = Transform::Kind::reciprocal;
  t->inner = std::move(inner);
  return t;
}

TransformPtr abs_value(TransformPtr inner) {
  require_inner(inner, "abs");
  auto t = std::make_shared<Transform>();
  t->kind = Transform::Kind::abs_value;
  t->inner = std::move(inner);
  return t;
}

TransformPtr root(TransformPtr inner, int degree) {
  require_inner(inner, "root");
  if (degree < 1) fail(ErrorKind::domain, "root degree must be positive");
  auto t = std::make_shared<Transform>();
  t->kind = Transform::Kind::root;
  t->inner = std::move(inner);
  t->root_degree = degree;
  return t;
}

TransformPtr exponential(TransformPtr inner, double base) {
  require_inner(inner, "exp");
  if (!(base > 1.0))
    fail(ErrorKind::domain, "exponential base must exceed 1 (rewrite smaller bases via a negated argument)");
  auto t = std::make_shared<Transform>();
  t->kind = Transform::Kind::exponential;
  t->inner = std::move(inner);
  t->base = base;
  return t;
}

TransformPtr logarithm(TransformPtr inner, double base) {
  require_inner(inner, "log");
  if (!(base > 1.0)) fail(ErrorKind::domain, "logarithm base must exceed 1");
  auto t = std::make_shared<Transform>();
  t->kind = Transform::Kind::logarithm;
  t->inner = std::move(inner);
  t->base = base;
  return t;
}

TransformPtr polynomial(TransformPtr inner, std::vector<double> coeffs) {
  require_inner(inner, "poly");
  coeffs = strip_trailing_zeros(std::move(coeffs));
  if (coeffs.empty()) fail(ErrorKind::domain, "poly needs at least one coefficient");
  auto t = std::make_shared<Transform>();
  t->kind = Transform::Kind::polynomial;
  t->inner = std::move(inner);
  t->coeffs = std::move(coeffs);
  return t;
}

TransformPtr piecewise(std::vector<std::pair<TransformPtr, EventPtr>> pieces) {
  if (pieces.empty()) fail(ErrorKind::domain, "piecewise needs at least one piece");
  std::set<std::string> all;
  for (const auto& [pt, pe] : pieces) {
    auto tv = vars(pt);
    auto ev = vars(pe);
    all.insert(tv.begin(), tv.end());
    all.insert(ev.begin(), ev.end());
  }
  if (all.size() != 1)
    fail(ErrorKind::domain, "piecewise pieces must share a single variable");
  const std::string& x = *all.begin();
  for (size_t i = 0; i < pieces.size(); ++i) {
    for (size_t j = i + 1; j < pieces.size(); ++j) {
      Outcomes gi = eval_along(pieces[i].second, x);
      Outcomes gj = eval_along(pieces[j].second, x);
      if (!intersection_of(gi, gj).is_empty())
        fail(ErrorKind::domain, "piecewise guards overlap");
    }
  }
  auto t = std::make_shared<Transform>();
  t->kind = Transform::Kind::piecewise;
  t->pieces = std::move(pieces);
  return t;
}

bool transforms_equal(const TransformPtr& a, const TransformPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case Transform::Kind::identity:
      return a->var == b->var;
    case Transform::Kind::reciprocal:
    case Transform::Kind::abs_value:
      return transforms_equal(a->inner, b->inner);
    case Transform::Kind::root:
      return a->root_degree == b->root_degree && transforms_equal(a->inner, b->inner);
    case Transform::Kind::exponential:
    case Transform::Kind::logarithm:
      return a->base == b->base && transforms_equal(a->inner, b->inner);
    case Transform::Kind::polynomial:
      return a->coeffs == b->coeffs && transforms_equal(a->inner, b->inner);
    case Transform::Kind::piecewise: {
      if (a->pieces.size() != b->pieces.size()) return false;
      for (size_t i = 0; i < a->pieces.size(); ++i) {
        if (!transforms_equal(a->pieces[i].first, b->pieces[i].first)) return false;
        if (!events_equal(a->pieces[i].second, b->pieces[i].second)) return false;
      }
      return true;
    }
  }
  return false;
}

std::set<std::string> vars(const TransformPtr& t) {
  switch (t->kind) {
    case Transform::Kind::identity:
      return {t->var};
    case Transform::Kind::piecewise: {
      std::set<std::string> out;
      for (const auto& [pt, pe] : t->pieces) {
        auto tv = vars(pt);
        auto ev = vars(pe);
        out.insert(tv.begin(), tv.end());
        out.insert(ev.begin(), ev.end());
      }
      return out;
    }
    default:
      return vars(t->inner);
  }
}

std::optional<double> evaluate(const TransformPtr& t, double r) {
  switch (t->kind) {
    case Transform::Kind::identity:
      return r;
    case Transform::Kind::reciprocal: {
      auto y = evaluate(t->inner, r);
      if (!y || *y == 0.0) return std::nullopt;
      return 1.0 / *y;
    }
    case Transform::Kind::abs_value: {
      auto y = evaluate(t->inner, r);
      if (!y) return std::nullopt;
      return std::fabs(*y);
    }
    case Transform::Kind::root: {
      auto y = evaluate(t->inner, r);
      if (!y || *y < 0.0) return std::nullopt;
      return std::pow(*y, 1.0 / t->root_degree);
    }
    case Transform::Kind::exponential: {
      auto y = evaluate(t->inner, r);
      if (!y) return std::nullopt;
      return std::pow(t->base, *y);
    }
    case Transform::Kind::logarithm: {
      auto y = evaluate(t->inner, r);
      if (!y || *y <= 0.0) return std::nullopt;
      return std::log(*y) / std::log(t->base);
    }
    case Transform::Kind::polynomial: {
      auto y = evaluate(t->inner, r);
      if (!y) return std::nullopt;
      return eval_poly(t->coeffs, *y);
    }
    case Transform::Kind::piecewise: {
      const std::string x = *vars(t).begin();
      for (const auto& [pt, pe] : t->pieces) {
        if (contains_real(eval_along(pe, x), r)) return evaluate(pt, r);
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

Outcomes domain_of(const TransformPtr& t) {
  switch (t->kind) {
    case Transform::Kind::identity:
      return Outcomes::all_reals();
    case Transform::Kind::reciprocal:
      return preimage(t->inner, union_of(Outcomes::interval(-kInf, true, 0, true),
                                         Outcomes::interval(0, true, kInf, true)));
    case Transform::Kind::abs_value:
    case Transform::Kind::exponential:
    case Transform::Kind::polynomial:
      return preimage(t->inner, Outcomes::all_reals());
    case Transform::Kind::root:
      return preimage(t->inner, Outcomes::interval(0, false, kInf, true));
    case Transform::Kind::logarithm:
      return preimage(t->inner, Outcomes::interval(0, true, kInf, true));
    case Transform::Kind::piecewise: {
      const std::string x = *vars(t).begin();
      std::vector<Outcomes> parts;
      for (const auto& [pt, pe] : t->pieces)
        parts.push_back(intersection_of(domain_of(pt), eval_along(pe, x)));
      return union_of(parts);
    }
  }
  return Outcomes::empty();
}

std::pair<double, double> poly_limits(const std::vector<double>& coeffs) {
  auto c = strip_trailing_zeros(coeffs);
  size_t n = c.size() - 1;
  if (n == 0) return {c[0], c[0]};
  bool positive = c[n] > 0;
  if (n % 2 == 0) return positive ? std::make_pair(kInf, kInf) : std::make_pair(-kInf, -kInf);
  return positive ? std::make_pair(-kInf, kInf) : std::make_pair(kInf, -kInf);
}

Outcomes poly_solve(double r, const std::vector<double>& coeffs) {
  if (std::isinf(r)) {
    auto [at_neg, at_pos] = poly_limits(coeffs);
    std::vector<double> pts;
    if (at_neg == r) pts.push_back(-kInf);
    if (at_pos == r) pts.push_back(kInf);
    return Outcomes::reals(pts);
  }
  std::vector<double> shifted = coeffs;
  shifted[0] -= r;
  if (strip_trailing_zeros(shifted) == std::vector<double>{0.0})
    return Outcomes::all_reals();  // identically equal to r
  return Outcomes::reals(poly_roots(shifted));
}

Outcomes poly_lte(bool strict, double r, const std::vector<double>& coeffs) {
  if (r == -kInf) {
    if (strict) return Outcomes::empty();
    return poly_solve(r, coeffs);
  }
  if (r == kInf) {
    // Every real satisfies p(x) < inf; the sentinel endpoints carry no
    // real members either way.
    return Outcomes::all_reals();
  }
  std::vector<double> shifted = coeffs;
  shifted[0] -= r;
  std::vector<double> stripped = strip_trailing_zeros(shifted);
  if (stripped.size() == 1) {
    bool sat = strict ? stripped[0] < 0 : stripped[0] <= 0;
    return sat ? Outcomes::all_reals() : Outcomes::empty();
  }
  std::vector<double> rts = poly_roots(shifted);
  std::vector<double> cuts;
  cuts.push_back(-kInf);
  cuts.insert(cuts.end(), rts.begin(), rts.end());
  cuts.push_back(kInf);
  std::vector<Outcomes> parts;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    double lo = cuts[i], hi = cuts[i + 1];
    double mid;
    if (std::isinf(lo) && std::isinf(hi)) {
      mid = 0.0;
    } else if (std::isinf(lo)) {
      mid = hi - 1.0;
    } else if (std::isinf(hi)) {
      mid = lo + 1.0;
    } else {
      mid = lo + (hi - lo) / 2;
    }
    if (eval_poly(shifted, mid) < 0) parts.push_back(Outcomes::interval(lo, true, hi, true));
  }
  if (!strict && !rts.empty()) parts.push_back(Outcomes::reals(rts));
  return union_of(parts);
}

namespace {

std::vector<double> derivative(const std::vector<double>& c) {
  std::vector<double> d;
  for (size_t i = 1; i < c.size(); ++i) d.push_back(c[i] * static_cast<double>(i));
  return d;
}

double poly_scale(const std::vector<double>& c, double x) {
  double ax = std::max(1.0, std::fabs(x));
  double scale = 0.0, p = 1.0;
  for (double ci : c) {
    scale += std::fabs(ci) * p;
    p *= ax;
  }
  return std::max(scale, 1.0);
}

double bisect_root(const std::vector<double>& c, double a, double b) {
  double fa = eval_poly(c, a);
  for (int i = 0; i < 200; ++i) {
    double m = a + (b - a) / 2;
    if (m == a || m == b) break;
    double fm = eval_poly(c, m);
    if (fm == 0.0) return m;
    if ((fa < 0) == (fm < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return a + (b - a) / 2;
}

double newton_polish(const std::vector<double>& c, const std::vector<double>& d, double x) {
  double best = x;
  double best_res = std::fabs(eval_poly(c, x));
  for (int i = 0; i < 50; ++i) {
    double fx = eval_poly(c, x);
    double dx = eval_poly(d, x);
    if (dx == 0.0) break;
    double next = x - fx / dx;
    if (!std::isfinite(next)) break;
    double res = std::fabs(eval_poly(c, next));
    if (res < best_res) {
      best = next;
      best_res = res;
    }
    if (next == x) break;
    x = next;
    if (best_res <= 1e-14 * poly_scale(c, best)) break;
  }
  return best;
}

}  // namespace

std::vector<double> poly_roots(std::vector<double> coeffs) {
  std::vector<double> c = strip_trailing_zeros(std::move(coeffs));
  if (c.empty() || (c.size() == 1 && c[0] == 0.0))
    fail(ErrorKind::numeric, "roots of the zero polynomial are undefined");
  size_t deg = c.size() - 1;
  if (deg == 0) return {};
  if (deg == 1) {
    double r = -c[0] / c[1];
    return {r == 0.0 ? 0.0 : r};
  }
  if (deg == 2) {
    double a = c[2], b = c[1], k = c[0];
    double disc = b * b - 4 * a * k;
    if (disc < 0) return {};
    if (disc == 0) {
      double r = -b / (2 * a);
      return {r == 0.0 ? 0.0 : r};
    }
    double sq = std::sqrt(disc);
    double q = -(b + (b >= 0 ? sq : -sq)) / 2;
    double r1 = q / a;
    double r2 = (q != 0.0) ? k / q : -b / a - r1;
    if (r1 > r2) std::swap(r1, r2);
    return {r1 == 0.0 ? 0.0 : r1, r2 == 0.0 ? 0.0 : r2};
  }

  // Isolate via the critical points: between consecutive extrema the
  // polynomial is monotone, so a sign change brackets exactly one root.
  std::vector<double> dcoef = derivative(c);
  std::vector<double> crit;
  try {
    crit = poly_roots(dcoef);
  } catch (const SpeError&) {
    crit.clear();
  }
  double bound = 0.0;
  for (size_t i = 0; i < deg; ++i) bound = std::max(bound, std::fabs(c[i] / c[deg]));
  bound = bound + 1.0;
  for (double x : crit) bound = std::max(bound, std::fabs(x) + 1.0);

  std::vector<double> pts;
  pts.push_back(-bound);
  for (double x : crit)
    if (x > -bound && x < bound) pts.push_back(x);
  pts.push_back(bound);
  std::sort(pts.begin(), pts.end());

  std::vector<double> roots;
  for (size_t i = 0; i < pts.size(); ++i) {
    double fx = eval_poly(c, pts[i]);
    if (std::fabs(fx) <= 1e-10 * poly_scale(c, pts[i])) {
      roots.push_back(newton_polish(c, dcoef, pts[i]));
    } else if (i + 1 < pts.size()) {
      double fy = eval_poly(c, pts[i + 1]);
      if (std::fabs(fy) <= 1e-10 * poly_scale(c, pts[i + 1])) continue;
      if ((fx < 0) != (fy < 0))
        roots.push_back(newton_polish(c, dcoef, bisect_root(c, pts[i], pts[i + 1])));
    }
  }
  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double r : roots) {
    if (r == 0.0) r = 0.0;
    if (!out.empty() && std::fabs(r - out.back()) <= 1e-9 * std::max(1.0, std::fabs(r)))
      continue;
    out.push_back(r);
  }
  return out;
}

Outcomes finv(const TransformPtr& t, double r) {
  switch (t->kind) {
    case Transform::Kind::identity:
      return Outcomes::reals({r});
    case Transform::Kind::reciprocal:
      if (r == 0.0) return Outcomes::reals({-kInf, kInf});
      return Outcomes::reals({1.0 / r});
    case Transform::Kind::abs_value:
      if (r < 0.0) return Outcomes::empty();
      return Outcomes::reals({-r, r});
    case Transform::Kind::root:
      if (r < 0.0) return Outcomes::empty();
      return Outcomes::reals({std::pow(r, static_cast<double>(t->root_degree))});
    case Transform::Kind::exponential:
      if (r < 0.0) return Outcomes::empty();
      if (r == 0.0) return Outcomes::reals({-kInf});
      return Outcomes::reals({std::log(r) / std::log(t->base)});
    case Transform::Kind::logarithm:
      if (r == -kInf) return Outcomes::reals({0.0});
      return Outcomes::reals({std::pow(t->base, r)});
    case Transform::Kind::polynomial:
      return poly_solve(r, t->coeffs);
    case Transform::Kind::piecewise: {
      const std::string x = *vars(t).begin();
      std::vector<Outcomes> parts;
      for (const auto& [pt, pe] : t->pieces)
        parts.push_back(intersection_of(preimage(pt, Outcomes::reals({r})), eval_along(pe, x)));
      return union_of(parts);
    }
  }
  return Outcomes::empty();
}

namespace {

// The closure of the top-step range, used to clip targets before inversion.
// Splitting the reciprocal range at zero keeps each interval sign-pure.
Outcomes range_closure(const TransformPtr& t) {
  switch (t->kind) {
    case Transform::Kind::reciprocal:
      return union_of(Outcomes::interval(-kInf, true, 0, true),
                      Outcomes::interval(0, true, kInf, true));
    case Transform::Kind::abs_value:
    case Transform::Kind::root:
      return Outcomes::interval(0, false, kInf, true);
    case Transform::Kind::exponential:
      return Outcomes::interval(0, true, kInf, true);
    default:
      return Outcomes::all_reals();
  }
}

double single_inverse(const TransformPtr& t, double r, const char* what) {
  Outcomes v = finv(t, r);
  if (!v.is_reals() || v.as_reals().items.size() != 1)
    fail(ErrorKind::numeric, std::string(what) + ": endpoint inversion not unique");
  return v.as_reals().items[0];
}

Outcomes preimage_clipped(const TransformPtr& t, const Outcomes& w);

Outcomes preimage_interval(const TransformPtr& t, const Interval& iv) {
  switch (t->kind) {
    case Transform::Kind::root:
    case Transform::Kind::exponential:
    case Transform::Kind::logarithm: {
      double lo = single_inverse(t, iv.lo, "preimage");
      double hi = single_inverse(t, iv.hi, "preimage");
      return preimage(t->inner, Outcomes::interval(lo, iv.lo_open, hi, iv.hi_open));
    }
    case Transform::Kind::abs_value: {
      Outcomes pos = Outcomes::interval(iv.lo, iv.lo_open, iv.hi, iv.hi_open);
      Outcomes neg = Outcomes::interval(-iv.hi, iv.hi_open, -iv.lo, iv.lo_open);
      return preimage(t->inner, union_of(pos, neg));
    }
    case Transform::Kind::reciprocal: {
      // Targets are sign-pure after range clipping; the inverse flips the
      // interval orientation.
      double ilo, ihi;
      if (iv.lo >= 0.0) {
        ilo = iv.lo > 0.0 ? 1.0 / iv.lo : kInf;
        ihi = iv.hi < kInf ? 1.0 / iv.hi : 0.0;
      } else {
        ilo = iv.lo > -kInf ? 1.0 / iv.lo : 0.0;
        ihi = iv.hi < 0.0 ? 1.0 / iv.hi : -kInf;
      }
      return preimage(t->inner, Outcomes::interval(ihi, iv.hi_open, ilo, iv.lo_open));
    }
    case Transform::Kind::polynomial: {
      Outcomes below_lo = poly_lte(!iv.lo_open, iv.lo, t->coeffs);
      Outcomes below_hi = poly_lte(iv.hi_open, iv.hi, t->coeffs);
      return preimage(t->inner, intersection_of(below_hi, complement(below_lo)));
    }
    default:
      fail(ErrorKind::numeric, "preimage: unexpected transform kind");
  }
}

Outcomes preimage_clipped(const TransformPtr& t, const Outcomes& w) {
  if (w.is_empty()) return Outcomes::empty();
  if (w.is_union()) {
    std::vector<Outcomes> parts;
    for (const Outcomes& m : w.as_union().members) parts.push_back(preimage(t, m));
    return union_of(parts);
  }
  if (w.is_strings()) return Outcomes::empty();
  if (t->kind == Transform::Kind::piecewise) {
    const std::string x = *vars(t).begin();
    std::vector<Outcomes> parts;
    for (const auto& [pt, pe] : t->pieces)
      parts.push_back(intersection_of(preimage(pt, w), eval_along(pe, x)));
    return union_of(parts);
  }
  if (w.is_reals()) {
    std::vector<Outcomes> parts;
    for (double r : w.as_reals().items) parts.push_back(finv(t, r));
    return preimage(t->inner, union_of(parts));
  }
  return preimage_interval(t, w.as_interval());
}

}  // namespace

Outcomes preimage(const TransformPtr& t, const Outcomes& v) {
  if (t->kind == Transform::Kind::identity) return v;
  if (t->kind == Transform::Kind::piecewise) return preimage_clipped(t, v);
  return preimage_clipped(t, intersection_of(range_closure(t), v));
}

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

std::string to_string(const TransformPtr& t) {
  switch (t->kind) {
    case Transform::Kind::identity:
      return t->var;
    case Transform::Kind::reciprocal:
      return "1/(" + to_string(t->inner) + ")";
    case Transform::Kind::abs_value:
      return "abs(" + to_string(t->inner) + ")";
    case Transform::Kind::root:
      return "root(" + to_string(t->inner) + ", " + std::to_string(t->root_degree) + ")";
    case Transform::Kind::exponential:
      return "exp[" + fmt(t->base) + "](" + to_string(t->inner) + ")";
    case Transform::Kind::logarithm:
      return "log[" + fmt(t->base) + "](" + to_string(t->inner) + ")";
    case Transform::Kind::polynomial: {
      std::string out = "poly(" + to_string(t->inner) + ";";
      for (double c : t->coeffs) out += " " + fmt(c);
      return out + ")";
    }
    case Transform::Kind::piecewise: {
      std::string out = "piecewise(";
      for (size_t i = 0; i < t->pieces.size(); ++i) {
        if (i) out += "; ";
        out += to_string(t->pieces[i].first) + " if " + to_string(t->pieces[i].second);
      }
      return out + ")";
    }
  }
  return "?";
}

}  // namespace spe
