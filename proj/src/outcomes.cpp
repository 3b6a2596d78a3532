#include "spe/outcomes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "spe/errors.hpp"

namespace spe {

namespace {

double norm_zero(double x) { return x == 0.0 ? 0.0 : x; }

void check_finite_or_inf(double x) {
  if (std::isnan(x)) fail(ErrorKind::numeric, "NaN is not a valid outcome bound");
}

std::vector<std::string> sorted_unique(std::vector<std::string> xs) {
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

std::vector<double> sorted_unique(std::vector<double> xs) {
  for (double& x : xs) {
    check_finite_or_inf(x);
    x = norm_zero(x);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

bool interval_contains(const Interval& iv, double r) {
  if (!std::isfinite(r)) return false;
  bool lo_ok = iv.lo_open ? iv.lo < r : iv.lo <= r;
  bool hi_ok = iv.hi_open ? r < iv.hi : r <= iv.hi;
  return lo_ok && hi_ok;
}

// String set algebra. Sets are (items, complemented).
StrSet str_union(const StrSet& a, const StrSet& b) {
  std::set<std::string> sa(a.items.begin(), a.items.end());
  std::set<std::string> sb(b.items.begin(), b.items.end());
  StrSet out;
  if (!a.complemented && !b.complemented) {
    sa.insert(sb.begin(), sb.end());
    out.items.assign(sa.begin(), sa.end());
    out.complemented = false;
  } else if (a.complemented && b.complemented) {
    for (const auto& s : sa)
      if (sb.count(s)) out.items.push_back(s);
    out.complemented = true;
  } else {
    const auto& comp = a.complemented ? sa : sb;
    const auto& plain = a.complemented ? sb : sa;
    for (const auto& s : comp)
      if (!plain.count(s)) out.items.push_back(s);
    out.complemented = true;
  }
  return out;
}

StrSet str_intersection(const StrSet& a, const StrSet& b) {
  std::set<std::string> sa(a.items.begin(), a.items.end());
  std::set<std::string> sb(b.items.begin(), b.items.end());
  StrSet out;
  if (!a.complemented && !b.complemented) {
    for (const auto& s : sa)
      if (sb.count(s)) out.items.push_back(s);
    out.complemented = false;
  } else if (a.complemented && b.complemented) {
    sa.insert(sb.begin(), sb.end());
    out.items.assign(sa.begin(), sa.end());
    out.complemented = true;
  } else {
    const auto& comp = a.complemented ? sa : sb;
    const auto& plain = a.complemented ? sb : sa;
    for (const auto& s : plain)
      if (!comp.count(s)) out.items.push_back(s);
    out.complemented = false;
  }
  return out;
}

struct RealParts {
  std::vector<double> points;
  std::vector<Interval> intervals;
};

// Merge intervals and points into a canonical disjoint cover. Points that
// touch an open endpoint close it; adjacent/overlapping intervals merge.
RealParts merge_reals(std::vector<Interval> ivs, std::vector<double> pts) {
  // Points become degenerate [p,p] spans during the sweep; sentinels at
  // +-inf never merge into anything and are re-emitted as points.
  struct Span {
    double lo, hi;
    bool lo_open, hi_open;
  };
  std::vector<Span> spans;
  for (const Interval& iv : ivs) spans.push_back({iv.lo, iv.hi, iv.lo_open, iv.hi_open});
  for (double p : sorted_unique(std::move(pts))) spans.push_back({p, p, false, false});
  std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) {
    if (a.lo != b.lo) return a.lo < b.lo;
    if (a.lo_open != b.lo_open) return !a.lo_open;
    return a.hi < b.hi;
  });
  std::vector<Span> merged;
  for (const Span& s : spans) {
    if (!merged.empty()) {
      Span& cur = merged.back();
      bool touches = s.lo < cur.hi || (s.lo == cur.hi && (!s.lo_open || !cur.hi_open));
      if (touches) {
        if (s.hi > cur.hi) {
          cur.hi = s.hi;
          cur.hi_open = s.hi_open;
        } else if (s.hi == cur.hi && !s.hi_open) {
          cur.hi_open = false;
        }
        if (s.lo == cur.lo && !s.lo_open) cur.lo_open = false;
        continue;
      }
    }
    merged.push_back(s);
  }
  RealParts out;
  for (const Span& s : merged) {
    if (s.lo == s.hi) {
      out.points.push_back(s.lo);
    } else {
      out.intervals.push_back({s.lo, s.hi, s.lo_open, s.hi_open});
    }
  }
  return out;
}

void collect_parts(const Outcomes& v, StrSet* strset, bool* has_str,
                   std::vector<double>* pts, std::vector<Interval>* ivs) {
  if (v.is_empty()) return;
  if (v.is_strings()) {
    *strset = *has_str ? str_union(*strset, v.as_strings()) : v.as_strings();
    *has_str = true;
  } else if (v.is_reals()) {
    const auto& xs = v.as_reals().items;
    pts->insert(pts->end(), xs.begin(), xs.end());
  } else if (v.is_interval()) {
    ivs->push_back(v.as_interval());
  } else {
    for (const Outcomes& m : v.as_union().members)
      collect_parts(m, strset, has_str, pts, ivs);
  }
}

Outcomes intersect_primitive(const Outcomes& a, const Outcomes& b);

}  // namespace

Outcomes assemble_parts(std::vector<Outcomes> parts);

Outcomes Outcomes::strings(std::vector<std::string> items, bool complemented) {
  auto xs = sorted_unique(std::move(items));
  if (xs.empty() && !complemented) return empty();
  Outcomes v;
  v.repr_ = StrSet{std::move(xs), complemented};
  return v;
}

Outcomes Outcomes::reals(std::vector<double> items) {
  auto xs = sorted_unique(std::move(items));
  if (xs.empty()) return empty();
  Outcomes v;
  v.repr_ = RealSet{std::move(xs)};
  return v;
}

Outcomes Outcomes::interval(double lo, bool lo_open, double hi, bool hi_open) {
  check_finite_or_inf(lo);
  check_finite_or_inf(hi);
  lo = norm_zero(lo);
  hi = norm_zero(hi);
  if (lo > hi) return empty();
  if (lo == hi) {
    if (lo_open || hi_open || !std::isfinite(lo)) return empty();
    return point(lo);
  }
  if (std::isinf(lo)) lo_open = true;
  if (std::isinf(hi)) hi_open = true;
  Outcomes v;
  v.repr_ = Interval{lo, hi, lo_open, hi_open};
  return v;
}

Outcomes Outcomes::full_space() {
  return union_of(all_strings(), all_reals());
}

bool Outcomes::operator==(const Outcomes& other) const {
  if (repr_.index() != other.repr_.index()) return false;
  if (is_empty()) return true;
  if (is_strings()) {
    const auto& a = as_strings();
    const auto& b = other.as_strings();
    return a.complemented == b.complemented && a.items == b.items;
  }
  if (is_reals()) return as_reals().items == other.as_reals().items;
  if (is_interval()) {
    const auto& a = as_interval();
    const auto& b = other.as_interval();
    return a.lo == b.lo && a.hi == b.hi && a.lo_open == b.lo_open &&
           a.hi_open == b.hi_open;
  }
  const auto& a = as_union().members;
  const auto& b = other.as_union().members;
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!(a[i] == b[i])) return false;
  return true;
}

// Build the canonical form from disjoint parts: string set first, then the
// leftover points, then intervals in ascending order.
Outcomes assemble_parts(std::vector<Outcomes> parts) {
  std::erase_if(parts, [](const Outcomes& p) { return p.is_empty(); });
  if (parts.empty()) return Outcomes::empty();
  if (parts.size() == 1) return parts[0];
  Outcomes v;
  v.repr_ = UnionSet{std::move(parts)};
  return v;
}

Outcomes union_of(std::span<const Outcomes> vs) {
  StrSet strset;
  bool has_str = false;
  std::vector<double> pts;
  std::vector<Interval> ivs;
  for (const Outcomes& v : vs) collect_parts(v, &strset, &has_str, &pts, &ivs);

  std::vector<Outcomes> parts;
  if (has_str) parts.push_back(Outcomes::strings(strset.items, strset.complemented));
  RealParts rp = merge_reals(std::move(ivs), std::move(pts));
  if (!rp.points.empty()) parts.push_back(Outcomes::reals(rp.points));
  for (const Interval& iv : rp.intervals)
    parts.push_back(Outcomes::interval(iv.lo, iv.lo_open, iv.hi, iv.hi_open));
  return assemble_parts(std::move(parts));
}

Outcomes union_of(const Outcomes& a, const Outcomes& b) {
  Outcomes items[2] = {a, b};
  return union_of(std::span<const Outcomes>(items, 2));
}

namespace {

Outcomes intersect_intervals(const Interval& a, const Interval& b) {
  double lo;
  bool lo_open;
  if (a.lo > b.lo || (a.lo == b.lo && a.lo_open)) {
    lo = a.lo;
    lo_open = a.lo_open;
  } else {
    lo = b.lo;
    lo_open = b.lo_open;
  }
  double hi;
  bool hi_open;
  if (a.hi < b.hi || (a.hi == b.hi && a.hi_open)) {
    hi = a.hi;
    hi_open = a.hi_open;
  } else {
    hi = b.hi;
    hi_open = b.hi_open;
  }
  if (lo > hi) return Outcomes::empty();
  if (lo == hi) {
    if (lo_open || hi_open || !std::isfinite(lo)) return Outcomes::empty();
    return Outcomes::point(lo);
  }
  return Outcomes::interval(lo, lo_open, hi, hi_open);
}

Outcomes intersect_primitive(const Outcomes& a, const Outcomes& b) {
  if (a.is_empty() || b.is_empty()) return Outcomes::empty();
  if (a.is_union()) {
    std::vector<Outcomes> parts;
    for (const Outcomes& m : a.as_union().members)
      parts.push_back(intersect_primitive(m, b));
    return union_of(parts);
  }
  if (b.is_union()) return intersect_primitive(b, a);

  if (a.is_strings() && b.is_strings()) {
    StrSet s = str_intersection(a.as_strings(), b.as_strings());
    return Outcomes::strings(s.items, s.complemented);
  }
  if (a.is_strings() || b.is_strings()) return Outcomes::empty();

  if (a.is_reals() && b.is_reals()) {
    std::vector<double> out;
    std::set_intersection(a.as_reals().items.begin(), a.as_reals().items.end(),
                          b.as_reals().items.begin(), b.as_reals().items.end(),
                          std::back_inserter(out));
    return Outcomes::reals(out);
  }
  if (a.is_reals() || b.is_reals()) {
    const auto& pts = (a.is_reals() ? a : b).as_reals().items;
    const auto& iv = (a.is_reals() ? b : a).as_interval();
    std::vector<double> out;
    for (double p : pts)
      if (interval_contains(iv, p)) out.push_back(p);
    return Outcomes::reals(out);
  }
  return intersect_intervals(a.as_interval(), b.as_interval());
}

}  // namespace

Outcomes intersection_of(const Outcomes& a, const Outcomes& b) {
  return intersect_primitive(a, b);
}

Outcomes intersection_of(std::span<const Outcomes> vs) {
  if (vs.empty()) return Outcomes::full_space();
  Outcomes acc = vs[0];
  for (size_t i = 1; i < vs.size(); ++i) acc = intersect_primitive(acc, vs[i]);
  return acc;
}

Outcomes complement(const Outcomes& v) {
  if (v.is_empty()) return Outcomes::full_space();
  if (v.is_strings()) {
    const auto& s = v.as_strings();
    return Outcomes::strings(s.items, !s.complemented);
  }
  if (v.is_reals()) {
    std::vector<Outcomes> parts;
    const auto& xs = v.as_reals().items;
    double prev = -kInf;
    for (double x : xs) {
      parts.push_back(Outcomes::interval(prev, true, x, true));
      prev = x;
    }
    parts.push_back(Outcomes::interval(prev, true, kInf, true));
    return union_of(parts);
  }
  if (v.is_interval()) {
    const auto& iv = v.as_interval();
    std::vector<Outcomes> parts;
    parts.push_back(Outcomes::interval(-kInf, true, iv.lo, !iv.lo_open));
    parts.push_back(Outcomes::interval(iv.hi, !iv.hi_open, kInf, true));
    return union_of(parts);
  }
  // Union: complement each sort within its own component. The real members
  // complement to real-only sets whose intersection is the real complement;
  // a string member (at most one, first) complements to strings.
  const auto& members = v.as_union().members;
  Outcomes real_part = Outcomes::all_reals();
  Outcomes str_part = Outcomes::empty();
  bool has_strings = false;
  for (const Outcomes& m : members) {
    if (m.is_strings()) {
      has_strings = true;
      str_part = complement(m);
    } else {
      real_part = intersection_of(real_part, complement(m));
    }
  }
  if (!has_strings) return real_part;
  return union_of(str_part, real_part);
}

bool contains(const Outcomes& v, const Outcome& o) {
  if (o.is_real()) return contains_real(v, o.real());
  const std::string& s = o.str();
  if (v.is_strings()) {
    const auto& ss = v.as_strings();
    bool listed = std::binary_search(ss.items.begin(), ss.items.end(), s);
    return ss.complemented ? !listed : listed;
  }
  if (v.is_union()) {
    for (const Outcomes& m : v.as_union().members)
      if (contains(m, o)) return true;
  }
  return false;
}

bool contains_real(const Outcomes& v, double r) {
  if (v.is_reals())
    return std::binary_search(v.as_reals().items.begin(), v.as_reals().items.end(), r);
  if (v.is_interval()) return interval_contains(v.as_interval(), r);
  if (v.is_union()) {
    for (const Outcomes& m : v.as_union().members)
      if (contains_real(m, r)) return true;
  }
  return false;
}

namespace {

std::string fmt_real(double x) {
  if (x == kInf) return "inf";
  if (x == -kInf) return "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

std::string to_string(const Outcomes& v) {
  if (v.is_empty()) return "{}";
  if (v.is_strings()) {
    const auto& s = v.as_strings();
    std::string out = s.complemented ? "!{" : "{";
    for (size_t i = 0; i < s.items.size(); ++i) {
      if (i) out += ", ";
      out += "'" + s.items[i] + "'";
    }
    return out + "}";
  }
  if (v.is_reals()) {
    std::string out = "{";
    const auto& xs = v.as_reals().items;
    for (size_t i = 0; i < xs.size(); ++i) {
      if (i) out += ", ";
      out += fmt_real(xs[i]);
    }
    return out + "}";
  }
  if (v.is_interval()) {
    const auto& iv = v.as_interval();
    std::string out = iv.lo_open ? "(" : "[";
    out += fmt_real(iv.lo) + ", " + fmt_real(iv.hi);
    out += iv.hi_open ? ")" : "]";
    return out;
  }
  std::string out;
  const auto& ms = v.as_union().members;
  for (size_t i = 0; i < ms.size(); ++i) {
    if (i) out += " u ";
    out += to_string(ms[i]);
  }
  return out;
}

}  // namespace spe
