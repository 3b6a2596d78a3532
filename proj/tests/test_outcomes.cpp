#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <random>

#include "spe/outcomes.hpp"
#include "testutil.hpp"

using namespace spe;

TEST_CASE("contains on primitive sets") {
  CHECK_FALSE(contains(Outcomes::strings({"a"}, true), Outcome("a")));
  CHECK(contains(Outcomes::strings({"a"}, true), Outcome("b")));
  CHECK(contains(Outcomes::strings({"a", "b"}), Outcome("a")));

  Outcomes iv = Outcomes::interval(0, false, 10, true);
  CHECK(contains(iv, Outcome(0.0)));
  CHECK_FALSE(contains(iv, Outcome(10.0)));
  CHECK(contains(iv, Outcome(9.999)));

  Outcomes u = union_of(Outcomes::reals({4}), Outcomes::interval(8, true, 10, true));
  CHECK(contains(u, Outcome(9.5)));
  CHECK(contains(u, Outcome(4.0)));
  CHECK_FALSE(contains(u, Outcome(8.0)));
  CHECK_FALSE(contains(u, Outcome("x")));
}

TEST_CASE("union canonicalization") {
  Outcomes a = union_of(Outcomes::reals({1, 2}), Outcomes::reals({2, 3}));
  CHECK(a == Outcomes::reals({1, 2, 3}));

  // adjacent intervals merge across a shared closed endpoint
  Outcomes b = union_of(Outcomes::interval(0, false, 1, true),
                        Outcomes::interval(1, false, 2, false));
  CHECK(b == Outcomes::interval(0, false, 2, false));
  for (double p : {-0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5}) {
    bool expected = (0 <= p && p < 1) || (1 <= p && p <= 2);
    CHECK(contains_real(b, p) == expected);
  }

  Outcomes c = union_of(Outcomes::empty(), Outcomes::interval(0, true, 1, true));
  CHECK(c == Outcomes::interval(0, true, 1, true));

  // a point plugging an open endpoint closes the interval
  Outcomes d = union_of(Outcomes::interval(0, false, 1, true), Outcomes::reals({1}));
  CHECK(d == Outcomes::interval(0, false, 1, false));

  // both-open abutting intervals stay separate
  Outcomes e = union_of(Outcomes::interval(0, true, 1, true),
                        Outcomes::interval(1, true, 2, true));
  CHECK(e.is_union());
  CHECK_FALSE(contains_real(e, 1.0));

  // single-member canonical idempotence
  Outcomes f = Outcomes::interval(3, true, 7, false);
  std::vector<Outcomes> one = {f};
  CHECK(union_of(one) == f);
}

TEST_CASE("intersection cases") {
  Outcomes a = intersection_of(Outcomes::interval(0, false, 10, false), Outcomes::reals({4, 12}));
  CHECK(a == Outcomes::reals({4}));

  Outcomes b = intersection_of(Outcomes::strings({"x", "y"}), Outcomes::strings({"y"}, true));
  CHECK(b == Outcomes::strings({"x"}));

  Outcomes c = intersection_of(Outcomes::interval(0, false, 4, true), Outcomes::strings({"x"}));
  CHECK(c.is_empty());

  Outcomes d = intersection_of(Outcomes::interval(0, false, 5, false),
                               Outcomes::interval(5, false, 9, false));
  CHECK(d == Outcomes::reals({5}));

  Outcomes e = intersection_of(Outcomes::interval(0, false, 5, true),
                               Outcomes::interval(5, false, 9, false));
  CHECK(e.is_empty());
}

TEST_CASE("complement follows the case table") {
  Outcomes a = complement(Outcomes::interval(0, false, 1, true));
  REQUIRE(a.is_union());
  CHECK(a.as_union().members.size() == 2);
  CHECK(a.as_union().members[0] == Outcomes::interval(-kInf, true, 0, true));
  CHECK(a.as_union().members[1] == Outcomes::interval(1, false, kInf, true));

  Outcomes b = complement(Outcomes::strings({"a"}));
  CHECK(b == Outcomes::strings({"a"}, true));

  Outcomes c = complement(Outcomes::empty());
  REQUIRE(c.is_union());
  CHECK(contains(c, Outcome("anything")));
  CHECK(contains(c, Outcome(123.0)));

  // complement of a finite real set: open gaps between the points
  Outcomes d = complement(Outcomes::reals({1, 2}));
  CHECK_FALSE(contains_real(d, 1));
  CHECK_FALSE(contains_real(d, 2));
  CHECK(contains_real(d, 1.5));
  CHECK(contains_real(d, -5));
  CHECK(contains_real(d, 5));
  CHECK_FALSE(contains(d, Outcome("s")));

  // involution on the real component
  Outcomes dd = complement(d);
  CHECK(testutil::same_real_membership(dd, Outcomes::reals({1, 2})));
}

namespace {

Outcomes random_outcomes(std::mt19937_64& rng, int depth = 0) {
  std::uniform_int_distribution<int> pick(0, depth == 0 ? 4 : 3);
  std::uniform_real_distribution<double> real(-10, 10);
  switch (pick(rng)) {
    case 0:
      return Outcomes::empty();
    case 1: {
      std::vector<double> pts;
      for (int i = 0; i < 3; ++i) pts.push_back(std::round(real(rng) * 2) / 2);
      return Outcomes::reals(pts);
    }
    case 2: {
      std::vector<std::string> items;
      const char* names[] = {"a", "b", "c", "d"};
      for (int i = 0; i < 2; ++i) items.push_back(names[rng() % 4]);
      return Outcomes::strings(items, rng() % 2 == 0);
    }
    case 3: {
      double lo = std::round(real(rng) * 2) / 2;
      double hi = lo + std::uniform_real_distribution<double>(0.5, 8)(rng);
      if (rng() % 4 == 0) lo = -kInf;
      if (rng() % 4 == 0) hi = kInf;
      return Outcomes::interval(lo, rng() % 2 == 0, std::round(hi * 2) / 2, rng() % 2 == 0);
    }
    default:
      return union_of(random_outcomes(rng, depth + 1), random_outcomes(rng, depth + 1));
  }
}

std::vector<Outcome> probes_for(const Outcomes& a, const Outcomes& b) {
  std::vector<Outcome> probes;
  for (double p : spe::testutil::probe_points(a, spe::testutil::probe_points(b)))
    probes.push_back(Outcome(p));
  for (const char* s : {"a", "b", "c", "d", "zz"}) probes.push_back(Outcome(s));
  return probes;
}

void check_disjoint_members(const Outcomes& v) {
  if (!v.is_union()) return;
  const auto& ms = v.as_union().members;
  for (size_t i = 0; i < ms.size(); ++i) {
    CHECK_FALSE(ms[i].is_empty());
    CHECK_FALSE(ms[i].is_union());
    for (size_t j = i + 1; j < ms.size(); ++j) {
      CAPTURE(to_string(v));
      CHECK(intersection_of(ms[i], ms[j]).is_empty());
    }
  }
}

}  // namespace

TEST_CASE("membership homomorphism on randomized sets") {
  auto rng = testutil::make_rng(1234);
  for (int iter = 0; iter < 300; ++iter) {
    Outcomes a = random_outcomes(rng);
    Outcomes b = random_outcomes(rng);
    Outcomes u = union_of(a, b);
    Outcomes n = intersection_of(a, b);
    Outcomes ca = complement(a);
    check_disjoint_members(u);
    check_disjoint_members(n);
    check_disjoint_members(ca);
    // Complement is sort-local (the complement of a real set carries no
    // strings and vice versa), so the negation law is checked per sort.
    auto has_sort = [](const Outcomes& v, bool strings) {
      if (v.is_empty()) return true;
      if (v.is_strings()) return strings;
      if (v.is_reals() || v.is_interval()) return !strings;
      for (const Outcomes& m : v.as_union().members) {
        if (m.is_strings() == strings) return true;
      }
      return false;
    };
    bool a_strings = has_sort(a, true);
    bool a_reals = has_sort(a, false);
    for (const Outcome& o : probes_for(a, b)) {
      CAPTURE(to_string(a));
      CAPTURE(to_string(b));
      bool in_a = contains(a, o);
      bool in_b = contains(b, o);
      CHECK(contains(u, o) == (in_a || in_b));
      CHECK(contains(n, o) == (in_a && in_b));
      if (o.is_real() ? a_reals : a_strings) CHECK(contains(ca, o) == !in_a);
    }
  }
}
