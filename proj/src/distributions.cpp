#include "spe/distributions.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/poisson.hpp>

#include "spe/errors.hpp"

namespace spe {

namespace {

class NormalCdf : public Cdf {
 public:
  NormalCdf(double mean, double sd) : dist_(mean, sd) {
    if (!(sd > 0)) fail(ErrorKind::domain, "normal needs a positive scale");
  }
  double cdf(double r) const override {
    if (r == kInf) return 1.0;
    if (r == -kInf) return 0.0;
    return boost::math::cdf(dist_, r);
  }
  double quantile(double u) const override {
    if (u <= 0) return -kInf;
    if (u >= 1) return kInf;
    return boost::math::quantile(dist_, u);
  }
  double density(double r) const override {
    return std::isfinite(r) ? boost::math::pdf(dist_, r) : 0.0;
  }
  std::string family() const override { return "normal"; }
  std::vector<double> params() const override { return {dist_.mean(), dist_.standard_deviation()}; }
  std::pair<double, double> support() const override { return {-kInf, kInf}; }

 private:
  boost::math::normal_distribution<double> dist_;
};

class UniformCdf : public Cdf {
 public:
  UniformCdf(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo < hi)) fail(ErrorKind::domain, "uniform needs lo < hi");
  }
  double cdf(double r) const override {
    if (r <= lo_) return 0.0;
    if (r >= hi_) return 1.0;
    return (r - lo_) / (hi_ - lo_);
  }
  double quantile(double u) const override {
    if (u <= 0) return lo_;
    if (u >= 1) return hi_;
    return lo_ + u * (hi_ - lo_);
  }
  double density(double r) const override {
    return (lo_ <= r && r <= hi_) ? 1.0 / (hi_ - lo_) : 0.0;
  }
  std::string family() const override { return "uniform"; }
  std::vector<double> params() const override { return {lo_, hi_}; }
  std::pair<double, double> support() const override { return {lo_, hi_}; }

 private:
  double lo_, hi_;
};

class GammaCdf : public Cdf {
 public:
  GammaCdf(double shape, double scale) : dist_(shape, scale) {
    if (!(shape > 0) || !(scale > 0)) fail(ErrorKind::domain, "gamma needs positive parameters");
  }
  double cdf(double r) const override {
    if (r <= 0) return 0.0;
    if (r == kInf) return 1.0;
    return boost::math::cdf(dist_, r);
  }
  double quantile(double u) const override {
    if (u <= 0) return 0.0;
    if (u >= 1) return kInf;
    return boost::math::quantile(dist_, u);
  }
  double density(double r) const override {
    return (std::isfinite(r) && r > 0) ? boost::math::pdf(dist_, r)
           : r == 0                    ? boost::math::pdf(dist_, 0.0)
                                       : 0.0;
  }
  std::string family() const override { return "gamma"; }
  std::vector<double> params() const override { return {dist_.shape(), dist_.scale()}; }
  std::pair<double, double> support() const override { return {0.0, kInf}; }

 private:
  boost::math::gamma_distribution<double> dist_;
};

class BetaCdf : public Cdf {
 public:
  BetaCdf(double a, double b) : dist_(a, b) {
    if (!(a > 0) || !(b > 0)) fail(ErrorKind::domain, "beta needs positive parameters");
  }
  double cdf(double r) const override {
    if (r <= 0) return 0.0;
    if (r >= 1) return 1.0;
    return boost::math::cdf(dist_, r);
  }
  double quantile(double u) const override {
    if (u <= 0) return 0.0;
    if (u >= 1) return 1.0;
    return boost::math::quantile(dist_, u);
  }
  double density(double r) const override {
    return (0 < r && r < 1) ? boost::math::pdf(dist_, r) : 0.0;
  }
  std::string family() const override { return "beta"; }
  std::vector<double> params() const override { return {dist_.alpha(), dist_.beta()}; }
  std::pair<double, double> support() const override { return {0.0, 1.0}; }

 private:
  boost::math::beta_distribution<double> dist_;
};

// Shared helpers for integer-grid families.
class IntegerGridCdf : public Cdf {
 public:
  bool discrete() const override { return true; }
  double floor_atom(double r) const override {
    if (r == kInf) return kInf;
    return std::floor(r);
  }
  double prev_atom(double r) const override {
    if (r == kInf) return kInf;
    double f = std::floor(r);
    return (r == f) ? f - 1 : f;
  }
  double ceil_atom(double r) const override {
    if (r == -kInf) return -kInf;
    return std::ceil(r);
  }
  double next_atom(double r) const override {
    if (r == -kInf) return -kInf;
    double c = std::ceil(r);
    return (r == c) ? c + 1 : c;
  }
};

class PoissonCdf : public IntegerGridCdf {
 public:
  explicit PoissonCdf(double mean) : dist_(mean) {
    if (!(mean > 0)) fail(ErrorKind::domain, "poisson needs a positive mean");
  }
  double cdf(double r) const override {
    if (r < 0) return 0.0;
    if (r == kInf) return 1.0;
    return boost::math::cdf(dist_, std::floor(r));
  }
  double quantile(double u) const override {
    if (u <= 0) return 0.0;
    if (u >= 1) return kInf;
    double hi = std::max(1.0, std::ceil(dist_.mean()));
    while (cdf(hi) < u) hi = hi * 2 + 1;
    double lo = -1;
    while (hi - lo > 1) {
      double mid = std::floor(lo + (hi - lo) / 2);
      (cdf(mid) >= u ? hi : lo) = mid;
    }
    return hi;
  }
  double mass(double r) const override {
    if (!std::isfinite(r) || r < 0 || r != std::floor(r)) return 0.0;
    return boost::math::pdf(dist_, r);
  }
  std::string family() const override { return "poisson"; }
  std::vector<double> params() const override { return {dist_.mean()}; }
  std::pair<double, double> support() const override { return {0.0, kInf}; }

 private:
  boost::math::poisson_distribution<double> dist_;
};

class BinomialCdf : public IntegerGridCdf {
 public:
  BinomialCdf(int trials, double p) : dist_(trials, p), n_(trials) {
    if (trials < 1 || !(p >= 0) || !(p <= 1))
      fail(ErrorKind::domain, "binomial needs trials >= 1 and p in [0,1]");
  }
  double cdf(double r) const override {
    if (r < 0) return 0.0;
    if (r >= n_) return 1.0;
    return boost::math::cdf(dist_, std::floor(r));
  }
  double quantile(double u) const override {
    if (u <= 0) return 0.0;
    double lo = -1, hi = n_;
    while (hi - lo > 1) {
      double mid = std::floor(lo + (hi - lo) / 2);
      (cdf(mid) >= u ? hi : lo) = mid;
    }
    return hi;
  }
  double mass(double r) const override {
    if (!std::isfinite(r) || r < 0 || r > n_ || r != std::floor(r)) return 0.0;
    return boost::math::pdf(dist_, r);
  }
  std::string family() const override { return "binomial"; }
  std::vector<double> params() const override {
    return {static_cast<double>(n_), dist_.success_fraction()};
  }
  std::pair<double, double> support() const override { return {0.0, static_cast<double>(n_)}; }

 private:
  boost::math::binomial_distribution<double> dist_;
  int n_;
};

// Unit step at a single (not necessarily integer) location. Also serves as
// the delta CDF produced when conditioning a continuous leaf on an equality.
class AtomicCdf : public Cdf {
 public:
  explicit AtomicCdf(double loc) : loc_(loc) {
    if (!std::isfinite(loc)) fail(ErrorKind::domain, "atom location must be finite");
  }
  double cdf(double r) const override { return r >= loc_ ? 1.0 : 0.0; }
  double quantile(double u) const override { return loc_; }
  bool discrete() const override { return true; }
  double mass(double r) const override { return r == loc_ ? 1.0 : 0.0; }
  double floor_atom(double r) const override { return r >= loc_ ? loc_ : loc_ - 1; }
  double prev_atom(double r) const override { return r > loc_ ? loc_ : loc_ - 1; }
  double ceil_atom(double r) const override { return r <= loc_ ? loc_ : loc_ + 1; }
  double next_atom(double r) const override { return r < loc_ ? loc_ : loc_ + 1; }
  std::string family() const override { return "atomic"; }
  std::vector<double> params() const override { return {loc_}; }
  std::pair<double, double> support() const override { return {loc_, loc_}; }

 private:
  double loc_;
};

}  // namespace

CdfPtr normal_cdf(double mean, double sd) { return std::make_shared<NormalCdf>(mean, sd); }
CdfPtr uniform_cdf(double lo, double hi) { return std::make_shared<UniformCdf>(lo, hi); }
CdfPtr gamma_cdf(double shape, double scale) { return std::make_shared<GammaCdf>(shape, scale); }
CdfPtr beta_cdf(double a, double b) { return std::make_shared<BetaCdf>(a, b); }
CdfPtr poisson_cdf(double mean) { return std::make_shared<PoissonCdf>(mean); }
CdfPtr binomial_cdf(int trials, double p) { return std::make_shared<BinomialCdf>(trials, p); }
CdfPtr atomic_cdf(double loc) { return std::make_shared<AtomicCdf>(loc); }

CdfPtr make_cdf(const std::string& family, const std::vector<double>& params) {
  auto need = [&](size_t n) {
    if (params.size() != n)
      fail(ErrorKind::domain, family + " expects " + std::to_string(n) + " parameters");
  };
  if (family == "normal") {
    need(2);
    return normal_cdf(params[0], params[1]);
  }
  if (family == "uniform") {
    need(2);
    return uniform_cdf(params[0], params[1]);
  }
  if (family == "gamma") {
    need(2);
    return gamma_cdf(params[0], params[1]);
  }
  if (family == "beta") {
    need(2);
    return beta_cdf(params[0], params[1]);
  }
  if (family == "poisson") {
    need(1);
    return poisson_cdf(params[0]);
  }
  if (family == "binomial") {
    need(2);
    return binomial_cdf(static_cast<int>(params[0]), params[1]);
  }
  if (family == "atomic") {
    need(1);
    return atomic_cdf(params[0]);
  }
  fail(ErrorKind::domain, "unknown distribution family '" + family + "'");
}

DistReal make_dist_real(CdfPtr F, double lo, double hi) {
  if (!(F->cdf(hi) - F->cdf(lo) > 0))
    fail(ErrorKind::domain, "truncation interval has zero probability");
  return DistReal{std::move(F), lo, hi};
}

double dist_int_norm(const DistInt& d) {
  return d.F->cdf(d.F->floor_atom(d.hi)) - d.F->cdf(d.F->prev_atom(d.lo));
}

DistInt make_dist_int(CdfPtr F, double lo, double hi) {
  DistInt d{std::move(F), lo, hi};
  if (!(dist_int_norm(d) > 0))
    fail(ErrorKind::domain, "truncation contains no atoms with positive mass");
  return d;
}

DistStr make_dist_str(std::vector<std::pair<std::string, double>> atoms) {
  double total = 0.0;
  for (auto& [s, w] : atoms) {
    if (w < 0) fail(ErrorKind::domain, "nominal weights must be nonnegative");
    total += w;
  }
  if (!(total > 0)) fail(ErrorKind::domain, "nominal weights must have a positive total");
  std::vector<std::pair<std::string, double>> kept;
  for (auto& [s, w] : atoms)
    if (w > 0) kept.emplace_back(s, w / total);
  return DistStr{std::move(kept)};
}

namespace {

double prob_real(const DistReal& d, const Outcomes& v) {
  Outcomes w = intersection_of(Outcomes::interval(d.lo, false, d.hi, false), v);
  if (w.is_empty() || w.is_reals() || w.is_strings()) return 0.0;
  if (w.is_union()) {
    double total = 0.0;
    for (const Outcomes& m : w.as_union().members) total += prob_real(d, m);
    return total;
  }
  const auto& iv = w.as_interval();
  double z = d.F->cdf(d.hi) - d.F->cdf(d.lo);
  return std::max(0.0, (d.F->cdf(iv.hi) - d.F->cdf(iv.lo)) / z);
}

double prob_int(const DistInt& d, const Outcomes& v) {
  Outcomes w = intersection_of(Outcomes::interval(d.lo, false, d.hi, false), v);
  if (w.is_empty() || w.is_strings()) return 0.0;
  if (w.is_union()) {
    double total = 0.0;
    for (const Outcomes& m : w.as_union().members) total += prob_int(d, m);
    return total;
  }
  double z = dist_int_norm(d);
  if (w.is_reals()) {
    double total = 0.0;
    for (double r : w.as_reals().items) {
      if (std::isfinite(r) && d.lo <= r && r <= d.hi) total += d.F->mass(r);
    }
    return total / z;
  }
  const auto& iv = w.as_interval();
  // Count atoms a with iv.lo <(=) a <(=) iv.hi as a difference of CDF values
  // at the nearest enclosed atoms.
  double hi_at = iv.hi_open ? d.F->prev_atom(iv.hi) : d.F->floor_atom(iv.hi);
  double lo_at = iv.lo_open ? d.F->floor_atom(iv.lo) : d.F->prev_atom(iv.lo);
  return std::max(0.0, (d.F->cdf(hi_at) - d.F->cdf(lo_at)) / z);
}

double prob_str(const DistStr& d, const Outcomes& v) {
  std::vector<std::string> support;
  for (const auto& [s, w] : d.atoms) support.push_back(s);
  Outcomes w = intersection_of(v, Outcomes::strings(support, false));
  if (!w.is_strings()) return 0.0;
  const auto& ss = w.as_strings();
  double total = 0.0;
  for (const auto& [s, wt] : d.atoms) {
    bool listed = std::binary_search(ss.items.begin(), ss.items.end(), s);
    if (ss.complemented ? !listed : listed) total += wt;
  }
  return total;
}

}  // namespace

double prob_of(const Distribution& d, const Outcomes& v) {
  return std::visit(
      [&](const auto& dd) -> double {
        using T = std::decay_t<decltype(dd)>;
        if constexpr (std::is_same_v<T, DistReal>) return prob_real(dd, v);
        if constexpr (std::is_same_v<T, DistInt>) return prob_int(dd, v);
        if constexpr (std::is_same_v<T, DistStr>) return prob_str(dd, v);
      },
      d);
}

Outcome sample(const Distribution& d, double u) {
  if (std::holds_alternative<DistReal>(d)) {
    const auto& dr = std::get<DistReal>(d);
    double a = dr.F->cdf(dr.lo), b = dr.F->cdf(dr.hi);
    return Outcome(dr.F->quantile(a + u * (b - a)));
  }
  if (std::holds_alternative<DistInt>(d)) {
    const auto& di = std::get<DistInt>(d);
    double a = di.F->cdf(di.F->prev_atom(di.lo));
    double b = di.F->cdf(di.F->floor_atom(di.hi));
    double r = di.F->quantile(a + u * (b - a));
    double first = di.F->ceil_atom(di.lo);
    return Outcome(std::max(r, first));
  }
  const auto& ds = std::get<DistStr>(d);
  double acc = 0.0;
  for (const auto& [s, w] : ds.atoms) {
    acc += w;
    if (u < acc) return Outcome(s);
  }
  return Outcome(ds.atoms.back().first);
}

Density density_at(const Distribution& d, const Outcome& o) {
  if (std::holds_alternative<DistReal>(d)) {
    const auto& dr = std::get<DistReal>(d);
    if (!o.is_real()) return {1, 0.0};
    double r = o.real();
    if (r < dr.lo || r > dr.hi) return {1, 0.0};
    double z = dr.F->cdf(dr.hi) - dr.F->cdf(dr.lo);
    return {1, dr.F->density(r) / z};
  }
  Outcomes v = o.is_real() ? Outcomes::point(o.real()) : Outcomes::strings({o.str()});
  double w = prob_of(d, v);
  return {w == 0.0 ? 1 : 0, w};
}

}  // namespace spe
