#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "spe/outcomes.hpp"

namespace spe {

// A cumulative distribution function with quantile and density/mass access.
// cdf is nondecreasing and right-continuous with cdf(-inf)=0, cdf(inf)=1;
// quantile(u) = inf{r : u <= cdf(r)}.
class Cdf {
 public:
  virtual ~Cdf() = default;
  virtual double cdf(double r) const = 0;
  virtual double quantile(double u) const = 0;
  virtual double density(double r) const { return 0.0; }

  // Atomic families only.
  virtual bool discrete() const { return false; }
  virtual double mass(double r) const { return 0.0; }
  virtual double floor_atom(double r) const { return r; }  // greatest atom <= r
  virtual double prev_atom(double r) const { return r; }   // greatest atom < r
  virtual double ceil_atom(double r) const { return r; }   // smallest atom >= r
  virtual double next_atom(double r) const { return r; }   // smallest atom > r

  virtual std::string family() const = 0;
  virtual std::vector<double> params() const = 0;
  // Natural support bounds of the untruncated family.
  virtual std::pair<double, double> support() const = 0;
};

using CdfPtr = std::shared_ptr<const Cdf>;

CdfPtr normal_cdf(double mean, double stddev);
CdfPtr uniform_cdf(double lo, double hi);
CdfPtr gamma_cdf(double shape, double scale);
CdfPtr beta_cdf(double a, double b);
CdfPtr poisson_cdf(double mean);
CdfPtr binomial_cdf(int trials, double p);
CdfPtr atomic_cdf(double location);
CdfPtr make_cdf(const std::string& family, const std::vector<double>& params);

// Truncated continuous real distribution.
struct DistReal {
  CdfPtr F;
  double lo, hi;  // truncation, F(hi) - F(lo) > 0
};

// Truncated atomic real distribution (integer grids and single atoms).
struct DistInt {
  CdfPtr F;
  double lo, hi;  // truncation; at least one atom with positive mass inside
};

// Nominal distribution over strings; weights positive, normalized to 1.
struct DistStr {
  std::vector<std::pair<std::string, double>> atoms;
};

using Distribution = std::variant<DistReal, DistInt, DistStr>;

DistReal make_dist_real(CdfPtr F, double lo, double hi);
DistInt make_dist_int(CdfPtr F, double lo, double hi);
DistStr make_dist_str(std::vector<std::pair<std::string, double>> atoms);

struct Density {
  int degree = 0;
  double value = 0.0;
};

double prob_of(const Distribution& d, const Outcomes& v);
Outcome sample(const Distribution& d, double u);
Density density_at(const Distribution& d, const Outcome& o);

// Mass normalizer of a truncated DistInt: total atom mass within [lo, hi].
double dist_int_norm(const DistInt& d);

}  // namespace spe
