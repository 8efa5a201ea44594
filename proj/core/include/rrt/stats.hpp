#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "rrt/pmf.hpp"

namespace rrt {

/// Sorted sample with its empirical CDF.
class EmpiricalDist {
 public:
  explicit EmpiricalDist(std::vector<double> samples);

  std::span<const double> sorted() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }
  bool empty() const { return sorted_.empty(); }

  // Fraction of samples <= x.
  double cdf(double x) const;
  // Order statistic at rank floor(p * (m - 1)) after linear interpolation.
  double quantile(double p) const;

 private:
  std::vector<double> sorted_;
};

// sup_x |F_m(x) - F(x)| against a continuous CDF, checking both one-sided
// jumps at every sample point. Throws DomainError on an empty sample.
double ks_distance(const EmpiricalDist& emp, const std::function<double(double)>& cdf);

// Same statistic against a discrete law: both CDFs are step functions with
// jumps on a countable set, so the sup is attained at a jump point.
double ks_distance_discrete(const EmpiricalDist& emp, const Pmf& pmf);

// Two-sample statistic sup_x |F_a(x) - F_b(x)|.
double ks_two_sample(const EmpiricalDist& a, const EmpiricalDist& b);

// Kolmogorov distribution CDF P(K <= x), K = lim sqrt(m) D_m.
double kolmogorov_cdf(double x);
// Critical value c / sqrt(m) with P(K > c) = alpha.
double kolmogorov_critical_value(std::size_t m, double alpha);

double tv_distance(const Pmf& p, const Pmf& q);

struct FitReport {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

// Least squares of log y on log x. Throws DomainError for fewer than two
// points, mismatched lengths or nonpositive values.
FitReport loglog_slope(std::span<const double> xs, std::span<const double> ys);

struct MeanCi {
  double mean = 0.0;
  double half_width = 0.0;
};

// Normal-approximation confidence interval. Needs at least two samples.
MeanCi mean_with_ci(std::span<const double> samples, double level = 0.95);

double normal_cdf(double x);
double normal_quantile(double p);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

Interval wilson_interval(std::size_t successes, std::size_t trials, double level);

// Distribution-free interval for the p-quantile from binomial order-statistic ranks.
Interval quantile_interval(const EmpiricalDist& emp, double p, double level);

// Pearson chi-square p-value against equal cell probabilities.
// Throws DomainError for fewer than two cells or an expected count below 5.
double chi_square_uniformity(std::span<const std::size_t> counts);

// Pearson chi-square p-value against the given cell probabilities.
double chi_square_gof(std::span<const std::size_t> counts, std::span<const double> probs);

}  // namespace rrt
