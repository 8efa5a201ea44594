#include "rrt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "rrt/error.hpp"

namespace rrt {

EmpiricalDist::EmpiricalDist(std::vector<double> samples) : sorted_(std::move(samples)) {
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalDist::cdf(double x) const {
  if (sorted_.empty()) throw DomainError("empty sample");
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EmpiricalDist::quantile(double p) const {
  if (sorted_.empty()) throw DomainError("empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
  const double pos = p * static_cast<double>(sorted_.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted_.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted_[lo] + frac * (sorted_[hi] - sorted_[lo]);
}

double ks_distance(const EmpiricalDist& emp, const std::function<double(double)>& cdf) {
  if (emp.empty()) throw DomainError("ks_distance needs at least one sample");
  const auto xs = emp.sorted();
  const double m = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    const double above = static_cast<double>(i + 1) / m - f;
    const double below = f - static_cast<double>(i) / m;
    d = std::max({d, above, below});
  }
  return std::clamp(d, 0.0, 1.0);
}

double ks_distance_discrete(const EmpiricalDist& emp, const Pmf& pmf) {
  if (emp.empty()) throw DomainError("ks_distance needs at least one sample");
  const auto xs = emp.sorted();
  const auto support = pmf.support();
  const auto mass = pmf.mass();
  const double m = static_cast<double>(xs.size());
  std::size_t i = 0;  // samples consumed
  std::size_t k = 0;  // support points consumed
  long double f = 0.0L;
  double d = 0.0;
  while (i < xs.size() || k < support.size()) {
    double x;
    if (k >= support.size()) x = xs[i];
    else if (i >= xs.size()) x = support[k];
    else x = std::min(xs[i], support[k]);
    while (i < xs.size() && xs[i] <= x) ++i;
    while (k < support.size() && support[k] <= x) f += mass[k++];
    d = std::max(d, std::abs(static_cast<double>(i) / m - static_cast<double>(f)));
  }
  return std::clamp(d, 0.0, 1.0);
}

double ks_two_sample(const EmpiricalDist& a, const EmpiricalDist& b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample needs nonempty samples");
  const auto xa = a.sorted();
  const auto xb = b.sorted();
  const double ma = static_cast<double>(xa.size());
  const double mb = static_cast<double>(xb.size());
  std::size_t i = 0, k = 0;
  double d = 0.0;
  while (i < xa.size() && k < xb.size()) {
    const double x = std::min(xa[i], xb[k]);
    while (i < xa.size() && xa[i] <= x) ++i;
    while (k < xb.size() && xb[k] <= x) ++k;
    d = std::max(d, std::abs(static_cast<double>(i) / ma - static_cast<double>(k) / mb));
  }
  return d;
}

double kolmogorov_cdf(double x) {
  if (x <= 0.0) return 0.0;
  if (x < 1.0) {
    const double c = std::numbers::pi * std::numbers::pi / (8.0 * x * x);
    double sum = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double odd = 2.0 * k - 1.0;
      sum += std::exp(-odd * odd * c);
    }
    return std::sqrt(2.0 * std::numbers::pi) / x * sum;
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return 1.0 - 2.0 * sum;
}

double kolmogorov_critical_value(std::size_t m, double alpha) {
  if (m == 0) throw DomainError("kolmogorov_critical_value needs m >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  double lo = 0.2, hi = 5.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (1.0 - kolmogorov_cdf(mid) > alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi) / std::sqrt(static_cast<double>(m));
}

double tv_distance(const Pmf& p, const Pmf& q) {
  const auto sp = p.support();
  const auto sq = q.support();
  std::size_t i = 0, k = 0;
  long double total = 0.0L;
  while (i < sp.size() || k < sq.size()) {
    if (k >= sq.size() || (i < sp.size() && sp[i] < sq[k])) {
      total += p.mass()[i++];
    } else if (i >= sp.size() || sq[k] < sp[i]) {
      total += q.mass()[k++];
    } else {
      total += std::abs(static_cast<long double>(p.mass()[i++]) - q.mass()[k++]);
    }
  }
  return std::clamp(static_cast<double>(0.5L * total), 0.0, 1.0);
}

FitReport loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw DomainError("loglog_slope needs equally many x and y values");
  if (xs.size() < 2) throw DomainError("loglog_slope needs at least two points");
  const std::size_t m = xs.size();
  std::vector<double> lx(m), ly(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw DomainError("loglog_slope needs positive inputs");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("loglog_slope needs at least two distinct x values");
  FitReport fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (m > 2) {
    double sse = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
      sse += r * r;
    }
    fit.slope_stderr = std::sqrt(sse / static_cast<double>(m - 2) / sxx);
  }
  return fit;
}

MeanCi mean_with_ci(std::span<const double> samples, double level) {
  if (samples.size() < 2) throw DomainError("mean_with_ci needs at least two samples");
  const double m = static_cast<double>(samples.size());
  long double sum = 0.0L;
  for (double x : samples) sum += x;
  const double mean = static_cast<double>(sum / m);
  long double ss = 0.0L;
  for (double x : samples) ss += (x - mean) * static_cast<long double>(x - mean);
  const double sd = std::sqrt(static_cast<double>(ss / (m - 1.0)));
  return {mean, normal_quantile(0.5 + 0.5 * level) * sd / std::sqrt(m)};
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile needs p in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double level) {
  if (trials == 0) throw DomainError("wilson_interval needs trials >= 1");
  const double z = normal_quantile(0.5 + 0.5 * level);
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double denom = 1.0 + z * z / n;
  const double centre = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

Interval quantile_interval(const EmpiricalDist& emp, double p, double level) {
  if (emp.empty()) throw DomainError("quantile_interval needs samples");
  const auto xs = emp.sorted();
  const double m = static_cast<double>(xs.size());
  const double z = normal_quantile(0.5 + 0.5 * level);
  const double spread = z * std::sqrt(m * p * (1.0 - p));
  const double lo = std::clamp(std::floor(m * p - spread), 0.0, m - 1.0);
  const double hi = std::clamp(std::ceil(m * p + spread), 0.0, m - 1.0);
  return {xs[static_cast<std::size_t>(lo)], xs[static_cast<std::size_t>(hi)]};
}

double chi_square_gof(std::span<const std::size_t> counts, std::span<const double> probs) {
  if (counts.size() < 2 || counts.size() != probs.size())
    throw DomainError("chi-square needs at least two cells with matching probabilities");
  double total = 0.0;
  for (std::size_t c : counts) total += static_cast<double>(c);
  double stat = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = total * probs[i];
    if (expected < 5.0) throw DomainError("chi-square cell with expected count below 5");
    const double diff = static_cast<double>(counts[i]) - expected;
    stat += diff * diff / expected;
  }
  const double dof = static_cast<double>(counts.size() - 1);
  return boost::math::gamma_q(0.5 * dof, 0.5 * stat);
}

double chi_square_uniformity(std::span<const std::size_t> counts) {
  std::vector<double> probs(counts.size(), counts.empty() ? 0.0 : 1.0 / static_cast<double>(counts.size()));
  return chi_square_gof(counts, probs);
}

}  // namespace rrt
