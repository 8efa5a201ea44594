#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "rrt/env.hpp"
#include "rrt/pmf.hpp"
#include "rrt/treegrow.hpp"
#include "rrt/walk.hpp"

namespace rrt {

// Characteristic function f_j(t) of the edge length Y(j).
using EdgeCharFn = std::function<std::complex<double>(std::size_t j, double t)>;

// Characteristic function of i.i.d. lengths. Throws ConfigError for CustomLength.
EdgeCharFn edge_char_fn(const EdgeLenSpec& lens);

// Quenched characteristic function of D_n:
//   f_n(t) * prod_{j=1}^{n-1} [1 + (f_j(t) - 1) p_j(j)],  and 1 for n = 0.
std::complex<double> char_fn(const Environment& env, const EdgeCharFn& edge_cf, std::size_t n, double t);

inline constexpr std::size_t kDefaultPmfCap = 20000;

// Law of shift + sum of independent Bernoulli(probs[i]); O(m^2) convolution
// in extended precision on the support {shift, ..., shift + m}.
Pmf poisson_binomial(std::span<const double> probs, double shift = 0.0);

// Exact quenched law of D_n for unit edge lengths: 1 + Poisson-binomial of
// p_1(1), ..., p_{n-1}(n-1). Throws ResourceError when n > cap.
Pmf exact_depth_pmf(const Environment& env, std::size_t n, std::size_t cap = kDefaultPmfCap);

/// Quenched mean outdegrees E_w N_n(j) = w(j) sum_{k=j}^{n-1} 1 / W_k for all j.
///
/// Precomputes suffix log-sums of 1/W_k once in O(n); each query is O(1).
class OutdegreeMeans {
 public:
  OutdegreeMeans(const Environment& env, std::size_t n);

  std::size_t n() const { return n_; }
  // Throws DomainError for j > n.
  double operator()(std::size_t j) const;
  // log E_w N_n(j); -infinity for j == n.
  double log_mean(std::size_t j) const;
  // Number of k whose 1/W_k underflows a double on its own. These terms are
  // still carried exactly through the log-space suffix sums.
  std::size_t underflow_count() const { return underflows_; }

 private:
  const Environment* env_;
  std::size_t n_;
  std::vector<double> log_suffix_;  // log sum_{k=i}^{n-1} 1/W_k, with -inf at i = n
  std::size_t underflows_ = 0;
};

double cond_mean_outdegree(const Environment& env, std::size_t n, std::size_t j);

struct CondOutdegReport {
  std::size_t j = 0;
  std::size_t n = 0;
  double mean = 0.0;
  Pmf pmf = Pmf::point_mass(0.0);
};

// Exact quenched law of N_n(j): Poisson-binomial over p_{k-1}(j), k = j+1..n.
Pmf exact_outdeg_pmf(const Environment& env, std::size_t n, std::size_t j, std::size_t cap = kDefaultPmfCap);

CondOutdegReport cond_outdeg_report(const Environment& env, std::size_t n, std::size_t j,
                                    std::size_t cap = kDefaultPmfCap);

// Leftmost argmax of log w over [0, n], i.e. the leftmost argmin of S for a
// product-form environment.
std::size_t env_argmin_time(const Environment& env, std::size_t n);

// exp(S_j - S_tau(n)) / (n - j) * E_w N_n(j) for a product-form environment.
// Throws DomainError if the environment is not product-form or j >= n.
double texpect_statistic(const Environment& env, std::size_t n, std::size_t j);
double texpect_statistic(const Environment& env, const OutdegreeMeans& means, std::size_t j);

// 1 / sum_{k=0}^n exp(S_tau(n) - S_k), evaluated in log space.
double eta_sum_statistic(const WalkPath& path, std::size_t n);

// Same reciprocal sum restricted to k in [0, tau(n)]: an upper envelope for
// the texpect statistic whenever j >= tau(n).
double eta_prefix_statistic(const WalkPath& path, std::size_t n);

}  // namespace rrt
