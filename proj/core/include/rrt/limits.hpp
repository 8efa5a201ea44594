#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "rrt/walk.hpp"

namespace rrt {

// Median of the law of max_{0<=u<=1} B(u).
inline constexpr double kMaxBmMedian = 0.67448975019608171;

// P(max_{0<=u<=1} B(u) > x) = 2(1 - Phi(x)) for x >= 0, and 1 for x < 0.
double max_bm_tail(double x);
double max_bm_cdf(double x);
double max_bm_quantile(double q);

// (sin(pi rho) / pi) int_0^x t^(rho-1) (1-t)^(-rho) dt for x in [0, 1].
// Throws DomainError outside [0, 1] or for rho outside (0, 1).
double arcsine_cdf(double x, double rho);

// (sin(pi rho) / (pi rho)) ((1-t)/t)^rho for t in (0, 1).
double outdeg_profile(double t, double rho);

// -ln t for t in (0, 1).
double constant_weight_profile(double t);

struct MaxBmLaw {};
struct ArcsineLaw {
  double rho = 0.5;
};
struct OutdegProfileLaw {
  double rho = 0.5;
};
struct ConstantWeightProfileLaw {};

using LimitLaw = std::variant<MaxBmLaw, ArcsineLaw, OutdegProfileLaw, ConstantWeightProfileLaw>;

// CDF for the distributional laws, density value for the profiles.
double evaluate(const LimitLaw& law, double x);

struct SigmaEstimate {
  double sigma_m = 0.0;
  double lower = 0.0;  // 95% order-statistic interval of the median, rescaled
  double upper = 0.0;
  std::vector<double> zeta;  // zeta_n per replicate, replicate order
};

/// Estimates sigma_m by matching the median of zeta_n = n^{-1/2} sum p_j(j)
/// over product-form environments to the median of max B.
///
/// Replicate i draws its walk from Rng(seed, i). The increments should have
/// mean zero and finite variance; that is the caller's responsibility.
/// Throws DomainError for reps < 100.
SigmaEstimate estimate_sigma_m(const IncrementSpec& spec, std::size_t n, std::size_t reps, std::uint64_t seed,
                               unsigned threads = 1);

// zeta_n q-quantile divided by the q-quantile of max B.
double sigma_at_quantile(const std::vector<double>& zeta, double q);

// zeta_n for one product-form environment driven by `path`.
double product_form_zeta(const WalkPath& path, std::size_t n);

}  // namespace rrt
