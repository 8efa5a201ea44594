#include "rrt/limits.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "rrt/env.hpp"
#include "rrt/error.hpp"
#include "rrt/parallel.hpp"
#include "rrt/stats.hpp"

namespace rrt {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_rho(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("rho must lie in (0, 1)");
}

void check_open_unit(double t) {
  if (!(t > 0.0 && t < 1.0)) throw DomainError("profile needs t in (0, 1)");
}

template <class F>
double integrate(F f, double a, double b) {
  if (b <= a) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-12);
}

}  // namespace

double max_bm_tail(double x) {
  if (x < 0.0) return 1.0;
  return std::erfc(x / std::numbers::sqrt2);
}

double max_bm_cdf(double x) { return 1.0 - max_bm_tail(x); }

double max_bm_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
  return normal_quantile(0.5 * (1.0 + q));
}

double arcsine_cdf(double x, double rho) {
  check_rho(rho);
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("arcsine_cdf needs x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double c = std::sin(std::numbers::pi * rho) / std::numbers::pi;
  // u = t^rho removes the singularity at 0, v = (1-t)^(1-rho) the one at 1.
  if (x <= rho) {
    const auto f = [rho](double u) { return std::pow(1.0 - std::pow(u, 1.0 / rho), -rho); };
    return std::min(1.0, c / rho * integrate(f, 0.0, std::pow(x, rho)));
  }
  const double a = 1.0 - rho;
  const auto g = [rho, a](double v) { return std::pow(1.0 - std::pow(v, 1.0 / a), rho - 1.0); };
  return std::max(0.0, 1.0 - c / a * integrate(g, 0.0, std::pow(1.0 - x, a)));
}

double outdeg_profile(double t, double rho) {
  check_rho(rho);
  check_open_unit(t);
  const double pr = std::numbers::pi * rho;
  return std::sin(pr) / pr * std::pow((1.0 - t) / t, rho);
}

double constant_weight_profile(double t) {
  check_open_unit(t);
  return -std::log(t);
}

double evaluate(const LimitLaw& law, double x) {
  return std::visit(Overloaded{
                        [x](const MaxBmLaw&) { return max_bm_cdf(x); },
                        [x](const ArcsineLaw& l) { return arcsine_cdf(x, l.rho); },
                        [x](const OutdegProfileLaw& l) { return outdeg_profile(x, l.rho); },
                        [x](const ConstantWeightProfileLaw&) { return constant_weight_profile(x); },
                    },
                    law);
}

double product_form_zeta(const WalkPath& path, std::size_t n) {
  if (n == 0) throw DomainError("zeta_n needs n >= 1");
  const Environment env = build_environment(ProductFormWeights{path}, n);
  return zeta(env, n, std::sqrt(static_cast<double>(n)));
}

SigmaEstimate estimate_sigma_m(const IncrementSpec& spec, std::size_t n, std::size_t reps, std::uint64_t seed,
                               unsigned threads) {
  if (reps < 100) throw DomainError("estimate_sigma_m needs at least 100 replicates");
  validate(spec);
  SigmaEstimate est;
  est.zeta.resize(reps);
  parallel_for(reps, threads, [&](std::size_t i) {
    Rng rng(seed, i);
    est.zeta[i] = product_form_zeta(sample_path(spec, n, rng), n);
  });
  const EmpiricalDist emp(est.zeta);
  est.sigma_m = emp.quantile(0.5) / kMaxBmMedian;
  const Interval ci = quantile_interval(emp, 0.5, 0.95);
  est.lower = ci.lower / kMaxBmMedian;
  est.upper = ci.upper / kMaxBmMedian;
  return est;
}

double sigma_at_quantile(const std::vector<double>& zeta, double q) {
  if (zeta.empty()) throw DomainError("empty zeta sample");
  return EmpiricalDist(zeta).quantile(q) / max_bm_quantile(q);
}

}  // namespace rrt
