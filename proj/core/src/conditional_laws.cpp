#include "rrt/conditional_laws.hpp"

#include <cfloat>
#include <cmath>
#include <limits>

#include "rrt/error.hpp"

namespace rrt {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_cap(std::size_t m, std::size_t cap) {
  if (m > cap) throw ResourceError("exact pmf would need " + std::to_string(m) + " indicators, above the cap of " +
                                   std::to_string(cap));
}

double self_prob(const Environment& env, std::size_t j) {
  return std::exp(env.log_weight(j) - env.log_prefix_mass(j));
}

}  // namespace

EdgeCharFn edge_char_fn(const EdgeLenSpec& lens) {
  using namespace std::complex_literals;
  return std::visit(Overloaded{
                        [](const UnitLength&) -> EdgeCharFn {
                          return [](std::size_t, double t) { return std::exp(1i * t); };
                        },
                        [](const DeterministicLength& d) -> EdgeCharFn {
                          return [c = d.c](std::size_t, double t) { return std::exp(1i * (t * c)); };
                        },
                        [](const ExponentialLength& e) -> EdgeCharFn {
                          return [m = e.mean](std::size_t, double t) {
                            return 1.0 / std::complex<double>(1.0, -t * m);
                          };
                        },
                        [](const CustomLength&) -> EdgeCharFn {
                          throw ConfigError("custom edge lengths have no closed-form characteristic function");
                        },
                    },
                    lens);
}

std::complex<double> char_fn(const Environment& env, const EdgeCharFn& edge_cf, std::size_t n, double t) {
  if (n > env.size()) throw DomainError("environment does not cover n");
  if (n == 0) return {1.0, 0.0};
  std::complex<double> value = edge_cf(n, t);
  for (std::size_t j = 1; j < n; ++j) value *= 1.0 + (edge_cf(j, t) - 1.0) * self_prob(env, j);
  return value;
}

Pmf poisson_binomial(std::span<const double> probs, double shift) {
  const std::size_t m = probs.size();
  std::vector<long double> dist(m + 1, 0.0L);
  dist[0] = 1.0L;
  for (std::size_t i = 0; i < m; ++i) {
    const long double p = probs[i];
    const long double q = 1.0L - p;
    for (std::size_t k = i + 1; k > 0; --k) dist[k] = dist[k] * q + dist[k - 1] * p;
    dist[0] *= q;
  }
  std::vector<double> support(m + 1), mass(m + 1);
  for (std::size_t k = 0; k <= m; ++k) {
    support[k] = shift + static_cast<double>(k);
    mass[k] = static_cast<double>(dist[k]);
  }
  return Pmf(std::move(support), std::move(mass));
}

Pmf exact_depth_pmf(const Environment& env, std::size_t n, std::size_t cap) {
  if (n > env.size()) throw DomainError("environment does not cover n");
  if (n == 0) return Pmf::point_mass(0.0);
  check_cap(n - 1, cap);
  std::vector<double> probs(n - 1);
  for (std::size_t j = 1; j < n; ++j) probs[j - 1] = self_prob(env, j);
  return poisson_binomial(probs, 1.0);
}

OutdegreeMeans::OutdegreeMeans(const Environment& env, std::size_t n)
    : env_(&env), n_(n), log_suffix_(n + 1, kNegInf) {
  if (n > env.size()) throw DomainError("environment does not cover n");
  const double underflow_log = std::log(DBL_MIN);
  // -log W_k grows as k decreases, so the newest term is always the peak.
  long double acc = 0.0L;
  double peak = kNegInf;
  for (std::size_t i = n; i-- > 0;) {
    const double x = -env.log_prefix_mass(i);
    if (x < underflow_log) ++underflows_;
    acc = (peak == kNegInf ? 0.0L : acc * std::exp(peak - x)) + 1.0L;
    peak = x;
    log_suffix_[i] = peak + std::log(static_cast<double>(acc));
  }
}

double OutdegreeMeans::log_mean(std::size_t j) const {
  if (j > n_) throw DomainError("outdegree needs j <= n");
  if (j == n_) return kNegInf;
  return env_->log_weight(j) + log_suffix_[j];
}

double OutdegreeMeans::operator()(std::size_t j) const { return std::exp(log_mean(j)); }

double cond_mean_outdegree(const Environment& env, std::size_t n, std::size_t j) {
  if (j > n) throw DomainError("outdegree needs j <= n");
  return OutdegreeMeans(env, n)(j);
}

Pmf exact_outdeg_pmf(const Environment& env, std::size_t n, std::size_t j, std::size_t cap) {
  if (j > n) throw DomainError("outdegree needs j <= n");
  if (n > env.size()) throw DomainError("environment does not cover n");
  check_cap(n - j, cap);
  std::vector<double> probs(n - j);
  const double lw = env.log_weight(j);
  for (std::size_t k = j + 1; k <= n; ++k) probs[k - j - 1] = std::exp(lw - env.log_prefix_mass(k - 1));
  return poisson_binomial(probs, 0.0);
}

CondOutdegReport cond_outdeg_report(const Environment& env, std::size_t n, std::size_t j, std::size_t cap) {
  CondOutdegReport report;
  report.j = j;
  report.n = n;
  report.pmf = exact_outdeg_pmf(env, n, j, cap);
  report.mean = cond_mean_outdegree(env, n, j);
  return report;
}

std::size_t env_argmin_time(const Environment& env, std::size_t n) {
  if (n > env.size()) throw DomainError("environment does not cover n");
  std::size_t best = 0;
  for (std::size_t k = 1; k <= n; ++k)
    if (env.log_weight(k) > env.log_weight(best)) best = k;
  return best;
}

double texpect_statistic(const Environment& env, const OutdegreeMeans& means, std::size_t j) {
  if (env.kind() != EnvKind::product_form) throw DomainError("texpect_statistic needs a product-form environment");
  const std::size_t n = means.n();
  if (j >= n) throw DomainError("texpect_statistic needs j < n");
  const std::size_t tau = env_argmin_time(env, n);
  // exp(S_j - S_tau) * E_w N_n(j) with S = -log w.
  return std::exp(means.log_mean(j) - env.log_weight(j) + env.log_weight(tau) -
                  std::log(static_cast<double>(n - j)));
}

double texpect_statistic(const Environment& env, std::size_t n, std::size_t j) {
  if (j >= n) throw DomainError("texpect_statistic needs j < n");
  return texpect_statistic(env, OutdegreeMeans(env, n), j);
}

namespace {

double reciprocal_sum_to_min(const WalkPath& path, std::size_t n, std::size_t last) {
  const auto s = path.values();
  std::size_t tau = 0;
  for (std::size_t k = 1; k <= n; ++k)
    if (s[k] < s[tau]) tau = k;
  if (last == kNoParent) last = tau;
  long double sum = 0.0L;
  for (std::size_t k = 0; k <= last; ++k) sum += std::exp(s[tau] - s[k]);
  return static_cast<double>(1.0L / sum);
}

}  // namespace

double eta_sum_statistic(const WalkPath& path, std::size_t n) {
  if (n > path.steps()) throw DomainError("path does not cover n");
  return reciprocal_sum_to_min(path, n, n);
}

double eta_prefix_statistic(const WalkPath& path, std::size_t n) {
  if (n > path.steps()) throw DomainError("path does not cover n");
  return reciprocal_sum_to_min(path, n, kNoParent);
}

}  // namespace rrt
