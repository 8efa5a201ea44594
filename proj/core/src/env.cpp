#include "rrt/env.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "rrt/error.hpp"
#include "rrt/format.hpp"

namespace rrt {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void validate(const WeightDist& dist) {
  std::visit(Overloaded{
                 [](const UniformWeightDist& u) {
                   if (!(u.lo >= 0.0 && u.hi > u.lo && std::isfinite(u.hi)))
                     throw ConfigError("uniform weights need 0 <= lo < hi");
                 },
                 [](const ExponentialWeightDist& e) {
                   if (!(e.mean > 0.0 && std::isfinite(e.mean)))
                     throw ConfigError("exponential weights need mean > 0");
                 },
                 [](const DiscreteWeightDist& d) {
                   if (d.values.empty() || d.values.size() != d.probs.size())
                     throw ConfigError("discrete weights need matching, nonempty values and probs");
                   double total = 0.0;
                   for (double p : d.probs) {
                     if (!(p >= 0.0)) throw ConfigError("discrete weight probabilities must be nonnegative");
                     total += p;
                   }
                   if (std::abs(total - 1.0) > 1e-12) throw ConfigError("discrete weight probabilities must sum to 1");
                 },
             },
             dist);
}

double draw_weight(const WeightDist& dist, Rng& rng) {
  const double w = std::visit(Overloaded{
                                  [&](const UniformWeightDist& u) { return u.lo + (u.hi - u.lo) * rng.uniform(); },
                                  [&](const ExponentialWeightDist& e) { return rng.exponential(e.mean); },
                                  [&](const DiscreteWeightDist& d) {
                                    const double u = rng.uniform();
                                    double acc = 0.0;
                                    for (std::size_t i = 0; i + 1 < d.values.size(); ++i) {
                                      acc += d.probs[i];
                                      if (u < acc) return d.values[i];
                                    }
                                    return d.values.back();
                                  },
                              },
                              dist);
  if (!(w > 0.0) || !std::isfinite(w))
    throw ConfigError("iid weight model produced a nonpositive weight " + format_double(w));
  return w;
}

std::vector<double> iid_weights(const IidWeights& model, std::size_t n) {
  validate(model.dist);
  Rng rng(model.seed, 0);
  std::vector<double> w(n + 1);
  w[0] = 1.0;
  for (std::size_t j = 1; j <= n; ++j) w[j] = draw_weight(model.dist, rng);
  return w;
}

}  // namespace

Environment::Environment(std::vector<double> logw, EnvKind kind)
    : logw_(std::move(logw)), log_prefix_(logw_.size()), kind_(kind) {
  // Streaming log-sum-exp: acc holds sum exp(logw - peak) for the running peak.
  double peak = logw_[0];
  long double acc = 0.0L;
  for (std::size_t r = 0; r < logw_.size(); ++r) {
    const double x = logw_[r];
    if (x > peak) {
      acc = acc * std::exp(peak - x) + 1.0L;
      peak = x;
    } else {
      acc += std::exp(x - peak);
    }
    log_prefix_[r] = peak + std::log(static_cast<double>(acc));
  }
}

Environment Environment::from_log_weights(std::vector<double> logw, EnvKind kind) {
  if (logw.empty()) throw DomainError("environment needs at least the root weight");
  const double base = logw[0];
  for (double& x : logw) {
    if (!std::isfinite(x)) throw DomainError("log weights must be finite");
    x -= base;
  }
  return Environment(std::move(logw), kind);
}

Environment build_environment(const EnvModel& model, std::size_t n) {
  std::vector<double> logw(n + 1, 0.0);
  const EnvKind kind = std::visit(
      Overloaded{
          [&](const ConstantWeights&) { return EnvKind::constant; },
          [&](const PowerWeights& p) {
            if (!std::isfinite(p.alpha)) throw ConfigError("power weights need a finite exponent");
            for (std::size_t j = 1; j <= n; ++j) logw[j] = p.alpha * std::log(static_cast<double>(j));
            return EnvKind::power;
          },
          [&](const StretchedExpWeights& s) {
            if (!(s.alpha > 0.0 && s.alpha <= 1.0)) throw ConfigError("stretched exponential weights need alpha in (0, 1]");
            const double log_alpha = std::log(s.alpha);
            for (std::size_t j = 1; j <= n; ++j) {
              const double lj = std::log(static_cast<double>(j));
              logw[j] = log_alpha + (s.alpha - 1.0) * lj + std::exp(s.alpha * lj);
            }
            return EnvKind::stretched_exp;
          },
          [&](const ProductFormWeights& p) {
            if (p.path.steps() < n) throw DomainError("product-form path is shorter than the environment");
            for (std::size_t j = 1; j <= n; ++j) logw[j] = -p.path[j];
            return EnvKind::product_form;
          },
          [&](const IidWeights& iid) {
            const auto w = iid_weights(iid, n);
            for (std::size_t j = 1; j <= n; ++j) logw[j] = std::log(w[j]);
            return EnvKind::iid_weights;
          },
      },
      model);
  return Environment::from_log_weights(std::move(logw), kind);
}

double attach_prob(const Environment& env, std::size_t r, std::size_t j) {
  if (j > r || r > env.size()) throw DomainError("attach_prob needs j <= r <= n");
  return std::exp(env.log_weight(j) - env.log_prefix_mass(r));
}

std::vector<double> self_prob_seq(const Environment& env, std::size_t n) {
  if (n > env.size()) throw DomainError("environment does not cover n");
  std::vector<double> out(n);
  for (std::size_t j = 1; j <= n; ++j) out[j - 1] = std::exp(env.log_weight(j) - env.log_prefix_mass(j));
  return out;
}

double zeta(const Environment& env, std::size_t n, double h_n, double edge_mean) {
  if (!(h_n > 0.0)) throw DomainError("zeta needs h_n > 0");
  if (n > env.size()) throw DomainError("environment does not cover n");
  long double sum = 0.0L;
  for (std::size_t j = 1; j <= n; ++j) sum += std::exp(env.log_weight(j) - env.log_prefix_mass(j));
  return static_cast<double>(sum * edge_mean / h_n);
}

double zeta(const Environment& env, std::size_t n, double h_n, std::span<const double> edge_means) {
  if (!(h_n > 0.0)) throw DomainError("zeta needs h_n > 0");
  if (n > env.size()) throw DomainError("environment does not cover n");
  if (edge_means.size() != n) throw DomainError("zeta needs one edge mean per step");
  long double sum = 0.0L;
  for (std::size_t j = 1; j <= n; ++j)
    sum += std::exp(env.log_weight(j) - env.log_prefix_mass(j)) * edge_means[j - 1];
  return static_cast<double>(sum / h_n);
}

double iid_weight_sanity(const EnvModel& model, std::size_t n) {
  const auto* iid = std::get_if<IidWeights>(&model);
  if (iid == nullptr) throw ConfigError("iid_weight_sanity needs an iid weight model");
  if (n == 0) throw DomainError("iid_weight_sanity needs n >= 1");
  const auto w = iid_weights(*iid, n);
  long double sum = 0.0L;
  for (std::size_t j = 1; j <= n; ++j) sum += w[j];
  return static_cast<double>(sum / n);
}

void write_csv(std::ostream& out, const Environment& env) {
  out << "j,logw,log_prefix_mass\n";
  for (std::size_t j = 0; j <= env.size(); ++j)
    out << j << ',' << format_double(env.log_weight(j)) << ',' << format_double(env.log_prefix_mass(j)) << '\n';
}

}  // namespace rrt
