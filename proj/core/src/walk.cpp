#include "rrt/walk.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

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

double sample_stable(const Stable& s, Rng& rng) {
  const double v = std::numbers::pi * (rng.uniform() - 0.5);
  const double w = rng.exponential(1.0);
  if (s.alpha == 1.0) {
    const double half_pi = 0.5 * std::numbers::pi;
    const double shifted = half_pi + s.beta * v;
    return (shifted * std::tan(v) - s.beta * std::log(half_pi * w * std::cos(v) / shifted)) / half_pi;
  }
  const double t = s.beta * std::tan(0.5 * std::numbers::pi * s.alpha);
  const double b = std::atan(t) / s.alpha;
  const double scale = std::pow(1.0 + t * t, 1.0 / (2.0 * s.alpha));
  const double arg = s.alpha * (v + b);
  return scale * std::sin(arg) / std::pow(std::cos(v), 1.0 / s.alpha) *
         std::pow(std::cos(v - arg) / w, (1.0 - s.alpha) / s.alpha);
}

double sample_table(const CustomTable& table, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < table.values.size(); ++i) {
    acc += table.probs[i];
    if (u < acc) return table.values[i];
  }
  return table.values.back();
}

bool almost_surely_zero(const IncrementSpec& spec) {
  return std::visit(Overloaded{
                        [](const LatticeWithAtom& l) { return l.p0 >= 1.0; },
                        [](const CustomTable& t) {
                          double zero_mass = 0.0;
                          for (std::size_t i = 0; i < t.values.size(); ++i)
                            if (t.values[i] == 0.0) zero_mass += t.probs[i];
                          return zero_mass >= 1.0 - 1e-12;
                        },
                        [](const auto&) { return false; },
                    },
                    spec);
}

}  // namespace

void validate(const IncrementSpec& spec) {
  std::visit(Overloaded{
                 [](const Gaussian& g) {
                   if (!(g.sigma > 0.0) || !std::isfinite(g.sigma))
                     throw ConfigError("gaussian increments need sigma > 0");
                 },
                 [](const Rademacher&) {},
                 [](const LatticeWithAtom& l) {
                   if (!(l.p0 >= 0.0 && l.p0 <= 1.0))
                     throw ConfigError("lattice_with_atom needs p0 in [0, 1]");
                 },
                 [](const Stable& s) {
                   if (!(s.alpha > 0.0 && s.alpha < 2.0)) throw ConfigError("stable alpha must lie in (0, 2)");
                   if (!(s.beta >= -1.0 && s.beta <= 1.0)) throw ConfigError("stable beta must lie in [-1, 1]");
                 },
                 [](const CustomTable& t) {
                   if (t.values.empty() || t.values.size() != t.probs.size())
                     throw ConfigError("custom_table needs matching, nonempty values and probs");
                   double total = 0.0;
                   for (double p : t.probs) {
                     if (!(p >= 0.0)) throw ConfigError("custom_table probabilities must be nonnegative");
                     total += p;
                   }
                   if (std::abs(total - 1.0) > 1e-12) throw ConfigError("custom_table probabilities must sum to 1");
                 },
             },
             spec);
}

bool is_lattice(const IncrementSpec& spec) {
  return std::holds_alternative<Rademacher>(spec) || std::holds_alternative<LatticeWithAtom>(spec) ||
         std::holds_alternative<CustomTable>(spec);
}

bool is_symmetric(const IncrementSpec& spec) {
  return std::visit(Overloaded{
                        [](const Gaussian&) { return true; },
                        [](const Rademacher&) { return true; },
                        [](const LatticeWithAtom&) { return true; },
                        [](const Stable& s) { return s.beta == 0.0; },
                        [](const CustomTable&) { return false; },
                    },
                    spec);
}

double sample_increment(const IncrementSpec& spec, Rng& rng) {
  return std::visit(Overloaded{
                        [&](const Gaussian& g) { return g.sigma * rng.normal(); },
                        [&](const Rademacher&) { return (rng() >> 63) ? 1.0 : -1.0; },
                        [&](const LatticeWithAtom& l) {
                          if (rng.uniform() < l.p0) return 0.0;
                          return (rng() >> 63) ? 1.0 : -1.0;
                        },
                        [&](const Stable& s) { return sample_stable(s, rng); },
                        [&](const CustomTable& t) { return sample_table(t, rng); },
                    },
                    spec);
}

WalkPath::WalkPath(std::vector<double> values) : s_(std::move(values)) {
  if (s_.empty()) throw DomainError("walk path must contain S_0");
  if (s_[0] != 0.0) throw DomainError("walk path must start at S_0 = 0");
}

WalkPath sample_path(const IncrementSpec& spec, std::size_t n, Rng& rng) {
  validate(spec);
  std::vector<double> s(n + 1);
  s[0] = 0.0;
  for (std::size_t k = 1; k <= n; ++k) s[k] = s[k - 1] + sample_increment(spec, rng);
  return WalkPath(std::move(s));
}

std::vector<double> running_min(const WalkPath& path) {
  const auto s = path.values();
  std::vector<double> out(s.size());
  out[0] = s[0];
  for (std::size_t k = 1; k < s.size(); ++k) out[k] = std::min(out[k - 1], s[k]);
  return out;
}

std::vector<double> running_max(const WalkPath& path) {
  const auto s = path.values();
  std::vector<double> out(s.size());
  out[0] = s[0];
  for (std::size_t k = 1; k < s.size(); ++k) out[k] = std::max(out[k - 1], s[k]);
  return out;
}

std::vector<double> running_max_excluding_origin(const WalkPath& path) {
  if (path.steps() == 0) throw DomainError("max over S_1..S_n is undefined for n = 0");
  const auto s = path.values();
  std::vector<double> out(path.steps());
  out[0] = s[1];
  for (std::size_t k = 2; k < s.size(); ++k) out[k - 1] = std::max(out[k - 2], s[k]);
  return out;
}

RunningMax running_max_variants(const WalkPath& path) {
  return {running_max(path), running_max_excluding_origin(path)};
}

std::size_t argmin_leftmost(const WalkPath& path) {
  const auto s = path.values();
  std::size_t best = 0;
  for (std::size_t k = 1; k < s.size(); ++k)
    if (s[k] < s[best]) best = k;
  return best;
}

std::vector<std::size_t> running_argmin_leftmost(const WalkPath& path) {
  const auto s = path.values();
  std::vector<std::size_t> out(s.size());
  out[0] = 0;
  for (std::size_t k = 1; k < s.size(); ++k) out[k] = s[k] < s[out[k - 1]] ? k : out[k - 1];
  return out;
}

LadderReport ladder_epochs(const WalkPath& path) {
  const auto s = path.values();
  LadderReport report;
  report.descending_epochs.push_back(0);
  report.ascending_epochs.push_back(0);
  report.descending_heights.push_back(s[0]);
  report.ascending_heights.push_back(s[0]);
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (s[k] < report.descending_heights.back()) {
      report.descending_epochs.push_back(k);
      report.descending_heights.push_back(s[k]);
    }
    if (s[k] > report.ascending_heights.back()) {
      report.ascending_epochs.push_back(k);
      report.ascending_heights.push_back(s[k]);
    }
  }
  return report;
}

ProportionEstimate estimate_rho(const IncrementSpec& spec, std::size_t n, std::size_t reps, std::uint64_t seed,
                                unsigned threads, double level) {
  validate(spec);
  if (n == 0 || reps == 0) throw DomainError("estimate_rho needs n >= 1 and reps >= 1");
  std::vector<unsigned char> positive(reps);
  parallel_for(reps, threads, [&](std::size_t i) {
    Rng rng(seed, i);
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += sample_increment(spec, rng);
    positive[i] = s > 0.0;
  });
  const std::size_t hits = std::accumulate(positive.begin(), positive.end(), std::size_t{0});
  const auto ci = wilson_interval(hits, reps, level);
  return {static_cast<double>(hits) / static_cast<double>(reps), ci.lower, ci.upper, hits, reps};
}

PhiEstimate estimate_phi(const IncrementSpec& spec, std::size_t jmax, std::size_t reps, std::uint64_t seed) {
  validate(spec);
  if (jmax == 0) throw DomainError("estimate_phi needs jmax >= 1");
  if (!is_lattice(spec)) return {0.0, false, true};
  if (almost_surely_zero(spec)) return {std::numeric_limits<double>::infinity(), true, true};

  if (std::holds_alternative<Rademacher>(spec)) {
    // P(S_{2m} = 0) = C(2m, m) 4^{-m}, built by the ratio (2m - 1) / (2m).
    double zero_prob = 1.0;
    double sum = 0.0;
    for (std::size_t j = 2; j <= jmax; j += 2) {
      zero_prob *= static_cast<double>(j - 1) / static_cast<double>(j);
      sum += zero_prob / static_cast<double>(j);
    }
    return {sum, false, true};
  }

  if (reps == 0) throw DomainError("Monte Carlo estimate of phi needs reps >= 1");
  std::vector<std::size_t> zeros(jmax + 1, 0);
  for (std::size_t r = 0; r < reps; ++r) {
    Rng rng(seed, r);
    double s = 0.0;
    for (std::size_t j = 1; j <= jmax; ++j) {
      s += sample_increment(spec, rng);
      if (s == 0.0) ++zeros[j];
    }
  }
  double sum = 0.0;
  for (std::size_t j = 1; j <= jmax; ++j)
    sum += static_cast<double>(zeros[j]) / static_cast<double>(reps) / static_cast<double>(j);
  return {sum, false, false};
}

}  // namespace rrt
