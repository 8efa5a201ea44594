#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "rrt/walk.hpp"

namespace rrt {

// Weight models. w(0) = 1 in every model.
struct ConstantWeights {};
// w(j) = j^alpha for j >= 1.
struct PowerWeights {
  double alpha = 1.0;
};
// w(j) = alpha j^(alpha - 1) exp(j^alpha) for j >= 1, alpha in (0, 1].
struct StretchedExpWeights {
  double alpha = 0.5;
};
// w(j) = exp(-S_j) for a walk path S.
struct ProductFormWeights {
  WalkPath path;
};

struct UniformWeightDist {
  double lo = 0.0;
  double hi = 2.0;
};
struct ExponentialWeightDist {
  double mean = 1.0;
};
struct DiscreteWeightDist {
  std::vector<double> values;
  std::vector<double> probs;
};
using WeightDist = std::variant<UniformWeightDist, ExponentialWeightDist, DiscreteWeightDist>;

// w(1), w(2), ... i.i.d. from `dist`, drawn from Rng(seed, 0).
struct IidWeights {
  WeightDist dist;
  std::uint64_t seed = 0;
};

using EnvModel = std::variant<ConstantWeights, PowerWeights, StretchedExpWeights, ProductFormWeights, IidWeights>;

enum class EnvKind { constant, power, stretched_exp, product_form, iid_weights, custom };

/// Vertex weights in log space with their log prefix masses log W_r.
///
/// Immutable once built; share freely between replicate workers.
class Environment {
 public:
  // Takes log w(0..n) and rescales so that log w(0) = 0. Throws DomainError
  // on an empty or non-finite input.
  static Environment from_log_weights(std::vector<double> logw, EnvKind kind = EnvKind::custom);

  // Largest vertex label covered.
  std::size_t size() const { return logw_.size() - 1; }
  EnvKind kind() const { return kind_; }

  double log_weight(std::size_t j) const { return logw_[j]; }
  double log_prefix_mass(std::size_t r) const { return log_prefix_[r]; }
  std::span<const double> log_weights() const { return logw_; }
  std::span<const double> log_prefix_masses() const { return log_prefix_; }

 private:
  Environment(std::vector<double> logw, EnvKind kind);

  std::vector<double> logw_;
  std::vector<double> log_prefix_;
  EnvKind kind_;
};

// Validates the model (ConfigError) and builds weights for labels 0..n.
// Product-form paths must have at least n steps (DomainError otherwise).
Environment build_environment(const EnvModel& model, std::size_t n);

// p_r(j) = w(j) / W_r. Throws DomainError unless j <= r <= size().
double attach_prob(const Environment& env, std::size_t r, std::size_t j);

// p_j(j) for j = 1..n (element j-1).
std::vector<double> self_prob_seq(const Environment& env, std::size_t n);

// (1/h_n) sum_{j=1}^n p_j(j) E Y(j), with E Y(j) given as a scalar or as
// a sequence of length n (element j-1).
double zeta(const Environment& env, std::size_t n, double h_n, double edge_mean = 1.0);
double zeta(const Environment& env, std::size_t n, double h_n, std::span<const double> edge_means);

// (1/n) sum_{j=1}^n w(j) for an IidWeights model; throws ConfigError otherwise.
double iid_weight_sanity(const EnvModel& model, std::size_t n);

// Columns j,logw,log_prefix_mass.
void write_csv(std::ostream& out, const Environment& env);

}  // namespace rrt
