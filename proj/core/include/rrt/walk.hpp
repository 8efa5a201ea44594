#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "rrt/rng.hpp"

namespace rrt {

// Increment laws for the environment-driving random walk.
struct Gaussian {
  double sigma = 1.0;
};
struct Rademacher {};
// 0 with probability p0, otherwise +1 or -1 with equal probability.
struct LatticeWithAtom {
  double p0 = 0.0;
};
// Strictly stable law, S1 parametrisation, sampled by the Chambers-Mallows-Stuck transform.
struct Stable {
  double alpha = 1.5;
  double beta = 0.0;
};
struct CustomTable {
  std::vector<double> values;
  std::vector<double> probs;
};

using IncrementSpec = std::variant<Gaussian, Rademacher, LatticeWithAtom, Stable, CustomTable>;

// Throws ConfigError when parameters are out of range.
void validate(const IncrementSpec& spec);

// Lattice laws have P(S_j = 0) > 0 for some j. Declared by kind, never inferred.
bool is_lattice(const IncrementSpec& spec);

// Symmetric laws have P(theta > x) = P(theta < -x).
bool is_symmetric(const IncrementSpec& spec);

double sample_increment(const IncrementSpec& spec, Rng& rng);

/// A trajectory S_0 = 0, S_1, ..., S_n.
class WalkPath {
 public:
  WalkPath() : s_{0.0} {}
  // Throws DomainError unless values is nonempty and values[0] == 0.
  explicit WalkPath(std::vector<double> values);

  std::size_t steps() const { return s_.size() - 1; }
  double operator[](std::size_t k) const { return s_[k]; }
  std::span<const double> values() const { return s_; }

 private:
  std::vector<double> s_;
};

WalkPath sample_path(const IncrementSpec& spec, std::size_t n, Rng& rng);

// L_k = min(S_0..S_k) for k = 0..n.
std::vector<double> running_min(const WalkPath& path);

// M_k = max(S_0..S_k) for k = 0..n.
std::vector<double> running_max(const WalkPath& path);

// Max over S_1..S_k for k = 1..n (element k-1 holds the value for k).
// Throws DomainError for a path with no steps.
std::vector<double> running_max_excluding_origin(const WalkPath& path);

struct RunningMax {
  std::vector<double> max;        // indexed 0..n
  std::vector<double> max_tilde;  // indexed 1..n, stored at position k-1
};

RunningMax running_max_variants(const WalkPath& path);

// Smallest k with S_k <= S_l for every l in [0, n].
std::size_t argmin_leftmost(const WalkPath& path);

// Leftmost argmin of every prefix: element k is the argmin over [0, k].
std::vector<std::size_t> running_argmin_leftmost(const WalkPath& path);

struct LadderReport {
  std::vector<std::size_t> descending_epochs;
  std::vector<std::size_t> ascending_epochs;
  std::vector<double> descending_heights;
  std::vector<double> ascending_heights;
};

// Strict ladder epochs, starting at 0 and truncated at the end of the path.
LadderReport ladder_epochs(const WalkPath& path);

struct ProportionEstimate {
  double value = 0.0;
  double lower = 0.0;
  double upper = 1.0;
  std::size_t successes = 0;
  std::size_t trials = 0;
};

// Fraction of replicates with S_n > 0 and a Wilson interval at `level`.
// Replicate i uses Rng(seed, i).
ProportionEstimate estimate_rho(const IncrementSpec& spec, std::size_t n, std::size_t reps,
                                std::uint64_t seed, unsigned threads = 1, double level = 0.99);

struct PhiEstimate {
  double value = 0.0;
  bool diverges = false;  // increments are a.s. zero, the series is harmonic
  bool exact = false;
};

// Partial sum over j <= jmax of P(S_j = 0) / j. Exact for Rademacher
// increments, Monte Carlo over `reps` paths for other lattice laws, and 0 for
// non-lattice laws. Throws DomainError for jmax == 0.
PhiEstimate estimate_phi(const IncrementSpec& spec, std::size_t jmax, std::size_t reps = 10000,
                         std::uint64_t seed = 0);

}  // namespace rrt
