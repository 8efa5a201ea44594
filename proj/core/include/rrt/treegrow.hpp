#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <variant>
#include <vector>

#include "rrt/env.hpp"
#include "rrt/rng.hpp"

namespace rrt {

struct UnitLength {};
struct DeterministicLength {
  double c = 1.0;
};
struct ExponentialLength {
  double mean = 1.0;
};
// User-supplied sampler; `mean` must be its finite expectation.
struct CustomLength {
  std::function<double(Rng&)> sample;
  double mean = 1.0;
};

using EdgeLenSpec = std::variant<UnitLength, DeterministicLength, ExponentialLength, CustomLength>;

void validate(const EdgeLenSpec& lens);
double edge_mean(const EdgeLenSpec& lens);
double sample_edge(const EdgeLenSpec& lens, Rng& rng);
bool is_unit(const EdgeLenSpec& lens);

inline constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();

/// Flat parent array: parent[k] < k for k >= 1, parent[0] == kNoParent.
struct RecursiveTree {
  std::vector<std::size_t> parent;
  std::vector<double> edge_len;  // edge_len[0] == 0

  std::size_t size() const { return parent.size() - 1; }
};

struct TreeStats {
  std::vector<double> depths;
  std::vector<std::size_t> outdegrees;
};

/// Dynamic weighted sampler over a growing list of log weights.
///
/// A Fenwick tree stores exp(logw - offset). The offset is the largest log
/// weight seen at the last rebuild; when a new weight would be stored above
/// e^300 the whole structure is rebuilt around it. Sampling returns the
/// smallest index whose cumulative mass exceeds u * total.
class PrefixSampler {
 public:
  explicit PrefixSampler(std::size_t capacity);

  void push_back(double log_weight);
  std::size_t sample(double u) const;
  double total() const;

  std::size_t size() const { return logw_.size(); }
  std::size_t rebuild_count() const { return rebuilds_; }
  double offset() const { return offset_; }

  static constexpr double kMaxLogRange = 300.0;

 private:
  void add(std::size_t index, double value);
  void refill();
  void rebuild(double new_offset);

  std::vector<double> tree_;  // 1-based Fenwick array
  std::vector<double> logw_;
  double offset_ = 0.0;
  std::size_t rebuilds_ = 0;
  std::size_t top_bit_ = 1;
};

/// Single-threaded growth engine; keeps the sampler diagnostics of its last run.
class TreeGrower {
 public:
  TreeGrower(const Environment& env, EdgeLenSpec lens);

  // Throws DomainError if the environment does not cover n.
  RecursiveTree grow(std::size_t n, Rng& rng);

  std::size_t rebuild_count() const { return rebuilds_; }

 private:
  const Environment* env_;
  EdgeLenSpec lens_;
  std::size_t rebuilds_ = 0;
};

RecursiveTree grow(const Environment& env, const EdgeLenSpec& lens, std::size_t n, Rng& rng);

TreeStats tree_stats(const RecursiveTree& tree);

// One draw of D_n as a sum of independent indicator-weighted edge lengths,
// with P(I_j = 1) = p_j(j). O(n), no tree is built.
double depth_sample_fast(const Environment& env, const EdgeLenSpec& lens, std::size_t n, Rng& rng);

// One draw of N_n(j) as a sum of independent Bernoulli(p_{k-1}(j)), k = j+1..n.
std::size_t outdeg_sample_fast(const Environment& env, std::size_t n, std::size_t j, Rng& rng);

// Columns k,parent,edge_len,depth; the root's parent is written as -1.
void write_csv(std::ostream& out, const RecursiveTree& tree);

}  // namespace rrt
