#include "rrt/treegrow.hpp"

#include <bit>
#include <cmath>
#include <ostream>

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

}  // namespace

void validate(const EdgeLenSpec& lens) {
  std::visit(Overloaded{
                 [](const UnitLength&) {},
                 [](const DeterministicLength& d) {
                   if (!(d.c >= 0.0 && std::isfinite(d.c))) throw ConfigError("deterministic edge length must be >= 0");
                 },
                 [](const ExponentialLength& e) {
                   if (!(e.mean > 0.0 && std::isfinite(e.mean))) throw ConfigError("exponential edge lengths need mean > 0");
                 },
                 [](const CustomLength& c) {
                   if (!c.sample) throw ConfigError("custom edge lengths need a sampler");
                   if (!(c.mean >= 0.0 && std::isfinite(c.mean))) throw ConfigError("custom edge lengths need a finite mean");
                 },
             },
             lens);
}

double edge_mean(const EdgeLenSpec& lens) {
  return std::visit(Overloaded{
                        [](const UnitLength&) { return 1.0; },
                        [](const DeterministicLength& d) { return d.c; },
                        [](const ExponentialLength& e) { return e.mean; },
                        [](const CustomLength& c) { return c.mean; },
                    },
                    lens);
}

double sample_edge(const EdgeLenSpec& lens, Rng& rng) {
  return std::visit(Overloaded{
                        [](const UnitLength&) { return 1.0; },
                        [](const DeterministicLength& d) { return d.c; },
                        [&](const ExponentialLength& e) { return rng.exponential(e.mean); },
                        [&](const CustomLength& c) {
                          const double y = c.sample(rng);
                          if (!(y >= 0.0)) throw ConfigError("custom edge sampler returned a negative length");
                          return y;
                        },
                    },
                    lens);
}

bool is_unit(const EdgeLenSpec& lens) { return std::holds_alternative<UnitLength>(lens); }

PrefixSampler::PrefixSampler(std::size_t capacity) : tree_(capacity + 1, 0.0) {
  logw_.reserve(capacity);
  top_bit_ = std::bit_floor(std::max<std::size_t>(capacity, 1));
}

void PrefixSampler::add(std::size_t index, double value) {
  for (std::size_t i = index + 1; i < tree_.size(); i += i & (~i + 1)) tree_[i] += value;
}

void PrefixSampler::refill() {
  std::fill(tree_.begin(), tree_.end(), 0.0);
  // Linear-time Fenwick construction.
  for (std::size_t i = 1; i <= logw_.size(); ++i) {
    tree_[i] += std::exp(logw_[i - 1] - offset_);
    const std::size_t parent = i + (i & (~i + 1));
    if (parent < tree_.size()) tree_[parent] += tree_[i];
  }
}

void PrefixSampler::rebuild(double new_offset) {
  offset_ = new_offset;
  ++rebuilds_;
  refill();
}

void PrefixSampler::push_back(double log_weight) {
  if (logw_.empty()) offset_ = log_weight;
  logw_.push_back(log_weight);
  const bool out_of_range = log_weight - offset_ > kMaxLogRange;
  if (logw_.size() >= tree_.size()) {
    tree_.resize(2 * tree_.size());
    top_bit_ = std::bit_floor(tree_.size() - 1);
    if (out_of_range) rebuild(log_weight);
    else refill();
    return;
  }
  if (out_of_range) {
    rebuild(log_weight);
    return;
  }
  add(logw_.size() - 1, std::exp(log_weight - offset_));
}

double PrefixSampler::total() const {
  double sum = 0.0;
  for (std::size_t i = logw_.size(); i > 0; i -= i & (~i + 1)) sum += tree_[i];
  return sum;
}

std::size_t PrefixSampler::sample(double u) const {
  if (logw_.empty()) throw DomainError("cannot sample from an empty PrefixSampler");
  double target = u * total();
  std::size_t pos = 0;
  for (std::size_t step = top_bit_; step > 0; step >>= 1) {
    const std::size_t next = pos + step;
    if (next <= logw_.size() && tree_[next] <= target) {
      pos = next;
      target -= tree_[next];
    }
  }
  return std::min(pos, logw_.size() - 1);
}

TreeGrower::TreeGrower(const Environment& env, EdgeLenSpec lens) : env_(&env), lens_(std::move(lens)) {
  validate(lens_);
}

RecursiveTree TreeGrower::grow(std::size_t n, Rng& rng) {
  if (n > env_->size()) throw DomainError("environment does not cover n");
  RecursiveTree tree;
  tree.parent.assign(n + 1, kNoParent);
  tree.edge_len.assign(n + 1, 0.0);
  PrefixSampler sampler(std::max<std::size_t>(n, 1));
  sampler.push_back(env_->log_weight(0));
  for (std::size_t k = 1; k <= n; ++k) {
    tree.parent[k] = sampler.sample(rng.uniform());
    tree.edge_len[k] = sample_edge(lens_, rng);
    if (k < n) sampler.push_back(env_->log_weight(k));
  }
  rebuilds_ = sampler.rebuild_count();
  return tree;
}

RecursiveTree grow(const Environment& env, const EdgeLenSpec& lens, std::size_t n, Rng& rng) {
  TreeGrower grower(env, lens);
  return grower.grow(n, rng);
}

TreeStats tree_stats(const RecursiveTree& tree) {
  const std::size_t n = tree.size();
  TreeStats stats;
  stats.depths.assign(n + 1, 0.0);
  stats.outdegrees.assign(n + 1, 0);
  for (std::size_t k = 1; k <= n; ++k) {
    const std::size_t p = tree.parent[k];
    if (p >= k) throw DomainError("not a recursive tree: parent label must be smaller than child label");
    stats.depths[k] = stats.depths[p] + tree.edge_len[k];
    ++stats.outdegrees[p];
  }
  return stats;
}

double depth_sample_fast(const Environment& env, const EdgeLenSpec& lens, std::size_t n, Rng& rng) {
  if (n > env.size()) throw DomainError("environment does not cover n");
  validate(lens);
  if (n == 0) return 0.0;
  double depth = sample_edge(lens, rng);  // Y(n)
  for (std::size_t j = 1; j < n; ++j) {
    if (rng.uniform() < std::exp(env.log_weight(j) - env.log_prefix_mass(j))) depth += sample_edge(lens, rng);
  }
  return depth;
}

std::size_t outdeg_sample_fast(const Environment& env, std::size_t n, std::size_t j, Rng& rng) {
  if (j > n) throw DomainError("outdegree needs j <= n");
  if (n > env.size()) throw DomainError("environment does not cover n");
  std::size_t count = 0;
  const double lw = env.log_weight(j);
  for (std::size_t k = j + 1; k <= n; ++k)
    if (rng.uniform() < std::exp(lw - env.log_prefix_mass(k - 1))) ++count;
  return count;
}

void write_csv(std::ostream& out, const RecursiveTree& tree) {
  const auto stats = tree_stats(tree);
  out << "k,parent,edge_len,depth\n";
  for (std::size_t k = 0; k <= tree.size(); ++k) {
    out << k << ',';
    if (tree.parent[k] == kNoParent) out << "-1";
    else out << tree.parent[k];
    out << ',' << format_double(tree.edge_len[k]) << ',' << format_double(stats.depths[k]) << '\n';
  }
}

}  // namespace rrt
