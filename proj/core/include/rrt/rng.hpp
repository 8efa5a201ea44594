#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace rrt {

std::uint64_t splitmix64(std::uint64_t x);

// Mixes a tag into a seed so that sub-experiments get unrelated key spaces.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

// One Philox4x32-10 block: 128-bit counter, 64-bit key.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based random stream.
///
/// The key is derived from the experiment seed and the upper half of the
/// counter holds the stream index, so every (seed, stream) pair is an
/// independent sequence and replicate i sees the same numbers no matter which
/// worker thread runs it. Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1]; safe to take the log of.
  double uniform_pos();
  double normal();
  double exponential(double mean);
  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t stream() const { return stream_; }

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int next_word_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rrt
