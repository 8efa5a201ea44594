#include <cmath>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "rrt/env.hpp"
#include "rrt/error.hpp"

using rrt::Environment;

namespace {

std::vector<rrt::EnvModel> all_models(std::size_t n, std::uint64_t seed) {
  rrt::Rng rng(seed);
  return {rrt::ConstantWeights{},
          rrt::PowerWeights{1.0},
          rrt::PowerWeights{2.0},
          rrt::PowerWeights{-2.0},
          rrt::StretchedExpWeights{0.5},
          rrt::StretchedExpWeights{1.0},
          rrt::ProductFormWeights{rrt::sample_path(rrt::Gaussian{1.0}, n, rng)},
          rrt::ProductFormWeights{rrt::sample_path(rrt::Stable{1.5, 1.0}, n, rng)},
          rrt::IidWeights{rrt::UniformWeightDist{0.0, 2.0}, seed},
          rrt::IidWeights{rrt::ExponentialWeightDist{3.0}, seed},
          rrt::IidWeights{rrt::DiscreteWeightDist{{0.5, 4.0}, {0.7, 0.3}}, seed}};
}

}  // namespace

TEST_SUITE("env") {
  TEST_CASE("constant weights") {
    const Environment env = rrt::build_environment(rrt::ConstantWeights{}, 3);
    for (std::size_t j = 0; j <= 3; ++j) CHECK(env.log_weight(j) == 0.0);
    for (std::size_t r = 0; r <= 3; ++r) CHECK(std::exp(env.log_prefix_mass(r)) == doctest::Approx(r + 1.0).epsilon(1e-14));
    for (std::size_t j = 0; j <= 3; ++j) CHECK(rrt::attach_prob(env, 3, j) == doctest::Approx(0.25).epsilon(1e-14));
  }

  TEST_CASE("product form from a two-point path") {
    const Environment env = rrt::build_environment(rrt::ProductFormWeights{rrt::WalkPath({0.0, std::log(2.0)})}, 1);
    CHECK(std::exp(env.log_weight(1)) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::exp(env.log_prefix_mass(1)) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(rrt::attach_prob(env, 1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(env.kind() == rrt::EnvKind::product_form);
  }

  TEST_CASE("power weights") {
    const Environment env = rrt::build_environment(rrt::PowerWeights{1.0}, 4);
    CHECK(std::exp(env.log_prefix_mass(4)) == doctest::Approx(11.0).epsilon(1e-14));
  }

  TEST_CASE("domain and configuration errors") {
    const Environment env = rrt::build_environment(rrt::ConstantWeights{}, 5);
    CHECK_THROWS_AS(rrt::attach_prob(env, 2, 3), rrt::DomainError);
    CHECK_THROWS_AS(rrt::attach_prob(env, 6, 1), rrt::DomainError);
    CHECK_THROWS_AS(rrt::build_environment(rrt::StretchedExpWeights{1.5}, 5), rrt::ConfigError);
    CHECK_THROWS_AS(rrt::build_environment(rrt::ProductFormWeights{rrt::WalkPath({0.0, 1.0})}, 5), rrt::DomainError);
    CHECK_THROWS_AS(rrt::build_environment(rrt::IidWeights{rrt::DiscreteWeightDist{{0.0, 1.0}, {0.5, 0.5}}, 1}, 50),
                    rrt::ConfigError);
    CHECK_THROWS_AS(rrt::build_environment(rrt::IidWeights{rrt::UniformWeightDist{-1.0, 1.0}, 1}, 50),
                    rrt::ConfigError);
    const std::vector<double> short_means(3, 1.0);
    CHECK_THROWS_AS(rrt::zeta(env, 5, 1.0, short_means), rrt::DomainError);
    CHECK_THROWS_AS(rrt::iid_weight_sanity(rrt::ConstantWeights{}, 5), rrt::ConfigError);
  }

  TEST_CASE("normalization and monotonicity for every model") {
    const std::size_t n = 2000;
    for (const auto& model : all_models(n, 21)) {
      const Environment env = rrt::build_environment(model, n);
      CHECK(env.log_weight(0) == 0.0);
      for (std::size_t r = 0; r <= n; r += (r < 50 ? 1 : 37)) {
        long double sum = 0.0L;
        for (std::size_t j = 0; j <= r; ++j) {
          const double p = rrt::attach_prob(env, r, j);
          REQUIRE(p >= 0.0);
          // Heavy-tailed walks give true probabilities below the double range.
          if (env.log_weight(j) - env.log_prefix_mass(r) > -700.0) REQUIRE(p > 0.0);
          REQUIRE(p <= 1.0);
          sum += p;
        }
        REQUIRE(std::abs(static_cast<double>(sum) - 1.0) <= 1e-12);
        if (r > 0) REQUIRE(env.log_prefix_mass(r) >= env.log_prefix_mass(r - 1));
      }
      // p_r(j) is nonincreasing in r.
      for (std::size_t j : {std::size_t{0}, std::size_t{7}, n / 2})
        for (std::size_t r = j + 1; r <= n; ++r) REQUIRE(rrt::attach_prob(env, r, j) <= rrt::attach_prob(env, r - 1, j));
    }
  }

  TEST_CASE("log prefix masses match an extended precision recomputation") {
    rrt::Rng rng(22);
    const std::size_t n = 5000;
    // Increments of scale 10 push |S| towards 10^3.
    const auto path = rrt::sample_path(rrt::Gaussian{10.0}, n, rng);
    const Environment env = rrt::build_environment(rrt::ProductFormWeights{path}, n);
    long double peak = 0.0L;
    for (std::size_t r = 0; r <= n; ++r) peak = std::max(peak, static_cast<long double>(-path[r]));
    long double acc = 0.0L;
    for (std::size_t r = 0; r <= n; ++r) {
      acc += std::exp(static_cast<long double>(-path[r]) - peak);
      const long double expected = peak + std::log(acc);
      REQUIRE(std::abs(static_cast<long double>(env.log_prefix_mass(r)) - expected) <=
              1e-10L * std::max(1.0L, std::abs(expected)));
    }
  }

  TEST_CASE("no overflow for log weights of size 1e5") {
    std::vector<double> s(1001);
    for (std::size_t k = 1; k <= 1000; ++k) s[k] = (k % 2 ? -1.0 : 1.0) * 100.0 * static_cast<double>(k);
    const Environment env = rrt::build_environment(rrt::ProductFormWeights{rrt::WalkPath(s)}, 1000);
    for (std::size_t r = 0; r <= 1000; ++r) REQUIRE(std::isfinite(env.log_prefix_mass(r)));
    CHECK(env.log_prefix_mass(999) == doctest::Approx(99900.0).epsilon(1e-12));
    const auto p = rrt::self_prob_seq(env, 1000);
    CHECK(p[998] == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("self probabilities") {
    const Environment env = rrt::build_environment(rrt::ConstantWeights{}, 10);
    const auto p = rrt::self_prob_seq(env, 10);
    REQUIRE(p.size() == 10);
    for (std::size_t j = 1; j <= 10; ++j) CHECK(p[j - 1] == doctest::Approx(1.0 / (j + 1.0)).epsilon(1e-14));
  }

  TEST_CASE("power weights with alpha = -2 have summable self probabilities") {
    const std::size_t n = 100000;
    const Environment env = rrt::build_environment(rrt::PowerWeights{-2.0}, n);
    const auto p = rrt::self_prob_seq(env, n);
    double head = 0.0, total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      total += p[j];
      if (j < n / 10) head = total;
    }
    // Tail beyond n/10 is about 10/(n (1 + zeta(2))).
    CHECK(total - head < 1e-4);
    CHECK(total < 1.0);
  }

  TEST_CASE("stretched exponential self probabilities grow like sqrt(n)") {
    const std::size_t n = 1000000;
    const Environment env = rrt::build_environment(rrt::StretchedExpWeights{0.5}, n);
    const auto p = rrt::self_prob_seq(env, n);
    const double ratio = std::accumulate(p.begin(), p.end(), 0.0) / std::sqrt(static_cast<double>(n));
    CHECK(ratio >= 0.9);
    CHECK(ratio <= 1.1);
  }

  TEST_CASE("zeta") {
    const std::size_t n = 100000;
    const Environment env = rrt::build_environment(rrt::ConstantWeights{}, n);
    // sum_{j=1}^n 1/(j+1) = H_{n+1} - 1.
    long double h = 0.0L;
    for (std::size_t k = 2; k <= n + 1; ++k) h += 1.0L / static_cast<long double>(k);
    CHECK(rrt::zeta(env, n, std::log(static_cast<double>(n))) ==
          doctest::Approx(static_cast<double>(h) / std::log(static_cast<double>(n))).epsilon(1e-12));
    CHECK(rrt::zeta(env, n, 1.0, 0.0) == 0.0);
    const std::vector<double> zeros(n, 0.0);
    CHECK(rrt::zeta(env, n, 1.0, zeros) == 0.0);
    const std::vector<double> twos(n, 2.0);
    CHECK(rrt::zeta(env, n, 1.0, twos) == doctest::Approx(2.0 * rrt::zeta(env, n, 1.0)).epsilon(1e-12));
  }

  TEST_CASE("product-form self probabilities and zeta") {
    rrt::Rng rng(23);
    const std::size_t n = 10000;
    const auto path = rrt::sample_path(rrt::Gaussian{1.0}, n, rng);
    const Environment env = rrt::build_environment(rrt::ProductFormWeights{path}, n);
    double low = 0.0;
    for (std::size_t k = 0; k <= n; ++k) low = std::min(low, path[k]);
    const auto p = rrt::self_prob_seq(env, n);
    for (std::size_t j = 1; j <= 300; ++j) {
      long double mass = 0.0L;
      for (std::size_t q = 0; q <= j; ++q) mass += std::exp(static_cast<long double>(path[j] - path[q]));
      REQUIRE(p[j - 1] == doctest::Approx(static_cast<double>(1.0L / mass)).epsilon(1e-12));
    }
    const double z = rrt::zeta(env, n, std::sqrt(static_cast<double>(n)));
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    CHECK(z > 0.0);
    CHECK(z == doctest::Approx(std::abs(low) / std::sqrt(static_cast<double>(n)) * (total / std::abs(low))));
  }

  TEST_CASE("scale invariance of the self probabilities") {
    rrt::Rng rng(24);
    const std::size_t n = 3000;
    const auto path = rrt::sample_path(rrt::Gaussian{1.0}, n, rng);
    std::vector<double> logw(n + 1), shifted(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
      logw[k] = -path[k];
      shifted[k] = -path[k] + 123.456;
    }
    const Environment a = Environment::from_log_weights(logw);
    const Environment b = Environment::from_log_weights(shifted);
    const auto pa = rrt::self_prob_seq(a, n);
    const auto pb = rrt::self_prob_seq(b, n);
    for (std::size_t j = 0; j < n; ++j) REQUIRE(pa[j] == doctest::Approx(pb[j]).epsilon(1e-12));
  }

  TEST_CASE("iid weight sanity") {
    CHECK(rrt::iid_weight_sanity(rrt::IidWeights{rrt::DiscreteWeightDist{{1.0}, {1.0}}, 1}, 1000) == 1.0);
    CHECK(rrt::iid_weight_sanity(rrt::IidWeights{rrt::UniformWeightDist{0.0, 2.0}, 25}, 1000000) ==
          doctest::Approx(1.0).epsilon(0.01));
    CHECK(rrt::iid_weight_sanity(rrt::IidWeights{rrt::ExponentialWeightDist{3.0}, 26}, 1000000) ==
          doctest::Approx(3.0).epsilon(0.02));
  }

  TEST_CASE("csv dump") {
    const Environment env = rrt::build_environment(rrt::PowerWeights{1.0}, 2);
    std::ostringstream out;
    rrt::write_csv(out, env);
    CHECK(out.str() ==
          "j,logw,log_prefix_mass\n"
          "0,0,0\n"
          "1,0,0.69314718055994529\n"
          "2,0.69314718055994529,1.3862943611198906\n");
  }
}
