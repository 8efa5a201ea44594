#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rrt/error.hpp"
#include "rrt/walk.hpp"

using rrt::WalkPath;

namespace {

WalkPath random_path(std::size_t n, std::uint64_t seed) {
  rrt::Rng rng(seed);
  return rrt::sample_path(rrt::Gaussian{1.0}, n, rng);
}

// Rounded increments produce many ties, which is what the leftmost rules need.
WalkPath tied_path(std::size_t n, std::uint64_t seed) {
  rrt::Rng rng(seed);
  std::vector<double> s{0.0};
  for (std::size_t k = 0; k < n; ++k) s.push_back(s.back() + std::round(2.0 * rng.normal()));
  return WalkPath(s);
}

double binomial_pmf(int n, int k) { return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) - n * std::log(2.0)); }

}  // namespace

TEST_SUITE("walk") {
  TEST_CASE("path construction") {
    CHECK_THROWS_AS(WalkPath(std::vector<double>{}), rrt::DomainError);
    CHECK_THROWS_AS(WalkPath(std::vector<double>{1.0, 2.0}), rrt::DomainError);
    rrt::Rng rng(1);
    const WalkPath empty = rrt::sample_path(rrt::Gaussian{}, 0, rng);
    CHECK(empty.steps() == 0);
    CHECK(empty[0] == 0.0);
  }

  TEST_CASE("rademacher support") {
    rrt::Rng rng(2);
    const WalkPath p = rrt::sample_path(rrt::Rademacher{}, 3, rng);
    REQUIRE(p.steps() == 3);
    for (std::size_t k = 1; k <= 3; ++k) CHECK(std::abs(p[k] - p[k - 1]) == 1.0);
  }

  TEST_CASE("gaussian increments have mean zero") {
    const std::size_t n = 100000;
    const WalkPath p = random_path(n, 3);
    CHECK(std::abs(p[n] / static_cast<double>(n)) < 4.0 / std::sqrt(static_cast<double>(n)));
  }

  TEST_CASE("invalid specs") {
    rrt::Rng rng(4);
    CHECK_THROWS_AS(rrt::sample_path(rrt::Gaussian{0.0}, 3, rng), rrt::ConfigError);
    CHECK_THROWS_AS(rrt::sample_path(rrt::Stable{2.0, 0.0}, 3, rng), rrt::ConfigError);
    CHECK_THROWS_AS(rrt::sample_path(rrt::Stable{1.5, 1.5}, 3, rng), rrt::ConfigError);
    CHECK_THROWS_AS(rrt::sample_path(rrt::LatticeWithAtom{-0.1}, 3, rng), rrt::ConfigError);
    CHECK_THROWS_AS(rrt::sample_path(rrt::CustomTable{{1.0, -1.0}, {0.5, 0.4}}, 3, rng), rrt::ConfigError);
  }

  TEST_CASE("custom table draws only its values") {
    rrt::Rng rng(5);
    const WalkPath p = rrt::sample_path(rrt::CustomTable{{2.0, -1.0}, {1.0 / 3.0, 2.0 / 3.0}}, 1000, rng);
    for (std::size_t k = 1; k <= 1000; ++k) {
      const double d = p[k] - p[k - 1];
      CHECK((d == 2.0 || d == -1.0));
    }
  }

  TEST_CASE("running min examples") {
    CHECK(rrt::running_min(WalkPath({0, -1, 1})) == std::vector<double>{0, -1, -1});
    CHECK(rrt::running_min(WalkPath({0, 1, 2})) == std::vector<double>{0, 0, 0});
  }

  TEST_CASE("running max examples") {
    const auto a = rrt::running_max_variants(WalkPath({0, -1, -2}));
    CHECK(a.max == std::vector<double>{0, 0, 0});
    CHECK(a.max_tilde == std::vector<double>{-1, -1});
    const auto b = rrt::running_max_variants(WalkPath({0, 2, 1}));
    CHECK(b.max == std::vector<double>{0, 2, 2});
    CHECK(b.max_tilde == std::vector<double>{2, 2});
    CHECK_THROWS_AS(rrt::running_max_excluding_origin(WalkPath({0})), rrt::DomainError);
  }

  TEST_CASE("argmin examples") {
    CHECK(rrt::argmin_leftmost(WalkPath({0, -1, -1, 0})) == 1);
    CHECK(rrt::argmin_leftmost(WalkPath({0, 1, 2})) == 0);
  }

  TEST_CASE("ladder epoch examples") {
    const auto r = rrt::ladder_epochs(WalkPath({0, -1, 1, -2}));
    CHECK(r.descending_epochs == std::vector<std::size_t>{0, 1, 3});
    CHECK(r.ascending_epochs == std::vector<std::size_t>{0, 2});
    CHECK(r.descending_heights == std::vector<double>{0, -1, -2});
    CHECK(r.ascending_heights == std::vector<double>{0, 1});
    CHECK(rrt::ladder_epochs(WalkPath({0, 1, 2, 3})).descending_epochs == std::vector<std::size_t>{0});
  }

  TEST_CASE("functionals agree with quadratic recomputation") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const WalkPath p = seed % 2 ? random_path(1 + 50 * seed, seed) : tied_path(1 + 50 * seed, seed);
      const std::size_t n = p.steps();
      const auto lo = rrt::running_min(p);
      const auto mx = rrt::running_max_variants(p);
      const auto am = rrt::running_argmin_leftmost(p);
      for (std::size_t k = 0; k <= n; ++k) {
        double naive_min = p[0], naive_max = p[0];
        std::size_t naive_arg = 0;
        for (std::size_t q = 0; q <= k; ++q) {
          naive_min = std::min(naive_min, p[q]);
          naive_max = std::max(naive_max, p[q]);
          if (p[q] < p[naive_arg]) naive_arg = q;
        }
        REQUIRE(lo[k] == naive_min);
        REQUIRE(mx.max[k] == naive_max);
        REQUIRE(am[k] == naive_arg);
        REQUIRE(lo[k] <= 0.0);
        REQUIRE(mx.max[k] >= 0.0);
        if (k >= 1) {
          double tilde = p[1];
          for (std::size_t q = 1; q <= k; ++q) tilde = std::max(tilde, p[q]);
          REQUIRE(mx.max_tilde[k - 1] == tilde);
        }
      }
      const std::size_t tau = rrt::argmin_leftmost(p);
      CHECK(tau == am[n]);
      CHECK(p[tau] == lo[n]);

      // Ladder epochs by the definition gamma_{j+1} = min{m > gamma_j : S_m < S_gamma_j}.
      const auto ladder = rrt::ladder_epochs(p);
      std::vector<std::size_t> desc{0}, asc{0};
      for (std::size_t m = 1; m <= n; ++m) {
        if (p[m] < p[desc.back()]) desc.push_back(m);
        if (p[m] > p[asc.back()]) asc.push_back(m);
      }
      CHECK(ladder.descending_epochs == desc);
      CHECK(ladder.ascending_epochs == asc);
      for (std::size_t q = 1; q < ladder.descending_heights.size(); ++q)
        CHECK(ladder.descending_heights[q] < ladder.descending_heights[q - 1]);
      for (std::size_t q = 1; q < ladder.ascending_heights.size(); ++q)
        CHECK(ladder.ascending_heights[q] > ladder.ascending_heights[q - 1]);
    }
  }

  TEST_CASE("rho for symmetric laws covers one half") {
    const auto g = rrt::estimate_rho(rrt::Gaussian{1.0}, 1000, 10000, 11, 1, 0.99);
    CHECK(g.lower <= 0.5);
    CHECK(g.upper >= 0.5);
    CHECK(g.trials == 10000);
  }

  TEST_CASE("rho for rademacher excludes the atom at zero") {
    // P(S_4 > 0) = P(S_4 = 2) + P(S_4 = 4) = (4 + 1) / 16.
    double exact = 0.0;
    for (int k = 0; k <= 4; ++k)
      if (2 * k - 4 > 0) exact += binomial_pmf(4, k);
    CHECK(exact == doctest::Approx(5.0 / 16.0));
    const auto r = rrt::estimate_rho(rrt::Rademacher{}, 4, 100000, 12, 1, 0.999);
    CHECK(r.lower <= exact);
    CHECK(r.upper >= exact);
    // Odd n has no atom, so the symmetric answer is exactly 1/2.
    const auto odd = rrt::estimate_rho(rrt::Rademacher{}, 1001, 10000, 13, 1, 0.99);
    CHECK(odd.lower <= 0.5);
    CHECK(odd.upper >= 0.5);
  }

  TEST_CASE("rho for a totally skewed stable law") {
    // Zolotarev: rho = 1/2 + arctan(beta tan(pi alpha / 2)) / (pi alpha) = 1/3 here. Used only as a
    // check of the sampler; the library never hard-codes it.
    const double expected = 0.5 + std::atan(std::tan(std::numbers::pi * 0.75)) / (std::numbers::pi * 1.5);
    const auto r = rrt::estimate_rho(rrt::Stable{1.5, 1.0}, 200, 20000, 14, 1, 0.999);
    CHECK(r.lower <= expected);
    CHECK(r.upper >= expected);
  }

  TEST_CASE("phi") {
    CHECK(rrt::estimate_phi(rrt::Gaussian{1.0}, 100).value == 0.0);
    CHECK_THROWS_AS(rrt::estimate_phi(rrt::Rademacher{}, 0), rrt::DomainError);
    const auto div = rrt::estimate_phi(rrt::LatticeWithAtom{1.0}, 100);
    CHECK(div.diverges);

    // Independent evaluation through log-gamma.
    long double oracle = 0.0L;
    for (int j = 2; j <= 10000; j += 2) oracle += binomial_pmf(j, j / 2) / j;
    const auto exact = rrt::estimate_phi(rrt::Rademacher{}, 10000);
    CHECK(exact.exact);
    CHECK(exact.value == doctest::Approx(static_cast<double>(oracle)).epsilon(1e-10));
    // The full series sums to ln 2.
    CHECK(std::abs(exact.value - std::numbers::ln2) < 0.01);

    // Monte Carlo lattice estimate against the exact rademacher sum (p0 = 0 is rademacher).
    const auto mc = rrt::estimate_phi(rrt::LatticeWithAtom{0.0}, 50, 20000, 15);
    const auto ref = rrt::estimate_phi(rrt::Rademacher{}, 50);
    CHECK_FALSE(mc.exact);
    CHECK(std::abs(mc.value - ref.value) < 0.01);
  }

  TEST_CASE("symmetry and lattice flags") {
    CHECK(rrt::is_lattice(rrt::Rademacher{}));
    CHECK(rrt::is_lattice(rrt::LatticeWithAtom{0.2}));
    CHECK_FALSE(rrt::is_lattice(rrt::Gaussian{}));
    CHECK(rrt::is_symmetric(rrt::Gaussian{}));
    CHECK(rrt::is_symmetric(rrt::Stable{1.5, 0.0}));
    CHECK_FALSE(rrt::is_symmetric(rrt::Stable{1.5, 1.0}));
  }
}
