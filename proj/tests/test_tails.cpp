#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "bern/tails.hpp"

using bern::TailQuery;
using bern::TailSide;

TEST_CASE("kl_divergence values") {
  CHECK(bern::kl_divergence(0.5, 0.5) == 0.0);
  // 0.5 ln 2 + 0.5 ln(2/3), frozen from 40-digit evaluation
  CHECK(bern::kl_divergence(0.25, 0.5) ==
        doctest::Approx(0.14384103622589045).epsilon(1e-13));
  // 0.25 ln(1/2) + 0.75 ln(3/2)
  CHECK(bern::kl_divergence(0.5, 0.25) ==
        doctest::Approx(0.13081203594113697).epsilon(1e-13));
  CHECK(bern::kl_divergence(0.3, 0.5) ==
        doctest::Approx(0.08717669357238887).epsilon(1e-13));
}

TEST_CASE("kl_divergence boundary extension and errors") {
  CHECK(bern::kl_divergence(0.3, 0.0) == doctest::Approx(-std::log1p(-0.3)));
  CHECK(bern::kl_divergence(0.3, 1.0) == doctest::Approx(-std::log(0.3)));
  CHECK(bern::kl_divergence(0.0, 0.0) == 0.0);
  CHECK(bern::kl_divergence(1.0, 1.0) == 0.0);
  CHECK_THROWS_AS(bern::kl_divergence(0.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(bern::kl_divergence(1.0, 0.5), std::domain_error);
}

TEST_CASE("kl symmetry and positivity on a grid") {
  for (int xi = 1; xi < 40; ++xi) {
    for (int ti = 1; ti < 40; ++ti) {
      const double x = xi / 40.0;
      const double theta = ti / 40.0;
      CHECK(std::abs(bern::kl_divergence(x, theta) -
                     bern::kl_divergence(1.0 - x, 1.0 - theta)) < 1e-14);
      if (theta != x)
        CHECK(bern::kl_divergence(x, theta) > 0.0);
      else
        CHECK(bern::kl_divergence(x, theta) == 0.0);
    }
  }
}

TEST_CASE("kl_quadratic_approx") {
  CHECK(bern::kl_quadratic_approx(0.5, 0.5) == 0.0);
  CHECK(bern::kl_quadratic_approx(0.5, 0.6) == doctest::Approx(0.02));
  CHECK_THROWS_AS(bern::kl_quadratic_approx(0.0, 0.5), std::domain_error);
  // ratio -> 1 as theta -> x
  double prev_gap = 1e9;
  for (double h : {0.1, 0.01, 0.001}) {
    const double ratio = bern::kl_divergence(0.5, 0.5 + h) /
                         bern::kl_quadratic_approx(0.5, 0.5 + h);
    CHECK(std::abs(ratio - 1.0) < prev_gap);
    prev_gap = std::abs(ratio - 1.0);
    if (h == 0.01) CHECK(std::abs(ratio - 1.0) < 0.01);
  }
}

namespace {

// Brute-force tail by enumerating all 2^n Bernoulli strings.
double enumerate_tail(int n, double x, double threshold, TailSide side) {
  double total = 0.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    const int ones = __builtin_popcount(mask);
    const double frac = static_cast<double>(ones) / n;
    const bool in_event = side == TailSide::Upper ? frac >= threshold - 1e-12
                                                  : frac <= threshold + 1e-12;
    if (!in_event) continue;
    double p = 1.0;
    for (int i = 0; i < n; ++i) p *= (mask >> i) & 1 ? x : 1.0 - x;
    total += p;
  }
  return total;
}

}  // namespace

TEST_CASE("exact_tail small cases against enumeration") {
  CHECK(bern::exact_tail({4, 0.5, 0.75, TailSide::Upper}).to_real() ==
        doctest::Approx(5.0 / 16.0).epsilon(1e-14));
  CHECK(bern::exact_tail({4, 0.5, 0.25, TailSide::Lower}).to_real() ==
        doctest::Approx(5.0 / 16.0).epsilon(1e-14));
  CHECK(enumerate_tail(4, 0.5, 0.75, TailSide::Upper) ==
        doctest::Approx(5.0 / 16.0));

  // Direct 6-term summation of Bin(10,0.3): 751341663/5000000000.
  CHECK(bern::exact_tail({10, 0.3, 0.5, TailSide::Upper}).to_real() ==
        doctest::Approx(0.1502683326).epsilon(1e-9));

  for (int n = 2; n <= 12; n += 5) {
    for (double x : {0.3, 0.5, 0.7}) {
      for (double th : {0.25, 0.5, 0.75}) {
        if (x <= th)
          CHECK(bern::exact_tail({n, x, th, TailSide::Upper}).to_real() ==
                doctest::Approx(enumerate_tail(n, x, th, TailSide::Upper))
                    .epsilon(1e-12));
        if (th <= x)
          CHECK(bern::exact_tail({n, x, th, TailSide::Lower}).to_real() ==
                doctest::Approx(enumerate_tail(n, x, th, TailSide::Lower))
                    .epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("exact_tail reflection uses the same summands") {
  for (std::int64_t n : {7, 20, 33}) {
    for (double x : {0.55, 0.7, 0.9}) {
      for (double a : {0.2, 0.35, 0.5}) {
        const bern::LogValue lower =
            bern::exact_tail({n, x, a, TailSide::Lower});
        const bern::LogValue upper =
            bern::exact_tail({n, 1.0 - x, 1.0 - a, TailSide::Upper});
        CHECK(lower.sign == upper.sign);
        CHECK(lower.log_mag ==
              doctest::Approx(upper.log_mag).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("chernoff_tail") {
  const bern::LogValue upper = bern::chernoff_tail({10, 0.3, 0.5, TailSide::Upper});
  CHECK(upper.to_real() == doctest::Approx(0.4182119424).epsilon(1e-9));
  const bern::LogValue lower = bern::chernoff_tail({10, 0.7, 0.5, TailSide::Lower});
  CHECK(lower.to_real() == doctest::Approx(0.4182119424).epsilon(1e-9));
  // threshold = x: vacuous bound 1
  CHECK(bern::chernoff_tail({10, 0.5, 0.5, TailSide::Upper}).log_mag == 0.0);
  CHECK_THROWS_AS(bern::chernoff_tail({10, 0.6, 0.5, TailSide::Upper}),
                  std::invalid_argument);
}

TEST_CASE("ferrante_tail") {
  const auto bound = bern::ferrante_tail({100, 0.3, 0.5, TailSide::Upper});
  REQUIRE(bound.has_value());
  CHECK(bound->to_real() ==
        doctest::Approx(2.2852957568218177e-05).epsilon(1e-11));

  CHECK_FALSE(bern::ferrante_tail({1, 0.3, 0.5, TailSide::Upper}).has_value());
  // bn = 99.5 > n-1 = 99
  CHECK_FALSE(
      bern::ferrante_tail({100, 0.3, 0.995, TailSide::Upper}).has_value());

  // Lower bound via reflection matches the reflected Upper bound
  // bitwise (note 1 - 0.7 is one ulp above 0.3).
  const auto low = bern::ferrante_tail({100, 0.7, 0.5, TailSide::Lower});
  REQUIRE(low.has_value());
  const auto reflected =
      bern::ferrante_tail({100, 1.0 - 0.7, 1.0 - 0.5, TailSide::Upper});
  REQUIRE(reflected.has_value());
  CHECK(low->log_mag == reflected->log_mag);
  CHECK(low->log_mag == doctest::Approx(bound->log_mag).epsilon(1e-12));
}

TEST_CASE("bound_report composition and ordering") {
  const auto report = bern::bound_report({10, 0.3, 0.5, TailSide::Upper});
  CHECK(report.exact.to_real() == doctest::Approx(0.1502683326).epsilon(1e-9));
  CHECK(report.chernoff.to_real() == doctest::Approx(0.4182119424).epsilon(1e-9));
  CHECK(report.ferrante_applicable);
  CHECK(report.kl_rate == doctest::Approx(0.08717669357238887).epsilon(1e-13));
  CHECK(report.exact.less_equal(report.chernoff));

  const auto small = bern::bound_report({4, 0.5, 0.75, TailSide::Upper});
  CHECK(small.exact.to_real() == doctest::Approx(0.3125).epsilon(1e-13));
  CHECK(small.chernoff.to_real() ==
        doctest::Approx(std::exp(-4 * 0.13081203594113697)).epsilon(1e-12));

  CHECK_FALSE(bern::bound_report({1, 0.3, 0.5, TailSide::Upper})
                  .ferrante_applicable);
}

TEST_CASE("validity sweep at reduced scale") {
  for (std::int64_t n : {3, 10, 37, 60}) {
    for (int xi = 1; xi <= 19; ++xi) {
      const double x = 0.05 * xi;
      for (int ti = 1; ti <= 19; ++ti) {
        const double th = 0.05 * ti;
        if (x <= th) {
          const auto r = bern::bound_report({n, x, th, TailSide::Upper});
          CHECK(r.exact.less_equal(r.chernoff));
          if (r.ferrante) CHECK(r.exact.less_equal(*r.ferrante));
        }
        if (th <= x) {
          const auto r = bern::bound_report({n, x, th, TailSide::Lower});
          CHECK(r.exact.less_equal(r.chernoff));
          if (r.ferrante) CHECK(r.exact.less_equal(*r.ferrante));
        }
      }
    }
  }
}

TEST_CASE("ferrante sharpness trend at x=0.3, b=0.5") {
  double prev = 0.0;
  for (std::int64_t n : {100, 400, 1600, 6400}) {
    const TailQuery q{n, 0.3, 0.5, TailSide::Upper};
    const double ratio =
        std::exp(bern::exact_tail(q).log_mag - bern::ferrante_tail(q)->log_mag);
    CHECK(ratio >= prev);
    CHECK(ratio <= 1.0);
    prev = ratio;
  }
  CHECK(prev > 0.9);
}
