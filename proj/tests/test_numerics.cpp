#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <random>
#include <vector>

#include "bern/numerics.hpp"

using bern::CompensatedSum;
using bern::LogValue;

TEST_CASE("log_binomial small cases") {
  CHECK(bern::log_binomial(1, 0) == 0.0);
  CHECK(bern::log_binomial(4, 2) == doctest::Approx(std::log(6.0)).epsilon(1e-14));
  // ln C(100,50), frozen from exact big-integer C(100,50) = 1.00891...e29
  CHECK(std::abs(bern::log_binomial(100, 50) - 66.783841652017426) < 1e-10);
  CHECK_THROWS_AS(bern::log_binomial(4, 5), std::domain_error);
  CHECK_THROWS_AS(bern::log_binomial(4, -1), std::domain_error);
}

TEST_CASE("log_binomial symmetry is exact as computed") {
  std::mt19937_64 rng(7);
  for (int it = 0; it < 200; ++it) {
    const std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 100000);
    const std::int64_t j = static_cast<std::int64_t>(rng() % (n + 1));
    CHECK(bern::log_binomial(n, j) == bern::log_binomial(n, n - j));
  }
}

TEST_CASE("log_binomial across the table boundary") {
  // Pascal identity in linear space around n = 2048.
  for (std::int64_t n : {2047, 2048, 2049, 2050}) {
    for (std::int64_t j : {std::int64_t{1}, std::int64_t{100}, std::int64_t{1000}, n / 2}) {
      const double lhs = bern::log_binomial(n, j);
      const double a = bern::log_binomial(n - 1, j - 1);
      const double b = bern::log_binomial(n - 1, j);
      const double rhs = b + std::log1p(std::exp(a - b));
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("log_binomial_pmf examples and degenerate laws") {
  const LogValue half = bern::log_binomial_pmf(2, 1, 0.5);
  CHECK(half.sign == 1);
  CHECK(half.log_mag == doctest::Approx(std::log(0.5)).epsilon(1e-14));

  const LogValue at_zero = bern::log_binomial_pmf(10, 0, 0.0);
  CHECK(at_zero.sign == 1);
  CHECK(at_zero.log_mag == 0.0);
  CHECK(bern::log_binomial_pmf(10, 3, 0.0).sign == 0);
  CHECK(bern::log_binomial_pmf(10, 10, 1.0).log_mag == 0.0);
  CHECK(bern::log_binomial_pmf(10, 9, 1.0).sign == 0);

  // Enumerating all 16 Bernoulli strings: P(S_4 = 3) = 4/16 = 0.25.
  const LogValue q = bern::log_binomial_pmf(4, 3, 0.5);
  CHECK(q.to_real() == doctest::Approx(0.25).epsilon(1e-14));

  CHECK_THROWS_AS(bern::log_binomial_pmf(4, 2, 1.5), std::domain_error);
  CHECK_THROWS_AS(bern::log_binomial_pmf(4, 5, 0.5), std::domain_error);
}

TEST_CASE("pmf normalization for n <= 30") {
  for (std::int64_t n = 1; n <= 30; ++n) {
    for (int xi = 1; xi <= 9; ++xi) {
      const double x = 0.1 * xi;
      CompensatedSum acc;
      for (std::int64_t j = 0; j <= n; ++j)
        acc.add(bern::log_binomial_pmf(n, j, x).to_real());
      CHECK(std::abs(acc.result() - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("LogValue round trip") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mag(-600.0, 600.0);
  for (int it = 0; it < 500; ++it) {
    const double v = (rng() % 2 ? 1.0 : -1.0) * std::exp(mag(rng));
    const LogValue lv = LogValue::from_real(v);
    const LogValue round = LogValue::from_real(lv.to_real());
    CHECK(round.sign == lv.sign);
    CHECK(std::abs(round.log_mag - lv.log_mag) <=
          1e-13 * std::max(1.0, std::abs(lv.log_mag)));
  }
  CHECK(LogValue::from_real(0.0).sign == 0);
  CHECK(std::isinf(LogValue::from_real(0.0).log_mag));
}

TEST_CASE("log_sum_exp_signed examples") {
  CHECK(bern::log_sum_exp_signed(std::vector<LogValue>{}).value.sign == 0);

  const std::vector<LogValue> cancel{{+1, std::log(2.0)}, {-1, std::log(2.0)}};
  const auto cancelled = bern::log_sum_exp_signed(cancel);
  CHECK(cancelled.value.sign == 0);
  CHECK(cancelled.cancellation);

  const std::vector<LogValue> tiny{{+1, -1000.0}, {+1, -1000.0}};
  const auto doubled = bern::log_sum_exp_signed(tiny);
  CHECK(doubled.value.sign == 1);
  CHECK(doubled.value.log_mag ==
        doctest::Approx(-1000.0 + std::log(2.0)).epsilon(1e-14));
  CHECK_FALSE(doubled.cancellation);
}

TEST_CASE("log_sum_exp_signed permutation robustness") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> mag(-40.0, 0.0);
  std::vector<LogValue> terms;
  for (int i = 0; i < 64; ++i)
    terms.push_back({rng() % 4 ? +1 : -1, mag(rng)});
  const auto base = bern::log_sum_exp_signed(terms);
  REQUIRE(base.value.sign != 0);
  for (int it = 0; it < 50; ++it) {
    std::shuffle(terms.begin(), terms.end(), rng);
    const auto shuffled = bern::log_sum_exp_signed(terms);
    CHECK(shuffled.value.sign == base.value.sign);
    CHECK(std::abs(shuffled.value.log_mag - base.value.log_mag) <=
          1e-12 * std::max(1.0, std::abs(base.value.log_mag)));
  }
}

TEST_CASE("log_sum_exp_signed accuracy against plain sums") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> val(0.1, 3.0);
  for (int it = 0; it < 100; ++it) {
    std::vector<LogValue> terms;
    long double exact = 0.0L;
    for (int i = 0; i < 20; ++i) {
      const double v = val(rng);
      exact += v;
      terms.push_back(LogValue::from_real(v));
    }
    const auto sum = bern::log_sum_exp_signed(terms);
    CHECK(sum.value.to_real() ==
          doctest::Approx(static_cast<double>(exact)).epsilon(20 * 1e-15));
  }
}

TEST_CASE("compensated_sum examples") {
  const std::vector<double> a{1.0, 1e-16, -1.0};
  CHECK(bern::compensated_sum(a) == 1e-16);

  const std::vector<double> tenths(10, 0.1);
  // Exact rational oracle: 10 * rational(double 0.1) rounds to exactly 1.0.
  CHECK(bern::compensated_sum(tenths) == 1.0);

  CHECK(bern::compensated_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("compensated_sum against long double oracle") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (int it = 0; it < 100; ++it) {
    std::vector<double> values;
    long double exact = 0.0L;
    for (int i = 0; i < 1000; ++i) {
      const double v = std::ldexp(val(rng), static_cast<int>(rng() % 40));
      values.push_back(v);
      exact += v;
    }
    const double got = bern::compensated_sum(values);
    const double want = static_cast<double>(exact);
    CHECK(std::abs(got - want) <= 4 * std::abs(want) * 1e-16 + 1e-300);
  }
}
