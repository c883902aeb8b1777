#include "bern/numerics.hpp"

#include <algorithm>
#include <stdexcept>

namespace bern {

namespace {

constexpr std::int64_t kLogFactTableMax = 2048;

const std::vector<double>& log_factorial_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kLogFactTableMax + 1, 0.0);
    CompensatedSum acc;
    for (std::int64_t i = 1; i <= kLogFactTableMax; ++i) {
      acc.add(std::log(static_cast<double>(i)));
      t[static_cast<std::size_t>(i)] = acc.result();
    }
    return t;
  }();
  return table;
}

double log_factorial(std::int64_t m) {
  if (m <= kLogFactTableMax)
    return log_factorial_table()[static_cast<std::size_t>(m)];
  return std::lgamma(static_cast<double>(m) + 1.0);
}

}  // namespace

double log_binomial(std::int64_t n, std::int64_t j) {
  if (n < 1) throw std::domain_error("log_binomial: n must be positive");
  if (j < 0 || j > n)
    throw std::domain_error("log_binomial: j outside [0,n]");
  // Grouped so that (j, n-j) and (n-j, j) give bit-identical results.
  return log_factorial(n) - (log_factorial(j) + log_factorial(n - j));
}

LogValue log_binomial_pmf(std::int64_t n, std::int64_t j, double x) {
  if (n < 1) throw std::domain_error("log_binomial_pmf: n must be positive");
  if (j < 0 || j > n)
    throw std::domain_error("log_binomial_pmf: j outside [0,n]");
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("log_binomial_pmf: x outside [0,1]");
  if (x == 0.0) return j == 0 ? LogValue{+1, 0.0} : LogValue::zero();
  if (x == 1.0) return j == n ? LogValue{+1, 0.0} : LogValue::zero();

  double lm = log_binomial(n, j);
  if (x == 0.5) {
    // Single term keeps pmf(n,j,1/2) == pmf(n,n-j,1/2) bitwise.
    lm += static_cast<double>(n) * std::log(0.5);
  } else {
    if (j > 0) lm += static_cast<double>(j) * std::log(x);
    if (j < n) lm += static_cast<double>(n - j) * std::log1p(-x);
  }
  return {+1, lm};
}

SignedLogSum log_sum_exp_signed(std::span<const LogValue> terms) {
  double max_mag = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms)
    if (t.sign != 0 && t.log_mag > max_mag) max_mag = t.log_mag;
  if (!std::isfinite(max_mag)) return {LogValue::zero(), false};

  CompensatedSum acc;
  for (const auto& t : terms) {
    if (t.sign == 0) continue;
    acc.add(static_cast<double>(t.sign) * std::exp(t.log_mag - max_mag));
  }
  const double s = acc.result();
  const bool cancelled = std::abs(s) < 1e-12;
  if (s == 0.0) return {LogValue::zero(), cancelled};
  return {LogValue{s > 0.0 ? +1 : -1, max_mag + std::log(std::abs(s))},
          cancelled};
}

double compensated_sum(std::span<const double> values) {
  CompensatedSum acc;
  for (double v : values) acc.add(v);
  return acc.result();
}

}  // namespace bern
