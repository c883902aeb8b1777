#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace bern {

/// Signed log-space real: sign in {-1,0,+1} and the natural log of the
/// magnitude. Canonical zero is (0, -inf). Keeps quantities like
/// exp(-n*r) representable far below binary64 underflow.
struct LogValue {
  int sign = 0;
  double log_mag = -std::numeric_limits<double>::infinity();

  static LogValue zero() { return {}; }

  static LogValue from_real(double v) {
    if (v == 0.0) return zero();
    return {v > 0.0 ? +1 : -1, std::log(std::abs(v))};
  }

  double to_real() const {
    if (sign == 0) return 0.0;
    return static_cast<double>(sign) * std::exp(log_mag);
  }

  bool is_zero() const { return sign == 0; }

  LogValue abs() const { return {sign == 0 ? 0 : +1, log_mag}; }

  LogValue negate() const { return {-sign, log_mag}; }

  friend LogValue operator*(const LogValue& a, const LogValue& b) {
    if (a.sign == 0 || b.sign == 0) return zero();
    return {a.sign * b.sign, a.log_mag + b.log_mag};
  }

  friend bool operator==(const LogValue& a, const LogValue& b) {
    return a.sign == b.sign && (a.sign == 0 || a.log_mag == b.log_mag);
  }

  // Magnitude comparison; zero is smaller than everything nonzero.
  bool mag_less(const LogValue& other) const {
    if (sign == 0) return other.sign != 0;
    if (other.sign == 0) return false;
    return log_mag < other.log_mag;
  }

  // Signed comparison as reals.
  bool less_equal(const LogValue& other) const {
    if (sign != other.sign) return sign < other.sign;
    if (sign == 0) return true;
    return sign > 0 ? log_mag <= other.log_mag : log_mag >= other.log_mag;
  }
};

/// Result of a signed log-space sum. `cancellation` is set when the
/// computed sum is smaller than 1e-12 times the largest term magnitude,
/// in which case the value's sign may be 0.
struct SignedLogSum {
  LogValue value;
  bool cancellation = false;
};

SignedLogSum log_sum_exp_signed(std::span<const LogValue> terms);

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double result() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> values);

/// ln C(n,j). Cumulative log-factorial table for n <= 2048, lgamma beyond.
/// Absolute error <= 1e-10 for n <= 10^6.
double log_binomial(std::int64_t n, std::int64_t j);

/// ln of the binomial(n,x) pmf at j, as a nonnegative LogValue.
/// Degenerate laws at x in {0,1} handled explicitly.
LogValue log_binomial_pmf(std::int64_t n, std::int64_t j, double x);

}  // namespace bern
