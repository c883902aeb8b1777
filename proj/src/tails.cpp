#include "bern/tails.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace bern {

namespace {

constexpr double kPi = 3.14159265358979323846;

// threshold*n carries float noise on grids like 0.05*k; snap to the
// nearest integer when within a relative 1e-9 before taking ceil/floor.
double snapped(double y) {
  const double r = std::round(y);
  if (std::abs(y - r) <= 1e-9 * std::max(1.0, std::abs(y))) return r;
  return y;
}

std::int64_t ceil_index(double y) {
  return static_cast<std::int64_t>(std::ceil(snapped(y)));
}

std::int64_t floor_index(double y) {
  return static_cast<std::int64_t>(std::floor(snapped(y)));
}

}  // namespace

double kl_divergence(double x, double theta) {
  if (!(x >= 0.0 && x <= 1.0) || !(theta >= 0.0 && theta <= 1.0))
    throw std::domain_error("kl_divergence: arguments outside [0,1]");
  if (x == 0.0 || x == 1.0) {
    if (theta == x) return 0.0;
    throw std::domain_error("kl_divergence: infinite divergence at x in {0,1}");
  }
  if (theta == 0.0) return -std::log1p(-x);
  if (theta == 1.0) return -std::log(x);
  const double r = theta * std::log(theta / x) +
                   (1.0 - theta) * std::log((1.0 - theta) / (1.0 - x));
  return std::max(r, 0.0);
}

double kl_quadratic_approx(double x, double theta) {
  if (!(x > 0.0 && x < 1.0))
    throw std::domain_error("kl_quadratic_approx: x outside (0,1)");
  const double d = theta - x;
  return d * d / (2.0 * x * (1.0 - x));
}

void TailQuery::validate() const {
  if (n < 1) throw std::invalid_argument("TailQuery: n must be positive");
  if (!(x > 0.0 && x < 1.0))
    throw std::invalid_argument("TailQuery: x outside (0,1)");
  if (!(threshold > 0.0 && threshold < 1.0))
    throw std::invalid_argument("TailQuery: threshold outside (0,1)");
  if (side == TailSide::Upper && x > threshold)
    throw std::invalid_argument("TailQuery: Upper requires x <= threshold");
  if (side == TailSide::Lower && threshold > x)
    throw std::invalid_argument("TailQuery: Lower requires threshold <= x");
}

LogValue exact_tail(const TailQuery& query) {
  query.validate();
  std::int64_t lo, hi;
  if (query.side == TailSide::Upper) {
    lo = std::max<std::int64_t>(0, ceil_index(query.threshold * query.n));
    hi = query.n;
  } else {
    lo = 0;
    hi = std::min(query.n, floor_index(query.threshold * query.n));
  }
  std::vector<LogValue> terms;
  terms.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (std::int64_t j = lo; j <= hi; ++j)
    terms.push_back(log_binomial_pmf(query.n, j, query.x));
  return log_sum_exp_signed(terms).value;
}

LogValue chernoff_tail(const TailQuery& query) {
  query.validate();
  const double rate = query.side == TailSide::Upper
                          ? kl_divergence(query.x, query.threshold)
                          : kl_divergence(1.0 - query.x, 1.0 - query.threshold);
  return {+1, -static_cast<double>(query.n) * rate};
}

std::optional<LogValue> ferrante_tail(const TailQuery& query) {
  query.validate();
  if (query.side == TailSide::Lower) {
    TailQuery reflected{query.n, 1.0 - query.x, 1.0 - query.threshold,
                        TailSide::Upper};
    return ferrante_tail(reflected);
  }
  if (query.n < 2) return std::nullopt;
  if (!(query.x < query.threshold)) return std::nullopt;
  const double bn = snapped(query.threshold * static_cast<double>(query.n));
  if (!(bn >= 1.0 && bn <= static_cast<double>(query.n - 1)))
    return std::nullopt;
  const double beta =
      static_cast<double>(ceil_index(bn)) / static_cast<double>(query.n);
  const double rate = kl_divergence(query.x, query.threshold);
  const double n = static_cast<double>(query.n);
  const double log_prefactor =
      std::log(beta * (1.0 - query.x) / (beta - query.x)) -
      0.5 * std::log(2.0 * kPi * beta * (1.0 - beta) * n);
  return LogValue{+1, log_prefactor - n * rate};
}

TailBoundReport bound_report(const TailQuery& query) {
  TailBoundReport report;
  report.query = query;
  report.exact = exact_tail(query);
  report.chernoff = chernoff_tail(query);
  report.ferrante = ferrante_tail(query);
  report.ferrante_applicable = report.ferrante.has_value();
  report.kl_rate = query.side == TailSide::Upper
                       ? kl_divergence(query.x, query.threshold)
                       : kl_divergence(1.0 - query.x, 1.0 - query.threshold);
  if (!report.exact.less_equal(report.chernoff))
    throw std::logic_error("bound_report: exact tail exceeds Chernoff bound");
  if (report.ferrante && !report.exact.less_equal(*report.ferrante))
    throw std::logic_error("bound_report: exact tail exceeds Ferrante bound");
  return report;
}

}  // namespace bern
