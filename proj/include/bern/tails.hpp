#pragma once

#include <cstdint>
#include <optional>

#include "bern/numerics.hpp"

namespace bern {

/// Kullback-Leibler divergence between Bernoulli(theta) and Bernoulli(x):
/// theta*ln(theta/x) + (1-theta)*ln((1-theta)/(1-x)), extended by
/// continuity at theta in {0,1}. Throws std::domain_error when the
/// divergence is infinite (x in {0,1} with theta != x).
double kl_divergence(double x, double theta);

/// Leading quadratic term (theta-x)^2 / (2 x (1-x)). Requires x in (0,1).
double kl_quadratic_approx(double x, double theta);

enum class TailSide { Upper, Lower };

/// One binomial tail query: P(S_n(x) >= threshold*n) for Upper,
/// P(S_n(x) <= threshold*n) for Lower. The bounds' validity regime
/// requires x <= threshold (Upper) resp. threshold <= x (Lower).
struct TailQuery {
  std::int64_t n = 1;
  double x = 0.5;
  double threshold = 0.5;
  TailSide side = TailSide::Upper;

  void validate() const;
};

struct TailBoundReport {
  TailQuery query;
  LogValue exact;
  LogValue chernoff;
  std::optional<LogValue> ferrante;
  bool ferrante_applicable = false;
  double kl_rate = 0.0;
};

LogValue exact_tail(const TailQuery& query);
LogValue chernoff_tail(const TailQuery& query);
std::optional<LogValue> ferrante_tail(const TailQuery& query);
TailBoundReport bound_report(const TailQuery& query);

}  // namespace bern
