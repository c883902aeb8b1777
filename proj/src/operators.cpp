#include "bern/operators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace bern {

namespace {

std::vector<double> pmf_weights(std::int64_t n, double x) {
  std::vector<double> w(static_cast<std::size_t>(n) + 1);
  for (std::int64_t j = 0; j <= n; ++j)
    w[static_cast<std::size_t>(j)] = log_binomial_pmf(n, j, x).to_real();
  return w;
}

void check_constant_on(const FunctionSpec& f, double c,
                       const Interval& exclusion) {
  const double tol = 1e-12 * std::max(1.0, std::abs(c));
  if (exclusion.is_point()) {
    if (std::abs(f.evaluate(exclusion.lo) - c) > tol)
      throw std::invalid_argument(
          "deviation: f differs from c at the exclusion point");
    return;
  }
  for (int i = 1; i <= 100; ++i) {
    const double t =
        exclusion.lo + (exclusion.hi - exclusion.lo) * i / 101.0;
    if (std::abs(f.evaluate(t) - c) > tol)
      throw std::invalid_argument(
          "deviation: f is not constant on the exclusion interval");
  }
}

double factorial(std::int64_t k) {
  double r = 1.0;
  for (std::int64_t i = 2; i <= k; ++i) r *= static_cast<double>(i);
  return r;
}

double binomial_coeff(std::int64_t n, std::int64_t j) {
  double r = 1.0;
  j = std::min(j, n - j);
  for (std::int64_t i = 1; i <= j; ++i)
    r = r * static_cast<double>(n - j + i) / static_cast<double>(i);
  return r;
}

// 7-point Gauss-Legendre on [-1,1].
constexpr double kGlNode[7] = {0.0,
                               -0.4058451513773972,
                               0.4058451513773972,
                               -0.7415311855993945,
                               0.7415311855993945,
                               -0.9491079123427585,
                               0.9491079123427585};
constexpr double kGlWeight[7] = {0.4179591836734694, 0.3818300505051189,
                                 0.3818300505051189, 0.2797053914892766,
                                 0.2797053914892766, 0.1294849661688697,
                                 0.1294849661688697};

template <typename F>
double gauss7(const F& fn, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 7; ++i) s += kGlWeight[i] * fn(mid + half * kGlNode[i]);
  return s * half;
}

template <typename F>
double adaptive_gl(const F& fn, double a, double b, double tol, int depth) {
  const double whole = gauss7(fn, a, b);
  const double mid = 0.5 * (a + b);
  const double left = gauss7(fn, a, mid);
  const double right = gauss7(fn, mid, b);
  if (std::abs(left + right - whole) <= tol || depth >= 40)
    return left + right;
  return adaptive_gl(fn, a, mid, 0.5 * tol, depth + 1) +
         adaptive_gl(fn, mid, b, 0.5 * tol, depth + 1);
}

bool piecewise_constant(const FunctionSpec& f) {
  return std::all_of(f.pieces.begin(), f.pieces.end(),
                     [](const Piece& p) { return expr_is_constant(*p.expr); });
}

// E[g((j + W_k)/n)] for Irwin-Hall W_k, with g(t) = f(t) - c.
double irwin_hall_expectation(const FunctionSpec& f, double c, std::int64_t j,
                              std::int64_t n, std::int64_t k) {
  const double nd = static_cast<double>(n);
  if (piecewise_constant(f)) {
    CompensatedSum acc;
    for (const auto& p : f.pieces) {
      if (p.interval.is_point()) continue;  // null mass under a continuous law
      const double v = eval_expr(*p.expr, p.interval.lo) - c;
      if (v == 0.0) continue;
      const double wlo = p.interval.lo * nd - static_cast<double>(j);
      const double whi = p.interval.hi * nd - static_cast<double>(j);
      acc.add(v * (irwin_hall_cdf(k, whi) - irwin_hall_cdf(k, wlo)));
    }
    return acc.result();
  }
  // Split at the pdf's integer knots and at f's piece boundaries mapped
  // through u -> (j+u)/n, then integrate each smooth sub-piece.
  std::vector<double> cuts{0.0, static_cast<double>(k)};
  for (std::int64_t i = 1; i < k; ++i) cuts.push_back(static_cast<double>(i));
  for (const auto& p : f.pieces) {
    for (double boundary : {p.interval.lo, p.interval.hi}) {
      const double u = boundary * nd - static_cast<double>(j);
      if (u > 0.0 && u < static_cast<double>(k)) cuts.push_back(u);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  CompensatedSum acc;
  auto integrand = [&](double u) {
    return (f.evaluate(std::clamp((static_cast<double>(j) + u) / nd, 0.0, 1.0)) - c) *
           irwin_hall_pdf(k, u);
  };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    acc.add(adaptive_gl(integrand, cuts[i], cuts[i + 1], 1e-12, 0));
  return acc.result();
}

std::vector<double> sample_custom_law(const PerturbationSpec& w,
                                      std::int64_t k) {
  if (!w.cdf) throw std::invalid_argument("Custom law requires a cdf");
  std::mt19937_64 rng(w.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> samples(w.mc_samples);
  const double kd = static_cast<double>(k);
  for (auto& s : samples) {
    const double u = unif(rng);
    // Bisection inversion of the monotone CDF on [0,k].
    double lo = 0.0, hi = kd;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (w.cdf(mid) < u ? lo : hi) = mid;
    }
    s = 0.5 * (lo + hi);
  }
  return samples;
}

}  // namespace

void OperatorParams::validate() const {
  if (n < 1) throw std::invalid_argument("OperatorParams: n must be positive");
  if (k < 0) throw std::invalid_argument("OperatorParams: k must be >= 0");
  if (k > 0 && k >= n)
    throw std::invalid_argument("OperatorParams: k must be < n");
  if (!(x >= 0.0 && x <= 1.0))
    throw std::invalid_argument("OperatorParams: x outside [0,1]");
}

double bernstein_eval(const FunctionSpec& f, std::int64_t n, double x) {
  if (n < 1) throw std::invalid_argument("bernstein_eval: n must be positive");
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("bernstein_eval: x outside [0,1]");
  const std::vector<double> w = pmf_weights(n, x);
  CompensatedSum num, mass;
  for (std::int64_t j = 0; j <= n; ++j) {
    const double wj = w[static_cast<std::size_t>(j)];
    mass.add(wj);
    if (wj != 0.0)
      num.add(f.evaluate(static_cast<double>(j) / static_cast<double>(n)) * wj);
  }
  return num.result() / mass.result();
}

LogValue bernstein_deviation(const FunctionSpec& f, double c,
                             const Interval& exclusion, std::int64_t n,
                             double x) {
  if (n < 1)
    throw std::invalid_argument("bernstein_deviation: n must be positive");
  check_constant_on(f, c, exclusion);
  std::vector<LogValue> terms;
  terms.reserve(static_cast<std::size_t>(n) + 1);
  for (std::int64_t j = 0; j <= n; ++j) {
    const double tj = static_cast<double>(j) / static_cast<double>(n);
    if (exclusion.contains(tj)) continue;
    const LogValue g = c == 0.0 ? f.log_evaluate(tj)
                                : LogValue::from_real(f.evaluate(tj) - c);
    terms.push_back(g * log_binomial_pmf(n, j, x));
  }
  return log_sum_exp_signed(terms).value;
}

double central_moment(std::int64_t n, int j, double x) {
  if (n < 1) throw std::invalid_argument("central_moment: n must be positive");
  if (j < 0 || j > 60)
    throw std::invalid_argument("central_moment: order outside [0,60]");
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("central_moment: x outside [0,1]");
  const std::vector<double> w = pmf_weights(n, x);
  CompensatedSum num, mass;
  for (std::int64_t i = 0; i <= n; ++i) {
    const double wi = w[static_cast<std::size_t>(i)];
    mass.add(wi);
    if (wi != 0.0) {
      const double d = static_cast<double>(i) / static_cast<double>(n) - x;
      num.add(std::pow(d, j) * wi);
    }
  }
  return num.result() / mass.result();
}

double irwin_hall_cdf(std::int64_t k, double t) {
  if (k < 1) throw std::invalid_argument("irwin_hall_cdf: k must be >= 1");
  if (t <= 0.0) return 0.0;
  if (t >= static_cast<double>(k)) return 1.0;
  CompensatedSum acc;
  double sign = 1.0;
  const auto jmax = static_cast<std::int64_t>(std::floor(t));
  for (std::int64_t j = 0; j <= jmax; ++j) {
    acc.add(sign * binomial_coeff(k, j) *
            std::pow(t - static_cast<double>(j), static_cast<double>(k)));
    sign = -sign;
  }
  return std::clamp(acc.result() / factorial(k), 0.0, 1.0);
}

double irwin_hall_pdf(std::int64_t k, double t) {
  if (k < 1) throw std::invalid_argument("irwin_hall_pdf: k must be >= 1");
  if (t < 0.0 || t > static_cast<double>(k)) return 0.0;
  if (k == 1) return 1.0;
  CompensatedSum acc;
  double sign = 1.0;
  const auto jmax = static_cast<std::int64_t>(std::floor(t));
  for (std::int64_t j = 0; j <= jmax; ++j) {
    acc.add(sign * binomial_coeff(k, j) *
            std::pow(t - static_cast<double>(j), static_cast<double>(k - 1)));
    sign = -sign;
  }
  return std::max(acc.result() / factorial(k - 1), 0.0);
}

double kantorovich_eval(const FunctionSpec& f, const OperatorParams& params,
                        const PerturbationSpec& w) {
  params.validate();
  if (params.k == 0) return bernstein_eval(f, params.n, params.x);
  const std::int64_t m = params.n - params.k;
  const double nd = static_cast<double>(params.n);
  if (w.kind == PerturbationSpec::Kind::PointMass &&
      !(w.point >= 0.0 && w.point <= static_cast<double>(params.k)))
    throw std::invalid_argument("PointMass location outside [0,k]");

  std::vector<double> samples;
  if (w.kind == PerturbationSpec::Kind::Custom)
    samples = sample_custom_law(w, params.k);

  const std::vector<double> weights = pmf_weights(m, params.x);
  CompensatedSum num, mass;
  for (std::int64_t j = 0; j <= m; ++j) {
    const double wj = weights[static_cast<std::size_t>(j)];
    mass.add(wj);
    if (wj == 0.0) continue;
    double ej = 0.0;
    switch (w.kind) {
      case PerturbationSpec::Kind::PointMass:
        ej = f.evaluate((static_cast<double>(j) + w.point) / nd);
        break;
      case PerturbationSpec::Kind::IrwinHall:
        ej = irwin_hall_expectation(f, 0.0, j, params.n, params.k);
        break;
      case PerturbationSpec::Kind::Custom: {
        CompensatedSum acc;
        for (double s : samples)
          acc.add(f.evaluate(
              std::clamp((static_cast<double>(j) + s) / nd, 0.0, 1.0)));
        ej = acc.result() / static_cast<double>(samples.size());
        break;
      }
    }
    num.add(ej * wj);
  }
  return num.result() / mass.result();
}

LogValue kantorovich_deviation(const FunctionSpec& f, double c,
                               const Interval& exclusion,
                               const OperatorParams& params,
                               const PerturbationSpec& w) {
  params.validate();
  check_constant_on(f, c, exclusion);
  if (params.k == 0)
    return bernstein_deviation(f, c, exclusion, params.n, params.x);
  const std::int64_t m = params.n - params.k;
  const double nd = static_cast<double>(params.n);

  std::vector<double> samples;
  if (w.kind == PerturbationSpec::Kind::Custom)
    samples = sample_custom_law(w, params.k);

  std::vector<LogValue> terms;
  terms.reserve(static_cast<std::size_t>(m) + 1);
  for (std::int64_t j = 0; j <= m; ++j) {
    const double support_lo = static_cast<double>(j) / nd;
    const double support_hi = (static_cast<double>(j + params.k)) / nd;
    // Support of (j+W)/n fully inside the exclusion: the term is zero.
    if (support_lo > exclusion.lo && support_hi < exclusion.hi) continue;
    double ej = 0.0;
    switch (w.kind) {
      case PerturbationSpec::Kind::PointMass:
        ej = f.evaluate((static_cast<double>(j) + w.point) / nd) - c;
        break;
      case PerturbationSpec::Kind::IrwinHall:
        ej = irwin_hall_expectation(f, c, j, params.n, params.k);
        break;
      case PerturbationSpec::Kind::Custom: {
        CompensatedSum acc;
        for (double s : samples)
          acc.add(f.evaluate(std::clamp(
                      (static_cast<double>(j) + s) / nd, 0.0, 1.0)) -
                  c);
        ej = acc.result() / static_cast<double>(samples.size());
        break;
      }
    }
    if (ej == 0.0) continue;
    terms.push_back(LogValue::from_real(ej) * log_binomial_pmf(m, j, params.x));
  }
  return log_sum_exp_signed(terms).value;
}

}  // namespace bern
