#include "bern/experiments.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "bern/tails.hpp"

namespace bern {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

BoundCheck assemble_check(std::int64_t n, double x, const LogValue& deviation,
                          double sup_norm,
                          const std::vector<double>& neg_exponents) {
  BoundCheck check;
  check.n = n;
  check.x = x;
  check.error = deviation.abs();
  std::vector<LogValue> bound_terms;
  for (double e : neg_exponents) bound_terms.push_back(LogValue{+1, e});
  const LogValue tail_sum = log_sum_exp_signed(bound_terms).value;
  check.bound = LogValue::from_real(sup_norm) * tail_sum;
  check.holds = check.error.less_equal(check.bound);
  if (check.error.is_zero())
    check.slack = check.bound.is_zero() ? 0.0 : kInf;
  else if (check.bound.is_zero())
    check.slack = -kInf;
  else
    check.slack = check.bound.log_mag - check.error.log_mag;
  return check;
}

}  // namespace

BoundCheck locally_constant_check(const FunctionSpec& f, double c, double a,
                                  double b, std::int64_t n, double x) {
  if (!(a >= 0.0 && a < x && x < b && b <= 1.0))
    throw std::invalid_argument(
        "locally_constant_check: need 0 <= a < x < b <= 1");
  const Interval exclusion{a, b, false, false};
  const LogValue dev = bernstein_deviation(f, c, exclusion, n, x);
  const double sup = sup_norm_deviation(f, c).value;
  std::vector<double> exponents;
  if (a > 0.0) exponents.push_back(-static_cast<double>(n) * kl_divergence(x, a));
  if (b < 1.0) exponents.push_back(-static_cast<double>(n) * kl_divergence(x, b));
  return assemble_check(n, x, dev, sup, exponents);
}

BoundCheck kantorovich_check(const FunctionSpec& f, double c, double a,
                             double b, const OperatorParams& params,
                             const PerturbationSpec& w) {
  params.validate();
  if (!(a >= 0.0 && a < b && b <= 1.0))
    throw std::invalid_argument("kantorovich_check: need 0 <= a < b <= 1");
  const double nd = static_cast<double>(params.n);
  const double md = static_cast<double>(params.n - params.k);
  const double a_eff = nd * a / md;
  const double b_eff = b - static_cast<double>(params.k) / nd;
  if (!(a_eff < b_eff))
    throw std::invalid_argument(
        "kantorovich_check: interval (na/(n-k), b-k/n) is empty");
  if (!(params.x > a_eff && params.x < b_eff))
    throw std::invalid_argument(
        "kantorovich_check: x outside (na/(n-k), b-k/n)");
  const Interval exclusion{a, b, false, false};
  const LogValue dev = kantorovich_deviation(f, c, exclusion, params, w);
  const double sup = sup_norm_deviation(f, c).value;
  std::vector<double> exponents;
  if (a > 0.0) exponents.push_back(-md * kl_divergence(params.x, a_eff));
  if (b < 1.0) exponents.push_back(-md * kl_divergence(params.x, b_eff));
  return assemble_check(params.n, params.x, dev, sup, exponents);
}

DecayFit decay_fit(std::span<const BoundCheck> checks) {
  if (checks.size() < 4)
    throw std::invalid_argument("decay_fit: need at least 4 points");
  DecayFit fit;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    if (i > 0 && checks[i].n <= checks[i - 1].n)
      throw std::invalid_argument("decay_fit: n must be strictly increasing");
    if (checks[i].error.is_zero()) fit.degenerate = true;
    fit.n_grid.push_back(checks[i].n);
    fit.neg_log_errors.push_back(-checks[i].error.log_mag);
  }
  if (fit.degenerate) return fit;

  const std::size_t total = checks.size();
  const std::size_t start = total >= 8 ? total / 2 : 0;
  double sn = 0, sy = 0, snn = 0, sny = 0;
  const auto count = static_cast<double>(total - start);
  for (std::size_t i = start; i < total; ++i) {
    const auto ni = static_cast<double>(fit.n_grid[i]);
    const double yi = fit.neg_log_errors[i];
    sn += ni;
    sy += yi;
    snn += ni * ni;
    sny += ni * yi;
  }
  fit.slope = (count * sny - sn * sy) / (count * snn - sn * sn);
  fit.intercept = (sy - fit.slope * sn) / count;
  for (std::size_t i = start; i < total; ++i) {
    const double pred =
        fit.intercept + fit.slope * static_cast<double>(fit.n_grid[i]);
    fit.max_residual =
        std::max(fit.max_residual, std::abs(fit.neg_log_errors[i] - pred));
  }
  return fit;
}

std::vector<SharpnessRow> sharpness_run(std::int64_t k, std::int64_t m,
                                        double x,
                                        std::span<const std::int64_t> n_grid) {
  if (!(m >= 2 && k >= 1 && k <= m - 1))
    throw std::invalid_argument("sharpness_run: need 1 <= k <= m-1, m >= 2");
  const double b = static_cast<double>(k) / static_cast<double>(m);
  if (!(x > 0.0 && x < b))
    throw std::invalid_argument("sharpness_run: need x in (0, k/m)");
  std::vector<SharpnessRow> rows;
  for (std::int64_t n : n_grid) {
    SharpnessRow row;
    row.big_n = n * m;
    const std::int64_t atoms = n * k;
    const double nd = static_cast<double>(row.big_n);
    row.exact = LogValue{
        +1, log_binomial(row.big_n, atoms) +
                static_cast<double>(atoms) * std::log(x) +
                static_cast<double>(row.big_n - atoms) * std::log1p(-x)};
    row.asymptotic =
        LogValue{+1, -nd * kl_divergence(x, b) -
                         0.5 * std::log(2.0 * kPi * nd * b * (1.0 - b))};
    row.ratio = std::exp(row.exact.log_mag - row.asymptotic.log_mag);
    rows.push_back(row);
  }
  return rows;
}

BoundaryResult boundary_run(double s, std::span<const std::int64_t> n_grid) {
  if (!(s > 0.0)) throw std::invalid_argument("boundary_run: need s > 0");
  BoundaryResult result;
  // (1/2^{s+1}) E|Z|^s with E|Z|^s = 2^{s/2} Gamma((s+1)/2) / sqrt(pi).
  result.limit_constant = std::exp(std::lgamma((s + 1.0) / 2.0) +
                                   (s / 2.0) * std::log(2.0) -
                                   0.5 * std::log(kPi) -
                                   (s + 1.0) * std::log(2.0));
  for (std::int64_t n : n_grid) {
    BoundaryRow row;
    row.n = n;
    const double nd = static_cast<double>(n);
    CompensatedSum plus, absolute, mass;
    for (std::int64_t j = 0; j <= n; ++j) {
      const double w = log_binomial_pmf(n, j, 0.5).to_real();
      mass.add(w);
      const double d = static_cast<double>(j) / nd - 0.5;
      if (d > 0.0) plus.add(std::pow(d, s) * w);
      if (d != 0.0) absolute.add(std::pow(std::abs(d), s) * w);
    }
    const double z = mass.result();
    row.scaled = std::pow(nd, s / 2.0) * plus.result() / z;
    row.symmetry_gap = std::abs(plus.result() / z - 0.5 * absolute.result() / z);
    result.rows.push_back(row);
  }
  return result;
}

std::vector<HerzogHillRow> herzog_hill_run(
    double b, std::span<const std::int64_t> n_grid) {
  if (!(b > 0.0 && b < 1.0))
    throw std::invalid_argument("herzog_hill_run: need b in (0,1)");
  FunctionSpec indicator;
  {
    auto zero = std::make_unique<Expr>();
    zero->kind = ExprKind::Literal;
    zero->value = 0.0;
    auto one = std::make_unique<Expr>();
    one->kind = ExprKind::Literal;
    one->value = 1.0;
    indicator.pieces.push_back(Piece{Interval{0.0, b, true, false}, std::move(zero)});
    indicator.pieces.push_back(Piece{Interval{b, 1.0, true, true}, std::move(one)});
  }
  std::vector<HerzogHillRow> rows;
  for (std::int64_t n : n_grid)
    rows.push_back({n, bernstein_eval(indicator, n, b)});
  return rows;
}

std::vector<DlocRow> dloc_run(double alpha,
                              std::span<const std::int64_t> n_grid) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("dloc_run: need alpha in (0,1)");
  FunctionSpec cusp;
  {
    auto e = std::make_unique<Expr>();
    e->kind = ExprKind::ExpCusp;
    e->p0 = 0.5;
    e->p1 = alpha;
    cusp.pieces.push_back(Piece{Interval{0.0, 1.0, true, true}, std::move(e)});
  }
  const Interval center_point{0.5, 0.5, true, true};
  std::vector<DlocRow> rows;
  for (std::int64_t n : n_grid) {
    if (n < 2 || n % 2 != 0)
      throw std::invalid_argument("dloc_run: grid entries must be even and >= 2");
    DlocRow row;
    row.n = n;
    const std::int64_t degree = 2 * n;
    const LogValue dev =
        bernstein_deviation(cusp, 0.0, center_point, degree, 0.5);
    row.log_error = dev.log_mag;
    row.paper_lower_bound =
        -std::pow(static_cast<double>(degree), alpha) +
        log_binomial_pmf(degree, n - 1, 0.5).log_mag;
    row.sublinearity = -row.log_error / static_cast<double>(n);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace bern
