#pragma once

#include <cstdint>
#include <functional>

#include "bern/function_spec.hpp"
#include "bern/numerics.hpp"

namespace bern {

struct OperatorParams {
  std::int64_t n = 1;
  std::int64_t k = 0;  // k = 0 means plain Bernstein
  double x = 0.5;

  void validate() const;
};

/// Law of the perturbation W_k on [0,k].
struct PerturbationSpec {
  enum class Kind { IrwinHall, PointMass, Custom };

  Kind kind = Kind::IrwinHall;
  double point = 0.0;                     // PointMass location in [0,k]
  std::function<double(double)> cdf;      // Custom law, monotone on [0,k]
  std::uint64_t mc_samples = 1000000;     // Custom laws only
  std::uint64_t seed = 12345;

  static PerturbationSpec irwin_hall() { return {}; }
  static PerturbationSpec point_mass(double w) {
    PerturbationSpec p;
    p.kind = Kind::PointMass;
    p.point = w;
    return p;
  }
  static PerturbationSpec custom(std::function<double(double)> cdf,
                                 std::uint64_t samples = 1000000,
                                 std::uint64_t seed = 12345) {
    PerturbationSpec p;
    p.kind = Kind::Custom;
    p.cdf = std::move(cdf);
    p.mc_samples = samples;
    p.seed = seed;
    return p;
  }
};

/// B_n f(x) = sum_j f(j/n) C(n,j) x^j (1-x)^(n-j). Weights are
/// normalized by their computed total mass, which cancels the common
/// rounding of ln n! and n ln x.
double bernstein_eval(const FunctionSpec& f, std::int64_t n, double x);

/// B_n f(x) - c for f constant equal to c on `exclusion`, summed only
/// over j with j/n outside the exclusion, in signed log space. Never
/// subtracts nearly equal quantities. The constancy precondition is
/// spot-checked on 100 interior samples.
LogValue bernstein_deviation(const FunctionSpec& f, double c,
                             const Interval& exclusion, std::int64_t n,
                             double x);

/// j-th central moment of S_n(x)/n. Guard j <= 60.
double central_moment(std::int64_t n, int j, double x);

/// CDF of the sum of k independent uniform [0,1] variables.
double irwin_hall_cdf(std::int64_t k, double t);
double irwin_hall_pdf(std::int64_t k, double t);

/// L_{n,k} f(x) = E f((S_{n-k}(x) + W_k)/n). k = 0 delegates to
/// bernstein_eval. Inner expectations: exact CDF differences for
/// piecewise-constant f under Irwin-Hall, adaptive Gauss-Legendre
/// quadrature (abs tol 1e-12, max depth 40) otherwise, and seeded
/// Monte Carlo for Custom laws.
double kantorovich_eval(const FunctionSpec& f, const OperatorParams& params,
                        const PerturbationSpec& w);

/// L_{n,k} f(x) - c in log space, with g = f - c so terms supported
/// inside the exclusion contribute exactly zero.
LogValue kantorovich_deviation(const FunctionSpec& f, double c,
                               const Interval& exclusion,
                               const OperatorParams& params,
                               const PerturbationSpec& w);

}  // namespace bern
