#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bern/function_spec.hpp"
#include "bern/numerics.hpp"
#include "bern/operators.hpp"

namespace bern {

/// One bound instance: operator error against the guaranteed
/// right-hand side, both in log space.
struct BoundCheck {
  std::int64_t n = 0;
  double x = 0.0;
  LogValue error;  // |operator output - c|
  LogValue bound;  // guaranteed upper bound
  bool holds = false;
  double slack = 0.0;  // bound.log_mag - error.log_mag; +inf when error = 0
};

struct DecayFit {
  std::vector<std::int64_t> n_grid;
  std::vector<double> neg_log_errors;
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
  bool degenerate = false;  // some error was exactly zero
};

/// Locally-constant bound: error = |B_n f(x) - c|, bound =
/// ||f-c|| (e^{-n r(x,a)} [if a>0] + e^{-n r(x,b)} [if b<1]). a = 0 or
/// b = 1 route to the one-sided bounds (the matching term is dropped).
BoundCheck locally_constant_check(const FunctionSpec& f, double c, double a,
                                  double b, std::int64_t n, double x);

/// Kantorovich analogue: requires I = (na/(n-k), b-k/n) nonempty and
/// x in I; bound uses exponents (n-k) r(x, na/(n-k)) and
/// (n-k) r(x, b-k/n).
BoundCheck kantorovich_check(const FunctionSpec& f, double c, double a,
                             double b, const OperatorParams& params,
                             const PerturbationSpec& w);

/// OLS of -log(error) against n over the top half of the grid
/// (small-n transients carry the log n / n prefactor contamination).
DecayFit decay_fit(std::span<const BoundCheck> checks);

struct SharpnessRow {
  std::int64_t big_n = 0;  // N = n*m
  LogValue exact;
  LogValue asymptotic;
  double ratio = 0.0;
};

/// P(S_{nm}(x) = nk) against its local-limit asymptotic
/// e^{-nm r(x,b)} / sqrt(2 pi nm b(1-b)), b = k/m.
std::vector<SharpnessRow> sharpness_run(std::int64_t k, std::int64_t m,
                                        double x,
                                        std::span<const std::int64_t> n_grid);

struct BoundaryRow {
  std::int64_t n = 0;
  double scaled = 0.0;        // n^{s/2} B_n f_s(1/2)
  double symmetry_gap = 0.0;  // |E(.)_+^s - (1/2)E|.|^s|
};

struct BoundaryResult {
  std::vector<BoundaryRow> rows;
  double limit_constant = 0.0;  // (1/2^{s+1}) E|Z|^s
};

BoundaryResult boundary_run(double s, std::span<const std::int64_t> n_grid);

struct HerzogHillRow {
  std::int64_t n = 0;
  double value = 0.0;  // B_n 1_{[b,1]}(b)
};

std::vector<HerzogHillRow> herzog_hill_run(double b,
                                           std::span<const std::int64_t> n_grid);

struct DlocRow {
  std::int64_t n = 0;          // degree is 2n
  double log_error = 0.0;      // log B_{2n} f(1/2)
  double paper_lower_bound = 0.0;
  double sublinearity = 0.0;   // -log_error / n
};

/// Counterexample f(t) = exp(-|t-1/2|^{-alpha}): super-polynomial but
/// not exponential decay at 1/2. All evaluation in log space.
std::vector<DlocRow> dloc_run(double alpha,
                              std::span<const std::int64_t> n_grid);

}  // namespace bern
