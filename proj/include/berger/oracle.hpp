#pragma once

// Independent numeric verification: adaptive Gauss-Legendre quadrature for
// moments and multiplicative convolutions, plus the moment-matching reports
// used by the acceptance tests.  Everything here integrates plain callables;
// it never consults the closed-form moment formulas it is used to check.

#include "berger/measure.hpp"

#include <functional>
#include <string>
#include <vector>

namespace berger {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Density on (0,1) as a function of t.
using DensityFn = std::function<BigFloat(const BigFloat&)>;

struct QuadratureHints {
  // Worst-case endpoint exponents: density ~ t^alpha_min near t = 0 and
  // ~ (-ln t)^k_min near t = 1 (k_min < 0 steers the endpoint substitution).
  double alpha_min = -0.9;
  double k_min = -0.9;
  // Support cutoffs (log domain): the density may jump at t = exp(-l).
  std::vector<double> break_logs;
};

struct QuadResult {
  BigFloat value;
  BigFloat err_estimate;
  long evaluations = 0;
};

// integral over (0,1) of t^n * density(t) dt to absolute tolerance tol.
QuadResult quad_moment(const DensityFn& density, long n, const BigFloat& tol,
                       const QuadratureHints& hints = {});

// f(a) = int_a^1 g(a/x) g(x) (1/x) dx, the multiplicative self-convolution of
// a density at the point a in (0,1).
QuadResult numeric_convolution(const DensityFn& g, const BigFloat& a, const BigFloat& tol,
                               const QuadratureHints& hints = {});

// integral of density over (t_lo, t_hi), 0 <= t_lo < t_hi <= 1.
QuadResult quad_interval(const DensityFn& density, const BigFloat& t_lo, const BigFloat& t_hi,
                         const BigFloat& tol, const QuadratureHints& hints = {});

// Evaluable view of a measure's density part together with matching hints.
DensityFn density_fn(const Measure& mu);
QuadratureHints hints_for(const Measure& mu);

struct VerificationReport {
  long n_checked = 0;
  std::vector<BigFloat> residuals;  // indexed by n
  BigFloat max_residual;
  BigFloat tol;
  bool pass = false;
  std::string notes;

  std::string to_text() const;
};

// Residuals |gamma_n(mu) - gamma_n(nu)^2| for n = 0..N, exact moments where
// available.
VerificationReport verify_square(const Measure& mu, const Measure& nu, long N, const Scalar& tol);

// Residuals |gamma_n(mu) - target(n)|.
VerificationReport verify_moments(const Measure& mu, const std::function<Scalar(long)>& target,
                                  long N, const Scalar& tol);

}  // namespace berger
