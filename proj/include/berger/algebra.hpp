#pragma once

// Exact squaring via multiplicative convolution, atomic square-root solvers,
// generating-function square roots, and the Laplace-derived closed forms.
//
// In the log domain a density term is a translated gamma-type kernel whose
// moment function is coeff * e^{-s l} * k! / (s + alpha + 1)^{k+1}.  Products
// of measures multiply these functions, so squaring reduces to Beta-function
// identities (equal poles) and partial fractions (distinct poles), all exact
// in rational arithmetic.

#include "berger/measure.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace berger {

// One summand coefficient/(s + pole)^multiplicity of a partial fraction
// expansion in the Laplace variable.
struct PartialFraction {
  Scalar pole;
  long multiplicity = 1;
  Scalar coefficient;
};

// Exact expansion of 1/((s+a)^J (s+b)^K) for a != b, J, K >= 1.
std::vector<PartialFraction> two_pole_partial_fractions(const Scalar& a, long J, const Scalar& b,
                                                        long K);
// Evaluate an expansion at a point s (poles excluded); used to cross-check
// the expansion against the defining product.
Scalar evaluate_partial_fractions(const std::vector<PartialFraction>& pf, const Scalar& s);

// nu^2 for purely atomic nu: atoms at all pairwise products with convolved
// masses; log positions add exactly.
Measure square_atomic(const Measure& nu);

// Multiplicative convolution of two density terms; both k's must be
// nonnegative integers (throws FamilyViolation otherwise).
std::vector<DensityTerm> convolve_terms(const DensityTerm& t1, const DensityTerm& t2);

struct SquareOptions {
  long selfcheck_moments = 8;  // 0 disables the internal moment self-check
};
// Full bilinear square of a measure inside the symbolic family.
Measure square_measure(const Measure& nu, const SquareOptions& opts = {});

// Closed-form square of a polynomial density sum a_i x^i (probability measure
// on (0,1)); an independent evaluation path used to cross-check
// square_measure.
Measure polynomial_square_direct(const std::vector<Scalar>& coeffs);

enum class SqrtMethod { algorithmic, vandermonde, generating, catalog };
enum class SqrtFailure {
  none,
  not_atomic,
  no_atom_at_one,
  support_mismatch,
  negative_mass,
  residual_exceeded
};
const char* to_string(SqrtFailure f);

struct SqrtCandidate {
  std::optional<Measure> measure;  // the candidate nu-hat, when one was produced
  SqrtMethod method = SqrtMethod::algorithmic;
  bool verified = false;
  SqrtFailure failure = SqrtFailure::none;
  std::string message;
  Scalar max_mass_residual{0};    // candidate^2 vs mu, atom by atom
  Scalar max_moment_residual{0};  // first |supp mu| + 1 moments
  Scalar path_disagreement{0};    // algorithmic vs Vandermonde masses
};

// Square root of a finitely atomic probability measure with an atom at 1.
// Runs both the mass-matching greedy and the Vandermonde solve, verifies the
// candidate by re-squaring, and reports failures with reasons instead of
// discarding near-misses.
SqrtCandidate sqrt_atomic(const Measure& mu, const Scalar& tol);

// Square root on a geometric support {r^n} via the power-series coefficient
// recursion phi_0 = sqrt(rho_0), phi_n = (rho_n - sum phi_i phi_{n-i})/(2 phi_0).
struct GeometricSqrtResult {
  bool ok = false;
  std::vector<Scalar> coeffs;
  long failure_index = -1;
  std::string message;
  Scalar max_residual{0};          // re-squared series vs rho
  std::optional<Measure> measure;  // atoms at r^n when log_r is given
};
GeometricSqrtResult sqrt_geometric(const std::vector<Scalar>& rho,
                                   std::optional<Scalar> log_r = std::nullopt);

// q-th power of Lebesgue measure: (1/Gamma(q)) (-ln u)^{q-1} du, q > 0.
Measure pth_power_lebesgue(const Scalar& q);

struct CatalogResult {
  Measure measure;
  Scalar truncation_bound{0};  // bound on the moment-0 error of the truncation
  long terms_used = 0;
  std::string name;
  std::string notes;
};
// Named closed forms: "sqrt-a3" (series square root of 2(1-t)dt, optional
// "terms" override), "pth-lebesgue" (parameter "q"), "levy" (parameter "c").
CatalogResult catalog_sqrt(const std::string& name, const std::map<std::string, Scalar>& params);

// Change of variables x = -ln t between densities on (0,infinity) and (0,1).
// coeff * x^k e^{-alpha x} H(x) maps to the density term coeff * t^alpha (-ln t)^k.
struct HalfLineMonomialExp {
  Scalar coeff{1};
  Scalar alpha;
  Scalar k;
};
Measure transport_from_halfline(const HalfLineMonomialExp& g);
// Levy density (c/(2 sqrt(pi x^3)))e^{-c^2/(4x)} transported and normalized to
// a probability measure; moments e^{c - c sqrt(n+1)}, verified by quadrature.
Measure transport_levy(const Scalar& c);
std::variant<HalfLineMonomialExp, SpecialDensity> transport_to_halfline(const Measure& mu);

}  // namespace berger
