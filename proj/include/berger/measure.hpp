#pragma once

// Measure data model: finitely many atoms on (0,1], an optional mass at t = 0,
// and densities from the closed family
//
//     coeff * (1/c) * (t/c)^alpha * (-ln(t/c))^k   on (0,c),  c = exp(-log_support),
//
// i.e. the pushforward of coeff * t^alpha (-ln t)^k dt under multiplication
// by c.  Atom positions and support cutoffs are stored in the log domain
// (t = exp(-log_pos)) so that products of atoms become exact sums.

#include "berger/scalar.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace berger {

class MeasureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an operation needs the closed symbolic family but the input
// steps outside it (non-integer k, quadrature-backed density).
class FamilyViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Atom {
  Scalar log_pos;  // >= 0; position is t = exp(-log_pos)
  Scalar mass;     // > 0
};

struct DensityTerm {
  Scalar coeff;        // != 0
  Scalar alpha;        // > -1
  Scalar k;            // > -1; nonnegative integer required for convolution
  Scalar log_support;  // >= 0; support is (0, exp(-log_support))

  DensityTerm(Scalar coeff_, Scalar alpha_, Scalar k_, Scalar log_support_ = Scalar(0));
  bool k_is_nonneg_int() const { return k.is_integer() && k.sign() >= 0; }
};

// Quadrature-backed density outside the closed family.  The only entry so far
// is the half-line density (c/(2 sqrt(pi x^3))) e^{-c^2/(4x)} transported to
// (0,1) via x = -ln t; its n-th moment is scale * e^{-c sqrt(n+1)}.
struct SpecialDensity {
  enum class Kind { levy };
  Kind kind = Kind::levy;
  Scalar c;      // > 0
  Scalar scale;  // > 0
};

class Measure {
 public:
  Measure() = default;
  Measure(Scalar zero_mass, std::vector<Atom> atoms, std::vector<DensityTerm> terms,
          std::optional<SpecialDensity> special = std::nullopt);

  static Measure dirac(Scalar log_pos, Scalar mass = Scalar(1));
  static Measure lebesgue();  // 1 dt on (0,1)
  static Measure from_terms(std::vector<DensityTerm> terms);
  static Measure from_atoms(std::vector<Atom> atoms, Scalar zero_mass = Scalar(0));

  const Scalar& zero_mass() const { return zero_mass_; }
  // Sorted by log_pos ascending (positions descending); distinct positions.
  const std::vector<Atom>& atoms() const { return atoms_; }
  // Sorted lexicographically by (alpha, k, log_support); distinct keys.
  const std::vector<DensityTerm>& terms() const { return terms_; }
  const std::optional<SpecialDensity>& special() const { return special_; }

  bool purely_atomic() const { return terms_.empty() && !special_; }
  bool in_symbolic_family() const;
  Scalar total_mass() const;
  bool is_probability(const Scalar& tol) const;
  // Atom mass at the given log position (0 when absent).
  Scalar atom_mass_at(const Scalar& log_pos) const;

 private:
  Scalar zero_mass_ = Scalar(0);
  std::vector<Atom> atoms_;
  std::vector<DensityTerm> terms_;
  std::optional<SpecialDensity> special_;
};

// n-th moment of a density term; defined for any integer n with
// n + alpha + 1 > 0 (the analytic continuation at n = -1 is what the
// back-step extension integrates).
Scalar term_moment(const DensityTerm& term, long n);
Scalar special_moment(const SpecialDensity& sd, long n);
// gamma_n = integral of t^n d(mu); n >= 0.
Scalar measure_moment(const Measure& mu, long n);

// Density of the absolutely continuous part at t in (0,1); atoms ignored.
Scalar density_eval(const Measure& mu, const Scalar& t);
Scalar term_density_eval(const DensityTerm& term, const Scalar& t);

// Support of a measure in log coordinates: an optional interval
// (0, exp(-continuous_log)] contributed by density terms, atoms outside it,
// and a flag for mass at zero.
struct SupportDescriptor {
  bool has_zero = false;
  std::optional<Scalar> continuous_log;  // present iff density part nonempty
  std::vector<Scalar> atom_logs;         // ascending, all < continuous_log

  bool operator==(const SupportDescriptor& o) const;
  std::string describe() const;
};

SupportDescriptor support_set(const Measure& mu);
// Closure of pairwise products of the supported points.
SupportDescriptor support_square(const SupportDescriptor& s);
// Does supp(mu) equal the closure of (supp(nu))^2?  Exact in the log domain
// for atoms; density supports compared as intervals.
bool support_square_check(const Measure& mu, const Measure& nu);

// Normalized t^n mu: density terms gain alpha + n, atom masses pick up
// position^n, mass at zero is dropped, and the result is rescaled to a
// probability measure.  n >= 1.
Measure restrict_and_normalize(const Measure& mu, long n);

}  // namespace berger
