#pragma once

// Exact/high-precision scalar type used throughout the library.
//
// A Scalar is either exact -- the value coef*sqrt(rad) with rational coef and
// nonnegative rational rad (rad == 1 for plain rationals) -- or a floating
// value at a tracked MPFR precision.  The exact form is closed under
// multiplication, division, integer powers and square roots of rationals,
// which is what the weight/moment identities need (weights are typically
// sqrt(rational), moments are rational).  Mixed or non-closed operations
// degrade to floating values at the working precision.

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <stdexcept>
#include <string>
#include <variant>

namespace berger {

using Int = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;
using BigFloat = boost::multiprecision::mpfr_float;

class ScalarError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Working precision in decimal digits (default 60, overridable via the
// BERGERKIT_PRECISION environment variable; see init_precision_from_env).
unsigned working_precision();
unsigned working_precision_bits();
void set_working_precision(unsigned digits10);
void init_precision_from_env();

class Scalar {
 public:
  Scalar() : v_(Exact{0, 1}) {}
  Scalar(long n) : v_(Exact{Rational(n), 1}) {}
  Scalar(int n) : v_(Exact{Rational(n), 1}) {}
  explicit Scalar(const Rational& q) : v_(Exact{q, 1}) {}
  explicit Scalar(const Int& n) : v_(Exact{Rational(n), 1}) {}
  explicit Scalar(BigFloat f) : v_(std::move(f)) {}

  static Scalar ratio(long p, long q);
  static Scalar ratio(const Int& p, const Int& q);
  // Exact sqrt(q) for rational q >= 0 (collapses to a rational when q is a
  // perfect square).
  static Scalar sqrt_rational(const Rational& q);
  // coef * sqrt(rad), canonicalized.
  static Scalar exact(const Rational& coef, const Rational& rad);
  // Parse "p/q" or "p".
  static Scalar parse_rational(const std::string& s);
  // Parse a decimal string at the given precision (bits; 0 = working).
  static Scalar parse_decimal(const std::string& s, unsigned prec_bits = 0);

  bool is_exact() const { return std::holds_alternative<Exact>(v_); }
  bool is_rational() const;
  bool is_integer() const;
  bool is_zero() const;
  int sign() const;  // -1, 0, +1

  // Requires is_rational().
  const Rational& rational_value() const;
  // Requires is_exact(); value == exact_coef()*sqrt(exact_rad()).
  const Rational& exact_coef() const;
  const Rational& exact_rad() const;
  // Requires is_integer() and value within long range.
  long as_long() const;

  BigFloat to_real() const;                     // at working precision
  BigFloat to_real_at(unsigned digits10) const;
  double to_double() const;
  // Precision in bits of the floating payload (working precision for exact).
  unsigned precision_bits() const;

  Scalar operator-() const;
  Scalar& operator+=(const Scalar& o);
  Scalar& operator-=(const Scalar& o);
  Scalar& operator*=(const Scalar& o);
  Scalar& operator/=(const Scalar& o);

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }

  // Three-way comparison: -1, 0, +1.  Exact when both operands are exact.
  int cmp(const Scalar& o) const;
  friend bool operator==(const Scalar& a, const Scalar& b) { return a.cmp(b) == 0; }
  friend bool operator!=(const Scalar& a, const Scalar& b) { return a.cmp(b) != 0; }
  friend bool operator<(const Scalar& a, const Scalar& b) { return a.cmp(b) < 0; }
  friend bool operator<=(const Scalar& a, const Scalar& b) { return a.cmp(b) <= 0; }
  friend bool operator>(const Scalar& a, const Scalar& b) { return a.cmp(b) > 0; }
  friend bool operator>=(const Scalar& a, const Scalar& b) { return a.cmp(b) >= 0; }

  // "p/q" for rationals, decimal otherwise.
  std::string str() const;

 private:
  struct Exact {
    Rational coef;
    Rational rad;  // >= 0; 1 when the value is rational
  };
  std::variant<Exact, BigFloat> v_;

  explicit Scalar(Exact e) : v_(std::move(e)) {}
  static Exact canonical(Exact e);
  friend Scalar sqrt(const Scalar& s);
  friend Scalar pow(const Scalar& base, long n);
};

struct ScalarLess {
  bool operator()(const Scalar& a, const Scalar& b) const { return a.cmp(b) < 0; }
};

Scalar abs(const Scalar& s);
Scalar sqrt(const Scalar& s);        // exact for rationals, floating otherwise
Scalar pow(const Scalar& base, long n);
Scalar pow(const Scalar& base, const Scalar& e);
Scalar exp(const Scalar& s);         // floating (exp(0) == 1 exact)
Scalar log(const Scalar& s);         // floating (log(1) == 0 exact)
Scalar tgamma(const Scalar& s);      // exact factorial at positive integers
Scalar factorial(long n);
Scalar binomial_coefficient(long n, long k);
Scalar big_pi();  // pi at working precision

}  // namespace berger
