#include "berger/scalar.hpp"

#include <cstdlib>
#include <mutex>

namespace berger {

namespace {

unsigned g_digits10 = 60;
std::once_flag g_env_once;

unsigned digits_to_bits(unsigned digits10) {
  // bits = digits * log2(10), rounded up, plus guard bits
  return static_cast<unsigned>(digits10 * 3.3219280948873623 + 0.5) + 8;
}

Rational rational_pow(Rational base, unsigned long m) {
  Rational out(1);
  while (m) {
    if (m & 1) out *= base;
    base *= base;
    m >>= 1;
  }
  return out;
}

// Floor square root with exactness flag.
bool exact_sqrt(const Int& n, Int& root) {
  if (n < 0) return false;
  root = sqrt(n);
  return root * root == n;
}

// If q is the square of a rational, return it in `root`.
bool exact_sqrt(const Rational& q, Rational& root) {
  Int num(numerator(q)), den(denominator(q));
  Int rn, rd;
  if (!exact_sqrt(num, rn) || !exact_sqrt(den, rd)) return false;
  root = Rational(rn, rd);
  return true;
}

}  // namespace

unsigned working_precision() { return g_digits10; }
unsigned working_precision_bits() { return digits_to_bits(g_digits10); }

void set_working_precision(unsigned digits10) {
  if (digits10 < 15) digits10 = 15;
  g_digits10 = digits10;
  BigFloat::default_precision(digits10);
}

void init_precision_from_env() {
  std::call_once(g_env_once, [] {
    unsigned digits = 60;
    if (const char* env = std::getenv("BERGERKIT_PRECISION")) {
      long v = std::strtol(env, nullptr, 10);
      if (v >= 15 && v <= 100000) digits = static_cast<unsigned>(v);
    }
    set_working_precision(digits);
  });
}

Scalar::Exact Scalar::canonical(Exact e) {
  if (e.rad < 0) throw ScalarError("negative radicand");
  if (e.coef == 0 || e.rad == 0) return Exact{0, 1};
  Rational root;
  if (exact_sqrt(e.rad, root)) {
    e.coef *= root;
    e.rad = 1;
  }
  return e;
}

Scalar Scalar::ratio(long p, long q) { return Scalar(Rational(p, q)); }
Scalar Scalar::ratio(const Int& p, const Int& q) { return Scalar(Rational(p, q)); }

Scalar Scalar::sqrt_rational(const Rational& q) {
  if (q < 0) throw ScalarError("sqrt of negative rational");
  return Scalar(canonical(Exact{1, q}));
}

Scalar Scalar::exact(const Rational& coef, const Rational& rad) {
  return Scalar(canonical(Exact{coef, rad}));
}

Scalar Scalar::parse_rational(const std::string& s) {
  try {
    Rational q(s);
    if (denominator(q) == 0) throw ScalarError("zero denominator");
    mpq_canonicalize(q.backend().data());  // string assignment skips this
    return Scalar(q);
  } catch (const ScalarError&) {
    throw;
  } catch (const std::exception&) {
    throw ScalarError("cannot parse rational: " + s);
  }
}

Scalar Scalar::parse_decimal(const std::string& s, unsigned prec_bits) {
  unsigned digits10 = prec_bits ? static_cast<unsigned>(prec_bits / 3.3219280948873623) + 1
                                : working_precision();
  if (digits10 < 15) digits10 = 15;
  try {
    return Scalar(BigFloat(s.c_str(), digits10));
  } catch (const std::exception&) {
    throw ScalarError("cannot parse decimal: " + s);
  }
}

bool Scalar::is_rational() const {
  const Exact* e = std::get_if<Exact>(&v_);
  return e && e->rad == 1;
}

bool Scalar::is_integer() const {
  return is_rational() && denominator(std::get<Exact>(v_).coef) == 1;
}

bool Scalar::is_zero() const { return sign() == 0; }

int Scalar::sign() const {
  if (const Exact* e = std::get_if<Exact>(&v_)) {
    return e->coef.sign();
  }
  return std::get<BigFloat>(v_).sign();
}

const Rational& Scalar::rational_value() const {
  if (!is_rational()) throw ScalarError("not a rational: " + str());
  return std::get<Exact>(v_).coef;
}

const Rational& Scalar::exact_coef() const {
  if (!is_exact()) throw ScalarError("not exact");
  return std::get<Exact>(v_).coef;
}

const Rational& Scalar::exact_rad() const {
  if (!is_exact()) throw ScalarError("not exact");
  return std::get<Exact>(v_).rad;
}

long Scalar::as_long() const {
  if (!is_integer()) throw ScalarError("not an integer: " + str());
  Int n(numerator(rational_value()));
  if (n > std::numeric_limits<long>::max() || n < std::numeric_limits<long>::min())
    throw ScalarError("integer out of range");
  return static_cast<long>(n);
}

BigFloat Scalar::to_real() const { return to_real_at(working_precision()); }

BigFloat Scalar::to_real_at(unsigned digits10) const {
  if (const Exact* e = std::get_if<Exact>(&v_)) {
    BigFloat c(e->coef, digits10);
    if (e->rad == 1) return c;
    BigFloat r(e->rad, digits10);
    return c * sqrt(r);
  }
  const BigFloat& f = std::get<BigFloat>(v_);
  if (f.precision() >= digits10) return f;
  BigFloat g(f, digits10);
  return g;
}

double Scalar::to_double() const { return static_cast<double>(to_real_at(25)); }

unsigned Scalar::precision_bits() const {
  if (const BigFloat* f = std::get_if<BigFloat>(&v_))
    return static_cast<unsigned>(mpfr_get_prec(f->backend().data()));
  return digits_to_bits(working_precision());
}

Scalar Scalar::operator-() const {
  if (const Exact* e = std::get_if<Exact>(&v_)) return Scalar(Exact{-e->coef, e->rad});
  return Scalar(BigFloat(-std::get<BigFloat>(v_)));
}

namespace {

unsigned common_digits(const Scalar& a, const Scalar& b) {
  unsigned bits = std::max({digits_to_bits(working_precision()), a.precision_bits(),
                            b.precision_bits()});
  return static_cast<unsigned>(bits / 3.3219280948873623) + 1;
}

}  // namespace

Scalar& Scalar::operator+=(const Scalar& o) {
  if (is_exact() && o.is_exact()) {
    const Exact& a = std::get<Exact>(v_);
    const Exact& b = std::get<Exact>(o.v_);
    if (a.coef == 0) { v_ = b; return *this; }
    if (b.coef == 0) return *this;
    if (a.rad == b.rad) {
      v_ = canonical(Exact{a.coef + b.coef, a.rad});
      return *this;
    }
    // sqrt(b.rad) = s*sqrt(a.rad) with rational s when b.rad/a.rad is a square
    Rational s;
    if (exact_sqrt(b.rad / a.rad, s)) {
      v_ = canonical(Exact{a.coef + b.coef * s, a.rad});
      return *this;
    }
  }
  unsigned d = common_digits(*this, o);
  v_ = BigFloat(to_real_at(d) + o.to_real_at(d));
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) { return *this += -o; }

Scalar& Scalar::operator*=(const Scalar& o) {
  if (is_exact() && o.is_exact()) {
    const Exact& a = std::get<Exact>(v_);
    const Exact& b = std::get<Exact>(o.v_);
    v_ = canonical(Exact{a.coef * b.coef, a.rad * b.rad});
    return *this;
  }
  if (is_zero() || o.is_zero()) { v_ = Exact{0, 1}; return *this; }
  unsigned d = common_digits(*this, o);
  v_ = BigFloat(to_real_at(d) * o.to_real_at(d));
  return *this;
}

Scalar& Scalar::operator/=(const Scalar& o) {
  if (o.is_zero()) throw ScalarError("division by zero");
  if (is_exact() && o.is_exact()) {
    const Exact& a = std::get<Exact>(v_);
    const Exact& b = std::get<Exact>(o.v_);
    v_ = canonical(Exact{a.coef / b.coef, a.rad / b.rad});
    return *this;
  }
  unsigned d = common_digits(*this, o);
  v_ = BigFloat(to_real_at(d) / o.to_real_at(d));
  return *this;
}

int Scalar::cmp(const Scalar& o) const {
  if (is_exact() && o.is_exact()) {
    int sa = sign(), sb = o.sign();
    if (sa != sb) return sa < sb ? -1 : 1;
    if (sa == 0) return 0;
    const Exact& a = std::get<Exact>(v_);
    const Exact& b = std::get<Exact>(o.v_);
    Rational qa = a.coef * a.coef * a.rad;
    Rational qb = b.coef * b.coef * b.rad;
    int c = qa == qb ? 0 : (qa < qb ? -1 : 1);
    return sa > 0 ? c : -c;
  }
  unsigned d = common_digits(*this, o);
  BigFloat fa = to_real_at(d), fb = o.to_real_at(d);
  if (fa == fb) return 0;
  return fa < fb ? -1 : 1;
}

std::string Scalar::str() const {
  if (is_rational()) return rational_value().str();
  return to_real().str();
}

Scalar abs(const Scalar& s) { return s.sign() < 0 ? -s : s; }

Scalar sqrt(const Scalar& s) {
  if (s.sign() < 0) throw ScalarError("sqrt of negative value");
  if (s.is_rational()) return Scalar::sqrt_rational(s.rational_value());
  return Scalar(BigFloat(sqrt(s.to_real())));
}

Scalar pow(const Scalar& base, long n) {
  if (n == 0) return Scalar(1);
  if (base.is_exact()) {
    bool neg = n < 0;
    unsigned long m = neg ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
    const Rational& c = base.exact_coef();
    const Rational& r = base.exact_rad();
    if (neg && c == 0) throw ScalarError("division by zero");
    // (c*sqrt(r))^m = c^m * r^(m/2) * (sqrt(r) if m odd)
    Rational coef = rational_pow(c, m) * rational_pow(r, m / 2);
    Scalar out = (m % 2 == 0) ? Scalar(coef) : Scalar::exact(coef, r);
    return neg ? Scalar(1) / out : out;
  }
  return Scalar(BigFloat(pow(base.to_real(), static_cast<int>(n))));
}

Scalar pow(const Scalar& base, const Scalar& e) {
  if (e.is_integer()) return pow(base, e.as_long());
  if (e.is_rational() && base.is_rational() && base.sign() >= 0) {
    const Rational& pq = e.rational_value();
    Int den(denominator(pq));
    if (den == 2) {
      // q^(p/2) = sqrt(q)^p, exact in the sqrt-extended form
      Int num(numerator(pq));
      if (num > -(1L << 30) && num < (1L << 30))
        return pow(sqrt(base), static_cast<long>(num));
    }
    // exact d-th root when numerator and denominator of the base are both
    // perfect d-th powers
    if (den > 2 && den < 64 && base.sign() > 0) {
      unsigned long d = static_cast<unsigned long>(den);
      Int bn(numerator(base.rational_value())), bd(denominator(base.rational_value()));
      Int rn, rd;
      int okn = mpz_root(rn.backend().data(), bn.backend().data(), d);
      int okd = mpz_root(rd.backend().data(), bd.backend().data(), d);
      if (okn && okd) {
        Int num(numerator(pq));
        if (num > -(1L << 30) && num < (1L << 30))
          return pow(Scalar(Rational(rn, rd)), static_cast<long>(num));
      }
    }
  }
  if (base.sign() < 0) throw ScalarError("pow of negative base with non-integer exponent");
  if (base.is_zero()) {
    if (e.sign() <= 0) throw ScalarError("0^e with e <= 0");
    return Scalar(0);
  }
  unsigned d = common_digits(base, e);
  return Scalar(BigFloat(pow(base.to_real_at(d), e.to_real_at(d))));
}

Scalar exp(const Scalar& s) {
  if (s.is_zero()) return Scalar(1);
  return Scalar(BigFloat(exp(s.to_real())));
}

Scalar log(const Scalar& s) {
  if (s.sign() <= 0) throw ScalarError("log of nonpositive value");
  if (s.is_rational() && s.rational_value() == 1) return Scalar(0);
  return Scalar(BigFloat(log(s.to_real())));
}

Scalar tgamma(const Scalar& s) {
  if (s.is_integer() && s.sign() > 0) return factorial(s.as_long() - 1);
  if (s.is_rational() && s.sign() < 0 && denominator(s.rational_value()) == 1)
    throw ScalarError("gamma pole at nonpositive integer");
  return Scalar(BigFloat(tgamma(s.to_real())));
}

Scalar factorial(long n) {
  if (n < 0) throw ScalarError("factorial of negative integer");
  Int f = 1;
  for (long i = 2; i <= n; ++i) f *= i;
  return Scalar(f);
}

Scalar binomial_coefficient(long n, long k) {
  if (k < 0 || k > n) return Scalar(0);
  Int num = 1, den = 1;
  for (long i = 0; i < k; ++i) {
    num *= (n - i);
    den *= (i + 1);
  }
  return Scalar(Rational(num, den));
}

Scalar big_pi() {
  BigFloat p(0, working_precision());
  mpfr_const_pi(p.backend().data(), MPFR_RNDN);
  return Scalar(p);
}

}  // namespace berger
