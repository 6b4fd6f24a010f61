#include "berger/measure.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace berger {

DensityTerm::DensityTerm(Scalar coeff_, Scalar alpha_, Scalar k_, Scalar log_support_)
    : coeff(std::move(coeff_)),
      alpha(std::move(alpha_)),
      k(std::move(k_)),
      log_support(std::move(log_support_)) {
  if (coeff.is_zero()) throw MeasureError("density term with zero coefficient");
  if (alpha <= Scalar(-1)) throw MeasureError("density term needs alpha > -1");
  if (k <= Scalar(-1)) throw MeasureError("density term needs k > -1");
  if (log_support.sign() < 0) throw MeasureError("log_support must be >= 0");
}

namespace {

struct TermKeyLess {
  bool operator()(const DensityTerm& a, const DensityTerm& b) const {
    int c = a.alpha.cmp(b.alpha);
    if (c != 0) return c < 0;
    c = a.k.cmp(b.k);
    if (c != 0) return c < 0;
    return a.log_support.cmp(b.log_support) < 0;
  }
};

}  // namespace

Measure::Measure(Scalar zero_mass, std::vector<Atom> atoms, std::vector<DensityTerm> terms,
                 std::optional<SpecialDensity> special)
    : zero_mass_(std::move(zero_mass)), special_(std::move(special)) {
  if (zero_mass_.sign() < 0) throw MeasureError("negative mass at zero");

  // Merge atoms at equal positions; canonical order is log_pos ascending.
  std::map<Scalar, Scalar, ScalarLess> by_pos;
  for (auto& a : atoms) {
    if (a.log_pos.sign() < 0) throw MeasureError("atom with log_pos < 0");
    if (a.mass.sign() < 0) throw MeasureError("atom with negative mass");
    if (a.mass.is_zero()) continue;
    auto [it, fresh] = by_pos.emplace(a.log_pos, a.mass);
    if (!fresh) it->second += a.mass;
  }
  atoms_.reserve(by_pos.size());
  for (auto& [lp, m] : by_pos) atoms_.push_back(Atom{lp, m});

  // Merge terms with identical (alpha, k, log_support); drop cancellations.
  std::map<DensityTerm, Scalar, TermKeyLess> by_key;
  for (auto& t : terms) {
    auto [it, fresh] = by_key.emplace(t, t.coeff);
    if (!fresh) it->second += t.coeff;
  }
  terms_.reserve(by_key.size());
  for (auto& [t, c] : by_key) {
    if (c.is_zero()) continue;
    terms_.push_back(DensityTerm{c, t.alpha, t.k, t.log_support});
  }

  if (special_) {
    if (special_->c.sign() <= 0) throw MeasureError("special density needs c > 0");
    if (special_->scale.sign() <= 0) throw MeasureError("special density needs scale > 0");
  }
}

Measure Measure::dirac(Scalar log_pos, Scalar mass) {
  return Measure(Scalar(0), {Atom{std::move(log_pos), std::move(mass)}}, {});
}

Measure Measure::lebesgue() {
  return Measure(Scalar(0), {}, {DensityTerm(Scalar(1), Scalar(0), Scalar(0))});
}

Measure Measure::from_terms(std::vector<DensityTerm> terms) {
  return Measure(Scalar(0), {}, std::move(terms));
}

Measure Measure::from_atoms(std::vector<Atom> atoms, Scalar zero_mass) {
  return Measure(std::move(zero_mass), std::move(atoms), {});
}

bool Measure::in_symbolic_family() const {
  if (special_) return false;
  for (const auto& t : terms_)
    if (!t.k_is_nonneg_int()) return false;
  return true;
}

Scalar Measure::total_mass() const {
  Scalar total = zero_mass_;
  for (const auto& a : atoms_) total += a.mass;
  for (const auto& t : terms_) total += term_moment(t, 0);
  if (special_) total += special_moment(*special_, 0);
  return total;
}

bool Measure::is_probability(const Scalar& tol) const {
  return abs(total_mass() - Scalar(1)) <= tol;
}

Scalar Measure::atom_mass_at(const Scalar& log_pos) const {
  for (const auto& a : atoms_)
    if (a.log_pos == log_pos) return a.mass;
  return Scalar(0);
}

Scalar term_moment(const DensityTerm& term, long n) {
  Scalar pole = Scalar(n) + term.alpha + Scalar(1);
  if (pole.sign() <= 0) throw MeasureError("term moment undefined: n + alpha + 1 <= 0");
  Scalar gamma_k1 = tgamma(term.k + Scalar(1));
  Scalar denom = term.k.is_integer() ? pow(pole, term.k.as_long() + 1)
                                     : pow(pole, term.k + Scalar(1));
  Scalar cn = term.log_support.is_zero() || n == 0
                  ? Scalar(1)
                  : exp(-(Scalar(n) * term.log_support));
  return term.coeff * cn * gamma_k1 / denom;
}

Scalar special_moment(const SpecialDensity& sd, long n) {
  switch (sd.kind) {
    case SpecialDensity::Kind::levy:
      return sd.scale * exp(-(sd.c * sqrt(Scalar(n + 1))));
  }
  throw MeasureError("unknown special density");
}

Scalar measure_moment(const Measure& mu, long n) {
  if (n < 0) throw MeasureError("measure moment needs n >= 0");
  Scalar total = n == 0 ? mu.zero_mass() : Scalar(0);
  for (const auto& a : mu.atoms()) {
    if (n == 0 || a.log_pos.is_zero())
      total += a.mass;
    else
      total += a.mass * exp(-(Scalar(n) * a.log_pos));
  }
  for (const auto& t : mu.terms()) total += term_moment(t, n);
  if (mu.special()) total += special_moment(*mu.special(), n);
  return total;
}

Scalar term_density_eval(const DensityTerm& term, const Scalar& t) {
  if (t.sign() <= 0 || t >= Scalar(1)) throw MeasureError("density defined on (0,1)");
  // Fast exact path for plain monomials on (0,1).
  if (term.log_support.is_zero() && term.k.is_zero() && term.alpha.is_integer())
    return term.coeff * pow(t, term.alpha.as_long());
  Scalar x = -log(t);
  Scalar u = x - term.log_support;
  if (u.sign() <= 0) return Scalar(0);
  // coeff * e^l * (t/c)^alpha * u^k with (t/c)^alpha = e^{-alpha u}
  Scalar value = exp(term.log_support - term.alpha * u);
  if (!term.k.is_zero()) value *= pow(u, term.k);
  return term.coeff * value;
}

namespace {

Scalar special_density_eval(const SpecialDensity& sd, const Scalar& t) {
  switch (sd.kind) {
    case SpecialDensity::Kind::levy: {
      Scalar x = -log(t);
      Scalar spi = sqrt(big_pi());
      Scalar front = sd.c / (Scalar(2) * spi * pow(x, Scalar::ratio(3, 2)));
      return sd.scale * front * exp(-(sd.c * sd.c / (Scalar(4) * x)));
    }
  }
  throw MeasureError("unknown special density");
}

}  // namespace

Scalar density_eval(const Measure& mu, const Scalar& t) {
  if (t.sign() <= 0 || t >= Scalar(1)) throw MeasureError("density defined on (0,1)");
  Scalar total(0);
  for (const auto& term : mu.terms()) total += term_density_eval(term, t);
  if (mu.special()) total += special_density_eval(*mu.special(), t);
  return total;
}

bool SupportDescriptor::operator==(const SupportDescriptor& o) const {
  if (has_zero != o.has_zero) return false;
  if (continuous_log.has_value() != o.continuous_log.has_value()) return false;
  if (continuous_log && *continuous_log != *o.continuous_log) return false;
  if (atom_logs.size() != o.atom_logs.size()) return false;
  for (size_t i = 0; i < atom_logs.size(); ++i)
    if (atom_logs[i] != o.atom_logs[i]) return false;
  return true;
}

std::string SupportDescriptor::describe() const {
  std::ostringstream out;
  bool first = true;
  auto sep = [&] {
    if (!first) out << " u ";
    first = false;
  };
  if (has_zero) {
    sep();
    out << "{0}";
  }
  if (continuous_log) {
    sep();
    out << "(0, exp(-" << continuous_log->str() << ")]";
  }
  for (const auto& l : atom_logs) {
    sep();
    out << "{exp(-" << l.str() << ")}";
  }
  if (first) out << "{}";
  return out.str();
}

namespace {

SupportDescriptor normalize_support(SupportDescriptor s) {
  std::sort(s.atom_logs.begin(), s.atom_logs.end(), ScalarLess{});
  s.atom_logs.erase(std::unique(s.atom_logs.begin(), s.atom_logs.end(),
                                [](const Scalar& a, const Scalar& b) { return a == b; }),
                    s.atom_logs.end());
  if (s.continuous_log) {
    auto inside = std::remove_if(s.atom_logs.begin(), s.atom_logs.end(), [&](const Scalar& l) {
      return l >= *s.continuous_log;
    });
    s.atom_logs.erase(inside, s.atom_logs.end());
  }
  return s;
}

}  // namespace

SupportDescriptor support_set(const Measure& mu) {
  SupportDescriptor s;
  s.has_zero = mu.zero_mass().sign() > 0;
  for (const auto& t : mu.terms()) {
    if (!s.continuous_log || t.log_support < *s.continuous_log)
      s.continuous_log = t.log_support;
  }
  if (mu.special()) {
    if (!s.continuous_log || Scalar(0) < *s.continuous_log) s.continuous_log = Scalar(0);
  }
  for (const auto& a : mu.atoms()) s.atom_logs.push_back(a.log_pos);
  return normalize_support(std::move(s));
}

SupportDescriptor support_square(const SupportDescriptor& s) {
  SupportDescriptor out;
  out.has_zero = s.has_zero;
  for (size_t i = 0; i < s.atom_logs.size(); ++i)
    for (size_t j = i; j < s.atom_logs.size(); ++j)
      out.atom_logs.push_back(s.atom_logs[i] + s.atom_logs[j]);
  if (s.continuous_log) {
    Scalar edge = *s.continuous_log + *s.continuous_log;
    for (const auto& l : s.atom_logs) {
      Scalar via_atom = *s.continuous_log + l;
      if (via_atom < edge) edge = via_atom;
    }
    out.continuous_log = edge;
  }
  return normalize_support(std::move(out));
}

bool support_square_check(const Measure& mu, const Measure& nu) {
  return support_set(mu) == support_square(support_set(nu));
}

Measure restrict_and_normalize(const Measure& mu, long n) {
  if (n < 1) throw MeasureError("restriction needs n >= 1");
  if (mu.special()) throw FamilyViolation("cannot restrict a quadrature-backed measure");
  Scalar gamma_n = measure_moment(mu, n);
  if (gamma_n.sign() <= 0) throw MeasureError("restriction has zero total mass");

  std::vector<Atom> atoms;
  for (const auto& a : mu.atoms()) {
    Scalar scale = a.log_pos.is_zero() ? Scalar(1) : exp(-(Scalar(n) * a.log_pos));
    atoms.push_back(Atom{a.log_pos, a.mass * scale / gamma_n});
  }
  std::vector<DensityTerm> terms;
  for (const auto& t : mu.terms()) {
    Scalar cn = t.log_support.is_zero() ? Scalar(1) : exp(-(Scalar(n) * t.log_support));
    terms.push_back(DensityTerm(t.coeff * cn / gamma_n, t.alpha + Scalar(n), t.k, t.log_support));
  }
  return Measure(Scalar(0), std::move(atoms), std::move(terms));
}

}  // namespace berger
