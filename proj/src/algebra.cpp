#include "berger/algebra.hpp"

#include <algorithm>
#include <sstream>

namespace berger {

std::vector<PartialFraction> two_pole_partial_fractions(const Scalar& a, long J, const Scalar& b,
                                                        long K) {
  if (J < 1 || K < 1) throw MeasureError("pole orders must be >= 1");
  if (a == b) throw MeasureError("poles must be distinct");
  std::vector<PartialFraction> out;
  out.reserve(static_cast<size_t>(J + K));
  // residues at -a: coefficient of 1/(s+a)^(J-r) is the r-th Taylor
  // coefficient of (s+b)^-K about s = -a
  Scalar d = b - a;
  for (long r = 0; r < J; ++r) {
    Scalar c = binomial_coefficient(K + r - 1, r) / pow(d, K + r);
    if (r % 2) c = -c;
    out.push_back(PartialFraction{a, J - r, c});
  }
  for (long r = 0; r < K; ++r) {
    Scalar c = binomial_coefficient(J + r - 1, r) / pow(-d, J + r);
    if (r % 2) c = -c;
    out.push_back(PartialFraction{b, K - r, c});
  }
  return out;
}

Scalar evaluate_partial_fractions(const std::vector<PartialFraction>& pf, const Scalar& s) {
  Scalar total(0);
  for (const auto& p : pf) total += p.coefficient / pow(s + p.pole, p.multiplicity);
  return total;
}

Measure square_atomic(const Measure& nu) {
  if (!nu.purely_atomic()) throw MeasureError("square_atomic needs a purely atomic measure");
  const auto& atoms = nu.atoms();
  std::vector<Atom> squared;
  squared.reserve(atoms.size() * (atoms.size() + 1) / 2);
  for (size_t i = 0; i < atoms.size(); ++i) {
    for (size_t j = i; j < atoms.size(); ++j) {
      Scalar mass = atoms[i].mass * atoms[j].mass;
      if (i != j) mass += mass;
      squared.push_back(Atom{atoms[i].log_pos + atoms[j].log_pos, mass});
    }
  }
  // mass at zero pairs with everything, including itself
  Scalar z = nu.zero_mass();
  Scalar zero_out(0);
  if (z.sign() > 0) zero_out = z * (nu.total_mass() + nu.total_mass() - z);
  return Measure(zero_out, std::move(squared), {});
}

std::vector<DensityTerm> convolve_terms(const DensityTerm& t1, const DensityTerm& t2) {
  if (!t1.k_is_nonneg_int() || !t2.k_is_nonneg_int())
    throw FamilyViolation("outside symbolic family: k must be a nonnegative integer");
  long j = t1.k.as_long();
  long k = t2.k.as_long();
  Scalar log_out = t1.log_support + t2.log_support;
  Scalar cc = t1.coeff * t2.coeff;

  if (t1.alpha == t2.alpha) {
    // equal poles: Beta(j+1, k+1) collapses the product to one term
    Scalar beta = factorial(j) * factorial(k) / factorial(j + k + 1);
    return {DensityTerm(cc * beta, t1.alpha, Scalar(j + k + 1), log_out)};
  }

  // distinct poles at s = -(alpha+1): expand and read each 1/(s+p)^m back as
  // a density with exponent p-1 and log power m-1
  Scalar a = t1.alpha + Scalar(1);
  Scalar b = t2.alpha + Scalar(1);
  Scalar front = cc * factorial(j) * factorial(k);
  std::vector<DensityTerm> out;
  for (const auto& p : two_pole_partial_fractions(a, j + 1, b, k + 1)) {
    Scalar coeff = front * p.coefficient / factorial(p.multiplicity - 1);
    if (coeff.is_zero()) continue;
    out.push_back(DensityTerm(coeff, p.pole - Scalar(1), Scalar(p.multiplicity - 1), log_out));
  }
  return out;
}

Measure square_measure(const Measure& nu, const SquareOptions& opts) {
  if (!nu.in_symbolic_family())
    throw FamilyViolation("outside symbolic family: numeric-only fallback required");

  const auto& atoms = nu.atoms();
  const auto& terms = nu.terms();
  std::vector<Atom> out_atoms;
  std::vector<DensityTerm> out_terms;

  // atom x atom
  for (size_t i = 0; i < atoms.size(); ++i) {
    for (size_t j = i; j < atoms.size(); ++j) {
      Scalar mass = atoms[i].mass * atoms[j].mass;
      if (i != j) mass += mass;
      out_atoms.push_back(Atom{atoms[i].log_pos + atoms[j].log_pos, mass});
    }
  }
  // atom x term: translation in the log domain
  for (const auto& a : atoms) {
    for (const auto& t : terms) {
      Scalar coeff = Scalar(2) * a.mass * t.coeff;
      out_terms.push_back(DensityTerm(coeff, t.alpha, t.k, t.log_support + a.log_pos));
    }
  }
  // term x term
  for (size_t i = 0; i < terms.size(); ++i) {
    for (size_t j = i; j < terms.size(); ++j) {
      for (auto& piece : convolve_terms(terms[i], terms[j])) {
        if (i != j) piece.coeff += piece.coeff;
        out_terms.push_back(std::move(piece));
      }
    }
  }
  // mass at zero absorbs every pair containing zero
  Scalar z = nu.zero_mass();
  Scalar zero_out(0);
  if (z.sign() > 0) zero_out = z * (nu.total_mass() + nu.total_mass() - z);

  Measure result(zero_out, std::move(out_atoms), std::move(out_terms));

  if (opts.selfcheck_moments > 0) {
    BigFloat floor = pow(BigFloat(10), -(static_cast<int>(working_precision()) - 12));
    for (long n = 0; n <= opts.selfcheck_moments; ++n) {
      Scalar lhs = measure_moment(result, n);
      Scalar rhs = measure_moment(nu, n);
      rhs *= rhs;
      if (lhs.is_exact() && rhs.is_exact()) {
        if (lhs != rhs) throw MeasureError("square self-check failed (exact)");
      } else if (abs(lhs - rhs).to_real() > floor * (abs(rhs).to_real() + 1)) {
        throw MeasureError("square self-check failed");
      }
    }
  }
  return result;
}

Measure polynomial_square_direct(const std::vector<Scalar>& coeffs) {
  if (coeffs.empty()) throw MeasureError("empty polynomial");
  long n = static_cast<long>(coeffs.size()) - 1;
  auto a = [&](long i) -> const Scalar& { return coeffs[static_cast<size_t>(i)]; };

  // probability check: integral sum a_i/(i+1) must be 1, g >= 0 on a grid
  Scalar integral(0);
  for (long i = 0; i <= n; ++i) integral += a(i) / Scalar(i + 1);
  bool unit = integral.is_rational() ? integral == Scalar(1)
                                     : abs(integral - Scalar(1)).to_real() < pow(BigFloat(10), -12);
  if (!unit) throw MeasureError("non-probability input: polynomial integral != 1");
  for (int s = 0; s <= 512; ++s) {
    BigFloat x = BigFloat(s) / 512;
    BigFloat val(0);
    for (long i = n; i >= 0; --i) val = val * x + a(i).to_real();
    if (val < -pow(BigFloat(10), -30)) throw MeasureError("non-probability input: negative density");
  }

  std::vector<DensityTerm> terms;
  // - ln x * sum a_i^2 x^i
  for (long i = 0; i <= n; ++i) {
    if (a(i).is_zero()) continue;
    terms.push_back(DensityTerm(a(i) * a(i), Scalar(i), Scalar(1)));
  }
  // positive shifts: sum_{i=0}^{n-1} ((1-x^{i+1})/(i+1)) sum_j a_j a_{j+i+1} x^j
  for (long i = 0; i <= n - 1; ++i) {
    for (long jj = 0; jj <= n - i - 1; ++jj) {
      Scalar c = a(jj) * a(jj + i + 1) / Scalar(i + 1);
      if (c.is_zero()) continue;
      terms.push_back(DensityTerm(c, Scalar(jj), Scalar(0)));
      terms.push_back(DensityTerm(-c, Scalar(jj + i + 1), Scalar(0)));
    }
  }
  // negative shifts: i = -n-1 .. -2 with inner j = -i-1 .. n
  for (long i = -n - 1; i <= -2; ++i) {
    for (long jj = -i - 1; jj <= n; ++jj) {
      Scalar c = a(jj) * a(jj + i + 1) / Scalar(i + 1);
      if (c.is_zero()) continue;
      terms.push_back(DensityTerm(c, Scalar(jj), Scalar(0)));
      terms.push_back(DensityTerm(-c, Scalar(jj + i + 1), Scalar(0)));
    }
  }
  return Measure::from_terms(std::move(terms));
}

const char* to_string(SqrtFailure f) {
  switch (f) {
    case SqrtFailure::none: return "none";
    case SqrtFailure::not_atomic: return "not atomic";
    case SqrtFailure::no_atom_at_one: return "no atom at 1";
    case SqrtFailure::support_mismatch: return "support mismatch";
    case SqrtFailure::negative_mass: return "negative mass";
    case SqrtFailure::residual_exceeded: return "verification residual exceeded";
  }
  return "?";
}

namespace {

// Vandermonde moment system: sum_i phi_i x_i^k = b_k, k = 0..M-1, solved by
// the Bjorck-Pereyra primal recurrences.
std::vector<BigFloat> solve_vandermonde(const std::vector<BigFloat>& x, std::vector<BigFloat> b) {
  long m = static_cast<long>(x.size());
  auto X = [&](long i) -> const BigFloat& { return x[static_cast<size_t>(i)]; };
  auto B = [&](long i) -> BigFloat& { return b[static_cast<size_t>(i)]; };
  for (long k = 0; k <= m - 2; ++k)
    for (long i = m - 1; i >= k + 1; --i) B(i) -= X(k) * B(i - 1);
  for (long k = m - 2; k >= 0; --k) {
    for (long i = k + 1; i <= m - 1; ++i) B(i) /= X(i) - X(i - k - 1);
    for (long i = k; i <= m - 2; ++i) B(i) -= B(i + 1);
  }
  return b;
}

SqrtCandidate sqrt_failure(SqrtFailure kind, std::string message) {
  SqrtCandidate out;
  out.failure = kind;
  out.message = std::move(message);
  return out;
}

}  // namespace

SqrtCandidate sqrt_atomic(const Measure& mu, const Scalar& tol) {
  if (!mu.purely_atomic())
    return sqrt_failure(SqrtFailure::not_atomic, "input has density terms");
  const auto& atoms = mu.atoms();
  if (atoms.empty() || !atoms.front().log_pos.is_zero())
    return sqrt_failure(SqrtFailure::no_atom_at_one, "input has no atom at t = 1");

  // Forced support: {0 if mu has mass at zero} plus the mu-atoms in
  // [sqrt(x_0), 1], i.e. logs at most half the largest positive-atom log.
  Scalar half_edge = atoms.back().log_pos / Scalar(2);
  std::vector<Scalar> cand;
  for (const auto& a : atoms)
    if (a.log_pos <= half_edge) cand.push_back(a.log_pos);

  // Coverage pre-check: every atom of mu must be a product of candidate
  // support points.  (The candidate set may carry points the true root does
  // not use; those resolve to zero mass below.)
  for (const auto& a : atoms) {
    bool covered = false;
    for (size_t i = 0; i < cand.size() && !covered; ++i)
      for (size_t j = i; j < cand.size() && !covered; ++j)
        covered = (cand[i] + cand[j] == a.log_pos);
    if (!covered)
      return sqrt_failure(SqrtFailure::support_mismatch,
                          "atom at log " + a.log_pos.str() +
                              " is not a product of admissible support points");
  }

  // Greedy mass matching in decreasing position order.
  std::vector<Scalar> phi(cand.size(), Scalar(0));
  phi[0] = sqrt(atoms.front().mass);
  for (size_t idx = 1; idx < cand.size(); ++idx) {
    Scalar rem = mu.atom_mass_at(cand[idx]);
    for (size_t i = 1; i < idx; ++i) {
      for (size_t j = i; j < idx; ++j) {
        if (cand[i] + cand[j] == cand[idx]) {
          Scalar contrib = phi[i] * phi[j];
          if (i != j) contrib += contrib;
          rem -= contrib;
        }
      }
    }
    Scalar value = rem / (phi[0] + phi[0]);
    if (value < -tol)
      return sqrt_failure(SqrtFailure::negative_mass,
                          "forced mass at log " + cand[idx].str() + " is negative (" +
                              value.str() + ")");
    if (value.sign() < 0 || abs(value) <= tol) value = Scalar(0);
    phi[idx] = value;
  }

  Scalar zeta(0);
  if (mu.zero_mass().sign() > 0) {
    Scalar inner = Scalar(1) - mu.zero_mass();
    if (inner.sign() < 0)
      return sqrt_failure(SqrtFailure::negative_mass, "mass at zero exceeds 1");
    zeta = Scalar(1) - sqrt(inner);  // root of z(2 - z) = mu({0}) in [0,1]
  }

  std::vector<Atom> cand_atoms;
  for (size_t i = 0; i < cand.size(); ++i)
    if (phi[i].sign() > 0) cand_atoms.push_back(Atom{cand[i], phi[i]});
  SqrtCandidate out;
  out.method = SqrtMethod::algorithmic;
  out.measure = Measure::from_atoms(std::move(cand_atoms), zeta);

  // Vandermonde path: moment matching on the candidate support.
  {
    std::vector<BigFloat> nodes;
    if (zeta.sign() > 0 || mu.zero_mass().sign() > 0) nodes.push_back(BigFloat(0));
    for (size_t i = 0; i < cand.size(); ++i)
      nodes.push_back(exp(-cand[i].to_real()));
    std::vector<BigFloat> rhs;
    for (size_t k = 0; k < nodes.size(); ++k)
      rhs.push_back(sqrt(measure_moment(mu, static_cast<long>(k)).to_real()));
    std::vector<BigFloat> vdm = solve_vandermonde(nodes, std::move(rhs));
    size_t base = (nodes.size() > cand.size()) ? 1 : 0;
    BigFloat disagree(0);
    if (base == 1) {
      BigFloat d = abs(vdm[0] - zeta.to_real());
      if (d > disagree) disagree = d;
    }
    for (size_t i = 0; i < cand.size(); ++i) {
      BigFloat d = abs(vdm[base + i] - phi[i].to_real());
      if (d > disagree) disagree = d;
    }
    out.path_disagreement = Scalar(disagree);
  }

  // Verification: the squared candidate must reproduce mu exactly (masses and
  // the first |supp mu| + 1 moments).
  Measure squared = square_atomic(*out.measure);
  Scalar mass_residual(0);
  bool extra_support = false;
  for (const auto& a : squared.atoms()) {
    Scalar target = mu.atom_mass_at(a.log_pos);
    if (target.is_zero() && a.mass > tol) extra_support = true;
    Scalar d = abs(a.mass - target);
    if (d > mass_residual) mass_residual = d;
  }
  for (const auto& a : mu.atoms()) {
    Scalar d = abs(squared.atom_mass_at(a.log_pos) - a.mass);
    if (d > mass_residual) mass_residual = d;
  }
  {
    Scalar dz = abs(squared.zero_mass() - mu.zero_mass());
    if (dz > mass_residual) mass_residual = dz;
  }
  long n_match = static_cast<long>(atoms.size()) + (mu.zero_mass().sign() > 0 ? 1 : 0);
  Scalar moment_residual(0);
  for (long n = 0; n <= n_match; ++n) {
    Scalar lhs = measure_moment(mu, n);
    Scalar rhs = measure_moment(squared, n);
    Scalar d = abs(lhs - rhs);
    if (d > moment_residual) moment_residual = d;
  }
  out.max_mass_residual = mass_residual;
  out.max_moment_residual = moment_residual;

  if (extra_support) {
    out.failure = SqrtFailure::support_mismatch;
    out.message = "candidate square has support outside supp(mu)";
    return out;
  }
  if (mass_residual > tol || moment_residual > tol) {
    out.failure = SqrtFailure::residual_exceeded;
    out.message = "candidate square does not match mu within tolerance";
    return out;
  }
  out.verified = true;
  return out;
}

GeometricSqrtResult sqrt_geometric(const std::vector<Scalar>& rho, std::optional<Scalar> log_r) {
  GeometricSqrtResult out;
  if (rho.empty() || rho.front().sign() <= 0) {
    out.message = "rho_0 must be strictly positive";
    out.failure_index = 0;
    return out;
  }
  std::vector<Scalar>& phi = out.coeffs;
  phi.reserve(rho.size());
  phi.push_back(sqrt(rho.front()));
  for (size_t n = 1; n < rho.size(); ++n) {
    Scalar acc = rho[n];
    for (size_t i = 1; i < n; ++i) acc -= phi[i] * phi[n - i];
    Scalar value = acc / (phi[0] + phi[0]);
    if (value.sign() < 0) {
      out.failure_index = static_cast<long>(n);
      out.message = "negative coefficient at index " + std::to_string(n);
      return out;
    }
    phi.push_back(std::move(value));
  }
  // verify by re-squaring the series
  Scalar residual(0);
  for (size_t n = 0; n < rho.size(); ++n) {
    Scalar acc(0);
    for (size_t i = 0; i <= n; ++i) acc += phi[i] * phi[n - i];
    Scalar d = abs(acc - rho[n]);
    if (d > residual) residual = d;
  }
  out.max_residual = residual;
  out.ok = true;
  if (log_r) {
    if (log_r->sign() <= 0) throw MeasureError("geometric support needs log r > 0");
    std::vector<Atom> atoms;
    for (size_t n = 0; n < phi.size(); ++n)
      if (phi[n].sign() > 0) atoms.push_back(Atom{*log_r * Scalar(static_cast<long>(n)), phi[n]});
    out.measure = Measure::from_atoms(std::move(atoms));
  }
  return out;
}

Measure pth_power_lebesgue(const Scalar& q) {
  if (q.sign() <= 0) throw MeasureError("q must be > 0");
  Scalar coeff = Scalar(1) / tgamma(q);
  return Measure::from_terms({DensityTerm(coeff, Scalar(0), q - Scalar(1))});
}

namespace {

CatalogResult catalog_sqrt_a3(std::optional<long> terms_override) {
  // sqrt(2(1-t) dt) = sqrt(2) sum_m t^(1/2) (-ln t)^(2m) / (2^(4m) (m!)^2) dt;
  // moments sqrt(2)/(sqrt(n+1) sqrt(n+2)).  Successive moment-0 contributions
  // shrink by a factor < 1/9, so the tail after the last kept term is bounded
  // by (9/8) of the next one.
  CatalogResult out;
  out.name = "sqrt-a3";
  const BigFloat target = pow(BigFloat(10), -12);
  std::vector<DensityTerm> terms;
  Scalar three_halves = Scalar::ratio(3, 2);
  long m = 0;
  Scalar sixteen_pow(1);   // 2^(4m)
  Scalar mfact(1);         // m!
  while (true) {
    Scalar coeff = Scalar::sqrt_rational(Rational(2)) / (sixteen_pow * mfact * mfact);
    Scalar contribution = coeff * factorial(2 * m) / pow(three_halves, 2 * m + 1);
    bool keep = terms_override ? (m < *terms_override)
                               : (m == 0 || BigFloat(contribution.to_real() * 9 / 8) >= target);
    if (!keep) {
      out.truncation_bound = contribution * Scalar::ratio(9, 8);
      break;
    }
    terms.push_back(DensityTerm(coeff, Scalar::ratio(1, 2), Scalar(2 * m)));
    ++m;
    sixteen_pow *= Scalar(16);
    mfact *= Scalar(m);
    if (m > 4096) throw MeasureError("sqrt-a3 truncation did not converge");
  }
  out.terms_used = m;
  out.measure = Measure::from_terms(std::move(terms));
  out.notes = "series square root of 2(1-t)dt; moments sqrt(2)/sqrt((n+1)(n+2))";
  return out;
}

}  // namespace

CatalogResult catalog_sqrt(const std::string& name, const std::map<std::string, Scalar>& params) {
  auto get = [&](const std::string& key) -> std::optional<Scalar> {
    auto it = params.find(key);
    if (it == params.end()) return std::nullopt;
    return it->second;
  };
  if (name == "sqrt-a3" || name == "sqrtA3") {
    std::optional<long> terms;
    if (auto t = get("terms")) terms = t->as_long();
    return catalog_sqrt_a3(terms);
  }
  if (name == "pth-lebesgue" || name == "lebesgue-pth") {
    auto q = get("q");
    if (!q) throw MeasureError("catalog entry pth-lebesgue needs parameter q");
    CatalogResult out;
    out.name = name;
    out.measure = pth_power_lebesgue(*q);
    out.terms_used = 1;
    out.notes = "q-th power of Lebesgue measure; moments (n+1)^(-q)";
    return out;
  }
  if (name == "levy") {
    auto c = get("c");
    if (!c) throw MeasureError("catalog entry levy needs parameter c");
    CatalogResult out;
    out.name = name;
    out.measure = transport_levy(*c);
    out.terms_used = 0;
    out.notes = "transported half-line density; moments e^(c - c sqrt(n+1))";
    return out;
  }
  throw MeasureError("unknown catalog entry: " + name);
}

Measure transport_from_halfline(const HalfLineMonomialExp& g) {
  return Measure::from_terms({DensityTerm(g.coeff, g.alpha, g.k)});
}

Measure transport_levy(const Scalar& c) {
  if (c.sign() <= 0) throw MeasureError("levy transport needs c > 0");
  return Measure(Scalar(0), {}, {}, SpecialDensity{SpecialDensity::Kind::levy, c, exp(c)});
}

std::variant<HalfLineMonomialExp, SpecialDensity> transport_to_halfline(const Measure& mu) {
  if (mu.special()) {
    if (!mu.atoms().empty() || !mu.terms().empty() || mu.zero_mass().sign() > 0)
      throw MeasureError("half-line transport needs a pure density");
    return *mu.special();
  }
  if (mu.terms().size() == 1 && mu.atoms().empty() && mu.zero_mass().sign() == 0 &&
      mu.terms().front().log_support.is_zero()) {
    const auto& t = mu.terms().front();
    return HalfLineMonomialExp{t.coeff, t.alpha, t.k};
  }
  throw MeasureError("unsupported density for half-line transport");
}

}  // namespace berger
