#include "berger/shift.hpp"

#include <limits>

namespace berger {

namespace {

constexpr long kUnbounded = std::numeric_limits<long>::max();

void check_weight(const Scalar& w) {
  if (w.sign() <= 0) throw ShiftError("weights must be strictly positive");
  if (w > Scalar(1)) throw ShiftError("weights must be <= 1 (contraction convention)");
}

}  // namespace

Scalar tail_weight_sq(const TailRule& rule, long n) {
  if (const auto* c = std::get_if<ConstantTail>(&rule)) return c->value * c->value;
  if (const auto* a = std::get_if<AglerTail>(&rule))
    return Scalar(n + 1) / (Scalar(n) + Scalar(a->j));
  const auto& p = std::get<PowerRatioTail>(rule);
  Scalar ratio = Scalar(n + 1) / (Scalar(n) + p.s);
  return pow(ratio, p.r + p.r);
}

Scalar tail_weight(const TailRule& rule, long n) {
  if (const auto* c = std::get_if<ConstantTail>(&rule)) return c->value;
  if (const auto* a = std::get_if<AglerTail>(&rule))
    return sqrt(Scalar(n + 1) / (Scalar(n) + Scalar(a->j)));
  const auto& p = std::get<PowerRatioTail>(rule);
  return pow(Scalar(n + 1) / (Scalar(n) + p.s), p.r);
}

std::string tail_name(const TailRule& rule) {
  if (const auto* c = std::get_if<ConstantTail>(&rule)) return "constant(" + c->value.str() + ")";
  if (const auto* a = std::get_if<AglerTail>(&rule)) return "agler(" + std::to_string(a->j) + ")";
  const auto& p = std::get<PowerRatioTail>(rule);
  return "power_ratio(r=" + p.r.str() + ", s=" + p.s.str() + ")";
}

WeightSequence::WeightSequence(std::vector<Scalar> prefix, std::optional<TailRule> tail,
                               long tail_offset)
    : prefix_(std::move(prefix)), tail_(std::move(tail)), tail_offset_(tail_offset) {
  for (const auto& w : prefix_) check_weight(w);
  if (tail_) {
    if (const auto* c = std::get_if<ConstantTail>(&*tail_)) check_weight(c->value);
    if (const auto* a = std::get_if<AglerTail>(&*tail_)) {
      if (a->j < 2) throw ShiftError("Agler tail needs j >= 2");
    }
    if (const auto* p = std::get_if<PowerRatioTail>(&*tail_)) {
      if (p->r.sign() <= 0) throw ShiftError("power-ratio tail needs r > 0");
      if (p->s < Scalar(1)) throw ShiftError("power-ratio tail needs s >= 1");
    }
    // consistency: the rule must reproduce the prefix at prefix indices
    for (size_t i = 0; i < prefix_.size(); ++i) {
      Scalar expected = tail_weight(*tail_, static_cast<long>(i) + tail_offset_);
      if (expected.is_exact() && prefix_[i].is_exact()) {
        if (expected != prefix_[i]) throw ShiftError("tail rule does not reproduce the prefix");
      } else if (abs(expected - prefix_[i]).to_real() > pow(BigFloat(10), -30)) {
        throw ShiftError("tail rule does not reproduce the prefix");
      }
    }
  }
}

WeightSequence WeightSequence::constant(Scalar value) {
  return WeightSequence({}, ConstantTail{std::move(value)});
}

WeightSequence WeightSequence::agler(long j) { return WeightSequence({}, AglerTail{j}); }

WeightSequence WeightSequence::power_ratio(Scalar r, Scalar s) {
  return WeightSequence({}, PowerRatioTail{std::move(r), std::move(s)});
}

long WeightSequence::available() const {
  return tail_ ? kUnbounded : static_cast<long>(prefix_.size());
}

Scalar WeightSequence::weight(long n) const {
  if (n < 0) throw ShiftError("negative weight index");
  if (n < static_cast<long>(prefix_.size())) return prefix_[static_cast<size_t>(n)];
  if (tail_) return tail_weight(*tail_, n + tail_offset_);
  throw ShiftError("insufficient weights");
}

Scalar WeightSequence::weight_sq(long n) const {
  if (n < 0) throw ShiftError("negative weight index");
  if (n < static_cast<long>(prefix_.size())) {
    const Scalar& w = prefix_[static_cast<size_t>(n)];
    return w * w;
  }
  if (tail_) return tail_weight_sq(*tail_, n + tail_offset_);
  throw ShiftError("insufficient weights");
}

std::vector<Scalar> WeightSequence::weights(long count) const {
  std::vector<Scalar> out;
  out.reserve(static_cast<size_t>(count));
  for (long n = 0; n < count; ++n) out.push_back(weight(n));
  return out;
}

MomentSequence::MomentSequence(std::vector<Scalar> values, std::function<Scalar(long)> generator)
    : values_(std::move(values)), generator_(std::move(generator)) {
  if (values_.empty() && !generator_) throw ShiftError("empty moment sequence");
  if (!values_.empty() && values_[0] != Scalar(1))
    throw ShiftError("moment sequence must start at gamma_0 = 1");
  for (const auto& g : values_)
    if (g.sign() <= 0) throw ShiftError("moments must be strictly positive");
}

Scalar MomentSequence::at(long n) const {
  if (n < 0) throw ShiftError("negative moment index");
  while (static_cast<long>(values_.size()) <= n) {
    if (!generator_) throw ShiftError("insufficient moments");
    Scalar g = generator_(static_cast<long>(values_.size()));
    if (g.sign() <= 0) throw ShiftError("moments must be strictly positive");
    values_.push_back(std::move(g));
  }
  return values_[static_cast<size_t>(n)];
}

long MomentSequence::available() const {
  return generator_ ? kUnbounded : static_cast<long>(values_.size());
}

MomentSequence moments_from_weights(const WeightSequence& w, long n_max) {
  if (n_max < 0) throw ShiftError("moment count must be >= 0");
  if (!w.has_tail() && n_max > static_cast<long>(w.prefix().size()))
    throw ShiftError("insufficient weights");
  std::vector<Scalar> gamma;
  gamma.reserve(static_cast<size_t>(n_max) + 1);
  gamma.push_back(Scalar(1));
  for (long n = 1; n <= n_max; ++n) gamma.push_back(gamma.back() * w.weight_sq(n - 1));
  return MomentSequence(std::move(gamma));
}

MomentSequence moments_of(const WeightSequence& w) {
  // lazy product of squared weights
  auto cache = std::make_shared<std::vector<Scalar>>();
  cache->push_back(Scalar(1));
  return MomentSequence({Scalar(1)}, [w, cache](long n) {
    while (static_cast<long>(cache->size()) <= n)
      cache->push_back(cache->back() * w.weight_sq(static_cast<long>(cache->size()) - 1));
    return (*cache)[static_cast<size_t>(n)];
  });
}

WeightSequence weights_from_moments(const MomentSequence& gamma, long count) {
  std::vector<Scalar> weights;
  weights.reserve(static_cast<size_t>(count));
  for (long n = 0; n < count; ++n) {
    Scalar g0 = gamma.at(n), g1 = gamma.at(n + 1);
    if (g0.sign() <= 0 || g1.sign() <= 0) throw ShiftError("moments must be strictly positive");
    weights.push_back(sqrt(g1 / g0));
  }
  return WeightSequence(std::move(weights));
}

WeightSequence pth_power_shift(const WeightSequence& w, const Scalar& p) {
  if (p.sign() <= 0) throw ShiftError("power must be > 0");
  std::vector<Scalar> prefix;
  prefix.reserve(w.prefix().size());
  for (const auto& a : w.prefix()) prefix.push_back(pow(a, p));
  std::optional<TailRule> tail;
  if (w.has_tail()) {
    const TailRule& rule = *w.tail();
    if (const auto* c = std::get_if<ConstantTail>(&rule)) {
      tail = ConstantTail{pow(c->value, p)};
    } else if (const auto* a = std::get_if<AglerTail>(&rule)) {
      tail = PowerRatioTail{p / Scalar(2), Scalar(a->j)};
    } else {
      const auto& pr = std::get<PowerRatioTail>(rule);
      tail = PowerRatioTail{pr.r * p, pr.s};
    }
  }
  return WeightSequence(std::move(prefix), std::move(tail), w.tail_offset());
}

WeightSequence schur_product(const WeightSequence& a, const WeightSequence& b, long count) {
  if (a.has_tail() && b.has_tail()) {
    // constant tails compose; anything else is materialized
    const auto* ca = std::get_if<ConstantTail>(&*a.tail());
    const auto* cb = std::get_if<ConstantTail>(&*b.tail());
    if (ca && cb && a.prefix().empty() && b.prefix().empty())
      return WeightSequence({}, ConstantTail{ca->value * cb->value});
  } else if (!a.has_tail() || !b.has_tail()) {
    long la = a.available(), lb = b.available();
    if (la != lb && !(a.has_tail() || b.has_tail()))
      throw ShiftError("length mismatch without tail rules");
    count = std::min({count, la, lb});
  }
  std::vector<Scalar> prefix;
  prefix.reserve(static_cast<size_t>(count));
  for (long n = 0; n < count; ++n) prefix.push_back(a.weight(n) * b.weight(n));
  return WeightSequence(std::move(prefix));
}

WeightSequence aluthge_transform(const WeightSequence& w, long count) {
  std::vector<Scalar> prefix;
  prefix.reserve(static_cast<size_t>(count));
  for (long n = 0; n < count; ++n) prefix.push_back(sqrt(w.weight(n) * w.weight(n + 1)));
  return WeightSequence(std::move(prefix));
}

WeightSequence iterated_aluthge(const WeightSequence& w, long iterations, long count) {
  if (iterations < 1) throw ShiftError("iterated Aluthge transform needs n >= 1");
  // each application consumes one weight off the end
  WeightSequence current = aluthge_transform(w, count + iterations - 1);
  for (long i = 1; i < iterations; ++i)
    current = aluthge_transform(current, count + iterations - 1 - i);
  return current;
}

WeightSequence restriction_shift(const WeightSequence& w, long n) {
  if (n < 0) throw ShiftError("restriction index must be >= 0");
  if (n == 0) return w;
  std::vector<Scalar> prefix;
  long drop = std::min<long>(n, static_cast<long>(w.prefix().size()));
  prefix.assign(w.prefix().begin() + drop, w.prefix().end());
  if (!w.has_tail() && drop < n) throw ShiftError("insufficient weights");
  return WeightSequence(std::move(prefix), w.tail(), w.tail_offset() + n);
}

BackstepResult backstep_extension(const Measure& mu, const Scalar& x) {
  if (x.sign() <= 0) throw ShiftError("back-step parameter x must be > 0");
  BackstepResult result;
  if (mu.special())
    throw FamilyViolation("back-step extension of a quadrature-backed measure");

  // I = integral of (1/t) dmu, finite iff there is no mass at 0 and every
  // density term has alpha > 0 (the n = -1 moment, analytically continued).
  if (mu.zero_mass().sign() > 0) {
    result.reason = "1/t not integrable (mass at 0)";
    return result;
  }
  for (const auto& term : mu.terms()) {
    if (term.alpha.sign() <= 0) {
      result.reason = "1/t not integrable";
      return result;
    }
  }
  Scalar integral(0);
  for (const auto& a : mu.atoms())
    integral += a.log_pos.is_zero() ? a.mass : a.mass * exp(a.log_pos);
  for (const auto& term : mu.terms()) integral += term_moment(term, -1);
  result.one_over_t_integral = integral;

  if (x * x * integral > Scalar(1)) {
    result.reason = "x too large";
    return result;
  }

  Scalar x2 = x * x;
  std::vector<Atom> atoms;
  for (const auto& a : mu.atoms()) {
    Scalar inv_pos = a.log_pos.is_zero() ? Scalar(1) : exp(a.log_pos);
    atoms.push_back(Atom{a.log_pos, x2 * a.mass * inv_pos});
  }
  std::vector<DensityTerm> terms;
  for (const auto& term : mu.terms()) {
    // (1/t) * term: alpha drops by one and the 1/c of the scaled family shows
    // up as e^{l}
    Scalar scale = term.log_support.is_zero() ? Scalar(1) : exp(term.log_support);
    terms.push_back(
        DensityTerm(x2 * term.coeff * scale, term.alpha - Scalar(1), term.k, term.log_support));
  }
  Scalar at_zero = Scalar(1) - x2 * integral;
  if (at_zero.sign() < 0) at_zero = Scalar(0);  // guard rounding at the boundary
  result.feasible = true;
  result.measure = Measure(at_zero, std::move(atoms), std::move(terms));
  return result;
}

}  // namespace berger
