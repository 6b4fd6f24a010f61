#pragma once

// Weight sequences, moment sequences, and shift-level transformations:
// p-th powers, Schur products, Aluthge transform, restriction, and the
// back-step extension.

#include "berger/measure.hpp"
#include "berger/scalar.hpp"

#include <functional>
#include <optional>
#include <variant>
#include <vector>

namespace berger {

class ShiftError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Closed enumeration of tail rules. All of them produce weights <= 1 with
// exactly representable squares, which keeps moment arithmetic rational.
struct ConstantTail {
  Scalar value;  // 0 < value <= 1
};
struct AglerTail {
  long j;  // >= 2; alpha_n = sqrt((n+1)/(n+j))
};
struct PowerRatioTail {
  Scalar r;  // > 0; alpha_n = ((n+1)/(n+s))^r
  Scalar s;  // >= 1
};
using TailRule = std::variant<ConstantTail, AglerTail, PowerRatioTail>;

Scalar tail_weight(const TailRule& rule, long n);
Scalar tail_weight_sq(const TailRule& rule, long n);
std::string tail_name(const TailRule& rule);

class WeightSequence {
 public:
  WeightSequence() = default;
  // offset shifts the tail rule: weight(n) = rule(n + offset) past the prefix.
  WeightSequence(std::vector<Scalar> prefix, std::optional<TailRule> tail = std::nullopt,
                 long tail_offset = 0);

  static WeightSequence constant(Scalar value);
  static WeightSequence agler(long j);       // A_j; agler(2) is the Bergman shift
  static WeightSequence bergman() { return agler(2); }
  static WeightSequence power_ratio(Scalar r, Scalar s);

  // Number of weights available (LONG_MAX when a tail rule is present).
  long available() const;
  bool has_tail() const { return tail_.has_value(); }
  const std::optional<TailRule>& tail() const { return tail_; }
  long tail_offset() const { return tail_offset_; }
  const std::vector<Scalar>& prefix() const { return prefix_; }

  Scalar weight(long n) const;     // throws "insufficient weights" past the end
  Scalar weight_sq(long n) const;  // exact where the rule is exact
  std::vector<Scalar> weights(long count) const;

 private:
  std::vector<Scalar> prefix_;
  std::optional<TailRule> tail_;
  long tail_offset_ = 0;
};

class MomentSequence {
 public:
  MomentSequence() = default;
  explicit MomentSequence(std::vector<Scalar> values,
                          std::function<Scalar(long)> generator = nullptr);

  // gamma_0 = 1, gamma_n = prod_{i<n} alpha_i^2.
  Scalar at(long n) const;
  long available() const;  // LONG_MAX with a generator

 private:
  mutable std::vector<Scalar> values_;
  std::function<Scalar(long)> generator_;
};

MomentSequence moments_from_weights(const WeightSequence& w, long n_max);
// Lazy variant backed by the weight sequence itself.
MomentSequence moments_of(const WeightSequence& w);
WeightSequence weights_from_moments(const MomentSequence& gamma, long count);

WeightSequence pth_power_shift(const WeightSequence& w, const Scalar& p);
// Entrywise product; length is the shorter operand unless both carry tails,
// in which case `count` weights are materialized.
WeightSequence schur_product(const WeightSequence& a, const WeightSequence& b, long count);
// Weight at n is sqrt(alpha_n * alpha_{n+1}); materializes `count` weights.
WeightSequence aluthge_transform(const WeightSequence& w, long count);
WeightSequence iterated_aluthge(const WeightSequence& w, long iterations, long count);
// Drop the first n weights.
WeightSequence restriction_shift(const WeightSequence& w, long n);

// Back-step extension of the Berger measure mu by a prefixed weight x:
// feasible iff 1/t is mu-integrable and x^2 <= 1/||1/t||, in which case the
// measure is (x^2/t) dmu + (1 - x^2 ||1/t||) delta_0.
struct BackstepResult {
  bool feasible = false;
  std::optional<Measure> measure;
  Scalar one_over_t_integral;  // meaningful when integrable
  std::string reason;          // set when infeasible
};
BackstepResult backstep_extension(const Measure& mu, const Scalar& x);

}  // namespace berger
