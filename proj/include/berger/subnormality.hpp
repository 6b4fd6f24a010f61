#pragma once

// Finite-order subnormality evidence for weighted shifts: k-hyponormality via
// positivity of Hankel moment windows, n-contractivity via alternating
// binomial sums, and a sampled complete-monotonicity scan.  Verdicts are
// exact for rational moments and run at working precision otherwise.
//
// Finitely many passing tests never prove subnormality; reports are evidence
// only.

#include "berger/shift.hpp"

#include <optional>
#include <string>
#include <vector>

namespace berger {

struct HankelWindow {
  long m = 0;
  long k = 0;
  // (k+1) x (k+1), entry (i,j) = gamma_{m+i+j}
  std::vector<std::vector<Scalar>> entries;
};

HankelWindow hankel_matrix(const MomentSequence& gamma, long m, long k);

struct WindowVerdict {
  long m = 0;
  bool psd = false;
  bool exact = false;      // decided in exact rational arithmetic
  Scalar certificate{0};   // min pivot when PSD; x^T A x < 0 on failure
  std::vector<Scalar> witness;  // failing direction, empty when PSD
};

struct KHyponormalityReport {
  long k = 0;
  long m_max = 0;
  bool all_pass = false;
  std::optional<long> first_failure_m;
  std::vector<WindowVerdict> windows;
  std::string to_text() const;
};

enum class PsdMode { automatic, exact, floating };

// Positive semidefiniteness of every window m = 0..m_max.  The floating path
// uses a pivoted LDL^T factorization with threshold tol * trace; the exact
// path runs the same factorization in rational arithmetic with zero-pivot
// rows required to vanish identically.
KHyponormalityReport is_k_hyponormal(const MomentSequence& gamma, long k, long m_max,
                                     const Scalar& tol, PsdMode mode = PsdMode::automatic);
KHyponormalityReport is_k_hyponormal(const WeightSequence& w, long k, long m_max,
                                     const Scalar& tol, PsdMode mode = PsdMode::automatic);

struct ContractivityReport {
  long n = 0;
  long m_max = 0;
  bool all_pass = false;
  std::optional<long> first_failure_m;
  std::vector<Scalar> sums;  // indexed by m
  std::string to_text() const;
};

// sum_j (-1)^j C(n,j) gamma_{m+j} >= 0 for m = 0..m_max, exact when rational.
ContractivityReport is_n_contractive(const MomentSequence& gamma, long n, long m_max);

struct CMScanReport {
  long max_order = 0;
  long m_max = 0;
  bool all_pass = false;
  std::vector<ContractivityReport> orders;  // n = 1..max_order
  std::string to_text() const;
};

CMScanReport complete_monotonicity_scan(const MomentSequence& gamma, long max_order, long m_max);

}  // namespace berger
