#include "berger/subnormality.hpp"

#include <sstream>

namespace berger {

HankelWindow hankel_matrix(const MomentSequence& gamma, long m, long k) {
  if (m < 0 || k < 0) throw ShiftError("hankel window needs m, k >= 0");
  HankelWindow window;
  window.m = m;
  window.k = k;
  window.entries.assign(static_cast<size_t>(k) + 1,
                        std::vector<Scalar>(static_cast<size_t>(k) + 1));
  for (long i = 0; i <= k; ++i)
    for (long j = 0; j <= k; ++j)
      window.entries[static_cast<size_t>(i)][static_cast<size_t>(j)] = gamma.at(m + i + j);
  return window;
}

namespace {

template <class T>
struct PsdOutcome {
  bool psd = true;
  T certificate{0};       // min pivot on pass, quadratic-form value on fail
  std::vector<T> witness;  // direction with x^T A x < 0
};

// Witness from the elimination state: solve L^T x = v over the first rows.
template <class T>
std::vector<T> lt_solve(const std::vector<std::vector<T>>& L, std::vector<T> v, size_t upto) {
  for (size_t jj = upto + 1; jj-- > 0;) {
    T acc = v[jj];
    for (size_t r = jj + 1; r <= upto; ++r) acc -= L[r][jj] * v[r];
    v[jj] = acc;
  }
  return v;
}

// Pivoted LDL^T positivity test.  theta_neg: pivots below -theta_neg fail;
// theta_zero: |pivot| <= theta_zero is treated as a kernel row, which must
// then vanish within theta_zero.
template <class T>
PsdOutcome<T> ldlt_psd(std::vector<std::vector<T>> A, const T& theta_neg, const T& theta_zero) {
  const size_t n = A.size();
  PsdOutcome<T> out;
  std::vector<std::vector<T>> L(n, std::vector<T>(n, T(0)));
  for (size_t i = 0; i < n; ++i) L[i][i] = T(1);
  bool have_pivot = false;

  for (size_t i = 0; i < n; ++i) {
    T d = A[i][i];
    if (d < -theta_neg) {
      out.psd = false;
      out.certificate = d;
      out.witness = lt_solve(L, [&] {
        std::vector<T> v(n, T(0));
        v[i] = T(1);
        return v;
      }(), i);
      return out;
    }
    T row_max(0);
    size_t row_arg = i;
    for (size_t c = i + 1; c < n; ++c) {
      T m = A[i][c] < T(0) ? T(-A[i][c]) : A[i][c];
      if (m > row_max) {
        row_max = m;
        row_arg = c;
      }
    }
    T d_abs = d < T(0) ? T(-d) : d;
    if (d_abs <= theta_zero) {
      if (row_max <= theta_zero) continue;  // kernel row, consistent
      // zero pivot with a live column: the bordered 2x2 is indefinite
      size_t c = row_arg;
      T s = A[i][c];
      T q = A[c][c];
      T alpha = -(q + T(1)) / (s + s);
      T value = d * alpha * alpha + (s + s) * alpha + q;
      std::vector<T> v(n, T(0));
      v[i] = alpha;
      v[c] = T(1);
      out.psd = false;
      out.certificate = value;
      out.witness = lt_solve(L, std::move(v), c);
      return out;
    }
    if (!have_pivot || d < out.certificate) out.certificate = d;
    have_pivot = true;
    for (size_t r = i + 1; r < n; ++r) {
      T mult = A[r][i] / d;
      L[r][i] = mult;
      for (size_t c = r; c < n; ++c) {
        A[r][c] -= mult * A[i][c];
        A[c][r] = A[r][c];
      }
    }
  }
  if (!have_pivot) out.certificate = T(0);
  return out;
}

bool window_is_rational(const HankelWindow& w) {
  for (const auto& row : w.entries)
    for (const auto& e : row)
      if (!e.is_rational()) return false;
  return true;
}

WindowVerdict judge_window(const HankelWindow& window, const Scalar& tol, PsdMode mode) {
  WindowVerdict verdict;
  verdict.m = window.m;
  bool rational = window_is_rational(window);
  if (mode == PsdMode::exact && !rational)
    throw ShiftError("exact PSD path needs rational moments");
  bool exact = (mode == PsdMode::exact) || (mode == PsdMode::automatic && rational);
  verdict.exact = exact;

  const size_t n = window.entries.size();
  if (exact) {
    std::vector<std::vector<Rational>> A(n, std::vector<Rational>(n));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) A[i][j] = window.entries[i][j].rational_value();
    auto out = ldlt_psd<Rational>(std::move(A), Rational(0), Rational(0));
    verdict.psd = out.psd;
    verdict.certificate = Scalar(out.certificate);
    for (auto& x : out.witness) verdict.witness.push_back(Scalar(x));
  } else {
    std::vector<std::vector<BigFloat>> A(n, std::vector<BigFloat>(n));
    BigFloat trace(0);
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) A[i][j] = window.entries[i][j].to_real();
      trace += A[i][i];
    }
    BigFloat noise = pow(BigFloat(10), -(static_cast<int>(working_precision()) - 10));
    BigFloat theta_neg = tol.to_real() * trace;
    if (theta_neg < noise * trace) theta_neg = noise * trace;
    BigFloat theta_zero = noise * trace;
    auto out = ldlt_psd<BigFloat>(std::move(A), theta_neg, theta_zero);
    verdict.psd = out.psd;
    verdict.certificate = Scalar(out.certificate);
    for (auto& x : out.witness) verdict.witness.push_back(Scalar(x));
  }
  if (verdict.psd) verdict.witness.clear();
  return verdict;
}

}  // namespace

KHyponormalityReport is_k_hyponormal(const MomentSequence& gamma, long k, long m_max,
                                     const Scalar& tol, PsdMode mode) {
  if (k < 1) throw ShiftError("k-hyponormality needs k >= 1");
  if (m_max < 0) throw ShiftError("m_max must be >= 0");
  KHyponormalityReport report;
  report.k = k;
  report.m_max = m_max;
  report.all_pass = true;
  for (long m = 0; m <= m_max; ++m) {
    WindowVerdict verdict = judge_window(hankel_matrix(gamma, m, k), tol, mode);
    if (!verdict.psd && report.all_pass) {
      report.all_pass = false;
      report.first_failure_m = m;
    }
    report.windows.push_back(std::move(verdict));
  }
  return report;
}

KHyponormalityReport is_k_hyponormal(const WeightSequence& w, long k, long m_max,
                                     const Scalar& tol, PsdMode mode) {
  return is_k_hyponormal(moments_of(w), k, m_max, tol, mode);
}

std::string KHyponormalityReport::to_text() const {
  std::ostringstream out;
  out << "k-hyponormality test, k=" << k << ", m=0.." << m_max << "\n";
  for (const auto& w : windows) {
    out << "  m=" << w.m << "  " << (w.psd ? "PSD" : "NOT PSD")
        << (w.exact ? " (exact)" : "") << "  certificate=" << w.certificate.str();
    if (!w.witness.empty()) {
      out << "  witness=[";
      for (size_t i = 0; i < w.witness.size(); ++i)
        out << (i ? ", " : "") << w.witness[i].str();
      out << "]";
    }
    out << "\n";
  }
  out << "overall: " << (all_pass ? "PASS" : "FAIL");
  if (first_failure_m) out << " (first failure at m=" << *first_failure_m << ")";
  out << "\n";
  return out.str();
}

ContractivityReport is_n_contractive(const MomentSequence& gamma, long n, long m_max) {
  if (n < 1) throw ShiftError("n-contractivity needs n >= 1");
  if (m_max < 0) throw ShiftError("m_max must be >= 0");
  ContractivityReport report;
  report.n = n;
  report.m_max = m_max;
  report.all_pass = true;
  for (long m = 0; m <= m_max; ++m) {
    Scalar sum(0);
    for (long j = 0; j <= n; ++j) {
      Scalar contrib = binomial_coefficient(n, j) * gamma.at(m + j);
      if (j % 2)
        sum -= contrib;
      else
        sum += contrib;
    }
    if (sum.sign() < 0 && report.all_pass) {
      report.all_pass = false;
      report.first_failure_m = m;
    }
    report.sums.push_back(std::move(sum));
  }
  return report;
}

std::string ContractivityReport::to_text() const {
  std::ostringstream out;
  out << "n-contractivity test, n=" << n << ", m=0.." << m_max << "\n";
  for (long m = 0; m <= m_max; ++m)
    out << "  m=" << m << "  sum=" << sums[static_cast<size_t>(m)].str()
        << (sums[static_cast<size_t>(m)].sign() >= 0 ? "" : "  < 0") << "\n";
  out << "overall: " << (all_pass ? "PASS" : "FAIL");
  if (first_failure_m) out << " (first failure at m=" << *first_failure_m << ")";
  out << "\n";
  return out.str();
}

CMScanReport complete_monotonicity_scan(const MomentSequence& gamma, long max_order, long m_max) {
  if (max_order < 1) throw ShiftError("scan needs max_order >= 1");
  CMScanReport report;
  report.max_order = max_order;
  report.m_max = m_max;
  report.all_pass = true;
  for (long n = 1; n <= max_order; ++n) {
    ContractivityReport r = is_n_contractive(gamma, n, m_max);
    if (!r.all_pass) report.all_pass = false;
    report.orders.push_back(std::move(r));
  }
  return report;
}

std::string CMScanReport::to_text() const {
  std::ostringstream out;
  out << "complete monotonicity scan, n=1.." << max_order << ", m=0.." << m_max << "\n";
  for (const auto& r : orders) {
    out << "  n=" << r.n << "  " << (r.all_pass ? "pass" : "FAIL");
    if (r.first_failure_m) out << " at m=" << *r.first_failure_m;
    out << "\n";
  }
  out << "overall: " << (all_pass ? "PASS" : "FAIL") << "\n";
  return out.str();
}

}  // namespace berger
