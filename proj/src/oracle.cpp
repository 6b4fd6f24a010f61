#include "berger/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace berger {

namespace {

struct GLRule {
  std::vector<BigFloat> x;  // nodes on [-1,1], symmetric
  std::vector<BigFloat> w;
};

// Legendre nodes by Newton iteration from the Chebyshev initial guess.
GLRule make_gl_rule(int m, unsigned digits10) {
  GLRule rule;
  rule.x.assign(m, BigFloat(0, digits10));
  rule.w.assign(m, BigFloat(0, digits10));
  BigFloat pi(0, digits10);
  mpfr_const_pi(pi.backend().data(), MPFR_RNDN);
  BigFloat eps = pow(BigFloat(10, digits10), -static_cast<int>(digits10) + 2);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    BigFloat x = cos(pi * (BigFloat(i, digits10) + BigFloat(0.75)) / (BigFloat(m) + BigFloat(0.5)));
    BigFloat p0, p1, dp;
    for (int iter = 0; iter < 200; ++iter) {
      // recurrence for P_m(x) and P_{m-1}(x)
      p0 = BigFloat(1, digits10);
      p1 = x;
      for (int j = 2; j <= m; ++j) {
        BigFloat p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1);
      BigFloat dx = p1 / dp;
      x -= dx;
      if (abs(dx) < eps) break;
    }
    // refresh dp at the converged node
    p0 = BigFloat(1, digits10);
    p1 = x;
    for (int j = 2; j <= m; ++j) {
      BigFloat p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = m * (x * p1 - p0) / (x * x - 1);
    BigFloat w = 2 / ((1 - x * x) * dp * dp);
    rule.x[i] = -x;  // ascending order
    rule.w[i] = w;
    rule.x[m - 1 - i] = x;
    rule.w[m - 1 - i] = w;
  }
  return rule;
}

const GLRule& gl_rule(int m) {
  static std::map<std::pair<int, unsigned>, GLRule> cache;
  static std::mutex mtx;
  unsigned digits = working_precision() + 10;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(m, digits);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, make_gl_rule(m, digits)).first;
  return it->second;
}

constexpr int kGLOrder = 30;
constexpr long kMaxEvaluations = 4000000;

using XFn = std::function<BigFloat(const BigFloat&)>;

BigFloat gl_panel(const XFn& f, const BigFloat& a, const BigFloat& b, long& evals) {
  const GLRule& rule = gl_rule(kGLOrder);
  BigFloat half = (b - a) / 2;
  BigFloat mid = (a + b) / 2;
  BigFloat sum(0, working_precision() + 10);
  for (int i = 0; i < kGLOrder; ++i) sum += rule.w[i] * f(mid + half * rule.x[i]);
  evals += kGLOrder;
  return sum * half;
}

struct AdaptiveState {
  long evals = 0;
  BigFloat err{0};
  BigFloat floor;  // precision floor below which refinement is pointless
};

BigFloat adapt(const XFn& f, const BigFloat& a, const BigFloat& b, const BigFloat& tol,
               int depth, AdaptiveState& st) {
  BigFloat whole = gl_panel(f, a, b, st.evals);
  BigFloat mid = (a + b) / 2;
  BigFloat split = gl_panel(f, a, mid, st.evals) + gl_panel(f, mid, b, st.evals);
  BigFloat delta = abs(split - whole);
  if (delta <= tol || delta <= st.floor * (abs(split) + 1)) {
    st.err += delta;
    return split;
  }
  if (depth >= 48 || st.evals > kMaxEvaluations)
    throw QuadratureError("quadrature refinement budget exceeded");
  BigFloat half_tol = tol / 2;
  return adapt(f, a, mid, half_tol, depth + 1, st) + adapt(f, mid, b, half_tol, depth + 1, st);
}

int warp_order(double k_min) {
  if (k_min >= 0) return 1;
  int w = static_cast<int>(std::ceil(4.0 / (k_min + 1.0)));
  return std::min(std::max(w, 2), 64);
}

// Integrate f over [lo, hi] with an algebraic singularity (x-lo)^k at the left
// edge tamed by the substitution x = lo + u^w.
BigFloat left_warped(const XFn& f, const BigFloat& lo, const BigFloat& hi, int w,
                     const BigFloat& tol, AdaptiveState& st) {
  if (w <= 1) return adapt(f, lo, hi, tol, 0, st);
  BigFloat span = hi - lo;
  BigFloat u_hi = pow(span, BigFloat(1) / w);
  XFn g = [&f, &lo, w](const BigFloat& u) {
    BigFloat uw = pow(u, w - 1);
    return f(lo + uw * u) * w * uw;
  };
  return adapt(g, BigFloat(0), u_hi, tol, 0, st);
}

BigFloat right_warped(const XFn& f, const BigFloat& lo, const BigFloat& hi, int w,
                      const BigFloat& tol, AdaptiveState& st) {
  if (w <= 1) return adapt(f, lo, hi, tol, 0, st);
  BigFloat span = hi - lo;
  BigFloat u_hi = pow(span, BigFloat(1) / w);
  XFn g = [&f, &hi, w](const BigFloat& u) {
    BigFloat uw = pow(u, w - 1);
    return f(hi - uw * u) * w * uw;
  };
  return adapt(g, BigFloat(0), u_hi, tol, 0, st);
}

std::vector<BigFloat> sorted_breaks(const QuadratureHints& hints) {
  std::vector<BigFloat> breaks;
  breaks.push_back(BigFloat(0));
  for (double l : hints.break_logs)
    if (l > 0) breaks.push_back(BigFloat(l));
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [](const BigFloat& a, const BigFloat& b) { return a == b; }),
               breaks.end());
  return breaks;
}

BigFloat precision_floor() {
  int digits = static_cast<int>(working_precision());
  return pow(BigFloat(10), -(digits - 8));
}

}  // namespace

QuadResult quad_moment(const DensityFn& density, long n, const BigFloat& tol,
                       const QuadratureHints& hints) {
  if (n < 0) throw QuadratureError("moment index must be >= 0");
  // substitute t = e^{-x}: integral over (0,inf) of e^{-(n+1)x} density(e^{-x}) dx
  XFn f = [&density, n](const BigFloat& x) {
    BigFloat t = exp(-x);
    if (t <= 0 || t >= 1) return BigFloat(0);
    return exp(-(n + 1) * x) * density(t);
  };

  std::vector<BigFloat> breaks = sorted_breaks(hints);
  // decay rate of the tail integrand
  double rate = static_cast<double>(n) + 1.0 + std::min(hints.alpha_min, 0.0);
  if (rate < 0.05) rate = 0.05;
  double tail_need = (static_cast<double>(working_precision()) * 2.302585 + 30.0) / rate;
  BigFloat x_end = breaks.back() + BigFloat(std::max(tail_need, 40.0));

  int w = warp_order(hints.k_min);
  AdaptiveState st;
  st.floor = precision_floor();

  // one warped leading panel per segment between breaks, then a geometric tail
  std::vector<std::pair<BigFloat, BigFloat>> panels;
  for (size_t i = 0; i + 1 < breaks.size(); ++i) panels.emplace_back(breaks[i], breaks[i + 1]);
  BigFloat lo = breaks.back();
  BigFloat step(1);
  while (lo < x_end) {
    BigFloat hi = lo + step;
    if (hi > x_end) hi = x_end;
    panels.emplace_back(lo, hi);
    lo = hi;
    step *= 2;
  }

  BigFloat panel_tol = tol / static_cast<long>(2 * panels.size());
  BigFloat total(0);
  for (size_t i = 0; i < panels.size(); ++i) {
    bool at_break = i < breaks.size();  // leading panel of a segment: singular left edge
    if (at_break)
      total += left_warped(f, panels[i].first, panels[i].second, w, panel_tol, st);
    else
      total += adapt(f, panels[i].first, panels[i].second, panel_tol, 0, st);
  }
  return QuadResult{total, st.err, st.evals};
}

QuadResult numeric_convolution(const DensityFn& g, const BigFloat& a, const BigFloat& tol,
                               const QuadratureHints& hints) {
  if (a <= 0 || a >= 1) throw QuadratureError("convolution point must be in (0,1)");
  BigFloat A = -log(a);
  // f(a) = int_0^A G(A-y) G(y) dy with G(y) = g(e^{-y})
  XFn f = [&g, &A](const BigFloat& y) {
    BigFloat t1 = exp(-(A - y));
    BigFloat t2 = exp(-y);
    if (t1 <= 0 || t1 >= 1 || t2 <= 0 || t2 >= 1) return BigFloat(0);
    return g(t1) * g(t2);
  };

  // breaks from both factors: l and A - l
  std::vector<BigFloat> cuts{BigFloat(0), A};
  for (double l : hints.break_logs) {
    BigFloat bl(l);
    if (bl > 0 && bl < A) cuts.push_back(bl);
    BigFloat ml = A - bl;
    if (ml > 0 && ml < A) cuts.push_back(ml);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](const BigFloat& x, const BigFloat& y) { return x == y; }),
             cuts.end());

  int w = warp_order(hints.k_min);
  AdaptiveState st;
  st.floor = precision_floor();
  size_t nseg = cuts.size() - 1;
  BigFloat panel_tol = tol / static_cast<long>(4 * std::max<size_t>(nseg, 1));
  BigFloat total(0);
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    // both edges can be singular; warp each half toward its own edge
    BigFloat mid = (cuts[i] + cuts[i + 1]) / 2;
    total += left_warped(f, cuts[i], mid, w, panel_tol, st);
    total += right_warped(f, mid, cuts[i + 1], w, panel_tol, st);
  }
  return QuadResult{total, st.err, st.evals};
}

QuadResult quad_interval(const DensityFn& density, const BigFloat& t_lo, const BigFloat& t_hi,
                         const BigFloat& tol, const QuadratureHints& hints) {
  if (t_lo < 0 || t_hi > 1 || t_lo >= t_hi) throw QuadratureError("bad interval");
  // x-space: integral over [-ln t_hi, -ln t_lo) of e^{-x} density(e^{-x}) dx
  XFn f = [&density](const BigFloat& x) {
    BigFloat t = exp(-x);
    if (t <= 0 || t >= 1) return BigFloat(0);
    return t * density(t);
  };
  BigFloat x_lo = t_hi >= 1 ? BigFloat(0) : BigFloat(-log(t_hi));
  bool open_end = (t_lo == 0);
  BigFloat x_hi = open_end ? BigFloat(0) : BigFloat(-log(t_lo));
  if (open_end) {
    // reuse the moment machinery for the tail toward t = 0
    double rate = 1.0 + std::min(hints.alpha_min, 0.0);
    if (rate < 0.05) rate = 0.05;
    x_hi = x_lo + BigFloat(std::max((working_precision() * 2.302585 + 30.0) / rate, 40.0));
  }
  std::vector<BigFloat> cuts{x_lo, x_hi};
  for (double l : hints.break_logs) {
    BigFloat bl(l);
    if (bl > x_lo && bl < x_hi) cuts.push_back(bl);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](const BigFloat& a, const BigFloat& b) { return a == b; }),
             cuts.end());
  int w = warp_order(hints.k_min);
  AdaptiveState st;
  st.floor = precision_floor();
  BigFloat panel_tol = tol / static_cast<long>(2 * (cuts.size() - 1));
  BigFloat total(0);
  for (size_t i = 0; i + 1 < cuts.size(); ++i)
    total += left_warped(f, cuts[i], cuts[i + 1], w, panel_tol, st);
  return QuadResult{total, st.err, st.evals};
}

DensityFn density_fn(const Measure& mu) {
  return [mu](const BigFloat& t) { return density_eval(mu, Scalar(t)).to_real(); };
}

QuadratureHints hints_for(const Measure& mu) {
  QuadratureHints hints;
  hints.alpha_min = 0.0;
  hints.k_min = 0.0;
  for (const auto& term : mu.terms()) {
    hints.alpha_min = std::min(hints.alpha_min, term.alpha.to_double());
    hints.k_min = std::min(hints.k_min, term.k.to_double());
    double l = term.log_support.to_double();
    if (l > 0) hints.break_logs.push_back(l);
  }
  return hints;
}

std::string VerificationReport::to_text() const {
  std::ostringstream out;
  out << "n        residual\n";
  for (long n = 0; n < n_checked; ++n)
    out << n << "        " << residuals[static_cast<size_t>(n)].str(12) << "\n";
  out << "max residual: " << max_residual.str(12) << "  tol: " << tol.str(6)
      << "  -> " << (pass ? "PASS" : "FAIL") << "\n";
  if (!notes.empty()) out << notes << "\n";
  return out.str();
}

namespace {

VerificationReport finish_report(std::vector<BigFloat> residuals, const Scalar& tol,
                                 std::string notes) {
  VerificationReport report;
  report.n_checked = static_cast<long>(residuals.size());
  report.residuals = std::move(residuals);
  report.max_residual = BigFloat(0);
  for (const auto& r : report.residuals)
    if (r > report.max_residual) report.max_residual = r;
  report.tol = tol.to_real();
  report.pass = report.max_residual <= report.tol;
  report.notes = std::move(notes);
  return report;
}

}  // namespace

VerificationReport verify_square(const Measure& mu, const Measure& nu, long N, const Scalar& tol) {
  std::vector<BigFloat> residuals;
  residuals.reserve(static_cast<size_t>(N) + 1);
  for (long n = 0; n <= N; ++n) {
    Scalar lhs = measure_moment(mu, n);
    Scalar rhs = measure_moment(nu, n);
    residuals.push_back(abs(lhs - rhs * rhs).to_real());
  }
  return finish_report(std::move(residuals), tol, "gamma_n(mu) vs gamma_n(nu)^2");
}

VerificationReport verify_moments(const Measure& mu, const std::function<Scalar(long)>& target,
                                  long N, const Scalar& tol) {
  std::vector<BigFloat> residuals;
  residuals.reserve(static_cast<size_t>(N) + 1);
  for (long n = 0; n <= N; ++n)
    residuals.push_back(abs(measure_moment(mu, n) - target(n)).to_real());
  return finish_report(std::move(residuals), tol, "gamma_n(mu) vs target rule");
}

}  // namespace berger
