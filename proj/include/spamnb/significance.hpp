#pragma once

#include <cmath>
#include <limits>
#include <span>

#include "spamnb/common.hpp"

namespace spamnb {

namespace detail {

// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b); `y` is 1 - x, passed separately so
/// callers can supply it without cancellation.
inline double incomplete_beta(double a, double b, double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log(y);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * detail::beta_continued_fraction(b, a, y) / b;
}

inline double incomplete_beta(double a, double b, double x) {
  return incomplete_beta(a, b, x, 1.0 - x);
}

/// P(T > t) for Student's t with `df` degrees of freedom.
inline double student_t_upper_tail(double t, double df) {
  if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
  const double t2 = t * t;
  const double tail = 0.5 * incomplete_beta(df / 2.0, 0.5, df / (df + t2), t2 / (df + t2));
  return t >= 0.0 ? tail : 1.0 - tail;
}

enum class TTestFlag {
  none,
  zero_difference,  // every paired difference is 0
  zero_variance,    // constant nonzero difference
};

struct TTestResult {
  double t = 0.0;
  /// One-sided p-value for the hypothesis mean(a - b) > 0.
  double p = 0.5;
  std::size_t df = 0;
  TTestFlag flag = TTestFlag::none;
};

/// Paired one-sided Student t-test on per-fold values; a[i] and b[i] must
/// come from the same fold.
inline TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw UsageError("paired t-test needs equally many values");
  if (a.size() < 2) throw UsageError("paired t-test needs at least two pairs");
  const std::size_t k = a.size();
  double mean = 0.0;
  for (std::size_t i = 0; i < k; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(k);
  double ss = 0.0;
  bool all_zero = true;
  for (std::size_t i = 0; i < k; ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) all_zero = false;
    ss += (d - mean) * (d - mean);
  }
  TTestResult r;
  r.df = k - 1;
  if (all_zero) {
    r.flag = TTestFlag::zero_difference;
    return r;
  }
  const double sd = std::sqrt(ss / static_cast<double>(k - 1));
  // A constant difference can leave rounding residue in ss.
  if (sd <= 1e-12 * std::fabs(mean)) {
    r.flag = TTestFlag::zero_variance;
    r.t = mean > 0 ? std::numeric_limits<double>::infinity()
                   : -std::numeric_limits<double>::infinity();
    r.p = mean > 0 ? 0.0 : 1.0;
    return r;
  }
  r.t = mean / (sd / std::sqrt(static_cast<double>(k)));
  r.p = student_t_upper_tail(r.t, static_cast<double>(r.df));
  return r;
}

}  // namespace spamnb
