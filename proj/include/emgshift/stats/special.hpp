#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include "emgshift/core.hpp"

namespace emgshift::stats {

namespace detail {
/// Continued fraction for I_x(a, b) (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw NumericalError("reg_incomplete_beta: continued fraction did not converge");
}
}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double reg_incomplete_beta(double x, double a, double b) {
  if (!(a > 0) || !(b > 0)) throw ParameterError("reg_incomplete_beta: a and b must be > 0");
  if (!(x >= 0 && x <= 1)) throw ParameterError("reg_incomplete_beta: x must be in [0, 1]");
  if (x == 0) return 0.0;
  if (x == 1) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// P(T > t) for Student's t with `df` degrees of freedom.
inline double student_t_upper(double t, double df) {
  if (!(df > 0)) throw ParameterError("student_t: df must be > 0");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
  const double tail = 0.5 * reg_incomplete_beta(df / (df + t * t), df / 2.0, 0.5);
  return t >= 0 ? tail : 1.0 - tail;
}

inline double student_t_cdf(double t, double df) { return 1.0 - student_t_upper(t, df); }

/// P(F > f) for the F distribution with (df1, df2).
inline double f_upper(double f, double df1, double df2) {
  if (!(df1 > 0) || !(df2 > 0)) throw ParameterError("f distribution: df must be > 0");
  if (!(f > 0)) return 1.0;
  if (std::isinf(f)) return 0.0;
  return reg_incomplete_beta(df2 / (df2 + df1 * f), df2 / 2.0, df1 / 2.0);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace emgshift::stats
