#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "emgshift/core.hpp"

namespace emgshift::features {

struct HudginsPrimitives {
  double mav = 0;  // mean absolute value
  double wl = 0;   // waveform length
  double zc = 0;   // zero crossings
  double ssc = 0;  // slope sign changes
};

/// Hudgins time-domain set. ZC and SSC use a dead zone of `threshold`.
inline HudginsPrimitives hudgins_primitives(std::span<const double> x, double threshold) {
  if (x.size() < 3) throw ParameterError("hudgins_primitives: window shorter than 3 samples");
  if (!(threshold >= 0)) throw ParameterError("hudgins_primitives: threshold must be >= 0");
  HudginsPrimitives p;
  const std::size_t n = x.size();
  double abs_sum = std::abs(x[0]);
  for (std::size_t t = 1; t < n; ++t) {
    abs_sum += std::abs(x[t]);
    p.wl += std::abs(x[t] - x[t - 1]);
    if (x[t - 1] * x[t] < 0 && std::abs(x[t - 1] - x[t]) >= threshold) p.zc += 1;
    if (t + 1 < n && (x[t] - x[t - 1]) * (x[t] - x[t + 1]) >= threshold) p.ssc += 1;
  }
  p.mav = abs_sum / static_cast<double>(n);
  return p;
}

inline double rms(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v * v;
  return std::sqrt(s / static_cast<double>(x.size()));
}

inline double integrated_absolute(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += std::abs(v);
  return s;
}

inline double mean(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

/// Population variance.
inline double variance(std::span<const double> x) {
  const double m = mean(x);
  double s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size());
}

/// m3 / m2^(3/2) with population moments; 0 for a flat signal.
inline double skewness(std::span<const double> x) {
  const double m = mean(x);
  double m2 = 0, m3 = 0;
  for (double v : x) {
    const double d = v - m;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= static_cast<double>(x.size());
  m3 /= static_cast<double>(x.size());
  if (m2 <= 0) return 0.0;
  return m3 / std::pow(m2, 1.5);
}

struct Hjorth {
  double mobility = 0;
  double complexity = 0;
};

namespace detail {
/// Population variance of the first difference, without materializing it.
inline double diff_variance(std::span<const double> x, int order) {
  // order 1: x[t]-x[t-1]; order 2: x[t]-2x[t-1]+x[t-2]
  const std::size_t skip = static_cast<std::size_t>(order);
  if (x.size() <= skip) return 0.0;
  const std::size_t n = x.size() - skip;
  auto diff = [&](std::size_t t) {
    return order == 1 ? x[t] - x[t - 1] : x[t] - 2.0 * x[t - 1] + x[t - 2];
  };
  double s = 0;
  for (std::size_t t = skip; t < x.size(); ++t) s += diff(t);
  const double m = s / static_cast<double>(n);
  double v = 0;
  for (std::size_t t = skip; t < x.size(); ++t) {
    const double d = diff(t) - m;
    v += d * d;
  }
  return v / static_cast<double>(n);
}
}  // namespace detail

/// mobility = sqrt(var(dx)/var(x)); complexity = mobility(dx)/mobility(x).
inline Hjorth hjorth(std::span<const double> x) {
  const double v0 = variance(x);
  const double v1 = detail::diff_variance(x, 1);
  const double v2 = detail::diff_variance(x, 2);
  Hjorth h;
  h.mobility = v0 > 0 ? std::sqrt(v1 / v0) : 0.0;
  const double mobility_dx = v1 > 0 ? std::sqrt(v2 / v1) : 0.0;
  h.complexity = h.mobility > 0 ? mobility_dx / h.mobility : 0.0;
  return h;
}

}  // namespace emgshift::features
