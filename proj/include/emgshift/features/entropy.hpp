#pragma once

// Sample entropy and autoregressive/cepstral descriptors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "emgshift/core.hpp"
#include "emgshift/features/time_domain.hpp"

namespace emgshift::features {

struct TemplateMatches {
  std::size_t length_m = 0;       // B
  std::size_t length_m_plus1 = 0;  // A
};

/// Counts template pairs i < j (both over the first N - m start positions)
/// whose Chebyshev distance is <= tolerance at lengths m and m + 1.
///
/// Templates are visited in order of their first sample, so only pairs whose
/// first samples lie within `tolerance` are compared further. Counts are
/// identical to exhaustive pair enumeration.
inline TemplateMatches count_template_matches(std::span<const double> x, std::size_t m,
                                              double tolerance) {
  if (m < 1 || x.size() <= m + 1)
    throw ParameterError("sample_entropy: need window length > m + 1");
  const std::size_t count = x.size() - m;
  const std::size_t width = m + 1;
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  // Sorted templates stored contiguously, m + 1 samples each.
  std::vector<double> tpl(count * width);
  for (std::size_t p = 0; p < count; ++p)
    std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(order[p]), width, tpl.begin() + static_cast<std::ptrdiff_t>(p * width));

  TemplateMatches out;
  for (std::size_t p = 0; p < count; ++p) {
    const double* a = tpl.data() + p * width;
    for (std::size_t q = p + 1; q < count; ++q) {
      const double* b = tpl.data() + q * width;
      if (b[0] - a[0] > tolerance) break;
      std::size_t k = 1;
      while (k < m && std::abs(a[k] - b[k]) <= tolerance) ++k;
      if (k < m) continue;
      ++out.length_m;
      if (std::abs(a[m] - b[m]) <= tolerance) ++out.length_m_plus1;
    }
  }
  return out;
}

/// Value returned when no template pair matches.
inline double sample_entropy_cap(std::size_t n, std::size_t m) {
  const double pairs = static_cast<double>(n - m) * static_cast<double>(n - m - 1);
  return -std::log(2.0 / pairs);
}

/// SampEn with tolerance r = r_factor * population std of x.
inline double sample_entropy(std::span<const double> x, std::size_t m = 2, double r_factor = 0.2) {
  if (m < 1 || x.size() <= m + 1)
    throw ParameterError("sample_entropy: need window length > m + 1");
  const double tolerance = r_factor * std::sqrt(variance(x));
  const auto c = count_template_matches(x, m, tolerance);
  if (c.length_m == 0 || c.length_m_plus1 == 0) return sample_entropy_cap(x.size(), m);
  return -std::log(static_cast<double>(c.length_m_plus1) / static_cast<double>(c.length_m));
}

/// Levinson-Durbin on the biased autocorrelation. Convention:
/// x[t] + sum_i a[i] x[t-i] = e[t]. All-zero input yields zero coefficients.
inline std::vector<double> ar_levinson(std::span<const double> x, std::size_t order) {
  if (order < 1) throw ParameterError("ar_levinson: order must be >= 1");
  if (x.size() <= order) throw ParameterError("ar_levinson: window shorter than order + 1");
  const std::size_t n = x.size();
  std::vector<double> r(order + 1, 0.0);
  for (std::size_t lag = 0; lag <= order; ++lag) {
    double s = 0;
    for (std::size_t t = lag; t < n; ++t) s += x[t] * x[t - lag];
    r[lag] = s / static_cast<double>(n);
  }
  std::vector<double> a(order, 0.0);
  if (!(r[0] > 0)) return a;

  std::vector<double> prev(order, 0.0);
  double err = r[0];
  for (std::size_t i = 1; i <= order; ++i) {
    double acc = r[i];
    for (std::size_t j = 1; j < i; ++j) acc += a[j - 1] * r[i - j];
    const double k = -acc / err;
    prev = a;
    for (std::size_t j = 1; j < i; ++j) a[j - 1] = prev[j - 1] + k * prev[i - j - 1];
    a[i - 1] = k;
    err *= (1.0 - k * k);
    if (!(err > 0)) break;  // perfectly predictable; higher orders stay zero
  }
  return a;
}

/// Cepstral coefficients of the all-pole model 1 / (1 + sum a_i z^-i).
inline std::vector<double> cepstral_from_ar(std::span<const double> a) {
  if (a.empty()) throw ParameterError("cepstral_from_ar: need at least one coefficient");
  std::vector<double> c(a.size(), 0.0);
  for (std::size_t n = 1; n <= a.size(); ++n) {
    double v = -a[n - 1];
    for (std::size_t l = 1; l < n; ++l)
      v -= (1.0 - static_cast<double>(l) / static_cast<double>(n)) * a[l - 1] * c[n - l - 1];
    c[n - 1] = v;
  }
  return c;
}

}  // namespace emgshift::features
