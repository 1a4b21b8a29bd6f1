#pragma once

// Marginal discrete wavelet transform (mDWT) with Daubechies-7 filters.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "emgshift/core.hpp"

namespace emgshift::features {

/// Daubechies-7 analysis low-pass filter (14 taps), from spectral
/// factorization at 50 significant digits.
inline constexpr std::array<double, 14> kDb7DecLo = {
    0.00035371379997452024, -0.0018016407040474908, 0.0004295779729213665,
    0.01255099855609984,    -0.01657454163066688,   -0.03802993693501441,
    0.08061260915108308,    0.07130921926683026,    -0.22403618499387498,
    -0.14390600392856498,   0.4697822874051931,     0.7291320908462351,
    0.3965393194819173,     0.07785205408500918};

/// Quadrature-mirror high-pass: hi[k] = (-1)^k lo[L-1-k].
inline constexpr std::array<double, 14> kDb7DecHi = [] {
  std::array<double, 14> hi{};
  for (std::size_t k = 0; k < 14; ++k) hi[k] = (k % 2 == 0 ? 1.0 : -1.0) * kDb7DecLo[13 - k];
  return hi;
}();

namespace detail {
/// Half-sample symmetric reflection of an arbitrary index into [0, n).
inline std::size_t reflect(std::ptrdiff_t i, std::size_t n) {
  const auto period = static_cast<std::ptrdiff_t>(2 * n);
  i %= period;
  if (i < 0) i += period;
  return i < static_cast<std::ptrdiff_t>(n) ? static_cast<std::size_t>(i)
                                            : static_cast<std::size_t>(period - 1 - i);
}
}  // namespace detail

struct DwtLevel {
  std::vector<double> approx;
  std::vector<double> detail;
};

/// One analysis step: out[k] = sum_j h[j] * x[2k + 1 - j] over the
/// symmetrically extended signal, k < floor((n + L - 1) / 2).
inline DwtLevel dwt_step(std::span<const double> x, std::span<const double> lo,
                         std::span<const double> hi) {
  if (x.empty()) throw ParameterError("dwt: empty signal");
  const std::size_t n = x.size();
  const std::size_t taps = lo.size();
  const std::size_t out_len = (n + taps - 1) / 2;
  // Extended copy: ext[t + taps - 1] = x_sym[t] for t in [1 - taps, 2 * out_len].
  std::vector<double> ext(2 * out_len + taps);
  for (std::size_t t = 0; t < ext.size(); ++t)
    ext[t] = x[detail::reflect(static_cast<std::ptrdiff_t>(t) - static_cast<std::ptrdiff_t>(taps - 1), n)];
  DwtLevel level;
  level.approx.resize(out_len);
  level.detail.resize(out_len);
  for (std::size_t k = 0; k < out_len; ++k) {
    double a = 0, d = 0;
    const double* v = ext.data() + 2 * k + taps;  // x_sym[2k + 1]
    for (std::size_t j = 0; j < taps; ++j) {
      a += lo[j] * v[-static_cast<std::ptrdiff_t>(j)];
      d += hi[j] * v[-static_cast<std::ptrdiff_t>(j)];
    }
    level.approx[k] = a;
    level.detail[k] = d;
  }
  return level;
}

/// Marginals (sum |detail_1|, ..., sum |detail_levels|, sum |approx_levels|).
inline std::vector<double> mdwt_marginals(std::span<const double> x, std::size_t levels = 3) {
  if (x.size() < kDb7DecLo.size())
    throw ParameterError("mdwt: window shorter than the 14-tap db7 filter");
  if (levels < 1) throw ParameterError("mdwt: need at least one level");
  std::vector<double> out;
  out.reserve(levels + 1);
  std::vector<double> current(x.begin(), x.end());
  for (std::size_t l = 0; l < levels; ++l) {
    auto step = dwt_step(current, kDb7DecLo, kDb7DecHi);
    double m = 0;
    for (double v : step.detail) m += std::abs(v);
    out.push_back(m);
    current = std::move(step.approx);
  }
  double m = 0;
  for (double v : current) m += std::abs(v);
  out.push_back(m);
  return out;
}

}  // namespace emgshift::features
