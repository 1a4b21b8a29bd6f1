#pragma once

// Preprocessing chain: IIR design and filtering, per-channel standardization,
// central-segment extraction and sliding-window segmentation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "emgshift/core.hpp"

namespace emgshift::dsp {

/// Second-order section, a0 normalized to 1.
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0;
  double a1 = 0, a2 = 0;

  std::complex<double> response(double omega) const {
    const std::complex<double> z1 = std::polar(1.0, -omega);
    const std::complex<double> z2 = z1 * z1;
    return (b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2);
  }

  /// Roots of z^2 + a1 z + a2.
  std::pair<std::complex<double>, std::complex<double>> poles() const {
    const std::complex<double> disc = std::sqrt(std::complex<double>(a1 * a1 - 4.0 * a2));
    return {(-a1 + disc) / 2.0, (-a1 - disc) / 2.0};
  }
};

struct BiquadCascade {
  std::vector<Biquad> sections;
  double fs = 0;
  double f_low = 0;
  double f_high = 0;
  int order = 0;

  /// Complex frequency response at f Hz.
  std::complex<double> response(double f_hz) const {
    const double omega = 2.0 * std::numbers::pi * f_hz / fs;
    std::complex<double> h = 1.0;
    for (const auto& s : sections) h *= s.response(omega);
    return h;
  }

  double magnitude(double f_hz) const { return std::abs(response(f_hz)); }

  double max_pole_radius() const {
    double r = 0;
    for (const auto& s : sections) {
      auto [p, q] = s.poles();
      r = std::max({r, std::abs(p), std::abs(q)});
    }
    return r;
  }

  bool is_stable() const { return max_pole_radius() < 1.0; }
};

/// Butterworth band-stop via bilinear transform with prewarping.
///
/// `order` is the order of the low-pass prototype; the resulting filter has
/// 2*order poles in `order` sections. The stop-band width is the prewarped
/// edge difference and the transmission zero is placed at the prewarped band
/// midpoint (f_low + f_high) / 2, so a 45-55 Hz design nulls 50 Hz exactly.
/// Gain is exactly 1 at DC and Nyquist.
inline BiquadCascade design_bandstop(double fs, double f_low, double f_high, int order = 2) {
  if (!(fs > 0) || !(f_low > 0) || !(f_high > f_low) || !(f_high < fs / 2))
    throw ParameterError("design_bandstop: need 0 < f_low < f_high < fs/2, got (" +
                         std::to_string(f_low) + ", " + std::to_string(f_high) +
                         ") at fs=" + std::to_string(fs));
  if (order < 1 || order > 16) throw ParameterError("design_bandstop: order must be in 1..16");

  using cd = std::complex<double>;
  const double pi = std::numbers::pi;
  const double k = 2.0 * fs;
  const double w_low = k * std::tan(pi * f_low / fs);
  const double w_high = k * std::tan(pi * f_high / fs);
  const double f_center = 0.5 * (f_low + f_high);
  const double w0 = k * std::tan(pi * f_center / fs);
  const double bw = w_high - w_low;
  const double omega0 = 2.0 * pi * f_center / fs;

  // Each digital pole q in the upper half plane yields one section with poles
  // {q, conj(q)} and zeros at exp(+-j omega0).
  std::vector<cd> upper;
  for (int i = 0; i < order; ++i) {
    const cd p = std::polar(1.0, pi * (2.0 * i + order + 1) / (2.0 * order));
    if (p.imag() < -1e-12) continue;  // the conjugate prototype pole yields the conjugates
    const cd c = bw / p;
    const cd disc = std::sqrt(c * c - 4.0 * w0 * w0);
    const cd s1 = (c + disc) / 2.0;
    const cd s2 = (c - disc) / 2.0;
    for (cd s : {s1, s2}) {
      const cd z = (k + s) / (k - s);
      // Real prototype pole: s1 and s2 are already a conjugate pair.
      if (std::abs(p.imag()) <= 1e-12) {
        if (z.imag() > 0) upper.push_back(z);
      } else {
        upper.push_back(z.imag() >= 0 ? z : std::conj(z));
      }
    }
  }

  BiquadCascade out;
  out.fs = fs;
  out.f_low = f_low;
  out.f_high = f_high;
  out.order = order;
  std::sort(upper.begin(), upper.end(),
            [](const cd& a, const cd& b) { return std::abs(a) < std::abs(b); });
  const double zero_b1 = -2.0 * std::cos(omega0);
  for (const cd& q : upper) {
    Biquad s;
    s.a1 = -2.0 * q.real();
    s.a2 = std::norm(q);
    const double gain = (1.0 + s.a1 + s.a2) / (2.0 + zero_b1);
    s.b0 = gain;
    s.b1 = gain * zero_b1;
    s.b2 = gain;
    out.sections.push_back(s);
  }
  return out;
}

/// Second-order Butterworth low-pass (bilinear, prewarped).
inline Biquad design_lowpass(double fs, double fc) {
  if (!(fc > 0) || !(fc < fs / 2)) throw ParameterError("design_lowpass: need 0 < fc < fs/2");
  const double k = std::tan(std::numbers::pi * fc / fs);
  const double norm = 1.0 / (1.0 + std::numbers::sqrt2 * k + k * k);
  Biquad s;
  s.b0 = k * k * norm;
  s.b1 = 2.0 * s.b0;
  s.b2 = s.b0;
  s.a1 = 2.0 * (k * k - 1.0) * norm;
  s.a2 = (1.0 - std::numbers::sqrt2 * k + k * k) * norm;
  return s;
}

/// Second-order Butterworth high-pass (bilinear, prewarped).
inline Biquad design_highpass(double fs, double fc) {
  if (!(fc > 0) || !(fc < fs / 2)) throw ParameterError("design_highpass: need 0 < fc < fs/2");
  const double k = std::tan(std::numbers::pi * fc / fs);
  const double norm = 1.0 / (1.0 + std::numbers::sqrt2 * k + k * k);
  Biquad s;
  s.b0 = norm;
  s.b1 = -2.0 * norm;
  s.b2 = norm;
  s.a1 = 2.0 * (k * k - 1.0) * norm;
  s.a2 = (1.0 - std::numbers::sqrt2 * k + k * k) * norm;
  return s;
}

/// In-place causal filtering, direct form II transposed, zero initial state.
inline void filter_inplace(std::span<const Biquad> sections, std::span<double> x) {
  for (const auto& s : sections) {
    double z1 = 0, z2 = 0;
    for (double& v : x) {
      const double in = v;
      const double y = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * y + z2;
      z2 = s.b2 * in - s.a2 * y;
      v = y;
    }
  }
}

inline std::vector<double> filter_signal(const BiquadCascade& cascade, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  filter_inplace(cascade.sections, y);
  return y;
}

/// Filters every channel of a recording over its full length.
inline Recording filter_apply(const Recording& rec, const BiquadCascade& cascade) {
  if (!cascade.is_stable()) throw ParameterError("filter_apply: unstable cascade");
  Recording out = rec;
  for (Eigen::Index c = 0; c < out.samples.rows(); ++c)
    filter_inplace(cascade.sections, std::span<double>(out.samples.row(c).data(),
                                                       static_cast<std::size_t>(out.samples.cols())));
  return out;
}

struct ChannelStats {
  std::vector<double> mean;
  std::vector<double> std;

  std::size_t channel_count() const { return mean.size(); }
};

/// Pooled per-channel mean and population standard deviation. Channels with
/// zero spread get std = 1.
inline ChannelStats fit_channel_stats(std::span<const SampleMatrix> blocks) {
  if (blocks.empty()) throw ParameterError("fit_channel_stats: no training data");
  const auto ch = static_cast<std::size_t>(blocks.front().rows());
  std::vector<double> sum(ch, 0.0);
  std::size_t n = 0;
  for (const auto& b : blocks) {
    if (static_cast<std::size_t>(b.rows()) != ch)
      throw ParameterError("fit_channel_stats: blocks differ in channel count");
    for (std::size_t c = 0; c < ch; ++c) sum[c] += b.row(static_cast<Eigen::Index>(c)).sum();
    n += static_cast<std::size_t>(b.cols());
  }
  if (n < 2) throw ParameterError("fit_channel_stats: need at least 2 samples per channel");
  ChannelStats stats;
  stats.mean.resize(ch);
  stats.std.resize(ch);
  for (std::size_t c = 0; c < ch; ++c) stats.mean[c] = sum[c] / static_cast<double>(n);
  // Second pass around the mean for accuracy.
  std::vector<double> ss(ch, 0.0);
  for (const auto& b : blocks)
    for (std::size_t c = 0; c < ch; ++c)
      ss[c] += (b.row(static_cast<Eigen::Index>(c)).array() - stats.mean[c]).square().sum();
  for (std::size_t c = 0; c < ch; ++c) {
    const double sd = std::sqrt(ss[c] / static_cast<double>(n));
    stats.std[c] = sd > 0.0 ? sd : 1.0;
  }
  return stats;
}

inline ChannelStats fit_channel_stats(const SampleMatrix& block) {
  return fit_channel_stats(std::span<const SampleMatrix>(&block, 1));
}

inline void standardize_inplace(SampleMatrix& data, const ChannelStats& stats) {
  if (static_cast<std::size_t>(data.rows()) != stats.channel_count())
    throw ParameterError("apply_standardization: data has " + std::to_string(data.rows()) +
                         " channels, stats have " + std::to_string(stats.channel_count()));
  for (Eigen::Index c = 0; c < data.rows(); ++c)
    data.row(c) = (data.row(c).array() - stats.mean[static_cast<std::size_t>(c)]) /
                  stats.std[static_cast<std::size_t>(c)];
}

inline SampleMatrix apply_standardization(const SampleMatrix& data, const ChannelStats& stats) {
  SampleMatrix out = data;
  standardize_inplace(out, stats);
  return out;
}

inline std::size_t samples_for(double duration_s, double fs) {
  return static_cast<std::size_t>(std::llround(duration_s * fs));
}

/// Start index of the centered slice of n samples out of `length`; the odd
/// leftover sample is dropped from the leading side.
inline std::size_t central_start(std::size_t length, std::size_t n) {
  if (n > length)
    throw ParameterError("central_segment: recording has " + std::to_string(length) +
                         " samples, need " + std::to_string(n));
  return (length - n) / 2;
}

inline SampleMatrix central_segment(const Recording& rec, double duration_s) {
  const std::size_t n = samples_for(duration_s, rec.fs);
  if (n == 0) throw ParameterError("central_segment: duration must cover at least one sample");
  const std::size_t start = central_start(rec.length(), n);
  return rec.samples.middleCols(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(n));
}

/// Window start indices: floor((L - T) / stride) windows at i * stride.
/// The count deliberately omits the usual +1; with L=1000, T=256, stride=15
/// this gives the 49 windows per repetition behind the 1960/3920 set sizes.
inline std::vector<std::size_t> window_starts(std::size_t length, std::size_t window,
                                              std::size_t stride) {
  if (window < 1) throw ParameterError("slide_windows: window length must be >= 1");
  if (stride < 1) throw ParameterError("slide_windows: stride must be >= 1");
  if (length < window)
    throw ParameterError("slide_windows: segment of " + std::to_string(length) +
                         " samples shorter than window " + std::to_string(window));
  const std::size_t count = (length - window) / stride;
  std::vector<std::size_t> starts(count);
  for (std::size_t i = 0; i < count; ++i) starts[i] = i * stride;
  return starts;
}

/// Cuts a full-grid segment into labeled windows.
inline std::vector<LabeledWindow> slide_windows(const SampleMatrix& segment, std::size_t window,
                                                std::size_t stride, int gesture,
                                                const Provenance& base) {
  std::vector<LabeledWindow> out;
  for (std::size_t start : window_starts(static_cast<std::size_t>(segment.cols()), window, stride)) {
    LabeledWindow w;
    w.samples = segment.middleCols(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(window));
    w.gesture = gesture;
    w.provenance = base;
    w.provenance.start_sample = base.start_sample + start;
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace emgshift::dsp
