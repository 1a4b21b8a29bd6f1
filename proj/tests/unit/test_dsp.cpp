#include <complex>
#include <numbers>

#include "test_util.hpp"

using namespace emgshift;
using namespace emgshift::dsp;

namespace {

constexpr double kPi = std::numbers::pi;

// Textbook Butterworth band-stop magnitude through the bilinear map:
// |H|^2 = 1 / (1 + (B W / (W0^2 - W^2))^(2N)) at the prewarped frequency W.
double analytic_bandstop(double f, double fs, double f_low, double f_high, int order) {
  const auto warp = [&](double hz) { return 2 * fs * std::tan(kPi * hz / fs); };
  const double w = warp(f), w0 = warp(0.5 * (f_low + f_high)), b = warp(f_high) - warp(f_low);
  const double den = w0 * w0 - w * w;
  if (den == 0) return 0.0;
  return 1.0 / std::sqrt(1.0 + std::pow(b * w / den, 2 * order));
}

}  // namespace

TEST(Bandstop, DesignExamples) {
  const auto h = design_bandstop(1000, 45, 55, 2);
  EXPECT_LT(h.magnitude(50), 1e-3);
  EXPECT_GT(h.magnitude(1), 0.99);
  EXPECT_GT(h.magnitude(450), 0.95);
  EXPECT_EQ(h.sections.size(), 2u);
  EXPECT_TRUE(h.is_stable());
  EXPECT_NEAR(h.magnitude(0), 1.0, 1e-12);
  EXPECT_NEAR(h.magnitude(500), 1.0, 1e-12);
}

TEST(Bandstop, InvalidBands) {
  EXPECT_THROW(design_bandstop(1000, 55, 45, 2), ParameterError);
  EXPECT_THROW(design_bandstop(1000, 0, 45, 2), ParameterError);
  EXPECT_THROW(design_bandstop(1000, 45, 500, 2), ParameterError);
  EXPECT_THROW(design_bandstop(1000, 45, 55, 0), ParameterError);
}

TEST(Bandstop, MatchesAnalyticMagnitude) {
  for (int order : {1, 2, 3, 4}) {
    for (auto [fs, lo, hi] : {std::tuple{1000.0, 45.0, 55.0}, std::tuple{2000.0, 55.0, 65.0},
                              std::tuple{1000.0, 100.0, 200.0}}) {
      const auto h = design_bandstop(fs, lo, hi, order);
      EXPECT_EQ(h.sections.size(), static_cast<std::size_t>(order));
      for (double f = 0.5; f < fs / 2; f += 3.7)
        EXPECT_NEAR(h.magnitude(f), analytic_bandstop(f, fs, lo, hi, order), 1e-9)
            << "order " << order << " f " << f;
    }
  }
}

TEST(Bandstop, ImpulseResponseDftMatchesTransferFunction) {
  const auto h = design_bandstop(1000, 45, 55, 2);
  std::vector<double> impulse(16384, 0.0);
  impulse[0] = 1.0;
  const auto ir = filter_signal(h, impulse);
  EXPECT_LT(std::abs(ir.back()), 1e-13);
  for (double f : {0.0, 1.0, 20.0, 44.0, 47.5, 50.0, 52.0, 60.0, 123.4, 450.0, 499.0}) {
    std::complex<double> dft = 0;
    const double w = 2 * kPi * f / 1000.0;
    for (std::size_t n = 0; n < ir.size(); ++n) dft += ir[n] * std::polar(1.0, -w * static_cast<double>(n));
    EXPECT_NEAR(std::abs(dft - h.response(f)), 0.0, 1e-9) << f;
  }
}

TEST(Bandstop, SteadyStateSineIsNulled) {
  const auto h = design_bandstop(1000, 45, 55, 2);
  std::vector<double> x(3000);
  for (std::size_t t = 0; t < x.size(); ++t) x[t] = std::sin(2 * kPi * 50.0 * static_cast<double>(t) / 1000.0);
  const auto y = filter_signal(h, x);
  double peak = 0;
  for (std::size_t t = 2500; t < y.size(); ++t) peak = std::max(peak, std::abs(y[t]));
  EXPECT_LT(peak, 1e-3);
}

TEST(Bandstop, ZeroInZeroOut) {
  const auto h = design_bandstop(1000, 45, 55, 2);
  const auto y = filter_signal(h, std::vector<double>(500, 0.0));
  for (double v : y) EXPECT_EQ(v, 0.0);
}

TEST(Bandstop, FilterApplyIsPerChannel) {
  Recording rec;
  rec.layout = {1, 2, 1, 1.0};
  rec.samples = SampleMatrix::Zero(2, 200);
  std::mt19937_64 rng(1);
  const auto x = testutil::gaussian(200, rng);
  for (int t = 0; t < 200; ++t) rec.samples(1, t) = x[static_cast<std::size_t>(t)];
  const auto h = design_bandstop(1000, 45, 55, 2);
  const auto out = filter_apply(rec, h);
  const auto ref = filter_signal(h, x);
  for (int t = 0; t < 200; ++t) {
    EXPECT_EQ(out.samples(0, t), 0.0);
    EXPECT_DOUBLE_EQ(out.samples(1, t), ref[static_cast<std::size_t>(t)]);
  }
}

TEST(ButterworthSections, HalfPowerAtCutoff) {
  const double fs = 1000;
  const auto lp = design_lowpass(fs, 100), hp = design_highpass(fs, 100);
  const auto at = [&](const Biquad& b, double f) { return std::abs(b.response(2 * kPi * f / fs)); };
  EXPECT_NEAR(at(lp, 100), std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(at(hp, 100), std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(at(lp, 0), 1.0, 1e-12);
  EXPECT_NEAR(at(hp, 500), 1.0, 1e-12);
}

TEST(ChannelStats, Examples) {
  SampleMatrix a(1, 2);
  a << 1, 3;
  auto s = fit_channel_stats(a);
  EXPECT_DOUBLE_EQ(s.mean[0], 2.0);
  EXPECT_DOUBLE_EQ(s.std[0], 1.0);

  SampleMatrix c(1, 3);
  c << 5, 5, 5;
  s = fit_channel_stats(c);
  EXPECT_DOUBLE_EQ(s.mean[0], 5.0);
  EXPECT_DOUBLE_EQ(s.std[0], 1.0);
}

TEST(ChannelStats, PooledOverBlocks) {
  SampleMatrix a(1, 2), b(1, 2);
  a << 1, 3;
  b << 5, 7;
  const std::vector<SampleMatrix> blocks = {a, b};
  const auto s = fit_channel_stats(blocks);
  EXPECT_DOUBLE_EQ(s.mean[0], 4.0);
  EXPECT_DOUBLE_EQ(s.std[0], std::sqrt(5.0));
}

TEST(Standardize, OwnTrainingDataBecomesUnit) {
  std::mt19937_64 rng(2);
  SampleMatrix x(4, 300);
  for (Eigen::Index c = 0; c < 4; ++c) {
    const auto v = testutil::gaussian(300, rng, 1.0 + static_cast<double>(c));
    for (Eigen::Index t = 0; t < 300; ++t) x(c, t) = v[static_cast<std::size_t>(t)] + 10.0 * static_cast<double>(c);
  }
  const auto z = apply_standardization(x, fit_channel_stats(x));
  for (Eigen::Index c = 0; c < 4; ++c) {
    EXPECT_NEAR(z.row(c).mean(), 0.0, 1e-9);
    EXPECT_NEAR(std::sqrt((z.row(c).array() - z.row(c).mean()).square().mean()), 1.0, 1e-9);
  }
}

TEST(Standardize, IdentityAndArithmetic) {
  SampleMatrix x(2, 3);
  x << 1, 2, 3, 4, 5, 6;
  EXPECT_EQ(apply_standardization(x, ChannelStats{{0, 0}, {1, 1}}), x);
  SampleMatrix one(1, 1);
  one << 3;
  EXPECT_DOUBLE_EQ(apply_standardization(one, ChannelStats{{1}, {2}})(0, 0), 1.0);
  EXPECT_THROW(apply_standardization(x, ChannelStats{{0}, {1}}), ParameterError);
}

TEST(Standardize, TrainStatsLeaveTestOffCenter) {
  std::mt19937_64 rng(3);
  SampleMatrix s1(1, 500), s2(1, 500);
  const auto a = testutil::gaussian(500, rng), b = testutil::gaussian(500, rng);
  for (Eigen::Index t = 0; t < 500; ++t) {
    s1(0, t) = a[static_cast<std::size_t>(t)];
    s2(0, t) = b[static_cast<std::size_t>(t)] + 0.5;
  }
  const auto z = apply_standardization(s2, fit_channel_stats(s1));
  EXPECT_GT(std::abs(z.row(0).mean()), 0.1);
}

TEST(CentralSegment, Examples) {
  EXPECT_EQ(central_start(3000, 1000), 1000u);
  EXPECT_EQ(central_start(1001, 1000), 0u);
  EXPECT_THROW(central_start(500, 1000), ParameterError);

  Recording rec;
  rec.layout = {1, 1, 1, 1.0};
  rec.samples.resize(1, 3000);
  for (Eigen::Index t = 0; t < 3000; ++t) rec.samples(0, t) = static_cast<double>(t);
  const auto seg = central_segment(rec, 1.0);
  ASSERT_EQ(seg.cols(), 1000);
  EXPECT_EQ(seg(0, 0), 1000.0);
  EXPECT_EQ(seg(0, 999), 1999.0);
}

TEST(Windows, CountRule) {
  EXPECT_EQ(window_starts(1000, 256, 15).size(), 49u);
  EXPECT_TRUE(window_starts(256, 256, 15).empty());
  const auto one = window_starts(1000, 256, 744);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0], 0u);
  EXPECT_THROW(window_starts(100, 256, 15), ParameterError);
  EXPECT_THROW(window_starts(1000, 256, 0), ParameterError);
  for (std::size_t len : {300u, 999u, 1000u, 1500u})
    for (std::size_t stride : {1u, 7u, 15u, 100u}) {
      const auto s = window_starts(len, 256, stride);
      EXPECT_EQ(s.size(), (len - 256) / stride);
      for (auto start : s) EXPECT_LE(start + 256, len);
    }
}

TEST(Windows, SlideKeepsProvenance) {
  SampleMatrix seg(2, 300);
  for (Eigen::Index t = 0; t < 300; ++t) seg.col(t).setConstant(static_cast<double>(t));
  Provenance base{4, 2, 7, 1000, std::nullopt};
  const auto w = slide_windows(seg, 100, 50, 3, base);
  ASSERT_EQ(w.size(), 4u);
  EXPECT_EQ(w[2].provenance.start_sample, 1100u);
  EXPECT_EQ(w[2].samples(1, 0), 100.0);
  EXPECT_EQ(w[2].gesture, 3);
  EXPECT_EQ(w[2].provenance.repetition, 7);
  EXPECT_TRUE(w[2].is_full_grid());
}
