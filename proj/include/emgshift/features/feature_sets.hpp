#pragma once

// Feature-set registry. Every set is a fixed per-channel block; a window's
// feature vector is the concatenation of its channels' blocks in channel
// order, so extraction commutes with channel selection.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emgshift/core.hpp"
#include "emgshift/features/entropy.hpp"
#include "emgshift/features/time_domain.hpp"
#include "emgshift/features/wavelet.hpp"

namespace emgshift::features {

enum class FeatureSet { td, etd, ninapro, sampen };

inline constexpr std::array<FeatureSet, 4> kAllFeatureSets = {FeatureSet::td, FeatureSet::etd,
                                                              FeatureSet::ninapro, FeatureSet::sampen};

inline std::string_view to_string(FeatureSet fs) {
  switch (fs) {
    case FeatureSet::td: return "td";
    case FeatureSet::etd: return "etd";
    case FeatureSet::ninapro: return "ninapro";
    case FeatureSet::sampen: return "sampen";
  }
  return "?";
}

inline std::optional<FeatureSet> try_parse_feature_set(std::string_view name) {
  for (auto fs : kAllFeatureSets)
    if (to_string(fs) == name) return fs;
  return std::nullopt;
}

inline FeatureSet parse_feature_set(std::string_view name) {
  if (auto fs = try_parse_feature_set(name)) return *fs;
  throw ParameterError("unknown feature set '" + std::string(name) +
                       "' (expected td, etd, ninapro or sampen)");
}

inline std::size_t per_channel_dim(FeatureSet fs) {
  switch (fs) {
    case FeatureSet::td: return 4;
    case FeatureSet::etd: return 9;
    case FeatureSet::ninapro: return 4;
    case FeatureSet::sampen: return 7;
  }
  return 0;
}

struct FeatureParams {
  double zc_threshold = 0.01;  // ZC/SSC dead zone, in standardized units
  std::size_t sampen_m = 2;
  double sampen_r = 0.2;       // fraction of the window's std
  std::size_t ar_order = 4;
  std::size_t dwt_levels = 3;
};

/// Writes the per-channel block for `fs` into `out` (size per_channel_dim(fs)).
inline void extract_channel(FeatureSet fs, std::span<const double> x, const FeatureParams& params,
                            std::span<double> out) {
  switch (fs) {
    case FeatureSet::td: {
      const auto p = hudgins_primitives(x, params.zc_threshold);
      out[0] = p.mav;
      out[1] = p.wl;
      out[2] = p.zc;
      out[3] = p.ssc;
      return;
    }
    case FeatureSet::etd: {
      const auto p = hudgins_primitives(x, params.zc_threshold);
      const auto h = hjorth(x);
      out[0] = p.mav;
      out[1] = p.wl;
      out[2] = p.zc;
      out[3] = p.ssc;
      out[4] = rms(x);
      out[5] = integrated_absolute(x);
      out[6] = skewness(x);
      out[7] = h.mobility;
      out[8] = h.complexity;
      return;
    }
    case FeatureSet::ninapro: {
      const auto m = mdwt_marginals(x, 3);
      for (std::size_t i = 0; i < 4; ++i) out[i] = m[i];
      return;
    }
    case FeatureSet::sampen: {
      out[0] = sample_entropy(x, params.sampen_m, params.sampen_r);
      const auto c = cepstral_from_ar(ar_levinson(x, params.ar_order));
      for (std::size_t i = 0; i < 4; ++i) out[1 + i] = i < c.size() ? c[i] : 0.0;
      out[5] = rms(x);
      double wl = 0;
      for (std::size_t t = 1; t < x.size(); ++t) wl += std::abs(x[t] - x[t - 1]);
      out[6] = wl;
      return;
    }
  }
}

struct FeatureVector {
  std::vector<double> values;
  FeatureSet feature_set = FeatureSet::td;
  std::size_t channels = 0;
  int label = 1;
};

/// Concatenated per-channel blocks of a Ch' x T window.
inline FeatureVector extract_window(FeatureSet fs, const LabeledWindow& window,
                                    const FeatureParams& params = {}) {
  const std::size_t dim = per_channel_dim(fs);
  const auto ch = static_cast<std::size_t>(window.samples.rows());
  const auto len = static_cast<std::size_t>(window.samples.cols());
  FeatureVector v;
  v.feature_set = fs;
  v.channels = ch;
  v.label = window.gesture;
  v.values.resize(dim * ch);
  for (std::size_t c = 0; c < ch; ++c)
    extract_channel(fs, std::span<const double>(window.samples.row(static_cast<Eigen::Index>(c)).data(), len),
                    params, std::span<double>(v.values).subspan(c * dim, dim));
  return v;
}

inline FeatureVector td_features(const LabeledWindow& w, double threshold = 0.01) {
  FeatureParams p;
  p.zc_threshold = threshold;
  return extract_window(FeatureSet::td, w, p);
}

inline FeatureVector etd_features(const LabeledWindow& w, double threshold = 0.01) {
  FeatureParams p;
  p.zc_threshold = threshold;
  return extract_window(FeatureSet::etd, w, p);
}

inline FeatureVector ninapro_features(const LabeledWindow& w) {
  return extract_window(FeatureSet::ninapro, w);
}

inline FeatureVector sampen_features(const LabeledWindow& w) {
  return extract_window(FeatureSet::sampen, w);
}

/// N x d feature rows with their labels.
struct FeatureMatrix {
  Eigen::MatrixXd values;
  std::vector<int> labels;
  FeatureSet feature_set = FeatureSet::td;

  std::size_t rows() const { return labels.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(values.cols()); }
};

inline FeatureMatrix extract_dataset(FeatureSet fs, const Dataset& data, const FeatureParams& params = {}) {
  FeatureMatrix m;
  m.feature_set = fs;
  if (data.empty()) return m;
  const auto d = per_channel_dim(fs) * static_cast<std::size_t>(data[0].samples.rows());
  m.values.resize(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(d));
  m.labels.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto v = extract_window(fs, data[i], params);
    m.values.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::RowVectorXd>(v.values.data(), static_cast<Eigen::Index>(d));
    m.labels.push_back(data[i].gesture);
  }
  return m;
}

}  // namespace emgshift::features
