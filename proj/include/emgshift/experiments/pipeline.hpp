#pragma once

// Per-split pipeline: preprocess recordings, extract per-channel feature
// blocks once per full-grid window, then assemble CS / AVS / AC inputs from
// those blocks. Extraction commutes with channel selection, so assembling
// blocks is equivalent to extracting from select_subset() windows.

#include <cstdint>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emgshift/dsp.hpp"
#include "emgshift/experiments/config.hpp"
#include "emgshift/features/feature_sets.hpp"
#include "emgshift/learn/lda.hpp"
#include "emgshift/learn/pca.hpp"
#include "emgshift/parallel.hpp"
#include "emgshift/shift_aug.hpp"

namespace emgshift::experiments {

/// Records what every fitting step saw. Tests compare these fingerprints
/// against fingerprints of the test partition to prove no leakage.
struct LeakageAudit {
  struct Entry {
    std::string stage;
    std::size_t fingerprint;
  };
  std::vector<Entry> fitted;  // inputs of fit_* calls
  std::vector<Entry> test;    // test-side data seen by the pipeline

  bool leaked() const {
    for (const auto& f : fitted)
      for (const auto& t : test)
        if (f.fingerprint == t.fingerprint) return true;
    return false;
  }
};

inline std::size_t fingerprint(const double* data, std::size_t count) {
  return std::hash<std::string_view>{}(
      std::string_view(reinterpret_cast<const char*>(data), count * sizeof(double)));
}

template <typename Derived>
std::size_t fingerprint(const Eigen::DenseBase<Derived>& m) {
  const auto& e = m.derived().eval();
  return fingerprint(e.data(), static_cast<std::size_t>(e.size()));
}

struct PreprocessOptions {
  FilterConfig filter;
  double central_s = 1.0;
  double window_ms = 256;
  double stride_ms = 15;
};

/// A filtered central segment with its windows' start indices.
struct Segment {
  int gesture = 1;
  Provenance provenance;  // start_sample = offset of the segment in the recording
  SampleMatrix samples;   // Ch x n
  std::vector<std::size_t> window_starts;
};

struct Partition {
  GridLayout layout{};
  double fs = 1000.0;
  std::size_t window_length = 0;
  std::vector<Segment> segments;

  std::size_t window_count() const {
    std::size_t n = 0;
    for (const auto& s : segments) n += s.window_starts.size();
    return n;
  }
};

/// Filters a recording, keeps its central segment and lays out windows.
inline Segment preprocess_recording(const Recording& rec, const PreprocessOptions& opt) {
  rec.validate();
  const Recording filtered =
      opt.filter.enabled
          ? dsp::filter_apply(rec, dsp::design_bandstop(rec.fs, opt.filter.f_low, opt.filter.f_high, opt.filter.order))
          : rec;
  Segment s;
  s.gesture = rec.gesture;
  const std::size_t n = dsp::samples_for(opt.central_s, rec.fs);
  s.provenance = {rec.subject, rec.session, rec.repetition, dsp::central_start(rec.length(), n), std::nullopt};
  s.samples = dsp::central_segment(filtered, opt.central_s);
  s.window_starts = dsp::window_starts(n, dsp::samples_for(opt.window_ms / 1000.0, rec.fs),
                                       dsp::samples_for(opt.stride_ms / 1000.0, rec.fs));
  return s;
}

/// Builds a partition from recordings fetched one at a time, so at most one
/// raw recording is held in memory.
inline Partition build_partition(std::size_t count, const std::function<Recording(std::size_t)>& load,
                                 const PreprocessOptions& opt) {
  Partition p;
  p.segments.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Recording rec = load(i);
    if (i == 0) {
      p.layout = rec.layout;
      p.fs = rec.fs;
      p.window_length = dsp::samples_for(opt.window_ms / 1000.0, rec.fs);
    } else if (!(rec.layout == p.layout) || rec.fs != p.fs) {
      throw ProtocolError("partition: recordings differ in grid layout or sampling rate");
    }
    p.segments.push_back(preprocess_recording(rec, opt));
  }
  return p;
}

inline Partition build_partition(const std::vector<Recording>& recs, const PreprocessOptions& opt) {
  return build_partition(recs.size(), [&](std::size_t i) { return recs[i]; }, opt);
}

/// Fits per-channel statistics on `train` and standardizes both partitions.
inline void standardize_split(Partition& train, Partition& test, LeakageAudit* audit = nullptr) {
  if (train.segments.empty() || test.segments.empty())
    throw ProtocolError("standardize: empty train or test partition");
  std::vector<SampleMatrix> blocks;
  blocks.reserve(train.segments.size());
  for (const auto& s : train.segments) blocks.push_back(s.samples);
  const auto stats = dsp::fit_channel_stats(blocks);
  if (audit) {
    for (const auto& s : train.segments) audit->fitted.push_back({"channel_stats", fingerprint(s.samples)});
    for (const auto& s : test.segments) audit->test.push_back({"raw_segment", fingerprint(s.samples)});
  }
  for (auto& s : train.segments) dsp::standardize_inplace(s.samples, stats);
  for (auto& s : test.segments) dsp::standardize_inplace(s.samples, stats);
}

/// Channels each treatment reads.
inline std::vector<std::size_t> channels_for(Treatment t, const GridLayout& layout, std::size_t column_offset) {
  std::vector<std::size_t> out;
  switch (t) {
    case Treatment::central: out = central_subset(layout, column_offset).channels; break;
    case Treatment::all_subsets:
      for (const auto& s : enumerate_subsets(layout, column_offset))
        out.insert(out.end(), s.channels.begin(), s.channels.end());
      break;
    case Treatment::all_channels:
      out.resize(layout.channel_count());
      for (std::size_t c = 0; c < out.size(); ++c) out[c] = c;
      break;
  }
  return out;
}

/// Per-channel feature blocks for every window of a partition. Row i holds
/// window i; columns [c*dim, (c+1)*dim) hold channel c (only requested
/// channels are computed).
struct FeatureBank {
  features::FeatureSet feature_set = features::FeatureSet::td;
  std::size_t dim = 0;
  GridLayout layout{};
  Eigen::MatrixXd blocks;  // windows x (channels * dim)
  std::vector<int> labels;
  std::vector<bool> available;

  std::size_t windows() const { return labels.size(); }
};

inline FeatureBank extract_bank(const Partition& part, features::FeatureSet fs,
                                const std::vector<std::size_t>& channels, const features::FeatureParams& params,
                                unsigned threads = 0) {
  FeatureBank bank;
  bank.feature_set = fs;
  bank.dim = features::per_channel_dim(fs);
  bank.layout = part.layout;
  const std::size_t ch = part.layout.channel_count();
  bank.available.assign(ch, false);
  for (auto c : channels) bank.available.at(c) = true;
  std::vector<std::size_t> wanted;
  for (std::size_t c = 0; c < ch; ++c)
    if (bank.available[c]) wanted.push_back(c);

  struct Ref {
    std::size_t segment, start;
  };
  std::vector<Ref> refs;
  for (std::size_t s = 0; s < part.segments.size(); ++s)
    for (auto start : part.segments[s].window_starts) {
      refs.push_back({s, start});
      bank.labels.push_back(part.segments[s].gesture);
    }
  bank.blocks = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(refs.size()), static_cast<Eigen::Index>(ch * bank.dim));

  // Row-major scratch so each window's blocks are contiguous while writing.
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMat scratch = RowMat::Zero(bank.blocks.rows(), bank.blocks.cols());
  const std::size_t len = part.window_length;
  parallel_for(refs.size(), threads, [&](std::size_t i) {
    const auto& seg = part.segments[refs[i].segment];
    double* row = scratch.row(static_cast<Eigen::Index>(i)).data();
    for (auto c : wanted) {
      const double* x = seg.samples.row(static_cast<Eigen::Index>(c)).data() + refs[i].start;
      features::extract_channel(fs, std::span<const double>(x, len), params,
                                std::span<double>(row + c * bank.dim, bank.dim));
    }
  });
  bank.blocks = scratch;
  return bank;
}

struct Inputs {
  Eigen::MatrixXd x;
  std::vector<int> y;
};

/// Model inputs for a treatment. AVS rows are window-major, then subset row
/// ascending.
inline Inputs assemble(const FeatureBank& bank, Treatment t, std::size_t column_offset) {
  const auto require = [&](const std::vector<std::size_t>& chans) {
    for (auto c : chans)
      if (!bank.available[c]) throw ParameterError("assemble: channel " + std::to_string(c) + " was not extracted");
  };
  Inputs in;
  const auto n = static_cast<Eigen::Index>(bank.windows());
  const auto dim = static_cast<Eigen::Index>(bank.dim);
  auto copy_subset = [&](Eigen::Index dst_row, Eigen::Index src_row, const std::vector<std::size_t>& chans) {
    for (std::size_t m = 0; m < chans.size(); ++m)
      in.x.block(dst_row, static_cast<Eigen::Index>(m) * dim, 1, dim) =
          bank.blocks.block(src_row, static_cast<Eigen::Index>(chans[m]) * dim, 1, dim);
  };
  switch (t) {
    case Treatment::central: {
      const auto cs = central_subset(bank.layout, column_offset).channels;
      require(cs);
      in.x.resize(n, static_cast<Eigen::Index>(cs.size()) * dim);
      for (Eigen::Index i = 0; i < n; ++i) copy_subset(i, i, cs);
      in.y = bank.labels;
      break;
    }
    case Treatment::all_subsets: {
      const auto subsets = enumerate_subsets(bank.layout, column_offset);
      const auto r = static_cast<Eigen::Index>(subsets.size());
      for (const auto& s : subsets) require(s.channels);
      in.x.resize(n * r, static_cast<Eigen::Index>(bank.layout.module_count()) * dim);
      in.y.reserve(static_cast<std::size_t>(n * r));
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < r; ++k) {
          copy_subset(i * r + k, i, subsets[static_cast<std::size_t>(k)].channels);
          in.y.push_back(bank.labels[static_cast<std::size_t>(i)]);
        }
      break;
    }
    case Treatment::all_channels: {
      require(channels_for(Treatment::all_channels, bank.layout, column_offset));
      in.x = bank.blocks;
      in.y = bank.labels;
      break;
    }
  }
  return in;
}

struct ModelOptions {
  bool pca = false;
  double pca_threshold = 0.95;
  double lambda = 1e-6;
  std::size_t column_offset = 0;
};

struct ConditionResult {
  double accuracy = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t input_dim = 0;  // LDA input dimension (PCA components when enabled)
};

/// Fits on the train inputs and scores plain window-level accuracy.
inline ConditionResult fit_and_score(const Inputs& train, const Inputs& test, const ModelOptions& opt,
                                     LeakageAudit* audit = nullptr) {
  if (train.y.empty() || test.y.empty()) throw ProtocolError("run_condition: empty train or test partition");
  Eigen::MatrixXd xtr = train.x, xte = test.x;
  if (audit) {
    audit->fitted.push_back({"features", fingerprint(xtr)});
    audit->test.push_back({"features", fingerprint(xte)});
  }
  if (opt.pca) {
    const auto scaler = learn::FeatureScaler::fit(xtr);
    xtr = scaler.transform(xtr);
    xte = scaler.transform(xte);
    const auto pca = learn::fit_pca(xtr, opt.pca_threshold);
    if (audit) audit->fitted.push_back({"pca", fingerprint(xtr)});
    xtr = learn::pca_transform(pca, xtr);
    xte = learn::pca_transform(pca, xte);
  }
  if (audit) audit->fitted.push_back({"lda", fingerprint(xtr)});
  const auto model = learn::fit_lda(xtr, train.y, opt.lambda);
  const auto predicted = learn::lda_predict_rows(model, xte);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) correct += predicted[i] == test.y[i] ? 1 : 0;
  ConditionResult r;
  r.accuracy = static_cast<double>(correct) / static_cast<double>(predicted.size());
  r.n_train = train.y.size();
  r.n_test = test.y.size();
  r.input_dim = static_cast<std::size_t>(xtr.cols());
  return r;
}

inline ConditionResult evaluate(const FeatureBank& train, const FeatureBank& test, const Condition& cond,
                                const ModelOptions& opt, LeakageAudit* audit = nullptr) {
  return fit_and_score(assemble(train, cond.train, opt.column_offset), assemble(test, cond.test, opt.column_offset),
                       opt, audit);
}

/// Full single-cell pipeline on full-grid recordings:
/// treatment -> standardize (train stats) -> features -> [z-score + PCA] -> LDA.
inline ConditionResult run_condition(const std::vector<Recording>& train_recs, const std::vector<Recording>& test_recs,
                                     const Condition& cond, features::FeatureSet fs, const PreprocessOptions& pre,
                                     const features::FeatureParams& params, const ModelOptions& opt,
                                     LeakageAudit* audit = nullptr, unsigned threads = 0) {
  if (train_recs.empty() || test_recs.empty()) throw ProtocolError("run_condition: empty train or test partition");
  Partition train = build_partition(train_recs, pre);
  Partition test = build_partition(test_recs, pre);
  standardize_split(train, test, audit);
  const auto train_bank = extract_bank(train, fs, channels_for(cond.train, train.layout, opt.column_offset), params, threads);
  const auto test_bank = extract_bank(test, fs, channels_for(cond.test, test.layout, opt.column_offset), params, threads);
  return evaluate(train_bank, test_bank, cond, opt, audit);
}

}  // namespace emgshift::experiments
