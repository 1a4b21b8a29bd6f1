#pragma once

// Experiment drivers.
//
// Experiment 1 (intrasession): odd repetitions train, even repetitions test,
// conditions CS-CS / AVS-AVS / AVS-CS / CS-AVS.
// Experiment 2 (intersession): one session trains, the other tests,
// conditions AVS / CS / AC, with and without PCA.

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "emgshift/experiments/config.hpp"
#include "emgshift/experiments/pipeline.hpp"
#include "emgshift/experiments/report.hpp"
#include "emgshift/ingest.hpp"

namespace emgshift::experiments {

struct RecordingKey {
  int subject = 1;
  int session = 1;
  int gesture = 1;
  int repetition = 1;
  std::size_t index = 0;  // source-specific handle
};

class DataSource {
 public:
  virtual ~DataSource() = default;
  virtual GridLayout layout() const = 0;
  virtual double fs() const = 0;
  virtual std::vector<int> subjects() const = 0;
  virtual std::vector<RecordingKey> keys(int subject, int session) const = 0;
  virtual Recording load(const RecordingKey& key) const = 0;
};

/// Recordings generated on demand from a SyntheticSpec.
class SyntheticSource final : public DataSource {
 public:
  explicit SyntheticSource(ingest::SyntheticSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

  GridLayout layout() const override { return spec_.layout; }
  double fs() const override { return spec_.fs; }
  std::vector<int> subjects() const override {
    std::vector<int> s;
    for (int i = 1; i <= spec_.subjects; ++i) s.push_back(i);
    return s;
  }
  std::vector<RecordingKey> keys(int subject, int session) const override {
    std::vector<RecordingKey> out;
    if (subject < 1 || subject > spec_.subjects || session < 1 || session > spec_.sessions) return out;
    for (int g = 1; g <= spec_.gestures; ++g)
      for (int r = 1; r <= spec_.repetitions; ++r) out.push_back({subject, session, g, r, 0});
    return out;
  }
  Recording load(const RecordingKey& k) const override {
    return ingest::synthesize_recording(spec_, k.subject, k.session, k.gesture, k.repetition);
  }

 private:
  ingest::SyntheticSpec spec_;
};

/// Canonical dataset on disk; recordings are read lazily.
class CanonicalSource final : public DataSource {
 public:
  explicit CanonicalSource(std::filesystem::path root) : root_(std::move(root)), manifest_(ingest::read_manifest(root_)) {}

  GridLayout layout() const override { return manifest_.layout; }
  double fs() const override { return manifest_.fs; }
  std::vector<int> subjects() const override {
    std::set<int> s;
    for (const auto& e : manifest_.recordings) s.insert(e.subject);
    return {s.begin(), s.end()};
  }
  std::vector<RecordingKey> keys(int subject, int session) const override {
    std::vector<RecordingKey> out;
    for (std::size_t i = 0; i < manifest_.recordings.size(); ++i) {
      const auto& e = manifest_.recordings[i];
      if (e.subject == subject && e.session == session) out.push_back({e.subject, e.session, e.gesture, e.repetition, i});
    }
    std::stable_sort(out.begin(), out.end(), [](const RecordingKey& a, const RecordingKey& b) {
      return std::pair(a.gesture, a.repetition) < std::pair(b.gesture, b.repetition);
    });
    return out;
  }
  Recording load(const RecordingKey& k) const override {
    return ingest::read_recording(root_, manifest_, manifest_.recordings.at(k.index));
  }
  const ingest::Manifest& manifest() const { return manifest_; }

 private:
  std::filesystem::path root_;
  ingest::Manifest manifest_;
};

inline std::unique_ptr<DataSource> make_source(const ExperimentConfig& c) {
  if (c.synthetic) return std::make_unique<SyntheticSource>(*c.synthetic);
  return std::make_unique<CanonicalSource>(*c.dataset_root);
}

inline constexpr int kRepetitionsPerGesture = 10;

/// Odd repetitions train, even repetitions test. Every gesture present must
/// have repetitions 1..10 exactly once.
template <typename Rec>
std::pair<std::vector<Rec>, std::vector<Rec>> split_intrasession(const std::vector<Rec>& recs,
                                                                 int repetitions = kRepetitionsPerGesture) {
  std::map<int, std::map<int, int>> seen;  // gesture -> repetition -> count
  for (const auto& r : recs) seen[r.gesture][r.repetition] += 1;
  std::string problems;
  for (const auto& [g, reps] : seen) {
    for (int k = 1; k <= repetitions; ++k) {
      const auto it = reps.find(k);
      if (it == reps.end()) problems += " gesture " + std::to_string(g) + " missing repetition " + std::to_string(k) + ";";
      else if (it->second > 1) problems += " gesture " + std::to_string(g) + " repeats repetition " + std::to_string(k) + ";";
    }
    for (const auto& [k, n] : reps)
      if (k < 1 || k > repetitions)
        problems += " gesture " + std::to_string(g) + " has unexpected repetition " + std::to_string(k) + ";";
  }
  if (recs.empty()) problems = " no recordings";
  if (!problems.empty()) throw ProtocolError("split_intrasession:" + problems);
  std::pair<std::vector<Rec>, std::vector<Rec>> out;
  for (const auto& r : recs) (r.repetition % 2 == 1 ? out.first : out.second).push_back(r);
  return out;
}

using ProgressFn = std::function<void(const std::string&)>;

struct RunContext {
  LeakageAudit* audit = nullptr;
  ProgressFn progress;
};

namespace detail {
inline PreprocessOptions preprocess_options(const ExperimentConfig& c) {
  return {c.filter, c.central_s, c.window_ms, c.stride_ms};
}

inline features::FeatureParams feature_params(const ExperimentConfig& c) {
  features::FeatureParams p;
  p.zc_threshold = c.zc_threshold;
  return p;
}

inline Partition load_partition(const DataSource& src, const std::vector<RecordingKey>& keys,
                                const PreprocessOptions& opt) {
  return build_partition(keys.size(), [&](std::size_t i) { return src.load(keys[i]); }, opt);
}

inline std::vector<std::size_t> union_channels(const std::vector<Condition>& conds, bool train_side,
                                               const GridLayout& layout, std::size_t offset) {
  std::set<std::size_t> s;
  for (const auto& c : conds)
    for (auto ch : channels_for(train_side ? c.train : c.test, layout, offset)) s.insert(ch);
  return {s.begin(), s.end()};
}

inline std::vector<int> selected_subjects(const DataSource& src, const ExperimentConfig& c) {
  std::vector<int> out;
  for (int s : src.subjects()) {
    if (!c.subjects.empty() && std::find(c.subjects.begin(), c.subjects.end(), s) == c.subjects.end()) continue;
    if (std::find(c.skip_subjects.begin(), c.skip_subjects.end(), s) != c.skip_subjects.end()) continue;
    out.push_back(s);
  }
  if (out.empty()) throw ProtocolError("no subjects selected from the dataset");
  return out;
}

inline std::string subject_tag(int s) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "s%02d", s);
  return buf;
}

/// Evaluates every (feature set, condition, pca) cell on a standardized split.
inline std::vector<Cell> evaluate_split(const Partition& train, const Partition& test, const ExperimentConfig& c,
                                        const std::string& unit, int subject, const RunContext& ctx) {
  const auto& conds = c.effective_conditions();
  const auto train_channels = union_channels(conds, true, train.layout, c.column_offset);
  const auto test_channels = union_channels(conds, false, test.layout, c.column_offset);
  std::vector<Cell> cells;
  for (auto fs : c.feature_sets) {
    if (ctx.progress) ctx.progress(unit + ": extracting " + std::string(features::to_string(fs)));
    const auto params = feature_params(c);
    const auto train_bank = extract_bank(train, fs, train_channels, params, c.threads);
    const auto test_bank = extract_bank(test, fs, test_channels, params, c.threads);
    for (const auto& cond : conds)
      for (bool pca : c.pca_modes) {
        ModelOptions opt{pca, c.pca_threshold, c.lambda, c.column_offset};
        const auto r = evaluate(train_bank, test_bank, cond, opt, ctx.audit);
        cells.push_back({unit, subject, fs, cond.name, pca, r.accuracy, r.n_train, r.n_test, r.input_dim});
      }
  }
  return cells;
}
}  // namespace detail

inline ExperimentReport run_experiment1(const ExperimentConfig& c, const DataSource& src, const RunContext& ctx = {}) {
  c.validate();
  if (c.experiment != 1) throw ParameterError("run_experiment1: config is for experiment " + std::to_string(c.experiment));
  ExperimentReport report;
  report.experiment = 1;
  report.config = config_to_json(c);
  const auto pre = detail::preprocess_options(c);
  for (int s : detail::selected_subjects(src, c)) {
    const std::string unit = detail::subject_tag(s);
    if (ctx.progress) ctx.progress(unit + ": loading session " + std::to_string(c.session));
    const auto keys = src.keys(s, c.session);
    if (keys.empty()) throw ProtocolError(unit + " has no recordings for session " + std::to_string(c.session));
    auto [train_keys, test_keys] = split_intrasession(keys);
    Partition train = detail::load_partition(src, train_keys, pre);
    Partition test = detail::load_partition(src, test_keys, pre);
    standardize_split(train, test, ctx.audit);
    report.units.push_back(unit);
    auto cells = detail::evaluate_split(train, test, c, unit, s, ctx);
    report.cells.insert(report.cells.end(), cells.begin(), cells.end());
  }
  compute_aggregates(report, c.feature_sets, c.effective_conditions(), c.pca_modes);
  compute_statistics_exp1(report, c.feature_sets, c.effective_conditions(), c.pca_modes);
  return report;
}

inline ExperimentReport run_experiment2(const ExperimentConfig& c, const DataSource& src, const RunContext& ctx = {}) {
  c.validate();
  if (c.experiment != 2) throw ParameterError("run_experiment2: config is for experiment " + std::to_string(c.experiment));
  ExperimentReport report;
  report.experiment = 2;
  report.config = config_to_json(c);
  const auto pre = detail::preprocess_options(c);
  for (int s : detail::selected_subjects(src, c)) {
    const std::string tag = detail::subject_tag(s);
    const auto k1 = src.keys(s, 1), k2 = src.keys(s, 2);
    if (k1.empty() || k2.empty()) throw ProtocolError(tag + " needs two sessions for intersession evaluation");
    if (ctx.progress) ctx.progress(tag + ": loading sessions");
    const Partition s1 = detail::load_partition(src, k1, pre);
    const Partition s2 = detail::load_partition(src, k2, pre);

    auto run_direction = [&](bool forward, const std::string& unit) {
      Partition train = forward ? s1 : s2;
      Partition test = forward ? s2 : s1;
      standardize_split(train, test, ctx.audit);
      return detail::evaluate_split(train, test, c, unit, s, ctx);
    };

    switch (c.direction) {
      case SessionDirection::forward:
      case SessionDirection::backward: {
        const bool fwd = c.direction == SessionDirection::forward;
        const std::string unit = tag + ":" + std::string(to_string(c.direction));
        report.units.push_back(unit);
        auto cells = run_direction(fwd, unit);
        report.cells.insert(report.cells.end(), cells.begin(), cells.end());
        break;
      }
      case SessionDirection::both:
        for (bool fwd : {true, false}) {
          const std::string unit = tag + ":" + (fwd ? "1to2" : "2to1");
          report.units.push_back(unit);
          auto cells = run_direction(fwd, unit);
          report.cells.insert(report.cells.end(), cells.begin(), cells.end());
        }
        break;
      case SessionDirection::both_averaged: {
        const std::string unit = tag + ":avg";
        auto a = run_direction(true, unit);
        const auto b = run_direction(false, unit);
        for (std::size_t i = 0; i < a.size(); ++i) {
          a[i].accuracy = 0.5 * (a[i].accuracy + b[i].accuracy);
          a[i].n_test += b[i].n_test;
        }
        report.units.push_back(unit);
        report.cells.insert(report.cells.end(), a.begin(), a.end());
        break;
      }
    }
  }
  compute_aggregates(report, c.feature_sets, c.effective_conditions(), c.pca_modes);
  compute_statistics_exp2(report, c.feature_sets, c.effective_conditions(), c.pca_modes);
  return report;
}

inline ExperimentReport run_experiment(const ExperimentConfig& c, const RunContext& ctx = {}) {
  const auto src = make_source(c);
  return c.experiment == 1 ? run_experiment1(c, *src, ctx) : run_experiment2(c, *src, ctx);
}

}  // namespace emgshift::experiments
