#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "emgshift/features/feature_sets.hpp"
#include "emgshift/ingest.hpp"

namespace emgshift::experiments {

/// How a partition's full-grid windows are turned into model inputs.
enum class Treatment {
  central,      // CS: central subset only
  all_subsets,  // AVS: one instance per valid subset
  all_channels  // AC: every grid channel
};

struct Condition {
  std::string name;
  Treatment train = Treatment::central;
  Treatment test = Treatment::central;
};

inline const std::vector<Condition>& experiment1_conditions() {
  static const std::vector<Condition> c = {
      {"CS-CS", Treatment::central, Treatment::central},
      {"AVS-AVS", Treatment::all_subsets, Treatment::all_subsets},
      {"AVS-CS", Treatment::all_subsets, Treatment::central},
      {"CS-AVS", Treatment::central, Treatment::all_subsets},
  };
  return c;
}

inline const std::vector<Condition>& experiment2_conditions() {
  static const std::vector<Condition> c = {
      {"AVS", Treatment::all_subsets, Treatment::central},
      {"CS", Treatment::central, Treatment::central},
      {"AC", Treatment::all_channels, Treatment::all_channels},
  };
  return c;
}

inline Condition find_condition(int experiment, std::string_view name) {
  const auto& all = experiment == 1 ? experiment1_conditions() : experiment2_conditions();
  for (const auto& c : all)
    if (c.name == name) return c;
  throw ParameterError("condition '" + std::string(name) + "' is not defined for experiment " +
                       std::to_string(experiment));
}

enum class SessionDirection { forward, backward, both, both_averaged };

inline std::string_view to_string(SessionDirection d) {
  switch (d) {
    case SessionDirection::forward: return "1to2";
    case SessionDirection::backward: return "2to1";
    case SessionDirection::both: return "both";
    case SessionDirection::both_averaged: return "both-averaged";
  }
  return "?";
}

inline SessionDirection parse_direction(std::string_view s) {
  for (auto d : {SessionDirection::forward, SessionDirection::backward, SessionDirection::both,
                 SessionDirection::both_averaged})
    if (to_string(d) == s) return d;
  throw ParameterError("unknown session_direction '" + std::string(s) +
                       "' (expected 1to2, 2to1, both or both-averaged)");
}

struct FilterConfig {
  bool enabled = true;
  double f_low = 45.0;
  double f_high = 55.0;
  int order = 2;
};

struct ExperimentConfig {
  int experiment = 1;
  std::optional<std::filesystem::path> dataset_root;
  std::optional<ingest::SyntheticSpec> synthetic;
  std::vector<features::FeatureSet> feature_sets{features::kAllFeatureSets.begin(),
                                                 features::kAllFeatureSets.end()};
  std::vector<Condition> conditions;  // empty: every condition of the experiment
  std::vector<bool> pca_modes;        // false = raw features, true = z-score + PCA
  double pca_threshold = 0.95;
  double window_ms = 256;
  double stride_ms = 15;
  double central_s = 1.0;
  FilterConfig filter;
  double zc_threshold = 0.01;
  double lambda = 1e-6;
  std::uint64_t seed = 1;
  int session = 1;  // experiment 1
  SessionDirection direction = SessionDirection::forward;
  std::size_t column_offset = 0;
  std::vector<int> subjects;       // empty: all
  std::vector<int> skip_subjects;  // experiment 2 defaults to {10}
  unsigned threads = 0;
  std::filesystem::path output_dir = "emgshift-report";

  const std::vector<Condition>& effective_conditions() const {
    return conditions.empty() ? (experiment == 1 ? experiment1_conditions() : experiment2_conditions())
                              : conditions;
  }

  void validate() const {
    if (experiment != 1 && experiment != 2) throw ParameterError("config: experiment must be 1 or 2");
    if (dataset_root.has_value() == synthetic.has_value())
      throw ParameterError("config: give exactly one of dataset_root and synthetic");
    if (feature_sets.empty()) throw ParameterError("config: no feature sets selected");
    for (const auto& c : conditions) (void)find_condition(experiment, c.name);
    if (pca_modes.empty()) throw ParameterError("config: pca_modes is empty");
    if (!(pca_threshold > 0 && pca_threshold <= 1)) throw ParameterError("config: pca_threshold must be in (0, 1]");
    if (!(window_ms > 0) || !(stride_ms > 0) || !(central_s > 0))
      throw ParameterError("config: window_ms, stride_ms and central_s must be > 0");
    if (!(zc_threshold >= 0)) throw ParameterError("config: zc_threshold must be >= 0");
    if (!(lambda >= 0)) throw ParameterError("config: lambda must be >= 0");
    if (synthetic) synthetic->validate();
  }
};

namespace detail {
inline double json_number_or_inf(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    throw ParameterError("config: expected a number or \"inf\", got \"" + s + "\"");
  }
  return j.get<double>();
}

inline nlohmann::json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}
}  // namespace detail

inline ingest::SyntheticSpec synthetic_from_json(const nlohmann::json& j, std::uint64_t default_seed) {
  ingest::SyntheticSpec s;
  s.layout.rows = j.value("rows", s.layout.rows);
  s.layout.cols = j.value("cols", s.layout.cols);
  s.layout.module_width = j.value("module_width", s.layout.module_width);
  s.layout.pitch_mm = j.value("pitch_mm", s.layout.pitch_mm);
  s.fs = j.value("fs_hz", s.fs);
  s.gestures = j.value("gestures", s.gestures);
  s.repetitions = j.value("repetitions", s.repetitions);
  s.subjects = j.value("subjects", s.subjects);
  s.sessions = j.value("sessions", s.sessions);
  s.duration_s = j.value("duration_s", s.duration_s);
  s.sources_per_gesture = j.value("sources_per_gesture", s.sources_per_gesture);
  if (j.contains("spatial_sigma")) s.spatial_sigma = detail::json_number_or_inf(j.at("spatial_sigma"));
  if (j.contains("snr_db")) s.snr_db = detail::json_number_or_inf(j.at("snr_db"));
  s.session_row_shift = j.value("session_row_shift", s.session_row_shift);
  s.amplitude_jitter = j.value("amplitude_jitter", s.amplitude_jitter);
  s.band_low_hz = j.value("band_low_hz", s.band_low_hz);
  s.band_high_hz = j.value("band_high_hz", s.band_high_hz);
  s.seed.value = j.value("seed", default_seed);
  return s;
}

inline nlohmann::json synthetic_to_json(const ingest::SyntheticSpec& s) {
  return {{"rows", s.layout.rows},
          {"cols", s.layout.cols},
          {"module_width", s.layout.module_width},
          {"pitch_mm", s.layout.pitch_mm},
          {"fs_hz", s.fs},
          {"gestures", s.gestures},
          {"repetitions", s.repetitions},
          {"subjects", s.subjects},
          {"sessions", s.sessions},
          {"duration_s", s.duration_s},
          {"sources_per_gesture", s.sources_per_gesture},
          {"spatial_sigma", detail::number_or_inf(s.spatial_sigma)},
          {"snr_db", detail::number_or_inf(s.snr_db)},
          {"session_row_shift", s.session_row_shift},
          {"amplitude_jitter", s.amplitude_jitter},
          {"band_low_hz", s.band_low_hz},
          {"band_high_hz", s.band_high_hz},
          {"seed", s.seed.value}};
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    c.experiment = j.at("experiment").get<int>();
    c.seed = j.value("seed", c.seed);
    if (j.contains("dataset_root")) c.dataset_root = j.at("dataset_root").get<std::string>();
    if (j.contains("synthetic")) c.synthetic = synthetic_from_json(j.at("synthetic"), c.seed);
    if (j.contains("feature_sets")) {
      c.feature_sets.clear();
      for (const auto& name : j.at("feature_sets")) c.feature_sets.push_back(features::parse_feature_set(name.get<std::string>()));
    }
    if (j.contains("conditions"))
      for (const auto& name : j.at("conditions")) c.conditions.push_back(find_condition(c.experiment, name.get<std::string>()));
    if (j.contains("pca_modes")) {
      for (const auto& m : j.at("pca_modes")) {
        const auto s = m.get<std::string>();
        if (s == "none") c.pca_modes.push_back(false);
        else if (s == "pca") c.pca_modes.push_back(true);
        else throw ParameterError("config: pca_modes entries must be \"none\" or \"pca\"");
      }
    } else {
      c.pca_modes = c.experiment == 1 ? std::vector<bool>{false} : std::vector<bool>{false, true};
    }
    c.pca_threshold = j.value("pca_threshold", c.pca_threshold);
    c.window_ms = j.value("window_ms", c.window_ms);
    c.stride_ms = j.value("stride_ms", c.stride_ms);
    c.central_s = j.value("central_s", c.central_s);
    if (j.contains("filter")) {
      const auto& f = j.at("filter");
      c.filter.enabled = f.value("enabled", c.filter.enabled);
      c.filter.f_low = f.value("f_low", c.filter.f_low);
      c.filter.f_high = f.value("f_high", c.filter.f_high);
      c.filter.order = f.value("order", c.filter.order);
    }
    c.zc_threshold = j.value("zc_threshold", c.zc_threshold);
    c.lambda = j.value("lambda", c.lambda);
    c.session = j.value("session", c.session);
    if (j.contains("session_direction")) c.direction = parse_direction(j.at("session_direction").get<std::string>());
    c.column_offset = j.value("column_offset", c.column_offset);
    c.subjects = j.value("subjects", c.subjects);
    c.skip_subjects = j.contains("skip_subjects") ? j.at("skip_subjects").get<std::vector<int>>()
                      : c.experiment == 2               ? std::vector<int>{10}
                                                        : std::vector<int>{};
    c.threads = j.value("threads", c.threads);
    c.output_dir = j.value("output_dir", c.output_dir.string());
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

/// Normalized echo of every setting (threads and output_dir excluded, since
/// they never change results).
inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["experiment"] = c.experiment;
  if (c.dataset_root) j["dataset_root"] = c.dataset_root->string();
  if (c.synthetic) j["synthetic"] = synthetic_to_json(*c.synthetic);
  j["feature_sets"] = nlohmann::json::array();
  for (auto fs : c.feature_sets) j["feature_sets"].push_back(std::string(features::to_string(fs)));
  j["conditions"] = nlohmann::json::array();
  for (const auto& cond : c.effective_conditions()) j["conditions"].push_back(cond.name);
  j["pca_modes"] = nlohmann::json::array();
  for (bool p : c.pca_modes) j["pca_modes"].push_back(p ? "pca" : "none");
  j["pca_threshold"] = c.pca_threshold;
  j["pca_input"] = "z-scored features (train statistics)";
  j["window_ms"] = c.window_ms;
  j["stride_ms"] = c.stride_ms;
  j["central_s"] = c.central_s;
  j["filter"] = {{"enabled", c.filter.enabled}, {"f_low", c.filter.f_low}, {"f_high", c.filter.f_high},
                 {"order", c.filter.order}};
  j["zc_threshold"] = c.zc_threshold;
  j["lambda"] = c.lambda;
  j["seed"] = c.seed;
  j["session"] = c.session;
  j["session_direction"] = std::string(to_string(c.direction));
  j["column_offset"] = c.column_offset;
  j["subjects"] = c.subjects;
  j["skip_subjects"] = c.skip_subjects;
  return j;
}

}  // namespace emgshift::experiments
