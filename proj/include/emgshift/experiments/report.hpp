#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "emgshift/experiments/config.hpp"
#include "emgshift/stats/tests.hpp"

#ifndef EMGSHIFT_VERSION
#define EMGSHIFT_VERSION "0.1.0"
#endif

namespace emgshift::experiments {

/// One (unit, feature set, condition, pca) accuracy. A unit is a subject in
/// experiment 1 and a (subject, direction) pair in experiment 2.
struct Cell {
  std::string unit;
  int subject = 0;
  features::FeatureSet feature_set = features::FeatureSet::td;
  std::string condition;
  bool pca = false;
  double accuracy = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t input_dim = 0;
};

struct Aggregate {
  std::string feature_set;  // "avg" for the across-feature-set average
  std::string condition;
  bool pca = false;
  double mean = 0;
  double std = 0;  // sample std across units
  std::size_t n = 0;
};

struct StatEntry {
  std::string name;
  stats::TestResult result;
  std::string flag;  // "", "degenerate" or "insufficient-n"
};

struct ExperimentReport {
  int experiment = 1;
  std::string version = EMGSHIFT_VERSION;
  nlohmann::json config;
  std::vector<std::string> units;  // evaluation order
  std::vector<Cell> cells;
  std::vector<Aggregate> aggregates;
  std::vector<StatEntry> statistics;

  /// Per-unit accuracies in unit order; NaN where a cell is missing.
  std::vector<double> series(features::FeatureSet fs, const std::string& condition, bool pca) const {
    std::vector<double> out(units.size(), std::nan(""));
    for (const auto& c : cells)
      if (c.feature_set == fs && c.condition == condition && c.pca == pca)
        for (std::size_t u = 0; u < units.size(); ++u)
          if (units[u] == c.unit) out[u] = c.accuracy;
    return out;
  }

  /// Per-unit accuracy averaged over `feature_sets`.
  std::vector<double> average_series(const std::vector<features::FeatureSet>& feature_sets,
                                     const std::string& condition, bool pca) const {
    std::vector<double> out(units.size(), 0.0);
    for (auto fs : feature_sets) {
      const auto s = series(fs, condition, pca);
      for (std::size_t u = 0; u < out.size(); ++u) out[u] += s[u] / static_cast<double>(feature_sets.size());
    }
    return out;
  }

  const Aggregate* find_aggregate(std::string_view fs, std::string_view condition, bool pca) const {
    for (const auto& a : aggregates)
      if (a.feature_set == fs && a.condition == condition && a.pca == pca) return &a;
    return nullptr;
  }

  const StatEntry* find_statistic(std::string_view name) const {
    for (const auto& s : statistics)
      if (s.name == name) return &s;
    return nullptr;
  }
};

inline Aggregate summarize(std::string fs, std::string condition, bool pca, const std::vector<double>& v) {
  Aggregate a{std::move(fs), std::move(condition), pca, 0, 0, v.size()};
  if (v.empty()) return a;
  double s = 0;
  for (double x : v) s += x;
  a.mean = s / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0;
    for (double x : v) ss += (x - a.mean) * (x - a.mean);
    a.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return a;
}

inline void compute_aggregates(ExperimentReport& r, const std::vector<features::FeatureSet>& feature_sets,
                               const std::vector<Condition>& conditions, const std::vector<bool>& pca_modes) {
  r.aggregates.clear();
  for (bool pca : pca_modes)
    for (const auto& c : conditions) {
      for (auto fs : feature_sets)
        r.aggregates.push_back(summarize(std::string(features::to_string(fs)), c.name, pca, r.series(fs, c.name, pca)));
      r.aggregates.push_back(summarize("avg", c.name, pca, r.average_series(feature_sets, c.name, pca)));
    }
}

namespace detail {
inline StatEntry flagged(std::string name, stats::Method method, std::string flag) {
  StatEntry e;
  e.name = std::move(name);
  e.result.method = method;
  e.result.degenerate = true;
  e.result.p_value = 1.0;
  e.flag = std::move(flag);
  return e;
}

inline StatEntry entry(std::string name, const stats::TestResult& r) {
  return {std::move(name), r, r.degenerate ? "degenerate" : ""};
}

inline std::string pca_tag(bool pca) { return pca ? "pca" : "none"; }
}  // namespace detail

/// ANOVA across feature sets (cells pooled over units and conditions),
/// Levene across conditions and Wilcoxon of every condition against CS-CS
/// (both on per-unit feature-set averages).
inline void compute_statistics_exp1(ExperimentReport& r, const std::vector<features::FeatureSet>& feature_sets,
                                    const std::vector<Condition>& conditions, const std::vector<bool>& pca_modes) {
  const bool enough = r.units.size() >= 2;
  for (bool pca : pca_modes) {
    const std::string tag = "[" + detail::pca_tag(pca) + "]";
    if (feature_sets.size() >= 2) {
      std::vector<std::vector<double>> groups;
      for (auto fs : feature_sets) {
        std::vector<double> g;
        for (const auto& c : conditions)
          for (double v : r.series(fs, c.name, pca)) g.push_back(v);
        groups.push_back(std::move(g));
      }
      const bool ok = groups.front().size() >= 2;
      r.statistics.push_back(ok ? detail::entry("anova_feature_sets" + tag, stats::anova_oneway(groups))
                                : detail::flagged("anova_feature_sets" + tag, stats::Method::anova_f, "insufficient-n"));
    }
    if (conditions.size() >= 2) {
      std::vector<std::vector<double>> groups;
      for (const auto& c : conditions) groups.push_back(r.average_series(feature_sets, c.name, pca));
      r.statistics.push_back(enough ? detail::entry("levene_conditions" + tag, stats::levene(groups))
                                    : detail::flagged("levene_conditions" + tag, stats::Method::levene, "insufficient-n"));
    }
    bool has_baseline = false;
    for (const auto& c : conditions) has_baseline |= c.name == "CS-CS";
    if (!has_baseline) continue;
    const auto base = r.average_series(feature_sets, "CS-CS", pca);
    for (const auto& c : conditions) {
      if (c.name == "CS-CS") continue;
      const std::string name = "wilcoxon_CS-CS_vs_" + c.name + tag;
      if (r.units.empty()) {
        r.statistics.push_back(detail::flagged(name, stats::Method::wilcoxon_sr, "insufficient-n"));
        continue;
      }
      const auto other = r.average_series(feature_sets, c.name, pca);
      r.statistics.push_back(detail::entry(name, stats::wilcoxon_signed_rank(base, other)));
    }
  }
}

/// ANOVA across feature sets, one-sided paired t tests AVS > CS and
/// AVS > AC on feature-set averages, and AVS > CS per feature set.
inline void compute_statistics_exp2(ExperimentReport& r, const std::vector<features::FeatureSet>& feature_sets,
                                    const std::vector<Condition>& conditions, const std::vector<bool>& pca_modes) {
  const bool enough = r.units.size() >= 2;
  auto has = [&](std::string_view n) {
    for (const auto& c : conditions)
      if (c.name == n) return true;
    return false;
  };
  auto paired = [&](const std::string& name, const std::vector<double>& a, const std::vector<double>& b) {
    r.statistics.push_back(enough ? detail::entry(name, stats::paired_t(a, b, stats::Alternative::greater))
                                  : detail::flagged(name, stats::Method::paired_t, "insufficient-n"));
  };
  for (bool pca : pca_modes) {
    const std::string tag = "[" + detail::pca_tag(pca) + "]";
    if (feature_sets.size() >= 2) {
      std::vector<std::vector<double>> groups;
      for (auto fs : feature_sets) {
        std::vector<double> g;
        for (const auto& c : conditions)
          for (double v : r.series(fs, c.name, pca)) g.push_back(v);
        groups.push_back(std::move(g));
      }
      const bool ok = groups.front().size() >= 2;
      r.statistics.push_back(ok ? detail::entry("anova_feature_sets" + tag, stats::anova_oneway(groups))
                                : detail::flagged("anova_feature_sets" + tag, stats::Method::anova_f, "insufficient-n"));
    }
    if (!has("AVS")) continue;
    const auto avs = r.average_series(feature_sets, "AVS", pca);
    for (const char* other : {"CS", "AC"})
      if (has(other)) paired(std::string("paired_t_AVS-") + other + tag, avs, r.average_series(feature_sets, other, pca));
    if (has("CS"))
      for (auto fs : feature_sets)
        paired("paired_t_AVS-CS[" + std::string(features::to_string(fs)) + "]" + tag, r.series(fs, "AVS", pca),
               r.series(fs, "CS", pca));
  }
}

namespace detail {
inline std::string num(double v, int digits = 12) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}
}  // namespace detail

inline std::string cells_csv(const ExperimentReport& r) {
  std::ostringstream out;
  out << "unit,subject,feature_set,condition,pca,accuracy,n_train,n_test,input_dim\n";
  for (const auto& c : r.cells)
    out << c.unit << ',' << c.subject << ',' << features::to_string(c.feature_set) << ',' << c.condition << ','
        << detail::pca_tag(c.pca) << ',' << detail::num(c.accuracy) << ',' << c.n_train << ',' << c.n_test << ','
        << c.input_dim << '\n';
  return out.str();
}

inline std::string statistics_csv(const ExperimentReport& r) {
  std::ostringstream out;
  out << "name,method,alternative,statistic,df1,df2,p_value,exact,flag\n";
  for (const auto& s : r.statistics)
    out << s.name << ',' << stats::to_string(s.result.method) << ',' << stats::to_string(s.result.alternative) << ','
        << detail::num(s.result.statistic) << ',' << detail::num(s.result.df1) << ',' << detail::num(s.result.df2)
        << ',' << detail::num(s.result.p_value) << ',' << (s.result.exact ? 1 : 0) << ',' << s.flag << '\n';
  return out.str();
}

/// Feature sets as rows, conditions as columns, "mean ± std" across units.
inline std::string markdown(const ExperimentReport& r) {
  std::vector<std::string> conditions;
  std::vector<std::string> row_keys;
  std::vector<bool> modes;
  for (const auto& a : r.aggregates) {
    if (std::find(conditions.begin(), conditions.end(), a.condition) == conditions.end()) conditions.push_back(a.condition);
    if (std::find(row_keys.begin(), row_keys.end(), a.feature_set) == row_keys.end()) row_keys.push_back(a.feature_set);
    if (std::find(modes.begin(), modes.end(), a.pca) == modes.end()) modes.push_back(a.pca);
  }
  std::ostringstream out;
  out << "# Experiment " << r.experiment << " (" << (r.experiment == 1 ? "intrasession" : "intersession")
      << ")\n\nVersion: " << r.version << "  \nUnits: " << r.units.size() << "\n\n";
  out << "| |";
  for (const auto& c : conditions) out << ' ' << c << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < conditions.size(); ++i) out << "---|";
  out << '\n';
  for (bool pca : modes)
    for (const auto& key : row_keys) {
      std::string label = key == "avg" ? "**Avg. Score**" : key;
      if (pca) label += " (PCA)";
      out << "| " << label << " |";
      for (const auto& c : conditions) {
        const auto* a = r.find_aggregate(key, c, pca);
        out << ' ' << (a ? detail::fixed(a->mean) + " ± " + detail::fixed(a->std) : std::string("-")) << " |";
      }
      out << '\n';
    }
  out << "\n## Statistics\n\n| test | statistic | df | p | note |\n|---|---|---|---|---|\n";
  for (const auto& s : r.statistics) {
    std::string df = detail::num(s.result.df1, 6);
    if (s.result.df2 != 0) df += ", " + detail::num(s.result.df2, 6);
    out << "| " << s.name << " | " << detail::num(s.result.statistic, 6) << " | " << df << " | "
        << detail::num(s.result.p_value, 4) << " | " << s.flag << " |\n";
  }
  out << "\n## Configuration\n\n```json\n" << r.config.dump(2) << "\n```\n";
  return out.str();
}

/// Writes report.csv, statistics.csv, report.md and config.json into `dir`.
inline void write_report(const ExperimentReport& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("report: cannot create " + dir.string() + ": " + ec.message());
  auto put = [&](const char* name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("report: cannot write " + (dir / name).string());
    out << text;
  };
  put("report.csv", cells_csv(r));
  put("statistics.csv", statistics_csv(r));
  put("report.md", markdown(r));
  nlohmann::json meta = {{"experiment", r.experiment}, {"version", r.version}, {"config", r.config}};
  put("config.json", meta.dump(2) + "\n");
}

}  // namespace emgshift::experiments
