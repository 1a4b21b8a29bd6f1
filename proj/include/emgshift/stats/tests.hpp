#pragma once

// Hypothesis tests used to compare feature sets and training conditions.
// Degenerate inputs return flagged results instead of throwing, so a batch
// analysis never aborts on one constant column.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emgshift/stats/special.hpp"

namespace emgshift::stats {

enum class Method { anova_f, levene, wilcoxon_sr, paired_t };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::anova_f: return "anova_f";
    case Method::levene: return "levene";
    case Method::wilcoxon_sr: return "wilcoxon_sr";
    case Method::paired_t: return "paired_t";
  }
  return "?";
}

enum class Alternative { two_sided, greater, less };

inline std::string_view to_string(Alternative a) {
  switch (a) {
    case Alternative::two_sided: return "two-sided";
    case Alternative::greater: return "greater";
    case Alternative::less: return "less";
  }
  return "?";
}

inline Alternative parse_alternative(std::string_view s) {
  if (s == "two-sided") return Alternative::two_sided;
  if (s == "greater") return Alternative::greater;
  if (s == "less") return Alternative::less;
  throw ParameterError("unknown alternative '" + std::string(s) + "'");
}

struct TestResult {
  Method method = Method::anova_f;
  double statistic = 0;
  double p_value = 1;
  double df1 = 0;
  double df2 = 0;  // 0 when the test has a single df
  bool degenerate = false;
  bool exact = false;  // Wilcoxon: p from the exact null distribution
  Alternative alternative = Alternative::two_sided;
};

namespace detail {
inline double clamp_p(double p) { return std::clamp(p, 0.0, 1.0); }

inline void require_groups(std::span<const std::vector<double>> groups, const char* who) {
  if (groups.size() < 2) throw ParameterError(std::string(who) + ": need at least 2 groups");
  for (const auto& g : groups)
    if (g.size() < 2) throw ParameterError(std::string(who) + ": every group needs >= 2 values");
}

inline double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}
}  // namespace detail

/// One-way ANOVA F test.
inline TestResult anova_oneway(std::span<const std::vector<double>> groups) {
  detail::require_groups(groups, "anova_oneway");
  std::size_t n = 0;
  double total = 0;
  for (const auto& g : groups) {
    n += g.size();
    total += std::accumulate(g.begin(), g.end(), 0.0);
  }
  const double grand = total / static_cast<double>(n);
  double ssb = 0, ssw = 0;
  for (const auto& g : groups) {
    const double m = detail::mean(g);
    ssb += static_cast<double>(g.size()) * (m - grand) * (m - grand);
    for (double v : g) ssw += (v - m) * (v - m);
  }
  TestResult r;
  r.method = Method::anova_f;
  r.df1 = static_cast<double>(groups.size() - 1);
  r.df2 = static_cast<double>(n - groups.size());
  // Relative cutoff so exact-arithmetic zeros survive round-off.
  const double scale = ssb + ssw;
  if (ssw <= 1e-14 * scale || ssw == 0) {
    r.degenerate = true;
    r.statistic = ssb > 0 ? std::numeric_limits<double>::infinity() : 0.0;
    r.p_value = ssb > 0 ? 0.0 : 1.0;
    return r;
  }
  r.statistic = (ssb / r.df1) / (ssw / r.df2);
  r.p_value = detail::clamp_p(f_upper(r.statistic, r.df1, r.df2));
  return r;
}

inline TestResult anova_oneway(const std::vector<std::vector<double>>& groups) {
  return anova_oneway(std::span<const std::vector<double>>(groups));
}

/// Mean-centered Levene test: ANOVA on |x_ij - mean_i|.
inline TestResult levene(std::span<const std::vector<double>> groups) {
  detail::require_groups(groups, "levene");
  std::vector<std::vector<double>> z;
  z.reserve(groups.size());
  for (const auto& g : groups) {
    const double m = detail::mean(g);
    std::vector<double> zi;
    zi.reserve(g.size());
    for (double v : g) zi.push_back(std::abs(v - m));
    z.push_back(std::move(zi));
  }
  auto r = anova_oneway(z);
  r.method = Method::levene;
  return r;
}

inline TestResult levene(const std::vector<std::vector<double>>& groups) {
  return levene(std::span<const std::vector<double>>(groups));
}

/// Average ranks (1-based) of `values`, ties sharing the mean rank.
inline std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

enum class WilcoxonMode { automatic, exact, normal };

inline constexpr std::size_t kWilcoxonExactMaxN = 20;

/// Wilcoxon signed-rank test on a - b. V is the rank sum of positive
/// differences; zero differences are dropped.
///
/// Exact p-values come from the null distribution of V over all 2^n sign
/// assignments of the observed (tie-averaged) ranks, built by dynamic
/// programming on doubled ranks. The normal approximation uses tie and
/// continuity corrections.
inline TestResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                       Alternative alt = Alternative::two_sided,
                                       WilcoxonMode mode = WilcoxonMode::automatic) {
  if (a.size() != b.size()) throw ParameterError("wilcoxon_signed_rank: samples differ in length");
  std::vector<double> diffs;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] - b[i] != 0) diffs.push_back(a[i] - b[i]);

  TestResult r;
  r.method = Method::wilcoxon_sr;
  r.alternative = alt;
  r.df1 = static_cast<double>(diffs.size());
  if (diffs.empty()) {
    r.degenerate = true;
    r.p_value = 1.0;
    return r;
  }
  std::vector<double> magnitude(diffs.size());
  std::transform(diffs.begin(), diffs.end(), magnitude.begin(), [](double d) { return std::abs(d); });
  const auto ranks = average_ranks(magnitude);
  double v = 0;
  for (std::size_t i = 0; i < diffs.size(); ++i)
    if (diffs[i] > 0) v += ranks[i];
  r.statistic = v;

  const std::size_t n = diffs.size();
  const bool exact = mode == WilcoxonMode::exact ||
                     (mode == WilcoxonMode::automatic && n <= kWilcoxonExactMaxN);
  if (exact) {
    if (n > 62) throw ParameterError("wilcoxon_signed_rank: exact mode limited to n <= 62");
    // Doubled ranks are integers even with half-rank ties.
    std::vector<std::size_t> doubled(n);
    std::size_t max_sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      doubled[i] = static_cast<std::size_t>(std::llround(2.0 * ranks[i]));
      max_sum += doubled[i];
    }
    std::vector<double> counts(max_sum + 1, 0.0);
    counts[0] = 1.0;
    for (std::size_t dr : doubled)
      for (std::size_t s = max_sum; s + 1 > dr; --s) counts[s] += counts[s - dr];
    const auto observed = static_cast<std::size_t>(std::llround(2.0 * v));
    double below = 0, above = 0;
    for (std::size_t s = 0; s <= max_sum; ++s) {
      if (s <= observed) below += counts[s];
      if (s >= observed) above += counts[s];
    }
    const double total = std::ldexp(1.0, static_cast<int>(n));
    const double p_le = below / total, p_ge = above / total;
    r.exact = true;
    switch (alt) {
      case Alternative::two_sided: r.p_value = detail::clamp_p(2.0 * std::min(p_le, p_ge)); break;
      case Alternative::greater: r.p_value = detail::clamp_p(p_ge); break;
      case Alternative::less: r.p_value = detail::clamp_p(p_le); break;
    }
    return r;
  }

  const double nn = static_cast<double>(n);
  const double mu = nn * (nn + 1) / 4.0;
  double tie_term = 0;
  {
    std::vector<double> sorted = ranks;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
      std::size_t j = i;
      while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      tie_term += t * t * t - t;
      i = j + 1;
    }
  }
  const double var = nn * (nn + 1) * (2 * nn + 1) / 24.0 - tie_term / 48.0;
  const double sd = std::sqrt(var);
  const double diff = v - mu;
  switch (alt) {
    case Alternative::two_sided: {
      const double z = std::max(std::abs(diff) - 0.5, 0.0) / sd;
      r.p_value = detail::clamp_p(2.0 * (1.0 - normal_cdf(z)));
      break;
    }
    case Alternative::greater: r.p_value = detail::clamp_p(1.0 - normal_cdf((diff - 0.5) / sd)); break;
    case Alternative::less: r.p_value = detail::clamp_p(normal_cdf((diff + 0.5) / sd)); break;
  }
  return r;
}

/// Paired t test on a - b (sd with divisor n - 1).
inline TestResult paired_t(std::span<const double> a, std::span<const double> b,
                           Alternative alt = Alternative::two_sided) {
  if (a.size() != b.size()) throw ParameterError("paired_t: samples differ in length");
  if (a.size() < 2) throw ParameterError("paired_t: need at least 2 pairs");
  const std::size_t n = a.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  const double m = detail::mean(d);
  double ss = 0;
  for (double v : d) ss += (v - m) * (v - m);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  TestResult r;
  r.method = Method::paired_t;
  r.alternative = alt;
  r.df1 = static_cast<double>(n - 1);
  if (!(sd > 1e-14 * std::max(1.0, std::abs(m)))) {
    r.degenerate = true;
    r.statistic = m == 0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), m);
    const bool favours = (alt == Alternative::greater && m > 0) || (alt == Alternative::less && m < 0) ||
                         (alt == Alternative::two_sided && m != 0);
    r.p_value = favours ? 0.0 : 1.0;
    return r;
  }
  r.statistic = m / (sd / std::sqrt(static_cast<double>(n)));
  switch (alt) {
    case Alternative::two_sided:
      r.p_value = detail::clamp_p(2.0 * student_t_upper(std::abs(r.statistic), r.df1));
      break;
    case Alternative::greater: r.p_value = detail::clamp_p(student_t_upper(r.statistic, r.df1)); break;
    case Alternative::less: r.p_value = detail::clamp_p(student_t_cdf(r.statistic, r.df1)); break;
  }
  return r;
}

}  // namespace emgshift::stats
