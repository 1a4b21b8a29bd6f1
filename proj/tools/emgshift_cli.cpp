// emgshift command-line tool.
//
//   emgshift synth --out DIR [options]       generate a synthetic canonical dataset
//   emgshift run --config FILE               run experiment 1 or 2
//   emgshift stats --input CSV --test NAME   run one statistical test on CSV columns
//   emgshift inspect --root DIR              summarize a canonical dataset
//   emgshift convert-check --root DIR        validate a canonical dataset
//
// Exit codes: 0 success, 2 protocol or usage error, 3 I/O error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "emgshift/emgshift.hpp"

namespace {

using namespace emgshift;

constexpr int kExitProtocol = 2;
constexpr int kExitIo = 3;

int cmd_synth(const std::string& out, const std::string& spec_path, int subjects, int sessions, long long seed,
              int shift, double snr, double sigma, double duration) {
  ingest::SyntheticSpec spec;
  if (!spec_path.empty()) {
    std::ifstream in(spec_path);
    if (!in) throw IoError("cannot open " + spec_path);
    nlohmann::json j;
    in >> j;
    spec = experiments::synthetic_from_json(j, spec.seed.value);
  }
  if (subjects > 0) spec.subjects = subjects;
  if (sessions > 0) spec.sessions = sessions;
  if (seed >= 0) spec.seed.value = static_cast<std::uint64_t>(seed);
  if (shift != std::numeric_limits<int>::min()) spec.session_row_shift = shift;
  if (!std::isnan(snr)) spec.snr_db = snr;
  if (!std::isnan(sigma)) spec.spatial_sigma = sigma;
  if (!std::isnan(duration)) spec.duration_s = duration;
  spec.validate();

  // Written session by session to bound memory.
  std::vector<Recording> all;
  for (int s = 1; s <= spec.subjects; ++s)
    for (int e = 1; e <= spec.sessions; ++e) {
      auto rec = ingest::generate_session(spec, s, e);
      std::move(rec.begin(), rec.end(), std::back_inserter(all));
    }
  const auto manifest = ingest::write_canonical(out, spec.layout, spec.fs, all);
  std::cout << "wrote " << all.size() << " recordings to " << manifest.string() << "\n";
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& out, unsigned threads, bool quiet) {
  auto config = experiments::load_config(config_path);
  if (!out.empty()) config.output_dir = out;
  if (threads > 0) config.threads = threads;
  experiments::RunContext ctx;
  const auto t0 = std::chrono::steady_clock::now();
  if (!quiet) ctx.progress = [&](const std::string& msg) {
    const auto s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cerr << "[" << std::fixed << std::setprecision(1) << s << "s] " << msg << "\n";
  };
  const auto report = experiments::run_experiment(config, ctx);
  experiments::write_report(report, config.output_dir);
  std::cout << experiments::markdown(report);
  std::cerr << "report written to " << config.output_dir.string() << "\n";
  return 0;
}

std::vector<std::vector<double>> read_columns(const std::string& path, std::vector<std::string>& names) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
  };
  std::string line;
  if (!std::getline(in, line)) throw ProtocolError("stats: " + path + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  names = split(line);
  std::vector<std::vector<double>> cols(names.size());
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() > names.size()) throw ProtocolError("stats: row " + std::to_string(row) + " has too many cells");
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c].empty()) continue;
      try {
        cols[c].push_back(std::stod(cells[c]));
      } catch (const std::exception&) {
        throw ProtocolError("stats: row " + std::to_string(row) + " column " + names[c] + " is not a number");
      }
    }
  }
  return cols;
}

int cmd_stats(const std::string& input, const std::string& test, const std::string& alternative) {
  std::vector<std::string> names;
  const auto cols = read_columns(input, names);
  const auto alt = stats::parse_alternative(alternative);
  stats::TestResult r;
  if (test == "anova") r = stats::anova_oneway(cols);
  else if (test == "levene") r = stats::levene(cols);
  else if (test == "wilcoxon" || test == "paired-t") {
    if (cols.size() != 2) throw ProtocolError("stats: " + test + " needs exactly two columns");
    r = test == "wilcoxon" ? stats::wilcoxon_signed_rank(cols[0], cols[1], alt) : stats::paired_t(cols[0], cols[1], alt);
  } else {
    throw ParameterError("stats: unknown test '" + test + "' (anova, levene, wilcoxon, paired-t)");
  }
  std::cout << "method,alternative,statistic,df1,df2,p_value,degenerate\n"
            << stats::to_string(r.method) << ',' << stats::to_string(r.alternative) << ','
            << experiments::detail::num(r.statistic) << ',' << experiments::detail::num(r.df1) << ','
            << experiments::detail::num(r.df2) << ',' << experiments::detail::num(r.p_value) << ','
            << (r.degenerate ? 1 : 0) << '\n';
  return 0;
}

int cmd_inspect(const std::string& root) {
  const auto m = ingest::read_manifest(root);
  std::map<std::pair<int, int>, std::size_t> per_session;
  std::set<int> gestures;
  std::size_t min_len = std::numeric_limits<std::size_t>::max(), max_len = 0;
  for (const auto& e : m.recordings) {
    per_session[{e.subject, e.session}] += 1;
    gestures.insert(e.gesture);
    min_len = std::min(min_len, e.sample_count);
    max_len = std::max(max_len, e.sample_count);
  }
  std::cout << "format_version: " << m.format_version << "\n"
            << "grid: " << m.layout.rows << "x" << m.layout.cols << " (module width " << m.layout.module_width
            << ", pitch " << m.layout.pitch_mm << " mm), " << m.layout.channel_count() << " channels\n"
            << "fs: " << m.fs << " Hz\n"
            << "recordings: " << m.recordings.size() << "\n"
            << "gestures: " << gestures.size() << "\n";
  if (!m.recordings.empty())
    std::cout << "samples per recording: " << min_len << ".." << max_len << " (" << static_cast<double>(min_len) / m.fs
              << ".." << static_cast<double>(max_len) / m.fs << " s)\n";
  for (const auto& [key, n] : per_session)
    std::cout << "  subject " << key.first << " session " << key.second << ": " << n << " recordings\n";
  return 0;
}

int cmd_convert_check(const std::string& root, int expect_channels, double expect_fs, int repetitions) {
  const auto m = ingest::read_manifest(root);
  if (expect_channels > 0 && m.layout.channel_count() != static_cast<std::size_t>(expect_channels))
    throw ProtocolError("convert-check: grid has " + std::to_string(m.layout.channel_count()) + " channels, expected " +
                        std::to_string(expect_channels));
  if (expect_fs > 0 && m.fs != expect_fs)
    throw ProtocolError("convert-check: fs is " + std::to_string(m.fs) + ", expected " + std::to_string(expect_fs));
  std::map<std::pair<int, int>, std::vector<experiments::RecordingKey>> sessions;
  for (const auto& e : m.recordings) {
    ingest::check_entry(root, m, e);
    sessions[{e.subject, e.session}].push_back({e.subject, e.session, e.gesture, e.repetition, 0});
  }
  for (const auto& [key, recs] : sessions) {
    try {
      (void)experiments::split_intrasession(recs, repetitions);
    } catch (const ProtocolError& err) {
      throw ProtocolError("subject " + std::to_string(key.first) + " session " + std::to_string(key.second) + ": " +
                          err.what());
    }
  }
  std::cout << "ok: " << m.recordings.size() << " recordings in " << sessions.size() << " sessions, "
            << m.layout.channel_count() << " channels at " << m.fs << " Hz\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HD-sEMG channel-subset augmentation benchmark"};
  app.require_subcommand(1);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic canonical dataset");
  std::string synth_out, synth_spec;
  int synth_subjects = 0, synth_sessions = 0, synth_shift = std::numeric_limits<int>::min();
  long long synth_seed = -1;
  double synth_snr = std::nan(""), synth_sigma = std::nan(""), synth_duration = std::nan("");
  synth->add_option("--out", synth_out, "Output dataset root")->required();
  synth->add_option("--spec", synth_spec, "JSON file with synthetic generator settings");
  synth->add_option("--subjects", synth_subjects, "Number of pseudo-subjects");
  synth->add_option("--sessions", synth_sessions, "Sessions per subject");
  synth->add_option("--seed", synth_seed, "Generator seed");
  synth->add_option("--shift", synth_shift, "Row shift applied to sessions after the first");
  synth->add_option("--snr", synth_snr, "Sensor SNR in dB");
  synth->add_option("--sigma", synth_sigma, "Spatial spread of sources in grid cells");
  synth->add_option("--duration", synth_duration, "Seconds per repetition");

  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
  std::string run_config, run_out;
  unsigned run_threads = 0;
  bool run_quiet = false;
  run->add_option("--config", run_config, "Experiment config (JSON)")->required();
  run->add_option("--out", run_out, "Override output_dir");
  run->add_option("--threads", run_threads, "Worker threads (0 = all cores)");
  run->add_flag("--quiet", run_quiet, "No progress messages");

  auto* st = app.add_subcommand("stats", "Statistical test over CSV columns (header row names groups)");
  std::string st_input, st_test, st_alt = "two-sided";
  st->add_option("--input", st_input, "CSV file")->required();
  st->add_option("--test", st_test, "anova | levene | wilcoxon | paired-t")->required();
  st->add_option("--alternative", st_alt, "two-sided | greater | less (paired tests)");

  auto* inspect = app.add_subcommand("inspect", "Summarize a canonical dataset");
  std::string inspect_root;
  inspect->add_option("--root", inspect_root, "Dataset root")->required();

  auto* check = app.add_subcommand("convert-check", "Validate a canonical dataset");
  std::string check_root;
  int check_channels = 0, check_reps = 10;
  double check_fs = 0;
  check->add_option("--root", check_root, "Dataset root")->required();
  check->add_option("--channels", check_channels, "Expected channel count");
  check->add_option("--fs", check_fs, "Expected sampling rate");
  check->add_option("--repetitions", check_reps, "Repetitions per gesture");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitProtocol;
  }

  try {
    if (*synth)
      return cmd_synth(synth_out, synth_spec, synth_subjects, synth_sessions, synth_seed, synth_shift, synth_snr,
                       synth_sigma, synth_duration);
    if (*run) return cmd_run(run_config, run_out, run_threads, run_quiet);
    if (*st) return cmd_stats(st_input, st_test, st_alt);
    if (*inspect) return cmd_inspect(inspect_root);
    if (*check) return cmd_convert_check(check_root, check_channels, check_fs, check_reps);
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitProtocol;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitProtocol;
  }
  return 0;
}
