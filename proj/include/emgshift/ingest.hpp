#pragma once

// Canonical on-disk dataset (manifest.json + one .f32 file per recording)
// and the synthetic HD-sEMG generator.
//
// Binary files are headerless little-endian IEEE-754 float32, channel-major:
// all samples of channel 0, then channel 1, and so on.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "emgshift/core.hpp"
#include "emgshift/dsp.hpp"

namespace emgshift::ingest {

namespace fs = std::filesystem;

inline constexpr int kFormatVersion = 1;

struct ManifestEntry {
  std::string path;  // relative to the dataset root
  int subject = 1;
  int session = 1;
  int gesture = 1;
  int repetition = 1;
  std::size_t sample_count = 0;
};

struct Manifest {
  int format_version = kFormatVersion;
  GridLayout layout{};
  double fs = 1000.0;
  std::vector<ManifestEntry> recordings;
};

inline nlohmann::json manifest_to_json(const Manifest& m) {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& e : m.recordings)
    recs.push_back({{"path", e.path},
                    {"subject", e.subject},
                    {"session", e.session},
                    {"gesture", e.gesture},
                    {"repetition", e.repetition},
                    {"sample_count", e.sample_count}});
  return {{"format_version", m.format_version},
          {"fs_hz", m.fs},
          {"grid",
           {{"rows", m.layout.rows},
            {"cols", m.layout.cols},
            {"module_width", m.layout.module_width},
            {"pitch_mm", m.layout.pitch_mm}}},
          {"recordings", std::move(recs)}};
}

inline Manifest manifest_from_json(const nlohmann::json& j) {
  Manifest m;
  try {
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != kFormatVersion)
      throw VersionError("manifest: unsupported format_version " + std::to_string(m.format_version));
    m.fs = j.at("fs_hz").get<double>();
    const auto& g = j.at("grid");
    m.layout = {g.at("rows").get<std::size_t>(), g.at("cols").get<std::size_t>(),
                g.at("module_width").get<std::size_t>(), g.at("pitch_mm").get<double>()};
    for (const auto& r : j.at("recordings")) {
      ManifestEntry e;
      e.path = r.at("path").get<std::string>();
      e.subject = r.at("subject").get<int>();
      e.session = r.at("session").get<int>();
      e.gesture = r.at("gesture").get<int>();
      e.repetition = r.at("repetition").get<int>();
      e.sample_count = r.at("sample_count").get<std::size_t>();
      m.recordings.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw CorruptionError(std::string("manifest: malformed document: ") + e.what());
  }
  try {
    m.layout.validate();
  } catch (const ParameterError& e) {
    throw CorruptionError(std::string("manifest: ") + e.what());
  }
  if (!(m.fs > 0)) throw CorruptionError("manifest: fs_hz must be > 0");
  return m;
}

inline std::string recording_filename(int subject, int session, int gesture, int repetition) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "s%03d_e%d_g%02d_r%02d.f32", subject, session, gesture, repetition);
  return buf;
}

namespace detail {
inline std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big)
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  return v;
}
}  // namespace detail

/// Writes `recordings` under `root` and returns the manifest path. All
/// recordings must share `layout` and `fs`. Samples are stored as float32.
inline fs::path write_canonical(const fs::path& root, const GridLayout& layout, double fs_hz,
                                const std::vector<Recording>& recordings) {
  layout.validate();
  Manifest m;
  m.layout = layout;
  m.fs = fs_hz;
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw IoError("write_canonical: cannot create " + root.string() + ": " + ec.message());

  std::vector<std::uint32_t> buffer;
  for (const auto& rec : recordings) {
    rec.validate();
    if (!(rec.layout == layout) || rec.fs != fs_hz)
      throw ParameterError("write_canonical: recordings differ in layout or sampling rate");
    ManifestEntry e{recording_filename(rec.subject, rec.session, rec.gesture, rec.repetition),
                    rec.subject, rec.session, rec.gesture, rec.repetition, rec.length()};
    buffer.resize(static_cast<std::size_t>(rec.samples.size()));
    // Row-major storage already is channel-major order.
    for (std::size_t i = 0; i < buffer.size(); ++i) {
      const auto f = static_cast<float>(rec.samples.data()[i]);
      buffer[i] = detail::to_little_endian(std::bit_cast<std::uint32_t>(f));
    }
    std::ofstream out(root / e.path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("write_canonical: cannot open " + (root / e.path).string());
    out.write(reinterpret_cast<const char*>(buffer.data()),
              static_cast<std::streamsize>(buffer.size() * sizeof(std::uint32_t)));
    if (!out) throw IoError("write_canonical: write failed for " + (root / e.path).string());
    m.recordings.push_back(std::move(e));
  }

  const fs::path manifest_path = root / "manifest.json";
  std::ofstream out(manifest_path, std::ios::trunc);
  if (!out) throw IoError("write_canonical: cannot open " + manifest_path.string());
  out << manifest_to_json(m).dump(2) << '\n';
  if (!out) throw IoError("write_canonical: write failed for " + manifest_path.string());
  return manifest_path;
}

inline fs::path write_canonical(const fs::path& root, const std::vector<Recording>& recordings) {
  if (recordings.empty()) return write_canonical(root, GridLayout::capgmyo(), 1000.0, recordings);
  return write_canonical(root, recordings.front().layout, recordings.front().fs, recordings);
}

inline Manifest read_manifest(const fs::path& root) {
  const fs::path path = root / "manifest.json";
  std::ifstream in(path);
  if (!in) throw IoError("read_canonical: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptionError("read_canonical: " + path.string() + " is not valid JSON: " + e.what());
  }
  return manifest_from_json(j);
}

/// Size check without reading the samples.
inline void check_entry(const fs::path& root, const Manifest& m, const ManifestEntry& e) {
  const fs::path file = root / e.path;
  std::error_code ec;
  const auto size = fs::file_size(file, ec);
  if (ec) throw IoError("read_canonical: cannot stat " + file.string() + ": " + ec.message());
  const auto expected = e.sample_count * m.layout.channel_count() * sizeof(float);
  if (size != expected)
    throw CorruptionError("read_canonical: " + file.string() + " has " + std::to_string(size) +
                          " bytes, manifest implies " + std::to_string(expected));
}

inline Recording read_recording(const fs::path& root, const Manifest& m, const ManifestEntry& e) {
  check_entry(root, m, e);
  const std::size_t ch = m.layout.channel_count();
  std::vector<std::uint32_t> buffer(ch * e.sample_count);
  std::ifstream in(root / e.path, std::ios::binary);
  if (!in) throw IoError("read_canonical: cannot open " + (root / e.path).string());
  in.read(reinterpret_cast<char*>(buffer.data()),
          static_cast<std::streamsize>(buffer.size() * sizeof(std::uint32_t)));
  if (!in) throw CorruptionError("read_canonical: short read on " + (root / e.path).string());

  Recording rec;
  rec.subject = e.subject;
  rec.session = e.session;
  rec.gesture = e.gesture;
  rec.repetition = e.repetition;
  rec.fs = m.fs;
  rec.layout = m.layout;
  rec.samples.resize(static_cast<Eigen::Index>(ch), static_cast<Eigen::Index>(e.sample_count));
  for (std::size_t i = 0; i < buffer.size(); ++i)
    rec.samples.data()[i] = static_cast<double>(std::bit_cast<float>(detail::to_little_endian(buffer[i])));
  return rec;
}

inline std::vector<Recording> read_canonical(const fs::path& root) {
  const Manifest m = read_manifest(root);
  std::vector<Recording> out;
  out.reserve(m.recordings.size());
  for (const auto& e : m.recordings) out.push_back(read_recording(root, m, e));
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic generator

struct SyntheticSpec {
  GridLayout layout = GridLayout::capgmyo();
  double fs = 1000.0;
  int gestures = 8;
  int repetitions = 10;
  int subjects = 1;
  int sessions = 2;
  double duration_s = 2.0;
  int sources_per_gesture = 3;
  double spatial_sigma = 1.5;  // grid cells; +inf gives a spatially flat field
  double snr_db = 20.0;        // +inf disables sensor noise
  int session_row_shift = 2;   // applied to every session after the first
  double amplitude_jitter = 0.1;
  double band_low_hz = 20.0;
  double band_high_hz = 450.0;
  RngSeed seed{1};

  void validate() const {
    layout.validate();
    if (!(fs > 0)) throw ParameterError("synthetic: fs must be > 0");
    if (gestures < 1 || repetitions < 1 || subjects < 1 || sessions < 1)
      throw ParameterError("synthetic: gestures, repetitions, subjects and sessions must be >= 1");
    if (sources_per_gesture < 1) throw ParameterError("synthetic: need at least one source per gesture");
    if (!(spatial_sigma > 0)) throw ParameterError("synthetic: spatial_sigma must be > 0");
    if (std::isnan(snr_db)) throw ParameterError("synthetic: snr_db is NaN");
    if (static_cast<std::size_t>(std::abs(session_row_shift)) >= layout.rows)
      throw ParameterError("synthetic: |session_row_shift| must be < rows");
    if (!(amplitude_jitter >= 0 && amplitude_jitter < 1))
      throw ParameterError("synthetic: amplitude_jitter must be in [0, 1)");
    if (!(band_low_hz > 0 && band_high_hz > band_low_hz && band_high_hz < fs / 2))
      throw ParameterError("synthetic: source band must satisfy 0 < low < high < fs/2");
    if (!(duration_s > 0) || dsp::samples_for(duration_s, fs) < 1)
      throw ParameterError("synthetic: duration must cover at least one sample");
  }
};

struct Source {
  double row = 0;  // continuous grid coordinates
  double col = 0;
};

/// Source positions of one gesture.
using SourceField = std::vector<Source>;

inline double circular_distance(double a, double b, double period) {
  const double d = std::fmod(std::abs(a - b), period);
  return std::min(d, period - d);
}

/// Spatial weight of `src` at grid cell (row, col).
inline double spatial_weight(const GridLayout& layout, const Source& src, double sigma, std::size_t row,
                             std::size_t col) {
  const double dr = static_cast<double>(row) - src.row;
  const double dc = circular_distance(static_cast<double>(col), src.col, static_cast<double>(layout.cols));
  return std::exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma));
}

inline SourceField shift_sources(const GridLayout& layout, SourceField field, int row_shift) {
  const double top = static_cast<double>(layout.rows - 1);
  for (auto& s : field) s.row = std::clamp(s.row + row_shift, 0.0, top);
  return field;
}

/// Band-limited unit-variance noise: white Gaussian through Butterworth
/// high-pass and low-pass sections, normalized to unit empirical variance.
inline std::vector<double> band_limited_noise(std::size_t length, double fs, double low_hz, double high_hz,
                                              std::mt19937_64& rng) {
  constexpr std::size_t kWarmup = 512;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(length + kWarmup);
  for (auto& v : x) v = normal(rng);
  const dsp::Biquad sections[] = {dsp::design_highpass(fs, low_hz), dsp::design_lowpass(fs, high_hz)};
  dsp::filter_inplace(sections, x);
  x.erase(x.begin(), x.begin() + kWarmup);
  double ss = 0;
  for (double v : x) ss += v * v;
  const double scale = ss > 0 ? 1.0 / std::sqrt(ss / static_cast<double>(x.size())) : 1.0;
  for (auto& v : x) v *= scale;
  return x;
}

/// Renders one recording from explicit source positions and signals.
/// channel(r, c) = gain(r, c) * (sum_k w_k(r, c) s_k(t) + noise(t)).
/// `noise_std` = 0 gives a noiseless recording; empty `gains` means unit gain.
inline SampleMatrix render_field(const GridLayout& layout, const SourceField& field, double sigma,
                                 const std::vector<std::vector<double>>& signals, double noise_std,
                                 const std::vector<double>& gains, std::mt19937_64& noise_rng) {
  if (signals.size() != field.size()) throw ParameterError("render_field: one signal per source required");
  const std::size_t length = signals.empty() ? 0 : signals.front().size();
  SampleMatrix out = SampleMatrix::Zero(static_cast<Eigen::Index>(layout.channel_count()),
                                        static_cast<Eigen::Index>(length));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t r = 0; r < layout.rows; ++r)
    for (std::size_t c = 0; c < layout.cols; ++c) {
      const auto ch = static_cast<Eigen::Index>(channel_at(layout, r, c));
      double* row = out.row(ch).data();
      for (std::size_t k = 0; k < field.size(); ++k) {
        const double w = spatial_weight(layout, field[k], sigma, r, c);
        const double* s = signals[k].data();
        for (std::size_t t = 0; t < length; ++t) row[t] += w * s[t];
      }
      if (noise_std > 0)
        for (std::size_t t = 0; t < length; ++t) row[t] += noise_std * normal(noise_rng);
      if (!gains.empty()) {
        const double g = gains[static_cast<std::size_t>(ch)];
        for (std::size_t t = 0; t < length; ++t) row[t] *= g;
      }
    }
  return out;
}

/// Noise standard deviation giving `snr_db` against the grid-average signal
/// power of unit-variance independent sources.
inline double noise_std_for(const GridLayout& layout, const SourceField& field, double sigma, double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  double power = 0;
  for (std::size_t r = 0; r < layout.rows; ++r)
    for (std::size_t c = 0; c < layout.cols; ++c)
      for (const auto& s : field) {
        const double w = spatial_weight(layout, s, sigma, r, c);
        power += w * w;
      }
  power /= static_cast<double>(layout.channel_count());
  return std::sqrt(power / std::pow(10.0, snr_db / 10.0));
}

/// Source positions of (subject, gesture); shared by all sessions before
/// the session shift is applied.
inline SourceField draw_sources(const SyntheticSpec& spec, int subject, int gesture) {
  std::mt19937_64 rng(derive_seed(spec.seed, 1, subject, gesture));
  std::uniform_real_distribution<double> row_dist(0.0, static_cast<double>(spec.layout.rows - 1));
  std::uniform_real_distribution<double> col_dist(0.0, static_cast<double>(spec.layout.cols));
  SourceField field(static_cast<std::size_t>(spec.sources_per_gesture));
  for (auto& s : field) {
    s.row = row_dist(rng);
    s.col = col_dist(rng);
  }
  return field;
}

inline std::vector<double> session_gains(const SyntheticSpec& spec, int subject, int session) {
  if (session <= 1 || spec.amplitude_jitter == 0) return {};
  std::mt19937_64 rng(derive_seed(spec.seed, 2, subject, session));
  std::uniform_real_distribution<double> gain(1.0 - spec.amplitude_jitter, 1.0 + spec.amplitude_jitter);
  std::vector<double> g(spec.layout.channel_count());
  for (auto& v : g) v = gain(rng);
  return g;
}

/// One synthetic recording; a pure function of (spec, coordinates).
inline Recording synthesize_recording(const SyntheticSpec& spec, int subject, int session, int gesture,
                                      int repetition) {
  const int shift = session > 1 ? spec.session_row_shift : 0;
  const SourceField field = shift_sources(spec.layout, draw_sources(spec, subject, gesture), shift);
  const std::size_t length = dsp::samples_for(spec.duration_s, spec.fs);

  std::mt19937_64 rng(derive_seed(spec.seed, 3, subject, session, gesture, repetition));
  std::vector<std::vector<double>> signals;
  for (std::size_t k = 0; k < field.size(); ++k)
    signals.push_back(band_limited_noise(length, spec.fs, spec.band_low_hz, spec.band_high_hz, rng));

  Recording rec;
  rec.subject = subject;
  rec.session = session;
  rec.gesture = gesture;
  rec.repetition = repetition;
  rec.fs = spec.fs;
  rec.layout = spec.layout;
  rec.samples = render_field(spec.layout, field, spec.spatial_sigma, signals,
                             noise_std_for(spec.layout, field, spec.spatial_sigma, spec.snr_db),
                             session_gains(spec, subject, session), rng);
  return rec;
}

/// All recordings of one (subject, session), gesture-major then repetition.
inline std::vector<Recording> generate_session(const SyntheticSpec& spec, int subject, int session) {
  spec.validate();
  std::vector<Recording> out;
  out.reserve(static_cast<std::size_t>(spec.gestures * spec.repetitions));
  for (int g = 1; g <= spec.gestures; ++g)
    for (int r = 1; r <= spec.repetitions; ++r) out.push_back(synthesize_recording(spec, subject, session, g, r));
  return out;
}

/// Every subject and session of the spec, in (subject, session, gesture,
/// repetition) order.
inline std::vector<Recording> generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::vector<Recording> out;
  for (int s = 1; s <= spec.subjects; ++s)
    for (int e = 1; e <= spec.sessions; ++e) {
      auto session = generate_session(spec, s, e);
      std::move(session.begin(), session.end(), std::back_inserter(out));
    }
  return out;
}

}  // namespace emgshift::ingest
