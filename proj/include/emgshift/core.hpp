#pragma once

// Shared domain types for HD-sEMG channel-subset experiments.
//
// Grid orientation convention: row 0 is the most distal electrode row and
// row index grows proximally. Channels are numbered row-major,
// channel = row * cols + col, with col running around the forearm.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace emgshift {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition.
class ParameterError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

/// The data does not satisfy the recording protocol (missing repetitions,
/// empty partitions, ...).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// On-disk data disagrees with its manifest.
class CorruptionError : public IoError {
 public:
  using IoError::IoError;
};

class VersionError : public IoError {
 public:
  using IoError::IoError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Channels are rows, samples are columns; rows are contiguous.
using SampleMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct GridLayout {
  std::size_t rows = 8;          // proximal-distal positions
  std::size_t cols = 16;         // circumferential positions
  std::size_t module_width = 2;  // columns per acquisition module
  double pitch_mm = 8.0;         // row spacing

  /// 8x16 array made of eight 2-column modules with 8 mm row pitch.
  static GridLayout capgmyo() { return {8, 16, 2, 8.0}; }

  std::size_t channel_count() const { return rows * cols; }
  std::size_t module_count() const { return cols / module_width; }

  void validate() const {
    if (rows < 1 || cols < 1 || module_width < 1)
      throw ParameterError("grid layout: rows, cols and module_width must be >= 1");
    if (cols % module_width != 0)
      throw ParameterError("grid layout: cols must be a multiple of module_width");
    if (!(pitch_mm > 0.0)) throw ParameterError("grid layout: pitch_mm must be > 0");
  }

  friend bool operator==(const GridLayout&, const GridLayout&) = default;
};

struct GridCell {
  std::size_t row = 0;
  std::size_t col = 0;
  friend bool operator==(const GridCell&, const GridCell&) = default;
};

inline std::size_t channel_at(const GridLayout& layout, std::size_t row, std::size_t col) {
  if (row >= layout.rows || col >= layout.cols)
    throw RangeError("channel_at: (" + std::to_string(row) + ", " + std::to_string(col) +
                     ") outside " + std::to_string(layout.rows) + "x" +
                     std::to_string(layout.cols) + " grid");
  return row * layout.cols + col;
}

/// Inverse of channel_at.
inline GridCell cell_of(const GridLayout& layout, std::size_t channel) {
  if (channel >= layout.channel_count())
    throw RangeError("cell_of: channel " + std::to_string(channel) + " outside grid");
  return {channel / layout.cols, channel % layout.cols};
}

/// One gesture repetition over the full grid.
struct Recording {
  int subject = 1;
  int session = 1;
  int gesture = 1;     // 1-based
  int repetition = 1;  // 1-based
  double fs = 1000.0;
  GridLayout layout{};
  SampleMatrix samples;  // channel_count() x L

  std::size_t channel_count() const { return static_cast<std::size_t>(samples.rows()); }
  std::size_t length() const { return static_cast<std::size_t>(samples.cols()); }

  void validate() const {
    layout.validate();
    if (!(fs > 0.0)) throw ParameterError("recording: fs must be > 0");
    if (channel_count() != layout.channel_count())
      throw ParameterError("recording: channel count " + std::to_string(channel_count()) +
                           " does not match grid (" +
                           std::to_string(layout.channel_count()) + ")");
    if (length() < 1) throw ParameterError("recording: empty sample matrix");
    if (gesture < 1) throw ParameterError("recording: gesture labels are 1-based");
  }
};

struct Provenance {
  int subject = 1;
  int session = 1;
  int repetition = 1;
  std::size_t start_sample = 0;
  std::optional<std::size_t> subset_row;  // empty = full grid

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct LabeledWindow {
  SampleMatrix samples;  // Ch' x T
  int gesture = 1;
  Provenance provenance;

  bool is_full_grid() const { return !provenance.subset_row.has_value(); }
};

/// Ordered collection of windows sharing shape. Construction never reorders.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<LabeledWindow> windows, int num_classes)
      : windows_(std::move(windows)), num_classes_(num_classes) {
    validate();
  }

  const std::vector<LabeledWindow>& windows() const { return windows_; }
  std::size_t size() const { return windows_.size(); }
  bool empty() const { return windows_.empty(); }
  int num_classes() const { return num_classes_; }
  const LabeledWindow& operator[](std::size_t i) const { return windows_[i]; }

  auto begin() const { return windows_.begin(); }
  auto end() const { return windows_.end(); }

 private:
  void validate() const {
    if (num_classes_ < 1) throw ParameterError("dataset: num_classes must be >= 1");
    if (windows_.empty()) return;
    const auto ch = windows_.front().samples.rows();
    const auto t = windows_.front().samples.cols();
    for (const auto& w : windows_) {
      if (w.samples.rows() != ch || w.samples.cols() != t)
        throw ParameterError("dataset: windows differ in shape");
      if (w.gesture < 1 || w.gesture > num_classes_)
        throw ParameterError("dataset: gesture label " + std::to_string(w.gesture) +
                             " outside 1.." + std::to_string(num_classes_));
    }
  }

  std::vector<LabeledWindow> windows_;
  int num_classes_ = 1;
};

struct RngSeed {
  std::uint64_t value = 0;
  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

namespace detail {
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Deterministic sub-seed for a tuple of integer coordinates. Independent of
/// evaluation order, so parallel generation reproduces serial output.
template <typename... Ints>
constexpr std::uint64_t derive_seed(RngSeed seed, Ints... coords) {
  std::uint64_t h = detail::splitmix64(seed.value);
  ((h = detail::splitmix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(coords)))),
   ...);
  return h;
}

}  // namespace emgshift
