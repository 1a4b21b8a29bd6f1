#pragma once

// Electrode-shift augmentation over proximal-distal channel subsets.
//
// A subset is one electrode per acquisition module, all on the same grid row,
// emulating a low-density armband. Moving the row emulates shifting that
// armband along the forearm; training on every row teaches the classifier
// to ignore the shift.

#include <string>
#include <vector>

#include "emgshift/core.hpp"

namespace emgshift {

struct ChannelSubset {
  std::size_t row = 0;
  std::vector<std::size_t> channels;  // ascending, one per module

  std::string label() const { return "subset-" + std::to_string(row); }
  std::size_t size() const { return channels.size(); }
  friend bool operator==(const ChannelSubset&, const ChannelSubset&) = default;
};

inline ChannelSubset subset_at_row(const GridLayout& layout, std::size_t row,
                                   std::size_t column_offset = 0) {
  layout.validate();
  if (column_offset >= layout.module_width)
    throw ParameterError("channel subset: column offset " + std::to_string(column_offset) +
                         " must be < module width " + std::to_string(layout.module_width));
  ChannelSubset s;
  s.row = row;
  s.channels.reserve(layout.module_count());
  for (std::size_t m = 0; m < layout.module_count(); ++m)
    s.channels.push_back(channel_at(layout, row, m * layout.module_width + column_offset));
  return s;
}

/// One subset per grid row, ordered by row.
inline std::vector<ChannelSubset> enumerate_subsets(const GridLayout& layout,
                                                    std::size_t column_offset = 0) {
  std::vector<ChannelSubset> out;
  out.reserve(layout.rows);
  for (std::size_t r = 0; r < layout.rows; ++r) out.push_back(subset_at_row(layout, r, column_offset));
  return out;
}

/// floor((rows - 1) / 2). On the 8-row preset this is row 3: 3 rows (24 mm) of
/// travel on one side and 4 rows (32 mm) on the other.
inline std::size_t central_row(const GridLayout& layout) {
  if (layout.rows < 1) throw ParameterError("central_subset: grid has no rows");
  return (layout.rows - 1) / 2;
}

inline ChannelSubset central_subset(const GridLayout& layout, std::size_t column_offset = 0) {
  return subset_at_row(layout, central_row(layout), column_offset);
}

/// Largest shift reachable from the central row towards row 0 and towards the
/// last row, in millimetres.
struct ShiftRange {
  double toward_first_row_mm = 0;
  double toward_last_row_mm = 0;
};

inline ShiftRange max_shift_from_center(const GridLayout& layout) {
  const std::size_t c = central_row(layout);
  return {static_cast<double>(c) * layout.pitch_mm,
          static_cast<double>(layout.rows - 1 - c) * layout.pitch_mm};
}

/// Extracts a subset from a full-grid window, keeping label and provenance.
inline LabeledWindow select_subset(const LabeledWindow& window, const ChannelSubset& subset,
                                   const GridLayout& layout) {
  if (!window.is_full_grid())
    throw ParameterError("select_subset: window already restricted to " +
                         std::to_string(window.samples.rows()) + " channels");
  if (static_cast<std::size_t>(window.samples.rows()) != layout.channel_count())
    throw ParameterError("select_subset: window has " + std::to_string(window.samples.rows()) +
                         " channels, layout expects " + std::to_string(layout.channel_count()));
  LabeledWindow out;
  out.samples.resize(static_cast<Eigen::Index>(subset.size()), window.samples.cols());
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (subset.channels[i] >= layout.channel_count() ||
        cell_of(layout, subset.channels[i]).row != subset.row)
      throw ParameterError("select_subset: subset does not match layout");
    out.samples.row(static_cast<Eigen::Index>(i)) =
        window.samples.row(static_cast<Eigen::Index>(subset.channels[i]));
  }
  out.gesture = window.gesture;
  out.provenance = window.provenance;
  out.provenance.subset_row = subset.row;
  return out;
}

/// Expands every full-grid window into one instance per valid subset.
/// Output order: window-major, then subset row ascending.
inline Dataset augment_avs(const Dataset& full_grid, const GridLayout& layout,
                           std::size_t column_offset = 0) {
  const auto subsets = enumerate_subsets(layout, column_offset);
  std::vector<LabeledWindow> out;
  out.reserve(full_grid.size() * subsets.size());
  for (const auto& w : full_grid)
    for (const auto& s : subsets) out.push_back(select_subset(w, s, layout));
  return Dataset(std::move(out), full_grid.num_classes());
}

/// Central-subset extraction of every window.
inline Dataset select_central(const Dataset& full_grid, const GridLayout& layout,
                              std::size_t column_offset = 0) {
  const auto cs = central_subset(layout, column_offset);
  std::vector<LabeledWindow> out;
  out.reserve(full_grid.size());
  for (const auto& w : full_grid) out.push_back(select_subset(w, cs, layout));
  return Dataset(std::move(out), full_grid.num_classes());
}

}  // namespace emgshift
