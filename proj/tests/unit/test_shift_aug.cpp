#include "test_util.hpp"

using namespace emgshift;

namespace {

Dataset full_grid_set(const GridLayout& g, std::size_t n, std::size_t length = 4) {
  std::vector<LabeledWindow> w;
  for (std::size_t i = 0; i < n; ++i) {
    auto win = testutil::grid_window(g, length, [&](std::size_t c, std::size_t t) {
      return static_cast<double>(1000 * i + 10 * c + t);
    }, static_cast<int>(i % 8) + 1);
    win.provenance.start_sample = i;
    w.push_back(std::move(win));
  }
  return Dataset(std::move(w), 8);
}

}  // namespace

TEST(Subsets, CapgmyoEnumeration) {
  const auto g = GridLayout::capgmyo();
  const auto s = enumerate_subsets(g);
  ASSERT_EQ(s.size(), 8u);
  for (std::size_t r = 0; r < s.size(); ++r) {
    EXPECT_EQ(s[r].row, r);
    EXPECT_EQ(s[r].size(), 8u);
    for (auto ch : s[r].channels) EXPECT_EQ(cell_of(g, ch).row, r);
  }
  EXPECT_EQ(s[0].channels, (std::vector<std::size_t>{0, 2, 4, 6, 8, 10, 12, 14}));
  EXPECT_EQ(s[0].label(), "subset-0");
}

TEST(Subsets, OneChannelPerModule) {
  const auto g = GridLayout::capgmyo();
  for (std::size_t offset : {0u, 1u})
    for (const auto& s : enumerate_subsets(g, offset))
      for (std::size_t m = 0; m < s.size(); ++m) EXPECT_EQ(cell_of(g, s.channels[m]).col / g.module_width, m);
  EXPECT_EQ(enumerate_subsets(g, 1)[0].channels[0], 1u);
  EXPECT_THROW(enumerate_subsets(g, 2), ParameterError);
}

TEST(Subsets, SingleRowGrid) {
  const GridLayout g{1, 16, 2, 8.0};
  EXPECT_EQ(enumerate_subsets(g).size(), 1u);
  EXPECT_EQ(central_row(g), 0u);
}

TEST(CentralSubset, Rows) {
  EXPECT_EQ(central_row(GridLayout::capgmyo()), 3u);
  EXPECT_EQ(central_row(GridLayout{9, 16, 2, 8.0}), 4u);
  EXPECT_EQ(central_subset(GridLayout::capgmyo()).channels.front(), 48u);
  const auto range = max_shift_from_center(GridLayout::capgmyo());
  EXPECT_DOUBLE_EQ(range.toward_first_row_mm, 24.0);
  EXPECT_DOUBLE_EQ(range.toward_last_row_mm, 32.0);
}

TEST(SelectSubset, PicksRowsAndKeepsProvenance) {
  const auto g = GridLayout::capgmyo();
  auto w = testutil::grid_window(g, 3, [](std::size_t c, std::size_t) { return static_cast<double>(c); }, 5);
  w.provenance = {2, 1, 9, 123, std::nullopt};
  const auto out = select_subset(w, subset_at_row(g, 0), g);
  ASSERT_EQ(out.samples.rows(), 8);
  for (Eigen::Index i = 0; i < 8; ++i) EXPECT_EQ(out.samples(i, 2), 2.0 * static_cast<double>(i));
  EXPECT_EQ(out.gesture, 5);
  EXPECT_EQ(out.provenance.start_sample, 123u);
  EXPECT_EQ(out.provenance.repetition, 9);
  EXPECT_EQ(out.provenance.subset_row, std::optional<std::size_t>(0));
  EXPECT_THROW(select_subset(out, subset_at_row(g, 0), g), ParameterError);
}

TEST(SelectSubset, TrivialGrid) {
  const GridLayout g{1, 1, 1, 1.0};
  const auto w = testutil::grid_window(g, 5, [](std::size_t, std::size_t t) { return static_cast<double>(t); });
  const auto out = select_subset(w, subset_at_row(g, 0), g);
  EXPECT_EQ(out.samples, w.samples);
}

// A physical row shift by delta (channel (r, c) of the shifted recording sees
// what channel (r - delta, c) saw before) maps subset r + delta of the shifted
// window onto subset r of the original.
TEST(SelectSubset, ShiftConsistency) {
  const auto g = GridLayout::capgmyo();
  const auto original = testutil::grid_window(g, 6, [](std::size_t c, std::size_t t) {
    return std::sin(0.37 * static_cast<double>(c) + 0.11 * static_cast<double>(t * t));
  });
  for (std::size_t delta : {1u, 2u, 3u}) {
    auto shifted = original;
    for (std::size_t r = 0; r < g.rows; ++r)
      for (std::size_t c = 0; c < g.cols; ++c) {
        const std::size_t src_row = r >= delta ? r - delta : 0;
        shifted.samples.row(static_cast<Eigen::Index>(channel_at(g, r, c))) =
            original.samples.row(static_cast<Eigen::Index>(channel_at(g, src_row, c)));
      }
    for (std::size_t r = 0; r + delta < g.rows; ++r)
      EXPECT_EQ(select_subset(shifted, subset_at_row(g, r + delta), g).samples,
                select_subset(original, subset_at_row(g, r), g).samples);
  }
}

TEST(Augment, SizesAndOrder) {
  const auto g = GridLayout::capgmyo();
  const auto data = full_grid_set(g, 5);
  const auto avs = augment_avs(data, g);
  ASSERT_EQ(avs.size(), 40u);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t r = 0; r < 8; ++r) {
      const auto& w = avs[i * 8 + r];
      EXPECT_EQ(w.provenance.subset_row, std::optional<std::size_t>(r));
      EXPECT_EQ(w.provenance.start_sample, i);
      EXPECT_EQ(w.gesture, data[i].gesture);
      EXPECT_EQ(w.samples, select_subset(data[i], subset_at_row(g, r), g).samples);
    }
  EXPECT_TRUE(augment_avs(Dataset({}, 8), g).empty());
}

TEST(Augment, ProtocolScale) {
  const auto g = GridLayout::capgmyo();
  EXPECT_EQ(augment_avs(full_grid_set(g, 1960, 2), g).size(), 15680u);
}

TEST(Augment, SingleRowIsCentral) {
  const GridLayout g{1, 16, 2, 8.0};
  const auto data = full_grid_set(g, 3);
  const auto avs = augment_avs(data, g);
  const auto cs = select_central(data, g);
  ASSERT_EQ(avs.size(), cs.size());
  for (std::size_t i = 0; i < avs.size(); ++i) EXPECT_EQ(avs[i].samples, cs[i].samples);
}

TEST(Augment, CentralIsOneOfTheSubsets) {
  const auto g = GridLayout::capgmyo();
  const auto data = full_grid_set(g, 2);
  const auto avs = augment_avs(data, g);
  const auto cs = select_central(data, g);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(cs[i].samples, avs[i * 8 + central_row(g)].samples);
}
