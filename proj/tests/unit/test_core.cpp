#include <set>

#include "test_util.hpp"

using namespace emgshift;

TEST(ChannelAt, CapgmyoExamples) {
  const auto g = GridLayout::capgmyo();
  EXPECT_EQ(channel_at(g, 0, 0), 0u);
  EXPECT_EQ(channel_at(g, 3, 0), 48u);
  EXPECT_EQ(channel_at(g, 7, 15), 127u);
}

TEST(ChannelAt, OutOfRangeThrows) {
  const auto g = GridLayout::capgmyo();
  EXPECT_THROW(channel_at(g, 8, 0), RangeError);
  EXPECT_THROW(channel_at(g, 0, 16), RangeError);
  EXPECT_THROW(cell_of(g, 128), RangeError);
}

TEST(ChannelAt, BijectionWithCellOf) {
  for (GridLayout g : {GridLayout::capgmyo(), GridLayout{3, 4, 2, 5.0}, GridLayout{1, 1, 1, 1.0}}) {
    std::set<std::size_t> seen;
    for (std::size_t r = 0; r < g.rows; ++r)
      for (std::size_t c = 0; c < g.cols; ++c) {
        const auto ch = channel_at(g, r, c);
        EXPECT_LT(ch, g.channel_count());
        EXPECT_EQ(cell_of(g, ch), (GridCell{r, c}));
        seen.insert(ch);
      }
    EXPECT_EQ(seen.size(), g.channel_count());
  }
}

TEST(GridLayout, Validation) {
  EXPECT_NO_THROW(GridLayout::capgmyo().validate());
  EXPECT_EQ(GridLayout::capgmyo().module_count(), 8u);
  EXPECT_THROW((GridLayout{0, 16, 2, 8.0}).validate(), ParameterError);
  EXPECT_THROW((GridLayout{8, 15, 2, 8.0}).validate(), ParameterError);
  EXPECT_THROW((GridLayout{8, 16, 0, 8.0}).validate(), ParameterError);
  EXPECT_THROW((GridLayout{8, 16, 2, 0.0}).validate(), ParameterError);
}

TEST(Recording, Validation) {
  Recording r;
  r.layout = {2, 2, 1, 1.0};
  r.samples = SampleMatrix::Zero(4, 10);
  EXPECT_NO_THROW(r.validate());
  r.samples = SampleMatrix::Zero(3, 10);
  EXPECT_THROW(r.validate(), ParameterError);
  r.samples = SampleMatrix::Zero(4, 10);
  r.gesture = 0;
  EXPECT_THROW(r.validate(), ParameterError);
  r.gesture = 1;
  r.fs = 0;
  EXPECT_THROW(r.validate(), ParameterError);
}

TEST(Dataset, RejectsMixedShapesAndBadLabels) {
  LabeledWindow a, b;
  a.samples = SampleMatrix::Zero(2, 5);
  b.samples = SampleMatrix::Zero(2, 6);
  EXPECT_THROW(Dataset({a, b}, 2), ParameterError);
  b.samples = SampleMatrix::Zero(2, 5);
  b.gesture = 3;
  EXPECT_THROW(Dataset({a, b}, 2), ParameterError);
  b.gesture = 2;
  Dataset d({a, b}, 2);
  EXPECT_EQ(d.size(), 2u);
  EXPECT_EQ(d[1].gesture, 2);
  EXPECT_TRUE(Dataset({}, 8).empty());
}

TEST(DeriveSeed, DeterministicAndCoordinateSensitive) {
  const RngSeed s{42};
  EXPECT_EQ(derive_seed(s, 1, 2, 3), derive_seed(s, 1, 2, 3));
  EXPECT_NE(derive_seed(s, 1, 2, 3), derive_seed(s, 1, 3, 2));
  EXPECT_NE(derive_seed(s, 1, 2, 3), derive_seed(RngSeed{43}, 1, 2, 3));
  EXPECT_NE(derive_seed(s, 1), derive_seed(s, 1, 0));
  static_assert(derive_seed(RngSeed{1}, 2) == derive_seed(RngSeed{1}, 2));
}

TEST(Errors, Hierarchy) {
  EXPECT_THROW(throw CorruptionError("x"), IoError);
  EXPECT_THROW(throw VersionError("x"), IoError);
  EXPECT_THROW(throw ProtocolError("x"), Error);
  EXPECT_THROW(throw NumericalError("x"), std::runtime_error);
}
