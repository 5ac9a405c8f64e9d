#include <gtest/gtest.h>

#include "pat/core.hpp"
#include "pat/error.hpp"
#include "pat/random.hpp"

namespace pat {
namespace {

TEST(FrameTest, MinimalFrame) {
  const Frame f = make_frame(1, 1, 1, {0.5f});
  EXPECT_EQ(f.shape(), (Shape{1, 1, 1}));
  EXPECT_EQ(f[0], 0.5f);
}

TEST(FrameTest, RangeCheckRejectsOutOfUnitInterval) {
  EXPECT_THROW(make_frame(1, 1, 1, {1.5f}, RangeCheck::UnitInterval), RangeError);
  EXPECT_THROW(make_frame(1, 1, 1, {-0.1f}, RangeCheck::UnitInterval), RangeError);
  // Transition frames and masks may be signed.
  EXPECT_NO_THROW(make_frame(1, 1, 1, {-0.3f}));
}

TEST(FrameTest, ShapeCheck) {
  std::vector<float> twelve(12, 0.25f);
  const Frame f = make_frame(2, 2, 3, twelve, RangeCheck::UnitInterval);
  EXPECT_EQ(f.size(), 12u);
  EXPECT_EQ(f.at(1, 1, 2), 0.25f);
  EXPECT_THROW(make_frame(2, 2, 3, std::vector<float>(11)), ShapeError);
  EXPECT_THROW(make_frame(0, 2, 3, {}), ShapeError);
}

TEST(FrameTest, RejectsNonFinite) {
  EXPECT_THROW(make_frame(1, 1, 1, {std::numeric_limits<float>::quiet_NaN()}), RangeError);
  EXPECT_THROW(make_frame(1, 1, 1, {std::numeric_limits<float>::infinity()}), RangeError);
}

// Random dims and data: valid inputs always construct, each kind of invalid
// input always throws the matching typed error.
TEST(FrameTest, ConstructionPropertyOverRandomInputs) {
  Rng rng(42);
  for (int trial = 0; trial < 500; ++trial) {
    const auto h = static_cast<std::uint32_t>(1 + rng.below(6));
    const auto w = static_cast<std::uint32_t>(1 + rng.below(6));
    const auto c = static_cast<std::uint32_t>(1 + rng.below(4));
    const std::size_t n = std::size_t{h} * w * c;
    std::vector<float> data(n);
    for (auto& v : data) v = static_cast<float>(rng.uniform01());

    EXPECT_NO_THROW(make_frame(h, w, c, data, RangeCheck::UnitInterval));

    auto wrong = data;
    wrong.push_back(0.0f);
    EXPECT_THROW(make_frame(h, w, c, wrong), ShapeError);

    auto out_of_range = data;
    out_of_range[rng.below(n)] = static_cast<float>(1.0 + rng.uniform(1e-3, 5.0));
    EXPECT_THROW(make_frame(h, w, c, out_of_range, RangeCheck::UnitInterval), RangeError);
    EXPECT_NO_THROW(make_frame(h, w, c, out_of_range, RangeCheck::None));
  }
}

std::vector<Frame> constant_frames(std::size_t count, Shape shape, float value = 0.5f) {
  return std::vector<Frame>(count, Frame::filled(shape, value));
}

TEST(VideoSequenceTest, PaperSizedVideo) {
  const VideoSequence v(constant_frames(40, {112, 112, 3}), "ucf");
  EXPECT_EQ(v.length(), 40u);
  EXPECT_EQ(v.shape(), (Shape{112, 112, 3}));
  EXPECT_EQ(v.id(), "ucf");
}

TEST(VideoSequenceTest, SingleFrameRejected) {
  EXPECT_THROW(VideoSequence(constant_frames(1, {4, 4, 3}), "one"), ShapeError);
  EXPECT_THROW(VideoSequence({}, "none"), ShapeError);
}

TEST(VideoSequenceTest, MixedSizesRejected) {
  std::vector<Frame> frames = constant_frames(3, {4, 4, 3});
  frames.push_back(Frame::filled({4, 5, 3}, 0.5f));
  EXPECT_THROW(VideoSequence(frames, "mixed"), ShapeError);
}

TEST(VideoSequenceTest, SourcePixelsMustBeUnitInterval) {
  std::vector<Frame> frames = constant_frames(2, {2, 2, 1});
  frames.push_back(Frame::filled({2, 2, 1}, -0.5f));
  EXPECT_THROW(VideoSequence(frames, "neg"), RangeError);
}

TEST(LabeledFrameSetTest, RejectsDuplicatesAndShapeChanges) {
  LabeledFrameSet set;
  set.add({Frame::zeros({2, 2, 1}), FrameLabel::Clean, "a", 0});
  set.add({Frame::zeros({2, 2, 1}), FrameLabel::Adversarial, "a", 1});
  set.add({Frame::zeros({2, 2, 1}), FrameLabel::Clean, "b", 0});
  EXPECT_EQ(set.size(), 3u);
  EXPECT_THROW(set.add({Frame::zeros({2, 2, 1}), FrameLabel::Clean, "a", 1}), ConfigError);
  EXPECT_THROW(set.add({Frame::zeros({3, 2, 1}), FrameLabel::Clean, "c", 0}), ShapeError);
}

TEST(DetectionReportTest, FlagsAndVerdictFollowScores) {
  const DetectionReport r({0.1, 0.5, 0.49, 0.9, 0.7}, 3, 0.25);
  const std::vector<FrameLabel> expected = {FrameLabel::Clean, FrameLabel::Adversarial,
                                            FrameLabel::Clean, FrameLabel::Adversarial,
                                            FrameLabel::Adversarial};
  EXPECT_EQ(r.per_frame_flags(), expected);
  EXPECT_EQ(r.adversarial_count(), 3u);
  EXPECT_EQ(r.video_verdict(), FrameLabel::Adversarial);
  EXPECT_EQ(r.threshold_used(), 3u);
  EXPECT_DOUBLE_EQ(r.max_score(), 0.9);

  const DetectionReport below({0.9, 0.9, 0.1}, 3);
  EXPECT_EQ(below.video_verdict(), FrameLabel::Clean);
}

TEST(DetectionReportTest, ConsistencyProperty) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> scores(1 + rng.below(40));
    for (auto& s : scores) s = rng.uniform01();
    const auto threshold = static_cast<std::uint32_t>(1 + rng.below(5));
    const DetectionReport r(scores, threshold);
    std::size_t flagged = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const bool adv = scores[i] >= 0.5;
      flagged += adv;
      EXPECT_EQ(r.per_frame_flags()[i] == FrameLabel::Adversarial, adv);
    }
    EXPECT_EQ(r.video_verdict() == FrameLabel::Adversarial, flagged >= threshold);
  }
}

TEST(DetectionReportTest, InvalidInputs) {
  EXPECT_THROW(DetectionReport({0.5}, 0), ConfigError);
  EXPECT_THROW(DetectionReport({1.5}, 1), RangeError);
  EXPECT_THROW(DetectionReport({0.5}, 1, -1.0), RangeError);
}

}  // namespace
}  // namespace pat
