#include <gtest/gtest.h>

#include <cmath>

#include "pat/error.hpp"
#include "pat/random.hpp"
#include "pat/transition.hpp"

namespace pat {
namespace {

Frame uniform(Shape s, float v) { return Frame::filled(s, v); }

VideoSequence random_video(Rng& rng, std::size_t T, Shape s) {
  std::vector<Frame> frames;
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<float> d(s.size());
    for (auto& v : d) v = static_cast<float>(rng.uniform01());
    frames.emplace_back(s, std::move(d));
  }
  return VideoSequence(std::move(frames), "rand");
}

TEST(TransitionFrameTest, DirectEvaluation) {
  const Shape s{2, 2, 3};
  const Frame tr = transition_frame(uniform(s, 0.2f), uniform(s, 0.5f), uniform(s, 0.2f));
  for (float v : tr.data()) EXPECT_NEAR(v, -0.3f, 1e-7);
}

TEST(TransitionFrameTest, LinearMotionCancels) {
  const Shape s{2, 2, 3};
  const Frame tr = transition_frame(uniform(s, 0.1f), uniform(s, 0.2f), uniform(s, 0.3f));
  for (float v : tr.data()) EXPECT_NEAR(v, 0.0f, 1e-7);
}

TEST(TransitionFrameTest, StaticSceneIsExactlyZero) {
  Rng rng(1);
  const VideoSequence v = random_video(rng, 2, {5, 7, 3});
  const Frame& a = v[0];
  const Frame tr = transition_frame(a, a, a);
  for (float x : tr.data()) EXPECT_EQ(x, 0.0f);
}

TEST(TransitionFrameTest, ShapeMismatch) {
  EXPECT_THROW(transition_frame(uniform({2, 2, 3}, 0), uniform({2, 2, 3}, 0), uniform({2, 3, 3}, 0)),
               ShapeError);
}

TEST(TransitionSequenceTest, StaticVideoAllZero) {
  const std::vector<Frame> frames(5, uniform({4, 4, 3}, 0.37f));
  const auto seq = transition_sequence(VideoSequence(frames, "static"));
  ASSERT_EQ(seq.frames.size(), 5u);
  EXPECT_EQ(seq.source_id, "static");
  for (const auto& f : seq.frames) {
    for (float x : f.data()) EXPECT_EQ(x, 0.0f);
  }
}

TEST(TransitionSequenceTest, MiddleFramePerturbation) {
  const Shape s{3, 3, 1};
  const float delta = 0.125f;
  std::vector<float> bumped(s.size(), 0.5f);
  bumped[4] += delta;
  const VideoSequence v({uniform(s, 0.5f), Frame(s, bumped), uniform(s, 0.5f)}, "bump");
  const auto seq = transition_sequence(v);
  EXPECT_EQ(seq.frames[0][4], delta);
  EXPECT_EQ(seq.frames[1][4], -delta);
  EXPECT_EQ(seq.frames[2][4], delta);
  for (const auto& f : seq.frames) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (i != 4) EXPECT_EQ(f[i], 0.0f);
    }
  }
}

TEST(TransitionSequenceTest, PaperSizedVideo) {
  const std::vector<Frame> frames(40, uniform({112, 112, 3}, 0.5f));
  const auto seq = transition_sequence(VideoSequence(frames, "ucf"));
  ASSERT_EQ(seq.frames.size(), 40u);
  for (const auto& f : seq.frames) EXPECT_EQ(f.shape(), (Shape{112, 112, 3}));
}

TEST(TransitionSequenceTest, TwoFrameBoundaryCase) {
  const Shape s{1, 2, 1};
  const VideoSequence v({Frame(s, {0.25f, 0.75f}), Frame(s, {0.5f, 0.5f})}, "two");
  const auto seq = transition_sequence(v);
  ASSERT_EQ(seq.frames.size(), 2u);
  EXPECT_EQ(seq.frames[0][0], 0.25f);   // X2 - X1
  EXPECT_EQ(seq.frames[0][1], -0.25f);
  EXPECT_EQ(seq.frames[1][0], -0.25f);  // X1 - X2
  EXPECT_EQ(seq.frames[1][1], 0.25f);
}

TEST(TransitionSequenceTest, BoundaryRule) {
  Rng rng(3);
  const VideoSequence v = random_video(rng, 6, {3, 4, 2});
  const auto seq = transition_sequence(v);
  for (std::size_t i = 0; i < v[0].size(); ++i) {
    EXPECT_EQ(seq.frames[0][i], v[1][i] - v[0][i]);
    EXPECT_EQ(seq.frames[5][i], v[4][i] - v[5][i]);
  }
}

// Adding a field P to the video adds the transition of P, up to rounding.
TEST(TransitionPropertyTest, Linearity) {
  Rng rng(11);
  const Shape s{4, 5, 3};
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t T = 2 + rng.below(8);
    const VideoSequence v = random_video(rng, T, s);
    std::vector<Frame> field_frames;
    std::vector<Frame> sum_frames;
    for (std::size_t t = 0; t < T; ++t) {
      std::vector<float> p(s.size());
      std::vector<float> sum(s.size());
      for (std::size_t i = 0; i < p.size(); ++i) {
        // Keep v + p inside [0, 1] so both are valid videos.
        p[i] = static_cast<float>(rng.uniform(-0.5, 0.5)) * std::min(v[t][i], 1.0f - v[t][i]);
        sum[i] = v[t][i] + p[i];
      }
      field_frames.emplace_back(s, std::move(p));
      sum_frames.emplace_back(s, std::move(sum));
    }
    // The perturbation field itself is not pixel data, so apply the operator
    // to it frame by frame.
    const auto tv = transition_sequence(v);
    const auto ts = transition_sequence(VideoSequence(sum_frames, "sum"));
    for (std::size_t t = 0; t < T; ++t) {
      const Frame& prev = field_frames[t == 0 ? 1 : t - 1];
      const Frame& next = field_frames[t + 1 == T ? T - 2 : t + 1];
      for (std::size_t i = 0; i < s.size(); ++i) {
        const double tp = t == 0 || t + 1 == T
                              ? double(prev[i]) - field_frames[t][i]
                              : (double(prev[i]) + next[i]) / 2 - field_frames[t][i];
        EXPECT_NEAR(ts.frames[t][i], tv.frames[t][i] + tp, 1e-6);
      }
    }
  }
}

TEST(TransitionPropertyTest, InteriorPerturbationSignature) {
  Rng rng(5);
  const Shape s{6, 6, 3};
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t T = 5 + rng.below(6);
    const VideoSequence v = random_video(rng, T, s);
    const std::size_t t = 1 + rng.below(T - 2);
    std::vector<Frame> frames = v.frames();
    std::vector<float> d(s.size());
    std::vector<float> delta(s.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      d[i] = std::clamp(v[t][i] + static_cast<float>(rng.uniform(-0.1, 0.1)), 0.0f, 1.0f);
      delta[i] = d[i] - v[t][i];
    }
    frames[t] = Frame(s, d);
    const auto before = transition_sequence(v);
    const auto after = transition_sequence(VideoSequence(frames, "p"));
    for (std::size_t i = 0; i < s.size(); ++i) {
      EXPECT_NEAR(after.frames[t][i] - before.frames[t][i], -delta[i], 1e-6);
      // Neighbors see +delta/2, or +delta at the boundary frames.
      const double prev_gain = t - 1 == 0 ? 1.0 : 0.5;
      const double next_gain = t + 1 == T - 1 ? 1.0 : 0.5;
      EXPECT_NEAR(after.frames[t - 1][i] - before.frames[t - 1][i], prev_gain * delta[i], 1e-6);
      EXPECT_NEAR(after.frames[t + 1][i] - before.frames[t + 1][i], next_gain * delta[i], 1e-6);
    }
  }
}

TEST(TransitionPropertyTest, ConstantPixelsCancelExactly) {
  Rng rng(9);
  const Shape s{8, 8, 3};
  const VideoSequence base = random_video(rng, 3, s);
  // Pixels in the left half are constant over time; the right half moves.
  std::vector<Frame> frames;
  for (std::size_t t = 0; t < 3; ++t) {
    std::vector<float> d(base[0].data().begin(), base[0].data().end());
    for (std::size_t y = 0; y < 8; ++y) {
      for (std::size_t x = 4; x < 8; ++x) {
        for (std::size_t c = 0; c < 3; ++c) d[(y * 8 + x) * 3 + c] = base[t][(y * 8 + x) * 3 + c];
      }
    }
    frames.emplace_back(s, std::move(d));
  }
  const auto seq = transition_sequence(VideoSequence(frames, "half"));
  for (std::size_t y = 0; y < 8; ++y) {
    for (std::size_t x = 0; x < 4; ++x) {
      for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(seq.frames[1].at(y, x, c), 0.0f);
    }
  }
}

TEST(TransitionPropertyTest, OutputRange) {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto seq = transition_sequence(random_video(rng, 2 + rng.below(6), {5, 5, 3}));
    for (const auto& f : seq.frames) {
      for (float x : f.data()) {
        EXPECT_GE(x, -1.0f);
        EXPECT_LE(x, 1.0f);
      }
    }
  }
  // Extremes: 0/1 alternation hits the bounds.
  const Shape s{1, 1, 1};
  const auto seq = transition_sequence(
      VideoSequence({uniform(s, 0), uniform(s, 1), uniform(s, 0)}, "extreme"));
  EXPECT_EQ(seq.frames[0][0], 1.0f);
  EXPECT_EQ(seq.frames[1][0], -1.0f);
  EXPECT_EQ(seq.frames[2][0], 1.0f);
}

}  // namespace
}  // namespace pat
