#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "pat/detector.hpp"
#include "pat/error.hpp"
#include "pat/transition.hpp"

namespace pat {
namespace {

const Shape kTiny{8, 8, 3};

DetectorArchitecture tiny_arch() { return DetectorArchitecture{kTiny, {4, 8}, {8, 2}}; }

Frame random_frame(Rng& rng, Shape s, double lo = -1.0, double hi = 1.0) {
  std::vector<float> d(s.size());
  for (auto& v : d) v = static_cast<float>(rng.uniform(lo, hi));
  return Frame(s, std::move(d));
}

VideoSequence static_video(Rng& rng, std::size_t T, Shape s, std::string id) {
  return VideoSequence(std::vector<Frame>(T, random_frame(rng, s, 0.0, 1.0)), std::move(id));
}

TEST(ArchitectureTest, DefaultLayout) {
  const auto arch = DetectorArchitecture::default_for({64, 64, 3});
  EXPECT_EQ(arch.conv_channels, (std::vector<std::uint32_t>{16, 32, 64}));
  EXPECT_EQ(arch.dense_widths, (std::vector<std::uint32_t>{128, 2}));
  EXPECT_EQ(arch.flattened_size(), 64u * 8 * 8);
  EXPECT_NO_THROW(arch.validate());
  EXPECT_NO_THROW(DetectorArchitecture::default_for({112, 112, 3}).validate());
}

TEST(ArchitectureTest, Validation) {
  EXPECT_THROW((DetectorArchitecture{{12, 12, 3}, {4, 4, 4}, {2}}).validate(), ConfigError);
  EXPECT_THROW((DetectorArchitecture{kTiny, {4}, {8, 3}}).validate(), ConfigError);
  EXPECT_THROW((DetectorArchitecture{kTiny, {4}, {}}).validate(), ConfigError);
  EXPECT_THROW((DetectorArchitecture{kTiny, {0}, {2}}).validate(), ConfigError);
}

TEST(ModelInitTest, ShapesFiniteAndZeroBiases) {
  Rng rng(1);
  const auto arch = DetectorArchitecture::default_for({64, 64, 3});
  const auto model = model_init<float>(arch, rng);
  const auto shapes = arch.parameter_shapes();
  ASSERT_EQ(model.parameters().size(), shapes.size());
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    EXPECT_EQ(model.parameters()[i].shape, shapes[i]);
  }
  EXPECT_TRUE(model.all_finite());
  for (std::size_t i = 1; i < shapes.size(); i += 2) {
    for (float b : model.parameters()[i].values) EXPECT_EQ(b, 0.0f);
  }
  EXPECT_FALSE(model.trained());
}

TEST(ModelInitTest, HeScaledVariance) {
  Rng rng(2);
  const auto model = model_init<double>(DetectorArchitecture::default_for({64, 64, 3}), rng);
  // conv2 weights: fan_in = 32 * 9, 64 * 288 samples.
  const auto& w = model.parameters()[4].values;
  double sq = 0.0;
  for (double v : w) sq += v * v;
  EXPECT_NEAR(sq / static_cast<double>(w.size()), 2.0 / 288.0, 0.1 * 2.0 / 288.0);
}

TEST(ModelInitTest, SameSeedSameWeights) {
  Rng a(3);
  Rng b(3);
  EXPECT_EQ(model_init<float>(tiny_arch(), a), model_init<float>(tiny_arch(), b));
}

TEST(ModelTest, RejectsInconsistentParameters) {
  auto params = BasicDetector<float>(tiny_arch()).parameters();
  params[0].values.pop_back();
  EXPECT_THROW(BasicDetector<float>(tiny_arch(), InputMode::Transition, params, false),
               ShapeError);
  auto nan = BasicDetector<float>(tiny_arch()).parameters();
  nan[2].values[0] = std::numeric_limits<float>::quiet_NaN();
  EXPECT_THROW(BasicDetector<float>(tiny_arch(), InputMode::Transition, nan, false), RangeError);
}

TEST(ForwardTest, ProbabilitiesSumToOne) {
  Rng rng(4);
  const auto model = model_init<double>(tiny_arch(), rng);
  std::vector<Frame> batch;
  for (int i = 0; i < 10; ++i) batch.push_back(random_frame(rng, kTiny));
  const auto probs = forward(model, batch);
  ASSERT_EQ(probs.size(), 10u);
  for (const auto& p : probs) {
    EXPECT_NEAR(p.clean + p.adversarial, 1.0, 1e-12);
    EXPECT_GE(p.adversarial, 0.0);
    EXPECT_LE(p.adversarial, 1.0);
  }
}

TEST(ForwardTest, ZeroInputIsFinite) {
  Rng rng(5);
  const auto model = model_init<float>(tiny_arch(), rng);
  const auto probs = forward(model, std::vector<Frame>{Frame::zeros(kTiny)});
  // Zero biases and zero input give equal logits.
  EXPECT_DOUBLE_EQ(probs[0].adversarial, 0.5);
  EXPECT_TRUE(std::isfinite(probs[0].clean));
}

TEST(ForwardTest, BatchOrderAndPermutationInvariance) {
  Rng rng(6);
  const auto model = model_init<double>(tiny_arch(), rng);
  std::vector<Frame> batch;
  for (int i = 0; i < 7; ++i) batch.push_back(random_frame(rng, kTiny));
  const auto probs = forward(model, batch);
  std::vector<std::size_t> perm = {3, 0, 6, 1, 5, 2, 4};
  std::vector<Frame> shuffled;
  for (std::size_t i : perm) shuffled.push_back(batch[i]);
  const auto sp = forward(model, shuffled);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    EXPECT_NEAR(sp[i].adversarial, probs[perm[i]].adversarial, 1e-12);
    // Same as scoring the item alone.
    EXPECT_NEAR(forward(model, std::vector<Frame>{batch[perm[i]]})[0].adversarial,
                sp[i].adversarial, 1e-12);
  }
}

TEST(ForwardTest, ShapeMismatch) {
  Rng rng(7);
  const auto model = model_init<float>(tiny_arch(), rng);
  EXPECT_THROW(forward(model, std::vector<Frame>{Frame::zeros({16, 16, 3})}), ShapeError);
}

TEST(LossTest, UniformPredictionIsLn2) {
  const BasicDetector<double> zero(tiny_arch());
  Rng rng(8);
  std::vector<Frame> batch = {random_frame(rng, kTiny), random_frame(rng, kTiny)};
  const auto r = loss_and_grads(zero, batch, std::vector{FrameLabel::Clean, FrameLabel::Adversarial});
  EXPECT_NEAR(r.loss, std::log(2.0), 1e-12);
}

TEST(LossTest, PerfectPredictionIsNearZero) {
  BasicDetector<double> model(tiny_arch());
  auto& out_bias = model.mutable_parameters().back().values;
  out_bias = {-30.0, 30.0};
  const auto r = loss_and_grads(model, std::vector<Frame>{Frame::zeros(kTiny)},
                                std::vector{FrameLabel::Adversarial});
  EXPECT_LT(r.loss, 1e-20);
  EXPECT_GE(r.loss, 0.0);
}

TEST(LossTest, CrossEntropyMatchesNegLogProbability) {
  Rng rng(9);
  const auto model = model_init<double>(tiny_arch(), rng);
  for (int i = 0; i < 20; ++i) {
    const std::vector<Frame> batch = {random_frame(rng, kTiny)};
    const FrameLabel label = i % 2 ? FrameLabel::Adversarial : FrameLabel::Clean;
    const auto p = forward(model, batch)[0];
    const double p_true = label == FrameLabel::Adversarial ? p.adversarial : p.clean;
    EXPECT_NEAR(loss_and_grads(model, batch, std::vector{label}).loss, -std::log(p_true), 1e-12);
  }
}

TEST(LossTest, LengthMismatch) {
  const BasicDetector<double> model(tiny_arch());
  EXPECT_THROW(loss_and_grads(model, std::vector<Frame>{Frame::zeros(kTiny)},
                              std::vector{FrameLabel::Clean, FrameLabel::Clean}),
               ShapeError);
}

ParameterSet<double> scalar(double v) { return {Tensor<double>{{1}, {v}}}; }

TEST(SgdTest, PlainStep) {
  auto w = scalar(0.0);
  ParameterSet<double> vel;
  sgd_step(w, scalar(1.0), {0.1, 0.0}, vel);
  EXPECT_DOUBLE_EQ(w[0].values[0], -0.1);
}

TEST(SgdTest, ZeroGradsLeaveWeights) {
  auto w = scalar(0.7);
  ParameterSet<double> vel;
  for (int i = 0; i < 3; ++i) sgd_step(w, scalar(0.0), {0.1, 0.9}, vel);
  EXPECT_EQ(w[0].values[0], 0.7);
}

TEST(SgdTest, MomentumRecurrence) {
  auto w = scalar(0.0);
  ParameterSet<double> vel;
  sgd_step(w, scalar(1.0), {0.1, 0.9}, vel);
  sgd_step(w, scalar(1.0), {0.1, 0.9}, vel);
  EXPECT_NEAR(w[0].values[0], -0.29, 1e-15);
}

TEST(SgdTest, ShapeMismatch) {
  auto w = scalar(0.0);
  ParameterSet<double> vel;
  EXPECT_THROW(sgd_step(w, ParameterSet<double>{}, {0.1, 0.9}, vel), ShapeError);
  EXPECT_THROW(sgd_step(w, ParameterSet<double>{Tensor<double>{{2}, {1, 2}}}, {0.1, 0.9}, vel),
               ShapeError);
}

TrainConfig tiny_config() {
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 8;
  cfg.learning_rate = 1e-2;
  cfg.architecture = tiny_arch();
  cfg.seed = RngSeed{99};
  return cfg;
}

std::vector<VideoSequence> tiny_corpus(std::size_t videos, std::size_t frames) {
  Rng rng(10);
  std::vector<VideoSequence> out;
  for (std::size_t v = 0; v < videos; ++v) {
    out.push_back(static_video(rng, frames, kTiny, "v" + std::to_string(v)));
  }
  return out;
}

TEST(TrainTest, ExamplesPerEpoch) {
  const auto corpus = tiny_corpus(3, 5);
  const auto result = train(corpus, tiny_config());
  ASSERT_EQ(result.history.size(), 2u);
  for (const auto& e : result.history) EXPECT_EQ(e.examples, 2u * 3 * 5);
  EXPECT_TRUE(result.model.trained());
}

TEST(TrainTest, DeterministicForSeed) {
  const auto corpus = tiny_corpus(2, 6);
  const auto a = train(corpus, tiny_config());
  const auto b = train(corpus, tiny_config());
  EXPECT_EQ(a.model, b.model);
  auto other = tiny_config();
  other.seed = RngSeed{100};
  EXPECT_FALSE(train(corpus, other).model == a.model);
}

TEST(TrainTest, SeparableToyLossDecreases) {
  // Static videos have all-zero transition frames; strong noise is trivially
  // separable from them.
  const auto corpus = tiny_corpus(4, 8);
  auto cfg = tiny_config();
  cfg.epochs = 10;
  cfg.batch_size = 16;
  cfg.sigma_mode = SigmaMode::fixed(0.5);
  const auto result = train(corpus, cfg);
  for (std::size_t e = 2; e < result.history.size(); ++e) {
    EXPECT_LE(result.history[e].mean_loss, result.history[e - 1].mean_loss) << "epoch " << e + 1;
  }
  EXPECT_GE(result.history.back().accuracy, 0.95);
}

TEST(TrainTest, OriginalInputModeRuns) {
  auto cfg = tiny_config();
  cfg.input_mode = InputMode::Original;
  const auto result = train(tiny_corpus(2, 4), cfg);
  EXPECT_EQ(result.model.input_mode(), InputMode::Original);
  EXPECT_EQ(result.history.size(), 2u);
}

TEST(TrainTest, InvalidInputs) {
  EXPECT_THROW(train(std::vector<VideoSequence>{}, tiny_config()), ConfigError);
  auto cfg = tiny_config();
  cfg.epochs = 0;
  EXPECT_THROW(train(tiny_corpus(1, 3), cfg), ConfigError);
  cfg = tiny_config();
  cfg.momentum = 1.0;
  EXPECT_THROW(train(tiny_corpus(1, 3), cfg), ConfigError);
  Rng rng(11);
  const std::vector<VideoSequence> wrong = {static_video(rng, 3, {16, 16, 3}, "big")};
  EXPECT_THROW(train(wrong, tiny_config()), ShapeError);
}

TEST(PredictTest, ScoresAreProbabilitiesAndStable) {
  Rng rng(12);
  const auto model = model_init<float>(tiny_arch(), rng);
  for (int i = 0; i < 20; ++i) {
    const Frame f = random_frame(rng, kTiny);
    const double s = predict_frame(model, f);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
    EXPECT_EQ(s, predict_frame(model, f));
  }
}

TEST(DetectVideoTest, ReportMatchesFrameScores) {
  Rng rng(13);
  const auto model = model_init<float>(tiny_arch(), rng);
  std::vector<Frame> frames;
  for (int t = 0; t < 20; ++t) frames.push_back(random_frame(rng, kTiny, 0.0, 1.0));
  const VideoSequence video(frames, "r");
  const auto report = detect_video(model, video, 3);
  const auto tr = transition_sequence(video);
  ASSERT_EQ(report.per_frame_scores().size(), 20u);
  // Batched and single-frame inference take different GEMM paths, so the
  // scores agree to rounding rather than bitwise.
  for (std::size_t t = 0; t < 20; ++t) {
    EXPECT_NEAR(report.per_frame_scores()[t], predict_frame(model, tr.frames[t]), 1e-6);
  }
  EXPECT_GE(report.elapsed_seconds(), 0.0);
  EXPECT_THROW(detect_video(model, video, 0), ConfigError);
  const VideoSequence wrong(std::vector<Frame>(3, Frame::zeros({16, 16, 3})), "w");
  EXPECT_THROW(detect_video(model, wrong, 3), ShapeError);
}

}  // namespace
}  // namespace pat
