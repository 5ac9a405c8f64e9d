#include <gtest/gtest.h>

#include "oracles/finite_difference.hpp"
#include "pat/detector.hpp"

namespace pat {
namespace {

Frame random_frame(Rng& rng, Shape s) {
  std::vector<float> d(s.size());
  for (auto& v : d) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  return Frame(s, std::move(d));
}

struct Case {
  const char* name;
  DetectorArchitecture arch;
};

void PrintTo(const Case& c, std::ostream* os) { *os << c.name; }

class GradientCheck : public ::testing::TestWithParam<Case> {};

TEST_P(GradientCheck, AnalyticMatchesCentralDifferences) {
  const auto& arch = GetParam().arch;
  Rng rng(1234);
  for (int trial = 0; trial < 5; ++trial) {
    // Non-zero biases so every layer's bias path is exercised.
    auto model = model_init<double>(arch, rng);
    for (std::size_t i = 1; i < model.parameters().size(); i += 2) {
      for (auto& b : model.mutable_parameters()[i].values) b = rng.uniform(-0.1, 0.1);
    }
    std::vector<Frame> batch;
    std::vector<FrameLabel> labels;
    for (int n = 0; n < 3; ++n) {
      batch.push_back(random_frame(rng, arch.input));
      labels.push_back(n % 2 ? FrameLabel::Adversarial : FrameLabel::Clean);
    }
    const auto analytic = loss_and_grads(model, batch, labels).grads;
    const auto numeric = oracle::finite_difference_grads(model, batch, labels);
    for (std::size_t t = 0; t < analytic.size(); ++t) {
      for (std::size_t k = 0; k < analytic[t].values.size(); ++k) {
        EXPECT_LT(oracle::relative_error(analytic[t].values[k], numeric[t].values[k]), 1e-4)
            << "tensor " << t << " index " << k << ": " << analytic[t].values[k] << " vs "
            << numeric[t].values[k];
      }
    }
  }
}

INSTANTIATE_TEST_SUITE_P(
    Layers, GradientCheck,
    ::testing::Values(Case{"dense_only", {{4, 4, 2}, {}, {5, 2}}},
                      Case{"one_conv", {{4, 4, 2}, {3}, {2}}},
                      Case{"two_conv", {{8, 8, 3}, {3, 4}, {6, 2}}},
                      Case{"deep_dense", {{8, 8, 1}, {2}, {7, 5, 2}}}),
    [](const auto& info) { return std::string(info.param.name); });

}  // namespace
}  // namespace pat
